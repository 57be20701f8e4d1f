//! Uniform grids, trapezoid quadrature, difference quotients and the norms
//! of the solution spaces.

mod grid;
mod norms;
mod quad;

pub use grid::{Grid, GridFunction};
pub use norms::{
    bracket, gn_check, norms, weighted_norm_sum, x_norm, y_norm, GnReport, NormReport,
};
pub use quad::{derivative, integrate, second_derivative, Antiderivative};

pub(crate) use norms::lq_norm;
