//! A numerical laboratory for the one-dimensional semilinear damped wave
//! equation `∂²ₜu + ∂ₜu − ∂²ₓu = |u|^p`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: uniform grids, trapezoid quadrature and the Sobolev-type norms;
//! * [`specfun`]: modified Bessel functions `I₀, I₁, I₂`;
//! * [`kernels`]: the light-cone kernels `K₀ … K₄` of the linear propagator;
//! * [`semigroup`]: the propagator `S(t)`, its derivatives and exact identities;
//! * [`solvers`]: three independent nonlinear solvers and blowup detection;
//! * [`lab`]: lifespan sweeps and power-law exponent fits.

mod conv;
pub mod error;
pub mod kernels;
pub mod lab;
pub mod numerics;
pub mod semigroup;
pub mod solvers;
pub mod specfun;
pub mod trajectory;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/grids.md")]
    mod grids {}
    #[doc = include_str!("../../../book/src/bessel.md")]
    mod bessel {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/propagator.md")]
    mod propagator {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/lifespans.md")]
    mod lifespans {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
