//! Lifespan experiments: the model `T₁,ₚ(ε)`, ε-sweeps in the two data
//! classes, power-law fits and the extension exponent.

mod approx;
mod fit;
mod sweep;

pub use approx::{approximation_error_curve, ApproxConfig, ApproxCurve};
pub use fit::{extension_exponent, fit_power_law, FitReport};
pub use sweep::{sweep, SweepConfig};

use crate::error::{invalid, Result};
use crate::numerics::{integrate, Grid, GridFunction};

/// Fujita exponent in one space dimension.
pub const FUJITA: f64 = 3.0;

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p <= FUJITA {
        Ok(())
    } else {
        Err(invalid("p", format!("exponent must lie in (1, 3], got {p}")))
    }
}

/// A lifespan kept as its natural logarithm, so that the critical
/// `exp(ε^{-2})` stays representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelLifespan {
    pub ln: f64,
}

impl ModelLifespan {
    /// The lifespan itself; infinite once it exceeds `f64::MAX`.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }
}

/// `ε^{-2(p-1)/(3-p)}` for `p < 3` and `exp(ε^{-2})` at `p = 3`.
pub fn lifespan_model(p: f64, eps: f64) -> Result<ModelLifespan> {
    check_p(p)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("amplitude must be positive, got {eps}")));
    }
    let ln = if p == FUJITA {
        eps.powi(-2)
    } else {
        -2.0 * (p - 1.0) / (3.0 - p) * eps.ln()
    };
    Ok(ModelLifespan { ln })
}

/// Lifespan exponents in `ε`: `T₀ ∼ ε^{-classA}` for class A data and
/// `ε^{-classB}` for class B. At `p = 3` they are exponents of `log T₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub class_a: f64,
    pub class_b: f64,
    pub r: f64,
    pub log_scale: bool,
}

pub fn predicted_exponents(p: f64) -> Result<Exponents> {
    check_p(p)?;
    Ok(if p == FUJITA {
        Exponents {
            class_a: 2.0,
            class_b: 2.0 * p,
            r: 2.0 * (p - 1.0),
            log_scale: true,
        }
    } else {
        let a = 2.0 * (p - 1.0) / (3.0 - p);
        Exponents {
            class_a: a,
            class_b: p * a,
            r: (p - 1.0) * a,
            log_scale: false,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassTag {
    A,
    B,
}

impl ClassTag {
    pub fn name(self) -> &'static str {
        match self {
            Self::A => "A",
            Self::B => "B",
        }
    }
}

impl std::str::FromStr for ClassTag {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Self::A),
            "B" | "b" => Ok(Self::B),
            _ => Err(invalid("class", format!("expected A or B, got `{s}`"))),
        }
    }
}

/// Initial-data shapes, scaled by `ε` in a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum DataClass {
    /// `(f₀, f₁)` with `∫(f₀ + f₁) > 0`.
    A { f0: GridFunction, f1: GridFunction },
    /// `(f, −f)`.
    B { f: GridFunction },
}

impl DataClass {
    /// Class A reference data `(f, f)`.
    pub fn a(f: GridFunction) -> Result<Self> {
        let c = Self::A { f0: f.clone(), f1: f };
        c.validate()?;
        Ok(c)
    }

    pub fn b(f: GridFunction) -> Result<Self> {
        let c = Self::B { f };
        c.validate()?;
        Ok(c)
    }

    pub fn tag(&self) -> ClassTag {
        match self {
            Self::A { .. } => ClassTag::A,
            Self::B { .. } => ClassTag::B,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::A { f0, f1 } => {
                let sum = f0.add(f1)?;
                if integrate(&sum)? > 0.0 {
                    Ok(())
                } else {
                    Err(invalid("data", "class A needs a positive integral of f0 + f1"))
                }
            }
            Self::B { f } => {
                f.check_finite("f")?;
                if f.max_abs() > 0.0 {
                    Ok(())
                } else {
                    Err(invalid("data", "class B needs a nonzero profile"))
                }
            }
        }
    }

    /// `(εf₀, εf₁)` or `(εf, −εf)`.
    pub fn data(&self, eps: f64) -> (GridFunction, GridFunction) {
        match self {
            Self::A { f0, f1 } => (f0.scaled(eps), f1.scaled(eps)),
            Self::B { f } => (f.scaled(eps), f.scaled(-eps)),
        }
    }

    fn profile(&self) -> &GridFunction {
        match self {
            Self::A { f0, .. } => f0,
            Self::B { f } => f,
        }
    }
}

/// One sweep entry.
#[derive(Debug, Clone, PartialEq)]
pub struct LifespanRecord {
    pub eps: f64,
    pub p: f64,
    pub class: ClassTag,
    pub t0: f64,
    pub censored: bool,
    pub refined: bool,
    pub dx: f64,
    pub dt: f64,
    pub half_width: f64,
    pub threshold: f64,
}

/// `exp(−1/(1−x²))` on `|x| < 1`, zero outside.
pub fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (-1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

pub fn default_profile(grid: Grid) -> GridFunction {
    GridFunction::from_fn(grid, bump)
}
