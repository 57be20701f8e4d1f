//! Three independent solvers for `∂²ₜu + ∂ₜu − ∂²ₓu = |u|^p`, blowup
//! detection, and the sign checks for non-positive data.
//!
//! * [`solve_mild`] marches the Duhamel formula built on [`S(t)`](crate::semigroup);
//! * [`solve_dalembert`] integrates `v = e^{t/2}u`, which solves a pure wave
//!   equation, over backward characteristic diamonds (no Bessel functions);
//! * [`solve_fdtd`] is a plain explicit finite-difference scheme.
//!
//! They share [`ProblemSpec`] and produce a [`Trajectory`].

mod blowup;
mod dalembert;
mod fdtd;
mod mild;
mod sign;

pub use blowup::{detect_blowup, refine_blowup, LifespanEstimate};
pub use dalembert::solve_dalembert;
pub use fdtd::{solve_fdtd, Adaptive, Boundary, FdtdOptions};
pub use mild::solve_mild;
pub use sign::{sign_and_apriori_check, SignReport, Violation, ViolationKind};

use crate::error::{invalid, Result};
use crate::numerics::GridFunction;
use crate::trajectory::{SolverState, Status, Trajectory};

/// Default sup-norm level treated as blowup.
pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub p: f64,
    pub u0: GridFunction,
    pub u1: GridFunction,
    pub t_end: f64,
    pub dt: f64,
    pub blowup_threshold: f64,
    /// `false` drops `|u|^p` (the linear validation switch).
    pub nonlinear: bool,
    /// Keep every `store_every`-th step (the first and last are always kept).
    pub store_every: usize,
}

impl ProblemSpec {
    pub fn new(p: f64, u0: GridFunction, u1: GridFunction, t_end: f64, dt: f64) -> Result<Self> {
        let spec = Self {
            p,
            u0,
            u1,
            t_end,
            dt,
            blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
            nonlinear: true,
            store_every: 1,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn storing_every(mut self, k: usize) -> Self {
        self.store_every = k.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p <= 3.0) {
            return Err(invalid("p", format!("exponent must lie in (1, 3], got {}", self.p)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("step must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", format!("horizon must be non-negative, got {}", self.t_end)));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(invalid("M", format!("threshold must be positive, got {}", self.blowup_threshold)));
        }
        if !self.u0.grid().same_as(self.u1.grid()) {
            return Err(crate::Error::GridMismatch);
        }
        self.u0.check_finite("u0")?;
        self.u1.check_finite("u1")
    }

    fn n_steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Mild,
    Dalembert,
    Fdtd,
}

impl SolverKind {
    pub const ALL: [Self; 3] = [Self::Mild, Self::Dalembert, Self::Fdtd];

    pub fn name(self) -> &'static str {
        match self {
            Self::Mild => "mild",
            Self::Dalembert => "dalembert",
            Self::Fdtd => "fdtd",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid("solver", format!("expected mild, dalembert or fdtd, got `{s}`")))
    }
}

/// Runs `kind` on the data grid (the finite-difference solver keeps its
/// spacing and uses the Dirichlet boundary).
pub fn solve(kind: SolverKind, spec: &ProblemSpec) -> Result<Trajectory> {
    match kind {
        SolverKind::Mild => solve_mild(spec),
        SolverKind::Dalembert => solve_dalembert(spec),
        SolverKind::Fdtd => solve_fdtd(spec, &FdtdOptions::new(spec.u0.grid().spacing())),
    }
}

/// `|u|^p`, with the common integer powers unrolled.
#[inline]
pub(crate) fn power(u: f64, p: f64) -> f64 {
    if p == 2.0 {
        u * u
    } else if p == 3.0 {
        (u * u * u).abs()
    } else {
        u.abs().powf(p)
    }
}

/// Bookkeeping shared by the solvers: stride storage, sup-norm milestones
/// (every state whose sup norm has just climbed past a power of ten) and the
/// blowup stop.
pub(crate) struct Recorder {
    traj: Trajectory,
    stride: usize,
    threshold: f64,
    level: f64,
    edge_warned: bool,
}

impl Recorder {
    pub fn new(spec: &ProblemSpec) -> Self {
        Self {
            traj: Trajectory::new(spec.dt, spec.p, spec.t_end),
            stride: spec.store_every.max(1),
            threshold: spec.blowup_threshold,
            level: f64::INFINITY,
            edge_warned: false,
        }
    }

    /// Looks at the state reached after `step` steps. Returns `true` when the
    /// run must stop because the threshold was reached or values overflowed.
    pub fn offer(&mut self, step: usize, state: SolverState, last: bool) -> Result<bool> {
        let linf = state.u.max_abs();
        self.offer_with(step, linf, last, || Ok(state))
    }

    /// [`offer`](Self::offer) for a state with sup norm `linf`, built only if
    /// it is kept.
    pub fn offer_with(
        &mut self,
        step: usize,
        linf: f64,
        last: bool,
        state: impl FnOnce() -> Result<SolverState>,
    ) -> Result<bool> {
        if !linf.is_finite() || linf >= self.threshold {
            let state = state()?;
            let time = state.time;
            if linf.is_finite() && state.ut.values().iter().all(|v| v.is_finite()) {
                self.traj.push(state)?;
            }
            self.traj.status = Status::BlowupDetected { time };
            return Ok(true);
        }
        let level = linf.log10().floor();
        let milestone = level > self.level;
        self.level = level;
        if step % self.stride == 0 || last || milestone {
            let state = state()?;
            if !self.edge_warned && edge_content(&state.u) > 1e-8 * linf.max(f64::MIN_POSITIVE) {
                self.edge_warned = true;
            }
            self.traj.push(state)?;
        }
        Ok(false)
    }

    pub fn flag_truncation(&mut self) {
        self.edge_warned = true;
    }

    pub fn finish(mut self) -> Trajectory {
        if self.edge_warned && self.traj.status == Status::Completed {
            self.traj.status = Status::TruncationWarning;
        }
        self.traj
    }
}

fn edge_content(u: &GridFunction) -> f64 {
    let v = u.values();
    let n = v.len();
    v[..2].iter().chain(&v[n - 2..]).fold(0.0, |m, x| m.max(x.abs()))
}
