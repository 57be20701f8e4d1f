use super::check_p;
use crate::error::{invalid, Result};
use crate::kernels::domain_half_width;
use crate::numerics::{norms, Grid, GridFunction};
use crate::semigroup::{apply_ds, Derivative};
use crate::solvers::{solve, ProblemSpec, SolverKind};
use crate::trajectory::Status;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxConfig {
    pub h: f64,
    /// Number of output times in `(0, T₁]`.
    pub samples: usize,
    pub solver: SolverKind,
    pub nonlinear: bool,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            h: 0.02,
            samples: 20,
            solver: SolverKind::Dalembert,
            nonlinear: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxCurve {
    /// `(t, ‖u(t) − ∂ₜS(t)εf‖_{L¹} + ‖·‖_{L^p})`.
    pub points: Vec<(f64, f64)>,
    pub t1: f64,
    /// `‖u(T₁)‖_{W^{1,1}} + ‖u(T₁)‖_{W^{1,p}} + ‖∂ₜu(T₁)‖_{L¹} + ‖∂ₜu(T₁)‖_{L^p}`;
    /// `None` when the run stopped before `T₁`.
    pub end_norm: Option<f64>,
    pub truncated: bool,
}

/// Distance between the solution with data `(εf, −εf)` and the linear
/// approximation `∂ₜS(t)εf` up to `T₁ = ε^{1−p}`.
pub fn approximation_error_curve(
    p: f64,
    eps: f64,
    profile: &GridFunction,
    cfg: &ApproxConfig,
) -> Result<ApproxCurve> {
    check_p(p)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("amplitude must be positive, got {eps}")));
    }
    if cfg.samples == 0 {
        return Err(invalid("samples", "at least one output time is needed"));
    }
    let t1 = eps.powf(1.0 - p);
    let grid = Grid::covering(domain_half_width(t1, profile.support_radius(1e-12)), cfg.h)?;
    let f = profile.resample(&grid).scaled(eps);
    let dt = cfg.h;
    let n_steps = (t1 / dt).ceil() as usize;
    let every = (n_steps / cfg.samples).max(1);
    let mut spec = ProblemSpec::new(p, f.clone(), f.scaled(-1.0), t1, dt)?.storing_every(every);
    spec.nonlinear = cfg.nonlinear;
    let traj = solve(cfg.solver, &spec)?;
    let mut points = Vec::with_capacity(traj.states.len());
    for s in &traj.states {
        let approx = apply_ds(Derivative::T, s.time, &f)?.value;
        let r = norms(&s.u.sub(&approx)?, p)?;
        points.push((s.time, r.l1 + r.lp));
    }
    let truncated = matches!(traj.status, Status::BlowupDetected { .. });
    let end_norm = match traj.last() {
        Some(last) if !truncated => {
            let u = norms(&last.u, p)?;
            let ut = norms(&last.ut, p)?;
            Some(u.w11 + u.w1p + ut.l1 + ut.lp)
        }
        _ => None,
    };
    Ok(ApproxCurve {
        points,
        t1,
        end_norm,
        truncated,
    })
}
