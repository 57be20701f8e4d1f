use rayon::prelude::*;

use super::{check_p, lifespan_model, ClassTag, DataClass, LifespanRecord};
use crate::error::{invalid, Result};
use crate::kernels::domain_half_width;
use crate::numerics::{norms, Grid};
use crate::solvers::{
    detect_blowup, refine_blowup, solve_fdtd, Adaptive, FdtdOptions, ProblemSpec, DEFAULT_BLOWUP_THRESHOLD,
};

/// Settings shared by every run of a sweep. Runs use the adaptive
/// finite-difference solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub dx: f64,
    pub dt: f64,
    pub threshold: f64,
    /// Fixed horizon; `None` sizes it from the lifespan model.
    pub t_end: Option<f64>,
    /// Multiplier on the model lifespan when the horizon is automatic.
    pub safety: f64,
    /// Cap on the automatic horizon.
    pub t_max: f64,
    pub adaptive: Adaptive,
    pub refine: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dx: 0.05,
            dt: 0.025,
            threshold: DEFAULT_BLOWUP_THRESHOLD,
            t_end: None,
            safety: 1000.0,
            t_max: 1e12,
            adaptive: Adaptive::default(),
            refine: true,
        }
    }
}

impl SweepConfig {
    /// `safety · T(ε_eff)` with `ε_eff = ε‖f‖₁` in class A and `(ε‖f‖₁)^p`
    /// in class B, capped at `t_max`.
    pub fn horizon(&self, p: f64, data: &DataClass, eps: f64) -> Result<f64> {
        if let Some(t) = self.t_end {
            return Ok(t);
        }
        let size = eps * norms(data.profile(), 2.0)?.l1;
        let eff = match data.tag() {
            ClassTag::A => size,
            ClassTag::B => size.powf(p),
        };
        let ln = lifespan_model(p, eff)?.ln + self.safety.ln();
        Ok(ln.exp().min(self.t_max))
    }
}

/// Lifespan records for each `ε`, in input order. Data are `(εf₀, εf₁)` or
/// `(εf, −εf)`; the grid starts at the light-cone width of the wave phase
/// and widens on demand. A run that fails is recorded as censored.
pub fn sweep(p: f64, data: &DataClass, eps_list: &[f64], cfg: &SweepConfig) -> Result<Vec<LifespanRecord>> {
    check_p(p)?;
    data.validate()?;
    if let Some(&bad) = eps_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(invalid("eps", format!("amplitudes must be positive, got {bad}")));
    }
    let support = data.profile().support_radius(1e-12);
    let half_width = domain_half_width(cfg.adaptive.wave_time, support);
    let grid = Grid::covering(half_width, cfg.dx)?;
    Ok(eps_list
        .par_iter()
        .map(|&eps| {
            let t_end = cfg.horizon(p, data, eps).unwrap_or(cfg.t_max);
            let run = || -> Result<(f64, bool, bool)> {
                let (u0, u1) = data.data(eps);
                let spec = ProblemSpec {
                    blowup_threshold: cfg.threshold,
                    store_every: usize::MAX,
                    ..ProblemSpec::new(p, u0.resample(&grid), u1.resample(&grid), t_end, cfg.dt)?
                };
                let opts = FdtdOptions::new(cfg.dx).adaptive(cfg.adaptive);
                let traj = solve_fdtd(&spec, &opts)?;
                let est = if cfg.refine {
                    refine_blowup(&spec, &opts, &traj)?
                } else {
                    detect_blowup(&traj, cfg.threshold)
                };
                Ok((est.t0, est.censored, est.refined))
            };
            let (t0, censored, refined) = run().unwrap_or((t_end, true, false));
            LifespanRecord {
                eps,
                p,
                class: data.tag(),
                t0,
                censored,
                refined,
                dx: cfg.dx,
                dt: cfg.dt,
                half_width: grid.half_width(),
                threshold: cfg.threshold,
            }
        })
        .collect())
}
