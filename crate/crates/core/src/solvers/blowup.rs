use super::fdtd::{march, FdtdOptions};
use super::ProblemSpec;
use crate::error::Result;
use crate::trajectory::{Status, Trajectory};

/// Threshold-crossing surrogate for the lifespan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifespanEstimate {
    pub t0: f64,
    pub refined: bool,
    /// No crossing before the end of the run; `t0` is then the final time.
    pub censored: bool,
}

/// First stored time with `‖u‖_∞ ≥ m`, or the end of the run.
pub fn detect_blowup(traj: &Trajectory, m: f64) -> LifespanEstimate {
    let crossing = traj
        .norm_history
        .iter()
        .zip(&traj.states)
        .find(|(n, _)| n.linf >= m)
        .map(|(_, s)| s.time);
    let crossing = match (crossing, traj.status) {
        (Some(t), _) => Some(t),
        // values overflowed before reaching m in a stored state
        (None, Status::BlowupDetected { time }) => Some(time),
        _ => None,
    };
    match crossing {
        Some(t0) => LifespanEstimate { t0, refined: false, censored: false },
        None => LifespanEstimate {
            t0: traj.last().map_or(traj.t_end, |s| s.time.max(traj.t_end)),
            refined: false,
            censored: true,
        },
    }
}

/// Reruns the finite-difference solver with halved spacing and step from
/// the last stored state with `‖u‖_∞ ≤ 1` before the crossing. The equation
/// is autonomous, so the restart only shifts the clock. Censored runs, and
/// refined runs that fail to cross, return the unrefined estimate.
pub fn refine_blowup(spec: &ProblemSpec, opts: &FdtdOptions, traj: &Trajectory) -> Result<LifespanEstimate> {
    let coarse = detect_blowup(traj, spec.blowup_threshold);
    if coarse.censored {
        return Ok(coarse);
    }
    let Some(start) = traj
        .states
        .iter()
        .zip(&traj.norm_history)
        .filter(|(s, n)| s.time < coarse.t0 && n.linf <= 1.0)
        .map(|(s, _)| s)
        .last()
    else {
        return Ok(coarse);
    };
    let dx = 0.5 * start.u.grid().spacing();
    let mut fine_opts = *opts;
    fine_opts.dx = dx;
    if let Some(a) = fine_opts.adaptive.as_mut() {
        a.nonlinear_cfl *= 0.5;
    }
    let dt = match opts.adaptive {
        Some(a) => a.courant * dx,
        None => 0.5 * spec.dt,
    };
    let fine_spec = ProblemSpec {
        u0: start.u.clone(),
        u1: start.ut.clone(),
        t_end: (coarse.t0 - start.time) * 2.0 + 1.0,
        dt: dt.min(dx),
        store_every: usize::MAX,
        ..spec.clone()
    };
    let fine = march(&fine_spec, &fine_opts, start.time)?;
    let est = detect_blowup(&fine, spec.blowup_threshold);
    Ok(if est.censored {
        coarse
    } else {
        LifespanEstimate { t0: est.t0, refined: true, censored: false }
    })
}
