use crate::error::{Error, Result};
use crate::numerics::{norms, weighted_norm_sum, Antiderivative, GridFunction};
use crate::semigroup::{free_solution, FreeSolutionInputs};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// The data do not satisfy `u₀ ≤ 0`, `u₁ + u₀/2 ≤ 0`.
    Hypothesis,
    Positive,
    BelowLower,
    AboveUpper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub time: f64,
    pub x: f64,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    pub hypotheses_hold: bool,
    /// Largest value of `u` over all stored states after the first.
    pub max_u: f64,
    /// Largest amount by which `u` leaves `[lower, upper]`.
    pub max_envelope_excess: f64,
    /// Size of the data: the `Y(0)` weighted sum of `(u₀, u₁)`.
    pub eps1: f64,
    /// `max_t ‖u‖_{Y(t)} / eps1`.
    pub fitted_a: f64,
    /// Running `‖u‖_{Y(t)}` at each stored time.
    pub y_history: Vec<(f64, f64)>,
    /// The worst violation, if any tolerance was exceeded.
    pub violation: Option<Violation>,
    pub passed: bool,
}

/// For data with `u₀ ≤ 0` and `u₁ + u₀/2 ≤ 0`, checks at every stored time
/// that `u ≤ sign_tol` and
///
/// ```text
/// S(t)(u₀+u₁) + ∂ₜS(t)u₀ ≤ u(t) ≤ e^{-t/2}(u₀(x−t) + u₀(x+t))/2 + e^{-t/2}/2 ∫_{x−t}^{x+t} (u₁ + u₀/2)
/// ```
///
/// up to `envelope_tol`. Data violating the hypotheses are reported without
/// running the envelope test.
pub fn sign_and_apriori_check(traj: &Trajectory, sign_tol: f64, envelope_tol: f64) -> Result<SignReport> {
    let first = traj.states.first().ok_or(Error::Empty("trajectory"))?;
    let (u0, u1) = (&first.u, &first.ut);
    let q = u1.zip_with(u0, |b, a| b + 0.5 * a)?;
    let eps1 = weighted_norm_sum(0.0, 0.0, &norms(u0, traj.p)?, &norms(u1, traj.p)?);
    let mut report = SignReport {
        hypotheses_hold: true,
        max_u: f64::NEG_INFINITY,
        max_envelope_excess: 0.0,
        eps1,
        fitted_a: 0.0,
        y_history: Vec::new(),
        violation: None,
        passed: false,
    };
    let worst_data = u0
        .values()
        .iter()
        .chain(q.values())
        .zip(u0.grid().points().chain(u0.grid().points()))
        .max_by(|a, b| a.0.total_cmp(b.0));
    if let Some((&v, x)) = worst_data {
        if v > 0.0 {
            report.hypotheses_hold = false;
            report.violation = Some(Violation { kind: ViolationKind::Hypothesis, time: 0.0, x, amount: v });
            return Ok(report);
        }
    }

    let mut worst: Option<Violation> = None;
    let mut note = |v: Violation, tol: f64| {
        if v.amount > tol && worst.map_or(true, |w| v.amount - tol > w.amount) {
            worst = Some(v);
        }
    };
    let mut y_sup: f64 = 0.0;
    for state in &traj.states {
        let t = state.time;
        let grid = *state.u.grid();
        let (a0, a1, aq) = (u0.resample(&grid), u1.resample(&grid), q.resample(&grid));
        y_sup = y_sup.max(weighted_norm_sum(t, 0.0, &norms(&state.u, traj.p)?, &norms(&state.ut, traj.p)?));
        report.y_history.push((t, y_sup));
        if t == 0.0 {
            continue;
        }
        let lower = free_solution(&FreeSolutionInputs { u0: a0.clone(), u1: a1, t })?.value.u;
        let upper = upper_bound(&a0, &aq, t);
        for (i, x) in grid.points().enumerate() {
            let u = state.u.values()[i];
            report.max_u = report.max_u.max(u);
            let below = lower.values()[i] - u;
            let above = u - upper[i];
            report.max_envelope_excess = report.max_envelope_excess.max(below).max(above);
            note(Violation { kind: ViolationKind::Positive, time: t, x, amount: u }, sign_tol);
            note(Violation { kind: ViolationKind::BelowLower, time: t, x, amount: below }, envelope_tol);
            note(Violation { kind: ViolationKind::AboveUpper, time: t, x, amount: above }, envelope_tol);
        }
    }
    report.fitted_a = if eps1 > 0.0 { y_sup / eps1 } else { 0.0 };
    report.violation = worst;
    report.passed = worst.is_none();
    Ok(report)
}

fn upper_bound(u0: &GridFunction, q: &GridFunction, t: f64) -> Vec<f64> {
    let damp = (-0.5 * t).exp();
    let ahead = u0.translated(t);
    let behind = u0.translated(-t);
    let integral = Antiderivative::new(q);
    u0.grid()
        .points()
        .enumerate()
        .map(|(i, x)| damp * (0.5 * (ahead.values()[i] + behind.values()[i]) + 0.5 * integral.window(x - t, x + t)))
        .collect()
}
