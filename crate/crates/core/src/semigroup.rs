//! The propagator `S(t)` of the linear damped wave equation in one space
//! dimension, its first and second derivatives, and the exact identities it
//! satisfies.
//!
//! `S(t)f = K̃₀(t) ∗ f` solves `w'' + w' − w_xx = 0` with `w(0) = 0`,
//! `w'(0) = f`. The derivatives split into travelling boundary terms plus a
//! smooth kernel:
//!
//! ```text
//! ∂ₓS(t)f   = e^{-t/2} (f(x+t) − f(x−t))/2                                   + K̃₁(t) ∗ f
//! ∂ₜS(t)f   = e^{-t/2} (f(x+t) + f(x−t))/2                                   + K̃₂(t) ∗ f
//! ∂ₜₓS(t)f  = e^{-t/2} (f'(x+t) + f'(x−t))/2 + e^{-t/2}(t/16 − 1/4)(f(x+t) − f(x−t)) + K̃₃(t) ∗ f
//! ∂²ₜS(t)f  = e^{-t/2} (f'(x+t) − f'(x−t))/2 + e^{-t/2}(t/16 − 1/2)(f(x+t) + f(x−t)) + K̃₄(t) ∗ f
//! ```
//!
//! The boundary coefficients are the cone values of the kernel being
//! differentiated: `K₁(t, ±t) = ∓t e^{-t/2}/16` and `K₂(t, ±t) = (t/4 − 1) e^{-t/2}/4`.

use crate::error::{invalid, Result};
use crate::kernels::{kernel_convolve, Checked, KernelId};
use crate::numerics::{derivative, integrate, Antiderivative, GridFunction};
use crate::trajectory::Trajectory;

/// Which derivative of `S(t)` to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Derivative {
    X,
    T,
    TX,
    TT,
}

impl Derivative {
    pub const ALL: [Self; 4] = [Self::X, Self::T, Self::TX, Self::TT];

    fn kernel(self) -> KernelId {
        match self {
            Self::X => KernelId::K1,
            Self::T => KernelId::K2,
            Self::TX => KernelId::K3,
            Self::TT => KernelId::K4,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid("t", format!("time must be non-negative, got {t}")))
    }
}

/// `S(t) f`.
pub fn apply_s(t: f64, f: &GridFunction) -> Result<Checked<GridFunction>> {
    check_time(t)?;
    kernel_convolve(KernelId::K0, t, f)
}

/// `∂ₓS(t)f`, `∂ₜS(t)f`, `∂ₜ∂ₓS(t)f` or `∂²ₜS(t)f`.
pub fn apply_ds(which: Derivative, t: f64, f: &GridFunction) -> Result<Checked<GridFunction>> {
    check_time(t)?;
    let smooth = kernel_convolve(which.kernel(), t, f)?;
    let damp = (-0.5 * t).exp();
    let ahead = f.translated(t);
    let behind = f.translated(-t);
    let mut out = smooth.value;
    let (sign, coeff) = match which {
        Derivative::X => (-1.0, 0.0),
        Derivative::T => (1.0, 0.0),
        Derivative::TX => (1.0, t / 16.0 - 0.25),
        Derivative::TT => (-1.0, t / 16.0 - 0.5),
    };
    match which {
        Derivative::X | Derivative::T => {
            for ((o, a), b) in out.values_mut().iter_mut().zip(ahead.values()).zip(behind.values()) {
                *o += 0.5 * damp * (a + sign * b);
            }
        }
        Derivative::TX | Derivative::TT => {
            let df = derivative(f);
            let d_ahead = df.translated(t);
            let d_behind = df.translated(-t);
            // f(x+t) ∓ f(x−t) enters with the opposite parity to f'
            let parity = -sign;
            for (i, o) in out.values_mut().iter_mut().enumerate() {
                let a = ahead.values()[i];
                let b = behind.values()[i];
                let da = d_ahead.values()[i];
                let db = d_behind.values()[i];
                *o += damp * (0.5 * (da + sign * db) + coeff * (a + parity * b));
            }
        }
    }
    Ok(Checked {
        value: out,
        warning: smooth.warning,
    })
}

/// Initial data and evaluation time for the free (linear) solution.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSolutionInputs {
    pub u0: GridFunction,
    pub u1: GridFunction,
    pub t: f64,
}

/// Value and time derivative of the free solution.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSolution {
    pub u: GridFunction,
    pub ut: GridFunction,
}

/// `u = S(t)(u₀+u₁) + ∂ₜS(t)u₀` and `uₜ = ∂ₜS(t)(u₀+u₁) + ∂²ₜS(t)u₀`.
pub fn free_solution(inp: &FreeSolutionInputs) -> Result<Checked<FreeSolution>> {
    let sum = inp.u0.add(&inp.u1)?;
    let s_sum = apply_s(inp.t, &sum)?;
    let st_u0 = apply_ds(Derivative::T, inp.t, &inp.u0)?;
    let st_sum = apply_ds(Derivative::T, inp.t, &sum)?;
    let stt_u0 = apply_ds(Derivative::TT, inp.t, &inp.u0)?;
    let warning = [&s_sum, &st_u0, &st_sum, &stt_u0]
        .iter()
        .fold(None, |w, c| Checked::<()>::merge(w, c.warning));
    Ok(Checked {
        value: FreeSolution {
            u: s_sum.value.add(&st_u0.value)?,
            ut: st_sum.value.add(&stt_u0.value)?,
        },
        warning,
    })
}

/// Largest pointwise gap between the two sides of
///
/// ```text
/// S(t)h(x) = ⅛ ∫₀ᵗ e^{(τ−t)/2} ∫_{x−t+τ}^{x+t−τ} S(τ)h(ξ) dξ dτ + ½ e^{-t/2} ∫_{x−t}^{x+t} h
/// ```
///
/// with the outer integral by trapezoid in steps of (at most) `dtau` and the
/// inner ones by trapezoid on the grid.
pub fn strans_residual(t: f64, h: &GridFunction, dtau: f64) -> Result<f64> {
    check_time(t)?;
    if !(dtau > 0.0) {
        return Err(invalid("dtau", format!("step must be positive, got {dtau}")));
    }
    h.check_finite("h")?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let grid = *h.grid();
    let n = ((t / dtau) - 1e-9).ceil().max(1.0) as usize;
    let step = t / n as f64;
    let lhs = apply_s(t, h)?.value;
    let h_int = Antiderivative::new(h);
    let mut rhs: Vec<f64> = grid
        .points()
        .map(|x| 0.5 * (-0.5 * t).exp() * h_int.window(x - t, x + t))
        .collect();
    // τ = 0 (S(0) = 0) and τ = t (empty window) contribute nothing
    for m in 1..n {
        let tau = m as f64 * step;
        let s_tau = Antiderivative::new(&apply_s(tau, h)?.value);
        let reach = t - tau;
        let w = 0.125 * step * (0.5 * (tau - t)).exp();
        for (r, x) in rhs.iter_mut().zip(grid.points()) {
            *r += w * s_tau.window(x - reach, x + reach);
        }
    }
    Ok(lhs
        .values()
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Both sides of the mass balance `∫(uₜ + u)(T) = ∫(u₁ + u₀) + ∫₀ᵀ ‖u(τ)‖_{L^p}^p dτ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassReport {
    /// `∫(uₜ + u)` at the last stored time.
    pub lhs: f64,
    /// Time quadrature of `‖u‖_{L^p}^p` over the stored states.
    pub rhs: f64,
    /// `∫(u₁ + u₀)` at the first stored state; zero for data with `u₀ + u₁ = 0`.
    pub initial: f64,
    pub t: f64,
}

pub fn mass_growth(traj: &Trajectory, p: f64) -> Result<MassReport> {
    let (Some(first), Some(last)) = (traj.states.first(), traj.states.last()) else {
        return Err(crate::Error::Empty("trajectory"));
    };
    if !(p > 1.0) {
        return Err(invalid("p", format!("exponent must exceed 1, got {p}")));
    }
    let lhs = integrate(&last.u.add(&last.ut)?)?;
    let initial = integrate(&first.u.add(&first.ut)?)?;
    let powers: Vec<f64> = traj
        .states
        .iter()
        .map(|s| {
            let h = s.u.grid().spacing();
            crate::numerics::lq_norm(s.u.values(), h, p).powf(p)
        })
        .collect();
    let rhs = traj
        .states
        .windows(2)
        .zip(powers.windows(2))
        .map(|(s, v)| 0.5 * (s[1].time - s[0].time) * (v[0] + v[1]))
        .sum();
    Ok(MassReport {
        lhs,
        rhs,
        initial,
        t: last.time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid;

    fn bump(x: f64) -> f64 {
        if x.abs() < 1.0 {
            (-1.0 / (1.0 - x * x)).exp()
        } else {
            0.0
        }
    }

    fn gaussian_on(l: f64, h: f64) -> GridFunction {
        GridFunction::from_fn(Grid::covering(l, h).unwrap(), |x| (-x * x).exp())
    }

    #[test]
    fn propagator_vanishes_at_time_zero() {
        let f = gaussian_on(5.0, 0.05);
        assert!(apply_s(0.0, &f).unwrap().value.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn derivatives_at_time_zero() {
        let f = gaussian_on(5.0, 0.05);
        let st = apply_ds(Derivative::T, 0.0, &f).unwrap().value;
        let stt = apply_ds(Derivative::TT, 0.0, &f).unwrap().value;
        for i in 0..f.len() {
            assert!((st.values()[i] - f.values()[i]).abs() < 1e-15);
            assert!((stt.values()[i] + f.values()[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn mass_identity() {
        let h = GridFunction::from_fn(Grid::covering(40.0, 0.02).unwrap(), |x| bump(x / 2.0));
        let mass = integrate(&h).unwrap();
        for t in [0.1, 1.0, 5.0] {
            let s = integrate(&apply_s(t, &h).unwrap().value).unwrap();
            let want = (1.0 - (-t as f64).exp()) * mass;
            assert!((s - want).abs() <= 1e-6 * mass, "t = {t}: {s} vs {want}");
        }
    }

    #[test]
    fn even_data_gives_even_output() {
        let f = gaussian_on(6.0, 0.05);
        let s = apply_s(1.0, &f).unwrap().value;
        let v = s.values();
        let n = v.len();
        for i in 0..n / 2 {
            assert!((v[i] - v[n - 1 - i]).abs() < 1e-14);
        }
    }

    #[test]
    fn free_solution_at_time_zero_returns_data() {
        let g = Grid::covering(6.0, 0.05).unwrap();
        let u0 = GridFunction::from_fn(g, bump);
        let u1 = GridFunction::from_fn(g, |x| 0.3 * bump(x - 0.2));
        let fs = free_solution(&FreeSolutionInputs { u0: u0.clone(), u1: u1.clone(), t: 0.0 })
            .unwrap()
            .value;
        for i in 0..g.n_points() {
            assert!((fs.u.values()[i] - u0.values()[i]).abs() < 1e-15);
            assert!((fs.ut.values()[i] - u1.values()[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_sum_data_reduces_to_time_derivative() {
        let g = Grid::covering(8.0, 0.05).unwrap();
        let f = GridFunction::from_fn(g, bump);
        let fs = free_solution(&FreeSolutionInputs { u0: f.clone(), u1: f.scaled(-1.0), t: 1.7 })
            .unwrap()
            .value;
        let st = apply_ds(Derivative::T, 1.7, &f).unwrap().value;
        assert_eq!(fs.u, st);
    }

    // Each derivative against a centred difference of the lower-order operator,
    // with the x shift applied analytically to the data.
    #[test]
    fn derivatives_match_finite_differences() {
        let g = Grid::covering(8.0, 0.01).unwrap();
        let wide = |x: f64| bump(x / 3.0);
        let d = 1e-3;
        let on = |s: f64| GridFunction::from_fn(g, move |x| wide(x + s));
        let f = on(0.0);
        let (fp, fm) = (on(d), on(-d));
        let t = 1.3;
        let diff = |a: &GridFunction, b: &GridFunction| a.sub(b).unwrap().scaled(0.5 / d);
        let dist = |a: &GridFunction, b: &GridFunction| a.sub(b).unwrap().max_abs();
        let s = |t, f: &GridFunction| apply_s(t, f).unwrap().value;
        let ds = |w, t, f: &GridFunction| apply_ds(w, t, f).unwrap().value;

        let x_fd = diff(&s(t, &fp), &s(t, &fm));
        assert!(dist(&x_fd, &ds(Derivative::X, t, &f)) < 1e-5);
        let t_fd = diff(&s(t + d, &f), &s(t - d, &f));
        assert!(dist(&t_fd, &ds(Derivative::T, t, &f)) < 1e-5);
        let tx_fd = diff(&ds(Derivative::T, t, &fp), &ds(Derivative::T, t, &fm));
        assert!(dist(&tx_fd, &ds(Derivative::TX, t, &f)) < 1e-4);
        let tt_fd = diff(&ds(Derivative::T, t + d, &f), &ds(Derivative::T, t - d, &f));
        assert!(dist(&tt_fd, &ds(Derivative::TT, t, &f)) < 1e-4);
    }

    #[test]
    fn strans_holds_for_smooth_data() {
        let f = GridFunction::from_fn(Grid::covering(8.0, 0.01).unwrap(), |x| bump(x / 2.0));
        let r = strans_residual(1.5, &f, 0.01).unwrap();
        assert!(r < 1e-4, "residual {r}");
    }

    #[test]
    fn strans_vanishes_at_zero() {
        assert_eq!(strans_residual(0.0, &gaussian_on(4.0, 0.05), 0.01).unwrap(), 0.0);
    }

    #[test]
    fn mass_growth_needs_states() {
        let traj = Trajectory::new(0.1, 2.0, 1.0);
        assert!(mass_growth(&traj, 2.0).is_err());
    }
}
