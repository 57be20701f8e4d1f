use super::grid::GridFunction;
use super::quad::{derivative, trapezoid};
use crate::error::{invalid, Error, Result};
use crate::trajectory::{SolverState, Trajectory};

/// Lebesgue and first-order Sobolev norms of one grid function.
///
/// `w11` and `w1p` are `‖f‖ + ‖f'‖` in `L¹` and `L^p` respectively, with
/// `f'` the difference quotient of [`derivative`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub l1: f64,
    pub lp: f64,
    pub w11: f64,
    pub w1p: f64,
    pub linf: f64,
    pub p: f64,
}

impl NormReport {
    pub fn zero(p: f64) -> Self {
        Self {
            l1: 0.0,
            lp: 0.0,
            w11: 0.0,
            w1p: 0.0,
            linf: 0.0,
            p,
        }
    }

    pub fn dx_l1(&self) -> f64 {
        self.w11 - self.l1
    }

    pub fn dx_lp(&self) -> f64 {
        self.w1p - self.lp
    }

    /// `‖f‖_{W^{1,1} ∩ W^{1,p}}` as the sum of the two Sobolev norms.
    pub fn w1_both(&self) -> f64 {
        self.w11 + self.w1p
    }

    /// `‖f‖_{L¹ ∩ L^p}`.
    pub fn l_both(&self) -> f64 {
        self.l1 + self.lp
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(invalid("p", format!("exponent must exceed 1, got {p}")))
    }
}

pub(crate) fn lq_norm(values: &[f64], h: f64, q: f64) -> f64 {
    if q == 1.0 {
        let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        trapezoid(&abs, h)
    } else {
        let pw: Vec<f64> = values.iter().map(|v| v.abs().powf(q)).collect();
        trapezoid(&pw, h).powf(1.0 / q)
    }
}

pub fn norms(f: &GridFunction, p: f64) -> Result<NormReport> {
    check_p(p)?;
    f.check_finite("f")?;
    let h = f.grid().spacing();
    let df = derivative(f);
    let l1 = lq_norm(f.values(), h, 1.0);
    let lp = lq_norm(f.values(), h, p);
    let d1 = lq_norm(df.values(), h, 1.0);
    let dp = lq_norm(df.values(), h, p);
    Ok(NormReport {
        l1,
        lp,
        w11: l1 + d1,
        w1p: lp + dp,
        linf: f.max_abs(),
        p,
    })
}

/// `⟨x⟩ = √(1 + x²)`.
pub fn bracket(x: f64) -> f64 {
    x.hypot(1.0)
}

/// The weighted sum
/// `Σ_{k+ℓ≤1} Σ_{q∈{1,p}} ⟨s⟩^{a+ℓ+k/2+1/(2q')} ‖∂_t^ℓ ∂_x^k u‖_{L^q}`
/// with `1/q' = 1 - 1/q`; `a = 1` gives the X weights and `a = 0` the Y weights.
pub fn weighted_norm_sum(s: f64, base: f64, u: &NormReport, ut: &NormReport) -> f64 {
    let p = u.p;
    let w = |extra: f64, q_dual_inv: f64| bracket(s).powf(base + extra + 0.5 * q_dual_inv);
    let inv_pd = 1.0 - 1.0 / p;
    // (ℓ, k) = (0, 0)
    let value = w(0.0, 0.0) * u.l1 + w(0.0, inv_pd) * u.lp;
    // (ℓ, k) = (0, 1)
    let space = w(0.5, 0.0) * u.dx_l1() + w(0.5, inv_pd) * u.dx_lp();
    // (ℓ, k) = (1, 0)
    let time = w(1.0, 0.0) * ut.l1 + w(1.0, inv_pd) * ut.lp;
    value + space + time
}

fn state_sum(state: &SolverState, s: f64, base: f64, p: f64) -> Result<f64> {
    let u = norms(&state.u, p)?;
    let ut = norms(&state.ut, p)?;
    Ok(weighted_norm_sum(s, base, &u, &ut))
}

/// `‖u‖_{X(t)}` over the stored states with time `≤ t`.
pub fn x_norm(traj: &Trajectory, t: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    if traj.states.is_empty() {
        return Err(Error::Empty("trajectory"));
    }
    let mut sup: f64 = 0.0;
    for st in traj.states.iter().take_while(|s| s.time <= t * (1.0 + 1e-12)) {
        sup = sup.max(state_sum(st, st.time, 1.0, p)?);
    }
    Ok(sup)
}

/// `‖u‖_{Y(t)}` over the stored states with `t1 ≤ time ≤ t`, weights measured
/// from `t1`.
pub fn y_norm(traj: &Trajectory, t: f64, t1: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    if t < t1 {
        return Err(invalid("t", format!("window end {t} precedes start {t1}")));
    }
    let tol = 1e-12 * t.abs().max(1.0);
    let window: Vec<&SolverState> = traj
        .states
        .iter()
        .filter(|s| s.time >= t1 - tol && s.time <= t + tol)
        .collect();
    if window.is_empty() {
        return Err(Error::Empty("Y-norm window"));
    }
    let mut sup: f64 = 0.0;
    for st in window {
        sup = sup.max(state_sum(st, st.time - t1, 0.0, p)?);
    }
    Ok(sup)
}

/// Both sides of `‖|u|^p‖_{L^p} ≤ ‖u‖_{L^p} ‖∂ₓu‖_{L¹}^{p-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn gn_check(f: &GridFunction, p: f64) -> Result<GnReport> {
    check_p(p)?;
    f.check_finite("f")?;
    let h = f.grid().spacing();
    let pow: Vec<f64> = f.values().iter().map(|v| v.abs().powf(p)).collect();
    let lhs = lq_norm(&pow, h, p);
    let df = derivative(f);
    let rhs = lq_norm(f.values(), h, p) * lq_norm(df.values(), h, 1.0).powf(p - 1.0);
    Ok(GnReport {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-8),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid;

    #[test]
    fn zero_function_has_zero_norms() {
        let f = GridFunction::zeros(Grid::new(2.0, 11).unwrap());
        assert_eq!(norms(&f, 2.0).unwrap(), NormReport::zero(2.0));
    }

    #[test]
    fn constant_function_norms() {
        let f = GridFunction::from_fn(Grid::new(1.0, 21).unwrap(), |_| 1.0);
        let r = norms(&f, 2.0).unwrap();
        assert!((r.l1 - 2.0).abs() < 1e-14);
        assert!((r.lp - 2f64.sqrt()).abs() < 1e-14);
        assert!(r.dx_l1().abs() < 1e-12 && r.dx_lp().abs() < 1e-12);
        assert_eq!(r.linf, 1.0);
    }

    #[test]
    fn gaussian_norms_match_closed_forms() {
        let g = Grid::with_spacing(10.0, 0.005).unwrap();
        let f = GridFunction::from_fn(g, |x| (-x * x).exp());
        let r = norms(&f, 2.0).unwrap();
        let pi = std::f64::consts::PI;
        // ∫e^{-x²} = √π, ∫e^{-2x²} = √(π/2), ∫|2x e^{-x²}| = 2, ∫4x²e^{-2x²} = √(π/2)
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(r.l1, pi.sqrt()) < 1e-5);
        assert!(rel(r.lp, (pi / 2.0).sqrt().sqrt()) < 1e-5);
        assert!(rel(r.dx_l1(), 2.0) < 1e-5);
        assert!(rel(r.dx_lp(), (pi / 2.0).sqrt().sqrt()) < 1e-5);
    }

    #[test]
    fn rejects_bad_exponent() {
        let f = GridFunction::zeros(Grid::new(1.0, 5).unwrap());
        assert!(norms(&f, 1.0).is_err());
        assert!(gn_check(&f, 0.5).is_err());
    }

    #[test]
    fn weight_at_origin_is_one() {
        let mut u = NormReport::zero(2.0);
        u.l1 = 3.5;
        u.w11 = 3.5;
        let ut = NormReport::zero(2.0);
        assert_eq!(weighted_norm_sum(0.0, 1.0, &u, &ut), 3.5);
        assert_eq!(weighted_norm_sum(0.0, 0.0, &u, &ut), 3.5);
    }

    #[test]
    fn gn_zero_and_hat() {
        let g = Grid::new(2.0, 401).unwrap();
        let zero = gn_check(&GridFunction::zeros(g), 2.0).unwrap();
        assert!(zero.holds && zero.lhs == 0.0 && zero.rhs == 0.0);
        let hat = GridFunction::from_fn(g, |x| (1.0 - x.abs()).max(0.0));
        let r = gn_check(&hat, 2.0).unwrap();
        // lhs = (∫(1-|x|)^4)^{1/2} = √(2/5); rhs = √(2/3)·2
        assert!((r.lhs - (0.4f64).sqrt()).abs() < 1e-3);
        assert!(r.holds && r.lhs < r.rhs);
    }

    #[test]
    fn gn_narrow_gaussian_strict() {
        let g = Grid::with_spacing(3.0, 0.002).unwrap();
        let f = GridFunction::from_fn(g, |x| (-x * x / 0.02).exp());
        let r = gn_check(&f, 2.0).unwrap();
        assert!(r.holds && r.lhs < 0.9 * r.rhs);
    }
}
