//! Modified Bessel functions of the first kind, orders 0 to 2.
//!
//! Small and moderate arguments use the power series
//! `I_ℓ(z) = Σ_k (z/2)^{2k+ℓ} / (k! (k+ℓ)!)`; beyond [`SERIES_LIMIT`] the
//! exponentially scaled value `e^{-z} I_ℓ(z)` comes from the large-argument
//! expansion in powers of `1/z`, truncated at its smallest term.

use crate::error::{invalid, Result};

/// Arguments up to this value are summed from the power series.
pub const SERIES_LIMIT: f64 = 30.0;

/// Below this `ω` the light-cone ratios use their regularized series.
pub const RATIO_SWITCH: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BesselOrder(u8);

impl BesselOrder {
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(1);
    pub const TWO: Self = Self(2);

    pub fn new(ell: u32) -> Result<Self> {
        if ell <= 2 {
            Ok(Self(ell as u8))
        } else {
            Err(invalid("ell", format!("order must be 0, 1 or 2, got {ell}")))
        }
    }

    pub fn ell(self) -> u32 {
        self.0 as u32
    }
}

fn check_arg(z: f64) -> Result<()> {
    if z >= 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(invalid("z", format!("argument must be finite and non-negative, got {z}")))
    }
}

/// Plain power series; accurate to a few ulp for `0 ≤ z ≤ 30` (all terms
/// are positive).
fn series(ell: u32, z: f64) -> f64 {
    let half = 0.5 * z;
    let q = half * half;
    let mut term = match ell {
        0 => 1.0,
        1 => half,
        _ => 0.5 * q,
    };
    let mut sum = term;
    let mut k = 0.0;
    while term > 1e-16 * sum {
        k += 1.0;
        term *= q / (k * (k + ell as f64));
        sum += term;
    }
    sum
}

/// `e^{-z} I_ℓ(z)` from the large-argument expansion, optimally truncated.
fn asymptotic_scaled(ell: u32, z: f64) -> f64 {
    let mu = 4.0 * (ell * ell) as f64;
    let mut term = 1.0_f64;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let odd = 2.0 * k - 1.0;
        let next = -term * (mu - odd * odd) / (k * 8.0 * z);
        if next.abs() >= term.abs() || next == 0.0 {
            break;
        }
        sum += next;
        term = next;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        k += 1.0;
    }
    sum / (2.0 * std::f64::consts::PI * z).sqrt()
}

/// `I_ℓ(z)` for `z ≥ 0`. Overflows to infinity past `z ≈ 713`.
pub fn bessel_i(order: BesselOrder, z: f64) -> Result<f64> {
    check_arg(z)?;
    if z <= SERIES_LIMIT {
        Ok(series(order.ell(), z))
    } else {
        Ok(z.exp() * asymptotic_scaled(order.ell(), z))
    }
}

/// `e^{-z} I_ℓ(z)` for `z ≥ 0`.
pub fn bessel_i_scaled(order: BesselOrder, z: f64) -> Result<f64> {
    check_arg(z)?;
    Ok(scaled_unchecked(order.ell(), z))
}

fn scaled_unchecked(ell: u32, z: f64) -> f64 {
    if z <= SERIES_LIMIT {
        series(ell, z) * (-z).exp()
    } else {
        asymptotic_scaled(ell, z)
    }
}

/// `r₁(ω) = I₁(ω/2)/ω`, finite at the light cone with `r₁(0) = 1/4`.
pub fn i1_over_z(omega: f64) -> Result<f64> {
    check_arg(omega)?;
    Ok(if omega < RATIO_SWITCH {
        0.25 * reduced_series(1, omega)
    } else {
        bessel_i(BesselOrder::ONE, 0.5 * omega)? / omega
    })
}

/// `r₂(ω) = I₂(ω/2)/ω²`, finite at the light cone with `r₂(0) = 1/32`.
pub fn i2_over_z2(omega: f64) -> Result<f64> {
    check_arg(omega)?;
    Ok(if omega < RATIO_SWITCH {
        reduced_series(2, omega) / 16.0
    } else {
        bessel_i(BesselOrder::TWO, 0.5 * omega)? / (omega * omega)
    })
}

/// `Σ_k (ω/4)^{2k} / (k! (k+ℓ)!)`, i.e. `I_ℓ(ω/2)` with the leading
/// `(ω/4)^ℓ` divided out.
fn reduced_series(ell: u32, omega: f64) -> f64 {
    let q = (0.25 * omega).powi(2);
    let mut term = if ell == 2 { 0.5 } else { 1.0 };
    let mut sum = term;
    let mut k = 0.0;
    while term > 1e-17 * sum {
        k += 1.0;
        term *= q / (k * (k + ell as f64));
        sum += term;
    }
    sum
}

/// `e^{-t/2} I_ℓ(ω/2)` for `0 ≤ ω ≤ t`, evaluated as
/// `e^{(ω-t)/2} · e^{-ω/2} I_ℓ(ω/2)` so that nothing overflows.
pub(crate) fn damped_i(ell: u32, omega: f64, t: f64) -> f64 {
    (0.5 * (omega - t)).exp() * scaled_unchecked(ell, 0.5 * omega)
}

/// `e^{-t/2} r₁(ω)`.
pub(crate) fn damped_r1(omega: f64, t: f64) -> f64 {
    if omega < RATIO_SWITCH {
        (-0.5 * t).exp() * 0.25 * reduced_series(1, omega)
    } else {
        damped_i(1, omega, t) / omega
    }
}

/// `e^{-t/2} r₂(ω)`.
pub(crate) fn damped_r2(omega: f64, t: f64) -> f64 {
    if omega < RATIO_SWITCH {
        (-0.5 * t).exp() * reduced_series(2, omega) / 16.0
    } else {
        damped_i(2, omega, t) / (omega * omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORDERS: [BesselOrder; 3] = [BesselOrder::ZERO, BesselOrder::ONE, BesselOrder::TWO];

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Reference values computed with 40-digit arithmetic.
    const REFERENCE: [(u32, f64, f64); 15] = [
        (0, 0.25, 1.015_686_141_223_607_9),
        (0, 2.5, 3.289_839_144_050_123),
        (0, 7.0, 168.593_908_510_289_7),
        (0, 12.0, 18_948.925_349_296_309),
        (0, 29.5, 478_144_163_888.039_8),
        (1, 0.25, 0.125_979_108_945_467_93),
        (1, 2.5, 2.516_716_245_288_698_4),
        (1, 7.0, 156.039_092_869_955_45),
        (1, 12.0, 18_141.348_781_638_832),
        (1, 29.5, 469_968_885_416.277_3),
        (2, 0.25, 0.007_853_269_659_864_516),
        (2, 2.5, 1.276_466_147_819_164_3),
        (2, 7.0, 124.011_310_547_445_28),
        (2, 12.0, 15_925.367_219_023_17),
        (2, 29.5, 446_281_866_571.682),
    ];

    const SCALED_REFERENCE: [(u32, f64, f64); 12] = [
        (0, 31.0, 0.071_946_496_696_983_83),
        (1, 31.0, 0.070_776_392_834_385_68),
        (2, 31.0, 0.067_380_277_804_442_82),
        (0, 50.0, 0.056_561_626_647_454_19),
        (1, 50.0, 0.055_993_123_892_895_4),
        (2, 50.0, 0.054_321_901_691_738_38),
        (0, 100.0, 0.039_944_379_299_096_68),
        (1, 100.0, 0.039_744_153_025_130_25),
        (2, 100.0, 0.039_149_496_238_594_08),
        (0, 300.0, 0.023_042_558_415_085_46),
        (1, 300.0, 0.023_004_122_040_268_95),
        (2, 300.0, 0.022_889_197_601_483_67),
    ];

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_i(BesselOrder::ZERO, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(BesselOrder::ONE, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(BesselOrder::TWO, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i_scaled(BesselOrder::ZERO, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn i0_at_one() {
        let v = bessel_i(BesselOrder::ZERO, 1.0).unwrap();
        assert!(rel(v, 1.266_065_877_752_008_3) < 1e-12);
    }

    #[test]
    fn series_against_reference() {
        for (ell, z, want) in REFERENCE {
            let got = bessel_i(BesselOrder::new(ell).unwrap(), z).unwrap();
            assert!(rel(got, want) < 1e-13, "I_{ell}({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn asymptotic_against_reference() {
        for (ell, z, want) in SCALED_REFERENCE {
            let got = bessel_i_scaled(BesselOrder::new(ell).unwrap(), z).unwrap();
            assert!(rel(got, want) < 1e-10, "scaled I_{ell}({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn continuous_across_switch() {
        for order in ORDERS {
            let below = series(order.ell(), SERIES_LIMIT) * (-SERIES_LIMIT).exp();
            let above = asymptotic_scaled(order.ell(), SERIES_LIMIT);
            assert!(rel(above, below) < 1e-9, "order {}: {below} vs {above}", order.ell());
        }
    }

    #[test]
    fn rejects_negative_arguments() {
        assert!(bessel_i(BesselOrder::ZERO, -1.0).is_err());
        assert!(bessel_i_scaled(BesselOrder::ONE, -1e-300).is_err());
        assert!(i1_over_z(-0.5).is_err());
        assert!(BesselOrder::new(3).is_err());
    }

    #[test]
    fn ratios_at_light_cone() {
        assert_eq!(i1_over_z(0.0).unwrap(), 0.25);
        assert_eq!(i2_over_z2(0.0).unwrap(), 1.0 / 32.0);
        let r1 = i1_over_z(1.0).unwrap();
        assert!((r1 - 0.257_894_305_390_896_3).abs() < 1e-12);
    }

    #[test]
    fn ratios_continuous_at_switch() {
        let below = RATIO_SWITCH * (1.0 - 1e-12);
        let r1_lo = i1_over_z(below).unwrap();
        let r1_hi = i1_over_z(RATIO_SWITCH).unwrap();
        let r2_lo = i2_over_z2(below).unwrap();
        let r2_hi = i2_over_z2(RATIO_SWITCH).unwrap();
        assert!(rel(r1_lo, r1_hi) < 1e-10);
        assert!(rel(r2_lo, r2_hi) < 1e-10);
    }

    #[test]
    fn damped_forms_match_unscaled() {
        for &(omega, t) in &[(0.0f64, 0.5f64), (0.7, 1.0), (3.0, 5.0), (40.0, 41.0)] {
            for ell in 0..3 {
                let direct = (-0.5 * t).exp() * series(ell, 0.5 * omega);
                assert!(rel(damped_i(ell, omega, t), direct) < 1e-12 || direct == 0.0);
            }
            let direct_r1 = (-0.5 * t).exp() * i1_over_z(omega).unwrap();
            let direct_r2 = (-0.5 * t).exp() * i2_over_z2(omega).unwrap();
            assert!(rel(damped_r1(omega, t), direct_r1) < 1e-12);
            assert!(rel(damped_r2(omega, t), direct_r2) < 1e-12);
        }
    }

    #[test]
    fn damped_forms_survive_large_times() {
        let v = damped_i(0, 1500.0, 1500.0);
        assert!(v.is_finite() && v > 0.0);
        assert!(damped_r2(1200.0, 1500.0).is_finite());
    }
}
