//! The five light-cone kernels of the damped wave propagator and their
//! convolution with grid functions.
//!
//! With `ω = √(t² − y²)`, `D = e^{-t/2} I₀(ω/2)`, `R₁ = e^{-t/2} I₁(ω/2)/ω`
//! and `R₂ = e^{-t/2} I₂(ω/2)/ω²`, the kernels inside the cone `|y| ≤ t` are
//!
//! ```text
//! K₀ = D/2
//! K₁ = −y R₁/4
//! K₂ = (t R₁ − D)/4
//! K₃ = y (R₁ − t R₂)/8
//! K₄ = t² R₂/8 − (t − 1) R₁/4 + D/8
//! ```
//!
//! `K₃` and `K₄` are written with the recurrence `I₀ − I₂ = (2/z) I₁` already
//! applied, which removes the `1/ω²` and `1/ω³` poles of the textbook form
//! without changing its value. Outside the cone every kernel is zero.

use rayon::prelude::*;

use crate::conv::convolve_centered;
use crate::error::{invalid, Result};
use crate::numerics::{bracket, GridFunction};
use crate::specfun::{damped_i, damped_r1, damped_r2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KernelId(u8);

impl KernelId {
    pub const K0: Self = Self(0);
    pub const K1: Self = Self(1);
    pub const K2: Self = Self(2);
    pub const K3: Self = Self(3);
    pub const K4: Self = Self(4);
    pub const ALL: [Self; 5] = [Self::K0, Self::K1, Self::K2, Self::K3, Self::K4];

    pub fn new(j: u32) -> Result<Self> {
        if j <= 4 {
            Ok(Self(j as u8))
        } else {
            Err(invalid("j", format!("kernel index must be in 0..=4, got {j}")))
        }
    }

    pub fn index(self) -> u32 {
        self.0 as u32
    }

    /// True for the kernels that are odd in `y` (K₁, K₃).
    pub fn is_odd(self) -> bool {
        self.0 == 1 || self.0 == 3
    }
}

/// The result of an operator whose output may be clipped by the edge of
/// the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Checked<T> {
    pub value: T,
    pub warning: Option<TruncationWarning>,
}

impl<T> Checked<T> {
    pub fn into_value(self) -> T {
        self.value
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Checked<U> {
        Checked {
            value: f(self.value),
            warning: self.warning,
        }
    }

    pub(crate) fn merge(a: Option<TruncationWarning>, b: Option<TruncationWarning>) -> Option<TruncationWarning> {
        match (a, b) {
            (Some(x), Some(y)) => Some(if x.needed_half_width >= y.needed_half_width { x } else { y }),
            (x, None) => x,
            (None, y) => y,
        }
    }
}

/// The exact support of the output extends past the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWarning {
    pub needed_half_width: f64,
    pub half_width: f64,
}

/// Warning raised when data supported in `|x| ≤ r` propagated for time `t`
/// no longer fits in the grid.
pub(crate) fn cone_check(f: &GridFunction, t: f64) -> Option<TruncationWarning> {
    let r = f.support_radius(1e-12);
    if f.max_abs() == 0.0 {
        return None;
    }
    let needed = r + t;
    let l = f.grid().half_width();
    (needed > l * (1.0 + 1e-12)).then_some(TruncationWarning {
        needed_half_width: needed,
        half_width: l,
    })
}

/// Half-width rule for experiments up to time `t_end` with data supported in
/// `|x| ≤ support`: the light cone plus six diffusive widths.
pub fn domain_half_width(t_end: f64, support: f64) -> f64 {
    t_end + support + 6.0 * (2.0 * t_end).sqrt()
}

#[inline]
fn kernel_inside(j: u8, t: f64, y: f64) -> f64 {
    let ay = y.abs().min(t);
    let omega = ((t - ay) * (t + ay)).sqrt();
    match j {
        0 => 0.5 * damped_i(0, omega, t),
        1 => -0.25 * y * damped_r1(omega, t),
        2 => 0.25 * (t * damped_r1(omega, t) - damped_i(0, omega, t)),
        3 => 0.125 * y * (damped_r1(omega, t) - t * damped_r2(omega, t)),
        _ => {
            0.125 * t * t * damped_r2(omega, t) - 0.25 * (t - 1.0) * damped_r1(omega, t)
                + 0.125 * damped_i(0, omega, t)
        }
    }
}

/// `K̃_j(t, y)`: the kernel inside the closed light cone, zero outside.
pub fn kernel(j: KernelId, t: f64, y: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("time must be positive, got {t}")));
    }
    if !y.is_finite() {
        return Err(invalid("y", "must be finite"));
    }
    Ok(if y.abs() > t { 0.0 } else { kernel_inside(j.0, t, y) })
}

/// Constant of the Gaussian envelope
/// `|K_j(t,y)| ≤ C e^{-y²/8t} / ⟨t⟩^{(j+1)/2}` fitted on a sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeFit {
    pub j: KernelId,
    pub fitted_c: f64,
    /// Relative excess over `fitted_c` found when the `y` sampling is refined
    /// fourfold; positive values mean the coarse sampling missed a peak.
    pub max_violation: f64,
    /// `(t, max_y ratio)` for each sampled time.
    pub per_time: Vec<(f64, f64)>,
}

fn envelope_ratio(j: KernelId, t: f64, y: f64) -> f64 {
    let k = kernel_inside(j.0, t, y).abs();
    if k == 0.0 {
        return 0.0;
    }
    let log = k.ln() + 0.5 * (j.0 as f64 + 1.0) * bracket(t).ln() + y * y / (8.0 * t);
    log.exp()
}

fn envelope_max(j: KernelId, t: f64, n: usize) -> f64 {
    // |K_j| is even in y, so [0, t] suffices
    (0..=n)
        .map(|i| envelope_ratio(j, t, t * i as f64 / n as f64))
        .fold(0.0, f64::max)
}

pub fn verify_envelope(j: KernelId, t_samples: &[f64], y_resolution: usize) -> Result<EnvelopeFit> {
    if y_resolution == 0 {
        return Err(invalid("y_resolution", "must be positive"));
    }
    if let Some(&t) = t_samples.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(invalid("t_samples", format!("times must be positive, got {t}")));
    }
    let per_time: Vec<(f64, f64)> = t_samples
        .iter()
        .map(|&t| (t, envelope_max(j, t, y_resolution)))
        .collect();
    let fitted_c = per_time.iter().map(|p| p.1).fold(0.0, f64::max);
    let refined = t_samples
        .iter()
        .map(|&t| envelope_max(j, t, 4 * y_resolution))
        .fold(0.0, f64::max);
    let max_violation = if fitted_c > 0.0 { refined / fitted_c - 1.0 } else { 0.0 };
    Ok(EnvelopeFit {
        j,
        fitted_c,
        max_violation,
        per_time,
    })
}

/// Trapezoid nodes and weights for `∫_{-t}^{t} · dy` on the grid lattice
/// `y = k h`, `|k h| < t`, with the two light-cone endpoints added.
struct ConeRule {
    /// Lattice offset of the first interior node (`-kmax`).
    kmax: usize,
    interior: Vec<f64>,
    end_weight: f64,
}

impl ConeRule {
    /// Fourth-order rule on `[-t, t]` using the lattice nodes strictly inside
    /// the cone plus the two endpoints. Composite Simpson in the middle, a
    /// five-point interpolatory rule on each end zone (whose last cell is
    /// generally partial). A lattice node closer than `h/2` to an endpoint is
    /// skipped so the end rules stay well conditioned.
    fn new(h: f64, t: f64) -> Self {
        let mut kmax = (t / h).floor() as usize;
        if (kmax as f64) * h >= t * (1.0 - 1e-12) {
            kmax = kmax.saturating_sub(1);
        }
        let gap = t - kmax as f64 * h;
        let kr = if gap < 0.5 * h && kmax > 0 { kmax - 1 } else { kmax };
        let mut interior = vec![0.0; 2 * kmax + 1];
        let end_weight;
        if kr < 4 {
            let mut nodes = vec![-t];
            nodes.extend((0..=2 * kr).map(|i| (i as f64 - kr as f64) * h));
            nodes.push(t);
            let w = interpolatory_weights(&nodes, -t, t);
            for i in 0..=2 * kr {
                interior[kmax - kr + i] = w[i + 1];
            }
            end_weight = 0.5 * (w[0] + w[2 * kr + 2]);
        } else {
            let m = kr - 3;
            // Simpson over [-mh, mh]; 2m intervals
            for i in 0..=2 * m {
                let c = if i == 0 || i == 2 * m {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                interior[kmax - m + i] += c * h / 3.0;
            }
            let nodes: Vec<f64> = (m..=kr).map(|k| k as f64 * h).chain([t]).collect();
            let w = interpolatory_weights(&nodes, m as f64 * h, t);
            for (i, wi) in w[..4].iter().enumerate() {
                interior[kmax + m + i] += wi;
                interior[kmax - m - i] += wi;
            }
            end_weight = w[4];
        }
        Self {
            kmax,
            interior,
            end_weight,
        }
    }
}

/// Weights `w` with `Σ wᵢ p(zᵢ) = ∫ₐᵇ p` for every polynomial of degree
/// below `nodes.len()`.
fn interpolatory_weights(nodes: &[f64], a: f64, b: f64) -> Vec<f64> {
    let n = nodes.len();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // moments of s^k on [-1, 1] in the scaled variable s = (y - mid)/half
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut row: Vec<f64> = nodes.iter().map(|&z| ((z - mid) / half).powi(k as i32)).collect();
            row.push(if k % 2 == 0 { 2.0 * half / (k as f64 + 1.0) } else { 0.0 });
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..=n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut w = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * w[c]).sum();
        w[r] = (m[r][n] - s) / m[r][r];
    }
    w
}

/// Convolution taps of `K̃_j(t)` for `t = k·h`: `2k + 1` weights, centred at
/// index `k`, where the cone endpoints fall on lattice nodes.
pub(crate) fn lattice_taps(j: KernelId, k: usize, h: f64) -> Vec<f64> {
    let t = k as f64 * h;
    let mut taps = vec![0.0; 2 * k + 1];
    if k == 0 {
        return taps;
    }
    let rule = ConeRule::new(h, t);
    debug_assert_eq!(rule.kmax + 1, k);
    for (i, w) in rule.interior.iter().enumerate() {
        let y = (i as f64 - rule.kmax as f64) * h;
        taps[i + 1] = w * kernel_inside(j.0, t, y);
    }
    taps[2 * k] = rule.end_weight * kernel_inside(j.0, t, t);
    taps[0] = rule.end_weight * kernel_inside(j.0, t, -t);
    taps
}

/// `K̃_j(t) ∗ f` by a fourth-order quadrature in `y ∈ [-t, t]` on the grid
/// lattice, with nodes at the two cone endpoints carrying the interior limit
/// of the kernel. `t = 0` gives the zero function.
pub fn kernel_convolve(j: KernelId, t: f64, f: &GridFunction) -> Result<Checked<GridFunction>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("time must be non-negative, got {t}")));
    }
    f.check_finite("f")?;
    let grid = *f.grid();
    if t == 0.0 {
        return Ok(Checked {
            value: GridFunction::zeros(grid),
            warning: None,
        });
    }
    let h = grid.spacing();
    let rule = ConeRule::new(grid.spacing(), t);
    let taps: Vec<f64> = rule
        .interior
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let y = (k as f64 - rule.kmax as f64) * h;
            w * kernel_inside(j.0, t, y)
        })
        .collect();
    let mut out = convolve_centered(f.values(), &taps, rule.kmax);
    let k_plus = rule.end_weight * kernel_inside(j.0, t, t);
    let k_minus = rule.end_weight * kernel_inside(j.0, t, -t);
    if k_plus != 0.0 || k_minus != 0.0 {
        let behind = f.translated(-t);
        let ahead = f.translated(t);
        out.par_iter_mut()
            .zip(behind.values().par_iter().zip(ahead.values()))
            .for_each(|(o, (b, a))| *o += k_plus * b + k_minus * a);
    }
    Ok(Checked {
        value: GridFunction::new(grid, out)?,
        warning: cone_check(f, t),
    })
}
