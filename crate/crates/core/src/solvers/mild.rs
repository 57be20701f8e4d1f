use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::{power, ProblemSpec, Recorder};
use crate::conv::SpectralConvolver;
use crate::error::{invalid, Result};
use crate::kernels::{lattice_taps, KernelId};
use crate::numerics::GridFunction;
use crate::semigroup::{free_solution, FreeSolutionInputs};
use crate::trajectory::{SolverState, Trajectory};

/// Marches
///
/// ```text
/// u(tₙ) = u_free(tₙ) + Σₘ wₘ S(tₙ − τₘ)|u(τₘ)|^p
/// ```
///
/// with product-trapezoid weights `wₘ` on `τₘ = m·dt`, and `∂ₜu` from the
/// same sum with `∂ₜS`. The newest node carries `S(0) = 0`, so each step is
/// explicit.
///
/// `dt` must be a whole number of grid cells: every lag `tₙ − τₘ` then puts
/// the cone endpoints on lattice nodes, and one spectrum per lag serves the
/// whole run. The time convolution is accumulated in Fourier space, one
/// inverse transform per step.
pub fn solve_mild(spec: &ProblemSpec) -> Result<Trajectory> {
    spec.validate()?;
    let grid = *spec.u0.grid();
    let h = grid.spacing();
    let ratio = spec.dt / h;
    if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
        return Err(invalid(
            "dt",
            format!("mild marching needs dt to be a whole number of cells, got dt/h = {ratio}"),
        ));
    }
    let r = ratio.round() as usize;
    let dt = r as f64 * h;
    let n_steps = spec.n_steps();
    let mut rec = Recorder::new(spec);
    rec.offer(
        0,
        SolverState {
            u: spec.u0.clone(),
            ut: spec.u1.clone(),
            time: 0.0,
        },
        n_steps == 0,
    )?;
    if n_steps == 0 {
        return Ok(rec.finish());
    }

    let nx = grid.n_points();
    let center = n_steps * r;
    let conv = SpectralConvolver::new(nx, 2 * center + 1);
    let lag_spectra = |lag: usize| {
        let k = lag * r;
        let s0 = lattice_taps(KernelId::K0, k, h);
        let mut s2 = lattice_taps(KernelId::K2, k, h);
        let edge = 0.5 * (-0.5 * k as f64 * h).exp();
        s2[0] += edge;
        s2[2 * k] += edge;
        let place = |taps: &[f64]| {
            let mut full = vec![0.0; 2 * center + 1];
            full[center - k..=center + k].copy_from_slice(taps);
            conv.half_spectrum(&full)
        };
        (place(&s0), place(&s2))
    };
    // index lag - 1
    let (k0_spec, k2_spec): (Vec<_>, Vec<_>) = if spec.nonlinear {
        (1..=n_steps).into_par_iter().map(lag_spectra).unzip()
    } else {
        (Vec::new(), Vec::new())
    };

    let mut sources: Vec<Vec<Complex64>> = Vec::with_capacity(n_steps);
    if spec.nonlinear {
        let g0: Vec<f64> = spec.u0.values().iter().map(|&v| power(v, spec.p)).collect();
        sources.push(conv.half_spectrum(&g0));
    }
    let bins = conv.half_len();

    for n in 1..=n_steps {
        let t = n as f64 * dt;
        let free = free_solution(&FreeSolutionInputs {
            u0: spec.u0.clone(),
            u1: spec.u1.clone(),
            t,
        })?;
        if free.warning.is_some() {
            rec.flag_truncation();
        }
        let mut u = free.value.u.into_values();
        let mut ut = free.value.ut.into_values();
        if spec.nonlinear {
            let mut acc_u = vec![Complex64::new(0.0, 0.0); bins];
            let mut acc_t = vec![Complex64::new(0.0, 0.0); bins];
            acc_u
                .par_chunks_mut(256)
                .zip(acc_t.par_chunks_mut(256))
                .enumerate()
                .for_each(|(c, (au, at))| {
                    let lo = c * 256;
                    for (m, g) in sources.iter().enumerate() {
                        let w = if m == 0 { 0.5 * dt } else { dt };
                        let k0 = &k0_spec[n - m - 1][lo..lo + au.len()];
                        let k2 = &k2_spec[n - m - 1][lo..lo + au.len()];
                        let g = &g[lo..lo + au.len()];
                        for b in 0..au.len() {
                            let wg = g[b] * w;
                            au[b] += wg * k0[b];
                            at[b] += wg * k2[b];
                        }
                    }
                });
            let du = conv.finish_half(&acc_u, center);
            let dut = conv.finish_half(&acc_t, center);
            for i in 0..nx {
                u[i] += du[i];
            }
            let g: Vec<f64> = u.iter().map(|&v| power(v, spec.p)).collect();
            for i in 0..nx {
                // ∂ₜS(0) is the identity
                ut[i] += dut[i] + 0.5 * dt * g[i];
            }
            if n < n_steps {
                sources.push(conv.half_spectrum(&g));
            }
        }
        let state = SolverState {
            u: GridFunction::new(grid, u)?,
            ut: GridFunction::new(grid, ut)?,
            time: t,
        };
        if rec.offer(n, state, n == n_steps)? {
            break;
        }
    }
    Ok(rec.finish())
}
