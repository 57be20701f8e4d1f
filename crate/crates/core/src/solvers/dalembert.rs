use super::{power, ProblemSpec, Recorder};
use crate::error::{invalid, Result};
use crate::numerics::GridFunction;
use crate::trajectory::{SolverState, Trajectory};

/// Marches `v = e^{t/2}u`, which satisfies `v_tt − v_xx = e^{t/2}(u/4 + |u|^p)`,
/// on the characteristic lattice `dt = h`. Over one characteristic diamond the
/// wave operator integrates exactly to
///
/// ```text
/// v(t+h, x) + v(t−h, x) − v(t, x+h) − v(t, x−h) = ½ ∬ source,
/// ```
///
/// so summing the diamonds reproduces the backward light-cone integral of the
/// d'Alembert form. The source is taken at the diamond centre (area `2h²`).
/// The first step uses the d'Alembert form directly: travelling halves of
/// `u₀`, Simpson's rule for `∫(u₁ + u₀/2)` over `[x−h, x+h]`, and the source
/// triangle frozen at `t = 0`.
///
/// `∂ₜu` is the centred difference of neighbouring levels.
pub fn solve_dalembert(spec: &ProblemSpec) -> Result<Trajectory> {
    spec.validate()?;
    let grid = *spec.u0.grid();
    let h = grid.spacing();
    if (spec.dt - h).abs() > 1e-9 * h {
        return Err(invalid(
            "dt",
            format!("characteristic marching needs dt equal to the grid spacing {h}, got {}", spec.dt),
        ));
    }
    let n_steps = spec.n_steps();
    let mut rec = Recorder::new(spec);
    let p = spec.p;
    let source = |u: f64| if spec.nonlinear { 0.25 * u + power(u, p) } else { 0.25 * u };
    let decay = (-0.5 * h).exp();
    let nx = grid.n_points();
    let at = |v: &[f64], i: isize| if (0..nx as isize).contains(&i) { v[i as usize] } else { 0.0 };

    let u0 = spec.u0.values();
    let q: Vec<f64> = u0.iter().zip(spec.u1.values()).map(|(a, b)| b + 0.5 * a).collect();
    let mut prev = u0.to_vec();
    let mut cur: Vec<f64> = (0..nx as isize)
        .map(|i| {
            let travel = 0.5 * (at(u0, i - 1) + at(u0, i + 1));
            let simpson = h / 3.0 * (at(&q, i - 1) + 4.0 * q[i as usize] + at(&q, i + 1));
            decay * (travel + 0.5 * simpson + 0.5 * h * h * source(u0[i as usize]))
        })
        .collect();
    let mut next = vec![0.0; nx];

    rec.offer(
        0,
        SolverState {
            u: spec.u0.clone(),
            ut: spec.u1.clone(),
            time: 0.0,
        },
        n_steps == 0,
    )?;
    for n in 1..=n_steps {
        for i in 0..nx {
            let side = if i > 0 { cur[i - 1] } else { 0.0 } + if i + 1 < nx { cur[i + 1] } else { 0.0 };
            next[i] = decay * (side + h * h * source(cur[i]) - decay * prev[i]);
        }
        let ut: Vec<f64> = next.iter().zip(&prev).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let state = SolverState {
            u: GridFunction::new(grid, cur.clone())?,
            ut: GridFunction::new(grid, ut)?,
            time: n as f64 * h,
        };
        if rec.offer(n, state, n == n_steps)? {
            break;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid;

    #[test]
    fn zero_data_stays_zero() {
        let z = GridFunction::zeros(Grid::covering(3.0, 0.05).unwrap());
        let spec = ProblemSpec::new(2.0, z.clone(), z, 1.0, 0.05).unwrap();
        let traj = solve_dalembert(&spec).unwrap();
        assert!(traj.states.iter().all(|s| s.u.max_abs() == 0.0));
    }

    #[test]
    fn needs_characteristic_step() {
        let z = GridFunction::zeros(Grid::covering(3.0, 0.05).unwrap());
        let spec = ProblemSpec::new(2.0, z.clone(), z, 1.0, 0.025).unwrap();
        assert!(solve_dalembert(&spec).is_err());
    }

    #[test]
    fn non_positive_data_stay_non_positive() {
        let g = Grid::covering(8.0, 0.05).unwrap();
        let u0 = GridFunction::from_fn(g, |x| -0.3 * (-x * x).exp());
        let u1 = GridFunction::from_fn(g, |x| 0.1 * (-x * x).exp());
        let spec = ProblemSpec::new(2.0, u0, u1, 4.0, 0.05).unwrap();
        let traj = solve_dalembert(&spec).unwrap();
        assert!(traj.states.iter().all(|s| s.u.values().iter().all(|&v| v <= 0.0)));
    }
}
