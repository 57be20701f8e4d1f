use super::{power, ProblemSpec, Recorder};
use crate::error::{invalid, Result};
use crate::numerics::{Grid, GridFunction};
use crate::trajectory::{SolverState, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Zero beyond the grid.
    Dirichlet,
    /// Period `2L`; the node at `x = L` mirrors the one at `x = -L`.
    Periodic,
}

/// Step and grid control for long sweeps.
///
/// Once the wave part has damped out (`t > wave_time`) the solution spreads
/// like a heat profile of width `~√t`, so the grid coarsens by halving the
/// node count whenever `kappa·√t ≥ 2·dx` while `max|u| < coarsen_below`. The
/// step follows `dt ≤ min(courant·dx, nonlinear_cfl / max|u|^{(p-1)/2})` by
/// doubling and halving; `|u|^{-(p-1)/2}` is the time scale of `u'' = |u|^p`,
/// so a blowup costs a fixed number of steps per decade of growth. The domain widens by half whenever `|u|` near an
/// edge exceeds `edge_tol·max|u|`. Every change restarts the three-level
/// scheme from the current `(u, ∂ₜu)` with a Taylor step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adaptive {
    pub wave_time: f64,
    pub kappa: f64,
    pub courant: f64,
    pub nonlinear_cfl: f64,
    pub edge_tol: f64,
    pub coarsen_below: f64,
    /// Steps between policy checks.
    pub check_every: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            wave_time: 60.0,
            kappa: 0.05,
            courant: 0.5,
            nonlinear_cfl: 0.02,
            edge_tol: 1e-10,
            coarsen_below: 0.1,
            check_every: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdtdOptions {
    pub dx: f64,
    pub boundary: Boundary,
    pub adaptive: Option<Adaptive>,
}

impl FdtdOptions {
    pub fn new(dx: f64) -> Self {
        Self {
            dx,
            boundary: Boundary::Dirichlet,
            adaptive: None,
        }
    }

    pub fn periodic(mut self) -> Self {
        self.boundary = Boundary::Periodic;
        self
    }

    pub fn adaptive(mut self, a: Adaptive) -> Self {
        self.adaptive = Some(a);
        self
    }
}

/// Explicit centred scheme
///
/// ```text
/// (uⁿ⁺¹ − 2uⁿ + uⁿ⁻¹)/dt² + (uⁿ⁺¹ − uⁿ⁻¹)/(2dt) − δₓ²uⁿ = |uⁿ|^p
/// ```
///
/// started by `u¹ = u₀ + dt·u₁ + dt²/2·(u₀″ − u₁ + |u₀|^p)`. The data are
/// resampled onto a grid of spacing `dx` over the same half-width. `∂ₜu` is
/// the centred difference of neighbouring levels.
pub fn solve_fdtd(spec: &ProblemSpec, opts: &FdtdOptions) -> Result<Trajectory> {
    march(spec, opts, 0.0)
}

pub(crate) fn march(spec: &ProblemSpec, opts: &FdtdOptions, t_start: f64) -> Result<Trajectory> {
    spec.validate()?;
    if !(opts.dx > 0.0 && opts.dx.is_finite()) {
        return Err(invalid("dx", format!("spacing must be positive, got {}", opts.dx)));
    }
    if spec.dt > opts.dx * (1.0 + 1e-12) {
        return Err(invalid(
            "dt",
            format!("explicit scheme needs dt <= dx, got dt = {} and dx = {}", spec.dt, opts.dx),
        ));
    }
    if let Some(a) = opts.adaptive {
        if opts.boundary == Boundary::Periodic {
            return Err(invalid("boundary", "adaptive regridding needs the Dirichlet boundary"));
        }
        if !(a.courant > 0.0 && a.courant <= 1.0 && a.nonlinear_cfl > 0.0 && a.check_every > 0) {
            return Err(invalid("adaptive", "courant in (0, 1], nonlinear_cfl > 0 and check_every > 0 required"));
        }
    }
    let mut grid = Grid::covering(spec.u0.grid().half_width(), opts.dx)?;
    let mut u = spec.u0.resample(&grid).into_values();
    let mut ut = spec.u1.resample(&grid).into_values();
    let mut dt = spec.dt;
    let mut t = t_start;
    let t_stop = t_start + spec.t_end;
    let finished = |t: f64, dt: f64| t >= t_stop - 1e-9 * dt;

    let mut rec = Recorder::new(spec);
    let mut step = 0usize;
    rec.offer(
        step,
        SolverState {
            u: GridFunction::new(grid, u.clone())?,
            ut: GridFunction::new(grid, ut.clone())?,
            time: t,
        },
        finished(t, dt),
    )?;
    if finished(t, dt) {
        return Ok(rec.finish());
    }

    'segment: loop {
        let ops = Stencil::new(grid.n_points(), grid.spacing(), dt, spec, opts.boundary);
        let mut prev = u;
        let mut cur = ops.taylor(&prev, &ut);
        let mut next = vec![0.0; cur.len()];
        let mut in_segment = 0usize;
        loop {
            t += dt;
            step += 1;
            in_segment += 1;
            ops.advance(&prev, &cur, &mut next);
            let ut_of = |next: &[f64], prev: &[f64]| -> Vec<f64> {
                next.iter().zip(prev).map(|(a, b)| (a - b) / (2.0 * dt)).collect()
            };
            let last = finished(t, dt);
            let linf = cur.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let stop = rec.offer_with(step, linf, last, || {
                Ok(SolverState {
                    u: GridFunction::new(grid, cur.clone())?,
                    ut: GridFunction::new(grid, ut_of(&next, &prev))?,
                    time: t,
                })
            })?;
            if stop || last {
                break 'segment;
            }
            if let Some(a) = opts.adaptive {
                if in_segment % a.check_every == 0 {
                    if let Some((g, d)) = regrid(&a, grid, dt, t, &cur, spec.p) {
                        let ut_cur = ut_of(&next, &prev);
                        u = GridFunction::new(grid, cur)?.resample(&g).into_values();
                        ut = GridFunction::new(grid, ut_cur)?.resample(&g).into_values();
                        grid = g;
                        dt = d;
                        continue 'segment;
                    }
                }
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
    }
    Ok(rec.finish())
}

/// The new grid and step if the policy asks for a change.
fn regrid(a: &Adaptive, grid: Grid, dt: f64, t: f64, u: &[f64], p: f64) -> Option<(Grid, f64)> {
    let dx = grid.spacing();
    let n = u.len();
    let linf = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zone = (n / 20).max(40).min(n / 2);
    let edge = u[..zone].iter().chain(&u[n - zone..]).fold(0.0f64, |m, v| m.max(v.abs()));
    let mut new_grid = grid;
    if linf > 0.0 && edge > a.edge_tol * linf {
        new_grid = Grid::covering(1.5 * grid.half_width(), dx).ok()?;
    } else if t > a.wave_time && a.kappa * t.sqrt() >= 2.0 * dx && linf < a.coarsen_below && n > 129 {
        new_grid = Grid::covering(grid.half_width(), 2.0 * dx).ok()?;
    }
    let nl_cap = if linf > 0.0 { a.nonlinear_cfl / linf.powf(0.5 * (p - 1.0)) } else { f64::INFINITY };
    let allowed = (a.courant * new_grid.spacing()).min(nl_cap);
    let mut new_dt = dt;
    while new_dt > allowed {
        new_dt *= 0.5;
    }
    if new_dt == dt && 2.0 * dt <= allowed {
        new_dt = 2.0 * dt;
    }
    (new_dt != dt || new_grid != grid).then_some((new_grid, new_dt))
}

struct Stencil {
    n: usize,
    dt: f64,
    inv_dx2: f64,
    p: f64,
    nonlinear: bool,
    boundary: Boundary,
}

impl Stencil {
    fn new(n: usize, dx: f64, dt: f64, spec: &ProblemSpec, boundary: Boundary) -> Self {
        Self {
            n,
            dt,
            inv_dx2: 1.0 / (dx * dx),
            p: spec.p,
            nonlinear: spec.nonlinear,
            boundary,
        }
    }

    #[inline]
    fn rhs(&self, u: &[f64], i: usize) -> f64 {
        let (l, r) = match self.boundary {
            Boundary::Dirichlet => (
                if i > 0 { u[i - 1] } else { 0.0 },
                if i + 1 < self.n { u[i + 1] } else { 0.0 },
            ),
            Boundary::Periodic => {
                let m = self.n - 1;
                (u[(i + m - 1) % m], u[(i + 1) % m])
            }
        };
        let lap = (l - 2.0 * u[i] + r) * self.inv_dx2;
        if self.nonlinear {
            lap + power(u[i], self.p)
        } else {
            lap
        }
    }

    fn close(&self, v: &mut [f64]) {
        if self.boundary == Boundary::Periodic {
            v[self.n - 1] = v[0];
        }
    }

    fn taylor(&self, u: &[f64], ut: &[f64]) -> Vec<f64> {
        let dt = self.dt;
        let mut out: Vec<f64> = (0..self.n)
            .map(|i| u[i] + dt * ut[i] + 0.5 * dt * dt * (self.rhs(u, i) - ut[i]))
            .collect();
        self.close(&mut out);
        out
    }

    fn advance(&self, prev: &[f64], cur: &[f64], next: &mut [f64]) {
        let dt = self.dt;
        let a = 1.0 / (1.0 + 0.5 * dt);
        let b = 1.0 - 0.5 * dt;
        let dt2 = dt * dt;
        for i in 0..self.n {
            next[i] = a * (2.0 * cur[i] - b * prev[i] + dt2 * self.rhs(cur, i));
        }
        self.close(next);
    }
}
