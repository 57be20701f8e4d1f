use crate::error::{invalid, Error, Result};

/// Uniform grid on `[-L, L]` with `n_points` nodes, both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    half_width: f64,
    n_points: usize,
    spacing: f64,
}

impl Grid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid("L", format!("half-width must be positive, got {half_width}")));
        }
        if n_points < 3 {
            return Err(invalid("n_points", format!("need at least 3 points, got {n_points}")));
        }
        Ok(Self {
            half_width,
            n_points,
            spacing: 2.0 * half_width / (n_points - 1) as f64,
        })
    }

    /// Grid on `[-L, L]` whose spacing is as close as possible to (and not
    /// larger than) `h`. When `2L/h` is an integer the spacing is exactly `h`.
    pub fn with_spacing(half_width: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(invalid("h", format!("spacing must be positive, got {h}")));
        }
        let intervals = (2.0 * half_width / h - 1e-9).ceil().max(2.0) as usize;
        Self::new(half_width, intervals + 1)
    }

    /// Grid with spacing exactly `h` and half-width at least `min_half_width`;
    /// the half-width is rounded up to a whole number of cells.
    pub fn covering(min_half_width: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(invalid("h", format!("spacing must be positive, got {h}")));
        }
        let cells = (min_half_width / h - 1e-9).ceil().max(1.0) as usize;
        let grid = Self::new(cells as f64 * h, 2 * cells + 1)?;
        Ok(Self { spacing: h, ..grid })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Coordinate of node `i`; the last node is exactly `L`.
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.half_width
        } else {
            -self.half_width + i as f64 * self.spacing
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.x(i))
    }

    /// Index of the node at `x` when `x` sits on the grid (within a relative
    /// tolerance of the spacing).
    pub fn node_at(&self, x: f64) -> Option<usize> {
        let s = (x + self.half_width) / self.spacing;
        let r = s.round();
        if (s - r).abs() < 1e-9 && r >= 0.0 && (r as usize) < self.n_points {
            Some(r as usize)
        } else {
            None
        }
    }

    /// True when `shift` is an integer number of cells.
    pub fn is_commensurate(&self, shift: f64) -> bool {
        let s = shift / self.spacing;
        (s - s.round()).abs() < 1e-9
    }

    pub(crate) fn same_as(&self, other: &Grid) -> bool {
        self.n_points == other.n_points
            && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }
}

/// Real samples on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(invalid(
                "values",
                format!("expected {} samples, got {}", grid.n_points(), values.len()),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            values: vec![0.0; grid.n_points()],
            grid,
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: grid.points().map(f).collect(),
            grid,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_finite(&self, name: &'static str) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { name, index }),
            None => Ok(()),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Linear interpolation at `x`; zero outside `[-L, L]`.
    pub fn sample(&self, x: f64) -> f64 {
        let l = self.grid.half_width();
        if !(x >= -l && x <= l) {
            return 0.0;
        }
        let s = (x + l) / self.grid.spacing();
        let i = (s.floor() as usize).min(self.values.len() - 2);
        let w = s - i as f64;
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }

    /// Four-point cubic interpolation at `x`, with zero values beyond the ends.
    fn sample_cubic(&self, x: f64) -> f64 {
        let l = self.grid.half_width();
        let h = self.grid.spacing();
        if !(x > -l - h && x < l + h) {
            return 0.0;
        }
        let s = (x + l) / h;
        let i = s.floor() as isize;
        let w = s - i as f64;
        let c = [
            -w * (w - 1.0) * (w - 2.0) / 6.0,
            (w + 1.0) * (w - 1.0) * (w - 2.0) / 2.0,
            -(w + 1.0) * w * (w - 2.0) / 2.0,
            (w + 1.0) * w * (w - 1.0) / 6.0,
        ];
        let n = self.values.len() as isize;
        (0..4)
            .map(|k| {
                let j = i - 1 + k as isize;
                if (0..n).contains(&j) {
                    c[k] * self.values[j as usize]
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// The samples of `x -> f(x + shift)`, using an exact index shift when
    /// `shift` is a whole number of cells and cubic interpolation otherwise.
    pub fn translated(&self, shift: f64) -> Self {
        let h = self.grid.spacing();
        let n = self.values.len() as i64;
        let values = if self.grid.is_commensurate(shift) {
            let k = (shift / h).round() as i64;
            (0..n)
                .map(|i| {
                    let j = i + k;
                    if (0..n).contains(&j) {
                        self.values[j as usize]
                    } else {
                        0.0
                    }
                })
                .collect()
        } else {
            self.grid.points().map(|x| self.sample_cubic(x + shift)).collect()
        };
        Self {
            grid: self.grid,
            values,
        }
    }

    /// Linear interpolation onto another grid (zero outside this grid's span).
    pub fn resample(&self, target: &Grid) -> Self {
        if self.grid.same_as(target) {
            return self.clone();
        }
        Self::from_fn(*target, |x| self.sample(x))
    }

    /// Largest `|x|` where `|f|` exceeds `rel_tol * max|f|`; zero for the
    /// zero function.
    pub fn support_radius(&self, rel_tol: f64) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > rel_tol * m)
            .map(|(i, _)| self.grid.x(i).abs())
            .fold(0.0, f64::max)
    }
}
