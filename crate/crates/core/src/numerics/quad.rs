use super::grid::{Grid, GridFunction};
use crate::error::Result;

/// Composite trapezoid rule over `[-L, L]`.
pub fn integrate(f: &GridFunction) -> Result<f64> {
    f.check_finite("f")?;
    Ok(trapezoid(f.values(), f.grid().spacing()))
}

pub(crate) fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// Difference quotient: five-point centred (fourth order) in the interior,
/// three-point centred next to the ends and one-sided three-point stencils
/// at the two ends.
pub fn derivative(f: &GridFunction) -> GridFunction {
    let v = f.values();
    let n = v.len();
    let h = f.grid().spacing();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = if i >= 2 && i + 2 < n {
            (8.0 * (v[i + 1] - v[i - 1]) - (v[i + 2] - v[i - 2])) / (12.0 * h)
        } else {
            (v[i + 1] - v[i - 1]) / (2.0 * h)
        };
    }
    GridFunction::new(*f.grid(), d).expect("same length")
}

/// Standard three-point second difference with zero values assumed beyond
/// the ends of the grid.
pub fn second_derivative(f: &GridFunction) -> GridFunction {
    let v = f.values();
    let n = v.len();
    let h2 = f.grid().spacing().powi(2);
    let at = |i: isize| if i < 0 || i >= n as isize { 0.0 } else { v[i as usize] };
    let d = (0..n as isize)
        .map(|i| (at(i + 1) - 2.0 * at(i) + at(i - 1)) / h2)
        .collect();
    GridFunction::new(*f.grid(), d).expect("same length")
}

/// Prefix integrals of the piecewise-linear interpolant, so that any window
/// integral `\int_a^b f` costs O(1).
#[derive(Debug, Clone)]
pub struct Antiderivative {
    grid: Grid,
    values: Vec<f64>,
    prefix: Vec<f64>,
}

impl Antiderivative {
    pub fn new(f: &GridFunction) -> Self {
        let h = f.grid().spacing();
        let v = f.values();
        let mut prefix = Vec::with_capacity(v.len());
        let mut acc = 0.0;
        prefix.push(0.0);
        for w in v.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            prefix.push(acc);
        }
        Self {
            grid: *f.grid(),
            values: v.to_vec(),
            prefix,
        }
    }

    /// `\int_{-L}^{x} f`, clamped to the grid span.
    pub fn at(&self, x: f64) -> f64 {
        let l = self.grid.half_width();
        let h = self.grid.spacing();
        if x <= -l {
            return 0.0;
        }
        if x >= l {
            return *self.prefix.last().unwrap();
        }
        let s = (x + l) / h;
        let i = (s.floor() as usize).min(self.values.len() - 2);
        let w = s - i as f64;
        let f0 = self.values[i];
        let f1 = self.values[i + 1];
        let fx = f0 + w * (f1 - f0);
        self.prefix[i] + 0.5 * w * h * (f0 + fx)
    }

    /// `\int_a^b f` for `a <= b`.
    pub fn window(&self, a: f64, b: f64) -> f64 {
        self.at(b) - self.at(a)
    }

    pub fn total(&self) -> f64 {
        *self.prefix.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(l: f64, n: usize) -> Grid {
        Grid::new(l, n).unwrap()
    }

    #[test]
    fn constant_integrates_exactly() {
        let f = GridFunction::from_fn(grid(1.0, 7), |_| 1.0);
        assert!((integrate(&f).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn odd_function_integrates_to_zero() {
        let f = GridFunction::from_fn(grid(3.5, 101), |x| x);
        assert!(integrate(&f).unwrap().abs() < 1e-13);
    }

    #[test]
    fn gaussian_matches_reference() {
        // reference value sqrt(pi) from a 40-digit quadrature
        let g = Grid::with_spacing(8.0, 0.01).unwrap();
        let f = GridFunction::from_fn(g, |x| (-x * x).exp());
        let exact = 1.772_453_850_905_516_f64;
        assert!((integrate(&f).unwrap() - exact).abs() < 1e-6);
    }

    #[test]
    fn rejects_non_finite() {
        let mut f = GridFunction::zeros(grid(1.0, 5));
        f.values_mut()[2] = f64::NAN;
        assert!(integrate(&f).is_err());
    }

    #[test]
    fn derivative_exact_on_quadratics() {
        let f = GridFunction::from_fn(grid(2.0, 21), |x| 3.0 * x * x - x + 1.0);
        let d = derivative(&f);
        for (x, v) in f.grid().points().zip(d.values()) {
            assert!((v - (6.0 * x - 1.0)).abs() < 1e-11, "{x}: {v}");
        }
    }

    #[test]
    fn antiderivative_windows() {
        let f = GridFunction::from_fn(grid(2.0, 41), |x| 2.0 * x + 1.0);
        let a = Antiderivative::new(&f);
        // exact for affine integrands, also with off-grid endpoints
        let exact = |a: f64, b: f64| (b * b + b) - (a * a + a);
        assert!((a.window(-0.33, 1.27) - exact(-0.33, 1.27)).abs() < 1e-12);
        assert!((a.total() - exact(-2.0, 2.0)).abs() < 1e-12);
        assert_eq!(a.window(-5.0, -3.0), 0.0);
    }
}
