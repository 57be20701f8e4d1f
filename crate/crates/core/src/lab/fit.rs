use super::{ClassTag, LifespanRecord, FUJITA};
use crate::error::{invalid, Error, Result};

/// Least-squares line through `(ln ε, ln T₀)`, or `(ln ε, ln ln T₀)` at the
/// critical power.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(eps_min, eps_max)` of the records used.
    pub window: (f64, f64),
    pub p: f64,
    pub class: ClassTag,
    pub used: usize,
    /// Censored records left out.
    pub censored: usize,
    /// The largest `ε`, dropped as pre-asymptotic when five or more points remain.
    pub discarded: Option<f64>,
    pub log_log: bool,
}

pub fn fit_power_law(records: &[LifespanRecord]) -> Result<FitReport> {
    let first = records
        .first()
        .ok_or_else(|| Error::InsufficientData("no records".into()))?;
    if records.iter().any(|r| r.p != first.p || r.class != first.class) {
        return Err(invalid("records", "a fit needs a single exponent p and data class"));
    }
    let mut used: Vec<&LifespanRecord> = records.iter().filter(|r| !r.censored).collect();
    let censored = records.len() - used.len();
    used.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let discarded = (used.len() >= 5).then(|| used.remove(0).eps);
    if used.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} uncensored records, at least 3 needed",
            used.len()
        )));
    }
    let (lo, hi) = (used[used.len() - 1].eps, used[0].eps);
    if hi < 4.0 * lo {
        return Err(Error::InsufficientData(format!(
            "eps spans [{lo}, {hi}], a factor of at least 4 is needed"
        )));
    }
    let log_log = first.p == FUJITA;
    let mut pts = Vec::with_capacity(used.len());
    for r in &used {
        let y = if log_log {
            if r.t0 <= 1.0 {
                return Err(invalid("t0", format!("log log needs T0 > 1, got {}", r.t0)));
            }
            r.t0.ln().ln()
        } else {
            r.t0.ln()
        };
        pts.push((r.eps.ln(), y));
    }
    let (slope, intercept, r_squared) = least_squares(&pts);
    Ok(FitReport {
        slope,
        intercept,
        r_squared,
        window: (lo, hi),
        p: first.p,
        class: first.class,
        used: used.len(),
        censored,
        discarded,
        log_log,
    })
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, r2.clamp(0.0, 1.0))
}

/// `|slope_B| − |slope_A|`.
pub fn extension_exponent(fit_a: &FitReport, fit_b: &FitReport) -> Result<f64> {
    if fit_a.p != fit_b.p {
        return Err(invalid(
            "fits",
            format!("fits for different exponents p = {} and p = {}", fit_a.p, fit_b.p),
        ));
    }
    Ok(fit_b.slope.abs() - fit_a.slope.abs())
}
