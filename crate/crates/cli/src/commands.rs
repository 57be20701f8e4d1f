use std::io::Write;
use std::path::PathBuf;

use dampwave::kernels::{domain_half_width, verify_envelope, KernelId};
use dampwave::lab::{
    approximation_error_curve, bump, default_profile, extension_exponent, fit_power_law, predicted_exponents, sweep,
    ApproxConfig, ClassTag, DataClass, FitReport, LifespanRecord, SweepConfig,
};
use dampwave::numerics::{integrate, Grid, GridFunction};
use dampwave::semigroup::{apply_ds, apply_s, strans_residual, Derivative};
use dampwave::solvers::{
    detect_blowup, sign_and_apriori_check, solve, solve_fdtd, Adaptive, FdtdOptions, ProblemSpec, SolverKind,
};
use dampwave::specfun::{bessel_i, BesselOrder};
use dampwave::trajectory::{SolverState, Status, Trajectory};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::config::{Command, RunConfig, Solver};
use crate::plot::{emit_plot_data, lifespan_tables, read_lifespan_table, real, PlotData};
use crate::store::ResultStore;
use crate::CliError;

/// Process exit status: 0 on success, 1 when inputs fail validation, 2 when
/// a numerical check fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success,
    Invalid,
    CheckFailed,
}

impl Exit {
    pub fn code(self) -> u8 {
        match self {
            Self::Success => 0,
            Self::Invalid => 1,
            Self::CheckFailed => 2,
        }
    }
}

/// Largest grid the fixed-domain solvers will allocate.
const MAX_POINTS: usize = 4_000_000;

type Out<'a> = &'a mut dyn Write;

fn say(out: Out<'_>, text: std::fmt::Arguments<'_>) -> Result<(), CliError> {
    out.write_fmt(text)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => { say($out, format_args!($($arg)*)) };
}

/// Executes a validated configuration, writing artifacts to `cfg.out` and a
/// summary to `out`.
pub fn run(cfg: &RunConfig, out: Out<'_>) -> Result<Exit, CliError> {
    let store = ResultStore::open(&cfg.out)?;
    match cfg.command {
        Command::Verify => verify(cfg, &store, out),
        Command::Solve => run_solve(cfg, &store, out),
        Command::Sweep => run_sweep(cfg, &store, out),
        Command::Fit => run_fit(cfg, &store, out),
        Command::GlobalCheck => global_check(cfg, &store, out),
    }
}

fn p_of(cfg: &RunConfig) -> Result<f64, CliError> {
    cfg.p.ok_or_else(|| CliError::Config {
        key: "p".into(),
        reason: format!("required by `{}`", cfg.command.name()),
    })
}

fn data_class(cfg: &RunConfig) -> Result<DataClass, CliError> {
    let profile = default_profile(Grid::covering(2.0, cfg.dx)?);
    Ok(match ClassTag::from(cfg.class) {
        ClassTag::A => DataClass::a(profile)?,
        ClassTag::B => DataClass::b(profile)?,
    })
}

fn sweep_config(cfg: &RunConfig) -> SweepConfig {
    SweepConfig {
        dx: cfg.dx,
        dt: cfg.dt.unwrap_or(0.5 * cfg.dx),
        threshold: cfg.threshold,
        t_end: cfg.t_end,
        safety: cfg.safety,
        refine: cfg.refine,
        ..SweepConfig::default()
    }
}

#[derive(Debug, Serialize)]
struct CheckRow {
    check: String,
    residual: f64,
    tolerance: f64,
    passed: bool,
}

fn verify(cfg: &RunConfig, store: &ResultStore, out: Out<'_>) -> Result<Exit, CliError> {
    let mut rows: Vec<CheckRow> = Vec::new();
    let mut push = |check: String, residual: f64, tolerance: f64| {
        let passed = residual <= tolerance;
        rows.push(CheckRow { check, residual, tolerance, passed });
    };

    // split forms of the derivatives of S(t) against central differences
    let (d, h) = (1e-3, 0.01);
    for t in [0.5, 1.0, 5.0] {
        let grid = Grid::covering(t + 4.0, h)?;
        let on = |s: f64| GridFunction::from_fn(grid, move |x| bump((x + s) / 3.0));
        let (f, fp, fm) = (on(0.0), on(d), on(-d));
        let s = |t, f: &GridFunction| apply_s(t, f).map(|c| c.value);
        let ds = |w, t, f: &GridFunction| apply_ds(w, t, f).map(|c| c.value);
        let diff = |a: GridFunction, b: GridFunction| a.sub(&b).map(|g| g.scaled(0.5 / d));
        let checks = [
            ("S_x", diff(s(t, &fp)?, s(t, &fm)?)?, ds(Derivative::X, t, &f)?),
            ("S_t", diff(s(t + d, &f)?, s(t - d, &f)?)?, ds(Derivative::T, t, &f)?),
            ("S_tx", diff(ds(Derivative::T, t, &fp)?, ds(Derivative::T, t, &fm)?)?, ds(Derivative::TX, t, &f)?),
            ("S_tt", diff(ds(Derivative::T, t + d, &f)?, ds(Derivative::T, t - d, &f)?)?, ds(Derivative::TT, t, &f)?),
        ];
        for (name, fd, split) in checks {
            let e = fd.sub(&split)?.max_abs() / split.max_abs();
            push(format!("{name} t={t}"), e, cfg.tol_kernel);
        }
    }

    let grid = Grid::covering(domain_half_width(20.0, 2.0), 0.02)?;
    let f = GridFunction::from_fn(grid, |x| bump(x / 2.0) * (1.0 + 0.3 * x));
    let mass = integrate(&f)?;
    for t in [0.1, 1.0, 5.0, 20.0] {
        let got = integrate(&apply_s(t, &f)?.value)?;
        let e = (got - (1.0 - (-t as f64).exp()) * mass).abs() / mass.abs();
        push(format!("mass t={t}"), e, cfg.tol_mass);
    }

    let gauss = GridFunction::from_fn(Grid::covering(8.0, 0.01)?, |x| (-x * x).exp());
    push("transport t=1".into(), strans_residual(1.0, &gauss, 0.01)? / gauss.max_abs(), cfg.tol_strans);

    // finite uniform bound that has levelled off by the last decade of t
    for j in 0..5 {
        let fit = verify_envelope(KernelId::new(j)?, &[0.1, 1.0, 10.0, 100.0, 1000.0], 200)?;
        let c = &fit.per_time;
        let drift = (c[c.len() - 1].1 / c[c.len() - 2].1 - 1.0).abs();
        let drift = if fit.fitted_c.is_finite() { drift } else { f64::INFINITY };
        push(format!("envelope K{j} C={:.4}", fit.fitted_c), drift, 0.1);
    }

    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let order = |l| BesselOrder::new(l);
    let mut worst: f64 = 0.0;
    for _ in 0..256 {
        let z: f64 = rng.gen_range(1e-6..=30.0);
        let lhs = bessel_i(order(0)?, z)? - bessel_i(order(2)?, z)?;
        let rhs = 2.0 / z * bessel_i(order(1)?, z)?;
        worst = worst.max((lhs - rhs).abs() / rhs.abs());
    }
    push(format!("bessel recurrence seed={}", cfg.seed), worst, 1e-10);

    let mut w = csv::Writer::from_writer(Vec::new());
    let fmt = |e: csv::Error| CliError::Format(e.to_string());
    w.write_record(["check", "residual", "tolerance", "passed"]).map_err(fmt)?;
    for r in &rows {
        w.write_record([r.check.clone(), real(r.residual), real(r.tolerance), r.passed.to_string()])
            .map_err(fmt)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Format(e.to_string()))?;
    let table = store.write_atomic("verify.csv", &bytes)?;
    let failed = rows.iter().filter(|r| !r.passed).count();
    store.write_metadata(cfg, &[table], &serde_json::json!({ "checks": rows.len(), "failed": failed }))?;

    for r in &rows {
        say!(
            out,
            "{:<28} {:>10.3e}  (tol {:.1e})  {}",
            r.check,
            r.residual,
            r.tolerance,
            if r.passed { "ok" } else { "FAIL" }
        )?;
    }
    say!(out, "{} checks, {failed} failed", rows.len())?;
    Ok(if failed == 0 { Exit::Success } else { Exit::CheckFailed })
}

fn norm_table(traj: &Trajectory) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fmt = |e: csv::Error| CliError::Format(e.to_string());
    w.write_record(["t", "linf", "l1", "lp"]).map_err(fmt)?;
    for (s, n) in traj.states.iter().zip(&traj.norm_history) {
        w.write_record([real(s.time), real(n.linf), real(n.l1), real(n.lp)]).map_err(fmt)?;
    }
    w.into_inner().map_err(|e| CliError::Format(e.to_string()))
}

fn status_name(s: Status) -> String {
    match s {
        Status::Completed => "completed".into(),
        Status::BlowupDetected { time } => format!("blowup at t = {time}"),
        Status::TruncationWarning => "domain truncation warning".into(),
    }
}

fn run_solve(cfg: &RunConfig, store: &ResultStore, out: Out<'_>) -> Result<Exit, CliError> {
    let p = p_of(cfg)?;
    let eps = cfg.eps[0];
    let data = data_class(cfg)?;
    let sweep_cfg = sweep_config(cfg);
    let t_end = sweep_cfg.horizon(p, &data, eps.abs())?;
    let kind = SolverKind::from(cfg.solver);
    let adaptive = kind == SolverKind::Fdtd;
    let reach = if adaptive { t_end.min(sweep_cfg.adaptive.wave_time) } else { t_end };
    let half_width = cfg.half_width.unwrap_or_else(|| domain_half_width(reach, 1.0));
    if half_width / cfg.dx > MAX_POINTS as f64 {
        return Err(CliError::Config {
            key: "half_width".into(),
            reason: format!("{half_width} at spacing {} exceeds {MAX_POINTS} points; set t_end or half_width", cfg.dx),
        });
    }
    let grid = Grid::covering(half_width, cfg.dx)?;
    let dt = cfg.dt.unwrap_or(match kind {
        SolverKind::Mild => 2.0 * cfg.dx,
        SolverKind::Dalembert => cfg.dx,
        SolverKind::Fdtd => 0.5 * cfg.dx,
    });
    let (u0, u1) = data.data(eps);
    let n_steps = (t_end / dt).ceil().max(1.0);
    let spec = ProblemSpec {
        blowup_threshold: cfg.threshold,
        ..ProblemSpec::new(p, u0.resample(&grid), u1.resample(&grid), t_end, dt)?
    }
    .storing_every((n_steps / 200.0).ceil() as usize);
    let traj = if adaptive {
        solve_fdtd(&spec, &FdtdOptions::new(cfg.dx).adaptive(Adaptive::default()))?
    } else {
        solve(kind, &spec)?
    };
    let est = detect_blowup(&traj, cfg.threshold);
    let last = traj.last().ok_or(CliError::Empty("trajectory"))?;

    let mut tables = emit_plot_data(store, PlotData::Snapshot { state: last, name: "final" })?;
    tables.push(store.write_atomic("norms.csv", &norm_table(&traj)?)?);
    let mut approx_end = None;
    if ClassTag::from(cfg.class) == ClassTag::B && eps > 0.0 {
        let profile = default_profile(Grid::covering(2.0, cfg.dx)?);
        let acfg = ApproxConfig { h: cfg.dx, solver: kind, ..ApproxConfig::default() };
        let curve = approximation_error_curve(p, eps, &profile, &acfg)?;
        tables.extend(emit_plot_data(
            store,
            PlotData::ErrorCurve { points: &curve.points, class: ClassTag::B, p },
        )?);
        approx_end = curve.end_norm;
    }
    let summary = serde_json::json!({
        "status": status_name(traj.status),
        "t_end": t_end,
        "final_time": last.time,
        "final_linf": last.u.max_abs(),
        "t0": est.t0,
        "censored": est.censored,
        "stored_states": traj.states.len(),
        "approximation_end_norm": approx_end,
    });
    store.write_metadata(cfg, &tables, &summary)?;
    say!(out, "solver {} p={p} eps={eps} class {}", kind.name(), ClassTag::from(cfg.class).name())?;
    say!(out, "status: {}", status_name(traj.status))?;
    say!(out, "final time {:.6} sup|u| {:.6e}", last.time, last.u.max_abs())?;
    if est.censored {
        say!(out, "no blowup before t = {}", est.t0)?;
    } else {
        say!(out, "lifespan estimate T0 = {}", est.t0)?;
    }
    Ok(Exit::Success)
}

fn describe_fit(out: Out<'_>, f: &FitReport) -> Result<(), CliError> {
    let what = if f.log_log { "log log T0" } else { "log T0" };
    say!(
        out,
        "class {} p={}: {what} slope {:.4}, intercept {:.4}, R^2 {:.4}, eps in [{}, {}], {} used, {} censored",
        f.class.name(),
        f.p,
        f.slope,
        f.intercept,
        f.r_squared,
        f.window.0,
        f.window.1,
        f.used,
        f.censored
    )
}

fn run_sweep(cfg: &RunConfig, store: &ResultStore, out: Out<'_>) -> Result<Exit, CliError> {
    let p = p_of(cfg)?;
    let data = data_class(cfg)?;
    let records = sweep(p, &data, &cfg.eps, &sweep_config(cfg))?;
    let tables = emit_plot_data(store, PlotData::LoglogLifespan(&records))?;
    let fit = fit_power_law(&records).ok();
    let rows: Vec<_> = records
        .iter()
        .map(|r| serde_json::json!({ "eps": r.eps, "t0": r.t0, "censored": r.censored, "refined": r.refined }))
        .collect();
    let summary = serde_json::json!({
        "records": rows,
        "dt": sweep_config(cfg).dt,
        "half_width": records.first().map(|r| r.half_width),
        "slope": fit.as_ref().map(|f| f.slope),
    });
    store.write_metadata(cfg, &tables, &summary)?;
    for r in &records {
        say!(
            out,
            "eps {:<8} T0 {:>14.6e}{}",
            r.eps,
            r.t0,
            if r.censored { "  (censored)" } else { "" }
        )?;
    }
    if let Some(f) = &fit {
        describe_fit(out, f)?;
        let e = predicted_exponents(p)?;
        let want = if f.class == ClassTag::A { e.class_a } else { e.class_b };
        say!(out, "predicted slope {:.4}", -want)?;
    }
    Ok(Exit::Success)
}

fn group_records(paths: &[PathBuf]) -> Result<Vec<Vec<LifespanRecord>>, CliError> {
    let mut groups: std::collections::BTreeMap<(ClassTag, u64), Vec<LifespanRecord>> = Default::default();
    for path in paths {
        for row in read_lifespan_table(path)? {
            let r = row.to_record();
            groups.entry((r.class, r.p.to_bits())).or_default().push(r);
        }
    }
    Ok(groups.into_values().collect())
}

/// Fits every `(class, p)` group of the stored lifespan tables.
pub fn fit_tables(paths: &[PathBuf]) -> Result<Vec<FitReport>, CliError> {
    group_records(paths)?
        .iter()
        .map(|g| fit_power_law(g).map_err(CliError::from))
        .collect()
}

fn run_fit(cfg: &RunConfig, store: &ResultStore, out: Out<'_>) -> Result<Exit, CliError> {
    let input = cfg.input.clone().unwrap_or_else(|| cfg.out.clone());
    let fits = fit_tables(&lifespan_tables(&input)?)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let fmt = |e: csv::Error| CliError::Format(e.to_string());
    w.write_record([
        "class", "p", "slope", "intercept", "r_squared", "eps_min", "eps_max", "used", "censored", "log_log",
    ])
    .map_err(fmt)?;
    for f in &fits {
        w.write_record([
            f.class.name().to_string(),
            real(f.p),
            real(f.slope),
            real(f.intercept),
            real(f.r_squared),
            real(f.window.0),
            real(f.window.1),
            f.used.to_string(),
            f.censored.to_string(),
            f.log_log.to_string(),
        ])
        .map_err(fmt)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Format(e.to_string()))?;
    let table = store.write_atomic("fit.csv", &bytes)?;

    let mut ratios = Vec::new();
    for a in fits.iter().filter(|f| f.class == ClassTag::A) {
        if let Some(b) = fits.iter().find(|f| f.class == ClassTag::B && f.p == a.p) {
            ratios.push((a.p, extension_exponent(a, b)?, predicted_exponents(a.p)?.r));
        }
    }
    let summary = serde_json::json!({
        "fits": fits.len(),
        "extension_exponents": ratios.iter().map(|(p, r, want)| serde_json::json!({"p": p, "r": r, "predicted": want})).collect::<Vec<_>>(),
    });
    store.write_metadata(cfg, &[table], &summary)?;
    for f in &fits {
        describe_fit(out, f)?;
    }
    for (p, r, want) in ratios {
        say!(out, "p={p}: extension exponent R = {r:.4} (predicted {want:.4})")?;
    }
    Ok(Exit::Success)
}

fn global_check(cfg: &RunConfig, store: &ResultStore, out: Out<'_>) -> Result<Exit, CliError> {
    let p = p_of(cfg)?;
    let eps = cfg.eps[0];
    let t_end = cfg.t_end.unwrap_or(200.0);
    let h = cfg.dx;
    let grid = Grid::covering(cfg.half_width.unwrap_or_else(|| domain_half_width(t_end, 1.0)), h)?;
    let u0 = GridFunction::from_fn(grid, |x| eps * bump(x));
    let u1 = GridFunction::zeros(grid);

    let mut initial = Trajectory::new(h, p, 0.0);
    initial.push(SolverState { u: u0.clone(), ut: u1.clone(), time: 0.0 })?;
    let gate = sign_and_apriori_check(&initial, 0.0, 0.0)?;
    if !gate.hypotheses_hold {
        let v = gate.violation.expect("a failed gate records its violation");
        say!(
            out,
            "hypothesis violated: data must satisfy u0 <= 0 and u1 + u0/2 <= 0; found {:.3e} at x = {}",
            v.amount,
            v.x
        )?;
        store.write_metadata(cfg, &[], &serde_json::json!({ "hypotheses_hold": false, "x": v.x, "amount": v.amount }))?;
        return Ok(Exit::Invalid);
    }

    let kind = SolverKind::from(cfg.solver);
    let dt = cfg.dt.unwrap_or(if kind == SolverKind::Mild { 2.0 * h } else { h });
    let every = (1.0 / dt).round().max(1.0) as usize;
    let spec = ProblemSpec::new(p, u0.clone(), u1.clone(), t_end, dt)?.storing_every(every);
    let traj = match cfg.solver {
        Solver::Fdtd => solve_fdtd(&spec, &FdtdOptions::new(h))?,
        _ => solve(kind, &spec)?,
    };
    let tol = 10.0 * h * h * (u0.max_abs() + u1.max_abs());
    let r = sign_and_apriori_check(&traj, 1e-8, tol)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let fmt = |e: csv::Error| CliError::Format(e.to_string());
    w.write_record(["t", "y_norm"]).map_err(fmt)?;
    for (t, y) in &r.y_history {
        w.write_record([real(*t), real(*y)]).map_err(fmt)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Format(e.to_string()))?;
    let mut tables = vec![store.write_atomic("y_norm.csv", &bytes)?];
    if let Some(last) = traj.last() {
        tables.extend(emit_plot_data(store, PlotData::Snapshot { state: last, name: "final" })?);
    }
    let summary = serde_json::json!({
        "passed": r.passed,
        "max_u": r.max_u,
        "max_envelope_excess": r.max_envelope_excess,
        "envelope_tolerance": tol,
        "eps1": r.eps1,
        "fitted_a": r.fitted_a,
        "violation": r.violation.map(|v| serde_json::json!({"kind": format!("{:?}", v.kind), "t": v.time, "x": v.x, "amount": v.amount})),
    });
    store.write_metadata(cfg, &tables, &summary)?;
    say!(out, "data size eps1 = {:.4e}, horizon {t_end}", r.eps1)?;
    say!(out, "max u = {:.3e} (tolerance 1e-8)", r.max_u)?;
    say!(out, "envelope excess = {:.3e} (tolerance {tol:.3e})", r.max_envelope_excess)?;
    say!(out, "sup Y-norm / eps1 = {:.4}", r.fitted_a)?;
    if let Some(v) = r.violation {
        say!(out, "violation {:?} at t = {}, x = {}: {:.3e}", v.kind, v.time, v.x, v.amount)?;
    }
    Ok(if r.passed { Exit::Success } else { Exit::CheckFailed })
}
