use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use dampwave::lab::ClassTag;
use dampwave::solvers::{SolverKind, DEFAULT_BLOWUP_THRESHOLD};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "DAMPWAVE_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Kernel, identity and special-function residual table.
    Verify,
    /// One trajectory.
    Solve,
    /// Lifespan sweep over a list of amplitudes.
    Sweep,
    /// Power-law fits of stored lifespan tables.
    Fit,
    /// Sign and envelope checks for non-positive data.
    GlobalCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Verify => "verify",
            Self::Solve => "solve",
            Self::Sweep => "sweep",
            Self::Fit => "fit",
            Self::GlobalCheck => "global-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Class {
    A,
    B,
}

impl From<Class> for ClassTag {
    fn from(c: Class) -> Self {
        match c {
            Class::A => ClassTag::A,
            Class::B => ClassTag::B,
        }
    }
}

impl From<ClassTag> for Class {
    fn from(c: ClassTag) -> Self {
        match c {
            ClassTag::A => Class::A,
            ClassTag::B => Class::B,
        }
    }
}

impl FromStr for Class {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.parse::<ClassTag>().map(Into::into).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Mild,
    Dalembert,
    Fdtd,
}

impl From<Solver> for SolverKind {
    fn from(s: Solver) -> Self {
        match s {
            Solver::Mild => SolverKind::Mild,
            Solver::Dalembert => SolverKind::Dalembert,
            Solver::Fdtd => SolverKind::Fdtd,
        }
    }
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.parse::<SolverKind>().map_err(|e| e.to_string())? {
            SolverKind::Mild => Ok(Self::Mild),
            SolverKind::Dalembert => Ok(Self::Dalembert),
            SolverKind::Fdtd => Ok(Self::Fdtd),
        }
    }
}

/// Comma-separated list of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

impl FromStr for RealList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", v.trim())))
            .collect::<Result<Vec<_>, _>>()
            .map(RealList)
    }
}

/// Command-line flags. Every flag may also be given as `key = value` in the
/// file named by `--config`; flags win.
#[derive(Debug, Parser)]
#[command(name = "dampwave", version, about = "Lifespan laboratory for u_tt + u_t - u_xx = |u|^p")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Amplitude, or a comma-separated list for `sweep`.
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<RealList>,
    #[arg(long)]
    pub class: Option<Class>,
    /// Domain half-width; sized from the horizon when omitted.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Grid points; overrides `dx` when given.
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Horizon; sized from the lifespan model when omitted.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Blowup threshold `M`.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub solver: Option<Solver>,
    /// Multiplier on the model lifespan for automatic horizons.
    #[arg(long)]
    pub safety: Option<f64>,
    #[arg(long)]
    pub refine: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Lifespan table, or a directory of them, for `fit`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol_kernel: Option<f64>,
    #[arg(long)]
    pub tol_mass: Option<f64>,
    #[arg(long)]
    pub tol_strans: Option<f64>,
}

/// Fully resolved run settings, echoed into every metadata document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub p: Option<f64>,
    pub eps: Vec<f64>,
    pub class: Class,
    pub half_width: Option<f64>,
    pub dx: f64,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub threshold: f64,
    pub solver: Solver,
    pub safety: f64,
    pub refine: bool,
    pub out: PathBuf,
    pub input: Option<PathBuf>,
    pub seed: u64,
    pub tol_kernel: f64,
    pub tol_mass: f64,
    pub tol_strans: f64,
}

fn config_err(key: &str, reason: impl Display) -> CliError {
    CliError::Config {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

/// Reads `key = value` lines; `#` starts a comment. Dashes and underscores
/// in keys are interchangeable.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err("config", format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| config_err("config", format!("line {}: expected `key = value`", i + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

struct Merge {
    file: BTreeMap<String, String>,
}

impl Merge {
    fn take<T: FromStr>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        let from_file = self.file.remove(key);
        if flag.is_some() {
            return Ok(flag);
        }
        from_file
            .map(|s| s.parse::<T>().map_err(|e| config_err(key, format!("cannot parse `{s}`: {e}"))))
            .transpose()
    }
}

/// Parses `argv` (program name first) and the optional configuration file.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(CliError::Usage)?;
    let file = match &args.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    resolve(args, file)
}

fn resolve(args: Args, file: BTreeMap<String, String>) -> Result<RunConfig, CliError> {
    let mut m = Merge { file };
    let command = args.command;
    let p = m.take("p", args.p)?;
    let eps = m.take("eps", args.eps)?.map(|l| l.0);
    let class = m.take("class", args.class)?.unwrap_or(Class::A);
    let half_width = m.take("half_width", args.half_width)?;
    let n_points = m.take("n_points", args.n_points)?;
    let dx = m.take("dx", args.dx)?;
    let dt = m.take("dt", args.dt)?;
    let t_end = m.take("t_end", args.t_end)?;
    let threshold = m.take("threshold", args.threshold)?.unwrap_or(DEFAULT_BLOWUP_THRESHOLD);
    let solver = m.take("solver", args.solver)?;
    let safety = m.take("safety", args.safety)?.unwrap_or(1000.0);
    let refine = m.take("refine", args.refine)?.unwrap_or(true);
    let out = m
        .take("out", args.out)?
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("dampwave-out"));
    let input = m.take("input", args.input)?;
    let seed = m.take("seed", args.seed)?.unwrap_or(0);
    let tol_kernel = m.take("tol_kernel", args.tol_kernel)?.unwrap_or(1e-4);
    let tol_mass = m.take("tol_mass", args.tol_mass)?.unwrap_or(1e-6);
    let tol_strans = m.take("tol_strans", args.tol_strans)?.unwrap_or(1e-4);
    if let Some(key) = m.file.keys().next() {
        return Err(config_err(key, "unknown key"));
    }

    let p = match (command, p) {
        (Command::Verify, None) => Some(2.0),
        (Command::Solve | Command::Sweep | Command::GlobalCheck, None) => {
            return Err(config_err("p", format!("required by `{}`", command.name())))
        }
        (_, p) => p,
    };
    if let Some(p) = p {
        if !(p > 1.0 && p <= 3.0) {
            return Err(config_err("p", format!("must lie in (1, 3], got {p}")));
        }
    }
    let eps = match (command, eps) {
        (Command::GlobalCheck, None) => vec![-0.1],
        (Command::Solve | Command::Sweep, None) => {
            return Err(config_err("eps", format!("required by `{}`", command.name())))
        }
        (_, e) => e.unwrap_or_default(),
    };
    match command {
        Command::Sweep => {
            if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                return Err(config_err("eps", "amplitudes must be positive and finite"));
            }
        }
        Command::Solve | Command::GlobalCheck => {
            if eps.len() != 1 || !eps[0].is_finite() {
                return Err(config_err("eps", "a single finite amplitude is expected"));
            }
        }
        _ => {}
    }
    if let Some(l) = half_width {
        if !(l > 0.0 && l.is_finite()) {
            return Err(config_err("half_width", format!("must be positive, got {l}")));
        }
    }
    let dx = match (n_points, half_width, dx) {
        (Some(n), Some(l), _) if n >= 3 => 2.0 * l / (n - 1) as f64,
        (Some(_), Some(_), _) => return Err(config_err("n_points", "at least 3 points are needed")),
        (Some(_), None, _) => return Err(config_err("n_points", "needs `half_width`")),
        (None, _, Some(dx)) => dx,
        (None, _, None) => 0.05,
    };
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(config_err("dx", format!("must be positive, got {dx}")));
    }
    if let Some(dt) = dt {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(config_err("dt", format!("must be positive, got {dt}")));
        }
    }
    if let Some(t) = t_end {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(config_err("t_end", format!("must be non-negative, got {t}")));
        }
    }
    if !(threshold > 0.0) {
        return Err(config_err("threshold", format!("must be positive, got {threshold}")));
    }
    if !(safety > 0.0) {
        return Err(config_err("safety", format!("must be positive, got {safety}")));
    }
    for (key, tol) in [("tol_kernel", tol_kernel), ("tol_mass", tol_mass), ("tol_strans", tol_strans)] {
        if !(tol > 0.0) {
            return Err(config_err(key, format!("must be positive, got {tol}")));
        }
    }
    let solver = match (command, solver) {
        (Command::Sweep, Some(s)) if s != Solver::Fdtd => {
            return Err(config_err("solver", "sweeps use the fdtd solver"))
        }
        (Command::GlobalCheck, None) => Solver::Dalembert,
        (_, s) => s.unwrap_or(Solver::Fdtd),
    };
    Ok(RunConfig {
        command,
        p,
        eps,
        class,
        half_width,
        dx,
        dt,
        t_end,
        threshold,
        solver,
        safety,
        refine,
        out,
        input,
        seed,
        tol_kernel,
        tol_mass,
        tol_strans,
    })
}
