//! Comma-separated plot data. Reals are written with 17 significant digits,
//! which round-trips every `f64` exactly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dampwave::lab::{ClassTag, LifespanRecord};
use dampwave::trajectory::SolverState;
use serde::Deserialize;

use crate::config::Class;
use crate::store::ResultStore;
use crate::CliError;

pub const LIFESPAN_HEADER: [&str; 5] = ["eps", "t0", "censored", "class", "p"];
pub const ERROR_CURVE_HEADER: [&str; 2] = ["t", "error"];
pub const SNAPSHOT_HEADER: [&str; 3] = ["x", "u", "ut"];

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row of a lifespan table.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct LifespanRow {
    pub eps: f64,
    pub t0: f64,
    pub censored: bool,
    pub class: Class,
    pub p: f64,
}

impl From<&LifespanRecord> for LifespanRow {
    fn from(r: &LifespanRecord) -> Self {
        Self {
            eps: r.eps,
            t0: r.t0,
            censored: r.censored,
            class: r.class.into(),
            p: r.p,
        }
    }
}

impl LifespanRow {
    /// A record for fitting; discretization metadata is not stored in the
    /// table and comes back as NaN.
    pub fn to_record(self) -> LifespanRecord {
        LifespanRecord {
            eps: self.eps,
            p: self.p,
            class: self.class.into(),
            t0: self.t0,
            censored: self.censored,
            refined: false,
            dx: f64::NAN,
            dt: f64::NAN,
            half_width: f64::NAN,
            threshold: f64::NAN,
        }
    }
}

pub enum PlotData<'a> {
    LoglogLifespan(&'a [LifespanRecord]),
    ErrorCurve {
        points: &'a [(f64, f64)],
        class: ClassTag,
        p: f64,
    },
    Snapshot {
        state: &'a SolverState,
        name: &'a str,
    },
}

pub fn lifespan_file_name(class: ClassTag, p: f64) -> String {
    format!("lifespan_{}_p{}.csv", class.name(), p)
}

fn table<S: AsRef<str>>(header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fmt = |e: csv::Error| CliError::Format(e.to_string());
    w.write_record(header).map_err(fmt)?;
    for r in rows {
        w.write_record(r.iter().map(|s| s.as_ref())).map_err(fmt)?;
    }
    w.into_inner().map_err(|e| CliError::Format(e.to_string()))
}

fn lifespan_row(r: &LifespanRecord) -> Vec<String> {
    vec![
        real(r.eps),
        real(r.t0),
        r.censored.to_string(),
        r.class.name().to_string(),
        real(r.p),
    ]
}

/// Writes the plot table(s) for `data`: one lifespan file per `(class, p)`,
/// one error-curve file, or one snapshot. Returns the paths written.
pub fn emit_plot_data(store: &ResultStore, data: PlotData<'_>) -> Result<Vec<PathBuf>, CliError> {
    match data {
        PlotData::LoglogLifespan(records) => {
            if records.is_empty() {
                return Err(CliError::Empty("lifespan records"));
            }
            let mut groups: BTreeMap<(ClassTag, u64), Vec<&LifespanRecord>> = BTreeMap::new();
            for r in records {
                groups.entry((r.class, r.p.to_bits())).or_default().push(r);
            }
            groups
                .into_iter()
                .map(|((class, p), rs)| {
                    let bytes = table(&LIFESPAN_HEADER, rs.into_iter().map(lifespan_row))?;
                    store.write_atomic(&lifespan_file_name(class, f64::from_bits(p)), &bytes)
                })
                .collect()
        }
        PlotData::ErrorCurve { points, class, p } => {
            if points.is_empty() {
                return Err(CliError::Empty("error curve"));
            }
            let bytes = table(&ERROR_CURVE_HEADER, points.iter().map(|(t, e)| vec![real(*t), real(*e)]))?;
            let name = format!("error_curve_{}_p{}.csv", class.name(), p);
            Ok(vec![store.write_atomic(&name, &bytes)?])
        }
        PlotData::Snapshot { state, name } => {
            let grid = state.u.grid();
            let rows = grid
                .points()
                .zip(state.u.values().iter().zip(state.ut.values()))
                .map(|(x, (u, ut))| vec![real(x), real(*u), real(*ut)]);
            let bytes = table(&SNAPSHOT_HEADER, rows)?;
            Ok(vec![store.write_atomic(&format!("snapshot_{name}.csv"), &bytes)?])
        }
    }
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path, header: &[&str]) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::parse(path, e))?;
    let found: Vec<String> = r.headers().map_err(|e| CliError::parse(path, e))?.iter().map(String::from).collect();
    if found != header {
        return Err(CliError::parse(path, format!("header {found:?}, expected {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(|e| CliError::parse(path, e))).collect()
}

pub fn read_lifespan_table(path: &Path) -> Result<Vec<LifespanRow>, CliError> {
    read_rows(path, &LIFESPAN_HEADER)
}

pub fn read_error_curve(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    read_rows(path, &ERROR_CURVE_HEADER)
}

pub fn read_snapshot(path: &Path) -> Result<Vec<(f64, f64, f64)>, CliError> {
    read_rows(path, &SNAPSHOT_HEADER)
}

/// The lifespan tables under `path`: the file itself, or every
/// `lifespan_*.csv` in the directory, in name order.
pub fn lifespan_tables(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let entries = std::fs::read_dir(path).map_err(|e| CliError::io(path, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("lifespan_") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Empty("lifespan tables"));
    }
    Ok(files)
}
