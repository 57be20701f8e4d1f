//! Write-then-read checks for every table kind.

#![allow(dead_code)]

use dampwave::lab::{fit_power_law, ClassTag, LifespanRecord};
use dampwave::numerics::{Grid, GridFunction};
use dampwave::trajectory::SolverState;
use dampwave_cli::commands::fit_tables;
use dampwave_cli::plot::{lifespan_tables, LifespanRow};
use dampwave_cli::{emit_plot_data, read_error_curve, read_lifespan_table, read_snapshot, PlotData, ResultStore};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = Result<(), TestCaseError>;

/// Finite reals across the whole exponent range, signs included.
pub fn any_real() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3..1e3f64,
        prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO,
    ]
}

pub fn class() -> impl Strategy<Value = ClassTag> {
    prop_oneof![Just(ClassTag::A), Just(ClassTag::B)]
}

pub fn record() -> impl Strategy<Value = LifespanRecord> {
    (1e-8..10.0f64, 1e-3..1e300f64, any::<bool>(), class(), prop_oneof![Just(2.0), 1.0001..3.0f64]).prop_map(
        |(eps, t0, censored, class, p)| {
            LifespanRow { eps, t0, censored, class: class.into(), p }.to_record()
        },
    )
}

fn store() -> (tempfile::TempDir, ResultStore) {
    let dir = tempfile::tempdir().unwrap();
    let store = ResultStore::open(dir.path()).unwrap();
    (dir, store)
}

fn row(r: &LifespanRecord) -> LifespanRow {
    LifespanRow::from(r)
}

pub fn lifespan_round_trip(records: &[LifespanRecord]) -> Check {
    let (_dir, store) = store();
    let files = emit_plot_data(&store, PlotData::LoglogLifespan(records)).unwrap();
    let mut back = Vec::new();
    for f in &files {
        back.extend(read_lifespan_table(f).unwrap());
    }
    let mut want: Vec<LifespanRow> = records.iter().map(row).collect();
    // files come back grouped by (class, p), each in input order
    want.sort_by(|a, b| (a.class as u8, a.p.to_bits()).cmp(&(b.class as u8, b.p.to_bits())));
    prop_assert_eq!(back, want);
    Ok(())
}

/// `(ε, T₀)` pairs for one class and exponent, wide enough to fit.
pub fn fit_points() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.01..1.0f64, 1.0..1e9f64), 3..9).prop_filter("eps must span a factor of 8", |v| {
        let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(l, h), p| (l.min(p.0), h.max(p.0)));
        hi >= 8.0 * lo
    })
}

pub fn fit_round_trip(points: &[(f64, f64)], class: ClassTag, p: f64) -> Check {
    let records: Vec<LifespanRecord> = points
        .iter()
        .map(|&(eps, t0)| LifespanRow { eps, t0, censored: false, class: class.into(), p }.to_record())
        .collect();
    let (dir, store) = store();
    emit_plot_data(&store, PlotData::LoglogLifespan(&records)).unwrap();
    let direct = fit_power_law(&records);
    let stored = fit_tables(&lifespan_tables(dir.path()).unwrap());
    match (direct, stored) {
        (Ok(a), Ok(b)) => prop_assert_eq!(vec![a], b),
        (a, b) => prop_assert_eq!(a.is_ok(), b.is_ok()),
    }
    Ok(())
}

pub fn error_curve_round_trip(points: &[(f64, f64)], p: f64) -> Check {
    let (_dir, store) = store();
    let files = emit_plot_data(&store, PlotData::ErrorCurve { points, class: ClassTag::B, p }).unwrap();
    let back = read_error_curve(&files[0]).unwrap();
    prop_assert_eq!(back.len(), points.len());
    for (a, b) in back.iter().zip(points) {
        prop_assert!(a.0.to_bits() == b.0.to_bits() && a.1.to_bits() == b.1.to_bits(), "{a:?} vs {b:?}");
    }
    Ok(())
}

pub fn snapshot_round_trip(u: &[f64], ut: &[f64], half_width: f64) -> Check {
    let n = u.len().min(ut.len());
    let grid = Grid::new(half_width, n).unwrap();
    let state = SolverState {
        u: GridFunction::new(grid, u[..n].to_vec()).unwrap(),
        ut: GridFunction::new(grid, ut[..n].to_vec()).unwrap(),
        time: 1.0,
    };
    let (_dir, store) = store();
    let files = emit_plot_data(&store, PlotData::Snapshot { state: &state, name: "t" }).unwrap();
    let back = read_snapshot(&files[0]).unwrap();
    prop_assert_eq!(back.len(), n);
    for (i, (x, a, b)) in back.iter().enumerate() {
        prop_assert_eq!(x.to_bits(), grid.x(i).to_bits());
        prop_assert_eq!(a.to_bits(), u[i].to_bits());
        prop_assert_eq!(b.to_bits(), ut[i].to_bits());
    }
    Ok(())
}
