mod support;

use proptest::prelude::*;
use support::roundtrip::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifespan_tables(records in prop::collection::vec(record(), 1..20)) {
        lifespan_round_trip(&records)?;
    }

    #[test]
    fn fits(points in fit_points(), class in class(), p in prop_oneof![Just(2.0), Just(3.0), 1.1..2.9f64]) {
        fit_round_trip(&points, class, p)?;
    }

    #[test]
    fn error_curves(points in prop::collection::vec((any_real(), any_real()), 1..40), p in 1.01..3.0f64) {
        error_curve_round_trip(&points, p)?;
    }

    #[test]
    fn snapshots(
        u in prop::collection::vec(any_real(), 3..60),
        ut in prop::collection::vec(any_real(), 3..60),
        half_width in 0.1..100.0f64,
    ) {
        snapshot_round_trip(&u, &ut, half_width)?;
    }
}
