//! Property tests for the algebraic invariants: linearity of the operator
//! actions, serialization round-trips and the Wronskian identity at random
//! arguments.

use gribov_core::basis::{
    gribov_apply, heun_pm_apply, BasisKind, CoefficientVector, OperatorParams,
};
use gribov_core::ortho::wronskian_residual;
use num_complex::Complex64;
use proptest::prelude::*;

fn complex_in(radius: f64) -> impl Strategy<Value = Complex64> {
    (-radius..radius, -radius..radius).prop_map(|(re, im)| Complex64::new(re, im))
}

fn small_vector() -> impl Strategy<Value = CoefficientVector> {
    (1usize..6, prop::collection::vec(complex_in(5.0), 1..8))
        .prop_map(|(start, entries)| CoefficientVector::new(BasisKind::E, start, entries).unwrap())
}

proptest! {
    #[test]
    fn gribov_apply_is_linear(
        u in small_vector(),
        v in small_vector(),
        alpha in complex_in(3.0),
        beta in complex_in(3.0),
    ) {
        let params = OperatorParams::gribov(0.7, 1.3);
        let mut combo = u.scaled(alpha);
        combo.add_scaled(beta, &v);
        let lhs = gribov_apply(&params, &combo);
        let mut rhs = gribov_apply(&params, &u).scaled(alpha);
        rhs.add_scaled(beta, &gribov_apply(&params, &v));
        let scale = rhs.norm().max(1.0);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * scale);
    }

    #[test]
    fn heun_apply_is_linear(
        u in small_vector(),
        v in small_vector(),
        alpha in complex_in(3.0),
        beta in complex_in(3.0),
    ) {
        let params = OperatorParams::heun(2, 3).unwrap();
        let mut combo = u.scaled(alpha);
        combo.add_scaled(beta, &v);
        let lhs = heun_pm_apply(&params, &combo);
        let mut rhs = heun_pm_apply(&params, &u).scaled(alpha);
        rhs.add_scaled(beta, &heun_pm_apply(&params, &v));
        let scale = rhs.norm().max(1.0);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * scale);
    }

    #[test]
    fn coefficient_vector_json_round_trip(v in small_vector()) {
        let json = serde_json::to_string(&v).unwrap();
        let back: CoefficientVector = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn wronskian_holds_at_random_arguments(
        n in 1usize..=60,
        x in complex_in(4.0),
    ) {
        prop_assert!(wronskian_residual(n, x) <= 1e-9);
    }
}
