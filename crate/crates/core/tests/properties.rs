use gssd::divergence::wasserstein_pp_sorted;
use gssd::{mmd_sq, sinkhorn_div, wasserstein_pp, SinkhornParams};
use proptest::prelude::*;

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 1..24)
}

proptest! {
    #[test]
    fn wasserstein_is_a_symmetric_nonnegative_cost(x in sample(), y in sample(), p in 1.0f64..4.0) {
        let xy = wasserstein_pp(&x, &y, p).unwrap();
        prop_assert!(xy >= 0.0);
        prop_assert_eq!(xy, wasserstein_pp(&y, &x, p).unwrap());
        prop_assert_eq!(wasserstein_pp(&x, &x, p).unwrap(), 0.0);
    }

    #[test]
    fn sorted_entry_point_agrees(mut x in sample(), mut y in sample()) {
        let want = wasserstein_pp(&x, &y, 2.0).unwrap();
        x.sort_by(f64::total_cmp);
        y.sort_by(f64::total_cmp);
        prop_assert_eq!(wasserstein_pp_sorted(&x, &y, 2.0), want);
    }

    #[test]
    fn wasserstein_is_bounded_by_extreme_distances(x in sample(), y in sample()) {
        let lo = x.iter().chain(&y).cloned().fold(f64::INFINITY, f64::min);
        let hi = x.iter().chain(&y).cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(wasserstein_pp(&x, &y, 2.0).unwrap() <= (hi - lo) * (hi - lo) + 1e-9);
    }

    #[test]
    fn mmd_is_nonnegative(x in sample(), y in sample(), h in 0.1f64..20.0) {
        prop_assert!(mmd_sq(&x, &y, h).unwrap() >= 0.0);
    }

    #[test]
    fn sinkhorn_is_finite_and_small_on_self(x in prop::collection::vec(-3.0f64..3.0, 1..12)) {
        let params = SinkhornParams { p: 2.0, epsilon: 0.5, tol: 1e-9, max_iter: 1000 };
        let v = sinkhorn_div(&x, &x, &params).unwrap().value;
        prop_assert!(v.abs() <= 1e-6, "{}", v);
    }
}
