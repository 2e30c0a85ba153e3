use lorentz_measure::curvature::{bg_ratio_bound, radius_cap, s_k, s_k_prime, tcd_doubling_constant};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn double_angle(k in -4.0f64..4.0, t in 0.0f64..1.5) {
        let lhs = s_k(k, 2.0 * t);
        let rhs = 2.0 * s_k(k, t) * s_k_prime(k, t);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn doubling_continuous_from_below(n in 1.0f64..6.0, r_star in 0.1f64..5.0) {
        let at_zero = tcd_doubling_constant(0.0, n, r_star).unwrap();
        prop_assert_eq!(at_zero, 2f64.powf(n + 1.0));
        let near = tcd_doubling_constant(-1e-10, n, r_star).unwrap();
        prop_assert!((near / at_zero - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ratio_bound_dominates_inverse_doubling(k in -5.0f64..5.0, n in 1.0f64..6.0, r_star in 0.1f64..4.0, frac in 0.01f64..1.0) {
        let r_star = r_star.min(radius_cap(k, n));
        let r = 0.5 * r_star * frac;
        let ratio = bg_ratio_bound(k, n, r, 2.0 * r).unwrap();
        let l = tcd_doubling_constant(k, n, r_star).unwrap();
        prop_assert!(ratio >= 1.0 / l * (1.0 - 1e-9), "{ratio} < 1/{l}");
    }
}
