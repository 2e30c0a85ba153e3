use lorentz_measure::causal::{make_diamond, omega, rho, rho_tau, CausalSpace, Point};
use lorentz_measure::spaces::{
    restrict_to_subspace, CurveClass, LinearSubspace, LorentzBoost, MinkowskiSpace, PiecewiseLinearCurve,
};
use proptest::prelude::*;

fn future_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    (0.05f64..2.0, prop::collection::vec(-1.0f64..1.0, n - 1), 0.0f64..0.95).prop_map(|(t, dir, frac)| {
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
        let mut v = vec![t];
        v.extend(dir.iter().map(|d| d / norm * frac * t));
        v
    })
}

fn add(p: &[f64], v: &[f64]) -> Point {
    Point::new(p.iter().zip(v).map(|(a, b)| a + b).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reverse_triangle(n in 2usize..5, x in prop::collection::vec(-1.0f64..1.0, 4), u in future_vec(4), w in future_vec(4)) {
        let m = MinkowskiSpace::new(n);
        let x = Point::new(x[..n].to_vec());
        let y = add(&x, &u[..n]);
        let z = add(&y, &w[..n]);
        let lhs = m.time_sep(&x, &z);
        let rhs = m.time_sep(&x, &y) + m.time_sep(&y, &z);
        prop_assert!(lhs >= rhs - 1e-12 * (1.0 + lhs), "{lhs} < {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn homogeneity(v in future_vec(3), a in 0.1f64..10.0, big_n in 0.5f64..5.0) {
        let m = MinkowskiSpace::new(3);
        let p = Point::origin(3);
        let q = Point::new(v.clone());
        let qa = Point::new(v.iter().map(|x| a * x).collect());
        let t = m.time_sep(&p, &q);
        let ta = m.time_sep(&p, &qa);
        prop_assert!((ta - a * t).abs() <= 1e-12 * (1.0 + ta));
        let r = rho(big_n, &make_diamond(&m, p.clone(), q));
        let ra = rho(big_n, &make_diamond(&m, p, qa));
        prop_assert!((ra - a.powf(big_n) * r).abs() <= 1e-11 * (1.0 + ra));
    }

    #[test]
    fn boosts_preserve_tau_and_rho(v in future_vec(4), speed in -0.95f64..0.95, axis in 1usize..4, big_n in 0.5f64..5.0) {
        let m = MinkowskiSpace::new(4);
        let b = LorentzBoost::for_space(&m, speed, axis).unwrap();
        let p = Point::new(vec![0.3, -0.2, 0.1, 0.5]);
        let q = add(&p, &v);
        let (pb, qb) = (b.apply(&p), b.apply(&q));
        let t = m.time_sep(&p, &q);
        prop_assert!((m.time_sep(&pb, &qb) - t).abs() <= 1e-12 * (1.0 + t) * b.gamma().powi(2));
        let r = rho(big_n, &make_diamond(&m, p, q));
        let rb = rho(big_n, &make_diamond(&m, pb, qb));
        prop_assert!((r - rb).abs() <= 1e-11 * (1.0 + r) * b.gamma().powi(2));
    }

    #[test]
    fn rho_increases_in_tau(big_n in 0.1f64..8.0, t in 0.0f64..5.0, dt in 1e-6f64..1.0) {
        prop_assert!(rho_tau(big_n, t + dt) > rho_tau(big_n, t));
    }

    // omega_N tau^N increases in N exactly when tau exceeds omega_N/omega_{N+h},
    // so tau > 1 alone is not enough
    #[test]
    fn rho_in_n_follows_omega_ratio(big_n in 0.5f64..6.0, h in 0.05f64..1.0, t in 1.0f64..6.0) {
        let threshold = (omega(big_n).unwrap() / omega(big_n + h).unwrap()).powf(1.0 / h);
        let up = rho_tau(big_n + h, t) >= rho_tau(big_n, t);
        prop_assert_eq!(up, t >= threshold);
    }

    #[test]
    fn chron_iff_positive_tau(n in 2usize..5, p in prop::collection::vec(-1.0f64..1.0, 4), q in prop::collection::vec(-1.0f64..1.0, 4)) {
        let m = MinkowskiSpace::new(n);
        prop_assert_eq!(m.chron(&p[..n], &q[..n]), m.time_sep(&p[..n], &q[..n]) > 0.0);
    }

    #[test]
    fn subspace_reverse_triangle(a in prop::collection::vec(0.0f64..1.0, 2), b in prop::collection::vec(0.0f64..1.0, 2), c in prop::collection::vec(0.0f64..1.0, 2)) {
        let sub = LinearSubspace::new(MinkowskiSpace::new(3), vec![vec![1.0, 0.0, 0.0], vec![0.3, 1.0, 0.0]]).unwrap();
        let s = restrict_to_subspace(sub.clone());
        let o = Point::origin(3);
        let mut pts = [sub.embed(&o, &a), sub.embed(&o, &b), sub.embed(&o, &c)];
        pts.sort_by(|x, y| x[0].partial_cmp(&y[0]).unwrap());
        let [x, y, z] = pts;
        if s.causal(&x, &y) && s.causal(&y, &z) {
            prop_assert!(s.time_sep(&x, &z) >= s.time_sep(&x, &y) + s.time_sep(&y, &z) - 1e-12);
        }
    }

    #[test]
    fn null_curves_have_zero_tau(len in 0.05f64..1.0, up in any::<bool>(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let m = MinkowskiSpace::new(2);
        let sign = if up { 1.0 } else { -1.0 };
        let c = PiecewiseLinearCurve::new(&m, vec![Point::from([0.0, 0.0]), Point::from([len, sign * len])]).unwrap();
        prop_assert_eq!(c.class(), CurveClass::Null);
        let (s, t) = (s.min(t), s.max(t));
        prop_assert_eq!(m.time_sep(&c.point_at(s), &c.point_at(t)), 0.0);
    }
}
