use lorentz_measure::causal::Point;
use lorentz_measure::chart::{
    dp_time_separation, verify_cone_sandwich, CausalGraph, ChartMetric, CylindricalNeighborhood, DiamondGraphs,
    DpOptions, MetricField,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const C: f64 = 1.5;

fn bump() -> ChartMetric {
    ChartMetric::new(MetricField::ConformalBump { a: 0.2 }, vec![0.0, -1.0], vec![1.0, 1.0]).unwrap()
}

fn flat_in(p: &[f64], q: &[f64], x: &[f64]) -> bool {
    let ok = |a: &[f64], b: &[f64]| b[0] - a[0] >= (b[1] - a[1]).abs();
    ok(p, x) && ok(x, q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dp_superadditive_on_table(t in 0.05f64..0.5, h in 0.05f64..0.4, x in -0.6f64..0.6, layers in 8usize..40) {
        let m = bump();
        let p = Point::from([t, x]);
        let q = Point::from([t + h, x]);
        let pitch = 0.8;
        let f = CausalGraph::build(&m, m.lo(), m.hi(), p, true, h, layers, 3, pitch).unwrap();
        let b = CausalGraph::build(&m, m.lo(), m.hi(), q, false, h, layers, 3, pitch).unwrap();
        let total = f.node_value(layers, &[0]);
        prop_assert!(total > 0.0);
        let mut best = f64::NEG_INFINITY;
        for (i, j, v) in f.reachable() {
            let back = b.node_value(layers - i, &j);
            if back > f64::NEG_INFINITY {
                let through = v + back;
                prop_assert!(through <= total + 1e-12 * total, "{through} > {total}");
                best = best.max(through);
            }
        }
        prop_assert!((best - total).abs() <= 1e-12 * total);
    }

    #[test]
    fn dp_interval_inside_cone_bounds(t in 0.05f64..0.5, h in 0.02f64..0.4, x in -0.6f64..0.6) {
        let m = bump();
        prop_assert!(verify_cone_sandwich(&m, m.lo(), m.hi(), C, 9).unwrap().verified);
        let r = dp_time_separation(&m, &Point::from([t, x]), &Point::from([t + h, x]), Some(C), DpOptions { layers: 32, ..Default::default() }).unwrap();
        prop_assert!(h / C <= r.lo + r.quadrature_error);
        prop_assert!(r.hi <= C * h + r.quadrature_error);
        prop_assert!(r.lo <= r.hi);
    }

    #[test]
    fn wider_cones_never_shorten(t in 0.05f64..0.5, h in 0.02f64..0.4, x in -0.5f64..0.5, drift in -0.9f64..0.9) {
        let g = bump();
        let wide = g.with_field(MetricField::Minkowski { cone: C }).unwrap();
        let p = Point::from([t, x]);
        let q = Point::from([t + h, x + drift * h]);
        let opts = DpOptions { layers: 24, stencil: 3, pitch: Some(0.9) };
        let narrow = dp_time_separation(&g, &p, &q, Some(C), opts).unwrap();
        let widened = dp_time_separation(&wide, &p, &q, Some(C * 1.01), opts).unwrap();
        prop_assert!(widened.lo >= narrow.lo - 1e-12, "{widened:?} < {narrow:?}");
    }

    #[test]
    fn enlargement_contains_nearby_diamonds(t in 0.475f64..0.5, h in 0.005f64..0.01, x in -0.05f64..0.05, dt in -1.0f64..1.0, dx in -1.0f64..1.0, scale in 0.2f64..2.0, seed in any::<u64>()) {
        let m = ChartMetric::minkowski(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        let n = CylindricalNeighborhood::new(vec![0.0, -1.0], vec![1.0, 1.0], 0.47, 0.515, vec![-0.1], vec![0.1], 1.0).unwrap();
        let p = Point::from([t, x]);
        let q = Point::from([t + h, x]);
        let h2 = scale * h;
        let p2 = Point::from([t + dt * h, x + dx * h * 0.5]);
        let q2 = Point::from([p2[0] + h2, p2[1]]);
        // overlap of the flat diamonds: some point lies in both
        let mid_t = 0.5 * (p[0].max(p2[0]) + q[0].min(q2[0]));
        let overlap = (0..64).any(|k| {
            let y = [mid_t, x - h + 2.0 * h * k as f64 / 63.0];
            flat_in(&p, &q, &y) && flat_in(&p2, &q2, &y)
        });
        prop_assume!(overlap);
        let e = n.enlarge(&p, &q).unwrap();
        prop_assert!(e.inside);
        let big = DiamondGraphs::new(&m, &n.w_lo, &n.w_hi, &e.p_hat, &e.q_hat, DpOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let y = [p2[0] + rng.gen::<f64>() * h2, p2[1] + (rng.gen::<f64>() - 0.5) * h2];
            if flat_in(&p2, &q2, &y) {
                prop_assert!(big.contains(&y), "{y:?} outside the enlargement");
            }
        }
    }
}
