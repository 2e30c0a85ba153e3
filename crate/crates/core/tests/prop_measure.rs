use lorentz_measure::causal::Point;
use lorentz_measure::measure::{
    box_cover, curve_chain_cover, dyadic_scales, estimate_dimension, lower_measure, point_cover, upper_measure, CoverBank,
    EstimateOptions, FrostmanOptions, Generator, UniformMass, VerifyOptions,
};
use lorentz_measure::spaces::{LinearSubspace, MinkowskiSpace, PiecewiseLinearCurve, Region, SubspaceCube};
use proptest::prelude::*;

const FAST_VERIFY: VerifyOptions = VerifyOptions { samples: 1024, seed: 11 };

fn boxes(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop::collection::vec((-1.0f64..1.0, 0.1f64..1.0), n)
        .prop_map(|v| (v.iter().map(|(a, _)| *a).collect(), v.iter().map(|(a, w)| a + w).collect()))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cover_cost_dilation(kind in 0usize..3, (lo, hi) in boxes(2), a in 0.05f64..20.0, big_n in 0.0f64..4.0, delta in 0.02f64..0.5) {
        let m = MinkowskiSpace::new(2);
        let cover = match kind {
            0 => box_cover(&m, &lo, &hi, delta).unwrap(),
            1 => {
                let c = PiecewiseLinearCurve::new(&m, vec![Point::new(lo.clone()), Point::new(vec![lo[0] + 1.0, lo[1] + 0.3])]).unwrap();
                curve_chain_cover(&m, &c, delta).unwrap()
            }
            _ => point_cover(&m, &[Point::new(lo.clone()), Point::new(hi.clone())]),
        };
        let scaled = cover.dilate(a);
        prop_assert!(close(scaled.raw_cost(big_n), a.powf(big_n) * cover.raw_cost(big_n), 1e-10));
        prop_assert!(close(scaled.max_diameter(), a * cover.max_diameter(), 1e-12));
    }

    #[test]
    fn subset_monotone_dimension(kind in 0usize..3, (lo, hi) in boxes(2), inner in prop::collection::vec(0.0f64..1.0, 4)) {
        let m = MinkowskiSpace::new(2);
        let opts = EstimateOptions { verify: FAST_VERIFY, ..Default::default() };
        let scales = dyadic_scales(3, 7);
        let grid = [0.0, 1.0, 2.0, 3.0];
        let outer = Region::Box { lo: lo.clone(), hi: hi.clone() };
        let at = |u: f64, k: usize| lo[k] + u * (hi[k] - lo[k]);
        let (sub, gens) = match kind {
            0 => {
                let (a0, b0) = (inner[0].min(inner[1]), inner[0].max(inner[1]));
                let (a1, b1) = (inner[2].min(inner[3]), inner[2].max(inner[3]));
                let (b0, b1) = (b0.max(a0 + 0.05).min(1.0), b1.max(a1 + 0.05).min(1.0));
                (Region::Box { lo: vec![at(a0.min(b0 - 0.05), 0), at(a1.min(b1 - 0.05), 1)], hi: vec![at(b0, 0), at(b1, 1)] }, vec![Generator::Box])
            }
            1 => {
                let x = at(inner[0], 1);
                let c = PiecewiseLinearCurve::new(&m, vec![Point::new(vec![lo[0], x]), Point::new(vec![hi[0], x])]).unwrap();
                (Region::Curve(c), vec![Generator::CurveChain])
            }
            _ => {
                let pts = inner.chunks(2).map(|c| Point::new(vec![at(c[0], 0), at(c[1], 1)])).collect();
                (Region::Points(pts), vec![Generator::Points])
            }
        };
        let d_sub = estimate_dimension(&m, &sub, &gens, &scales, &grid, opts).unwrap().value;
        let d_out = estimate_dimension(&m, &outer, &[Generator::Box], &scales, &grid, opts).unwrap().value;
        prop_assert!(d_sub <= d_out + 0.1, "{d_sub} > {d_out}");
    }

    #[test]
    fn lower_below_upper(kind in 0usize..2, (lo, hi) in boxes(2), angle in -0.7f64..0.7, len in 0.2f64..2.0, seed in any::<u64>()) {
        let m = MinkowskiSpace::new(2);
        let (region, n) = if kind == 0 {
            (Region::Box { lo, hi }, 2.0)
        } else {
            let sub = LinearSubspace::new(m, vec![vec![angle.sin(), 1.0]]).unwrap();
            (Region::SubspaceCube(SubspaceCube::new(sub, Point::new(lo), vec![(0.0, len)]).unwrap()), 1.0)
        };
        let mu = UniformMass::new(m, region.clone()).unwrap();
        let fo = FrostmanOptions { diamonds: 24, budget: 512, seed, ..Default::default() };
        let lower = lower_measure(&m, n, &mu, fo).unwrap().value;
        let gens = Generator::defaults_for(&m, &region);
        let upper = upper_measure(&m, &region, n, 1.0 / 64.0, &gens, FAST_VERIFY).unwrap().value;
        prop_assert!(lower <= 1.1 * upper, "{lower} > {upper}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cost_additive_over_disjoint_unions((lo, hi) in boxes(2), gap in 0.01f64..1.0, big_n in 0.0f64..3.0, delta in 0.02f64..0.3) {
        let m = MinkowskiSpace::new(2);
        let a = box_cover(&m, &lo, &hi, delta).unwrap();
        let shift = hi[1] - lo[1] + gap + 2.0 * delta;
        let lo2 = vec![lo[0], lo[1] + shift];
        let hi2 = vec![hi[0], hi[1] + shift];
        let c = box_cover(&m, &lo2, &hi2, delta).unwrap();
        prop_assert!(close(a.union(&c).raw_cost(big_n), a.raw_cost(big_n) + c.raw_cost(big_n), 1e-12));
    }

    #[test]
    fn union_cover_subadditive((lo, hi) in boxes(2), shift in 0.0f64..2.0, big_n in 1.0f64..3.0) {
        let m = MinkowskiSpace::new(2);
        let delta = 1.0 / 32.0;
        let ra = Region::Box { lo: lo.clone(), hi: hi.clone() };
        let rb = Region::Box { lo: vec![lo[0], lo[1] + shift], hi: vec![hi[0], hi[1] + shift] };
        let mut a = box_cover(&m, &lo, &hi, delta).unwrap();
        let mut b = box_cover(&m, &[lo[0], lo[1] + shift], &[hi[0], hi[1] + shift], delta).unwrap();
        a.verify(&m, &ra, 1024, 1);
        b.verify(&m, &rb, 1024, 2);
        let mut u = a.union(&b);
        prop_assert!(u.verify(&m, &ra, 1024, 3).passed());
        prop_assert!(u.verify(&m, &rb, 1024, 4).passed());
        let ua = upper_measure(&m, &ra, big_n, delta, &[Generator::Box], FAST_VERIFY).unwrap().value;
        let ub = upper_measure(&m, &rb, big_n, delta, &[Generator::Box], FAST_VERIFY).unwrap().value;
        prop_assert!(u.raw_cost(big_n) <= ua + ub + 1e-12 * (ua + ub));
    }

    #[test]
    fn envelope_nondecreasing_as_delta_shrinks((lo, hi) in boxes(2), big_n in 0.0f64..3.0) {
        let m = MinkowskiSpace::new(2);
        let r = Region::Box { lo, hi };
        let bank = CoverBank::build(&m, &r, &Generator::defaults_for(&m, &r), &dyadic_scales(2, 6), FAST_VERIFY).unwrap();
        let env: Vec<f64> = bank.series(&[big_n]).entries.iter().filter(|e| e.generator == "envelope").map(|e| e.cost).collect();
        prop_assert_eq!(env.len(), 5);
        prop_assert!(env.windows(2).all(|w| w[1] >= w[0]));
    }
}
