//! Mass-distribution lower bounds: if `mu(J) <= c rho_N(J)` for all small
//! diamonds then `V^N >= mu(total) / c`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::causal::{make_diamond, rho, CausalSpace, Point};
use crate::error::{Error, Result};
use crate::measure::stream_seed;
use crate::qmc::Halton;
use crate::spaces::{LorentzBoost, MinkowskiSpace, PiecewiseLinearCurve, Region, SignatureClass, SubspaceCube};

/// A finite measure carried by a region, given as the pushforward of the
/// uniform measure on a parameter cube.
pub trait MassDistribution: Sync {
    fn total_mass(&self) -> f64;
    fn param_dim(&self) -> usize;
    fn point_at(&self, u: &[f64]) -> Point;
    /// Sub-box of the parameter cube whose image contains every support
    /// point within Euclidean distance `radius` of `center`.
    fn param_window(&self, center: &[f64], radius: f64) -> Vec<(f64, f64)>;
    /// Unit timelike axis for test diamonds centered at `x`.
    fn axis_at(&self, x: &[f64]) -> Vec<f64>;
    fn region(&self) -> &Region;

    /// Mass of `J(p, q)`, estimated by quasi-random sampling of the window.
    fn mass_in<S: CausalSpace + ?Sized>(&self, space: &S, p: &Point, q: &Point, budget: usize, seed: u64) -> f64
    where
        Self: Sized,
    {
        let d = make_diamond(space, p.clone(), q.clone());
        if d.empty {
            return 0.0;
        }
        let center = d.center();
        let window = self.param_window(&center, d.diam_bound + 1e-12);
        let frac: f64 = window.iter().map(|(a, b)| (b - a).max(0.0)).product();
        if frac == 0.0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut h = Halton::shifted(self.param_dim(), &mut rng);
        let mut u = vec![0.0; self.param_dim()];
        let mut hits = 0usize;
        for _ in 0..budget {
            h.next_into(&mut u);
            for (x, (a, b)) in u.iter_mut().zip(&window) {
                *x = a + *x * (b - a);
            }
            if d.contains(space, &self.point_at(&u)) {
                hits += 1;
            }
        }
        self.total_mass() * frac * hits as f64 / budget as f64
    }
}

/// Natural measure on a region: Lebesgue on boxes, Hausdorff on subspace
/// cubes, `tau`-length on causal polylines, counting on point sets.
#[derive(Debug, Clone)]
pub struct UniformMass {
    space: MinkowskiSpace,
    region: Region,
    total: f64,
    kind: MassKind,
}

#[derive(Debug, Clone)]
enum MassKind {
    Box,
    Cube { sigma_min: f64, axis: Vec<f64> },
    Curve { cumulative: Vec<f64> },
    Points,
}

impl UniformMass {
    pub fn new(space: MinkowskiSpace, region: Region) -> Result<UniformMass> {
        let n = space.dimension();
        let mut e0 = vec![0.0; n];
        e0[0] = 1.0 / space.cone();
        let (total, kind) = match &region {
            Region::Box { lo, hi } => (lo.iter().zip(hi).map(|(a, b)| b - a).product(), MassKind::Box),
            Region::SubspaceCube(c) => {
                let axis = match c.subspace.class() {
                    SignatureClass::Spacelike => c.subspace.timelike_normal()?,
                    SignatureClass::Timelike => c.subspace.time_axis()?,
                    SignatureClass::NullDegenerate => e0.clone(),
                };
                (c.hausdorff_measure(), MassKind::Cube { sigma_min: smallest_singular(c), axis })
            }
            Region::Curve(curve) => {
                let mut cumulative = vec![0.0];
                for w in curve.vertices().windows(2) {
                    let last = *cumulative.last().unwrap();
                    cumulative.push(last + space.time_sep(&w[0], &w[1]));
                }
                (*cumulative.last().unwrap(), MassKind::Curve { cumulative })
            }
            Region::Points(p) => (p.len() as f64, MassKind::Points),
        };
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::DegenerateSampler(format!(
                "{} carries total mass {total}",
                region.kind()
            )));
        }
        let m = UniformMass {
            space,
            region,
            total,
            kind,
        };
        m.check_support()?;
        Ok(m)
    }

    /// Rejection check that sampled points lie in the region.
    fn check_support(&self) -> Result<()> {
        let mut h = Halton::new(self.param_dim());
        for _ in 0..256 {
            let u = h.next_point();
            let x = self.point_at(&u);
            if !self.region.contains(&x) {
                return Err(Error::DegenerateSampler(format!("sample {:?} escapes the region", x.0)));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &MinkowskiSpace {
        &self.space
    }

    fn curve(&self) -> &PiecewiseLinearCurve {
        match &self.region {
            Region::Curve(c) => c,
            _ => unreachable!(),
        }
    }

    fn cube(&self) -> &SubspaceCube {
        match &self.region {
            Region::SubspaceCube(c) => c,
            _ => unreachable!(),
        }
    }
}

fn smallest_singular(c: &SubspaceCube) -> f64 {
    let b = c.subspace.basis();
    let k = b.len();
    let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum::<f64>());
    gram.symmetric_eigenvalues().min().max(0.0).sqrt()
}

impl MassDistribution for UniformMass {
    fn total_mass(&self) -> f64 {
        self.total
    }

    fn param_dim(&self) -> usize {
        match &self.region {
            Region::Box { lo, .. } => lo.len(),
            Region::SubspaceCube(c) => c.ranges.len(),
            Region::Curve(_) | Region::Points(_) => 1,
        }
    }

    fn point_at(&self, u: &[f64]) -> Point {
        match &self.kind {
            MassKind::Curve { cumulative } => {
                let s = u[0].clamp(0.0, 1.0) * self.total;
                let legs = cumulative.len() - 1;
                let mut i = cumulative.partition_point(|c| *c <= s).saturating_sub(1).min(legs - 1);
                while i + 1 < legs && cumulative[i + 1] - cumulative[i] == 0.0 {
                    i += 1;
                }
                let len = cumulative[i + 1] - cumulative[i];
                let f = if len > 0.0 { ((s - cumulative[i]) / len).clamp(0.0, 1.0) } else { 0.0 };
                self.curve().point_on_leg(i, f)
            }
            _ => self.region.sample_at(u),
        }
    }

    fn param_window(&self, center: &[f64], radius: f64) -> Vec<(f64, f64)> {
        let clip = |a: f64, b: f64| (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
        match (&self.region, &self.kind) {
            (Region::Box { lo, hi }, _) => (0..lo.len())
                .map(|i| {
                    let w = hi[i] - lo[i];
                    clip((center[i] - radius - lo[i]) / w, (center[i] + radius - lo[i]) / w)
                })
                .collect(),
            (Region::SubspaceCube(_), MassKind::Cube { sigma_min, .. }) => {
                let cube = self.cube();
                let (coeffs, _) = cube.subspace.coords_of(&cube.origin, center);
                let r = radius / sigma_min;
                coeffs
                    .iter()
                    .zip(&cube.ranges)
                    .map(|(c, (a, b))| {
                        let w = b - a;
                        if w == 0.0 {
                            (0.0, 1.0)
                        } else {
                            clip((c - r - a) / w, (c + r - a) / w)
                        }
                    })
                    .collect()
            }
            (Region::Curve(curve), MassKind::Curve { cumulative }) => {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for (i, w) in curve.vertices().windows(2).enumerate() {
                    let len = cumulative[i + 1] - cumulative[i];
                    if len == 0.0 {
                        continue;
                    }
                    if let Some((s0, s1)) = segment_ball(&w[0], &w[1], center, radius) {
                        lo = lo.min((cumulative[i] + s0 * len) / self.total);
                        hi = hi.max((cumulative[i] + s1 * len) / self.total);
                    }
                }
                if lo > hi {
                    vec![(0.0, 0.0)]
                } else {
                    vec![clip(lo, hi)]
                }
            }
            _ => vec![(0.0, 1.0)],
        }
    }

    fn axis_at(&self, _x: &[f64]) -> Vec<f64> {
        match &self.kind {
            MassKind::Cube { axis, .. } => axis.clone(),
            _ => {
                let mut e0 = vec![0.0; self.space.dimension()];
                e0[0] = 1.0 / self.space.cone();
                e0
            }
        }
    }

    fn region(&self) -> &Region {
        &self.region
    }
}

/// Parameter interval of the segment `a + s (b - a)`, `s` in `[0, 1]`,
/// inside the closed ball `(c, r)`.
fn segment_ball(a: &[f64], b: &[f64], c: &[f64], r: f64) -> Option<(f64, f64)> {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let f: Vec<f64> = a.iter().zip(c).map(|(x, y)| x - y).collect();
    let qa: f64 = d.iter().map(|x| x * x).sum();
    let qb: f64 = 2.0 * d.iter().zip(&f).map(|(x, y)| x * y).sum::<f64>();
    let qc: f64 = f.iter().map(|x| x * x).sum::<f64>() - r * r;
    if qa == 0.0 {
        return (qc <= 0.0).then_some((0.0, 1.0));
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let s0 = ((-qb - sq) / (2.0 * qa)).max(0.0);
    let s1 = ((-qb + sq) / (2.0 * qa)).min(1.0);
    (s0 <= s1).then_some((s0, s1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrostmanOptions {
    /// Number of sampled test diamonds.
    pub diamonds: usize,
    /// Sample points per mass estimate.
    pub budget: usize,
    /// Half heights are drawn log-uniformly from this range.
    pub scale_range: (f64, f64),
    pub seed: u64,
}

impl Default for FrostmanOptions {
    fn default() -> Self {
        FrostmanOptions {
            diamonds: 200,
            budget: 8192,
            scale_range: (0.01, 0.05),
            seed: 0xf0057,
        }
    }
}

/// Statistical lower bound on `V^N(region)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    pub constant: f64,
    pub total_mass: f64,
}

/// `sup mu(J) / rho_N(J)` over sampled small diamonds. Half the diamonds
/// are centered on the support along the distribution's axis; the rest are
/// boosted or shifted along it.
pub fn frostman_constant<M: MassDistribution>(
    space: &MinkowskiSpace,
    mass: &M,
    n: f64,
    opts: FrostmanOptions,
) -> Result<f64> {
    if !(n >= 0.0) {
        return Err(Error::Domain(format!("N must be nonnegative, got {n}")));
    }
    let (s_lo, s_hi) = opts.scale_range;
    if !(s_lo > 0.0 && s_lo <= s_hi) {
        return Err(Error::Domain("scale range must be positive and ordered".into()));
    }
    let dim = space.dimension();
    let ratios: Vec<f64> = (0..opts.diamonds)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(opts.seed, i as u64));
            let u: Vec<f64> = (0..mass.param_dim()).map(|_| rng.gen()).collect();
            let x = mass.point_at(&u);
            let mut axis = mass.axis_at(&x);
            let mut center = x.clone();
            let t = (s_lo.ln() + rng.gen::<f64>() * (s_hi / s_lo).ln()).exp();
            match i % 4 {
                0 | 1 => {}
                2 if dim > 1 => {
                    let v = rng.gen_range(-0.6..0.6);
                    let ax = rng.gen_range(1..dim);
                    let b = LorentzBoost::new(v, ax, space.cone()).expect("|v| < 1");
                    axis = b.apply_slice(&axis);
                }
                _ => {
                    let shift = rng.gen_range(-0.5..0.5) * t;
                    center = center.offset(&axis, shift);
                }
            }
            let p = center.offset(&axis, -t);
            let q = center.offset(&axis, t);
            let d = make_diamond(space, p.clone(), q.clone());
            let r = rho(n, &d);
            let mu = mass.mass_in(space, &p, &q, opts.budget, stream_seed(opts.seed ^ 0xa5a5, i as u64));
            if r > 0.0 {
                mu / r
            } else if mu > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect();
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// `mu(total) / c` with `c` the sampled Frostman constant.
pub fn lower_measure<M: MassDistribution>(
    space: &MinkowskiSpace,
    n: f64,
    mass: &M,
    opts: FrostmanOptions,
) -> Result<LowerBound> {
    let c = frostman_constant(space, mass, n, opts)?;
    if c == 0.0 {
        return Err(Error::DegenerateSampler("no sampled diamond carries mass".into()));
    }
    Ok(LowerBound {
        value: mass.total_mass() / c,
        constant: c,
        total_mass: mass.total_mass(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::LinearSubspace;

    fn spacelike(k: usize) -> (MinkowskiSpace, Region) {
        let n = k + 1;
        let basis = (1..=k)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        let sub = LinearSubspace::new(MinkowskiSpace::new(n), basis).unwrap();
        let m = *sub.ambient();
        (m, Region::SubspaceCube(SubspaceCube::centered(sub, 1.0).unwrap()))
    }

    #[test]
    fn spacelike_segment_lower_bound_is_its_length() {
        let (m, r) = spacelike(1);
        let mu = UniformMass::new(m, r).unwrap();
        let lb = lower_measure(&m, 1.0, &mu, FrostmanOptions::default()).unwrap();
        assert!((lb.value - 2.0).abs() < 0.1, "{lb:?}");
    }

    #[test]
    fn spacelike_square_constant_near_quarter_pi_ratio() {
        let (m, r) = spacelike(2);
        let mu = UniformMass::new(m, r).unwrap();
        let c = frostman_constant(&m, &mu, 2.0, FrostmanOptions::default()).unwrap();
        let expect = std::f64::consts::PI / 2.0;
        assert!(c > 0.95 * expect && c < 1.1 * expect, "{c}");
    }

    #[test]
    fn timelike_segment_recovers_length() {
        let m = MinkowskiSpace::new(2);
        let curve = PiecewiseLinearCurve::new(&m, vec![Point::from([0.0, 0.0]), Point::from([1.0, 0.0])]).unwrap();
        let mu = UniformMass::new(m, Region::Curve(curve)).unwrap();
        let lb = lower_measure(&m, 1.0, &mu, FrostmanOptions::default()).unwrap();
        assert!((lb.value - 1.0).abs() < 0.05, "{lb:?}");
    }

    #[test]
    fn null_curve_is_a_degenerate_sampler() {
        let m = MinkowskiSpace::new(2);
        let curve = PiecewiseLinearCurve::new(&m, vec![Point::from([0.0, 0.0]), Point::from([1.0, 1.0])]).unwrap();
        assert!(matches!(
            UniformMass::new(m, Region::Curve(curve)),
            Err(Error::DegenerateSampler(_))
        ));
    }

    #[test]
    fn segment_ball_interval() {
        let (a, b) = segment_ball(&[0.0, 0.0], &[4.0, 0.0], &[2.0, 0.0], 1.0).unwrap();
        assert!((a - 0.25).abs() < 1e-15 && (b - 0.75).abs() < 1e-15);
        assert!(segment_ball(&[0.0, 0.0], &[4.0, 0.0], &[2.0, 3.0], 1.0).is_none());
    }
}
