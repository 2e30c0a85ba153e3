//! Finite diamond covers and their `rho_N` cost.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::causal::{rho, rho_tau, CausalDiamond, CausalSpace, Point};
use crate::error::{Error, Result};
use crate::qmc::Halton;
use crate::spaces::Region;

/// Fraction of sampled region points that must land in the cover.
pub const COVERAGE_THRESHOLD: f64 = 0.999;

/// Translates `anchor + sum i_j steps_j` of one template diamond, with
/// `i_j` in `0..counts_j`. When `tiles` is set, the parallelepiped cells
/// spanned by `steps` around each lattice point cover the region and each
/// cell should lie in its diamond.
#[derive(Debug, Clone, PartialEq)]
pub struct DiamondLattice {
    pub anchor: Point,
    /// `p - center` of the template.
    pub lower: Vec<f64>,
    /// `q - center` of the template.
    pub upper: Vec<f64>,
    pub tau: f64,
    pub diam_bound: f64,
    pub steps: Vec<Vec<f64>>,
    pub counts: Vec<u64>,
    pub tiles: bool,
}

impl DiamondLattice {
    pub fn count(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).product()
    }

    pub fn center(&self, index: &[u64]) -> Point {
        let mut c = self.anchor.clone();
        for (i, s) in index.iter().zip(&self.steps) {
            for (x, v) in c.0.iter_mut().zip(s) {
                *x += *i as f64 * v;
            }
        }
        c
    }

    pub fn diamond_at(&self, index: &[u64]) -> CausalDiamond {
        let c = self.center(index);
        CausalDiamond {
            p: c.offset(&self.lower, 1.0),
            q: c.offset(&self.upper, 1.0),
            tau: self.tau,
            diam_bound: self.diam_bound,
            empty: false,
        }
    }

    /// Template membership of an offset from a lattice point.
    fn template_contains<S: CausalSpace + ?Sized>(&self, space: &S, offset: &[f64]) -> bool {
        space.causal(&self.lower, offset) && space.causal(offset, &self.upper)
    }

    /// Lattice coordinates of `x` (least squares in the step basis).
    fn lattice_coords(&self, x: &[f64]) -> Vec<f64> {
        let k = self.steps.len();
        let d: Vec<f64> = x.iter().zip(self.anchor.iter()).map(|(a, b)| a - b).collect();
        let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| dot(&self.steps[i], &self.steps[j]));
        let rhs = nalgebra::DVector::from_iterator(k, self.steps.iter().map(|s| dot(s, &d)));
        match gram.cholesky() {
            Some(ch) => ch.solve(&rhs).iter().cloned().collect(),
            None => vec![f64::NAN; k],
        }
    }

    fn contains<S: CausalSpace + ?Sized>(&self, space: &S, x: &[f64]) -> bool {
        let c = self.lattice_coords(x);
        if c.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let k = c.len();
        let mut idx = vec![0i64; k];
        let base: Vec<i64> = c.iter().map(|v| v.round() as i64).collect();
        let total = 3usize.pow(k as u32);
        'outer: for code in 0..total {
            let mut rem = code;
            for j in 0..k {
                idx[j] = base[j] + (rem % 3) as i64 - 1;
                rem /= 3;
                if idx[j] < 0 || idx[j] >= self.counts[j] as i64 {
                    continue 'outer;
                }
            }
            let mut off: Vec<f64> = x.iter().zip(self.anchor.iter()).map(|(a, b)| a - b).collect();
            for (i, s) in idx.iter().zip(&self.steps) {
                for (o, v) in off.iter_mut().zip(s) {
                    *o -= *i as f64 * v;
                }
            }
            if self.template_contains(space, &off) {
                return true;
            }
        }
        false
    }

    /// Whether `x` falls in a cell of the lattice (cell coordinates rounded
    /// to an in-range index).
    fn cell_in_range(&self, x: &[f64]) -> bool {
        let c = self.lattice_coords(x);
        c.iter()
            .zip(&self.counts)
            .all(|(v, &m)| *v >= -0.5 - 1e-9 && *v <= m as f64 - 0.5 + 1e-9)
    }
}

/// Lattice of thin diamonds `J(-w, w)`, `w = (l nu + t e0) / 2`, tiling a
/// cube of a null subspace. Coordinates are kept in the frame
/// `(nu, e0, e_1..e_{k-1})` so the interval of offsets is evaluated without
/// cancellation even when `t` is far below `l * 1e-16`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullLattice {
    pub anchor: Point,
    /// Euclidean-unit future null direction in the subspace.
    pub nu: Vec<f64>,
    /// Euclidean-orthonormal spacelike directions completing the subspace.
    pub spatial: Vec<Vec<f64>>,
    pub length: f64,
    pub thickness: f64,
    /// Cell side along `nu`.
    pub step_nu: f64,
    /// Cell side along each spatial direction.
    pub step_spatial: f64,
    /// Cells along `nu`, then along each spatial direction. These can
    /// exceed `u64` at small thickness.
    pub counts: Vec<u128>,
    pub tau: f64,
    pub diam_bound: f64,
}

impl NullLattice {
    pub fn count(&self) -> f64 {
        self.counts.iter().map(|&c| c as f64).product()
    }

    /// `eta(v, v)` and time component of `v = c_nu nu + c_0 e0 + sum c_j e_j`
    /// with `nu = (e0 + n) / sqrt 2`.
    fn frame_interval(c_nu: f64, c_0: f64, c_sp: &[f64]) -> (f64, f64) {
        let s2 = std::f64::consts::SQRT_2;
        let eta = -c_0 * c_0 - s2 * c_nu * c_0 + c_sp.iter().map(|v| v * v).sum::<f64>();
        let time = c_nu / s2 + c_0;
        (eta, time)
    }

    /// Membership of the frame offset `(a, b)` (coefficients along `nu` and
    /// the spatial directions) in the template diamond.
    pub fn template_contains(&self, a: f64, b: &[f64]) -> bool {
        let half_nu = 0.5 * self.length;
        let half_t = 0.5 * self.thickness;
        let minus_b: Vec<f64> = b.iter().map(|v| -v).collect();
        // q - y
        let (e1, t1) = Self::frame_interval(half_nu - a, half_t, &minus_b);
        // y - p
        let (e2, t2) = Self::frame_interval(half_nu + a, half_t, b);
        e1 <= 0.0 && t1 >= 0.0 && e2 <= 0.0 && t2 >= 0.0
    }

    fn frame_coords(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let d: Vec<f64> = x.iter().zip(self.anchor.iter()).map(|(a, b)| a - b).collect();
        (dot(&d, &self.nu), self.spatial.iter().map(|e| dot(&d, e)).collect())
    }

    fn cell_in_range(&self, x: &[f64]) -> bool {
        let (a, b) = self.frame_coords(x);
        let in_axis = |v: f64, step: f64, m: u128| {
            let c = v / step;
            c >= -0.5 - 1e-9 && c <= m as f64 - 0.5 + 1e-9
        };
        in_axis(a, self.step_nu, self.counts[0])
            && b.iter().zip(&self.counts[1..]).all(|(v, &m)| in_axis(*v, self.step_spatial, m))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoverPiece {
    Single(CausalDiamond),
    Lattice(DiamondLattice),
    Null(NullLattice),
}

impl CoverPiece {
    /// Number of diamonds, as a float since null lattices can be huge.
    pub fn count(&self) -> f64 {
        match self {
            CoverPiece::Single(d) => f64::from(u8::from(!d.empty)),
            CoverPiece::Lattice(l) => l.count() as f64,
            CoverPiece::Null(l) => l.count(),
        }
    }

    pub fn max_diameter(&self) -> f64 {
        match self {
            CoverPiece::Single(d) => d.diam_bound,
            CoverPiece::Lattice(l) => l.diam_bound,
            CoverPiece::Null(l) => l.diam_bound,
        }
    }

    fn cost(&self, n: f64) -> f64 {
        match self {
            CoverPiece::Single(d) => rho(n, d),
            CoverPiece::Lattice(l) => l.count() as f64 * rho_tau(n, l.tau),
            CoverPiece::Null(l) => l.count() * rho_tau(n, l.tau),
        }
    }
}

/// Outcome of the sampled coverage check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coverage {
    pub samples: usize,
    pub covered: usize,
}

impl Coverage {
    pub fn fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.covered as f64 / self.samples as f64
        }
    }

    pub fn passed(&self) -> bool {
        self.fraction() >= COVERAGE_THRESHOLD
    }
}

/// A finite cover of a region by closed diamonds of diameter at most
/// `scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    pub generator: String,
    pub scale: f64,
    pub pieces: Vec<CoverPiece>,
    pub coverage: Option<Coverage>,
}

impl Cover {
    pub fn new(generator: impl Into<String>, scale: f64, pieces: Vec<CoverPiece>) -> Self {
        Cover {
            generator: generator.into(),
            scale,
            pieces,
            coverage: None,
        }
    }

    pub fn len(&self) -> f64 {
        self.pieces.iter().map(|p| p.count()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0.0
    }

    pub fn max_diameter(&self) -> f64 {
        self.pieces.iter().map(|p| p.max_diameter()).fold(0.0, f64::max)
    }

    pub fn is_verified(&self) -> bool {
        self.coverage.map(|c| c.passed()).unwrap_or(false)
    }

    /// Explicit diamonds. Panics on covers with more than `limit` members.
    pub fn diamonds(&self, limit: usize) -> Vec<CausalDiamond> {
        assert!(self.len() <= limit as f64, "cover too large to expand");
        let mut out = Vec::new();
        for piece in &self.pieces {
            match piece {
                CoverPiece::Single(d) => {
                    if !d.empty {
                        out.push(d.clone())
                    }
                }
                CoverPiece::Lattice(l) => {
                    for_each_index(&l.counts, |idx| out.push(l.diamond_at(idx)));
                }
                CoverPiece::Null(l) => {
                    let counts: Vec<u64> = l.counts.iter().map(|&c| c as u64).collect();
                    for_each_index(&counts, |idx| {
                        let mut c = l.anchor.offset(&l.nu, idx[0] as f64 * l.step_nu);
                        for (j, e) in l.spatial.iter().enumerate() {
                            c = c.offset(e, idx[j + 1] as f64 * l.step_spatial);
                        }
                        let mut w = vec![0.0; c.dim()];
                        for (i, wi) in w.iter_mut().enumerate() {
                            *wi = 0.5 * l.length * l.nu[i];
                        }
                        w[0] += 0.5 * l.thickness;
                        out.push(CausalDiamond {
                            p: c.offset(&w, -1.0),
                            q: c.offset(&w, 1.0),
                            tau: l.tau,
                            diam_bound: l.diam_bound,
                            empty: false,
                        });
                    });
                }
            }
        }
        out
    }

    /// Sampled coverage check against `region`. Covers consisting of one
    /// tiling lattice are checked cell-locally: each sample must fall in an
    /// in-range cell, and an independent offset inside a cell must lie in
    /// the template diamond. Everything else is checked by direct
    /// membership of sampled region points.
    pub fn verify<S: CausalSpace + ?Sized>(
        &mut self,
        space: &S,
        region: &Region,
        samples: usize,
        seed: u64,
    ) -> Coverage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pd = region.param_dim();
        let mut region_seq = Halton::shifted(pd, &mut rng);
        let mut u = vec![0.0; pd];
        let mut covered = 0;

        let tiled = match self.pieces.as_slice() {
            [CoverPiece::Lattice(l)] if l.tiles && space.translation_invariant() => Some(0),
            [CoverPiece::Null(_)] => Some(1),
            _ => None,
        };

        match tiled {
            Some(kind) => {
                let k = match &self.pieces[0] {
                    CoverPiece::Lattice(l) => l.steps.len(),
                    CoverPiece::Null(l) => l.counts.len(),
                    CoverPiece::Single(_) => unreachable!(),
                };
                let mut cell_seq = Halton::shifted(k, &mut rng);
                let mut v = vec![0.0; k];
                for _ in 0..samples {
                    region_seq.next_into(&mut u);
                    cell_seq.next_into(&mut v);
                    let x = region.sample_at(&u);
                    let ok = match (&self.pieces[0], kind) {
                        (CoverPiece::Lattice(l), 0) => {
                            let mut off = vec![0.0; x.dim()];
                            for (vj, s) in v.iter().zip(&l.steps) {
                                for (o, si) in off.iter_mut().zip(s) {
                                    *o += (vj - 0.5) * si;
                                }
                            }
                            l.cell_in_range(&x) && l.template_contains(space, &off)
                        }
                        (CoverPiece::Null(l), _) => {
                            let a = (v[0] - 0.5) * l.step_nu;
                            let b: Vec<f64> = v[1..].iter().map(|vj| (vj - 0.5) * l.step_spatial).collect();
                            l.cell_in_range(&x) && l.template_contains(a, &b)
                        }
                        _ => false,
                    };
                    covered += usize::from(ok);
                }
            }
            None => {
                let index = SingleIndex::new(&self.pieces);
                for _ in 0..samples {
                    region_seq.next_into(&mut u);
                    let x = region.sample_at(&u);
                    let hit = index.contains(space, &x)
                        || self.pieces.iter().any(|p| match p {
                            CoverPiece::Lattice(l) => l.contains(space, &x),
                            CoverPiece::Null(l) => {
                                let (a, b) = l.frame_coords(&x);
                                let ia = (a / l.step_nu).round();
                                let ib: Vec<f64> = b.iter().map(|bj| (bj / l.step_spatial).round()).collect();
                                l.cell_in_range(&x)
                                    && l.template_contains(
                                        a - ia * l.step_nu,
                                        &b.iter().zip(&ib).map(|(bj, i)| bj - i * l.step_spatial).collect::<Vec<_>>(),
                                    )
                            }
                            CoverPiece::Single(_) => false,
                        });
                    covered += usize::from(hit);
                }
            }
        }
        let c = Coverage { samples, covered };
        self.coverage = Some(c);
        c
    }

    /// `sum_i rho_N(J_i)`. Refuses covers that have not passed
    /// verification.
    pub fn cost(&self, n: f64) -> Result<f64> {
        if !(n >= 0.0) {
            return Err(Error::Domain(format!("N must be nonnegative, got {n}")));
        }
        match self.coverage {
            Some(c) if c.passed() => Ok(self.raw_cost(n)),
            Some(c) => Err(Error::UnverifiedCover { fraction: c.fraction() }),
            None => Err(Error::UnverifiedCover { fraction: 0.0 }),
        }
    }

    /// Cost without the verification gate.
    pub fn raw_cost(&self, n: f64) -> f64 {
        self.pieces.iter().map(|p| p.cost(n)).sum()
    }

    /// Union of two covers at the larger scale. Coverage must be rechecked.
    pub fn union(&self, other: &Cover) -> Cover {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Cover::new(
            format!("{}+{}", self.generator, other.generator),
            self.scale.max(other.scale),
            pieces,
        )
    }

    /// Image under the coordinate dilation `x -> a x` of a Minkowski space.
    pub fn dilate(&self, a: f64) -> Cover {
        let sc = |p: &Point| Point(p.iter().map(|v| v * a).collect());
        let sv = |v: &[f64]| v.iter().map(|x| x * a).collect::<Vec<_>>();
        let pieces = self
            .pieces
            .iter()
            .map(|piece| match piece {
                CoverPiece::Single(d) => CoverPiece::Single(CausalDiamond {
                    p: sc(&d.p),
                    q: sc(&d.q),
                    tau: d.tau * a,
                    diam_bound: d.diam_bound * a,
                    empty: d.empty,
                }),
                CoverPiece::Lattice(l) => CoverPiece::Lattice(DiamondLattice {
                    anchor: sc(&l.anchor),
                    lower: sv(&l.lower),
                    upper: sv(&l.upper),
                    tau: l.tau * a,
                    diam_bound: l.diam_bound * a,
                    steps: l.steps.iter().map(|s| sv(s)).collect(),
                    counts: l.counts.clone(),
                    tiles: l.tiles,
                }),
                CoverPiece::Null(l) => CoverPiece::Null(NullLattice {
                    anchor: sc(&l.anchor),
                    length: l.length * a,
                    thickness: l.thickness * a,
                    step_nu: l.step_nu * a,
                    step_spatial: l.step_spatial * a,
                    tau: l.tau * a,
                    diam_bound: l.diam_bound * a,
                    ..l.clone()
                }),
            })
            .collect();
        Cover {
            generator: self.generator.clone(),
            scale: self.scale * a,
            pieces,
            coverage: self.coverage,
        }
    }
}

fn for_each_index(counts: &[u64], mut f: impl FnMut(&[u64])) {
    let k = counts.len();
    if counts.iter().any(|&c| c == 0) {
        return;
    }
    let mut idx = vec![0u64; k];
    loop {
        f(&idx);
        let mut j = 0;
        loop {
            if j == k {
                return;
            }
            idx[j] += 1;
            if idx[j] < counts[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Single diamonds sorted by the lower end of a time window that contains
/// them.
struct SingleIndex<'a> {
    entries: Vec<(f64, f64, &'a CausalDiamond)>,
    max_width: f64,
}

impl<'a> SingleIndex<'a> {
    fn new(pieces: &'a [CoverPiece]) -> Self {
        let mut entries: Vec<(f64, f64, &CausalDiamond)> = pieces
            .iter()
            .filter_map(|p| match p {
                CoverPiece::Single(d) if !d.empty => {
                    let lo = d.p[0].min(d.q[0]) - 1e-12;
                    let hi = d.p[0].max(d.q[0]) + 1e-12;
                    Some((lo, hi, d))
                }
                _ => None,
            })
            .collect();
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let max_width = entries.iter().map(|e| e.1 - e.0).fold(0.0, f64::max);
        SingleIndex { entries, max_width }
    }

    fn contains<S: CausalSpace + ?Sized>(&self, space: &S, x: &[f64]) -> bool {
        let t = x[0];
        let start = self.entries.partition_point(|e| e.0 < t - self.max_width);
        self.entries[start..]
            .iter()
            .take_while(|e| e.0 <= t)
            .any(|e| e.1 >= t && e.2.contains(space, x))
    }
}
