use crate::causal::CausalSpace;
use crate::error::{Error, Result};

/// Relative tolerance on the interval used by the causal tests. Pairs whose
/// interval is within this fraction of `|q - p|^2 + |q - p| * max|coord|`
/// of the light cone count as null; the second term absorbs rounding in
/// the coordinates themselves.
pub const NULL_TOLERANCE: f64 = 1e-12;

/// Minkowski space `R^n_1` with the cone-scaled metric
/// `eta_C = -C^2 dt^2 + sum dx_i^2`. Time is coordinate 0 and increases to
/// the future.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinkowskiSpace {
    n: usize,
    c: f64,
}

impl MinkowskiSpace {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        MinkowskiSpace { n, c: 1.0 }
    }

    pub fn with_cone(n: usize, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!("cone scale must be positive, got {c}")));
        }
        Ok(MinkowskiSpace { n, c })
    }

    pub fn cone(&self) -> f64 {
        self.c
    }

    /// `eta_C(u, v)`
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = -self.c * self.c * u[0] * v[0];
        for i in 1..self.n {
            s += u[i] * v[i];
        }
        s
    }

    /// `eta_C(v, v)`
    pub fn interval(&self, v: &[f64]) -> f64 {
        self.inner(v, v)
    }

    fn split(&self, p: &[f64], q: &[f64]) -> (f64, f64, f64) {
        debug_assert_eq!(p.len(), self.n);
        debug_assert_eq!(q.len(), self.n);
        let dt = q[0] - p[0];
        let mut dx2 = 0.0;
        for i in 1..self.n {
            let d = q[i] - p[i];
            dx2 += d * d;
        }
        let ct2 = self.c * self.c * dt * dt;
        (dt, ct2, dx2)
    }

    /// Tolerance scale for the pair: squared extent plus extent times the
    /// coordinate magnitude.
    fn slack(&self, p: &[f64], q: &[f64], ct2: f64, dx2: f64) -> f64 {
        let ext2 = ct2 + dx2;
        let mag = p.iter().chain(q).fold(0.0f64, |m, v| m.max(v.abs())) * self.c.max(1.0);
        NULL_TOLERANCE * (ext2 + ext2.sqrt() * mag)
    }

    /// `tau` of a displacement vector, zero unless future timelike.
    pub fn tau_of(&self, v: &[f64]) -> f64 {
        let zero = vec![0.0; self.n];
        self.time_sep(&zero, v)
    }

    /// Euclidean diameter of `J(p, q)` for causal `p <= q`.
    ///
    /// The diamond is convex, so its diameter is attained on `{p, q}` and
    /// the rim sphere where the two cones meet. With half-extent
    /// `a = C dt / 2` (time in `C`-scaled units) and half spatial
    /// displacement `b`, the three candidates are
    /// `|q - p|`, the rim diameter `2 sqrt(a^2 + b^2 / C^2)` and the
    /// apex-to-rim distance `(a + b) sqrt(1 + 1/C^2)`.
    pub fn diamond_diameter(&self, p: &[f64], q: &[f64]) -> f64 {
        let (dt, _, dx2) = self.split(p, q);
        if self.n == 1 {
            return dt.abs();
        }
        let c = self.c;
        let a = 0.5 * c * dt;
        let b = 0.5 * dx2.sqrt();
        let chord = (dt * dt + dx2).sqrt();
        let rim = 2.0 * (a * a + b * b / (c * c)).sqrt();
        let apex = (a + b) * (1.0 + 1.0 / (c * c)).sqrt();
        chord.max(rim).max(apex)
    }

    /// Quasi-Monte Carlo Lebesgue volume of `J(p, q)` from `samples` shifted
    /// Halton points in its bounding box. Returns `(volume, standard error)`
    /// with the error taken from the spread of 16 independent shifts.
    pub fn diamond_volume_mc(&self, p: &[f64], q: &[f64], samples: usize, seed: u64) -> (f64, f64) {
        use rand::SeedableRng;
        use rayon::prelude::*;
        const SHARDS: usize = 16;
        if !self.causal(p, q) || samples == 0 {
            return (0.0, 0.0);
        }
        let n = self.n;
        let dt = q[0] - p[0];
        let mut lo = vec![p[0]];
        let mut hi = vec![q[0]];
        for k in 1..n {
            let c = 0.5 * (p[k] + q[k]);
            lo.push(c - 0.5 * self.c * dt);
            hi.push(c + 0.5 * self.c * dt);
        }
        let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let per = samples.div_ceil(SHARDS);
        let hits: Vec<f64> = (0..SHARDS)
            .into_par_iter()
            .map(|s| {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(crate::measure::stream_seed(seed, s as u64));
                let mut h = crate::qmc::Halton::shifted(n, &mut rng);
                let mut u = vec![0.0; n];
                let mut x = vec![0.0; n];
                let mut count = 0usize;
                for _ in 0..per {
                    h.next_into(&mut u);
                    for k in 0..n {
                        x[k] = lo[k] + (hi[k] - lo[k]) * u[k];
                    }
                    if self.causal(p, &x) && self.causal(&x, q) {
                        count += 1;
                    }
                }
                count as f64 / per as f64
            })
            .collect();
        let mean = hits.iter().sum::<f64>() / SHARDS as f64;
        let var = hits.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / (SHARDS - 1) as f64;
        (mean * box_vol, (var / SHARDS as f64).sqrt() * box_vol)
    }
}

impl CausalSpace for MinkowskiSpace {
    fn dimension(&self) -> usize {
        self.n
    }

    fn causal(&self, p: &[f64], q: &[f64]) -> bool {
        let (dt, ct2, dx2) = self.split(p, q);
        let slack = self.slack(p, q, ct2, dx2);
        dt >= -NULL_TOLERANCE * (ct2 + dx2).sqrt() && ct2 - dx2 >= -slack
    }

    fn chron(&self, p: &[f64], q: &[f64]) -> bool {
        let (dt, ct2, dx2) = self.split(p, q);
        dt > 0.0 && ct2 - dx2 > self.slack(p, q, ct2, dx2)
    }

    fn time_sep(&self, p: &[f64], q: &[f64]) -> f64 {
        let (dt, ct2, dx2) = self.split(p, q);
        if dt > 0.0 && ct2 - dx2 > self.slack(p, q, ct2, dx2) {
            (ct2 - dx2).sqrt()
        } else {
            0.0
        }
    }

    fn diameter_bound(&self, p: &[f64], q: &[f64]) -> f64 {
        self.diamond_diameter(p, q)
    }

    fn translation_invariant(&self) -> bool {
        true
    }
}
