//! Longest-path surrogate for the time separation of a chart metric, and
//! causal membership decided on the same graph.

use rayon::prelude::*;

use super::metric::ChartMetric;
use crate::causal::Point;
use crate::error::{Error, Result};

/// Grid and stencil parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpOptions {
    /// Time layers between the anchor and the far endpoint.
    pub layers: usize,
    /// Edge stencil radius in time layers (at least 3).
    pub stencil: usize,
    /// Spatial pitch as a multiple of the time pitch. Defaults to the
    /// smallest null speed on the region, so lattice diagonals stay causal.
    pub pitch: Option<f64>,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions {
            layers: 64,
            stencil: 3,
            pitch: None,
        }
    }
}

/// Longest-path table grown from an anchor, forwards or backwards in time,
/// inside the box `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct CausalGraph<'m> {
    metric: &'m ChartMetric,
    lo: Vec<f64>,
    hi: Vec<f64>,
    anchor: Point,
    dir: f64,
    h_t: f64,
    h_x: f64,
    layers: usize,
    stencil: usize,
    speed: f64,
    jlo: Vec<i64>,
    width: Vec<usize>,
    layer_size: usize,
    values: Vec<f64>,
}

impl<'m> CausalGraph<'m> {
    /// `span` is the time extent covered by `layers` layers; `pitch` is the
    /// spatial to temporal pitch ratio.
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        metric: &'m ChartMetric,
        lo: &[f64],
        hi: &[f64],
        anchor: Point,
        forward: bool,
        span: f64,
        layers: usize,
        stencil: usize,
        pitch: f64,
    ) -> Result<Self> {
        let n = metric.dim();
        if anchor.dim() != n || lo.len() != n || hi.len() != n {
            return Err(Error::Domain("graph dimensions do not match the chart".into()));
        }
        if stencil < 3 {
            return Err(Error::Domain(format!("stencil radius must be at least 3, got {stencil}")));
        }
        if layers == 0 || !(span > 0.0) || !(pitch > 0.0) {
            return Err(Error::Domain("graph needs positive span, pitch and layer count".into()));
        }
        let inside = |x: &[f64]| x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *v >= a - 1e-12 && *v <= b + 1e-12);
        if !inside(&anchor) {
            return Err(Error::Domain(format!("anchor {:?} lies outside the region", anchor.0)));
        }
        let dir = if forward { 1.0 } else { -1.0 };
        let h_t = span / layers as f64;
        let h_x = pitch * h_t;
        // keep layers inside the time range of the region
        let room = if forward { hi[0] - anchor[0] } else { anchor[0] - lo[0] };
        let layers = layers.min(((room / h_t) + 1e-9).floor().max(0.0) as usize);
        let speed = metric.speed_range(lo, hi).max * (1.0 + 1e-9);
        let reach = (speed * layers as f64 * h_t / h_x).ceil() as i64;
        let mut jlo = Vec::with_capacity(n - 1);
        let mut width = Vec::with_capacity(n - 1);
        for k in 1..n {
            let a = ((lo[k] - anchor[k]) / h_x - 1e-9).ceil() as i64;
            let b = ((hi[k] - anchor[k]) / h_x + 1e-9).floor() as i64;
            let a = a.max(-reach);
            let b = b.min(reach);
            jlo.push(a);
            width.push((b - a + 1).max(1) as usize);
        }
        let layer_size: usize = width.iter().product();
        let mut g = CausalGraph {
            metric,
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            anchor,
            dir,
            h_t,
            h_x,
            layers,
            stencil,
            speed,
            jlo,
            width,
            layer_size,
            values: vec![f64::NEG_INFINITY; (layers + 1) * layer_size],
        };
        g.relax();
        Ok(g)
    }

    fn spatial_index(&self, j: &[i64]) -> Option<usize> {
        let mut idx = 0;
        let mut stride = 1;
        for k in 0..j.len() {
            let o = j[k] - self.jlo[k];
            if o < 0 || o as usize >= self.width[k] {
                return None;
            }
            idx += o as usize * stride;
            stride *= self.width[k];
        }
        Some(idx)
    }

    fn spatial_coords(&self, mut idx: usize, out: &mut [i64]) {
        for k in 0..out.len() {
            out[k] = self.jlo[k] + (idx % self.width[k]) as i64;
            idx /= self.width[k];
        }
    }

    /// Node position for layer `i` and lattice offsets `j` (possibly
    /// fractional, for midpoints).
    fn position(&self, i: f64, j: &[f64], out: &mut [f64]) {
        out[0] = self.anchor[0] + self.dir * i * self.h_t;
        for k in 0..j.len() {
            out[k + 1] = self.anchor[k + 1] + j[k] * self.h_x;
        }
    }

    fn stencil_offsets(&self) -> Vec<(usize, Vec<i64>, f64)> {
        let d = self.jlo.len();
        let s = (self.stencil as f64 * self.speed * self.h_t / self.h_x).ceil() as i64;
        let mut out = Vec::new();
        for di in 1..=self.stencil {
            let mut dj = vec![-s; d];
            loop {
                let dx2: f64 = dj.iter().map(|v| (*v as f64 * self.h_x).powi(2)).sum();
                let dt = di as f64 * self.h_t;
                if dx2.sqrt() <= self.speed * dt {
                    out.push((di, dj.clone(), dt));
                }
                let mut k = 0;
                while k < d {
                    dj[k] += 1;
                    if dj[k] <= s {
                        break;
                    }
                    dj[k] = -s;
                    k += 1;
                }
                if k == d {
                    break;
                }
            }
        }
        out
    }

    fn relax(&mut self) {
        let n = self.metric.dim();
        let d = n - 1;
        let zero = vec![0i64; d];
        let Some(start) = self.spatial_index(&zero) else {
            return;
        };
        self.values[start] = 0.0;
        let offsets = self.stencil_offsets();
        let mut j = vec![0i64; d];
        let mut t = vec![0i64; d];
        let mut mid_j = vec![0.0; d];
        let mut mid = vec![0.0; n];
        let mut v = vec![0.0; n];
        for i in 0..self.layers {
            for s in 0..self.layer_size {
                let base = self.values[i * self.layer_size + s];
                if base == f64::NEG_INFINITY {
                    continue;
                }
                self.spatial_coords(s, &mut j);
                for (di, dj, dt) in &offsets {
                    if i + di > self.layers {
                        break;
                    }
                    for k in 0..d {
                        t[k] = j[k] + dj[k];
                    }
                    let Some(ts) = self.spatial_index(&t) else {
                        continue;
                    };
                    for k in 0..d {
                        mid_j[k] = j[k] as f64 + 0.5 * dj[k] as f64;
                        v[k + 1] = dj[k] as f64 * self.h_x;
                    }
                    v[0] = *dt;
                    self.position(i as f64 + 0.5 * *di as f64, &mid_j, &mut mid);
                    let q = self.metric.quad(&mid, &v);
                    if q > 0.0 {
                        continue;
                    }
                    let target = (i + di) * self.layer_size + ts;
                    let w = base + (-q).sqrt();
                    if w > self.values[target] {
                        self.values[target] = w;
                    }
                }
            }
        }
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn time_pitch(&self) -> f64 {
        self.h_t
    }

    pub fn spatial_pitch(&self) -> f64 {
        self.h_x
    }

    /// Table entry at layer `i`, lattice offsets `j`; `-inf` if unreachable
    /// or off the grid.
    pub fn node_value(&self, i: usize, j: &[i64]) -> f64 {
        if i > self.layers {
            return f64::NEG_INFINITY;
        }
        match self.spatial_index(j) {
            Some(s) => self.values[i * self.layer_size + s],
            None => f64::NEG_INFINITY,
        }
    }

    /// Reachable nodes as `(layer, offsets, value)`.
    pub fn reachable(&self) -> Vec<(usize, Vec<i64>, f64)> {
        let d = self.jlo.len();
        let mut out = Vec::new();
        let mut j = vec![0i64; d];
        for (idx, v) in self.values.iter().enumerate() {
            if *v > f64::NEG_INFINITY {
                self.spatial_coords(idx % self.layer_size, &mut j);
                out.push((idx / self.layer_size, j.clone(), *v));
            }
        }
        out
    }

    /// Longest value over final chords from reachable nodes in the last
    /// `stencil + 1` layers before `x`, or `-inf`. With `first_hit` the
    /// search stops at the first admissible chord.
    fn final_chord(&self, x: &[f64], first_hit: bool) -> f64 {
        let n = self.metric.dim();
        let d = n - 1;
        if !x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *v >= a - 1e-12 && *v <= b + 1e-12) {
            return f64::NEG_INFINITY;
        }
        let s = self.dir * (x[0] - self.anchor[0]) / self.h_t;
        if s < -1e-9 {
            return f64::NEG_INFINITY;
        }
        let top = ((s + 1e-9).floor() as usize).min(self.layers);
        let bottom = top.saturating_sub(self.stencil + 1);
        let mut best = f64::NEG_INFINITY;
        let mut y = vec![0.0; n];
        let mut w = vec![0.0; n];
        let mut mid = vec![0.0; n];
        let mut jf = vec![0.0; d];
        let mut j = vec![0i64; d];
        let mut jmin = vec![0i64; d];
        let mut jmax = vec![0i64; d];
        for i in (bottom..=top).rev() {
            let dt = (s - i as f64).max(0.0) * self.h_t;
            let r = self.speed * dt;
            for k in 0..d {
                let c = (x[k + 1] - self.anchor[k + 1]) / self.h_x;
                jmin[k] = ((c - r / self.h_x) - 1e-9).ceil() as i64;
                jmax[k] = ((c + r / self.h_x) + 1e-9).floor() as i64;
                if jmin[k] > jmax[k] {
                    jmin[k] = jmax[k] + 1;
                }
            }
            if jmin.iter().zip(&jmax).any(|(a, b)| a > b) {
                continue;
            }
            j.copy_from_slice(&jmin);
            loop {
                let val = self.node_value(i, &j);
                if val > f64::NEG_INFINITY {
                    for k in 0..d {
                        jf[k] = j[k] as f64;
                    }
                    self.position(i as f64, &jf, &mut y);
                    for k in 0..n {
                        w[k] = self.dir * (x[k] - y[k]);
                        mid[k] = 0.5 * (x[k] + y[k]);
                    }
                    let q = self.metric.quad(&mid, &w);
                    if w[0] >= 0.0 && q <= 0.0 {
                        let cand = val + (-q).sqrt();
                        if cand > best {
                            best = cand;
                            if first_hit {
                                return best;
                            }
                        }
                    }
                }
                let mut k = 0;
                while k < d {
                    j[k] += 1;
                    if j[k] <= jmax[k] {
                        break;
                    }
                    j[k] = jmin[k];
                    k += 1;
                }
                if k == d {
                    break;
                }
            }
        }
        best
    }

    /// `x` in the causal future (or past, for a backward graph) of the
    /// anchor within the region.
    pub fn reaches(&self, x: &[f64]) -> bool {
        self.final_chord(x, true) > f64::NEG_INFINITY
    }

    /// Longest-path value from the anchor to `x`, `-inf` if unreachable.
    pub fn value_to(&self, x: &[f64]) -> f64 {
        self.final_chord(x, false)
    }
}

/// Numerical time separation with certified outer bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpInterval {
    pub lo: f64,
    pub hi: f64,
    /// `q` was reached in the graph.
    pub connected: bool,
    /// `|lo - lo at half the layers|`.
    pub quadrature_error: f64,
}

/// Bounding box of `J(p, q)` for null speeds at most `speed`, clipped to
/// `[lo, hi]`.
pub fn diamond_box(p: &[f64], q: &[f64], speed: f64, lo: &[f64], hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let dt = q[0] - p[0];
    let mut a = vec![p[0].max(lo[0])];
    let mut b = vec![q[0].min(hi[0])];
    for k in 1..p.len() {
        let c = 0.5 * (p[k] + q[k]);
        a.push((c - 0.5 * speed * dt).max(lo[k]));
        b.push((c + 0.5 * speed * dt).min(hi[k]));
    }
    (a, b)
}

/// Pitch ratio used by default for the pair `(p, q)` in `[lo, hi]`.
pub fn default_pitch(metric: &ChartMetric, p: &[f64], q: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let outer = metric.speed_range(lo, hi).max;
    let (a, b) = diamond_box(p, q, outer, lo, hi);
    metric.speed_range(&a, &b).min * (1.0 - 1e-9)
}

fn dp_lower(metric: &ChartMetric, p: &Point, q: &Point, lo: &[f64], hi: &[f64], layers: usize, stencil: usize, pitch: f64) -> Result<f64> {
    let g = CausalGraph::build(metric, lo, hi, p.clone(), true, q[0] - p[0], layers, stencil, pitch)?;
    Ok(g.value_to(q))
}

/// Upper bound on `tau_g(p, q)` from the coefficient ranges on the box of
/// `J(p, q)`: a causal curve with average velocity `u` has length at most
/// `dt sqrt(alpha_max - beta_min |u|^2)` by concavity. On-axis pairs also
/// use the factor `sqrt((1 + C^2) delta + 2C^2 - 1)`, `delta = sup |g - eta|`.
pub fn tau_upper(metric: &ChartMetric, p: &[f64], q: &[f64], lo: &[f64], hi: &[f64], c: Option<f64>) -> f64 {
    let dt = q[0] - p[0];
    if !(dt > 0.0) {
        return 0.0;
    }
    let outer = metric.speed_range(lo, hi).max;
    let (a, b) = diamond_box(p, q, outer, lo, hi);
    let alpha = metric.alpha_range(&a, &b).max;
    let beta = metric.beta_range(&a, &b).min;
    let dx2: f64 = (1..p.len()).map(|k| (q[k] - p[k]).powi(2)).sum();
    let mut hi_val = (alpha - beta * dx2 / (dt * dt)).max(0.0).sqrt() * dt;
    if let (Some(c), true) = (c, dx2 == 0.0) {
        let delta = metric.deviation(&a, &b);
        hi_val = hi_val.min(((1.0 + c * c) * delta + 2.0 * c * c - 1.0).sqrt() * dt);
    }
    hi_val
}

/// `[lo, hi]` around `tau_g(p, q)` within the region `[lo, hi]` of the
/// chart. `c` is a verified sandwich constant, used for the on-axis bound.
pub fn dp_time_separation(
    metric: &ChartMetric,
    p: &Point,
    q: &Point,
    c: Option<f64>,
    opts: DpOptions,
) -> Result<DpInterval> {
    dp_time_separation_in(metric, metric.lo(), metric.hi(), p, q, c, opts)
}

pub fn dp_time_separation_in(
    metric: &ChartMetric,
    lo: &[f64],
    hi: &[f64],
    p: &Point,
    q: &Point,
    c: Option<f64>,
    opts: DpOptions,
) -> Result<DpInterval> {
    if p.dim() != metric.dim() || q.dim() != metric.dim() {
        return Err(Error::Domain("point dimension does not match the chart".into()));
    }
    let zero = DpInterval {
        lo: 0.0,
        hi: 0.0,
        connected: false,
        quadrature_error: 0.0,
    };
    if p.0 == q.0 {
        return Ok(DpInterval { connected: true, ..zero });
    }
    let dt = q[0] - p[0];
    // outside every eta_C cone: not causal for any admissible metric
    let speed = c.unwrap_or(metric.speed_range(lo, hi).max);
    let dx = (1..p.dim()).map(|k| (q[k] - p[k]).powi(2)).sum::<f64>().sqrt();
    if !(dt > 0.0) || dx > speed * dt {
        return Ok(zero);
    }
    let pitch = opts.pitch.unwrap_or_else(|| default_pitch(metric, p, q, lo, hi));
    let fine = dp_lower(metric, p, q, lo, hi, opts.layers, opts.stencil, pitch)?;
    let upper = tau_upper(metric, p, q, lo, hi, c);
    if fine == f64::NEG_INFINITY {
        return Ok(DpInterval {
            lo: 0.0,
            hi: upper,
            connected: false,
            quadrature_error: 0.0,
        });
    }
    let coarse = dp_lower(metric, p, q, lo, hi, (opts.layers / 2).max(1), opts.stencil, pitch)?;
    let err = if coarse == f64::NEG_INFINITY { fine } else { (fine - coarse).abs() };
    Ok(DpInterval {
        lo: fine,
        hi: upper.max(fine),
        connected: true,
        quadrature_error: err,
    })
}

/// Both graphs for `J(p, q)` inside `[lo, hi]`.
pub struct DiamondGraphs<'m> {
    pub future: CausalGraph<'m>,
    pub past: CausalGraph<'m>,
}

impl<'m> DiamondGraphs<'m> {
    pub fn new(metric: &'m ChartMetric, lo: &[f64], hi: &[f64], p: &Point, q: &Point, opts: DpOptions) -> Result<Self> {
        let dt = q[0] - p[0];
        if !(dt > 0.0) {
            return Err(Error::Domain("diamond needs q later than p".into()));
        }
        let pitch = opts.pitch.unwrap_or_else(|| default_pitch(metric, p, q, lo, hi));
        Ok(DiamondGraphs {
            future: CausalGraph::build(metric, lo, hi, p.clone(), true, dt, opts.layers, opts.stencil, pitch)?,
            past: CausalGraph::build(metric, lo, hi, q.clone(), false, dt, opts.layers, opts.stencil, pitch)?,
        })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.future.reaches(x) && self.past.reaches(x)
    }
}

/// Quasi-Monte Carlo `vol^g(J(p, q))` inside `[lo, hi]`, with `sqrt|det g|`
/// weights. Returns `(volume, standard error)`.
#[allow(clippy::too_many_arguments)]
pub fn diamond_volume(
    metric: &ChartMetric,
    lo: &[f64],
    hi: &[f64],
    p: &Point,
    q: &Point,
    budget: usize,
    seed: u64,
    opts: DpOptions,
) -> Result<(f64, f64)> {
    let graphs = DiamondGraphs::new(metric, lo, hi, p, q, opts)?;
    let outer = metric.speed_range(lo, hi).max;
    let (a, b) = diamond_box(p, q, outer, lo, hi);
    Ok(weighted_volume(metric, &a, &b, budget, seed, |x| graphs.contains(x)))
}

/// `int_box 1_A sqrt|det g|` by shifted Halton shards.
pub(crate) fn weighted_volume<F: Fn(&[f64]) -> bool + Sync>(
    metric: &ChartMetric,
    a: &[f64],
    b: &[f64],
    budget: usize,
    seed: u64,
    member: F,
) -> (f64, f64) {
    use rand::SeedableRng;
    const SHARDS: usize = 16;
    let n = a.len();
    let box_vol: f64 = a.iter().zip(b).map(|(x, y)| (y - x).max(0.0)).product();
    if box_vol == 0.0 || budget == 0 {
        return (0.0, 0.0);
    }
    let per = budget.div_ceil(SHARDS);
    let shard_means: Vec<f64> = (0..SHARDS)
        .into_par_iter()
        .map(|s| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(crate::measure::stream_seed(seed, s as u64));
            let mut h = crate::qmc::Halton::shifted(n, &mut rng);
            let mut u = vec![0.0; n];
            let mut x = vec![0.0; n];
            let mut acc = 0.0;
            for _ in 0..per {
                h.next_into(&mut u);
                for k in 0..n {
                    x[k] = a[k] + (b[k] - a[k]) * u[k];
                }
                if member(&x) {
                    acc += metric.sqrt_det(&x);
                }
            }
            acc / per as f64
        })
        .collect();
    let mean = shard_means.iter().sum::<f64>() / SHARDS as f64;
    let var = shard_means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (SHARDS - 1) as f64;
    (mean * box_vol, (var / SHARDS as f64).sqrt() * box_vol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::MetricField;

    fn flat() -> ChartMetric {
        ChartMetric::minkowski(vec![-1.0, -2.0], vec![2.0, 2.0]).unwrap()
    }

    #[test]
    fn flat_on_axis_is_exact() {
        let m = flat();
        let r = dp_time_separation(&m, &Point::from([0.0, 0.0]), &Point::from([1.0, 0.0]), Some(1.1), DpOptions::default()).unwrap();
        assert!((r.lo - 1.0).abs() < 1e-12, "{r:?}");
        assert!(r.hi >= r.lo && r.connected);
    }

    #[test]
    fn flat_off_axis_close() {
        let m = flat();
        let r = dp_time_separation(&m, &Point::from([0.0, 0.0]), &Point::from([1.0, 0.3]), Some(1.1), DpOptions::default()).unwrap();
        let exact = (1.0f64 - 0.09).sqrt();
        assert!(r.lo <= exact + 1e-12 && exact - r.lo < 1e-2, "{r:?}");
        assert!((r.hi - exact).abs() < 1e-12);
    }

    #[test]
    fn spacelike_pair_is_zero() {
        let m = flat();
        let r = dp_time_separation(&m, &Point::from([0.0, 0.0]), &Point::from([0.1, 1.0]), Some(1.1), DpOptions::default()).unwrap();
        assert_eq!((r.lo, r.hi, r.connected), (0.0, 0.0, false));
    }

    #[test]
    fn bump_on_axis_within_factors() {
        let m = ChartMetric::new(MetricField::ConformalBump { a: 0.2 }, vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        let p = Point::from([0.2, 0.5]);
        let q = Point::from([0.4, 0.5]);
        let r = dp_time_separation(&m, &p, &q, Some(1.5), DpOptions::default()).unwrap();
        let h = 0.2;
        assert!(r.lo >= 1.1f64.sqrt() * h - 1e-12, "{r:?}");
        assert!(r.hi <= (1.2f64).sqrt() * h + 1e-12);
        assert!(r.lo <= r.hi);
    }

    #[test]
    fn flat_diamond_volume() {
        let m = flat();
        let p = Point::from([0.0, 0.0]);
        let q = Point::from([1.0, 0.0]);
        let (v, se) = diamond_volume(&m, m.lo(), m.hi(), &p, &q, 40_000, 7, DpOptions::default()).unwrap();
        assert!((v - 0.5).abs() < 0.01 && se < 0.01, "{v} {se}");
    }

    #[test]
    fn superadditivity_on_table() {
        let m = flat();
        let p = Point::from([0.0, 0.0]);
        let f = CausalGraph::build(&m, m.lo(), m.hi(), p, true, 1.0, 16, 3, 1.0 - 1e-9).unwrap();
        let end = f.node_value(16, &[0]);
        for (i, j, v) in f.reachable() {
            if i <= 16 {
                assert!(v <= end + 1e-12);
            }
            let _ = j;
        }
        assert!((end - 1.0).abs() < 1e-12);
    }
}
