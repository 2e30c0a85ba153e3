//! Cylindrical neighbourhoods, enlarged diamonds and the doubling checks
//! built on them.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graph::{diamond_box, diamond_volume, dp_time_separation_in, weighted_volume, DiamondGraphs, DpOptions};
use super::metric::ChartMetric;
use crate::causal::{rho_tau, Point};
use crate::error::{Error, Result};
use crate::measure::stream_seed;

/// `lambda = 3C^2 + 2`.
pub fn lambda_for(c: f64) -> f64 {
    3.0 * c * c + 2.0
}

fn on_axis(p: &[f64], q: &[f64]) -> bool {
    p.len() == q.len() && p[1..] == q[1..]
}

/// `(t - lambda(s - t), x)` and `(s + lambda(s - t), x)` for on-axis
/// `p = (t, x)`, `q = (s, x)` with `t < s`.
pub fn enlarge_diamond(p: &Point, q: &Point, lambda: f64) -> Result<(Point, Point)> {
    if !on_axis(p, q) {
        return Err(Error::Domain("enlargement needs an on-axis pair".into()));
    }
    let h = q[0] - p[0];
    if !(h > 0.0) {
        return Err(Error::Domain("enlargement needs t < s".into()));
    }
    let mut ph = p.clone();
    let mut qh = q.clone();
    ph.0[0] = p[0] - lambda * h;
    qh.0[0] = q[0] + lambda * h;
    Ok((ph, qh))
}

/// `W = (w_lo_0, w_hi_0) x Z` with the inner set `W' = (a, b) x V`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylindricalNeighborhood {
    pub w_lo: Vec<f64>,
    pub w_hi: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub v_lo: Vec<f64>,
    pub v_hi: Vec<f64>,
    pub c: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enlargement {
    pub p_hat: Point,
    pub q_hat: Point,
    /// Both enlarged points lie in `W`.
    pub inside: bool,
}

impl CylindricalNeighborhood {
    /// `V` is given by its spatial bounds; `lambda = 3C^2 + 2`.
    pub fn new(w_lo: Vec<f64>, w_hi: Vec<f64>, a: f64, b: f64, v_lo: Vec<f64>, v_hi: Vec<f64>, c: f64) -> Result<Self> {
        if !(c >= 1.0) {
            return Err(Error::Domain(format!("cone constant must be at least 1, got {c}")));
        }
        let n = CylindricalNeighborhood {
            w_lo,
            w_hi,
            a,
            b,
            v_lo,
            v_hi,
            c,
            lambda: lambda_for(c),
        };
        n.validate()?;
        Ok(n)
    }

    /// Override `lambda` (at least 5).
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(lambda >= 5.0) {
            return Err(Error::Domain(format!("lambda must be at least 5, got {lambda}")));
        }
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.w_lo.len()
    }

    /// Time extent `B` of `W`.
    pub fn height(&self) -> f64 {
        self.w_hi[0] - self.w_lo[0]
    }

    fn validate(&self) -> Result<()> {
        let n = self.w_lo.len();
        if n < 2 || self.w_hi.len() != n || self.v_lo.len() != n - 1 || self.v_hi.len() != n - 1 {
            return Err(Error::Domain("neighbourhood bounds have inconsistent dimensions".into()));
        }
        if self.w_lo.iter().zip(&self.w_hi).any(|(x, y)| !(x < y)) {
            return Err(Error::Domain("W is empty".into()));
        }
        if !(self.a < self.b) || self.a < self.w_lo[0] || self.b > self.w_hi[0] {
            return Err(Error::Domain(format!("time window ({}, {}) does not sit inside W", self.a, self.b)));
        }
        for k in 0..n - 1 {
            if !(self.v_lo[k] <= self.v_hi[k]) || self.v_lo[k] < self.w_lo[k + 1] || self.v_hi[k] > self.w_hi[k + 1] {
                return Err(Error::Domain("V does not sit inside Z".into()));
            }
        }
        let width = self.b - self.a;
        if !(width < self.height() / (4.0 * self.lambda)) {
            return Err(Error::Domain(format!(
                "b - a = {width} must be below B/(4 lambda) = {}",
                self.height() / (4.0 * self.lambda)
            )));
        }
        if self.a - self.lambda * width < self.w_lo[0] || self.b + self.lambda * width > self.w_hi[0] {
            return Err(Error::Domain("enlarged pairs from W' would leave W".into()));
        }
        Ok(())
    }

    pub fn in_w(&self, x: &[f64]) -> bool {
        x[0] > self.w_lo[0] && x[0] < self.w_hi[0] && (1..x.len()).all(|k| x[k] >= self.w_lo[k] && x[k] <= self.w_hi[k])
    }

    pub fn in_inner(&self, x: &[f64]) -> bool {
        x[0] > self.a && x[0] < self.b && (1..x.len()).all(|k| x[k] >= self.v_lo[k - 1] && x[k] <= self.v_hi[k - 1])
    }

    pub fn enlarge(&self, p: &Point, q: &Point) -> Result<Enlargement> {
        let (p_hat, q_hat) = enlarge_diamond(p, q, self.lambda)?;
        let inside = self.in_w(&p_hat) && self.in_w(&q_hat);
        Ok(Enlargement { p_hat, q_hat, inside })
    }

    /// `(K_det / k_det) (2 lambda + 1)^n C^(2(n - 1))` with the determinant
    /// bounds of `metric` on `W`.
    pub fn analytic_doubling(&self, metric: &ChartMetric) -> f64 {
        let n = self.dim() as f64;
        let d = metric.det_bounds(&self.w_lo, &self.w_hi);
        d.max / d.min * (2.0 * self.lambda + 1.0).powf(n) * self.c.powf(2.0 * (n - 1.0))
    }
}

/// `log(L) / log(1 + 2 lambda)`.
pub fn dimension_bound_from_doubling(l: f64, lambda: f64) -> Result<f64> {
    if !(l >= 1.0) || !(lambda >= 5.0) {
        return Err(Error::Domain(format!("need L >= 1 and lambda >= 5, got L = {l}, lambda = {lambda}")));
    }
    Ok(l.ln() / (1.0 + 2.0 * lambda).ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingOptions {
    pub pairs: usize,
    pub budget: usize,
    pub dp: DpOptions,
    pub seed: u64,
}

impl Default for DoublingOptions {
    fn default() -> Self {
        DoublingOptions {
            pairs: 8,
            budget: 1_000_000,
            dp: DpOptions::default(),
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingSample {
    pub p: Point,
    pub q: Point,
    pub small: f64,
    pub large: f64,
    pub ratio: f64,
    /// Standard error of `ratio` from the shard spread.
    pub ratio_se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingReport {
    pub l_empirical: f64,
    pub l_analytic: f64,
    pub samples: Vec<DoublingSample>,
    /// `l_empirical <= l_analytic` up to three standard errors.
    pub within_bound: bool,
}

impl DoublingReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "s", "x", "vol_small", "vol_large", "ratio", "ratio_se"])?;
        for s in &self.samples {
            let x: Vec<String> = s.p[1..].iter().map(|v| format!("{v:.16e}")).collect();
            out.write_record([
                format!("{:.16e}", s.p[0]),
                format!("{:.16e}", s.q[0]),
                x.join(" "),
                format!("{:.16e}", s.small),
                format!("{:.16e}", s.large),
                format!("{:.16e}", s.ratio),
                format!("{:.16e}", s.ratio_se),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn volume_in_w(metric: &ChartMetric, nbhd: &CylindricalNeighborhood, p: &Point, q: &Point, budget: usize, seed: u64, dp: DpOptions) -> Result<(f64, f64)> {
    diamond_volume(metric, &nbhd.w_lo, &nbhd.w_hi, p, q, budget, seed, dp)
}

/// Largest sampled `vol^g(J(p^, q^, W)) / vol^g(J(p, q))` over on-axis
/// pairs in `W'`.
pub fn doubling_constant(metric: &ChartMetric, nbhd: &CylindricalNeighborhood, opts: DoublingOptions) -> Result<DoublingReport> {
    if metric.dim() != nbhd.dim() {
        return Err(Error::Domain("neighbourhood and chart dimensions differ".into()));
    }
    if opts.pairs == 0 {
        return Err(Error::Domain("need at least one pair".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut samples = Vec::with_capacity(opts.pairs);
    for i in 0..opts.pairs {
        let width = nbhd.b - nbhd.a;
        let h = width * rng.gen_range(0.25..0.95);
        let t = nbhd.a + (width - h) * rng.gen_range(0.02..0.98);
        let mut x = vec![t];
        for k in 0..nbhd.v_lo.len() {
            let (lo, hi) = (nbhd.v_lo[k], nbhd.v_hi[k]);
            x.push(if hi > lo { rng.gen_range(lo..=hi) } else { lo });
        }
        let p = Point::new(x.clone());
        x[0] = t + h;
        let q = Point::new(x);
        let e = nbhd.enlarge(&p, &q)?;
        let (small, se_s) = volume_in_w(metric, nbhd, &p, &q, opts.budget, stream_seed(opts.seed, 2 * i as u64), opts.dp)?;
        if !(small > 0.0) {
            return Err(Error::Resolution(format!(
                "diamond of height {h} has zero sampled volume; raise the budget or the layer count"
            )));
        }
        let (large, se_l) = volume_in_w(metric, nbhd, &e.p_hat, &e.q_hat, opts.budget, stream_seed(opts.seed, 2 * i as u64 + 1), opts.dp)?;
        let ratio = large / small;
        let ratio_se = ratio * ((se_s / small).powi(2) + (se_l / large).powi(2)).sqrt();
        samples.push(DoublingSample {
            p,
            q,
            small,
            large,
            ratio,
            ratio_se,
        });
    }
    let top = samples
        .iter()
        .max_by(|a, b| a.ratio.partial_cmp(&b.ratio).unwrap())
        .expect("nonempty");
    let l_empirical = top.ratio;
    let l_analytic = nbhd.analytic_doubling(metric);
    Ok(DoublingReport {
        within_bound: l_empirical <= l_analytic + 3.0 * top.ratio_se,
        l_empirical,
        l_analytic,
        samples,
    })
}

/// A comparison `m(J(p, q)) / m(J(p0, q0))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioPair {
    pub p: Point,
    pub q: Point,
    pub p0: Point,
    pub q0: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub measure_ratio: f64,
    pub tau_ratio: f64,
    /// `(1/K) (tau / tau0)^kappa`.
    pub bound: f64,
    pub margin: f64,
    pub holds: bool,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub kappa: f64,
    pub k: f64,
    pub rows: Vec<RatioRow>,
}

impl RatioReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.skipped.is_some() || r.holds)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["measure_ratio", "tau_ratio", "bound", "margin", "holds", "skipped"])?;
        for r in &self.rows {
            out.write_record([
                format!("{:.16e}", r.measure_ratio),
                format!("{:.16e}", r.tau_ratio),
                format!("{:.16e}", r.bound),
                format!("{:.16e}", r.margin),
                r.holds.to_string(),
                r.skipped.clone().unwrap_or_default(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn ratio_hypotheses(pair: &RatioPair, nbhd: &CylindricalNeighborhood, tilde: (f64, f64)) -> Option<String> {
    let (at, bt) = tilde;
    let RatioPair { p, q, p0, q0 } = pair;
    if !on_axis(p, q) || !on_axis(p0, q0) {
        return Some("pairs must be on-axis".into());
    }
    let in_tilde = |x: &Point| x[0] > at && x[0] < bt && (1..x.dim()).all(|k| x[k] >= nbhd.v_lo[k - 1] && x[k] <= nbhd.v_hi[k - 1]);
    if ![p, q, p0, q0].iter().all(|x| in_tilde(x)) {
        return Some("points leave the inner window".into());
    }
    let h0 = q0[0] - p0[0];
    let spread = 1.0 + 2.0 * nbhd.lambda;
    if !(h0 > 0.0 && h0 < 2.0 * (bt - at) / spread) {
        return Some(format!("reference height {h0} outside (0, 2(b - a)/(1 + 2 lambda))"));
    }
    if !(q[0] > p[0]) {
        return Some("pair is not future directed".into());
    }
    let sum = p[0] + q[0];
    let lo = 2.0 * at + h0 * spread / 2.0;
    let hi = 2.0 * bt - h0 * spread / 2.0;
    if !(sum > lo && sum < hi) {
        return Some(format!("s + t = {sum} outside ({lo}, {hi})"));
    }
    None
}

fn diamonds_overlap(metric: &ChartMetric, nbhd: &CylindricalNeighborhood, pair: &RatioPair, dp: DpOptions) -> Result<bool> {
    let RatioPair { p, q, p0, q0 } = pair;
    if p[1..] == p0[1..] {
        return Ok(p[0] <= q0[0] && p0[0] <= q[0]);
    }
    let a = DiamondGraphs::new(metric, &nbhd.w_lo, &nbhd.w_hi, p, q, dp)?;
    let b = DiamondGraphs::new(metric, &nbhd.w_lo, &nbhd.w_hi, p0, q0, dp)?;
    let speed = metric.speed_range(&nbhd.w_lo, &nbhd.w_hi).max;
    let (l1, h1) = diamond_box(p, q, speed, &nbhd.w_lo, &nbhd.w_hi);
    let (l2, h2) = diamond_box(p0, q0, speed, &nbhd.w_lo, &nbhd.w_hi);
    let lo: Vec<f64> = l1.iter().zip(&l2).map(|(x, y)| x.max(*y)).collect();
    let hi: Vec<f64> = h1.iter().zip(&h2).map(|(x, y)| x.min(*y)).collect();
    if lo.iter().zip(&hi).any(|(x, y)| x > y) {
        return Ok(false);
    }
    let (v, _) = weighted_volume(metric, &lo, &hi, 4096, 1, |x| a.contains(x) && b.contains(x));
    Ok(v > 0.0)
}

/// Check `m(J)/m(J0) >= (1/K) (tau/tau0)^kappa` with `kappa =
/// log_{1+2 lambda} L` and `K = ((1 + 2 lambda)/2)^kappa`, skipping pairs
/// that violate the overlap or height hypotheses. `tilde` is the time window
/// `(a~, b~)` of the larger inner set.
pub fn measure_ratio_check(
    metric: &ChartMetric,
    nbhd: &CylindricalNeighborhood,
    tilde: (f64, f64),
    pairs: &[RatioPair],
    l: f64,
    budget: usize,
    seed: u64,
    dp: DpOptions,
) -> Result<RatioReport> {
    let kappa = dimension_bound_from_doubling(l, nbhd.lambda)?;
    let k = ((1.0 + 2.0 * nbhd.lambda) / 2.0).powf(kappa);
    let mut rows = Vec::with_capacity(pairs.len());
    for (i, pair) in pairs.iter().enumerate() {
        let mut skipped = ratio_hypotheses(pair, nbhd, tilde);
        if skipped.is_none() && !diamonds_overlap(metric, nbhd, pair, dp)? {
            skipped = Some("diamonds do not overlap".into());
        }
        if let Some(reason) = skipped {
            rows.push(RatioRow {
                measure_ratio: f64::NAN,
                tau_ratio: f64::NAN,
                bound: f64::NAN,
                margin: f64::NAN,
                holds: false,
                skipped: Some(reason),
            });
            continue;
        }
        let RatioPair { p, q, p0, q0 } = pair;
        let (m, se) = volume_in_w(metric, nbhd, p, q, budget, stream_seed(seed, 2 * i as u64), dp)?;
        let (m0, se0) = volume_in_w(metric, nbhd, p0, q0, budget, stream_seed(seed, 2 * i as u64 + 1), dp)?;
        if !(m0 > 0.0) {
            return Err(Error::Resolution("reference diamond has zero sampled volume".into()));
        }
        let tau = dp_time_separation_in(metric, &nbhd.w_lo, &nbhd.w_hi, p, q, Some(nbhd.c), dp)?.lo;
        let tau0 = dp_time_separation_in(metric, &nbhd.w_lo, &nbhd.w_hi, p0, q0, Some(nbhd.c), dp)?.lo;
        let measure_ratio = m / m0;
        let tau_ratio = tau / tau0;
        let bound = tau_ratio.powf(kappa) / k;
        let se_ratio = measure_ratio * ((se / m.max(f64::MIN_POSITIVE)).powi(2) + (se0 / m0).powi(2)).sqrt();
        rows.push(RatioRow {
            measure_ratio,
            tau_ratio,
            bound,
            margin: measure_ratio - bound,
            holds: measure_ratio + 3.0 * se_ratio >= bound,
            skipped: None,
        });
    }
    Ok(RatioReport { kappa, k, rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRow {
    pub height: f64,
    pub tau: f64,
    pub volume: f64,
    pub volume_se: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub rows: Vec<DensityRow>,
    /// `|ratio - 1|` at the smallest diamond.
    pub final_deviation: f64,
    /// The final deviation does not exceed the first one beyond three
    /// standard errors.
    pub converging: bool,
}

impl DensityReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["height", "tau", "volume", "volume_se", "ratio"])?;
        for r in &self.rows {
            out.write_record([r.height, r.tau, r.volume, r.volume_se, r.ratio].map(|v| format!("{v:.16e}")))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `vol^g(J(p, q)) / rho_n(J(p, q))` for on-axis pairs centred at `x0`
/// with heights `h0, h0/2, ...`, `halvings + 1` in all.
pub fn volume_density_check(
    metric: &ChartMetric,
    x0: &Point,
    h0: f64,
    halvings: usize,
    budget: usize,
    seed: u64,
    dp: DpOptions,
) -> Result<DensityReport> {
    if x0.dim() != metric.dim() || !(h0 > 0.0) {
        return Err(Error::Domain("density check needs a chart point and positive height".into()));
    }
    let n = metric.dim() as f64;
    let mut rows = Vec::with_capacity(halvings + 1);
    let mut h = h0;
    for i in 0..=halvings {
        let mut p = x0.clone();
        let mut q = x0.clone();
        p.0[0] -= 0.5 * h;
        q.0[0] += 0.5 * h;
        if !metric.contains(&p) || !metric.contains(&q) {
            return Err(Error::Domain(format!("pair at height {h} leaves the chart")));
        }
        let tau = dp_time_separation_in(metric, metric.lo(), metric.hi(), &p, &q, None, dp)?.lo;
        let (volume, volume_se) = diamond_volume(metric, metric.lo(), metric.hi(), &p, &q, budget, stream_seed(seed, i as u64), dp)?;
        rows.push(DensityRow {
            height: h,
            tau,
            volume,
            volume_se,
            ratio: volume / rho_tau(n, tau),
        });
        h *= 0.5;
    }
    let first = rows[0];
    let last = rows[rows.len() - 1];
    let final_deviation = (last.ratio - 1.0).abs();
    let se_first = first.volume_se / rho_tau(n, first.tau);
    let se_last = last.volume_se / rho_tau(n, last.tau);
    Ok(DensityReport {
        converging: final_deviation <= (first.ratio - 1.0).abs() + 3.0 * (se_first + se_last),
        final_deviation,
        rows,
    })
}
