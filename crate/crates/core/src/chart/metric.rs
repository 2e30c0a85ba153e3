//! Built-in continuous metric fields on a coordinate box.

use crate::error::{Error, Result};

/// Named metric fields. Every built-in is diagonal,
/// `g = diag(-alpha(x), beta_1(x), ..., beta_{n-1}(x))`.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricField {
    /// `-c^2 dt^2 + |dx|^2`.
    Minkowski { cone: f64 },
    /// `-(1 + a|x|) dt^2 + |dx|^2`, Lipschitz but not smooth at `x = 0`.
    ConformalBump { a: f64 },
    /// `-dt^2 + sum s_i^2 dx_i^2`.
    AnisotropicStretch { stretch: Vec<f64> },
    /// `a^2 eta`.
    Scaled { a: f64 },
}

impl MetricField {
    pub fn name(&self) -> &'static str {
        match self {
            MetricField::Minkowski { .. } => "minkowski",
            MetricField::ConformalBump { .. } => "conformal-bump",
            MetricField::AnisotropicStretch { .. } => "anisotropic-stretch",
            MetricField::Scaled { .. } => "scaled",
        }
    }
}

fn spatial_norm(x: &[f64]) -> f64 {
    x[1..].iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Smallest and largest `|x|` (spatial part) over a box.
fn spatial_norm_range(lo: &[f64], hi: &[f64]) -> (f64, f64) {
    let mut near = 0.0;
    let mut far = 0.0;
    for i in 1..lo.len() {
        let n = if lo[i] > 0.0 {
            lo[i]
        } else if hi[i] < 0.0 {
            -hi[i]
        } else {
            0.0
        };
        let f = lo[i].abs().max(hi[i].abs());
        near += n * n;
        far += f * f;
    }
    (near.sqrt(), far.sqrt())
}

/// Range of a coefficient over a box, with signature-relevant extremes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

/// A metric field on the chart box `[lo, hi]`, time first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartMetric {
    field: MetricField,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

/// Points per axis for sampled checks.
pub const SAMPLE_RES: usize = 9;

impl ChartMetric {
    pub fn new(field: MetricField, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let n = lo.len();
        if n < 2 || hi.len() != n {
            return Err(Error::Domain("chart box needs matching bounds in dimension >= 2".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Domain(format!("empty or unbounded chart box {lo:?}..{hi:?}")));
        }
        match &field {
            MetricField::Minkowski { cone } if !(*cone > 0.0) => {
                return Err(Error::InvalidMetric(format!("cone scale must be positive, got {cone}")))
            }
            MetricField::AnisotropicStretch { stretch } if stretch.len() != n - 1 => {
                return Err(Error::Domain(format!(
                    "stretch needs {} factors, got {}",
                    n - 1,
                    stretch.len()
                )))
            }
            MetricField::AnisotropicStretch { stretch } if stretch.iter().any(|s| *s == 0.0 || !s.is_finite()) => {
                return Err(Error::InvalidMetric("stretch factors must be nonzero".into()))
            }
            MetricField::Scaled { a } if *a == 0.0 || !a.is_finite() => {
                return Err(Error::InvalidMetric("scale factor must be nonzero".into()))
            }
            _ => {}
        }
        let m = ChartMetric { field, lo, hi };
        m.check_signature(&m.lo, &m.hi)?;
        Ok(m)
    }

    pub fn minkowski(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        ChartMetric::new(MetricField::Minkowski { cone: 1.0 }, lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn field(&self) -> &MetricField {
        &self.field
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// Another field on the same box.
    pub fn with_field(&self, field: MetricField) -> Result<Self> {
        ChartMetric::new(field, self.lo.clone(), self.hi.clone())
    }

    pub fn alpha(&self, x: &[f64]) -> f64 {
        match &self.field {
            MetricField::Minkowski { cone } => cone * cone,
            MetricField::ConformalBump { a } => 1.0 + a * spatial_norm(x),
            MetricField::AnisotropicStretch { .. } => 1.0,
            MetricField::Scaled { a } => a * a,
        }
    }

    pub fn beta(&self, _x: &[f64], i: usize) -> f64 {
        match &self.field {
            MetricField::Minkowski { .. } | MetricField::ConformalBump { .. } => 1.0,
            MetricField::AnisotropicStretch { stretch } => stretch[i - 1] * stretch[i - 1],
            MetricField::Scaled { a } => a * a,
        }
    }

    /// `g_x(v, v)`.
    pub fn quad(&self, x: &[f64], v: &[f64]) -> f64 {
        let mut s = -self.alpha(x) * v[0] * v[0];
        for i in 1..v.len() {
            s += self.beta(x, i) * v[i] * v[i];
        }
        s
    }

    /// Full tensor at `x`, row-major.
    pub fn tensor(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut g = vec![0.0; n * n];
        g[0] = -self.alpha(x);
        for i in 1..n {
            g[i * n + i] = self.beta(x, i);
        }
        g
    }

    pub fn sqrt_det(&self, x: &[f64]) -> f64 {
        let mut d = self.alpha(x);
        for i in 1..self.dim() {
            d *= self.beta(x, i);
        }
        d.abs().sqrt()
    }

    /// Future null speed `|dx/dt|` in the Euclidean unit spatial direction
    /// `w`.
    pub fn null_speed(&self, x: &[f64], w: &[f64]) -> f64 {
        let mut b = 0.0;
        for (i, wi) in w.iter().enumerate() {
            b += self.beta(x, i + 1) * wi * wi;
        }
        (self.alpha(x) / b).sqrt()
    }

    /// Range of `alpha` over a sub-box.
    pub fn alpha_range(&self, lo: &[f64], hi: &[f64]) -> Range {
        match &self.field {
            MetricField::ConformalBump { a } => {
                let (near, far) = spatial_norm_range(lo, hi);
                let (u, v) = (1.0 + a * near, 1.0 + a * far);
                Range {
                    min: u.min(v),
                    max: u.max(v),
                }
            }
            _ => {
                let v = self.alpha(lo);
                Range { min: v, max: v }
            }
        }
    }

    /// Range of the spatial coefficients over a sub-box.
    pub fn beta_range(&self, lo: &[f64], _hi: &[f64]) -> Range {
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 1..self.dim() {
            let b = self.beta(lo, i);
            min = min.min(b);
            max = max.max(b);
        }
        Range { min, max }
    }

    /// Null speeds over a sub-box.
    pub fn speed_range(&self, lo: &[f64], hi: &[f64]) -> Range {
        let a = self.alpha_range(lo, hi);
        let b = self.beta_range(lo, hi);
        Range {
            min: (a.min / b.max).sqrt(),
            max: (a.max / b.min).sqrt(),
        }
    }

    /// `[k_det, K_det]` for `|det g|` over a sub-box.
    pub fn det_bounds(&self, lo: &[f64], hi: &[f64]) -> Range {
        let a = self.alpha_range(lo, hi);
        let mut prod = 1.0;
        for i in 1..self.dim() {
            prod *= self.beta(lo, i);
        }
        Range {
            min: a.min * prod,
            max: a.max * prod,
        }
    }

    /// Sup of the entrywise deviation `|g - eta|` over a sub-box.
    pub fn deviation(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let a = self.alpha_range(lo, hi);
        let b = self.beta_range(lo, hi);
        [a.min - 1.0, a.max - 1.0, b.min - 1.0, b.max - 1.0]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest entry change between neighbouring sample points divided by
    /// their distance.
    pub fn continuity_modulus(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for_each_sample(&self.lo, &self.hi, SAMPLE_RES, |x| {
            let g = self.tensor(x);
            for k in 0..n {
                let step = (self.hi[k] - self.lo[k]) / (SAMPLE_RES - 1) as f64;
                let mut y = x.to_vec();
                y[k] += step;
                if y[k] > self.hi[k] + 1e-12 {
                    continue;
                }
                let h = self.tensor(&y);
                let d = g.iter().zip(&h).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                worst = worst.max(d / step);
            }
        });
        worst
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *v >= a - 1e-12 && *v <= b + 1e-12)
    }

    fn check_signature(&self, lo: &[f64], hi: &[f64]) -> Result<()> {
        let mut bad = None;
        for_each_sample(lo, hi, SAMPLE_RES, |x| {
            if bad.is_some() {
                return;
            }
            let ok = self.alpha(x) > 0.0 && (1..self.dim()).all(|i| self.beta(x, i) > 0.0);
            if !ok {
                bad = Some(x.to_vec());
            }
        });
        match bad {
            Some(x) => Err(Error::InvalidMetric(format!("metric is not Lorentzian at {x:?}"))),
            None => Ok(()),
        }
    }
}

/// Visit the `res^n` tensor grid over `[lo, hi]`, corners included.
pub(crate) fn for_each_sample<F: FnMut(&[f64])>(lo: &[f64], hi: &[f64], res: usize, mut f: F) {
    let n = lo.len();
    let res = res.max(2);
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    loop {
        for k in 0..n {
            x[k] = lo[k] + (hi[k] - lo[k]) * idx[k] as f64 / (res - 1) as f64;
        }
        f(&x);
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < res {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return;
        }
    }
}

/// Outcome of the sampled check `eta_{1/C} < g < eta_C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSandwich {
    pub c: f64,
    pub verified: bool,
    pub resolution: usize,
    /// `min(u - 1/C, C - u)` over sampled points and directions, where `u`
    /// is the null speed of `g`.
    pub margin: f64,
}

fn directions(d: usize, resolution: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..d {
        for s in [-1.0, 1.0] {
            let mut w = vec![0.0; d];
            w[i] = s;
            out.push(w);
        }
    }
    if d == 2 {
        for k in 0..resolution {
            let a = std::f64::consts::TAU * (k as f64 + 0.5) / resolution as f64;
            out.push(vec![a.cos(), a.sin()]);
        }
    } else if d > 2 {
        let mut h = crate::qmc::Halton::new(d);
        let mut z = vec![0.0; d];
        for _ in 0..resolution * d {
            h.next_into(&mut z);
            let w: Vec<f64> = z.iter().map(|u| 2.0 * u - 1.0).collect();
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-6 {
                out.push(w.iter().map(|v| v / norm).collect());
            }
        }
    }
    out
}

/// Check both cone inclusions on a `resolution^n` grid over `[lo, hi]`.
pub fn verify_cone_sandwich(metric: &ChartMetric, lo: &[f64], hi: &[f64], c: f64, resolution: usize) -> Result<ConeSandwich> {
    if !(c > 1.0) {
        return Err(Error::Domain(format!("sandwich needs C > 1, got {c}")));
    }
    if lo.len() != metric.dim() || hi.len() != metric.dim() {
        return Err(Error::Domain("region dimension does not match the chart".into()));
    }
    metric.check_signature(lo, hi)?;
    let dirs = directions(metric.dim() - 1, resolution.max(4));
    let mut margin = f64::INFINITY;
    for_each_sample(lo, hi, resolution, |x| {
        for w in &dirs {
            let u = metric.null_speed(x, w);
            margin = margin.min(u - 1.0 / c).min(c - u);
        }
    });
    Ok(ConeSandwich {
        c,
        verified: margin > 0.0,
        resolution,
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump() -> ChartMetric {
        ChartMetric::new(MetricField::ConformalBump { a: 0.2 }, vec![0.0, -1.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn minkowski_sandwich() {
        let m = ChartMetric::minkowski(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        let s = verify_cone_sandwich(&m, m.lo(), m.hi(), 1.1, 9).unwrap();
        assert!(s.verified);
        assert!((s.margin - (1.0 - 1.0 / 1.1)).abs() < 1e-12);
    }

    #[test]
    fn bump_sandwich_depends_on_c() {
        let m = bump();
        assert!(verify_cone_sandwich(&m, m.lo(), m.hi(), 1.5, 9).unwrap().verified);
        let tight = verify_cone_sandwich(&m, m.lo(), m.hi(), 1.01, 9).unwrap();
        assert!(!tight.verified);
        assert!(tight.margin < 0.0);
    }

    #[test]
    fn bad_signature_rejected() {
        let r = ChartMetric::new(MetricField::ConformalBump { a: -2.0 }, vec![0.0, -1.0], vec![1.0, 1.0]);
        assert!(matches!(r, Err(Error::InvalidMetric(_))));
    }

    #[test]
    fn ranges_are_exact() {
        let m = bump();
        let a = m.alpha_range(&[0.0, 0.25], &[1.0, 0.5]);
        assert!((a.min - 1.05).abs() < 1e-15 && (a.max - 1.1).abs() < 1e-15);
        let a = m.alpha_range(&[0.0, -0.5], &[1.0, 0.25]);
        assert_eq!(a.min, 1.0);
        assert!((m.deviation(m.lo(), m.hi()) - 0.2).abs() < 1e-15);
        let d = m.det_bounds(m.lo(), m.hi());
        assert_eq!(d.min, 1.0);
        assert!((d.max - 1.2).abs() < 1e-15);
    }

    #[test]
    fn stretch_speeds() {
        let m = ChartMetric::new(
            MetricField::AnisotropicStretch { stretch: vec![2.0, 0.5] },
            vec![0.0; 3],
            vec![1.0; 3],
        )
        .unwrap();
        assert!((m.null_speed(&[0.0; 3], &[1.0, 0.0]) - 0.5).abs() < 1e-15);
        let s = m.speed_range(m.lo(), m.hi());
        assert_eq!((s.min, s.max), (0.5, 2.0));
        assert!((m.sqrt_det(&[0.5; 3]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn modulus_of_bump() {
        let k = bump().continuity_modulus();
        assert!((k - 0.2).abs() < 1e-12, "{k}");
    }
}
