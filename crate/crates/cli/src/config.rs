//! Experiment configuration: JSON, `version` 1, unknown fields rejected.

use std::fmt;
use std::path::PathBuf;

use lorentz_measure::causal::{CausalSpace, Point};
use lorentz_measure::chart::{ChartMetric, MetricField};
use lorentz_measure::measure::Generator;
use lorentz_measure::spaces::{LinearSubspace, MinkowskiSpace, PiecewiseLinearCurve, Region, SubspaceCube};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CONFIG_VERSION: u32 = 1;

/// A config problem, tied to the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.reason)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub dim: usize,
    #[serde(default = "one")]
    pub cone: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegionSpec {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    SubspaceCube { basis: Vec<Vec<f64>>, origin: Vec<f64>, ranges: Vec<(f64, f64)> },
    Curve { vertices: Vec<Vec<f64>> },
    Points { points: Vec<Vec<f64>> },
}

/// `start, start*factor, ...`, `count` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleGrid {
    pub start: f64,
    pub factor: f64,
    pub count: usize,
}

impl ScaleGrid {
    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.start * self.factor.powi(i as i32)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Grid,
    Box,
    Tiling,
    Null { eps: f64 },
    NullFamily,
    CurveChain,
    Points,
}

impl GeneratorSpec {
    pub fn to_generator(&self) -> Generator {
        match self {
            GeneratorSpec::Grid => Generator::Grid,
            GeneratorSpec::Box => Generator::Box,
            GeneratorSpec::Tiling => Generator::Tiling,
            GeneratorSpec::Null { eps } => Generator::Null { eps: *eps },
            GeneratorSpec::NullFamily => Generator::null_family(),
            GeneratorSpec::CurveChain => Generator::CurveChain,
            GeneratorSpec::Points => Generator::Points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    /// Quasi-random samples per coverage check.
    pub verify_samples: usize,
    pub frostman_diamonds: usize,
    pub frostman_samples: usize,
    /// Samples per chart volume estimate.
    pub volume_samples: usize,
    pub dp_layers: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            verify_samples: 4096,
            frostman_diamonds: 200,
            frostman_samples: 8192,
            volume_samples: 200_000,
            dp_layers: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum MetricSpec {
    Minkowski { cone: f64 },
    ConformalBump { a: f64 },
    AnisotropicStretch { stretch: Vec<f64> },
    Scaled { a: f64 },
}

impl MetricSpec {
    pub fn to_field(&self) -> MetricField {
        match self {
            MetricSpec::Minkowski { cone } => MetricField::Minkowski { cone: *cone },
            MetricSpec::ConformalBump { a } => MetricField::ConformalBump { a: *a },
            MetricSpec::AnisotropicStretch { stretch } => MetricField::AnisotropicStretch { stretch: stretch.clone() },
            MetricSpec::Scaled { a } => MetricField::Scaled { a: *a },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeighborhoodSpec {
    pub a: f64,
    pub b: f64,
    pub v_lo: Vec<f64>,
    pub v_hi: Vec<f64>,
    pub c: f64,
    #[serde(default)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    pub x0: Vec<f64>,
    pub h0: f64,
    pub halvings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioPairSpec {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub p0: Vec<f64>,
    pub q0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioSpec {
    /// Inner window `(a~, b~)`.
    pub tilde: (f64, f64),
    pub pairs: Vec<RatioPairSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub metric: MetricSpec,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    #[serde(default)]
    pub neighborhood: Option<NeighborhoodSpec>,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default)]
    pub density: Option<DensitySpec>,
    #[serde(default)]
    pub ratio: Option<RatioSpec>,
}

fn default_pairs() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub n: usize,
    pub big_n: Vec<f64>,
    pub r_grid: Vec<f64>,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureSpec {
    /// `(K, N, R*)` rows.
    pub rows: Vec<(f64, f64, f64)>,
    #[serde(default)]
    pub probe: Option<ProbeSpec>,
}

/// Pass/fail rule on a summary statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub stat: String,
    #[serde(default)]
    pub target: Option<f64>,
    /// Absolute tolerance around `target`.
    #[serde(default)]
    pub tol: Option<f64>,
    /// Relative tolerance around `target`.
    #[serde(default)]
    pub rel: Option<f64>,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
}

impl Expectation {
    pub fn check(&self, v: f64) -> bool {
        if v.is_nan() {
            return false;
        }
        if let Some(t) = self.target {
            let slack = self.tol.unwrap_or(0.0).max(self.rel.unwrap_or(0.0) * t.abs());
            if (v - t).abs() > slack {
                return false;
            }
        }
        self.min.map_or(true, |m| v >= m) && self.max.map_or(true, |m| v <= m)
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(t) = self.target {
            match (self.tol, self.rel) {
                (Some(a), _) => parts.push(format!("{t} +- {a}")),
                (None, Some(r)) => parts.push(format!("{t} within {r} relative")),
                (None, None) => parts.push(format!("== {t}")),
            }
        }
        if let Some(m) = self.min {
            parts.push(format!(">= {m}"));
        }
        if let Some(m) = self.max {
            parts.push(format!("<= {m}"));
        }
        parts.join(", ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub experiment: String,
    #[serde(default)]
    pub space: Option<SpaceSpec>,
    #[serde(default)]
    pub region: Option<RegionSpec>,
    #[serde(default)]
    pub deltas: Option<ScaleGrid>,
    #[serde(default)]
    pub n_grid: Option<Vec<f64>>,
    /// Defaults to the generators that apply to the region.
    #[serde(default)]
    pub generators: Option<Vec<GeneratorSpec>>,
    #[serde(default)]
    pub budgets: Budgets,
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub chart: Option<ChartSpec>,
    #[serde(default)]
    pub curvature: Option<CurvatureSpec>,
    #[serde(default)]
    pub expect: Vec<Expectation>,
}

fn default_workers() -> usize {
    1
}

/// The fields that determine results. `workers` and `out` do not.
#[derive(Serialize)]
struct Semantic<'a> {
    version: u32,
    experiment: &'a str,
    space: &'a Option<SpaceSpec>,
    region: &'a Option<RegionSpec>,
    deltas: &'a Option<ScaleGrid>,
    n_grid: &'a Option<Vec<f64>>,
    generators: &'a Option<Vec<GeneratorSpec>>,
    budgets: &'a Budgets,
    seed: u64,
    chart: &'a Option<ChartSpec>,
    curvature: &'a Option<CurvatureSpec>,
    expect: &'a [Expectation],
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.starts_with("unknown field") || msg.starts_with("missing field"))
                .unwrap_or("<document>")
                .to_string();
            ConfigError::new(field, msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_value(v: serde_json::Value) -> Result<Self, ConfigError> {
        Self::from_json(&v.to_string())
    }

    /// Canonical JSON of the semantic fields.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.semantic()).expect("config serializes")
    }

    fn semantic(&self) -> Semantic<'_> {
        Semantic {
            version: self.version,
            experiment: &self.experiment,
            space: &self.space,
            region: &self.region,
            deltas: &self.deltas,
            n_grid: &self.n_grid,
            generators: &self.generators,
            budgets: &self.budgets,
            seed: self.seed,
            chart: &self.chart,
            curvature: &self.curvature,
            expect: &self.expect,
        }
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != CONFIG_VERSION {
            return Err(ConfigError::new("version", format!("expected {CONFIG_VERSION}, got {}", self.version)));
        }
        if self.experiment.is_empty() || !self.experiment.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(ConfigError::new("experiment", "must be a nonempty name of letters, digits, `-` or `_`"));
        }
        if self.workers == 0 {
            return Err(ConfigError::new("workers", "must be at least 1"));
        }
        if let Some(s) = &self.space {
            if s.dim < 1 {
                return Err(ConfigError::new("space.dim", "must be at least 1"));
            }
            if !(s.cone > 0.0 && s.cone.is_finite()) {
                return Err(ConfigError::new("space.cone", "must be positive"));
            }
        }
        if let Some(d) = &self.deltas {
            if !(d.start > 0.0 && d.start.is_finite()) {
                return Err(ConfigError::new("deltas.start", "must be positive"));
            }
            if !(d.factor > 0.0 && d.factor < 1.0) {
                return Err(ConfigError::new("deltas.factor", format!("must lie in (0, 1), got {}", d.factor)));
            }
            if d.count == 0 {
                return Err(ConfigError::new("deltas.count", "grid must be nonempty"));
            }
        }
        if let Some(n) = &self.n_grid {
            if n.is_empty() {
                return Err(ConfigError::new("n_grid", "grid must be nonempty"));
            }
            if n.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(ConfigError::new("n_grid", "values must be finite and nonnegative"));
            }
        }
        if let Some(g) = &self.generators {
            if g.is_empty() {
                return Err(ConfigError::new("generators", "list must be nonempty"));
            }
        }
        let b = &self.budgets;
        for (name, v) in [
            ("budgets.verify_samples", b.verify_samples),
            ("budgets.frostman_diamonds", b.frostman_diamonds),
            ("budgets.frostman_samples", b.frostman_samples),
            ("budgets.volume_samples", b.volume_samples),
            ("budgets.dp_layers", b.dp_layers),
        ] {
            if v == 0 {
                return Err(ConfigError::new(name, "must be positive"));
            }
        }
        if let Some(c) = &self.curvature {
            if c.rows.is_empty() {
                return Err(ConfigError::new("curvature.rows", "must be nonempty"));
            }
        }
        for (i, e) in self.expect.iter().enumerate() {
            if e.target.is_none() && e.min.is_none() && e.max.is_none() {
                return Err(ConfigError::new(format!("expect[{i}]"), "needs a target, min or max"));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Result<MinkowskiSpace, ConfigError> {
        let s = self.space.as_ref().ok_or_else(|| ConfigError::new("space", "required for this command"))?;
        MinkowskiSpace::with_cone(s.dim, s.cone).map_err(|e| ConfigError::new("space", e.to_string()))
    }

    pub fn region(&self, space: &MinkowskiSpace) -> Result<Region, ConfigError> {
        let spec = self.region.as_ref().ok_or_else(|| ConfigError::new("region", "required for this command"))?;
        let n = space.dimension();
        let check = |field: &str, v: &[f64]| {
            if v.len() != n {
                Err(ConfigError::new(field, format!("expected {n} coordinates, got {}", v.len())))
            } else {
                Ok(())
            }
        };
        let bad = |field: &'static str| move |e: lorentz_measure::Error| ConfigError::new(field, e.to_string());
        match spec {
            RegionSpec::Box { lo, hi } => {
                check("region.box.lo", lo)?;
                check("region.box.hi", hi)?;
                Ok(Region::Box { lo: lo.clone(), hi: hi.clone() })
            }
            RegionSpec::SubspaceCube { basis, origin, ranges } => {
                check("region.subspace-cube.origin", origin)?;
                for b in basis {
                    check("region.subspace-cube.basis", b)?;
                }
                let sub = LinearSubspace::new(*space, basis.clone()).map_err(bad("region.subspace-cube.basis"))?;
                let cube = SubspaceCube::new(sub, Point::new(origin.clone()), ranges.clone())
                    .map_err(bad("region.subspace-cube.ranges"))?;
                Ok(Region::SubspaceCube(cube))
            }
            RegionSpec::Curve { vertices } => {
                for v in vertices {
                    check("region.curve.vertices", v)?;
                }
                let pts = vertices.iter().map(|v| Point::new(v.clone())).collect();
                let c = PiecewiseLinearCurve::new(space, pts).map_err(bad("region.curve.vertices"))?;
                Ok(Region::Curve(c))
            }
            RegionSpec::Points { points } => {
                if points.is_empty() {
                    return Err(ConfigError::new("region.points.points", "must be nonempty"));
                }
                for v in points {
                    check("region.points.points", v)?;
                }
                Ok(Region::Points(points.iter().map(|v| Point::new(v.clone())).collect()))
            }
        }
    }

    pub fn deltas(&self) -> Result<Vec<f64>, ConfigError> {
        self.deltas
            .map(|d| d.values())
            .ok_or_else(|| ConfigError::new("deltas", "required for this command"))
    }

    pub fn n_grid(&self) -> Result<Vec<f64>, ConfigError> {
        self.n_grid.clone().ok_or_else(|| ConfigError::new("n_grid", "required for this command"))
    }

    pub fn generators(&self, space: &MinkowskiSpace, region: &Region) -> Vec<Generator> {
        match &self.generators {
            Some(g) => g.iter().map(GeneratorSpec::to_generator).collect(),
            None => Generator::defaults_for(space, region),
        }
    }

    pub fn chart(&self) -> Result<(&ChartSpec, ChartMetric), ConfigError> {
        let c = self.chart.as_ref().ok_or_else(|| ConfigError::new("chart", "required for this command"))?;
        let m = ChartMetric::new(c.metric.to_field(), c.lo.clone(), c.hi.clone())
            .map_err(|e| ConfigError::new("chart.metric", e.to_string()))?;
        Ok((c, m))
    }
}
