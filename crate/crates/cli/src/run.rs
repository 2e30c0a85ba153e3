//! Dispatch of one experiment config to the library, CSV cells and the
//! appended result record.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use lorentz_measure::causal::Point;
use lorentz_measure::chart::{
    dimension_bound_from_doubling, doubling_constant, measure_ratio_check, volume_density_check,
    CylindricalNeighborhood, DoublingOptions, DpOptions, RatioPair,
};
use lorentz_measure::curvature::{bg_monotonicity_probe, curvature_table, write_curvature_csv};
use lorentz_measure::length::{compare_length_measure, tau_length};
use lorentz_measure::measure::{
    estimate_dimension, lower_measure, CoverBank, EstimateOptions, FrostmanOptions, Generator, UniformMass,
    VerifyOptions,
};
use lorentz_measure::spaces::Region;
use serde::Serialize;

use crate::config::{ConfigError, ExperimentConfig};

/// Tolerance of the `tau`-length refinement.
const LENGTH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Dimension,
    Measure,
    Curve,
    Doubling,
    Bg,
}

impl Command {
    pub fn parse(s: &str) -> Option<Command> {
        match s {
            "dimension" => Some(Command::Dimension),
            "measure" => Some(Command::Measure),
            "curve" => Some(Command::Curve),
            "doubling" => Some(Command::Doubling),
            "bg" => Some(Command::Bg),
            _ => None,
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Io(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => e.fmt(f),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub name: String,
    pub file: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub name: String,
    pub value: Option<f64>,
    pub rule: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub command: Command,
    pub timestamp: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub cells: Vec<Cell>,
    pub summary: BTreeMap<String, f64>,
    pub labels: BTreeMap<String, String>,
    pub criteria: Vec<CriterionResult>,
    pub pass: bool,
}

/// Numerical failures become a failed criterion; errors that trace back to
/// the inputs are config errors.
fn classify(e: lorentz_measure::Error) -> Result<String, RunError> {
    use lorentz_measure::Error as E;
    match e {
        E::Domain(_) | E::InvalidMetric(_) | E::InvalidCurve(_) | E::WrongGenerator { .. } | E::NoGenerator | E::DegenerateInput(_) => {
            Err(RunError::Config(ConfigError::new("<inputs>", e.to_string())))
        }
        E::Io(s) => Err(RunError::Io(s)),
        other => Ok(other.to_string()),
    }
}

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

struct Outputs {
    dir: PathBuf,
    cells: Vec<Cell>,
    summary: BTreeMap<String, f64>,
    labels: BTreeMap<String, String>,
    criteria: Vec<CriterionResult>,
}

impl Outputs {
    fn file(&mut self, name: &str) -> Result<BufWriter<File>, RunError> {
        let file = format!("{name}.csv");
        let f = File::create(self.dir.join(&file))?;
        self.cells.push(Cell { name: name.into(), file });
        Ok(BufWriter::new(f))
    }

    fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), RunError> {
        let mut w = csv::Writer::from_writer(self.file(name)?);
        w.write_record(header).map_err(|e| RunError::Io(e.to_string()))?;
        for r in rows {
            w.write_record(r).map_err(|e| RunError::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    fn stat(&mut self, name: impl Into<String>, v: f64) {
        self.summary.insert(name.into(), v);
    }

    fn label(&mut self, name: impl Into<String>, v: impl Into<String>) {
        self.labels.insert(name.into(), v.into());
    }

    fn check(&mut self, name: impl Into<String>, value: Option<f64>, rule: impl Into<String>, pass: bool) {
        self.criteria.push(CriterionResult {
            name: name.into(),
            value,
            rule: rule.into(),
            pass,
        });
    }

    /// Record a numerical failure as a failed criterion.
    fn failed(&mut self, step: &str, e: lorentz_measure::Error) -> Result<(), RunError> {
        let msg = classify(e)?;
        self.check(step, None, msg, false);
        Ok(())
    }
}

fn lib<T>(r: lorentz_measure::Result<T>, out: &mut Outputs, step: &str) -> Result<Option<T>, RunError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) => {
            out.failed(step, e)?;
            Ok(None)
        }
    }
}

fn lib_io(e: lorentz_measure::Error) -> RunError {
    RunError::Io(e.to_string())
}

/// Run `command` on `cfg`, write CSV cells under `out_root/<experiment>/`
/// and append the record to `out_root/results.jsonl`.
pub fn run_experiment(cfg: &ExperimentConfig, command: Command, out_root: &Path) -> Result<ResultRecord, RunError> {
    cfg.validate()?;
    let dir = out_root.join(&cfg.experiment);
    fs::create_dir_all(&dir)?;
    let mut out = Outputs {
        dir,
        cells: Vec::new(),
        summary: BTreeMap::new(),
        labels: BTreeMap::new(),
        criteria: Vec::new(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| RunError::Io(e.to_string()))?;
    pool.install(|| match command {
        Command::Dimension => dimension(cfg, &mut out),
        Command::Measure => measure(cfg, &mut out),
        Command::Curve => curve(cfg, &mut out),
        Command::Doubling => doubling(cfg, &mut out),
        Command::Bg => bg(cfg, &mut out),
    })?;

    for e in &cfg.expect {
        let v = out.summary.get(&e.stat).copied();
        let pass = v.is_some_and(|v| e.check(v));
        let rule = if v.is_some() { e.describe() } else { format!("{} (statistic not produced)", e.describe()) };
        out.check(e.stat.clone(), v, rule, pass);
    }
    let pass = out.criteria.iter().all(|c| c.pass);
    let record = ResultRecord {
        experiment: cfg.experiment.clone(),
        command,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        config_hash: cfg.hash(),
        config: serde_json::from_str(&cfg.canonical_json()).expect("canonical json parses"),
        cells: out.cells,
        summary: out.summary,
        labels: out.labels,
        criteria: out.criteria,
        pass,
    };
    append_record(out_root, &record)?;
    Ok(record)
}

fn append_record(out_root: &Path, record: &ResultRecord) -> Result<(), RunError> {
    let mut f = OpenOptions::new().create(true).append(true).open(out_root.join("results.jsonl"))?;
    let line = serde_json::to_string(record).map_err(|e| RunError::Io(e.to_string()))?;
    writeln!(f, "{line}")?;
    Ok(())
}

fn verify_opts(cfg: &ExperimentConfig) -> VerifyOptions {
    VerifyOptions {
        samples: cfg.budgets.verify_samples,
        seed: cfg.seed,
    }
}

fn dp_opts(cfg: &ExperimentConfig) -> DpOptions {
    DpOptions {
        layers: cfg.budgets.dp_layers,
        ..Default::default()
    }
}

fn region_labels(region: &Region, out: &mut Outputs) {
    out.label("region", region.kind());
    if let Region::SubspaceCube(c) = region {
        out.label("class", c.subspace.class().as_str());
        out.stat("k", c.subspace.dim() as f64);
    }
}

fn write_estimate(
    out: &mut Outputs,
    est: &lorentz_measure::measure::DimensionEstimate,
) -> Result<(), RunError> {
    est.series.write_csv(out.file("scaling")?).map_err(lib_io)?;
    let rows: Vec<Vec<String>> = est.slopes.iter().map(|(n, s)| vec![real(*n), real(*s)]).collect();
    out.table("slopes", &["N", "slope"], &rows)?;
    out.stat("dimension", est.value);
    out.stat("bracket_lo", est.bracket.0);
    out.stat("bracket_hi", est.bracket.1);
    if !est.diagnostics.is_empty() {
        out.label("diagnostics", est.diagnostics.join("; "));
    }
    Ok(())
}

fn dimension(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<(), RunError> {
    let space = cfg.space()?;
    let region = cfg.region(&space)?;
    let gens = cfg.generators(&space, &region);
    region_labels(&region, out);
    let opts = EstimateOptions {
        verify: verify_opts(cfg),
        ..Default::default()
    };
    let est = estimate_dimension(&space, &region, &gens, &cfg.deltas()?, &cfg.n_grid()?, opts);
    if let Some(est) = lib(est, out, "estimate")? {
        write_estimate(out, &est)?;
    }
    Ok(())
}

fn n_key(prefix: &str, n: f64) -> String {
    format!("{prefix}_N{n}")
}

fn measure(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<(), RunError> {
    let space = cfg.space()?;
    let region = cfg.region(&space)?;
    let gens = cfg.generators(&space, &region);
    let deltas = cfg.deltas()?;
    let ns = cfg.n_grid()?;
    region_labels(&region, out);

    let Some(bank) = lib(CoverBank::build(&space, &region, &gens, &deltas, verify_opts(cfg)), out, "covers")? else {
        return Ok(());
    };
    let series = bank.series(&ns);
    series.write_csv(out.file("upper")?).map_err(lib_io)?;
    let finest = deltas.len() - 1;
    for &n in &ns {
        out.stat(n_key("upper", n), bank.best_cost(finest, n));
    }

    let mass = match UniformMass::new(space, region.clone()) {
        Ok(m) => Some(m),
        Err(e) => {
            out.label("lower", format!("skipped: {e}"));
            None
        }
    };
    if let Some(mass) = mass {
        let fo = FrostmanOptions {
            diamonds: cfg.budgets.frostman_diamonds,
            budget: cfg.budgets.frostman_samples,
            seed: cfg.seed,
            ..Default::default()
        };
        let mut rows = Vec::new();
        for &n in &ns {
            if let Some(lb) = lib(lower_measure(&space, n, &mass, fo), out, &n_key("lower", n))? {
                out.stat(n_key("lower", n), lb.value);
                rows.push(vec![real(n), real(lb.value), real(lb.constant), real(lb.total_mass)]);
            }
        }
        out.table("lower", &["N", "lower", "frostman_constant", "total_mass"], &rows)?;
    }
    Ok(())
}

fn curve(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<(), RunError> {
    let space = cfg.space()?;
    let region = cfg.region(&space)?;
    let Region::Curve(c) = &region else {
        return Err(ConfigError::new("region", "the curve command needs a curve region").into());
    };
    let deltas = cfg.deltas()?;
    out.label("class", format!("{:?}", c.class()).to_lowercase());

    if let Some(l) = lib(tau_length(&space, c, LENGTH_TOL), out, "length")? {
        let rows: Vec<Vec<String>> = l
            .trace
            .levels
            .iter()
            .map(|t| vec![t.level.to_string(), real(t.mesh), real(t.sum)])
            .collect();
        out.table("partition_sums", &["level", "mesh", "sum"], &rows)?;
        out.stat("length", l.value);
        out.check("length_converged", None, "refinement converged", l.converged);
    }
    if let Some(cmp) = lib(compare_length_measure(&space, c, &deltas, LENGTH_TOL), out, "chain")? {
        let rows: Vec<Vec<String>> = cmp.v1_upper.iter().map(|(d, v)| vec![real(*d), real(*v)]).collect();
        out.table("chain_cost", &["delta", "V1_upper"], &rows)?;
        out.stat("chain_max", cmp.v1_upper.iter().map(|(_, v)| *v).fold(0.0, f64::max));
        out.check("chain_bounded_by_length", None, "chain cost <= L_tau + tol", cmp.bounded);
    }
    let ns = cfg.n_grid.clone().unwrap_or_else(|| vec![0.0, 1.0, 2.0]);
    let opts = EstimateOptions {
        verify: verify_opts(cfg),
        ..Default::default()
    };
    let est = estimate_dimension(&space, &region, &[Generator::CurveChain], &deltas, &ns, opts);
    if let Some(est) = lib(est, out, "estimate")? {
        write_estimate(out, &est)?;
    }
    Ok(())
}

fn point(v: &[f64]) -> Point {
    Point::new(v.to_vec())
}

fn doubling(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<(), RunError> {
    let (spec, metric) = cfg.chart()?;
    let dp = dp_opts(cfg);
    out.label("metric", metric.field().name());

    if let Some(nb) = &spec.neighborhood {
        let mut nbhd = CylindricalNeighborhood::new(
            spec.lo.clone(),
            spec.hi.clone(),
            nb.a,
            nb.b,
            nb.v_lo.clone(),
            nb.v_hi.clone(),
            nb.c,
        )
        .map_err(|e| ConfigError::new("chart.neighborhood", e.to_string()))?;
        if let Some(l) = nb.lambda {
            nbhd = nbhd
                .with_lambda(l)
                .map_err(|e| ConfigError::new("chart.neighborhood.lambda", e.to_string()))?;
        }
        out.stat("lambda", nbhd.lambda);
        let opts = DoublingOptions {
            pairs: spec.pairs,
            budget: cfg.budgets.volume_samples,
            dp,
            seed: cfg.seed,
        };
        if let Some(rep) = lib(doubling_constant(&metric, &nbhd, opts), out, "doubling")? {
            rep.write_csv(out.file("doubling")?).map_err(lib_io)?;
            out.stat("l_empirical", rep.l_empirical);
            out.stat("l_analytic", rep.l_analytic);
            out.check(
                "doubling_within_bound",
                Some(rep.l_empirical),
                format!("<= analytic {}", real(rep.l_analytic)),
                rep.within_bound,
            );
            if let Some(bound) = lib(dimension_bound_from_doubling(rep.l_empirical, nbhd.lambda), out, "dimension_bound")? {
                out.stat("dimension_bound", bound);
            }
            if let Some(r) = &spec.ratio {
                let pairs: Vec<RatioPair> = r
                    .pairs
                    .iter()
                    .map(|p| RatioPair {
                        p: point(&p.p),
                        q: point(&p.q),
                        p0: point(&p.p0),
                        q0: point(&p.q0),
                    })
                    .collect();
                let check = measure_ratio_check(
                    &metric,
                    &nbhd,
                    r.tilde,
                    &pairs,
                    rep.l_empirical,
                    cfg.budgets.volume_samples,
                    cfg.seed,
                    dp,
                );
                if let Some(rr) = lib(check, out, "ratio")? {
                    rr.write_csv(out.file("ratio")?).map_err(lib_io)?;
                    out.stat("kappa", rr.kappa);
                    let checked = rr.rows.iter().filter(|r| r.skipped.is_none()).count();
                    out.stat("ratio_pairs_checked", checked as f64);
                    out.check("ratio_bound_holds", None, "every checked pair satisfies the ratio bound", rr.all_hold());
                }
            }
        }
    }
    if let Some(d) = &spec.density {
        let rep = volume_density_check(
            &metric,
            &point(&d.x0),
            d.h0,
            d.halvings,
            cfg.budgets.volume_samples,
            cfg.seed,
            dp,
        );
        if let Some(rep) = lib(rep, out, "density")? {
            rep.write_csv(out.file("density")?).map_err(lib_io)?;
            out.stat("density_final_deviation", rep.final_deviation);
            if let Some(last) = rep.rows.last() {
                out.stat("density_final_ratio", last.ratio);
            }
            out.check("density_converging", None, "ratios approach 1 under halving", rep.converging);
        }
    }
    if spec.neighborhood.is_none() && spec.density.is_none() {
        return Err(ConfigError::new("chart", "needs a neighborhood or a density section").into());
    }
    Ok(())
}

fn bg(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<(), RunError> {
    let spec = cfg
        .curvature
        .as_ref()
        .ok_or_else(|| ConfigError::new("curvature", "required for this command"))?;
    let rows = curvature_table(&spec.rows).map_err(|e| ConfigError::new("curvature.rows", e.to_string()))?;
    write_curvature_csv(&rows, out.file("curvature")?).map_err(lib_io)?;
    let flat_exact = rows
        .iter()
        .filter(|r| r.k >= 0.0)
        .all(|r| r.doubling == 2f64.powf(r.n + 1.0));
    out.check("nonnegative_K_doubling", None, "L = 2^(N+1) for K >= 0", flat_exact);
    // tight at K = 0, so allow rounding
    let dominated = rows.iter().all(|r| r.ratio >= 1.0 / r.doubling - 1e-10);
    out.check("ratio_dominates_inverse_doubling", None, "ratio bound >= 1/L on every row", dominated);
    out.stat("rows", rows.len() as f64);
    out.stat(
        "min_ratio_times_l",
        rows.iter().map(|r| r.ratio * r.doubling).fold(f64::INFINITY, f64::min),
    );

    if let Some(p) = &spec.probe {
        let mut table = Vec::new();
        for &big_n in &p.big_n {
            let probe = bg_monotonicity_probe(p.n, big_n, &p.r_grid, p.beta)
                .map_err(|e| ConfigError::new("curvature.probe", e.to_string()))?;
            for (r, vol, prof) in &probe.rows {
                table.push(vec![real(big_n), real(*r), real(*vol), real(*prof)]);
            }
            let expect = big_n >= p.n as f64 - 1.0;
            out.check(
                format!("probe_N{big_n}"),
                None,
                format!("profile nonincreasing iff N >= {}", p.n - 1),
                probe.nonincreasing == expect,
            );
        }
        out.table("probe", &["N", "r", "volume", "profile"], &table)?;
    }
    Ok(())
}
