//! Reproduction bundles shipped with the binary.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::config::{ConfigError, ExperimentConfig};
use crate::run::{real, run_experiment, Command, ResultRecord, RunError};

pub const SUITES: [(&str, &str); 4] = [
    ("minkowski-subspaces", include_str!("../suites/minkowski-subspaces.json")),
    ("volume-consistency", include_str!("../suites/volume-consistency.json")),
    ("doubling", include_str!("../suites/doubling.json")),
    ("bishop-gromov", include_str!("../suites/bishop-gromov.json")),
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    suite: String,
    #[allow(dead_code)]
    description: String,
    runs: Vec<ManifestRun>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestRun {
    command: String,
    config: serde_json::Value,
}

#[derive(Debug)]
pub enum SuiteError {
    NotFound(String),
    Run(RunError),
}

impl fmt::Display for SuiteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteError::NotFound(name) => {
                let known: Vec<&str> = SUITES.iter().map(|(n, _)| *n).collect();
                write!(f, "no suite named `{name}` (known: {})", known.join(", "))
            }
            SuiteError::Run(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for SuiteError {}

impl From<RunError> for SuiteError {
    fn from(e: RunError) -> Self {
        SuiteError::Run(e)
    }
}

impl From<ConfigError> for SuiteError {
    fn from(e: ConfigError) -> Self {
        SuiteError::Run(RunError::Config(e))
    }
}

impl From<std::io::Error> for SuiteError {
    fn from(e: std::io::Error) -> Self {
        SuiteError::Run(RunError::Io(e.to_string()))
    }
}

#[derive(Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub records: Vec<ResultRecord>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }
}

/// Parsed configs of a suite, with command names.
pub fn suite_configs(name: &str) -> Result<Vec<(Command, ExperimentConfig)>, SuiteError> {
    let text = SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| SuiteError::NotFound(name.into()))?;
    let m: Manifest = serde_json::from_str(text).map_err(|e| ConfigError::new("<suite manifest>", e.to_string()))?;
    debug_assert_eq!(m.suite, name);
    m.runs
        .into_iter()
        .map(|r| {
            let cmd = Command::parse(&r.command).ok_or_else(|| ConfigError::new("command", format!("unknown command `{}`", r.command)))?;
            Ok((cmd, ExperimentConfig::from_value(r.config)?))
        })
        .collect()
}

/// Run every config of the suite under `out_root/<suite>/` and write the
/// suite tables next to the per-experiment cells.
pub fn reproduce_suite(
    name: &str,
    seed: Option<u64>,
    workers: Option<usize>,
    out_root: &Path,
) -> Result<SuiteReport, SuiteError> {
    let configs = suite_configs(name)?;
    let dir = out_root.join(name);
    fs::create_dir_all(&dir)?;
    let mut records = Vec::new();
    for (cmd, mut cfg) in configs {
        if let Some(s) = seed {
            cfg.seed = s;
        }
        if let Some(w) = workers {
            cfg.workers = w;
        }
        records.push(run_experiment(&cfg, cmd, &dir)?);
    }
    write_summary(&dir, &records)?;
    if name == "minkowski-subspaces" {
        write_subspace_table(&dir, &records)?;
    }
    Ok(SuiteReport {
        suite: name.into(),
        records,
    })
}

fn write_table(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), SuiteError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| RunError::Io(e.to_string()))?;
    w.write_record(header).map_err(|e| RunError::Io(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| RunError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn write_summary(dir: &Path, records: &[ResultRecord]) -> Result<(), SuiteError> {
    let mut stats = Vec::new();
    let mut criteria = Vec::new();
    for r in records {
        for (k, v) in &r.summary {
            stats.push(vec![r.experiment.clone(), k.clone(), real(*v)]);
        }
        for c in &r.criteria {
            criteria.push(vec![
                r.experiment.clone(),
                c.name.clone(),
                c.value.map(real).unwrap_or_default(),
                c.rule.clone(),
                c.pass.to_string(),
            ]);
        }
    }
    write_table(&dir.join("summary.csv"), &["experiment", "stat", "value"], stats)?;
    write_table(&dir.join("criteria.csv"), &["experiment", "criterion", "value", "rule", "pass"], criteria)
}

/// `(class, k, estimated dim)` for the dimension runs.
fn write_subspace_table(dir: &Path, records: &[ResultRecord]) -> Result<(), SuiteError> {
    let rows = records
        .iter()
        .filter(|r| r.command == Command::Dimension)
        .map(|r| {
            let expected = r
                .config
                .get("expect")
                .and_then(|e| e.as_array())
                .and_then(|e| e.iter().find(|x| x["stat"] == "dimension"))
                .and_then(|x| x["target"].as_f64());
            vec![
                r.labels.get("class").cloned().unwrap_or_default(),
                r.summary.get("k").map(|k| format!("{k}")).unwrap_or_default(),
                r.summary.get("dimension").map(|v| real(*v)).unwrap_or_default(),
                expected.map(real).unwrap_or_default(),
                r.pass.to_string(),
            ]
        })
        .collect();
    write_table(&dir.join("subspaces.csv"), &["class", "k", "dimension", "expected", "pass"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_manifest_parses() {
        for (name, _) in SUITES {
            let cfgs = suite_configs(name).unwrap();
            assert!(!cfgs.is_empty(), "{name}");
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(suite_configs("nope"), Err(SuiteError::NotFound(_))));
    }
}
