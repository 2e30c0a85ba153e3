use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lorentz_measure_cli::{reproduce_suite, run_experiment, Command, ExperimentConfig, ResultRecord, RunError, SuiteError};

/// Exit status for a failed acceptance criterion.
const CRITERION_FAILED: u8 = 1;
/// Exit status for usage and config errors.
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "lmeasure", version, about = "Run diamond-measure experiments from JSON configs")]
struct Cli {
    /// Experiment config (JSON, version 1).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_name = "INT", value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate the geometric dimension of a region.
    Dimension,
    /// Upper and lower bounds on V^N over the scale grid.
    Measure,
    /// tau-length, chain-cover cost and dimension of a causal curve.
    Curve,
    /// Causal doubling, ratio and volume-density checks on a chart metric.
    Doubling,
    /// Bishop-Gromov ratio bounds and doubling constants.
    Bg,
    /// Run a bundled suite: minkowski-subspaces, volume-consistency, doubling, bishop-gromov.
    Reproduce { suite: String },
}

fn report(r: &ResultRecord) {
    let tag = if r.pass { "PASS" } else { "FAIL" };
    println!("{}: {tag} (config {})", r.experiment, &r.config_hash[..12]);
    for (k, v) in &r.summary {
        println!("  {k} = {v}");
    }
    for c in &r.criteria {
        let tag = if c.pass { "ok" } else { "FAILED" };
        println!("  [{tag}] {}: {}", c.name, c.rule);
    }
}

fn load(path: &Option<PathBuf>) -> Result<ExperimentConfig, String> {
    let path = path.as_ref().ok_or("this command needs --config PATH")?;
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    ExperimentConfig::from_json(&text).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let workers = cli.workers.map(|w| w as usize);
    let records = match cli.command {
        Cmd::Reproduce { suite } => {
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("results"));
            match reproduce_suite(&suite, cli.seed, workers, &out) {
                Ok(rep) => rep.records,
                Err(e @ (SuiteError::NotFound(_) | SuiteError::Run(_))) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(USAGE);
                }
            }
        }
        cmd => {
            let command = match cmd {
                Cmd::Dimension => Command::Dimension,
                Cmd::Measure => Command::Measure,
                Cmd::Curve => Command::Curve,
                Cmd::Doubling => Command::Doubling,
                Cmd::Bg => Command::Bg,
                Cmd::Reproduce { .. } => unreachable!(),
            };
            let mut cfg = match load(&cli.config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(USAGE);
                }
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("results"));
            match run_experiment(&cfg, command, &out) {
                Ok(r) => vec![r],
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(match e {
                        RunError::Config(_) | RunError::Io(_) => USAGE,
                    });
                }
            }
        }
    };
    records.iter().for_each(report);
    if records.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(CRITERION_FAILED)
    }
}
