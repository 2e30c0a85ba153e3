//! Experiment runner for `lorentz-measure`: JSON configs in, CSV cells and
//! an append-only JSONL record out.

pub mod config;
pub mod run;
pub mod suites;

pub use config::{ConfigError, ExperimentConfig};
pub use run::{run_experiment, Command, ResultRecord, RunError};
pub use suites::{reproduce_suite, SuiteError, SUITES};
