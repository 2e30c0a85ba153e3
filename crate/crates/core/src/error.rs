use thiserror::Error;

/// Errors raised by the measure, curve and chart routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("generator `{generator}` does not apply: {reason}")]
    WrongGenerator { generator: String, reason: String },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("cover is not verified (covered fraction {fraction:.5})")]
    UnverifiedCover { fraction: f64 },

    #[error("no applicable cover generator for region")]
    NoGenerator,

    #[error("dimension bracket not found: {0}")]
    BracketNotFound(String),

    #[error("degenerate mass distribution: {0}")]
    DegenerateSampler(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
