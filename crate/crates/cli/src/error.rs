use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("invalid value for `{key}`: {msg}")]
    Invalid { key: String, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("series lengths differ ({numeric} numeric, {analytic} analytic)")]
    LengthMismatch { numeric: usize, analytic: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error(transparent)]
    Core(#[from] ness_core::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::MissingKey(_) => "ParseError",
            CliError::Invalid { .. } => "ParseError",
            CliError::Io { .. } => "IoError",
            CliError::Csv(_) => "IoError",
            CliError::LengthMismatch { .. } => "LengthMismatch",
            CliError::TooFewPoints { .. } => "LengthMismatch",
            CliError::Core(e) => e.kind(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> CliError {
        CliError::Io { path: path.into(), source }
    }

    pub(crate) fn invalid(key: &str, msg: impl Into<String>) -> CliError {
        CliError::Invalid { key: key.to_string(), msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
