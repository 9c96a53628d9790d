//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by dataset construction, detectors, solvers and the
/// experiment pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Numeric input violated a precondition (NaN/Inf, empty vector, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration value is out of range for the data it is applied to.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Matrix/vector dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: String,
    },

    /// Linear system remained singular after the ridge fallback.
    #[error("singular linear system: {0}")]
    SingularSystem(String),

    /// A detector failed; carries the offending config descriptor.
    #[error("detector {detector} failed: {source}")]
    Detector {
        detector: String,
        #[source]
        source: Box<Error>,
    },

    /// Input file could not be parsed.
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    /// Loaded dataset sizes disagree with the expected roster sizes.
    #[error("dataset size mismatch for {name}: {report}")]
    SizeMismatch { name: String, report: String },

    /// Internal invariant violated (a bug, not a user error).
    #[error("internal error: {0}")]
    Internal(String),

    /// A pipeline stage failed; names the stage for CLI reporting.
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &str) -> Error {
        Error::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }
}
