use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the decoding engine and evaluation harness.
#[derive(Debug, Error)]
pub enum AadError {
    /// A logit, sample or other numeric input was non-finite or otherwise unusable.
    #[error("numeric input error: {0}")]
    NumericInput(String),

    /// A decoding or run configuration violates its constraints.
    #[error("config error: {0}")]
    Config(String),

    /// A provider broke its contract (vector length, token bounds, vocabulary size).
    #[error("provider contract error: {0}")]
    ProviderContract(String),

    /// The network transport to a remote provider failed. Safe to retry.
    #[error("transport error: {0}")]
    Transport(String),

    /// A remote provider answered with a non-success status.
    #[error("remote error (status {status}): {message}")]
    Remote { status: u16, message: String },

    /// The toy provider found no known object name in the prompt.
    #[error("question parse error: {0}")]
    QuestionParse(String),

    /// Caller-supplied input is invalid (empty question, odd item count, bad dataset line).
    #[error("input error: {0}")]
    Input(String),

    /// An evaluation run had to be aborted.
    #[error("run error: {0}")]
    Run(String),

    /// A generation step failed; carries the step index.
    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<AadError>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AadError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AadError::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the failure is transient and the request may be reissued.
    pub fn is_retryable(&self) -> bool {
        match self {
            AadError::Transport(_) => true,
            AadError::Remote { status, .. } => *status == 503,
            AadError::Step { source, .. } => source.is_retryable(),
            _ => false,
        }
    }

    /// Strips any step wrappers and returns the underlying error.
    pub fn root(&self) -> &AadError {
        match self {
            AadError::Step { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = AadError> = std::result::Result<T, E>;
