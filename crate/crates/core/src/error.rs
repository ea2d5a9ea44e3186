use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("action component {index} = {value} is outside [0, 1]")]
    ActionOutOfRange { index: usize, value: f64 },

    #[error("cannot step a terminated state (t = {t})")]
    Terminated { t: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("gaussian process has not been fitted")]
    GpNotFitted,

    #[error("kernel matrix factorization failed after jitter escalation (last jitter {jitter:e})")]
    Factorization { jitter: f64 },

    #[error("non-finite {quantity} during PPO update (epoch {epoch}, minibatch {minibatch})")]
    NonFinite {
        quantity: &'static str,
        epoch: usize,
        minibatch: usize,
    },

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("unsupported policy file version {found} (expected {expected})")]
    PolicyVersion { found: u32, expected: u32 },

    #[error("unknown subcommand `{0}`")]
    UnknownSubcommand(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
