use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state diverged at step {step}: norm {norm:e} exceeds guard {guard:e}")]
    Divergence { step: usize, norm: f64, guard: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("delay embedding undefined: N = {n}, m = {m}, tau_bar = {tau_bar} leaves no points")]
    EmbeddingTooShort { n: usize, m: usize, tau_bar: usize },

    #[error("KS solver became unstable (theta = {theta}, dt = {dt})")]
    Instability { theta: f64, dt: f64 },

    #[error("parameter {index} = {value} outside box [{lo}, {hi}]")]
    OutsideBox { index: usize, value: f64, lo: f64, hi: f64 },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    #[error("parse error in {file}: {msg}")]
    Parse { file: String, msg: String },

    #[error("failed at point {index}: {source}")]
    AtPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_divergence(&self) -> bool {
        match self {
            Error::Divergence { .. } | Error::Instability { .. } => true,
            Error::AtPoint { source, .. } => source.is_divergence(),
            _ => false,
        }
    }
}
