use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("direction is not unit: |v| = {norm}")]
    NonUnitDirection { norm: f64 },

    #[error("cannot normalize a zero-length vector")]
    ZeroVector,

    #[error("invalid measurement parameters eta = {eta}, alpha = {alpha}: need |eta ± alpha| <= 1")]
    InvalidParams { eta: f64, alpha: f64 },

    #[error("observable is not Hermitian (max residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("decay amplitudes S and P are both zero")]
    ZeroAmplitudes,

    #[error("asymmetry parameter {0} outside [-1, 1]")]
    AlphaOutOfRange(f64),

    #[error("invalid settings geometry: {0}")]
    Geometry(String),

    #[error("opening angle {0} rad outside (0, pi]")]
    InvalidAngle(f64),

    #[error("biased measurement (eta = {0}) not supported on this path")]
    BiasNotSupported(f64),

    #[error("invalid probability input: {0}")]
    Probability(String),

    #[error("sample too small: {n} events, need at least {min}")]
    SampleTooSmall { n: usize, min: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("catalog entry {mode}: {msg}")]
    Catalog { mode: String, msg: String },

    #[error("unknown channel: {0}")]
    UnknownChannel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
