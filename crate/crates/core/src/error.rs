use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of the gamma function at z = {0}")]
    Pole(f64),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty estimation window")]
    EmptyWindow,

    #[error("invalid scattering data: {0}")]
    InvalidData(String),

    #[error("system is ill-conditioned (cond = {cond:.3e})")]
    IllConditioned { cond: f64 },

    #[error("solution residual {ratio:.3e} exceeds the backward-stability bound")]
    Residual { ratio: f64 },

    #[error("singular matrix encountered at pivot {0}")]
    Singular(usize),

    #[error("division by zero in terminating series at term {0}")]
    ZeroDenominator(usize),

    #[error("too few nodes: need at least {needed}, got {got}")]
    TooFewNodes { needed: usize, got: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
