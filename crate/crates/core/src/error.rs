use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid horizon K={0}: must be at least 1")]
    InvalidHorizon(usize),
    #[error("invalid parameter {name}={value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("setup mismatch for {family}: {reason}")]
    SetupMismatch { family: String, reason: String },
    #[error("divergence at iteration {k}: {reason}")]
    Divergence { k: usize, reason: String },
    #[error("oracle failure: {0}")]
    OracleFailure(String),
    #[error("constraint {constraint} violated at k={index} (residual {residual:e})")]
    ConstraintViolation { index: usize, constraint: &'static str, residual: f64 },
    #[error("schedule built for K={built} used with K={requested}")]
    HorizonMismatch { built: usize, requested: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical backend failure: {0}")]
    Backend(String),
    #[error("instance format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
