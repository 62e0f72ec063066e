//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector must have at least one entry")]
    EmptyVector,

    #[error("cannot normalize a (numerically) zero vector")]
    ZeroVector,

    #[error("chart index {index} out of range for dimension {dim}")]
    ChartIndex { index: usize, dim: usize },

    #[error("point lies outside chart {index}: |coordinate| = {magnitude:.3e}")]
    ChartDomain { index: usize, magnitude: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("support points must be pairwise distinct (points {0} and {1} coincide)")]
    DuplicatePoints(usize, usize),

    #[error("derivatives require eps > 0")]
    EpsRequired,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("support exceeds r_max: farthest support distance {farthest:.6e} > {r_max:.6e}")]
    SupportExceedsRmax { farthest: f64, r_max: f64 },

    #[error("twist consistency check failed: {0}")]
    TwistInconsistent(String),

    #[error("measure file: {0}")]
    MeasureFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
