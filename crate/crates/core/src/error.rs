use thiserror::Error;

/// Errors produced by the solver suite.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),

    #[error("field has zero norm")]
    ZeroNorm,

    #[error("field is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("argument {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("solver did not converge after {steps} steps (residual {residual:e})")]
    NonConvergence { steps: usize, residual: f64 },

    #[error(
        "perturbative breakdown: quintic chemical potential {mu} fell below -10 |mu1| = {limit}"
    )]
    PerturbativeBreakdown { mu: f64, limit: f64 },

    #[error("grid too small: boundary density ratio {ratio:e} exceeds 1e-10")]
    GridTooSmall { ratio: f64 },

    #[error("quadrature inconsistency: variance radicand {0:e} is negative")]
    NegativeVariance(f64),

    #[error("root not bracketed on [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
