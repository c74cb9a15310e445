use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The affine set is empty or has no strictly positive point. `slack` is the
    /// best achievable minimum coordinate (≤ 0), or `-inf` when `Ax = b` is inconsistent.
    #[error("infeasible: {reason} (final slack {slack:e})")]
    Infeasible { reason: String, slack: f64 },

    #[error("unbounded: {0}")]
    Unbounded(String),

    #[error("trust-region subproblem failed to converge; final bracket [{lo:e}, {hi:e}]")]
    SubproblemFailure { lo: f64, hi: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("missing smoothness constants: {0}")]
    MissingConstants(String),

    #[error("capability: {0}")]
    Capability(String),
}

pub type Result<T> = std::result::Result<T, Error>;
