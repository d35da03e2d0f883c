use thiserror::Error;

/// Errors produced by state construction, operator algebra, and evolution.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid atomic transition: lower={lower}, upper={upper} (need 1 <= lower < upper <= 3)")]
    InvalidTransition { lower: usize, upper: usize },

    #[error("operator space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("not a valid density matrix: {0}")]
    NotAState(String),

    #[error("truncated tail mass {mass:.3e} exceeds tolerance {tol:.3e}; increase field_dim")]
    TruncationTail { mass: f64, tol: f64 },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("steady-state solve failed: {0}")]
    DegenerateSteadyState(String),

    #[error("phase-space grids do not match: {0}")]
    GridMismatch(String),

    #[error("grid too coarse or too small: quasiprobability integrates to {integral:.6} (expected 1 within {tol:.1e})")]
    GridCoverage { integral: f64, tol: f64 },

    #[error("integration aborted at t = {t:.6e}: {reason}")]
    IntegratorAbort { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
