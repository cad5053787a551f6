//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by grid construction, solvers and drivers.
#[derive(Debug, Error)]
pub enum CssError {
    /// A grid or field was constructed with inconsistent parameters.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    /// A numerical parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A tail integral was truncated while the integrand still carries mass at `r_max`.
    #[error("non-negligible boundary mass {mass:e} at r_max (tolerance {tolerance:e})")]
    BoundaryMass { mass: f64, tolerance: f64 },
    /// The argument hit a pole of the Gamma function.
    #[error("Gamma function pole at {0}")]
    GammaPole(String),
    /// An iterative method did not converge.
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    /// A marching solver left its a-priori envelope.
    #[error("divergence in {0}")]
    Divergence(String),
    /// A least-squares match was ill conditioned.
    #[error("ill-conditioned match: residual {0:e}")]
    IllConditioned(f64),
    /// The field left the tube around the modulated soliton family.
    #[error("tube violation: distance {distance:e} exceeds {bound:e}")]
    TubeViolation { distance: f64, bound: f64 },
    /// Adaptive integration failed.
    #[error("step failure at t={t:e}: {reason}")]
    StepFailure { t: f64, reason: String },
    /// A banded linear solve met a vanishing pivot.
    #[error("solver breakdown: pivot {0:e}")]
    SolverBreakdown(f64),
    /// Configuration error (unknown key, malformed value).
    #[error("config error: {0}")]
    Config(String),
    /// Input/output failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    /// CSV serialization failure.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    /// JSON serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CssError>;
