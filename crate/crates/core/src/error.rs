use thiserror::Error;

/// Errors shared across the workspace.
#[derive(Debug, Clone, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("dimension constraint violated: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scale statistic must be positive, got {0}")]
    DegenerateScale(f64),

    #[error("matrix departs from orthogonality by {deviation:.3e} (tolerance {tol:.1e})")]
    NonOrthogonal { deviation: f64, tol: f64 },

    #[error("estimator singular at this observation: {0}")]
    Singularity(String),

    #[error("quadrature failed to converge: estimate {estimate:.6e}, error bound {error:.3e} exceeds tolerance")]
    QuadratureNonConvergence { estimate: f64, error: f64 },

    #[error("integrand produced a non-finite value at t = {0}")]
    NonFiniteIntegrand(f64),

    #[error("design matrix is numerically rank deficient: condition number {cond:.3e} exceeds {limit:.1e}")]
    RankDeficient { cond: f64, limit: f64 },

    #[error("response vector is degenerate (zero variance after centering)")]
    DegenerateResponse,

    #[error("malformed input data: {0}")]
    InvalidData(String),

    #[error("operation unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
