use thiserror::Error;

/// Errors raised by the models, the oracle and the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("numerical consistency check failed: {0}")]
    Numerical(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNonConvergence { sweeps: usize, off_norm: f64 },

    #[error("quadrature did not converge (last change {delta:e})")]
    QuadratureNonConvergence { delta: f64 },

    #[error("canonical frame reconstruction residual {residual:e} exceeds {tolerance:e}")]
    FrameConstruction { residual: f64, tolerance: f64 },

    #[error("oracle routes disagree by {discrepancy:e}")]
    OracleInconsistency { discrepancy: f64 },

    #[error("model invariant violated: {0}")]
    InvariantViolation(String),

    #[error("acos argument {0} outside [-1, 1]")]
    AcosDomain(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
