use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// Window parameters violate the symmetry or positivity requirement.
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("matrix is not symplectic (residual {residual:.3e}, tolerance {tol:.3e})")]
    NotSymplectic { residual: f64, tol: f64 },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("shift {shift} is not a multiple of the grid step {step}")]
    OffGridShift { shift: f64, step: f64 },

    #[error("unsupported lattice: {0}")]
    UnsupportedLattice(String),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("no convergence after {iterations} iterations (last relative change {last_change:.3e})")]
    NonConvergence {
        iterations: usize,
        last_change: f64,
        partial_estimate: f64,
    },

    /// Two independent computations of the same quantity disagree.
    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable, machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "invalid-dimension",
            Error::InvalidWindow(_) => "invalid-window",
            Error::NotSymplectic { .. } => "not-symplectic",
            Error::NotPositiveDefinite(_) => "not-positive-definite",
            Error::GridMismatch(_) => "grid-mismatch",
            Error::OffGridShift { .. } => "off-grid-shift",
            Error::UnsupportedLattice(_) => "unsupported-lattice",
            Error::UnsupportedDimension(_) => "unsupported-dimension",
            Error::NonConvergence { .. } => "non-convergence",
            Error::CrossCheck(_) => "cross-check-failed",
            Error::ResourceCap(_) => "resource-cap",
            Error::InvalidConfig(_) => "invalid-config",
            Error::Parse(_) => "parse-error",
            Error::Io(_) => "io-error",
        }
    }

    /// Process exit code: 2 invalid input, 3 numerical non-convergence,
    /// 4 resource cap exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } | Error::CrossCheck(_) => 3,
            Error::ResourceCap(_) => 4,
            _ => 2,
        }
    }
}
