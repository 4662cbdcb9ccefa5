use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible set. `name` is the field name.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point {value} outside domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("degree {n} exceeds maximum degree {max}")]
    DegreeOutOfRange { n: usize, max: usize },

    #[error("not integrable: {0}")]
    NotIntegrable(String),

    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },

    #[error("tridiagonal eigen-solver failed to converge for size {size}")]
    EigenNoConvergence { size: usize },

    #[error("time grid is not strictly increasing at index {index}")]
    NonMonotoneGrid { index: usize },

    #[error("process mismatch: expected {expected}, found {found}")]
    DescriptorMismatch {
        expected: &'static str,
        found: String,
    },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("not enough data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("table error: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the caller's input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::OutOfDomain { .. }
                | Error::DegreeOutOfRange { .. }
                | Error::NonMonotoneGrid { .. }
                | Error::DescriptorMismatch { .. }
                | Error::BasisMismatch(_)
                | Error::Config(_)
                | Error::Table(_)
        )
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
