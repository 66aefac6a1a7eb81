use thiserror::Error;

/// Errors raised by the geometry toolkit.
///
/// `Validation` covers malformed inputs (non-symmetric matrices, wrong
/// determinant, invalid triangles, bad labelings). `Numerical` covers guards
/// that abort an iterative computation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("zero tangent vector")]
    ZeroVector,

    #[error("numerical guard: {0}")]
    Numerical(String),

    #[error("functional is not convex along the probed direction: {0}")]
    NonConvex(String),

    #[error("no boundary limit: {0}")]
    NoBoundaryLimit(String),

    #[error("geodesic is not unique between antipodal points")]
    Antipodal,
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// True for errors the CLI maps to the numerical-guard exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::NonConvex(_) | Error::NoBoundaryLimit(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
