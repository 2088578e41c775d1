use thiserror::Error;

/// Errors raised by the library. The variants are grouped so that a front end
/// can map them onto distinct exit codes (see [`Error::class`]).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("valuation of zero is infinite")]
    InfiniteValuation,

    #[error("polynomial is not monic: {0}")]
    NotMonic(String),

    #[error("polynomial is reducible over Q: witness factor {witness}")]
    Reducible { witness: String },

    #[error("unsupported prime {p}: {reason}")]
    UnsupportedPrime { p: u64, reason: String },

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    /// A mathematically meaningless request, such as the identity direction
    /// or a direction in which the action is not mixing.
    #[error("{0}")]
    Domain(String),

    #[error("infinitely many fixed points at n = {n:?} (ideal is not zero-dimensional)")]
    InfiniteCount { n: Vec<i64> },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("not available: {0}")]
    NotAvailable(String),
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Domain,
    Resource,
    Internal,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Domain(_) | Error::InfiniteCount { .. } | Error::InfiniteValuation => {
                ErrorClass::Domain
            }
            Error::Resource(_) => ErrorClass::Resource,
            Error::Internal(_) => ErrorClass::Internal,
            _ => ErrorClass::Usage,
        }
    }

    pub(crate) fn identity_direction() -> Self {
        Error::Domain("identity direction: infinitely many fixed points".to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
