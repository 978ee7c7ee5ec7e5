use thiserror::Error;

/// Failure modes shared by every layer of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or inconsistent input (shapes, ambient dimensions, ranges).
    #[error("input error: {0}")]
    Input(String),

    /// A kernel failed to converge or two routes that must agree did not.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An operation was called outside its domain.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The pair has no common complement (dimensions differ).
    #[error("no common complement: {0}")]
    NoComplement(String),

    /// A complement certificate failed one of its checks.
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    /// A proposed involution failed one of its checks.
    #[error("invalid involution: {0}")]
    InvalidInvolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
