use thiserror::Error;

/// Errors raised by the computational modules.
///
/// The variants line up with the exit-code contract of the command-line
/// driver: validation problems, size caps and I/O failures are kept apart so
/// that scripts can tell them from each other.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition or invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A construction or grid would exceed its configured size budget.
    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for returning a validation error from a format string.
macro_rules! invalid {
    ($($arg:tt)*) => {
        return Err($crate::error::Error::Validation(format!($($arg)*)))
    };
}
pub(crate) use invalid;
