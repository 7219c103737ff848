use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Cholesky breakdown; the Gram matrix was not positive definite.
    #[error("singular matrix: non-positive pivot {pivot:e} at row {row}")]
    SingularMatrix { row: usize, pivot: f64 },

    /// Coefficients became non-finite or exceeded the blow-up threshold.
    #[error("blow-up at step {step} (t = {time}): max |coefficient| = {max_abs:e}")]
    BlowUp {
        step: usize,
        time: f64,
        max_abs: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
