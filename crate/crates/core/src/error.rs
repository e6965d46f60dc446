use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data (bad lengths, non-one-hot sections, bad pmf, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Vector or operator dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A numerical routine produced a non-finite intermediate.
    #[error("numerical failure at iteration {iteration}: {detail}")]
    NumericalFailure { iteration: usize, detail: String },

    /// Threshold search bracket does not straddle the transition.
    #[error("invalid bracket: {0}; widen [r_lo, r_hi]")]
    InvalidBracket(String),

    /// Configuration file or CLI override rejected.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn dim(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    /// Stable machine-readable category for exit reporting and FFI status codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::NumericalFailure { .. } => "numerical-failure",
            Error::InvalidBracket(_) => "invalid-bracket",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}
