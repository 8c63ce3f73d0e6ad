use thiserror::Error;

/// Errors raised by net construction, scrambling, folding and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A real argument fell outside the half-open unit interval.
    #[error("value {0} is outside [0, 1)")]
    Domain(f64),

    /// A resolution or index exceeded the stored digit precision.
    #[error("precision exceeded: {0}")]
    Precision(String),

    /// The requested base, dimension or scheme is not supported.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Arguments were individually valid but inconsistent with each other.
    #[error("contract violated: {0}")]
    Contract(String),

    #[error("index {index} overflows {capacity} representable points")]
    IndexOverflow { index: u64, capacity: String },

    /// Malformed point-set text.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
