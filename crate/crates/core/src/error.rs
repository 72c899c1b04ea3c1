use thiserror::Error;

/// Errors produced by the simulation and evaluation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent configuration: unknown ids, missing certificates,
    /// parameters outside the admissible range of a family.
    #[error("configuration error: {0}")]
    Config(String),

    /// A value left the finite range of `f64`.
    #[error("numeric overflow: {0}")]
    NumericOverflow(String),

    /// A tail or truncation bound could not be brought under the requested tolerance.
    #[error("precision unreachable: {0}")]
    PrecisionUnreachable(String),

    /// A mathematical precondition failed (e.g. the tilt exceeds a clock rate).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid argument to a data-structure operation.
    #[error("argument error: {0}")]
    Argument(String),

    /// Operation not valid in the current state (e.g. sampling an empty index).
    #[error("state error: {0}")]
    State(String),

    /// Operation requires the other growth mode.
    #[error("mode error: {0}")]
    Mode(String),

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures caused by floating-point range or certified precision.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NumericOverflow(_) | Error::PrecisionUnreachable(_) | Error::Domain(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
