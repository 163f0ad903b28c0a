use thiserror::Error;

/// Errors raised by the PHY building blocks and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input block does not have the length an operation requires.
    #[error("sizing error: {0}")]
    Sizing(String),
    /// A numeric parameter is outside its valid range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// The simulation configuration is invalid or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
    /// The channel matrix is (numerically) rank deficient.
    #[error("singular channel (condition estimate {0:.3e})")]
    SingularChannel(f64),
    /// A BER curve never crosses the requested target.
    #[error("target BER {target:e} not bracketed by curve {curve}")]
    Unbracketed { curve: String, target: f64 },
    /// Malformed CSV or config text.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// Filesystem error, passed through verbatim.
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn sizing(msg: impl Into<String>) -> Error {
    Error::Sizing(msg.into())
}
