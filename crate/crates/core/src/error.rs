use thiserror::Error;

use crate::access::Mode;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operand dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A configured enumeration or construction bound was exceeded.
    #[error("size limit exceeded: {0}")]
    Size(String),

    /// A channel parameter outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("coalition is not qualified in {mode} mode")]
    Unqualified { mode: Mode },

    /// The supplied share bits are not the restriction of any codeword.
    #[error("integrity error: shares are inconsistent with every codeword of the code")]
    Integrity,

    #[error("code digest mismatch: shares were dealt for {found}, loaded code is {expected}")]
    DigestMismatch { expected: String, found: String },

    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
}

impl Error {
    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            line,
            msg: msg.into(),
        }
    }
}
