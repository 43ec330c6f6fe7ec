use std::fmt;

/// Errors reported by the library.
///
/// `Domain` covers violated numerical preconditions (energies out of range,
/// states off the level set). `Validation` covers structurally invalid input
/// data such as non-monotone staircase sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Domain(String),
    Validation(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
