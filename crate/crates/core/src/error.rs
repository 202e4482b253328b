use alloc::string::String;
use core::fmt;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input (mismatched surface kinds, degenerate
    /// lattices, non-tangent vectors, sign conditions, ...).
    InvalidInput(String),
    /// Two points closer than the evaluation threshold of the Green function.
    Singularity { distance: f64 },
    /// A stated precondition of an operation does not hold, or a theorem's
    /// hypothesis fails (e.g. the vorticity non-resonance condition).
    Precondition(String),
    /// Problem size exceeds a hard limit (subset enumeration, grid sizes).
    Capacity(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Singularity { distance } => {
                write!(f, "singular configuration: pair distance {distance:.3e}")
            }
            Error::Precondition(msg) => write!(f, "precondition failed: {msg}"),
            Error::Capacity(msg) => write!(f, "capacity exceeded: {msg}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
