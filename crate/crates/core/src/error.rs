//! Error type shared by every module in the crate.

use core::fmt;

/// Failure modes of the simulation kernels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A parameter violates an operation's precondition.
    InvalidParameter(&'static str),
    /// The operation is not valid in the current state (e.g. sampling an
    /// edge from an edgeless graph).
    InvalidState(&'static str),
    /// A rejection-sampling generator exhausted its resample budget.
    GenerationFailure { attempts: u32 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InvalidState(msg) => write!(f, "invalid state: {msg}"),
            Error::GenerationFailure { attempts } => {
                write!(f, "generation failed after {attempts} attempts")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
