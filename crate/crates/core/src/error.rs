//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A cable length fell below the degeneracy tolerance (platform at an
    /// exit point).
    DegenerateCable { cable: usize },
    /// The generalized mass matrix is not invertible.
    SingularMass,
    /// Square wrench matrix with |det| below tolerance; tensions are not
    /// uniquely determined.
    SingularWrenchMatrix,
    /// Non-positive or otherwise unusable trajectory duration.
    InvalidDuration,
    /// Non-positive or too-coarse time step.
    InvalidTimeStep,
    /// A grid dimension is zero.
    EmptyGrid,
    /// A simulation state component exceeded the divergence limit.
    NumericalDivergence { time: f64 },
    /// Model fields violate an invariant.
    InvalidModel(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateCable { cable } => {
                write!(f, "cable {cable} is degenerate (length below tolerance)")
            }
            Error::SingularMass => write!(f, "generalized mass matrix is singular"),
            Error::SingularWrenchMatrix => write!(f, "wrench matrix is singular"),
            Error::InvalidDuration => write!(f, "invalid trajectory duration"),
            Error::InvalidTimeStep => write!(f, "invalid time step"),
            Error::EmptyGrid => write!(f, "grid has a zero dimension"),
            Error::NumericalDivergence { time } => {
                write!(f, "simulation state diverged at t = {time} s")
            }
            Error::InvalidModel(msg) => write!(f, "invalid robot model: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
