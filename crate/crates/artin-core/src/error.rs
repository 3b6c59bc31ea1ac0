//! Error taxonomy shared by every module in the crate.

use thiserror::Error;

/// All fallible operations in this crate return this error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation
    /// (`a ∈ {−1, 0, 1}`, composite modulus, zero denominators, …).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured memory or size budget would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// An internal invariant failed; indicates a construction bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    /// Power-series expansion requested for a function with a pole at z = 0.
    #[error("series expansion undefined: denominator vanishes at z = 0")]
    PoleAtOrigin,

    /// Evaluation of a rational function at a point where its reduced
    /// denominator vanishes.
    #[error("evaluation at a pole: {0}")]
    PoleAtPoint(String),

    /// Comparison inputs describe different experiments (base, statistic, …).
    #[error("mismatched comparison inputs: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Domain(_) => 3,
            Error::Resource(_) => 4,
            _ => 1,
        }
    }
}
