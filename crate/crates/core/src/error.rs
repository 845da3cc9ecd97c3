//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    /// Modulus is not prime, or the divisibility condition tying n (or 2n)
    /// to q - 1 does not hold.
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    /// A claimed root of unity fails its order or primitivity check.
    #[error("invalid root of unity: {0}")]
    InvalidRoot(String),

    /// A 2n-th root psi is required by the negacyclic pipeline but the
    /// domain parameters do not carry one.
    #[error("psi (2n-th root of unity) required but absent")]
    MissingPsi,

    /// Zero has no multiplicative inverse.
    #[error("attempted to invert zero")]
    InversionOfZero,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// A spectrum was supplied in the wrong coefficient ordering.
    #[error("ordering mismatch: expected {expected} order")]
    OrderingMismatch { expected: &'static str },

    /// Shift-combine coding scalars make alpha + beta * omega^-k (or the
    /// half-size analogue) vanish at some index, so decoding is impossible.
    #[error("coding scalars vanish at index {index}")]
    CodingVanishes { index: usize },

    #[error("invalid fault count: {faults} faults for {sites} sites")]
    InvalidFaultCount { faults: usize, sites: usize },

    /// A fault plan was built for a different site universe than the
    /// execution it was applied to.
    #[error("site count mismatch: plan covers {plan} sites, target has {target}")]
    SiteCountMismatch { plan: usize, target: usize },

    /// Campaign configuration problems, with one message per offending field.
    #[error("invalid campaign config: {}", .0.join("; "))]
    ConfigError(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
