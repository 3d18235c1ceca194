//! Shared error type. Variants are grouped by whether they indicate bad input
//! text (`Parse`) or a domain-level refusal (everything else); the CLI maps
//! the former to exit code 2 and the latter to exit code 3.

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Input text did not match the expected grammar.
    #[error("parse error: {0}")]
    Parse(String),

    /// A zero was supplied where a torus coordinate (a unit) is required.
    #[error("zero is not a point of the multiplicative group")]
    ZeroInput,

    /// Trial division gave up before fully factoring a rational.
    /// The unfactored cofactor is reported rather than guessed at.
    #[error("cannot factor {remaining} by trial division up to {bound}")]
    Unfactorable { remaining: BigInt, bound: u64 },

    /// An exponent or index overflowed the fixed-width range used for it.
    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    /// Mismatched dimensions between two objects that must agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Exact iteration was stopped by the configured size cap.
    #[error("iteration overflow: intermediate value exceeded {cap_bits} bits")]
    IterationOverflow { cap_bits: u64 },

    /// The requested operation only supports specific variety shapes.
    #[error("unsupported variety shape: {0}")]
    UnsupportedShape(String),

    /// A curve/dynamics operation refused to run because the map is
    /// affine-conjugate to a monomial or Chebyshev polynomial.
    #[error("map is {0}-conjugate; the periodic-intersection bound does not apply")]
    ClassificationGate(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            _ => 3,
        }
    }
}
