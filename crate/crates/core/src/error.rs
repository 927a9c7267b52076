//! Error types shared across the engine.

use thiserror::Error;

/// Errors produced by construction and verification routines.
///
/// `Internal` is reserved for violations of identities the engine relies on
/// (for example a Lax right-hand side with residual outside the tangent
/// space); callers map it to a distinct process exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid algebra type {family}{rank}: {reason}")]
    InvalidAlgebra {
        family: char,
        rank: usize,
        reason: String,
    },

    #[error("{what} is not available for exceptional types; the root-level rank check (rank-check) covers them")]
    UnsupportedType { what: String },

    #[error("level k={k} out of range 1..={max}")]
    LevelOutOfRange { k: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
