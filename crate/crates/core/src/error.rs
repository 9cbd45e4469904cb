use thiserror::Error;

use crate::word::GroupWord;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid letter {0:?}: expected 'a', 'b' or 'B'")]
    BadLetter(char),

    /// Structural problems with a pattern (length, alphabet, shift range).
    #[error("malformed pattern: {0}")]
    Malformed(String),

    /// A well-formed pattern that fails one of the Markov conditions.
    #[error("not a Markov pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "no k-fold lift of the standard system exists for k = {0} (need k = 6l+1 or 6l-1, k > 1)"
    )]
    NoLift(usize),

    #[error("orbit points of distinct elements {0} and {1} coincide at the base point")]
    FreenessViolation(GroupWord, GroupWord),

    #[error("realization: {0}")]
    Realization(String),

    #[error("refinement depth {depth} exceeds the configured limit {limit}")]
    DepthLimit { depth: usize, limit: usize },

    /// The ping-pong search or verification refused to certify.
    #[error("no certificate: {0}")]
    NoCertificate(String),

    #[error("inconsistent coding: {0}")]
    InconsistentCoding(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
