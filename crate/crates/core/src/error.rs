use thiserror::Error;

use crate::group::Element;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("context mismatch: expected modulus {expected}, found {found}")]
    ContextMismatch { expected: u32, found: u32 },

    #[error("coordinate {value} out of range for modulus {n}")]
    OutOfRange { value: u64, n: u32 },

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("{0} is not a subsequence: missing element {1}")]
    NotSubsequence(String, Element),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} infeasible: n = {n} exceeds guard {guard}")]
    Infeasible { what: &'static str, n: u32, guard: u32 },

    #[error("element {0} is not in the kernel")]
    NotInKernel(Element),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("decomposition failed after {blocks_found} of {blocks_needed} blocks; remainder {remainder}")]
    DecompositionFailed {
        blocks_found: usize,
        blocks_needed: usize,
        remainder: String,
        blocks: Vec<String>,
    },
}
