use alloc::string::String;

/// Errors raised by oracle construction, queries, evaluation and composition.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("element {element} is outside the ground set of size {ground_size}")]
    ElementOutOfRange { element: usize, ground_size: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("ground set of size {size} exceeds the enumeration cap {cap}")]
    EnumerationCap { size: usize, cap: usize },
    #[error("resource limit exhausted: {0}")]
    ResourceExhausted(String),
    #[error("unsupported evaluation mode: {0}")]
    Unsupported(String),
    #[error("algorithm accepted element {element}, which is dependent on its current selection")]
    IndependenceViolation { element: usize },
    #[error("perturbation step {index} is invalid: {reason}")]
    InvalidPerturbationStep { index: usize, reason: String },
    #[error("leaf algorithm for tree vertex {vertex} could not be built: {reason}")]
    LeafFactory { vertex: usize, reason: String },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
