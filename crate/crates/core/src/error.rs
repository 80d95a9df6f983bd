use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("invalid algebra presentation: {}", .0.join("; "))]
    InvalidAlgebra(Vec<String>),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown basis element `{0}`")]
    UnknownBasis(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("operator is not right-invariant (witness: {witness})")]
    InvarianceViolation { witness: String },
    #[error("coproduct is not coassociative on `{0}`")]
    NotCoassociative(String),
    #[error("invalid realization data: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
