use thiserror::Error;

use crate::exactnum::LogValue;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("gram matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("sublattice is not saturated (torsion quotient)")]
    NotSaturated,

    /// The rank exceeds the configured limit of the exact slope search. The
    /// bracket `best_found <= mu_max <= upper_bound` is still available.
    #[error("exact search unavailable for rank {rank} (limit {limit})")]
    ExactSearchUnavailable {
        rank: usize,
        limit: usize,
        best_found: LogValue,
        upper_bound: LogValue,
    },

    #[error("lattice enumeration exceeded its node budget of {0}")]
    EnumerationBudget(u64),

    #[error("search not converged: {0}")]
    SearchNotConverged(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
