//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature could not reach the requested absolute tolerance
    /// within its evaluation budget.
    #[error(
        "quadrature did not converge: error estimate {achieved:.3e} > requested {requested:.3e} \
         after {n_evals} evaluations"
    )]
    NonConvergence {
        achieved: f64,
        requested: f64,
        n_evals: u64,
    },

    /// A quantity that must be a correlation came out of [-1, 1] by more than
    /// numerical slack, indicating catastrophic cancellation.
    #[error("correlation out of range: {value}")]
    CorrelationOutOfRange { value: f64 },

    /// Grid root counting failed to stabilize within the round budget.
    #[error("root count for degree {d} did not stabilize after {rounds} refinement rounds")]
    UnstableRootCount { d: u32, rounds: u32 },

    /// The Sturm oracle requires a squarefree polynomial (a.s. the case for
    /// continuous coefficient distributions).
    #[error("sturm oracle: polynomial is not squarefree")]
    NotSquarefree,

    /// The exact Sturm oracle is limited to small degrees.
    #[error("sturm oracle: degree {d} exceeds the supported maximum {max}")]
    DegreeTooLarge { d: u32, max: u32 },

    /// Too many Monte Carlo samples had to be excluded for failed root counts.
    #[error("monte carlo: {excluded} of {total} samples excluded (limit 0.1%)")]
    ExcludedSamples { excluded: u64, total: u64 },

    /// The series branch and the direct branch of a small-lag evaluation
    /// disagree at the switchover point, indicating a cancellation bug.
    #[error("branch mismatch in {quantity} at the small-lag cutoff: relative gap {gap:.3e}")]
    BranchMismatch { quantity: &'static str, gap: f64 },
}
