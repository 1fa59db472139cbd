use thiserror::Error;

/// Errors produced by the partial-search library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A parallel-scheme definition does not admit the requested configuration.
    #[error("{definition} violated: {detail}")]
    Constraint {
        definition: &'static str,
        detail: String,
    },

    /// The request exceeds a hard computational cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A root finder could not bracket or converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Expected iterations requested for a zero success probability.
    #[error("success probability is zero, expected iteration number is undefined")]
    ZeroProbability,

    /// A computed quantity left its mathematically guaranteed range.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    /// The state-vector oracle disagrees with the subspace model.
    #[error(
        "subspace verification failed for sequence {sequence:?} (target {target}): deviation {deviation:e} exceeds {tol:e}"
    )]
    Verification {
        sequence: String,
        target: u64,
        deviation: f64,
        tol: f64,
    },

    /// Malformed operator-sequence text.
    #[error("cannot parse operator sequence {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
