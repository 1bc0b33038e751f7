use thiserror::Error;

use crate::entropy::EntropyResult;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient mismatch: expected {expected}, found {found}")]
    AmbientMismatch { expected: String, found: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("containment violation: {0}")]
    Containment(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid endomorphism: {0}")]
    InvalidEndo(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exponent must be at least 1, got {0}")]
    InvalidExponent(u32),

    #[error("subgroup is not inert: (H + f(H))/H is infinite")]
    NotInert,

    #[error("no inert partial trajectory found for m <= {max_m}")]
    InertLevelNotFound { max_m: usize },

    #[error("entropy did not stabilize within the horizon")]
    NotStabilized(Box<EntropyResult>),

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),

    #[error("enumeration cap of {cap} elements exceeded")]
    CapExceeded { cap: usize },

    #[error("enumeration requires a torsion ambient")]
    RationalAmbient,

    #[error("counterexample mismatch: {0}")]
    CounterexampleMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
