use thiserror::Error;

use crate::newton::NewtonOutcome;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial must have degree >= 1")]
    EmptyPolynomial,
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
    #[error("degree {0} is too small for this operation")]
    DegreeTooSmall(usize),
    #[error("no traces")]
    NoTraces,
    #[error("bound undefined for degree {0} (needs d >= 2)")]
    BoundUndefined(u64),
    #[error("zero has only the trivial root")]
    ZeroRadicand,
    #[error("newton seed must be nonzero")]
    ZeroSeed,
    #[error("no convergence after {} iterations", .0.iterations)]
    NoConvergence(NewtonOutcome),
    #[error("zero eigenvalue present; deflate t first")]
    ZeroEigenvalue,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
