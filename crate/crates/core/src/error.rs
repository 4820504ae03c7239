use thiserror::Error;

use crate::linprog::LpError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
    #[error("invalid phantom configuration: {0}")]
    Config(String),
    #[error("instance has no candidates")]
    EmptyCandidates,
    #[error("no candidate satisfies the expectation constraints")]
    EmptyFeasibleSet,
    #[error("scenario set is unbounded in the weighted direction; the dual program is infeasible")]
    DualInfeasible,
    #[error("invalid instance document: {0}")]
    Parse(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn dimension(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}
