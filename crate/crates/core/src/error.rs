use thiserror::Error;

use crate::instance::ValidationReport;

/// Failures while reading an instance document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: negative arc cost")]
    NegativeCost { line: usize },
    #[error("line {line}: duplicate Root declaration")]
    DuplicateRoot { line: usize },
    #[error("line {line}: terminal {node} is the root")]
    TerminalIsRoot { line: usize, node: usize },
    #[error("line {line}: arc {tail} -> {head} joins two Steiner nodes (quasi-bipartite violation)")]
    QuasiBipartiteViolation { line: usize, tail: usize, head: usize },
}

/// Errors raised while building an [`Instance`](crate::Instance) in memory.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("node {0} out of range")]
    NodeOutOfRange(usize),
    #[error("arc {0} is a self-loop")]
    SelfLoop(usize),
    #[error("root is listed as a terminal")]
    RootIsTerminal,
    #[error("terminal {0} listed twice")]
    DuplicateTerminal(usize),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("instance failed validation:\n{0}")]
    Invalid(ValidationReport),
    /// An algorithm invariant did not hold. Always a bug.
    #[error("invariant violated{}: {detail}", phase.map(|p| format!(" in phase {p}")).unwrap_or_default())]
    Invariant { phase: Option<usize>, detail: String },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("{what} = {value} exceeds limit {limit}")]
    Limit { what: &'static str, value: usize, limit: usize },
    #[error("instance is infeasible: some terminal is unreachable from the root")]
    Infeasible,
    #[error("certificate: {0}")]
    Certificate(String),
}

impl Error {
    pub(crate) fn invariant(detail: impl Into<String>) -> Self {
        Error::Invariant { phase: None, detail: detail.into() }
    }

    pub(crate) fn in_phase(self, phase: usize) -> Self {
        match self {
            Error::Invariant { phase: None, detail } => Error::Invariant { phase: Some(phase), detail },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
