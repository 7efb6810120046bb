use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("label must not be empty")]
    EmptyLabel,
    #[error("edge references unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(usize, usize),
    #[error("component {0} is not connected")]
    NotConnected(usize),
}

/// Failure to apply a rule at a given match.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("match does not embed the left graph of rule {0:?}")]
    InvalidMatch(String),
    #[error("gluing condition violated: rule creates edge {0}-{1} already present in the host")]
    Gluing(usize, usize),
    #[error("deleting host vertex {0} would leave a dangling edge")]
    DanglingEdge(usize),
    #[error("rule is invalid: {0}")]
    InvalidRule(String),
}

/// Reasons a partial matching does not define a composite rule.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("second rule creates edge {0}-{1} that the first rule already provides")]
    ParallelEdge(usize, usize),
    #[error("vertex {0} is removed while an edge still uses it")]
    DanglingEdge(usize),
    #[error("matched elements disagree on labels")]
    LabelMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate node id {0}")]
    DuplicateId(i64),
    #[error("dangling edge at node {0}: node is undeclared or absent from that side")]
    Dangling(i64),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(i64, i64),
    #[error("{0}")]
    Invalid(String),
}
