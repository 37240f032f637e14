use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("node count must be at least 1")]
    EmptyGraph,
    #[error("node id {id} out of range [1, {n}]")]
    NodeOutOfRange { id: usize, n: usize },
    #[error("loop in edge list: ({0}, {0})")]
    LoopInEdgeList(usize),
    #[error("vertex set must be nonempty")]
    EmptyVertexSet,
    #[error("digraph is not symmetric: arc ({0}, {1}) has no reverse")]
    NotSymmetric(usize, usize),
    #[error("size limit exceeded: n = {n} > {limit} for {what}")]
    SizeLimit {
        what: &'static str,
        n: usize,
        limit: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{msg} at line {line}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
