use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no atoms matched the filter {filter:?}")]
    NoMatchingAtoms { filter: Vec<String> },

    #[error("simplex budget exceeded: more than {budget} simplices; lower max_dim or max_radius")]
    SimplexBudget { budget: usize },

    #[error(
        "vertex guard exceeded: {n} vertices > limit {limit}; enumerating all 2^{n} induced \
         subcomplexes is impractical to compute (raise the limit explicitly to override)"
    )]
    VertexGuard { n: usize, limit: usize },

    #[error("subcomplex inclusion violated: {0}")]
    NotIncluded(String),

    #[error("incomplete graded Betti table: {0}")]
    IncompleteTable(String),

    #[error("eigensolver failed for k={k} at scales ({eps_i}, {eps_j}): {message}")]
    Eigensolver {
        k: usize,
        eps_i: f64,
        eps_j: f64,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
