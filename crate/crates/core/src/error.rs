use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A clustering does not partition the vertex set of the graph it is used with.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested operation exceeds what an engine or oracle is configured to handle.
    #[error("{what} supports at most {limit} vertices, got {n}")]
    Capability {
        what: &'static str,
        limit: usize,
        n: usize,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
