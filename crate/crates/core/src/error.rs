use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("graph is empty after cleaning: {0}")]
    EmptyGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("node {node} is isolated")]
    IsolatedNode { node: usize },

    #[error("node {b} is not tree-adjacent to {a}")]
    NotTreeAdjacent { a: usize, b: usize },

    #[error("node {0} is not covered by the tree or is its root")]
    NotATarget(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("fold {fold} has a single class in its {split} split")]
    SingleClass { fold: usize, split: &'static str },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("checkpoint checksum mismatch (stored {stored:016x}, computed {computed:016x})")]
    ChecksumMismatch { stored: u64, computed: u64 },

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
