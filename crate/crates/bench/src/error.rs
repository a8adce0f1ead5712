use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{source_name}:{line}: {msg}")]
    Parse {
        source_name: String,
        line: u64,
        msg: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("cannot generate workload: {0}")]
    Generation(String),
    #[error(transparent)]
    Index(#[from] bits_kdtree::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl BenchError {
    pub(crate) fn parse(source_name: &str, line: u64, msg: impl Into<String>) -> Self {
        BenchError::Parse {
            source_name: source_name.to_string(),
            line,
            msg: msg.into(),
        }
    }
}
