use shapecode_core::Error as CoreError;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("stream was shaped with a different tree (hash {found:#018x}, expected {expected:#018x})")]
    TreeMismatch { expected: u64, found: u64 },
    #[error("corrupt stream: {0}")]
    Stream(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 infeasible, 3 free cheapest symbol, 4 I/O or
    /// corrupt stream, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::InfeasibleRate { .. } | CoreError::InfeasibleBudget { .. }) => 2,
            CliError::Core(CoreError::ZeroMinCost) => 3,
            CliError::Core(CoreError::CorruptStream(_))
            | CliError::Io { .. }
            | CliError::TreeMismatch { .. }
            | CliError::Stream(_) => 4,
            _ => 1,
        }
    }
}
