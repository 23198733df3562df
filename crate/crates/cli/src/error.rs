use std::path::PathBuf;

/// Non-success results that still produced complete output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Success,
    /// A proven inequality failed, or an optimizer run did not converge or lost monotonicity.
    Failure,
    /// The conjectured inequality failed on a sampled triple.
    ConjectureViolation,
    /// An optimizer run beat the conjectured constant; the case was written to disk.
    Counterexample,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Success => 0,
            Self::Failure => 1,
            Self::ConjectureViolation => 3,
            Self::Counterexample => 5,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Numerical(#[from] commutator_bounds::Error),

    #[error("worker pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Io { .. } => 4,
            Self::Numerical(_) | Self::Pool(_) => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
