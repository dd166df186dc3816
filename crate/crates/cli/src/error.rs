use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Validation(#[from] holderlab::Error),

    /// A library failure inside a pipeline stage.
    #[error("{0}")]
    Compute(holderlab::Error),

    #[error("snapshot line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<CliError>,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Stage name when the error came out of the run pipeline.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            CliError::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Attaches a stage name to failures of one pipeline step.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> CliResult<T>;
}

impl<T, E: Into<CliError>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, stage: &'static str) -> CliResult<T> {
        self.map_err(|e| CliError::Stage {
            stage,
            source: Box::new(e.into()),
        })
    }
}
