use std::path::Path;

use hexpr_core::builder::TemplateError;
use hexpr_core::jsonl::JsonlError;
use hexpr_core::readers::FixtureError;

/// Failures that stop a command before or while it handles its inputs.
/// All of them exit with status 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error(transparent)]
    Templates(#[from] TemplateError),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
