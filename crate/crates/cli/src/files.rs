use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use hexpr_core::jsonl::{read_jsonl_file, JsonlError};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

/// All records of a JSONL file; parse errors name the file and line.
pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    read_jsonl_file(path).map_err(|e| match e {
        JsonlError::Json { .. } => CliError::Input(format!("{}: {e}", path.display())),
        other => other.into(),
    })
}

/// `--output` file, or stdout when absent.
pub struct Output {
    path: Option<PathBuf>,
    inner: Box<dyn Write>,
}

impl Output {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        let inner: Box<dyn Write> = match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                }
                Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?))
            }
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Output {
            path: path.map(Path::to_path_buf),
            inner,
        })
    }

    pub fn json_line<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let line = serde_json::to_string(value).expect("output rows serialize");
        self.line(&line)
    }

    pub fn line(&mut self, text: &str) -> Result<(), CliError> {
        writeln!(self.inner, "{text}").map_err(|e| self.error(e))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush().map_err(|e| self.error(e))
    }

    fn error(&self, e: io::Error) -> CliError {
        match &self.path {
            Some(p) => CliError::io(p, e),
            None => CliError::io(Path::new("<stdout>"), e),
        }
    }
}
