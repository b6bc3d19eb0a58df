//! Run settings: defaults, overlaid by a TOML file, overlaid by flags.

use std::path::{Path, PathBuf};
use std::time::Duration;

use hexpr_core::executor::{DateFormat, EmptyIntersectionPolicy, TiePolicy};
use hexpr_core::hexpr::{PlaceholderRecognizer, ValidateConfig};
use hexpr_core::readers::RemoteReaderConfig;
use hexpr_core::ExecConfig;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReaderKind {
    Oracle,
    Remote,
    Fixture,
}

/// Contents of `--config`. Relative paths resolve against the file's
/// directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub reader: Option<ReaderKind>,
    pub facts: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub script: Option<PathBuf>,
    pub top_k: Option<usize>,
    pub fallback: Option<usize>,
    pub trace_dir: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub parallel: Option<usize>,
    #[serde(default)]
    pub remote: RemoteSection,
    #[serde(default)]
    pub executor: ExecutorSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemoteSection {
    pub timeout_secs: Option<f64>,
    pub retries: Option<u32>,
    pub backoff_ms: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExecutorSection {
    pub use_entity_hints: Option<bool>,
    pub template_heads: Option<Vec<String>>,
    pub date_formats: Option<Vec<DateFormat>>,
    pub tie_policy: Option<TiePolicy>,
    pub empty_intersection: Option<EmptyIntersectionPolicy>,
    pub max_depth: Option<usize>,
    /// Also treat bare `A3` as a placeholder.
    pub bare_a_placeholders: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: FileConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.facts, &mut config.script, &mut config.trace_dir, &mut config.templates]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn validation(&self) -> ValidateConfig {
        let mut v = ValidateConfig::default();
        if let Some(d) = self.executor.max_depth {
            v.max_depth = d;
        }
        if self.executor.bare_a_placeholders == Some(true) {
            v.recognizer = PlaceholderRecognizer::with_bare_a();
        }
        v
    }

    pub fn exec_config(&self) -> ExecConfig {
        let mut c = ExecConfig {
            validation: self.validation(),
            ..ExecConfig::default()
        };
        let e = &self.executor;
        if let Some(h) = e.use_entity_hints {
            c.entity.use_hints = h;
        }
        if let Some(heads) = &e.template_heads {
            c.entity.template_heads = heads.clone();
        }
        if let Some(f) = &e.date_formats {
            c.date_formats = f.clone();
        }
        if let Some(t) = e.tie_policy {
            c.tie_policy = t;
        }
        if let Some(p) = e.empty_intersection {
            c.empty_intersection_policy = p;
        }
        if let Some(k) = self.top_k {
            c.top_k = k;
        }
        c
    }
}

#[derive(Debug, Clone)]
pub enum ReaderSettings {
    Oracle { facts: PathBuf },
    Remote(RemoteReaderConfig),
    Fixture { script: PathBuf },
}

/// Everything `exec` needs after precedence is resolved.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub reader: ReaderSettings,
    pub exec: ExecConfig,
    /// Most candidate expressions tried per item; all when unset.
    pub fallback: Option<usize>,
    pub trace_dir: Option<PathBuf>,
    pub parallel: usize,
}

/// Flag values for `exec`; `None` means "not given".
#[derive(Debug, Default, Clone)]
pub struct RunFlags {
    pub reader: Option<ReaderKind>,
    pub facts: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub script: Option<PathBuf>,
    pub top_k: Option<usize>,
    pub fallback: Option<usize>,
    pub trace_dir: Option<PathBuf>,
    pub parallel: Option<usize>,
}

impl RunConfig {
    pub fn resolve(file: &FileConfig, flags: RunFlags) -> Result<Self, CliError> {
        let kind = flags.reader.or(file.reader).unwrap_or(ReaderKind::Oracle);
        let missing = |flag: &str| CliError::Config(format!("--reader {kind:?} needs --{flag}").to_lowercase());
        let reader = match kind {
            ReaderKind::Oracle => ReaderSettings::Oracle {
                facts: flags.facts.or(file.facts.clone()).ok_or_else(|| missing("facts"))?,
            },
            ReaderKind::Fixture => ReaderSettings::Fixture {
                script: flags.script.or(file.script.clone()).ok_or_else(|| missing("script"))?,
            },
            ReaderKind::Remote => {
                let endpoint = flags.endpoint.or(file.endpoint.clone()).ok_or_else(|| missing("endpoint"))?;
                let mut remote = RemoteReaderConfig::new(endpoint);
                if let Some(t) = file.remote.timeout_secs {
                    remote.timeout = Duration::try_from_secs_f64(t)
                        .map_err(|_| CliError::Config(format!("invalid remote.timeout_secs {t}")))?;
                }
                if let Some(r) = file.remote.retries {
                    remote.retries = r;
                }
                if let Some(b) = file.remote.backoff_ms {
                    remote.backoff = Duration::from_millis(b);
                }
                ReaderSettings::Remote(remote)
            }
        };

        let mut exec = file.exec_config();
        if let Some(k) = flags.top_k {
            exec.top_k = k;
        }
        if exec.top_k == 0 {
            return Err(CliError::Config("top-k must be at least 1".into()));
        }
        let fallback = flags.fallback.or(file.fallback);
        if fallback == Some(0) {
            return Err(CliError::Config("fallback must be at least 1".into()));
        }
        let parallel = flags
            .parallel
            .or(file.parallel)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1);

        Ok(RunConfig {
            reader,
            exec,
            fallback,
            trace_dir: flags.trace_dir.or(file.trace_dir.clone()),
            parallel,
        })
    }
}
