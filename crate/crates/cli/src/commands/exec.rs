use std::path::PathBuf;

use hexpr_core::executor::ExecStatus;
use hexpr_core::readers::{FactStore, FixtureReader, OracleReader, Passage, Reader, RemoteReader};
use hexpr_core::{execute_with_fallback, ExecConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{FileConfig, ReaderKind, ReaderSettings, RunConfig, RunFlags};
use crate::error::CliError;
use crate::files::{read_records, Output};
use crate::{ItemId, Outcome};

#[derive(Debug, clap::Args)]
pub struct ExecArgs {
    /// JSONL of `{"id", "hexpression" | "candidates", "passages"}` lines.
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub reader: Option<ReaderKind>,
    /// Oracle facts: JSONL of `{"question", "answers"}`.
    #[arg(long)]
    pub facts: Option<PathBuf>,
    /// Remote reader URL.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Fixture script: JSONL of `{"pattern", "answers" | "candidates"}`.
    #[arg(long)]
    pub script: Option<PathBuf>,
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Try at most this many candidate expressions per item.
    #[arg(long)]
    pub fallback: Option<usize>,
    /// Write `<id>.json` traces here.
    #[arg(long)]
    pub trace_dir: Option<PathBuf>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub parallel: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl ExecArgs {
    fn flags(&self) -> RunFlags {
        RunFlags {
            reader: self.reader,
            facts: self.facts.clone(),
            endpoint: self.endpoint.clone(),
            script: self.script.clone(),
            top_k: self.top_k,
            fallback: self.fallback,
            trace_dir: self.trace_dir.clone(),
            parallel: self.parallel,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PassageInput {
    Text(String),
    Full(Passage),
}

#[derive(Deserialize)]
struct Item {
    id: ItemId,
    #[serde(default)]
    hexpression: Option<String>,
    #[serde(default)]
    candidates: Vec<String>,
    #[serde(default)]
    passages: Vec<PassageInput>,
}

#[derive(Debug, Serialize)]
struct ItemResult {
    id: String,
    predicted: String,
    exec_status: ExecStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    executed_candidate: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_path: Option<String>,
}

fn build_reader(settings: &ReaderSettings) -> Result<Box<dyn Reader>, CliError> {
    Ok(match settings {
        ReaderSettings::Oracle { facts } => Box::new(OracleReader::new(FactStore::load(facts)?)),
        ReaderSettings::Fixture { script } => Box::new(FixtureReader::load(script)?),
        ReaderSettings::Remote(config) => Box::new(RemoteReader::new(config.clone())),
    })
}

/// File-system safe trace name for an item id.
fn trace_file_name(id: &str) -> String {
    let stem: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect();
    let stem = stem.trim_start_matches('.');
    format!("{}.json", if stem.is_empty() { "_" } else { stem })
}

fn run_item(item: Item, reader: &dyn Reader, config: &ExecConfig, run: &RunConfig) -> Result<ItemResult, CliError> {
    let id = item.id.to_string();
    let mut candidates: Vec<String> = item.hexpression.into_iter().chain(item.candidates).collect();
    if let Some(n) = run.fallback {
        candidates.truncate(n);
    }
    let passages: Vec<Passage> = item
        .passages
        .into_iter()
        .map(|p| match p {
            PassageInput::Text(text) => Passage {
                title: String::new(),
                text,
            },
            PassageInput::Full(p) => p,
        })
        .collect();

    let (mut result, trace) = match execute_with_fallback(&candidates, &passages, reader, config) {
        Ok(r) => (
            ItemResult {
                id: id.clone(),
                predicted: r.predicted(),
                exec_status: r.status().clone(),
                executed_candidate: Some(r.executed_candidate()),
                error: r.trace.error.clone(),
                trace_path: None,
            },
            r.trace,
        ),
        Err(failed) => {
            let trace = failed.trace();
            (
                ItemResult {
                    id: id.clone(),
                    predicted: String::new(),
                    exec_status: failed.status(),
                    executed_candidate: None,
                    error: failed.attempts.last().and_then(|a| a.message.clone()).or(Some(failed.to_string())),
                    trace_path: None,
                },
                trace,
            )
        }
    };

    if let Some(dir) = &run.trace_dir {
        let path = dir.join(trace_file_name(&id));
        std::fs::write(&path, trace.to_json() + "\n").map_err(|e| CliError::io(&path, e))?;
        result.trace_path = Some(path.display().to_string());
    }
    Ok(result)
}

pub fn run(args: ExecArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    let run = RunConfig::resolve(file, args.flags())?;
    let items: Vec<Item> = read_records(&args.input)?;
    let reader = build_reader(&run.reader)?;
    if let Some(dir) = &run.trace_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run.parallel)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let results: Vec<ItemResult> = pool.install(|| {
        items
            .into_par_iter()
            .map(|item| run_item(item, reader.as_ref(), &run.exec, &run))
            .collect::<Result<_, _>>()
    })?;

    let mut out = Output::open(args.output.as_deref())?;
    let mut failed = 0;
    for r in &results {
        failed += usize::from(!r.exec_status.is_success());
        out.json_line(r)?;
    }
    out.finish()?;
    if failed > 0 {
        eprintln!("{failed}/{} item(s) did not succeed", results.len());
    }
    Ok(Outcome::from_ok(failed == 0))
}
