use std::path::{Path, PathBuf};

use hexpr_core::builder::{convert_2wiki, convert_musique, ConvertedRecord, MusiqueRecord, TemplateTable, TwoWikiRecord};

use crate::config::FileConfig;
use crate::error::CliError;
use crate::files::{read_records, Output};
use crate::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Dataset {
    Musique,
    #[value(name = "2wiki")]
    TwoWiki,
}

#[derive(Debug, clap::Args)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub dataset: Dataset,
    /// Dataset JSONL with the published field names.
    pub input: PathBuf,
    /// JSON object of extra `relation -> template` entries (2WikiQA).
    #[arg(long)]
    pub templates: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn templates(path: Option<&Path>) -> Result<TemplateTable, CliError> {
    Ok(match path {
        Some(p) => TemplateTable::load(p)?,
        None => TemplateTable::default(),
    })
}

pub fn run(args: ConvertArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    let rows: Vec<Result<ConvertedRecord, String>> = match args.dataset {
        Dataset::Musique => read_records::<MusiqueRecord>(&args.input)?
            .iter()
            .map(|r| convert_musique(r).map_err(|e| e.to_string()))
            .collect(),
        Dataset::TwoWiki => {
            let table = templates(args.templates.as_deref().or(file.templates.as_deref()))?;
            read_records::<TwoWikiRecord>(&args.input)?
                .iter()
                .map(|r| convert_2wiki(r, &table).map_err(|e| e.to_string()))
                .collect()
        }
    };

    let mut out = Output::open(args.output.as_deref())?;
    let mut skipped = 0;
    for row in &rows {
        match row {
            Ok(r) => out.json_line(r)?,
            Err(e) => {
                skipped += 1;
                eprintln!("skipped {e}");
            }
        }
    }
    out.finish()?;
    if skipped > 0 {
        eprintln!("converted {}/{} record(s)", rows.len() - skipped, rows.len());
    }
    Ok(Outcome::from_ok(skipped == 0))
}
