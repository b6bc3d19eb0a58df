use std::path::PathBuf;

use hexpr_core::hexpr::{parse_hexpression, serialize, validate_with, Diagnostic, ValidateConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::files::{read_records, Output};
use crate::Outcome;

#[derive(Debug, clap::Args)]
pub struct ParseArgs {
    /// Expression to check.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    pub expression: Option<String>,
    /// JSONL file of `{"hexpression": ...}` lines.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Deserialize)]
struct Line {
    hexpression: String,
}

#[derive(Serialize)]
struct SyntaxError {
    code: &'static str,
    position: usize,
    message: String,
}

#[derive(Serialize)]
struct Checked {
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    canonical: Option<String>,
    executable: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<SyntaxError>,
}

fn check(input: &str, validation: &ValidateConfig) -> Checked {
    match parse_hexpression(input) {
        Ok(expr) => {
            let report = validate_with(&expr, validation);
            Checked {
                input: input.to_string(),
                canonical: Some(serialize(&expr)),
                executable: report.executable,
                diagnostics: report.diagnostics,
                error: None,
            }
        }
        Err(e) => Checked {
            input: input.to_string(),
            canonical: None,
            executable: false,
            diagnostics: Vec::new(),
            error: Some(SyntaxError {
                code: e.code(),
                position: e.position,
                message: e.to_string(),
            }),
        },
    }
}

pub fn run(args: ParseArgs, validation: &ValidateConfig) -> Result<Outcome, CliError> {
    let mut out = Output::open(args.output.as_deref())?;
    let outcome = match (&args.expression, &args.file) {
        (Some(expression), _) => {
            let checked = check(expression, validation);
            out.line(&serde_json::to_string_pretty(&checked).expect("serializes"))?;
            Outcome::from_ok(checked.executable)
        }
        (None, Some(file)) => {
            let lines: Vec<Line> = read_records(file)?;
            let mut executable = 0;
            for line in &lines {
                let checked = check(&line.hexpression, validation);
                executable += usize::from(checked.executable);
                out.json_line(&checked)?;
            }
            eprintln!("{executable}/{} executable", lines.len());
            Outcome::from_ok(executable == lines.len())
        }
        (None, None) => unreachable!("clap requires an expression or --file"),
    };
    out.finish()?;
    Ok(outcome)
}
