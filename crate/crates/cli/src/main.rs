//! `hexpr`: parse, execute, convert and score H-expressions.
//!
//! Exit status: 0 when every item succeeds, 1 when some item fails, 2 on
//! configuration or I/O errors.

mod commands;
mod config;
mod error;
mod files;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use commands::{convert, eval, exec, parse};
use config::FileConfig;

#[derive(Debug, Parser)]
#[command(name = "hexpr", version, about = "Parse, execute, convert and score H-expressions")]
struct Cli {
    /// TOML settings file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check expressions and print their canonical form.
    Parse(parse::ParseArgs),
    /// Execute expressions against a reader.
    Exec(exec::ExecArgs),
    /// Build gold expressions from a dataset file.
    Convert(convert::ConvertArgs),
    /// Score predictions.
    Eval(eval::EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    ItemFailures,
}

impl Outcome {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Outcome::Ok
        } else {
            Outcome::ItemFailures
        }
    }
}

/// Dataset ids are strings, but numbers are accepted too.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ItemId {
    Text(String),
    Number(serde_json::Number),
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ItemId::Text(s) => f.write_str(s),
            ItemId::Number(n) => write!(f, "{n}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = FileConfig::load(cli.config.as_deref()).and_then(|file| match cli.command {
        Command::Parse(args) => parse::run(args, &file.validation()),
        Command::Exec(args) => exec::run(args, &file),
        Command::Convert(args) => convert::run(args, &file),
        Command::Eval(args) => eval::run(args),
    });
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ItemFailures) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hexpr: {e}");
            ExitCode::from(2)
        }
    }
}
