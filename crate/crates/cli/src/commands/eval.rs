use std::collections::HashMap;
use std::path::PathBuf;

use hexpr_core::builder::MusiqueType;
use hexpr_core::eval::{aggregate, executability_rate, GroupBy, ScoredPrediction};
use hexpr_core::executor::ExecStatus;
use serde::Deserialize;

use crate::error::CliError;
use crate::files::{read_records, Output};
use crate::{ItemId, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GroupByArg {
    None,
    #[value(name = "reasoning_type", alias = "type")]
    ReasoningType,
}

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    /// Predictions JSONL: `{"id", "predicted", "gold"?, "reasoning_type"?, "exec_status"?}`.
    pub predictions: PathBuf,
    /// Gold answers by id: converter output or a dataset file.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "none")]
    pub group_by: GroupByArg,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Deserialize)]
struct PredictionLine {
    id: ItemId,
    #[serde(default)]
    predicted: String,
    #[serde(default)]
    gold: Option<Vec<String>>,
    #[serde(default)]
    reasoning_type: Option<String>,
    #[serde(default)]
    exec_status: Option<ExecStatus>,
    #[serde(default)]
    executed_candidate: Option<usize>,
}

#[derive(Deserialize)]
struct GoldLine {
    #[serde(alias = "_id")]
    id: ItemId,
    #[serde(default)]
    answer: Option<String>,
    #[serde(default)]
    answer_aliases: Vec<String>,
    #[serde(default)]
    gold: Vec<String>,
    #[serde(default, alias = "type")]
    reasoning_type: Option<String>,
}

struct Gold {
    answers: Vec<String>,
    reasoning_type: Option<String>,
}

impl From<GoldLine> for Gold {
    fn from(g: GoldLine) -> Self {
        let id = g.id.to_string();
        let reasoning_type = g.reasoning_type.or_else(|| {
            let prefix = id.split("__").next().unwrap_or("");
            MusiqueType::parse(prefix).map(|t| t.as_str().to_string())
        });
        Gold {
            answers: g.answer.into_iter().chain(g.answer_aliases).chain(g.gold).collect(),
            reasoning_type,
        }
    }
}

pub fn run(args: EvalArgs) -> Result<Outcome, CliError> {
    let lines: Vec<PredictionLine> = read_records(&args.predictions)?;
    let gold: HashMap<String, Gold> = match &args.gold {
        Some(path) => read_records::<GoldLine>(path)?
            .into_iter()
            .map(|g| (g.id.to_string(), Gold::from(g)))
            .collect(),
        None => HashMap::new(),
    };

    let track_executability = lines.iter().any(|l| l.executed_candidate.is_some());
    let mut first_executable = Vec::with_capacity(lines.len());
    let mut predictions = Vec::with_capacity(lines.len());
    for line in lines {
        let id = line.id.to_string();
        let known = gold.get(&id);
        let answers = match (line.gold, known) {
            (Some(g), _) if !g.is_empty() => g,
            (_, Some(k)) if !k.answers.is_empty() => k.answers.clone(),
            _ => return Err(CliError::Input(format!("no gold answer for id {id:?}"))),
        };
        let status = line.exec_status.unwrap_or(ExecStatus::Success);
        first_executable.push(if status.is_hard_fail() { None } else { line.executed_candidate.or(Some(1)) });
        predictions.push(ScoredPrediction {
            id,
            predicted: line.predicted,
            gold: answers,
            reasoning_type: line.reasoning_type.or_else(|| known.and_then(|k| k.reasoning_type.clone())),
            exec_status: status,
        });
    }

    let group_by = match args.group_by {
        GroupByArg::None => GroupBy::None,
        GroupByArg::ReasoningType => GroupBy::ReasoningType,
    };
    let mut report = aggregate(&predictions, group_by);
    if track_executability {
        report.executability = Some(executability_rate(&first_executable));
    }

    let mut out = Output::open(args.output.as_deref())?;
    out.line(&report.to_json())?;
    out.finish()?;
    Ok(Outcome::Ok)
}
