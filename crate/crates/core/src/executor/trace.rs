use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::values::AnswerValue;
use crate::hexpr::{Diagnostic, NodePath, OpKind};
use crate::readers::ReaderCandidate;

/// Hard-failure codes produced before any question reaches the reader.
pub const PARSE_STAGE_CODES: &[&str] = &["parse", "parse_error", "invalid_expression", "no_candidates"];

/// Outcome of one execution. Rendered as `SUCCESS`, `SOFT_FAIL(code)` or
/// `HARD_FAIL(code)` wherever it is written out.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExecStatus {
    Success,
    SoftFail(String),
    HardFail(String),
}

/// Where a failure originated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureStage {
    Parse,
    Execution,
}

impl ExecStatus {
    pub fn is_success(&self) -> bool {
        matches!(self, ExecStatus::Success)
    }

    pub fn is_hard_fail(&self) -> bool {
        matches!(self, ExecStatus::HardFail(_))
    }

    pub fn code(&self) -> Option<&str> {
        match self {
            ExecStatus::Success => None,
            ExecStatus::SoftFail(c) | ExecStatus::HardFail(c) => Some(c.as_str()),
        }
    }

    /// `None` for success. Hard failures in parsing or validation count as
    /// parse-stage; everything else happened while answering questions.
    pub fn failure_stage(&self) -> Option<FailureStage> {
        match self {
            ExecStatus::Success => None,
            ExecStatus::HardFail(code) if PARSE_STAGE_CODES.contains(&code.as_str()) => {
                Some(FailureStage::Parse)
            }
            _ => Some(FailureStage::Execution),
        }
    }
}

impl fmt::Display for ExecStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExecStatus::Success => f.write_str("SUCCESS"),
            ExecStatus::SoftFail(c) => write!(f, "SOFT_FAIL({c})"),
            ExecStatus::HardFail(c) => write!(f, "HARD_FAIL({c})"),
        }
    }
}

impl FromStr for ExecStatus {
    type Err = String;

    /// Accepts `SUCCESS`, `SOFT_FAIL`, `HARD_FAIL`, optionally with a
    /// `(code)` suffix; case-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (head, code) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], s[i + 1..s.len() - 1].trim().to_string()),
            Some(_) => return Err(format!("bad status {s:?}")),
            None => (s, String::new()),
        };
        match head.trim().to_ascii_uppercase().as_str() {
            "SUCCESS" => Ok(ExecStatus::Success),
            "SOFT_FAIL" => Ok(ExecStatus::SoftFail(code)),
            "HARD_FAIL" => Ok(ExecStatus::HardFail(code)),
            _ => Err(format!("unknown status {s:?}")),
        }
    }
}

impl Serialize for ExecStatus {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExecStatus {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepKind {
    Primitive,
    Operation,
}

/// One resolved node. Primitive steps carry the question and reader output;
/// operation steps carry the operator and operand values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step_index: usize,
    pub node_path: NodePath,
    pub kind: StepKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question_after_substitution: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reader_candidates: Option<Vec<ReaderCandidate>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op_kind: Option<OpKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operands: Option<[AnswerValue; 2]>,
    pub output: AnswerValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub soft_fail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// One candidate expression tried by the fallback loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    /// 1-based position in the candidate list.
    pub candidate: usize,
    pub expression: String,
    pub status: ExecStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    /// Canonical text of the executed expression.
    pub expression: String,
    pub steps: Vec<TraceStep>,
    /// Final answer slots, `k → answer`.
    pub memory: BTreeMap<usize, String>,
    pub status: ExecStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attempts: Vec<Attempt>,
}

impl ExecutionTrace {
    pub fn primitive_steps(&self) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(|s| s.kind == StepKind::Primitive)
    }

    pub fn operation_steps(&self) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(|s| s.kind == StepKind::Operation)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_text_round_trip() {
        for s in [
            ExecStatus::Success,
            ExecStatus::SoftFail("comparison_tie".into()),
            ExecStatus::HardFail("reader_unavailable".into()),
        ] {
            assert_eq!(s.to_string().parse::<ExecStatus>().unwrap(), s);
        }
        assert_eq!(
            "hard_fail(parse)".parse::<ExecStatus>().unwrap(),
            ExecStatus::HardFail("parse".into())
        );
        assert_eq!("SOFT_FAIL".parse::<ExecStatus>().unwrap(), ExecStatus::SoftFail(String::new()));
        assert!("DONE".parse::<ExecStatus>().is_err());
        assert!("HARD_FAIL(x".parse::<ExecStatus>().is_err());
    }

    #[test]
    fn failure_stages() {
        assert_eq!(ExecStatus::Success.failure_stage(), None);
        assert_eq!(
            ExecStatus::HardFail("parse_error".into()).failure_stage(),
            Some(FailureStage::Parse)
        );
        assert_eq!(
            ExecStatus::HardFail("invalid_expression".into()).failure_stage(),
            Some(FailureStage::Parse)
        );
        assert_eq!(
            ExecStatus::HardFail("reader_unavailable".into()).failure_stage(),
            Some(FailureStage::Execution)
        );
        assert_eq!(
            ExecStatus::SoftFail("not_numeric".into()).failure_stage(),
            Some(FailureStage::Execution)
        );
    }
}
