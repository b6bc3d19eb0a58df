//! Answer EM/F1, executability rate and per-type aggregation.

use std::collections::{BTreeMap, HashMap};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::executor::{normalize_answer, normalized_tokens, ExecStatus, FailureStage};

pub fn exact_match<S: AsRef<str>>(predicted: &str, gold: &[S]) -> f64 {
    let p = normalize_answer(predicted);
    if gold.iter().any(|g| normalize_answer(g.as_ref()) == p) {
        1.0
    } else {
        0.0
    }
}

/// Max over gold answers of bag-of-tokens F1 on normalized tokens. Two
/// empty token lists count as a perfect match.
pub fn token_f1<S: AsRef<str>>(predicted: &str, gold: &[S]) -> f64 {
    let pred = normalized_tokens(predicted);
    gold.iter()
        .map(|g| f1_tokens(&pred, &normalized_tokens(g.as_ref())))
        .fold(0.0, f64::max)
}

fn f1_tokens(pred: &[String], gold: &[String]) -> f64 {
    if pred.is_empty() || gold.is_empty() {
        return if pred.is_empty() && gold.is_empty() { 1.0 } else { 0.0 };
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in gold {
        *counts.entry(t).or_default() += 1;
    }
    let mut common = 0usize;
    for t in pred {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                common += 1;
            }
        }
    }
    if common == 0 {
        return 0.0;
    }
    let precision = common as f64 / pred.len() as f64;
    let recall = common as f64 / gold.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecutabilityRate {
    pub top1_rate: f64,
    pub topk_rate: f64,
    pub items: usize,
}

/// Each entry is the 1-based index of the first executable candidate for
/// one question, or `None` if none executed.
pub fn executability_rate(first_executable: &[Option<usize>]) -> ExecutabilityRate {
    let n = first_executable.len();
    if n == 0 {
        return ExecutabilityRate {
            top1_rate: 0.0,
            topk_rate: 0.0,
            items: 0,
        };
    }
    let top1 = first_executable.iter().filter(|i| **i == Some(1)).count();
    let topk = first_executable.iter().filter(|i| i.is_some()).count();
    ExecutabilityRate {
        top1_rate: top1 as f64 / n as f64,
        topk_rate: topk as f64 / n as f64,
        items: n,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPrediction {
    pub id: String,
    pub predicted: String,
    pub gold: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reasoning_type: Option<String>,
    #[serde(default = "success")]
    pub exec_status: ExecStatus,
}

fn success() -> ExecStatus {
    ExecStatus::Success
}

static DICT_ANSWER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\{\s*Ans#\d+:\s?(.*)\}$").unwrap());
static DICT_SEPARATOR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r",\s*Ans#\d+:\s?").unwrap());

/// Values of a rendered dict answer (`{Ans#1: a, Ans#2: b}`) joined by
/// spaces, or `None` if the text is not a dict rendering.
pub fn dict_scoring_text(predicted: &str) -> Option<String> {
    let inner = DICT_ANSWER.captures(predicted.trim())?.get(1)?.as_str();
    Some(DICT_SEPARATOR.split(inner).collect::<Vec<_>>().join(" "))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FailureCounts {
    pub parse_soft: usize,
    pub parse_hard: usize,
    pub execution_soft: usize,
    pub execution_hard: usize,
}

impl FailureCounts {
    fn record(&mut self, status: &ExecStatus) {
        let stage = status.failure_stage();
        let slot = match (status, stage) {
            (ExecStatus::SoftFail(_), Some(FailureStage::Parse)) => &mut self.parse_soft,
            (ExecStatus::HardFail(_), Some(FailureStage::Parse)) => &mut self.parse_hard,
            (ExecStatus::SoftFail(_), _) => &mut self.execution_soft,
            (ExecStatus::HardFail(_), _) => &mut self.execution_hard,
            (ExecStatus::Success, _) => return,
        };
        *slot += 1;
    }

    pub fn parse(&self) -> usize {
        self.parse_soft + self.parse_hard
    }

    pub fn execution(&self) -> usize {
        self.execution_soft + self.execution_hard
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupScores {
    pub count: usize,
    pub em: f64,
    pub f1: f64,
    pub failures: FailureCounts,
    pub parse_error_rate: f64,
    pub execution_error_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub overall: GroupScores,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub groups: BTreeMap<String, GroupScores>,
    /// Ids whose prediction was a dict answer, scored on its values.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dict_scored: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub executability: Option<ExecutabilityRate>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupBy {
    #[default]
    None,
    ReasoningType,
}

#[derive(Default)]
struct Accumulator {
    count: usize,
    em: f64,
    f1: f64,
    failures: FailureCounts,
}

impl Accumulator {
    fn add(&mut self, em: f64, f1: f64, status: &ExecStatus) {
        self.count += 1;
        self.em += em;
        self.f1 += f1;
        self.failures.record(status);
    }

    fn finish(self) -> GroupScores {
        let n = self.count.max(1) as f64;
        GroupScores {
            count: self.count,
            em: self.em / n,
            f1: self.f1 / n,
            parse_error_rate: self.failures.parse() as f64 / n,
            execution_error_rate: self.failures.execution() as f64 / n,
            failures: self.failures,
        }
    }
}

/// Mean EM/F1 overall and, optionally, per reasoning type (items without
/// one fall under `"unknown"`).
pub fn aggregate(predictions: &[ScoredPrediction], group_by: GroupBy) -> EvalReport {
    let mut overall = Accumulator::default();
    let mut groups: BTreeMap<String, Accumulator> = BTreeMap::new();
    let mut dict_scored = Vec::new();

    for p in predictions {
        let text = match dict_scoring_text(&p.predicted) {
            Some(t) => {
                dict_scored.push(p.id.clone());
                t
            }
            None => p.predicted.clone(),
        };
        let em = exact_match(&text, &p.gold);
        let f1 = token_f1(&text, &p.gold);
        overall.add(em, f1, &p.exec_status);
        if group_by == GroupBy::ReasoningType {
            let key = p.reasoning_type.clone().unwrap_or_else(|| "unknown".into());
            groups.entry(key).or_default().add(em, f1, &p.exec_status);
        }
    }

    EvalReport {
        overall: overall.finish(),
        groups: groups.into_iter().map(|(k, v)| (k, v.finish())).collect(),
        dict_scored,
        executability: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(id: &str, predicted: &str, gold: &str, kind: Option<&str>, status: &str) -> ScoredPrediction {
        ScoredPrediction {
            id: id.into(),
            predicted: predicted.into(),
            gold: vec![gold.into()],
            reasoning_type: kind.map(Into::into),
            exec_status: status.parse().unwrap(),
        }
    }

    #[test]
    fn em_examples() {
        assert_eq!(exact_match("New York", &["New York"]), 1.0);
        assert_eq!(exact_match("the mask of fu manchu", &["The Mask of Fu Manchu"]), 1.0);
        assert_eq!(exact_match("New York City", &["New York"]), 0.0);
        assert_eq!(exact_match("x", &["y", "X."]), 1.0);
    }

    #[test]
    fn f1_examples() {
        assert!((token_f1("aston villa fc", &["aston villa"]) - 0.8).abs() < 1e-9);
        assert_eq!(token_f1("Dave Parker", &["dave parker"]), 1.0);
        assert_eq!(token_f1("paris", &["london"]), 0.0);
        assert_eq!(token_f1("the", &["a"]), 1.0);
        assert_eq!(token_f1("", &["x"]), 0.0);
        assert_eq!(token_f1("x", &["y", "x z"]), 2.0 / 3.0);
    }

    #[test]
    fn f1_counts_multiplicity() {
        // common = 1: only one "york" in gold.
        assert!((token_f1("york york", &["new york"]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn executability() {
        let r = executability_rate(&[Some(1), Some(1)]);
        assert_eq!((r.top1_rate, r.topk_rate), (1.0, 1.0));
        let r = executability_rate(&[None, Some(2)]);
        assert_eq!((r.top1_rate, r.topk_rate), (0.0, 0.5));
        assert_eq!(executability_rate(&[]).items, 0);
    }

    #[test]
    fn aggregate_overall_and_groups() {
        let preds = vec![
            pred("a", "x", "x", Some("2hop"), "SUCCESS"),
            pred("b", "y", "x", Some("3hop1"), "SUCCESS"),
        ];
        let r = aggregate(&preds, GroupBy::None);
        assert_eq!(r.overall.em, 0.5);
        assert!(r.groups.is_empty());
        let r = aggregate(&preds, GroupBy::ReasoningType);
        assert_eq!(r.groups["2hop"].em, 1.0);
        assert_eq!(r.groups["3hop1"].em, 0.0);
    }

    #[test]
    fn failure_taxonomy() {
        let preds = vec![
            pred("a", "", "x", None, "HARD_FAIL(parse_error)"),
            pred("b", "", "x", None, "HARD_FAIL(parse)"),
        ];
        let r = aggregate(&preds, GroupBy::None);
        assert_eq!(r.overall.parse_error_rate, 1.0);
        assert_eq!(r.overall.failures.parse_hard, 2);

        let preds = vec![
            pred("a", "", "x", None, "SOFT_FAIL(comparison_tie)"),
            pred("b", "", "x", None, "HARD_FAIL(reader_unavailable)"),
            pred("c", "x", "x", None, "SUCCESS"),
        ];
        let f = aggregate(&preds, GroupBy::None).overall.failures;
        assert_eq!((f.parse(), f.execution_soft, f.execution_hard), (0, 1, 1));
    }

    #[test]
    fn dict_answers_score_on_values() {
        assert_eq!(
            dict_scoring_text("{Ans#1: McDonald's, Ans#2: England}").as_deref(),
            Some("McDonald's England")
        );
        assert_eq!(dict_scoring_text("New York"), None);
        let r = aggregate(
            &[pred("u", "{Ans#1: McDonald's, Ans#2: England}", "McDonald's England", None, "SUCCESS")],
            GroupBy::None,
        );
        assert_eq!(r.overall.em, 1.0);
        assert_eq!(r.dict_scored, vec!["u".to_string()]);
    }

    #[test]
    fn prediction_jsonl_shape() {
        let p: ScoredPrediction = serde_json::from_str(
            r#"{"id":"1","predicted":"a","gold":["a"],"reasoning_type":"2hop","exec_status":"SOFT_FAIL(no_answer)"}"#,
        )
        .unwrap();
        assert_eq!(p.exec_status, ExecStatus::SoftFail("no_answer".into()));
    }
}
