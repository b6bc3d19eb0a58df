//! Deterministic semantics of the eight operations.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::normalize::normalize_with;
use super::values::{coerce_number, parse_comparable, Answer, AnswerValue, ComparableValue};
use super::ExecConfig;
use crate::hexpr::OpKind;
use crate::readers::ReaderCandidate;

/// Recoverable problems. Execution continues with an empty or partial
/// value and the code is recorded on the step and the trace status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SoftFail {
    EmptyIntersection,
    ComparisonTie,
    Incomparable,
    NotNumeric,
    /// The reader returned no candidate for a primitive.
    NoAnswer,
    /// An operand of AND/COMP/SUB/ADD evaluated to nothing.
    EmptyOperand,
}

impl SoftFail {
    pub fn code(self) -> &'static str {
        match self {
            SoftFail::EmptyIntersection => "empty_intersection",
            SoftFail::ComparisonTie => "comparison_tie",
            SoftFail::Incomparable => "incomparable",
            SoftFail::NotNumeric => "not_numeric",
            SoftFail::NoAnswer => "no_answer",
            SoftFail::EmptyOperand => "empty_operand",
        }
    }
}

impl fmt::Display for SoftFail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Which entity COMP_< / COMP_> return when both answers compare equal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    #[default]
    Right,
    Left,
}

/// What AND returns when the candidate lists share nothing. Both record
/// `empty_intersection`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyIntersectionPolicy {
    #[default]
    Empty,
    /// Fall back to the left operand's top answer.
    Left,
}

/// An evaluated child as seen by its parent.
#[derive(Debug, Clone, PartialEq)]
pub struct Operand {
    pub value: AnswerValue,
    /// Main entity of the subtree, returned by COMP_< / COMP_>.
    pub entity: String,
    /// Slot of the last primitive executed in the subtree; the key UNION
    /// files a non-dictionary child under.
    pub slot: Option<usize>,
}

impl Operand {
    pub fn new(value: AnswerValue, entity: impl Into<String>, slot: Option<usize>) -> Self {
        Operand {
            value,
            entity: entity.into(),
            slot,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpOutcome {
    pub value: AnswerValue,
    pub soft_fail: Option<SoftFail>,
    pub note: Option<String>,
}

impl OpOutcome {
    fn ok(value: AnswerValue) -> Self {
        OpOutcome {
            value,
            soft_fail: None,
            note: None,
        }
    }

    fn soft(value: AnswerValue, fail: SoftFail) -> Self {
        OpOutcome {
            value,
            soft_fail: Some(fail),
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Applies `kind` to already evaluated operands. `left` is q2, `right` is
/// q1.
pub fn apply_operation(
    kind: OpKind,
    left: &Operand,
    right: &Operand,
    config: &ExecConfig,
) -> OpOutcome {
    match kind {
        OpKind::Join => OpOutcome::ok(left.value.clone()),
        OpKind::Union => OpOutcome::ok(union(left, right)),
        _ if left.value.is_empty() || right.value.is_empty() => {
            OpOutcome::soft(AnswerValue::empty(), SoftFail::EmptyOperand)
        }
        OpKind::And => and(left, right, config),
        OpKind::CompEq => {
            let l = normalize_with(&left.value.render(), &config.normalization);
            let r = normalize_with(&right.value.render(), &config.normalization);
            OpOutcome::ok(AnswerValue::new(Answer::YesNo(l == r)))
        }
        OpKind::CompLt | OpKind::CompGt => compare(kind, left, right, config),
        OpKind::Sub | OpKind::Add => arithmetic(kind, left, right),
    }
}

fn union(left: &Operand, right: &Operand) -> AnswerValue {
    let mut entries = BTreeMap::new();
    for operand in [right, left] {
        match &operand.value.answer {
            Answer::Dict(d) => entries.extend(d.iter().map(|(k, v)| (*k, v.clone()))),
            _ => {
                // Children always carry a slot; 0 only appears for operands
                // built by hand without one.
                entries.insert(operand.slot.unwrap_or(0), operand.value.render());
            }
        }
    }
    AnswerValue::new(Answer::Dict(entries))
}

fn candidate_list(value: &AnswerValue) -> Vec<ReaderCandidate> {
    if !value.candidates.is_empty() {
        return value.candidates.clone();
    }
    match &value.answer {
        Answer::Empty => Vec::new(),
        Answer::Dict(d) => d.values().map(|v| ReaderCandidate::new(v.clone(), 1.0)).collect(),
        _ => vec![ReaderCandidate::new(value.render(), 1.0)],
    }
}

fn and(left: &Operand, right: &Operand, config: &ExecConfig) -> OpOutcome {
    let norm = |s: &str| normalize_with(s, &config.normalization);
    let right_list = candidate_list(&right.value);
    let mut right_best: Vec<(String, f64)> = Vec::new();
    for c in &right_list {
        let key = norm(&c.answer);
        if !right_best.iter().any(|(k, _)| *k == key) {
            right_best.push((key, c.score));
        }
    }

    let mut seen: Vec<String> = Vec::new();
    let mut common: Vec<ReaderCandidate> = Vec::new();
    for c in candidate_list(&left.value) {
        let key = norm(&c.answer);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key.clone());
        if let Some((_, rs)) = right_best.iter().find(|(k, _)| *k == key) {
            common.push(ReaderCandidate::new(c.answer.clone(), c.score + rs));
        }
    }
    common.sort_by(|a, b| b.score.total_cmp(&a.score));

    match common.first() {
        Some(top) => {
            let answer = top.answer.clone();
            OpOutcome::ok(AnswerValue::span(answer).with_candidates(common))
        }
        None => {
            let value = match config.empty_intersection_policy {
                EmptyIntersectionPolicy::Empty => AnswerValue::empty(),
                EmptyIntersectionPolicy::Left => {
                    let list = candidate_list(&left.value);
                    match list.first() {
                        Some(c) => AnswerValue::span(c.answer.clone()),
                        None => AnswerValue::empty(),
                    }
                }
            };
            OpOutcome::soft(value, SoftFail::EmptyIntersection)
        }
    }
}

fn compare(kind: OpKind, left: &Operand, right: &Operand, config: &ExecConfig) -> OpOutcome {
    let lv = parse_comparable(&left.value.render(), &config.date_formats, &config.normalization);
    let rv = parse_comparable(&right.value.render(), &config.date_formats, &config.normalization);
    let Some(ord) = lv.compare(&rv) else {
        return OpOutcome::soft(AnswerValue::empty(), SoftFail::Incomparable).with_note(format!(
            "cannot compare {} value with {} value",
            lv.variant_name(),
            rv.variant_name()
        ));
    };
    let lexical = matches!(lv, ComparableValue::Lexical { .. });
    let outcome = match ord {
        Ordering::Equal => {
            let entity = match config.tie_policy {
                TiePolicy::Right => &right.entity,
                TiePolicy::Left => &left.entity,
            };
            OpOutcome::soft(AnswerValue::span(entity.clone()), SoftFail::ComparisonTie)
        }
        _ => {
            // COMP_< picks the side with the smaller answer, COMP_> the larger.
            let left_wins = (ord == Ordering::Less) == (kind == OpKind::CompLt);
            let entity = if left_wins { &left.entity } else { &right.entity };
            OpOutcome::ok(AnswerValue::span(entity.clone()))
        }
    };
    if lexical {
        outcome.with_note("compared as text")
    } else {
        outcome
    }
}

fn operand_number(value: &AnswerValue) -> Option<f64> {
    match &value.answer {
        Answer::Number(n) => Some(*n),
        _ => coerce_number(&value.render()).ok(),
    }
}

fn arithmetic(kind: OpKind, left: &Operand, right: &Operand) -> OpOutcome {
    let (Some(l), Some(r)) = (operand_number(&left.value), operand_number(&right.value)) else {
        return OpOutcome::soft(AnswerValue::empty(), SoftFail::NotNumeric);
    };
    let n = if kind == OpKind::Sub { l - r } else { l + r };
    OpOutcome::ok(AnswerValue::new(Answer::Number(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ExecConfig {
        ExecConfig::default()
    }

    fn span(text: &str, entity: &str, slot: usize) -> Operand {
        Operand::new(AnswerValue::span(text), entity, Some(slot))
    }

    fn apply(kind: OpKind, l: &Operand, r: &Operand) -> OpOutcome {
        apply_operation(kind, l, r, &cfg())
    }

    #[test]
    fn join_forwards_left() {
        let out = apply(OpKind::Join, &span("New York", "", 2), &span("Jon Favreau", "", 1));
        assert_eq!(out.value, AnswerValue::span("New York"));
        assert_eq!(out.soft_fail, None);
    }

    #[test]
    fn union_builds_slot_dictionary() {
        let out = apply(OpKind::Union, &span("England", "", 2), &span("McDonald's", "", 1));
        assert_eq!(out.value.render(), "{Ans#1: McDonald's, Ans#2: England}");
    }

    #[test]
    fn union_merges_nested_dicts() {
        let inner = apply(OpKind::Union, &span("b", "", 2), &span("a", "", 1)).value;
        let out = apply(
            OpKind::Union,
            &span("c", "", 3),
            &Operand::new(inner, "", Some(2)),
        );
        assert_eq!(out.value.render(), "{Ans#1: a, Ans#2: b, Ans#3: c}");
    }

    #[test]
    fn and_intersects_candidates() {
        let left = Operand::new(
            AnswerValue::span("Dave Parker").with_candidates(vec![
                ReaderCandidate::new("Dave Parker", 0.9),
                ReaderCandidate::new("Willie Stargell", 0.5),
            ]),
            "",
            Some(2),
        );
        let right = Operand::new(
            AnswerValue::span("Dave Parker")
                .with_candidates(vec![ReaderCandidate::new("Dave Parker", 0.8)]),
            "",
            Some(1),
        );
        let out = apply(OpKind::And, &left, &right);
        assert_eq!(out.value.render(), "Dave Parker");
        assert_eq!(out.value.candidates.len(), 1);
        assert!((out.value.candidates[0].score - 1.7).abs() < 1e-12);
    }

    #[test]
    fn and_orders_by_summed_score() {
        let left = Operand::new(
            AnswerValue::span("x").with_candidates(vec![
                ReaderCandidate::new("A", 0.9),
                ReaderCandidate::new("B", 0.8),
            ]),
            "",
            Some(2),
        );
        let right = Operand::new(
            AnswerValue::span("y").with_candidates(vec![
                ReaderCandidate::new("the b", 0.9),
                ReaderCandidate::new("a", 0.1),
            ]),
            "",
            Some(1),
        );
        let out = apply(OpKind::And, &left, &right);
        let answers: Vec<&str> = out.value.candidates.iter().map(|c| c.answer.as_str()).collect();
        assert_eq!(answers, vec!["B", "A"]);
        assert_eq!(out.value.render(), "B");
    }

    #[test]
    fn and_empty_intersection_soft_fails() {
        let out = apply(OpKind::And, &span("Paris", "", 2), &span("London", "", 1));
        assert_eq!(out.soft_fail, Some(SoftFail::EmptyIntersection));
        assert!(out.value.is_empty());

        let lenient = ExecConfig {
            empty_intersection_policy: EmptyIntersectionPolicy::Left,
            ..cfg()
        };
        let out = apply_operation(OpKind::And, &span("Paris", "", 2), &span("London", "", 1), &lenient);
        assert_eq!(out.soft_fail, Some(SoftFail::EmptyIntersection));
        assert_eq!(out.value.render(), "Paris");
    }

    #[test]
    fn comp_eq_renders_no() {
        let out = apply(OpKind::CompEq, &span("United States", "", 2), &span("South Korea", "", 1));
        assert_eq!(out.value.answer, Answer::YesNo(false));
        assert_eq!(out.value.render(), "No");
        let out = apply(OpKind::CompEq, &span("the U.S.", "", 2), &span("US", "", 1));
        assert_eq!(out.value.render(), "Yes");
    }

    #[test]
    fn comp_lt_returns_entity_of_smaller() {
        let l = span("2003", "Blind Shaft", 2);
        let r = span("1932", "The Mask of Fu Manchu", 1);
        assert_eq!(apply(OpKind::CompLt, &l, &r).value.render(), "The Mask of Fu Manchu");
        assert_eq!(apply(OpKind::CompGt, &l, &r).value.render(), "Blind Shaft");
    }

    #[test]
    fn comp_dates() {
        let l = span("1 June 1970", "A", 2);
        let r = span("20 March 1965", "B", 1);
        assert_eq!(apply(OpKind::CompGt, &l, &r).value.render(), "A");
        assert_eq!(apply(OpKind::CompLt, &l, &r).value.render(), "B");
    }

    #[test]
    fn comp_tie_returns_right_entity() {
        let out = apply(OpKind::CompLt, &span("1932", "A", 2), &span("1932", "B", 1));
        assert_eq!(out.soft_fail, Some(SoftFail::ComparisonTie));
        assert_eq!(out.value.render(), "B");
        let left_ties = ExecConfig {
            tie_policy: TiePolicy::Left,
            ..cfg()
        };
        let out = apply_operation(OpKind::CompLt, &span("1932", "A", 2), &span("1932", "B", 1), &left_ties);
        assert_eq!(out.value.render(), "A");
    }

    #[test]
    fn comp_cross_variant_soft_fails() {
        let out = apply(OpKind::CompLt, &span("1932", "A", 2), &span("Paris", "B", 1));
        assert_eq!(out.soft_fail, Some(SoftFail::Incomparable));
        assert!(out.value.is_empty());
    }

    #[test]
    fn comp_lexical_is_flagged() {
        let out = apply(OpKind::CompLt, &span("banana", "A", 2), &span("apple", "B", 1));
        assert_eq!(out.value.render(), "B");
        assert_eq!(out.note.as_deref(), Some("compared as text"));
    }

    #[test]
    fn sub_is_left_minus_right() {
        let out = apply(OpKind::Sub, &span("1640", "", 2), &span("1568", "", 1));
        assert_eq!(out.value.answer, Answer::Number(72.0));
        assert_eq!(out.value.render(), "72");
    }

    #[test]
    fn add_and_not_numeric() {
        let out = apply(OpKind::Add, &span("2", "", 2), &span("2", "", 1));
        assert_eq!(out.value.render(), "4");
        let out = apply(OpKind::Add, &span("two", "", 2), &span("2", "", 1));
        assert_eq!(out.soft_fail, Some(SoftFail::NotNumeric));
    }

    #[test]
    fn empty_operand_soft_fails() {
        let empty = Operand::new(AnswerValue::empty(), "", Some(1));
        let out = apply(OpKind::Sub, &span("3", "", 2), &empty);
        assert_eq!(out.soft_fail, Some(SoftFail::EmptyOperand));
        // JOIN and UNION still pass values through.
        assert_eq!(apply(OpKind::Join, &span("3", "", 2), &empty).soft_fail, None);
    }
}
