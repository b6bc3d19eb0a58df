use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::normalize::{normalize_with, NormalizeOptions};
use crate::readers::ReaderCandidate;

/// Result of evaluating one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Answer {
    Span(String),
    YesNo(bool),
    Number(f64),
    /// Answer slot index → answer text.
    Dict(BTreeMap<usize, String>),
    Empty,
}

/// An [`Answer`] plus the ranked reader candidates behind it, which only
/// AND consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerValue {
    #[serde(flatten)]
    pub answer: Answer,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<ReaderCandidate>,
}

impl AnswerValue {
    pub fn new(answer: Answer) -> Self {
        AnswerValue {
            answer,
            candidates: Vec::new(),
        }
    }

    pub fn span(text: impl Into<String>) -> Self {
        Self::new(Answer::Span(text.into()))
    }

    pub fn empty() -> Self {
        Self::new(Answer::Empty)
    }

    pub fn with_candidates(mut self, candidates: Vec<ReaderCandidate>) -> Self {
        self.candidates = candidates;
        self
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.answer, Answer::Empty)
    }

    /// Display form: spans verbatim, `Yes`/`No`, integers without a
    /// fractional part, dictionaries as `{Ans#1: v1, Ans#2: v2}`.
    pub fn render(&self) -> String {
        match &self.answer {
            Answer::Span(s) => s.clone(),
            Answer::YesNo(true) => "Yes".into(),
            Answer::YesNo(false) => "No".into(),
            Answer::Number(n) => render_number(*n),
            Answer::Dict(entries) => {
                let body: Vec<String> = entries
                    .iter()
                    .map(|(k, v)| format!("Ans#{k}: {v}"))
                    .collect();
                format!("{{{}}}", body.join(", "))
            }
            Answer::Empty => String::new(),
        }
    }

    /// Text used for scoring. Same as [`render`](Self::render) except that a
    /// dictionary scores as its values joined in slot order.
    pub fn scoring_text(&self) -> String {
        match &self.answer {
            Answer::Dict(entries) => entries.values().cloned().collect::<Vec<_>>().join(" "),
            _ => self.render(),
        }
    }
}

pub fn render_number(n: f64) -> String {
    if n.is_finite() && n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

/// Answer text lifted into an ordered domain for COMP_< / COMP_>.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ComparableValue {
    Numeric { value: f64 },
    DateKey { year: i32, month: u32, day: u32 },
    Lexical { text: String },
}

impl ComparableValue {
    /// `None` when the two values live in different domains.
    pub fn compare(&self, other: &ComparableValue) -> Option<Ordering> {
        use ComparableValue::*;
        match (self, other) {
            (Numeric { value: a }, Numeric { value: b }) => a.partial_cmp(b),
            (
                DateKey {
                    year: y1,
                    month: m1,
                    day: d1,
                },
                DateKey {
                    year: y2,
                    month: m2,
                    day: d2,
                },
            ) => Some((y1, m1, d1).cmp(&(y2, m2, d2))),
            (Lexical { text: a }, Lexical { text: b }) => Some(a.cmp(b)),
            _ => None,
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            ComparableValue::Numeric { .. } => "numeric",
            ComparableValue::DateKey { .. } => "date",
            ComparableValue::Lexical { .. } => "lexical",
        }
    }
}

/// Recognized date layouts, tried in configuration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DateFormat {
    /// `1 December 2010`
    DayMonthYear,
    /// `December 1, 2010`
    MonthDayYear,
    /// `December 2010`
    MonthYear,
    /// `2010-12-01`
    Iso,
    /// `2010`
    Year,
}

impl DateFormat {
    pub const DEFAULT_ORDER: [DateFormat; 5] = [
        DateFormat::DayMonthYear,
        DateFormat::MonthDayYear,
        DateFormat::MonthYear,
        DateFormat::Iso,
        DateFormat::Year,
    ];

    fn parse(self, text: &str) -> Option<(i32, u32, u32)> {
        match self {
            DateFormat::DayMonthYear => {
                let c = DMY.captures(text)?;
                date(&c[3], month_number(&c[2])?, c[1].parse().ok()?)
            }
            DateFormat::MonthDayYear => {
                let c = MDY.captures(text)?;
                date(&c[3], month_number(&c[1])?, c[2].parse().ok()?)
            }
            DateFormat::MonthYear => {
                let c = MY.captures(text)?;
                date(&c[2], month_number(&c[1])?, 1)
            }
            DateFormat::Iso => {
                let c = ISO.captures(text)?;
                date(&c[1], c[2].parse().ok()?, c[3].parse().ok()?)
            }
            DateFormat::Year => {
                let c = YEAR.captures(text)?;
                date(&c[1], 1, 1)
            }
        }
    }
}

static DMY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(\d{1,2})(?:st|nd|rd|th)?\s+([A-Za-z]+)\.?,?\s+(\d{1,4})$").unwrap()
});
static MDY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^([A-Za-z]+)\.?\s+(\d{1,2})(?:st|nd|rd|th)?,?\s+(\d{1,4})$").unwrap()
});
static MY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^([A-Za-z]+)\.?,?\s+(\d{3,4})$").unwrap());
static ISO: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{4})-(\d{1,2})-(\d{1,2})$").unwrap());
static YEAR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(\d{3,4})$").unwrap());

static NUMBER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?$|^[+-]?\.\d+$").unwrap()
});

fn month_number(name: &str) -> Option<u32> {
    let lower = name.to_ascii_lowercase();
    const MONTHS: [&str; 12] = [
        "january", "february", "march", "april", "may", "june", "july", "august",
        "september", "october", "november", "december",
    ];
    MONTHS
        .iter()
        .position(|m| *m == lower || (lower.len() >= 3 && m.starts_with(&lower)))
        .map(|i| i as u32 + 1)
}

fn date(year: &str, month: u32, day: u32) -> Option<(i32, u32, u32)> {
    let year: i32 = year.parse().ok()?;
    ((1..=12).contains(&month) && (1..=31).contains(&day)).then_some((year, month, day))
}

/// Strict number: optional sign, optional thousands separators, optional
/// fraction.
pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    if !NUMBER.is_match(t) {
        return None;
    }
    t.replace(',', "").parse().ok()
}

pub fn parse_date(text: &str, formats: &[DateFormat]) -> Option<(i32, u32, u32)> {
    let t = text.trim();
    formats.iter().find_map(|f| f.parse(t))
}

/// Numeric, then each date layout in order, then normalized text.
pub fn parse_comparable(
    text: &str,
    formats: &[DateFormat],
    normalization: &NormalizeOptions,
) -> ComparableValue {
    if let Some(value) = parse_number(text) {
        return ComparableValue::Numeric { value };
    }
    if let Some((year, month, day)) = parse_date(text, formats) {
        return ComparableValue::DateKey { year, month, day };
    }
    ComparableValue::Lexical {
        text: normalize_with(text, normalization),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a number: {0:?}")]
pub struct NotNumeric(pub String);

/// Integer or decimal; else a date (its year); else a number with a single
/// leading or trailing word (`4 siblings`).
pub fn coerce_number(text: &str) -> Result<f64, NotNumeric> {
    if let Some(n) = parse_number(text) {
        return Ok(n);
    }
    if let Some((year, _, _)) = parse_date(text, &DateFormat::DEFAULT_ORDER) {
        return Ok(year as f64);
    }
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() == 2 {
        if let Some(n) = parse_number(tokens[0]).or_else(|| parse_number(tokens[1])) {
            return Ok(n);
        }
    }
    Err(NotNumeric(text.to_string()))
}
