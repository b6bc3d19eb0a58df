use std::io::BufRead;
use std::path::Path;

use regex::{Regex, RegexBuilder};
use serde::Deserialize;

use super::{rank, rank_scores, Reader, ReaderCandidate, ReaderError, ReaderRequest};
use crate::jsonl::{read_jsonl, read_jsonl_file, JsonlError};

/// A scripted response: questions matching `pattern` (case-insensitive
/// regex) get `candidates`.
#[derive(Debug, Clone)]
pub struct FixtureRule {
    pub pattern: Regex,
    pub candidates: Vec<ReaderCandidate>,
}

impl FixtureRule {
    pub fn new(pattern: &str, mut candidates: Vec<ReaderCandidate>) -> Result<Self, regex::Error> {
        rank(&mut candidates);
        Ok(FixtureRule {
            pattern: RegexBuilder::new(pattern).case_insensitive(true).build()?,
            candidates,
        })
    }
}

#[derive(Deserialize)]
struct RuleLine {
    pattern: String,
    #[serde(default)]
    candidates: Option<Vec<ReaderCandidate>>,
    #[serde(default)]
    answers: Option<Vec<String>>,
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
    #[error("rule {rule}: {source}")]
    Pattern {
        rule: usize,
        #[source]
        source: regex::Error,
    },
}

/// First matching rule wins; no match yields no candidates.
pub fn fixture_answer(request: &ReaderRequest, script: &[FixtureRule]) -> Vec<ReaderCandidate> {
    script
        .iter()
        .find(|rule| rule.pattern.is_match(&request.question))
        .map(|rule| rule.candidates.iter().take(request.top_k).cloned().collect())
        .unwrap_or_default()
}

#[derive(Debug, Clone, Default)]
pub struct FixtureReader {
    rules: Vec<FixtureRule>,
}

impl FixtureReader {
    pub fn new(rules: Vec<FixtureRule>) -> Self {
        FixtureReader { rules }
    }

    /// Script lines look like `{"pattern": "...", "candidates": [{"answer", "score"}]}`
    /// or `{"pattern": "...", "answers": ["..."]}`.
    pub fn from_jsonl(reader: impl BufRead) -> Result<Self, FixtureError> {
        Self::from_lines(read_jsonl(reader)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FixtureError> {
        Self::from_lines(read_jsonl_file(path)?)
    }

    fn from_lines(lines: Vec<RuleLine>) -> Result<Self, FixtureError> {
        let rules = lines
            .into_iter()
            .enumerate()
            .map(|(i, line)| {
                let candidates = match (line.candidates, line.answers) {
                    (Some(c), _) => c,
                    (None, Some(a)) => rank_scores(&a, a.len()),
                    (None, None) => Vec::new(),
                };
                FixtureRule::new(&line.pattern, candidates)
                    .map_err(|source| FixtureError::Pattern { rule: i + 1, source })
            })
            .collect::<Result<_, _>>()?;
        Ok(FixtureReader { rules })
    }
}

impl Reader for FixtureReader {
    fn answer(&self, request: &ReaderRequest) -> Result<Vec<ReaderCandidate>, ReaderError> {
        Ok(fixture_answer(request, &self.rules))
    }
}
