use std::collections::BTreeMap;

use serde::Serialize;

use crate::hexpr::PlaceholderRecognizer;

/// Answers of executed primitives, addressed by 1-based execution index.
/// Append-only: slot k is written once, when the k-th primitive resolves.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct AnswerMemory {
    slots: BTreeMap<usize, String>,
}

impl AnswerMemory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores the next answer and returns its slot index.
    pub fn push(&mut self, answer: impl Into<String>) -> usize {
        let k = self.slots.len() + 1;
        self.slots.insert(k, answer.into());
        k
    }

    pub fn get(&self, k: usize) -> Option<&str> {
        self.slots.get(&k).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &BTreeMap<usize, String> {
        &self.slots
    }
}

impl<S: Into<String>> FromIterator<S> for AnswerMemory {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut m = AnswerMemory::new();
        for a in iter {
            m.push(a);
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("placeholder refers to empty answer slot {0}")]
pub struct MissingSlot(pub usize);

/// Replaces every placeholder with its stored answer in one pass; inserted
/// answers are never rescanned.
pub fn substitute_placeholders(text: &str, memory: &AnswerMemory) -> Result<String, MissingSlot> {
    substitute_with(text, memory, &PlaceholderRecognizer::default())
}

pub fn substitute_with(
    text: &str,
    memory: &AnswerMemory,
    recognizer: &PlaceholderRecognizer,
) -> Result<String, MissingSlot> {
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for ph in recognizer.find(text) {
        let answer = memory.get(ph.index).ok_or(MissingSlot(ph.index))?;
        out.push_str(&text[cursor..ph.span.0]);
        out.push_str(answer);
        cursor = ph.span.1;
    }
    out.push_str(&text[cursor..]);
    Ok(out)
}
