use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{rank_scores, Reader, ReaderCandidate, ReaderError, ReaderRequest};
use crate::executor::normalize_answer;
use crate::jsonl::{read_jsonl, read_jsonl_file, JsonlError};

/// One line of a fact file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fact {
    pub question: String,
    pub answers: Vec<String>,
}

/// Question → ordered answers, keyed on the normalized question text.
#[derive(Debug, Clone, Default)]
pub struct FactStore {
    entries: HashMap<String, Vec<String>>,
}

impl FactStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends answers for `question`; repeated answers are dropped.
    pub fn insert<S: Into<String>>(&mut self, question: &str, answers: impl IntoIterator<Item = S>) {
        let slot = self.entries.entry(normalize_answer(question)).or_default();
        for a in answers {
            let a = a.into();
            if !slot.contains(&a) {
                slot.push(a);
            }
        }
    }

    pub fn lookup(&self, question: &str) -> Option<&[String]> {
        self.entries.get(&normalize_answer(question)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn from_facts(facts: impl IntoIterator<Item = Fact>) -> Self {
        let mut store = FactStore::new();
        for f in facts {
            store.insert(&f.question, f.answers);
        }
        store
    }

    pub fn from_jsonl(reader: impl BufRead) -> Result<Self, JsonlError> {
        Ok(Self::from_facts(read_jsonl::<Fact>(reader)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, JsonlError> {
        Ok(Self::from_facts(read_jsonl_file::<Fact>(path)?))
    }
}

/// Exact lookup on the normalized question; passages are ignored.
pub fn oracle_answer(request: &ReaderRequest, store: &FactStore) -> Vec<ReaderCandidate> {
    store
        .lookup(&request.question)
        .map(|answers| rank_scores(answers, request.top_k))
        .unwrap_or_default()
}

#[derive(Debug, Clone, Default)]
pub struct OracleReader {
    store: FactStore,
}

impl OracleReader {
    pub fn new(store: FactStore) -> Self {
        OracleReader { store }
    }

    pub fn store(&self) -> &FactStore {
        &self.store
    }
}

impl Reader for OracleReader {
    fn answer(&self, request: &ReaderRequest) -> Result<Vec<ReaderCandidate>, ReaderError> {
        Ok(oracle_answer(request, &self.store))
    }
}
