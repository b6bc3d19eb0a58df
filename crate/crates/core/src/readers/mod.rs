//! Single-hop readers. The executor only sees ranked candidate lists, so any
//! model can sit behind [`Reader`]: an in-process fact oracle, a scripted
//! fixture, or a remote service speaking the JSON wire protocol.

mod fixture;
mod oracle;
mod remote;

use serde::{Deserialize, Serialize};

pub use fixture::{fixture_answer, FixtureError, FixtureReader, FixtureRule};
pub use oracle::{oracle_answer, FactStore, OracleReader};
pub use remote::{RemoteReader, RemoteReaderConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Passage {
    #[serde(default)]
    pub title: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReaderRequest {
    pub question: String,
    pub passages: Vec<Passage>,
    pub top_k: usize,
}

/// One ranked answer hypothesis. Scores need not be probabilities; only
/// their order matters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReaderCandidate {
    pub answer: String,
    pub score: f64,
}

impl ReaderCandidate {
    pub fn new(answer: impl Into<String>, score: f64) -> Self {
        ReaderCandidate {
            answer: answer.into(),
            score,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReaderError {
    #[error("reader at {endpoint} unavailable after {attempts} attempt(s): {reason}")]
    Unavailable {
        endpoint: String,
        attempts: u32,
        reason: String,
    },
    #[error("malformed reader response: {0}")]
    Protocol(String),
}

/// A single-hop question answerer. Implementations must be shareable across
/// threads; each call carries all of its own state.
pub trait Reader: Send + Sync {
    /// Candidates sorted by descending score, at most `request.top_k` long.
    fn answer(&self, request: &ReaderRequest) -> Result<Vec<ReaderCandidate>, ReaderError>;
}

impl<R: Reader + ?Sized> Reader for &R {
    fn answer(&self, request: &ReaderRequest) -> Result<Vec<ReaderCandidate>, ReaderError> {
        (**self).answer(request)
    }
}

impl<R: Reader + ?Sized> Reader for Box<R> {
    fn answer(&self, request: &ReaderRequest) -> Result<Vec<ReaderCandidate>, ReaderError> {
        (**self).answer(request)
    }
}

impl<R: Reader + ?Sized> Reader for std::sync::Arc<R> {
    fn answer(&self, request: &ReaderRequest) -> Result<Vec<ReaderCandidate>, ReaderError> {
        (**self).answer(request)
    }
}

/// Stable sort by descending score.
pub(crate) fn rank(candidates: &mut [ReaderCandidate]) {
    candidates.sort_by(|a, b| b.score.total_cmp(&a.score));
}

/// Scores for a plain ordered answer list: 1.0, 0.9, 0.8, ...
pub(crate) fn rank_scores(answers: &[String], top_k: usize) -> Vec<ReaderCandidate> {
    answers
        .iter()
        .take(top_k)
        .enumerate()
        .map(|(i, a)| ReaderCandidate::new(a.clone(), (10.0 - i as f64) / 10.0))
        .collect()
}

#[cfg(test)]
pub(crate) fn is_ranked(candidates: &[ReaderCandidate]) -> bool {
    candidates.windows(2).all(|w| w[0].score >= w[1].score)
}
