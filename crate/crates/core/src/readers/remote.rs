use std::thread;
use std::time::Duration;

use serde::Deserialize;

use super::{rank, Reader, ReaderCandidate, ReaderError, ReaderRequest};

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteReaderConfig {
    pub endpoint: String,
    pub timeout: Duration,
    /// Extra attempts after the first one.
    pub retries: u32,
    /// Delay before the first retry; doubles on each further retry.
    pub backoff: Duration,
}

impl RemoteReaderConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteReaderConfig {
            endpoint: endpoint.into(),
            timeout: Duration::from_secs(30),
            retries: 2,
            backoff: Duration::from_millis(200),
        }
    }
}

#[derive(Deserialize)]
struct WireResponse {
    candidates: Vec<ReaderCandidate>,
}

/// JSON-over-HTTP client for an external reader service.
///
/// Request: `{"question", "passages": [{"title", "text"}], "top_k"}`.
/// Response: `{"candidates": [{"answer", "score"}]}`.
#[derive(Debug, Clone)]
pub struct RemoteReader {
    config: RemoteReaderConfig,
    agent: ureq::Agent,
}

enum Failure {
    Retryable(String),
    Fatal(ReaderError),
}

impl RemoteReader {
    pub fn new(config: RemoteReaderConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        RemoteReader { config, agent }
    }

    pub fn config(&self) -> &RemoteReaderConfig {
        &self.config
    }

    fn attempt(&self, request: &ReaderRequest) -> Result<Vec<ReaderCandidate>, Failure> {
        let mut response = self
            .agent
            .post(&self.config.endpoint)
            .header("Content-Type", "application/json")
            .send_json(request)
            .map_err(|e| Failure::Retryable(e.to_string()))?;
        let status = response.status().as_u16();
        if status == 429 || status >= 500 {
            return Err(Failure::Retryable(format!("HTTP {status}")));
        }
        if !(200..300).contains(&status) {
            return Err(Failure::Fatal(ReaderError::Unavailable {
                endpoint: self.config.endpoint.clone(),
                attempts: 1,
                reason: format!("HTTP {status}"),
            }));
        }
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| Failure::Retryable(e.to_string()))?;
        let parsed: WireResponse = serde_json::from_str(&body)
            .map_err(|e| Failure::Fatal(ReaderError::Protocol(e.to_string())))?;
        let mut candidates = parsed.candidates;
        if candidates.iter().any(|c| !c.score.is_finite()) {
            return Err(Failure::Fatal(ReaderError::Protocol(
                "non-finite candidate score".into(),
            )));
        }
        rank(&mut candidates);
        candidates.truncate(request.top_k);
        Ok(candidates)
    }
}

impl Reader for RemoteReader {
    fn answer(&self, request: &ReaderRequest) -> Result<Vec<ReaderCandidate>, ReaderError> {
        let mut delay = self.config.backoff;
        let mut last = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                thread::sleep(delay);
                delay *= 2;
            }
            match self.attempt(request) {
                Ok(c) => return Ok(c),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Retryable(reason)) => {
                    log_retry(&self.config.endpoint, attempt, &reason);
                    last = reason;
                }
            }
        }
        Err(ReaderError::Unavailable {
            endpoint: self.config.endpoint.clone(),
            attempts: self.config.retries + 1,
            reason: last,
        })
    }
}

fn log_retry(endpoint: &str, attempt: u32, reason: &str) {
    if std::env::var_os("HEXPR_DEBUG").is_some() {
        eprintln!("reader {endpoint}: attempt {} failed: {reason}", attempt + 1);
    }
}
