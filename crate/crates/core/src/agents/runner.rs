use chrono::NaiveDate;
use log::warn;
use serde::{Deserialize, Serialize};

use super::backend::LlmBackend;
use super::prompt::RenderedPrompt;
use super::{AgentError, AgentKind};

/// One backend call, successful or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub date: NaiveDate,
    pub agent: AgentKind,
    pub prompt: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reply: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Owns the backend, applies the retry policy and records every call.
pub struct AgentRunner {
    backend: Box<dyn LlmBackend>,
    max_retries: usize,
    temperature: f64,
    transcript: Vec<TranscriptEntry>,
}

impl AgentRunner {
    pub const DEFAULT_RETRIES: usize = 2;

    pub fn new(backend: Box<dyn LlmBackend>) -> Self {
        Self { backend, max_retries: Self::DEFAULT_RETRIES, temperature: 0.0, transcript: Vec::new() }
    }

    pub fn with_retries(mut self, max_retries: usize) -> Self {
        self.max_retries = max_retries;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn is_offline(&self) -> bool {
        self.backend.is_offline()
    }

    /// Backend calls made so far, retries included.
    pub fn calls(&self) -> usize {
        self.transcript.len()
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    /// Transcript as JSON lines.
    pub fn transcript_jsonl(&self) -> String {
        self.transcript.iter().map(|e| serde_json::to_string(e).expect("transcript serializes") + "\n").collect()
    }

    /// Sends `prompt`, retrying transport failures and empty replies. Returns the trimmed reply.
    pub fn complete(&mut self, date: NaiveDate, prompt: &RenderedPrompt) -> Result<String, AgentError> {
        let agent = prompt.agent;
        let request = prompt.to_request(self.temperature);
        let text = prompt.text();
        let mut attempt = 0;
        loop {
            let outcome = self.backend.complete(&request);
            let mut entry = TranscriptEntry { date, agent, prompt: text.clone(), reply: None, error: None };
            let failure = match outcome {
                Ok(reply) if !reply.trim().is_empty() => {
                    let trimmed = reply.trim().to_string();
                    entry.reply = Some(reply);
                    self.transcript.push(entry);
                    return Ok(trimmed);
                }
                Ok(reply) => {
                    entry.reply = Some(reply);
                    entry.error = Some("empty reply".to_string());
                    AgentError::EmptyReport { agent }
                }
                Err(e) => {
                    entry.error = Some(e.to_string());
                    let retriable = e.is_retriable();
                    let err = AgentError::Backend { agent, source: e };
                    if !retriable {
                        self.transcript.push(entry);
                        return Err(err);
                    }
                    err
                }
            };
            self.transcript.push(entry);
            if attempt >= self.max_retries {
                return Err(failure);
            }
            attempt += 1;
            warn!("{agent} agent on {date}: {failure}; retry {attempt}/{}", self.max_retries);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::backend::{BackendError, ChatRequest, ScriptedBackend};

    /// Fails `failures` times with the given error kind, then echoes a fixed reply.
    struct Flaky {
        failures: usize,
        empty: bool,
        served: usize,
    }

    impl LlmBackend for Flaky {
        fn complete(&mut self, _: &ChatRequest) -> Result<String, BackendError> {
            self.served += 1;
            if self.served <= self.failures {
                if self.empty {
                    return Ok("  \n".into());
                }
                return Err(BackendError::Transport("timed out".into()));
            }
            Ok("  report text \n".into())
        }
    }

    fn prompt() -> RenderedPrompt {
        RenderedPrompt { agent: AgentKind::Statistics, system: "sys".into(), user: "usr".into() }
    }

    fn day() -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 1, 2).unwrap()
    }

    #[test]
    fn two_timeouts_then_success() {
        let mut r = AgentRunner::new(Box::new(Flaky { failures: 2, empty: false, served: 0 }));
        assert_eq!(r.complete(day(), &prompt()).unwrap(), "report text");
        assert_eq!(r.calls(), 3);
        assert_eq!(r.transcript().iter().filter(|e| e.error.is_some()).count(), 2);
        assert_eq!(r.transcript()[0].prompt, "sys\nusr");
    }

    #[test]
    fn three_timeouts_surface_backend_error() {
        let mut r = AgentRunner::new(Box::new(Flaky { failures: 3, empty: false, served: 0 }));
        assert!(matches!(r.complete(day(), &prompt()), Err(AgentError::Backend { .. })));
        assert_eq!(r.calls(), 3);
    }

    #[test]
    fn persistent_empty_reply_is_empty_report() {
        let mut r = AgentRunner::new(Box::new(Flaky { failures: 9, empty: true, served: 0 }));
        let err = r.complete(day(), &prompt()).unwrap_err();
        assert_eq!(err.to_string(), "statistics agent: empty report");
    }

    #[test]
    fn exhausted_fixture_is_not_retried() {
        let mut r = AgentRunner::new(Box::new(ScriptedBackend::from_replies(Vec::<String>::new())));
        assert!(r.complete(day(), &prompt()).is_err());
        assert_eq!(r.calls(), 1);
        let line = r.transcript_jsonl();
        assert!(line.ends_with('\n') && line.contains("\"error\"") && !line.contains("\"reply\""));
    }
}
