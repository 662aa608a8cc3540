//! Chat-completion backends: a scripted fixture player and an HTTP client.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::prompt::prompt_digest;
use super::AgentKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: &str, content: &str) -> Self {
        Self { role: role.to_string(), content: content.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    /// Routing hint for scripted backends; never sent over the wire.
    #[serde(skip)]
    pub agent: Option<AgentKind>,
}

impl ChatRequest {
    /// Message contents joined by newlines, the form used for digests.
    pub fn prompt_text(&self) -> String {
        self.messages.iter().map(|m| m.content.as_str()).collect::<Vec<_>>().join("\n")
    }
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("missing API key: environment variable {0} is not set")]
    MissingApiKey(String),
    #[error("scripted fixture exhausted at request {ordinal}")]
    Exhausted { ordinal: usize },
    #[error("cannot read fixture {path}: {message}")]
    Fixture { path: String, message: String },
}

impl BackendError {
    /// Transport failures, rate limits and server errors are worth retrying.
    pub fn is_retriable(&self) -> bool {
        match self {
            BackendError::Transport(_) => true,
            BackendError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

pub trait LlmBackend {
    fn complete(&mut self, request: &ChatRequest) -> Result<String, BackendError>;

    /// True when the backend never touches the network.
    fn is_offline(&self) -> bool {
        false
    }
}

impl<B: LlmBackend + ?Sized> LlmBackend for Box<B> {
    fn complete(&mut self, request: &ChatRequest) -> Result<String, BackendError> {
        (**self).complete(request)
    }

    fn is_offline(&self) -> bool {
        (**self).is_offline()
    }
}

/// Reply table for [`ScriptedBackend`].
///
/// Lookup order per request: exact prompt digest, then the per-agent list
/// (cycled), then `replies` by request ordinal.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptFixture {
    #[serde(default)]
    pub replies: Vec<String>,
    /// Wrap around `replies` instead of failing past the end.
    #[serde(default)]
    pub cycle: bool,
    #[serde(default)]
    pub by_agent: BTreeMap<AgentKind, Vec<String>>,
    #[serde(default)]
    pub by_digest: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct ScriptedBackend {
    fixture: ScriptFixture,
    ordinal: usize,
    per_agent: BTreeMap<AgentKind, usize>,
}

impl ScriptedBackend {
    pub fn new(fixture: ScriptFixture) -> Self {
        Self { fixture, ordinal: 0, per_agent: BTreeMap::new() }
    }

    pub fn from_replies<S: Into<String>>(replies: impl IntoIterator<Item = S>) -> Self {
        Self::new(ScriptFixture { replies: replies.into_iter().map(Into::into).collect(), ..Default::default() })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, BackendError> {
        let path = path.as_ref();
        let fail = |message: String| BackendError::Fixture { path: path.display().to_string(), message };
        let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
        let fixture = serde_json::from_str(&text).map_err(|e| fail(e.to_string()))?;
        Ok(Self::new(fixture))
    }

    /// Requests served so far.
    pub fn calls(&self) -> usize {
        self.ordinal
    }
}

impl LlmBackend for ScriptedBackend {
    fn complete(&mut self, request: &ChatRequest) -> Result<String, BackendError> {
        let ordinal = self.ordinal;
        self.ordinal += 1;
        if let Some(reply) = self.fixture.by_digest.get(&prompt_digest(&request.prompt_text())) {
            return Ok(reply.clone());
        }
        if let Some(list) = request.agent.and_then(|a| self.fixture.by_agent.get(&a).map(|l| (a, l))) {
            let (agent, list) = list;
            if !list.is_empty() {
                let n = self.per_agent.entry(agent).or_insert(0);
                let reply = list[*n % list.len()].clone();
                *n += 1;
                return Ok(reply);
            }
        }
        let replies = &self.fixture.replies;
        match replies.get(ordinal) {
            Some(r) => Ok(r.clone()),
            None if self.fixture.cycle && !replies.is_empty() => Ok(replies[ordinal % replies.len()].clone()),
            None => Err(BackendError::Exhausted { ordinal }),
        }
    }

    fn is_offline(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HttpBackendConfig {
    /// Full URL of the chat-completions endpoint.
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub temperature: f64,
    pub timeout_secs: u64,
}

impl Default for HttpBackendConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1/chat/completions".to_string(),
            model: "gpt-4o".to_string(),
            api_key_env: "OPENAI_API_KEY".to_string(),
            temperature: 0.0,
            timeout_secs: 60,
        }
    }
}

/// OpenAI-compatible chat-completions client.
pub struct HttpBackend {
    config: HttpBackendConfig,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    /// Reads the bearer token from `config.api_key_env`.
    pub fn from_env(config: HttpBackendConfig) -> Result<Self, BackendError> {
        let key =
            std::env::var(&config.api_key_env).map_err(|_| BackendError::MissingApiKey(config.api_key_env.clone()))?;
        Self::with_api_key(config, key)
    }

    pub fn with_api_key(config: HttpBackendConfig, api_key: impl Into<String>) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        Ok(Self { config, api_key: api_key.into(), client })
    }

    pub fn config(&self) -> &HttpBackendConfig {
        &self.config
    }
}

impl LlmBackend for HttpBackend {
    fn complete(&mut self, request: &ChatRequest) -> Result<String, BackendError> {
        let body = json!({
            "model": self.config.model,
            "messages": request.messages,
            "temperature": request.temperature,
        });
        let resp = self
            .client
            .post(&self.config.endpoint)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| BackendError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(BackendError::Status { status: status.as_u16(), body: text });
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| BackendError::Malformed(e.to_string()))?;
        value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| BackendError::Malformed("no choices[0].message.content".to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use std::thread;

    fn req(agent: Option<AgentKind>, text: &str) -> ChatRequest {
        ChatRequest { messages: vec![ChatMessage::new("user", text)], temperature: 0.0, agent }
    }

    #[test]
    fn scripted_ordinal_replay() {
        let mut b = ScriptedBackend::from_replies(["a", "b"]);
        assert_eq!(b.complete(&req(None, "x")).unwrap(), "a");
        assert_eq!(b.complete(&req(None, "x")).unwrap(), "b");
        assert!(matches!(b.complete(&req(None, "x")), Err(BackendError::Exhausted { ordinal: 2 })));
        assert!(b.is_offline());
    }

    #[test]
    fn scripted_lookup_priority() {
        let fixture: ScriptFixture = serde_json::from_value(json!({
            "replies": ["ordinal"],
            "cycle": true,
            "by_agent": {"trade": ["Action: 0.1", "Action: 0.2"]},
            "by_digest": {prompt_digest("special"): "digest hit"},
        }))
        .unwrap();
        let mut b = ScriptedBackend::new(fixture);
        assert_eq!(b.complete(&req(Some(AgentKind::Trade), "special")).unwrap(), "digest hit");
        assert_eq!(b.complete(&req(Some(AgentKind::Trade), "t")).unwrap(), "Action: 0.1");
        assert_eq!(b.complete(&req(Some(AgentKind::Fact), "f")).unwrap(), "ordinal");
        assert_eq!(b.complete(&req(Some(AgentKind::Trade), "t")).unwrap(), "Action: 0.2");
        assert_eq!(b.complete(&req(Some(AgentKind::Trade), "t")).unwrap(), "Action: 0.1");
        assert_eq!(b.calls(), 5);
    }

    #[test]
    fn fixture_rejects_unknown_keys() {
        assert!(serde_json::from_str::<ScriptFixture>(r#"{"replys": []}"#).is_err());
        let err = ScriptedBackend::from_file("/nonexistent/fixture.json").unwrap_err();
        assert!(matches!(err, BackendError::Fixture { .. }));
    }

    /// Serves each canned `(status, body)` to one connection and returns the raw requests.
    fn mock_server(responses: Vec<(u16, String)>) -> (String, thread::JoinHandle<Vec<String>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
        let handle = thread::spawn(move || {
            let mut seen = Vec::new();
            for (status, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut head = String::new();
                let mut len = 0usize;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                    head.push_str(&line);
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                }
                let mut buf = vec![0; len];
                reader.read_exact(&mut buf).unwrap();
                seen.push(format!("{head}{}", String::from_utf8(buf).unwrap()));
                write!(
                    stream,
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                )
                .unwrap();
            }
            seen
        });
        (url, handle)
    }

    #[test]
    fn http_backend_round_trip() {
        let ok = json!({"choices": [{"message": {"role": "assistant", "content": "Action: 0.3"}}]}).to_string();
        let (url, server) = mock_server(vec![(200, ok), (503, "busy".into()), (200, "{}".into())]);
        let config = HttpBackendConfig { endpoint: url, model: "test-model".into(), ..Default::default() };
        let mut b = HttpBackend::with_api_key(config, "sk-test").unwrap();
        let r = req(Some(AgentKind::Trade), "hello");
        assert_eq!(b.complete(&r).unwrap(), "Action: 0.3");
        let err = b.complete(&r).unwrap_err();
        assert!(err.is_retriable() && matches!(err, BackendError::Status { status: 503, .. }));
        assert!(matches!(b.complete(&r), Err(BackendError::Malformed(_))));
        assert!(!b.is_offline());

        let seen = server.join().unwrap();
        let first = seen[0].to_ascii_lowercase();
        assert!(first.starts_with("post /v1/chat/completions"));
        assert!(first.contains("authorization: bearer sk-test"));
        let body: Value = serde_json::from_str(&seen[0][seen[0].find("\r\n\r\n").unwrap() + 4..]).unwrap();
        assert_eq!(
            body,
            json!({"model": "test-model", "messages": [{"role": "user", "content": "hello"}], "temperature": 0.0})
        );
    }

    #[test]
    fn http_transport_failure_is_retriable() {
        let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let config =
            HttpBackendConfig { endpoint: format!("http://127.0.0.1:{port}/x"), timeout_secs: 2, ..Default::default() };
        let mut b = HttpBackend::with_api_key(config, "k").unwrap();
        let err = b.complete(&req(None, "x")).unwrap_err();
        assert!(matches!(err, BackendError::Transport(_)) && err.is_retriable());
    }

    #[test]
    fn missing_key_is_reported() {
        let config =
            HttpBackendConfig { api_key_env: "TRADELAB_TEST_KEY_THAT_IS_NOT_SET".into(), ..Default::default() };
        assert!(matches!(HttpBackend::from_env(config), Err(BackendError::MissingApiKey(v)) if v.contains("NOT_SET")));
    }
}
