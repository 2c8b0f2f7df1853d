//! Chat endpoint clients: a live HTTP client speaking the chat-completions
//! protocol and a deterministic mock for tests and offline runs.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::Message;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{message}")]
pub struct TransportError {
    pub message: String,
}

impl TransportError {
    pub fn new(message: impl Into<String>) -> Self {
        Self { message: message.into() }
    }
}

/// Anything that can answer a chat prompt. Implementations must be usable
/// from several threads at once; `rate_pair` fans calls out over a bounded
/// worker pool.
pub trait ChatClient: Sync {
    fn complete(&self, messages: &[Message]) -> Result<String, TransportError>;
}

/// Stable fixture key for a rating request: the first 16 hex characters of
/// the SHA-256 of the user message. The user message embeds both claim
/// texts in order, so distinct pairs get distinct keys.
pub fn fixture_key(user_content: &str) -> String {
    let digest = Sha256::digest(user_content.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    hex[..16].to_string()
}

fn user_content(messages: &[Message]) -> Result<&str, TransportError> {
    messages
        .iter()
        .rev()
        .find(|m| m.role == "user")
        .map(|m| m.content.as_str())
        .ok_or_else(|| TransportError::new("request carries no user message"))
}

/// Deterministic offline client. Replies either come from an in-memory
/// script or from a fixtures directory holding one JSON array of reply
/// strings per claim pair, named `<fixture_key>.json`. Repeated calls for
/// the same pair cycle through the replies in order.
pub struct MockChatClient {
    source: MockSource,
    cursors: Mutex<HashMap<String, usize>>,
    cache: Mutex<HashMap<String, Vec<String>>>,
}

enum MockSource {
    Scripted(Vec<String>),
    Fixtures(PathBuf),
}

impl MockChatClient {
    pub fn scripted(replies: Vec<String>) -> Self {
        Self {
            source: MockSource::Scripted(replies),
            cursors: Mutex::new(HashMap::new()),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn from_fixture_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            source: MockSource::Fixtures(dir.into()),
            cursors: Mutex::new(HashMap::new()),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Path a fixture file would need to live at for the given request.
    pub fn fixture_path(dir: &Path, user_content: &str) -> PathBuf {
        dir.join(format!("{}.json", fixture_key(user_content)))
    }

    fn replies_for(&self, key: &str, content: &str) -> Result<Vec<String>, TransportError> {
        match &self.source {
            MockSource::Scripted(replies) => {
                if replies.is_empty() {
                    return Err(TransportError::new("scripted mock has no replies"));
                }
                Ok(replies.clone())
            }
            MockSource::Fixtures(dir) => {
                if let Some(found) = self.cache.lock().expect("fixture cache").get(key) {
                    return Ok(found.clone());
                }
                let path = Self::fixture_path(dir, content);
                let raw = std::fs::read_to_string(&path).map_err(|e| {
                    TransportError::new(format!(
                        "no canned replies at {}: {e}",
                        path.display()
                    ))
                })?;
                let replies: Vec<String> = serde_json::from_str(&raw).map_err(|e| {
                    TransportError::new(format!(
                        "malformed fixture {}: {e}",
                        path.display()
                    ))
                })?;
                if replies.is_empty() {
                    return Err(TransportError::new(format!(
                        "fixture {} holds no replies",
                        path.display()
                    )));
                }
                self.cache
                    .lock()
                    .expect("fixture cache")
                    .insert(key.to_string(), replies.clone());
                Ok(replies)
            }
        }
    }
}

impl ChatClient for MockChatClient {
    fn complete(&self, messages: &[Message]) -> Result<String, TransportError> {
        let content = user_content(messages)?;
        let key = fixture_key(content);
        let replies = self.replies_for(&key, content)?;
        let mut cursors = self.cursors.lock().expect("reply cursors");
        let cursor = cursors.entry(key).or_insert(0);
        let reply = replies[*cursor % replies.len()].clone();
        *cursor += 1;
        Ok(reply)
    }
}

/// Live client for `POST <endpoint>/chat/completions`.
pub struct HttpChatClient {
    http: reqwest::blocking::Client,
    url: String,
    model: String,
    temperature: Option<f64>,
    api_key: Option<String>,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatResponseMessage,
}

#[derive(Deserialize)]
struct ChatResponseMessage {
    content: String,
}

impl HttpChatClient {
    pub fn new(
        endpoint: &str,
        model: &str,
        temperature: Option<f64>,
        api_key: Option<String>,
        timeout: Duration,
    ) -> Result<Self, TransportError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| TransportError::new(format!("client setup failed: {e}")))?;
        Ok(Self {
            http,
            url: format!("{}/chat/completions", endpoint.trim_end_matches('/')),
            model: model.to_string(),
            temperature,
            api_key,
        })
    }

    pub fn request_body(&self, messages: &[Message]) -> serde_json::Value {
        let mut body = serde_json::json!({
            "model": self.model,
            "messages": messages,
        });
        if let Some(t) = self.temperature {
            body["temperature"] = serde_json::json!(t);
        }
        body
    }
}

impl ChatClient for HttpChatClient {
    fn complete(&self, messages: &[Message]) -> Result<String, TransportError> {
        let mut request = self.http.post(&self.url).json(&self.request_body(messages));
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request
            .send()
            .map_err(|e| TransportError::new(format!("request failed: {e}")))?;
        let status = response.status();
        if !status.is_success() {
            let body = response.text().unwrap_or_default();
            return Err(TransportError::new(format!(
                "endpoint returned {status}: {body}"
            )));
        }
        let parsed: ChatResponse = response
            .json()
            .map_err(|e| TransportError::new(format!("malformed response: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| TransportError::new("response carried no choices"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Message;

    #[test]
    fn fixture_key_is_stable_and_order_sensitive() {
        let k1 = fixture_key("evalConsistency: [A] [B]");
        let k2 = fixture_key("evalConsistency: [A] [B]");
        let k3 = fixture_key("evalConsistency: [B] [A]");
        assert_eq!(k1, k2);
        assert_ne!(k1, k3);
        assert_eq!(k1.len(), 16);
        assert!(k1.chars().all(|c| c.is_ascii_hexdigit()));
    }

    #[test]
    fn scripted_mock_cycles_replies() {
        let mock = MockChatClient::scripted(vec!["one".into(), "two".into()]);
        let msgs = vec![Message::user("evalConsistency: [A] [B]")];
        assert_eq!(mock.complete(&msgs).unwrap(), "one");
        assert_eq!(mock.complete(&msgs).unwrap(), "two");
        assert_eq!(mock.complete(&msgs).unwrap(), "one");
    }

    #[test]
    fn fixture_mock_reads_keyed_files() {
        let dir = tempfile::tempdir().unwrap();
        let content = "evalConsistency: [A] [B]";
        let path = MockChatClient::fixture_path(dir.path(), content);
        std::fs::write(&path, r#"["canned reply is 7."]"#).unwrap();

        let mock = MockChatClient::from_fixture_dir(dir.path());
        let msgs = vec![Message::user(content)];
        assert_eq!(mock.complete(&msgs).unwrap(), "canned reply is 7.");

        let other = vec![Message::user("evalConsistency: [B] [A]")];
        assert!(mock.complete(&other).is_err());
    }

    #[test]
    fn request_body_shape() {
        let client = HttpChatClient::new(
            "http://localhost:9/v1/",
            "test-model",
            Some(0.7),
            Some("secret".into()),
            Duration::from_secs(1),
        )
        .unwrap();
        assert_eq!(client.url, "http://localhost:9/v1/chat/completions");
        let body = client.request_body(&[Message::system("s"), Message::user("u")]);
        assert_eq!(body["model"], "test-model");
        assert_eq!(body["temperature"], 0.7);
        assert_eq!(body["messages"][1]["role"], "user");
        assert_eq!(body["messages"][1]["content"], "u");

        let default_temp = HttpChatClient::new(
            "http://localhost:9",
            "m",
            None,
            None,
            Duration::from_secs(1),
        )
        .unwrap();
        assert!(default_temp.request_body(&[]).get("temperature").is_none());
    }
}
