//! Minimal chat-completion client: one user message in, the first choice's text out.

use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::Semaphore;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndpointConfig {
    /// Base URL; requests go to `{base_url}/chat/completions`.
    pub base_url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
    /// Attempts after the first one.
    pub retries: u32,
    /// Requests allowed in flight at once.
    pub max_in_flight: usize,
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        EndpointConfig {
            base_url: base_url.into(),
            model: model.into(),
            api_key: None,
            timeout: Duration::from_secs(60),
            retries: 2,
            max_in_flight: 2,
        }
    }

    /// Reads `EXPLAINER_API_BASE`, `EXPLAINER_API_KEY`, and `EXPLAINER_MODEL`. None without a base.
    pub fn from_env() -> Option<Self> {
        let base = std::env::var("EXPLAINER_API_BASE")
            .ok()
            .filter(|s| !s.is_empty())?;
        let model = std::env::var("EXPLAINER_MODEL").unwrap_or_else(|_| "default".to_string());
        let mut cfg = EndpointConfig::new(base, model);
        cfg.api_key = std::env::var("EXPLAINER_API_KEY")
            .ok()
            .filter(|s| !s.is_empty());
        Some(cfg)
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

/// The last failure after all retries. `status` is None when no HTTP response arrived.
#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
#[error("explanation endpoint failed ({}): {body}", status.map_or("no response".to_string(), |s| format!("HTTP {s}")))]
pub struct EndpointError {
    pub status: Option<u16>,
    pub body: String,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [Message<'a>; 1],
    temperature: f32,
}

#[derive(Serialize)]
struct Message<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ReplyMessage,
}

#[derive(Deserialize)]
struct ReplyMessage {
    content: String,
}

#[derive(Clone, Debug)]
pub struct ChatClient {
    config: EndpointConfig,
    http: reqwest::Client,
    permits: Arc<Semaphore>,
}

impl ChatClient {
    pub fn new(config: EndpointConfig) -> Self {
        let http = reqwest::Client::builder()
            .timeout(config.timeout)
            .build()
            .expect("http client builds with default settings");
        let permits = Arc::new(Semaphore::new(config.max_in_flight.max(1)));
        ChatClient {
            config,
            http,
            permits,
        }
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    pub async fn complete(&self, prompt: &str) -> Result<String, EndpointError> {
        let _permit = self
            .permits
            .acquire()
            .await
            .expect("semaphore is never closed");
        let mut last = EndpointError {
            status: None,
            body: String::new(),
        };
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                tokio::time::sleep(Duration::from_millis(100 << attempt.min(5))).await;
            }
            match self.attempt(prompt).await {
                Ok(text) => return Ok(text),
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    async fn attempt(&self, prompt: &str) -> Result<String, EndpointError> {
        let body = ChatRequest {
            model: &self.config.model,
            messages: [Message {
                role: "user",
                content: prompt,
            }],
            temperature: 0.0,
        };
        let mut req = self.http.post(self.config.url()).json(&body);
        if let Some(key) = &self.config.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().await.map_err(|e| EndpointError {
            status: e.status().map(|s| s.as_u16()),
            body: e.to_string(),
        })?;
        let status = resp.status();
        let text = resp.text().await.map_err(|e| EndpointError {
            status: Some(status.as_u16()),
            body: e.to_string(),
        })?;
        if !status.is_success() {
            return Err(EndpointError {
                status: Some(status.as_u16()),
                body: text,
            });
        }
        let parsed: ChatResponse = serde_json::from_str(&text).map_err(|e| EndpointError {
            status: Some(status.as_u16()),
            body: format!("unreadable reply ({e}): {text}"),
        })?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .filter(|t| !t.trim().is_empty())
            .ok_or(EndpointError {
                status: Some(status.as_u16()),
                body: "reply has no message text".to_string(),
            })
    }
}
