//! OpenAI-compatible chat-completion client.

use std::fmt;
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::Url;
use serde::{Deserialize, Serialize};

use super::{GenRequest, LlmError};

/// Default environment variable holding the bearer token.
pub const DEFAULT_AUTH_ENV: &str = "FORGE_LLM_TOKEN";

#[derive(Debug, Clone)]
pub struct RetryPolicy {
    /// Retries after the first failed attempt.
    pub retries: u32,
    /// Delay before the first retry; doubles for each subsequent one.
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            retries: 3,
            base_delay: Duration::from_secs(1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    /// Base URL; requests go to `{endpoint}/chat/completions`.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable that holds the bearer token.
    pub auth_env: String,
    pub max_in_flight: usize,
    pub retry: RetryPolicy,
    pub timeout: Duration,
}

impl RemoteConfig {
    pub fn new(endpoint: &str, model: &str) -> Self {
        Self {
            endpoint: endpoint.trim_end_matches('/').to_string(),
            model: model.to_string(),
            auth_env: DEFAULT_AUTH_ENV.into(),
            max_in_flight: 4,
            retry: RetryPolicy::default(),
            timeout: Duration::from_secs(60),
        }
    }

    pub fn auth_env(mut self, name: &str) -> Self {
        self.auth_env = name.to_string();
        self
    }
}

struct Gate {
    limit: usize,
    busy: Mutex<usize>,
    freed: Condvar,
}

impl Gate {
    fn acquire(&self) -> GateGuard<'_> {
        let mut busy = self.busy.lock().unwrap();
        while *busy >= self.limit {
            busy = self.freed.wait(busy).unwrap();
        }
        *busy += 1;
        GateGuard(self)
    }
}

struct GateGuard<'a>(&'a Gate);

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        *self.0.busy.lock().unwrap() -= 1;
        self.0.freed.notify_one();
    }
}

/// Shareable remote backend; clones share one in-flight limit.
#[derive(Clone)]
pub struct RemoteBackend {
    config: RemoteConfig,
    url: Url,
    client: Client,
    gate: Arc<Gate>,
}

impl fmt::Debug for RemoteBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RemoteBackend").field("config", &self.config).finish()
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<ChatMessage<'a>>,
    temperature: f64,
    max_tokens: u32,
    seed: u64,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ResponseMessage,
}

#[derive(Deserialize)]
struct ResponseMessage {
    content: Option<String>,
}

enum Attempt {
    Retry(LlmError),
    Fatal(LlmError),
}

impl RemoteBackend {
    pub fn new(config: RemoteConfig) -> Result<Self, LlmError> {
        let cfg_err = |message: String| LlmError::Config {
            endpoint: config.endpoint.clone(),
            message,
        };
        let base = Url::parse(&config.endpoint)
            .map_err(|e| cfg_err(format!("endpoint is not an absolute URL: {e}")))?;
        if !matches!(base.scheme(), "http" | "https") {
            return Err(cfg_err(format!("unsupported scheme \"{}\"", base.scheme())));
        }
        let url = Url::parse(&format!("{}/chat/completions", config.endpoint))
            .map_err(|e| cfg_err(e.to_string()))?;
        if config.max_in_flight == 0 {
            return Err(cfg_err("max_in_flight must be at least 1".into()));
        }
        let client = Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| cfg_err(e.to_string()))?;
        Ok(Self {
            gate: Arc::new(Gate {
                limit: config.max_in_flight,
                busy: Mutex::new(0),
                freed: Condvar::new(),
            }),
            config,
            url,
            client,
        })
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    pub(crate) fn complete(&self, req: &GenRequest) -> Result<String, LlmError> {
        let token = std::env::var(&self.config.auth_env)
            .ok()
            .filter(|t| !t.is_empty())
            .ok_or_else(|| LlmError::Config {
                endpoint: self.config.endpoint.clone(),
                message: format!("auth token variable {} is not set", self.config.auth_env),
            })?;
        let body = ChatRequest {
            model: &self.config.model,
            messages: vec![ChatMessage {
                role: "user",
                content: &req.prompt,
            }],
            temperature: req.temperature,
            max_tokens: req.max_tokens,
            seed: req.seed,
        };

        let _slot = self.gate.acquire();
        let mut delay = self.config.retry.base_delay;
        let mut attempt = 0;
        loop {
            match self.send(&token, &body) {
                Ok(text) => return Ok(text),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(e)) => {
                    if attempt >= self.config.retry.retries {
                        return Err(e);
                    }
                    attempt += 1;
                    std::thread::sleep(delay);
                    delay *= 2;
                }
            }
        }
    }

    fn send(&self, token: &str, body: &ChatRequest<'_>) -> Result<String, Attempt> {
        let endpoint = self.config.endpoint.clone();
        let resp = self
            .client
            .post(self.url.clone())
            .bearer_auth(token)
            .json(body)
            .send()
            .map_err(|e| {
                Attempt::Retry(LlmError::Network {
                    endpoint: endpoint.clone(),
                    message: e.to_string(),
                })
            })?;
        let status = resp.status();
        if !status.is_success() {
            let err = LlmError::Status {
                endpoint: endpoint.clone(),
                status: status.as_u16(),
                body: resp.text().unwrap_or_default(),
            };
            return Err(if status.is_server_error() || status.as_u16() == 429 {
                Attempt::Retry(err)
            } else {
                Attempt::Fatal(err)
            });
        }
        let parsed: ChatResponse = resp.json().map_err(|e| {
            Attempt::Fatal(LlmError::BadResponse {
                endpoint: endpoint.clone(),
                message: e.to_string(),
            })
        })?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .ok_or(Attempt::Fatal(LlmError::BadResponse {
                endpoint,
                message: "no message content in choices[0]".into(),
            }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_must_be_absolute() {
        assert!(RemoteBackend::new(RemoteConfig::new("localhost:8080/v1", "m")).is_err());
        assert!(RemoteBackend::new(RemoteConfig::new("/v1", "m")).is_err());
        assert!(RemoteBackend::new(RemoteConfig::new("http://localhost:8080/v1", "m")).is_ok());
    }

    #[test]
    fn missing_auth_fails_before_network() {
        // Port 9 (discard) on a reserved address; never contacted.
        let cfg = RemoteConfig::new("http://192.0.2.1:9/v1", "m").auth_env("FORGE_TEST_UNSET_TOKEN_VAR");
        let b = RemoteBackend::new(cfg).unwrap();
        let t = std::time::Instant::now();
        let err = b.complete(&GenRequest::new("hi", 0)).unwrap_err();
        assert!(matches!(err, LlmError::Config { ref endpoint, .. } if endpoint.contains("192.0.2.1")));
        assert!(t.elapsed() < Duration::from_secs(1));
    }
}
