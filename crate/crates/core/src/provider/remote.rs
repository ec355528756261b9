//! OpenAI-compatible chat-completions transport over HTTPS.

use std::time::Duration;

use serde_json::json;

use super::client::Transport;
use super::{ChatRequest, ProviderConfig, ProviderError};

const REQUEST_TIMEOUT: Duration = Duration::from_secs(120);

/// Remote endpoint speaking the chat-completions wire protocol: `model`,
/// `messages` with `system`/`user` roles, `temperature`, `max_tokens`;
/// the reply text is the first choice's message content.
pub struct RemoteTransport {
    endpoint: String,
    api_key: String,
    http: reqwest::blocking::Client,
}

// The credential must never leak through debug output.
impl std::fmt::Debug for RemoteTransport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteTransport")
            .field("endpoint", &self.endpoint)
            .field("api_key", &"<redacted>")
            .finish()
    }
}

impl RemoteTransport {
    /// Builds the transport, reading the credential from the configured
    /// environment variable. Refuses to construct when `NO_NETWORK=1`.
    pub fn from_config(config: &ProviderConfig) -> Result<Self, ProviderError> {
        if std::env::var("NO_NETWORK").ok().as_deref() == Some("1") {
            return Err(ProviderError::NetworkDisabled(
                "NO_NETWORK=1 is set; use the mock provider".into(),
            ));
        }
        let api_key = std::env::var(&config.credential_env)
            .map_err(|_| ProviderError::MissingCredential(config.credential_env.clone()))?;
        let http = reqwest::blocking::Client::builder()
            .timeout(REQUEST_TIMEOUT)
            .build()
            .map_err(|e| ProviderError::InvalidRequest(e.to_string()))?;
        Ok(Self {
            endpoint: config.endpoint.clone(),
            api_key,
            http,
        })
    }
}

impl Transport for RemoteTransport {
    fn send(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        let body = json!({
            "model": request.model_name,
            "messages": [
                { "role": "system", "content": request.system_text },
                { "role": "user", "content": request.user_text },
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        });

        let response = self
            .http
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send();

        let response = match response {
            Ok(r) => r,
            // Connection-level trouble is worth retrying.
            Err(e) => return Err(ProviderError::Transient(e.to_string())),
        };

        let status = response.status();
        if status.as_u16() == 401 || status.as_u16() == 403 {
            return Err(ProviderError::Auth(format!("endpoint returned {status}")));
        }
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(ProviderError::Transient(format!(
                "endpoint returned {status}"
            )));
        }
        if !status.is_success() {
            let body = response.text().unwrap_or_default();
            return Err(ProviderError::Rejected {
                status: status.as_u16(),
                body: body.chars().take(500).collect(),
            });
        }

        let payload: serde_json::Value = response
            .json()
            .map_err(|e| ProviderError::MalformedReply(format!("not JSON: {e}")))?;
        payload
            .get("choices")
            .and_then(|c| c.get(0))
            .and_then(|c| c.get("message"))
            .and_then(|m| m.get("content"))
            .and_then(|c| c.as_str())
            .map(str::to_string)
            .ok_or_else(|| {
                ProviderError::MalformedReply("reply has no choices[0].message.content text".into())
            })
    }

    fn identity(&self) -> String {
        format!("remote:{}", self.endpoint)
    }
}
