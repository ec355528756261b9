//! Chat-completion providers: a remote OpenAI-compatible endpoint and a
//! deterministic mock, behind one retrying, rate-limited client.

mod client;
mod clock;
mod mock;
mod parse;
mod rate_limit;
mod remote;

pub use client::{ChatClient, RetryPolicy, Transport};
pub use clock::{Clock, ManualClock, SystemClock};
pub use mock::{AoiRule, ChoiceRule, Coupling, MockFaults, MockPolicy, MockTransport, StateName};
pub use parse::{
    parse_structured, ActionSchema, AnswerAction, ParseFailure, ParsedAction, TranscriptAction,
};
pub use rate_limit::RateLimiter;
pub use remote::RemoteTransport;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single chat-completion request. Each simulation step is one request;
/// there is no multi-turn state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub system_text: String,
    pub user_text: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub model_name: String,
}

impl ChatRequest {
    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.system_text.is_empty() || self.user_text.is_empty() {
            return Err(ProviderError::InvalidRequest("empty prompt text".into()));
        }
        if self.temperature < 0.0 {
            return Err(ProviderError::InvalidRequest(format!(
                "negative temperature {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

/// Remote endpoint configuration. The credential is always read from the
/// named environment variable, never stored in config or flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub endpoint: String,
    pub credential_env: String,
    #[serde(default = "default_rpm")]
    pub requests_per_minute: u32,
    #[serde(default)]
    pub retry: RetryPolicy,
}

fn default_rpm() -> u32 {
    60
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            credential_env: "OPENAI_API_KEY".into(),
            requests_per_minute: default_rpm(),
            retry: RetryPolicy::default(),
        }
    }
}

/// Provider failures. Transient failures are retried by [`ChatClient`];
/// the other variants surface immediately.
#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("transient provider failure: {0}")]
    Transient(String),
    #[error("retries exhausted after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: String },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("malformed endpoint reply: {0}")]
    MalformedReply(String),
    #[error("endpoint rejected request (status {status}): {body}")]
    Rejected { status: u16, body: String },
    #[error("credential variable {0} is not set")]
    MissingCredential(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("remote providers are disabled: {0}")]
    NetworkDisabled(String),
}

impl ProviderError {
    pub fn is_transient(&self) -> bool {
        matches!(self, ProviderError::Transient(_))
    }
}
