//! The retrying, rate-limited chat client shared by every simulation worker.

use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::clock::{Clock, SystemClock};
use super::mock::{MockPolicy, MockTransport};
use super::rate_limit::RateLimiter;
use super::{ChatRequest, ProviderError};

/// Raw request transport: one attempt, no retries. Implementations must be
/// safe to call from many worker threads.
pub trait Transport: Send + Sync {
    fn send(&self, request: &ChatRequest) -> Result<String, ProviderError>;
    /// Short provider identity recorded in run manifests.
    fn identity(&self) -> String;
}

/// Retry configuration for transient failures (timeouts, 429, 5xx).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            base_backoff_ms: 500,
        }
    }
}

impl RetryPolicy {
    fn backoff_after(&self, attempt: u32) -> Duration {
        let factor = 1u64 << (attempt - 1).min(16);
        Duration::from_millis(self.base_backoff_ms.saturating_mul(factor))
    }
}

/// Completion client: rate-limits each outbound attempt and retries
/// transient failures with exponential backoff.
pub struct ChatClient {
    transport: Arc<dyn Transport>,
    retry: RetryPolicy,
    limiter: Option<RateLimiter>,
    clock: Arc<dyn Clock>,
}

impl ChatClient {
    pub fn new(
        transport: Arc<dyn Transport>,
        retry: RetryPolicy,
        limiter: Option<RateLimiter>,
        clock: Arc<dyn Clock>,
    ) -> Self {
        Self {
            transport,
            retry: RetryPolicy {
                max_attempts: retry.max_attempts.max(1),
                ..retry
            },
            limiter,
            clock,
        }
    }

    /// A mock-backed client with no rate cap and no real backoff waits.
    pub fn mock(policy: MockPolicy) -> Self {
        Self::new(
            Arc::new(MockTransport::new(policy)),
            RetryPolicy {
                max_attempts: 3,
                base_backoff_ms: 0,
            },
            None,
            Arc::new(SystemClock::default()),
        )
    }

    pub fn identity(&self) -> String {
        self.transport.identity()
    }

    /// Sends the request, retrying transient failures up to the policy's
    /// attempt budget. Authentication and malformed-reply failures surface
    /// immediately.
    pub fn complete(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        request.validate()?;
        let max_attempts = self.retry.max_attempts;
        let mut last = String::new();
        for attempt in 1..=max_attempts {
            if let Some(limiter) = &self.limiter {
                limiter.acquire();
            }
            match self.transport.send(request) {
                Ok(text) => return Ok(text),
                Err(e) if e.is_transient() => {
                    last = e.to_string();
                    if attempt < max_attempts {
                        self.clock.sleep(self.retry.backoff_after(attempt));
                    }
                }
                Err(e) => return Err(e),
            }
        }
        Err(ProviderError::RetriesExhausted {
            attempts: max_attempts,
            last,
        })
    }
}
