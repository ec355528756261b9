//! Clock abstraction so rate limiting and backoff are testable with a
//! simulated clock.

use std::sync::Mutex;
use std::time::Duration;

/// Monotonic time source used by the rate limiter and retry backoff.
pub trait Clock: Send + Sync {
    /// Seconds since an arbitrary epoch, monotonically non-decreasing.
    fn now_s(&self) -> f64;
    fn sleep(&self, duration: Duration);
}

/// Wall-clock implementation.
#[derive(Debug, Default)]
pub struct SystemClock {
    origin: std::sync::OnceLock<std::time::Instant>,
}

impl Clock for SystemClock {
    fn now_s(&self) -> f64 {
        let origin = self.origin.get_or_init(std::time::Instant::now);
        origin.elapsed().as_secs_f64()
    }

    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

/// Simulated clock: `sleep` advances time instantly. Useful for rate-limit
/// and backoff tests that must not wait in real time.
#[derive(Debug, Default)]
pub struct ManualClock {
    now_s: Mutex<f64>,
}

impl ManualClock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn advance(&self, seconds: f64) {
        *self.now_s.lock().unwrap() += seconds;
    }
}

impl Clock for ManualClock {
    fn now_s(&self) -> f64 {
        *self.now_s.lock().unwrap()
    }

    fn sleep(&self, duration: Duration) {
        self.advance(duration.as_secs_f64());
    }
}
