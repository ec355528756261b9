//! Sliding-window rate limiter shared by all workers of one client.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use super::clock::Clock;

const WINDOW_S: f64 = 60.0;

/// Caps outbound requests at `cap` per sliding 60-second window. `acquire`
/// blocks (via the injected clock) until a slot frees up.
pub struct RateLimiter {
    cap: u32,
    sent_at: Mutex<VecDeque<f64>>,
    clock: Arc<dyn Clock>,
}

impl RateLimiter {
    pub fn new(cap: u32, clock: Arc<dyn Clock>) -> Self {
        Self {
            cap: cap.max(1),
            sent_at: Mutex::new(VecDeque::new()),
            clock,
        }
    }

    /// Blocks until a request may be sent, then records the send time.
    /// Returns the recorded timestamp (useful for tests).
    pub fn acquire(&self) -> f64 {
        loop {
            let wait_s = {
                let mut sent = self.sent_at.lock().unwrap();
                let now = self.clock.now_s();
                while let Some(&oldest) = sent.front() {
                    if now - oldest >= WINDOW_S {
                        sent.pop_front();
                    } else {
                        break;
                    }
                }
                if (sent.len() as u32) < self.cap {
                    sent.push_back(now);
                    return now;
                }
                // Oldest in-window request ages out of the window first.
                WINDOW_S - (now - sent[0])
            };
            self.clock.sleep(Duration::from_secs_f64(wait_s.max(1e-3)));
        }
    }
}
