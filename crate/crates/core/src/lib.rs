//! Simulation harness for virtual students attending slide-based lectures.
//!
//! The library is organized around the lifecycle of a simulation run:
//!
//! - [`model`] — lecture/slide/AOI domain types and AOI geometry
//! - [`persona`] — the virtual-student persona space (sampling, rendering, encoding)
//! - [`dataset`] — lecture/cohort/raw-recording file formats and cognitive-state derivation
//! - [`provider`] — chat-completion providers (remote OpenAI-compatible endpoint or
//!   deterministic mock), with retries, rate limiting, and structured-output parsing
//! - [`engine`] — the per-slide agent loop: layered memory, reflection prompting,
//!   action generation, and both experiment drivers
//! - [`metrics`] — replay-fidelity scores, behavior summaries, and correlation analytics
//! - [`fixtures`] — seeded demo-data builders used by tests and the `gen-demo` command

pub mod dataset;
pub mod engine;
pub mod fixtures;
pub mod metrics;
pub mod model;
pub mod persona;
pub mod provider;
