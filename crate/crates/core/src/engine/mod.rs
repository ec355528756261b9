//! The per-slide simulation loop and both experiment drivers.
//!
//! Slides are processed strictly in order within one agent. Each step builds
//! a prompt from the persona, the current slide, and the memory of exactly
//! the previous slide, calls the provider once (re-prompting on unusable
//! replies), and decodes the reply into one behavior record per transcript
//! plus one answer per attached question.

mod experiment;
mod memory;
mod prompt;
mod step;

pub use experiment::{
    run_experiment1, run_experiment2, AgentFailure, AgentRunOutput, ExperimentOutput,
};
pub use memory::{MemoryStore, SlideMemory};
pub use prompt::{
    build_prompt, PromptTemplates, COGNITIVE_LINE_TAG, CORRECTION_MARKER, CURRENT_SLIDE_MARKER,
    DEMONSTRATION_MARKER, GAZE_LINE_TAG, MOTOR_LINE_TAG, OUTPUT_SCHEMA_MARKER, PERSONA_MARKER,
    PRIORS_MARKER, REFLECT_MARKER,
};
pub use step::{run_slide_step, StepOutput};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::provider::ProviderError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("provider failed on slide {slide} after {attempts} step attempt(s): {source}")]
    Provider {
        slide: u32,
        attempts: u32,
        #[source]
        source: ProviderError,
    },
    #[error("memory: {0}")]
    Memory(String),
    #[error("record/lecture mismatch: {0}")]
    Mismatch(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Prompting mode: the reflection-first prompt with embedded findings, or a
/// plain prompt that asks directly for the outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorMode {
    CognitivePriors,
    Standard,
}

/// Which memory layers to withhold from the demonstration block.
/// `drop_demonstration` removes the whole block regardless of the rest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationFlags {
    #[serde(default)]
    pub drop_motor: bool,
    #[serde(default)]
    pub drop_gaze: bool,
    #[serde(default)]
    pub drop_cognitive: bool,
    #[serde(default)]
    pub drop_demonstration: bool,
}

impl AblationFlags {
    /// Short cell name used in output paths and reports.
    pub fn cell_name(&self) -> &'static str {
        match (
            self.drop_demonstration,
            self.drop_gaze,
            self.drop_motor,
            self.drop_cognitive,
        ) {
            (true, _, _, _) => "xd",
            (false, true, false, false) => "xp",
            (false, false, true, false) => "xm",
            (false, false, false, true) => "xc",
            _ => "all",
        }
    }
}

/// Per-run simulation settings shared by every agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    #[serde(default = "default_prior_mode")]
    pub prior_mode: PriorMode,
    #[serde(default)]
    pub ablation: AblationFlags,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_model_name")]
    pub model_name: String,
}

fn default_prior_mode() -> PriorMode {
    PriorMode::CognitivePriors
}

fn default_max_tokens() -> u32 {
    2048
}

fn default_model_name() -> String {
    "mock".into()
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            prior_mode: default_prior_mode(),
            ablation: AblationFlags::default(),
            seed: 0,
            temperature: 0.0,
            max_tokens: default_max_tokens(),
            model_name: default_model_name(),
        }
    }
}

/// Per-agent seed derivation: the run seed XOR the agent's index, so one
/// agent's stream is reproducible independently of cohort size.
pub fn agent_seed(run_seed: u64, agent_index: usize) -> u64 {
    run_seed ^ agent_index as u64
}
