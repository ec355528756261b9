//! Subcommand implementations and shared run plumbing.

mod ablate;
mod analyze;
mod derive;
mod gen_demo;
mod simulate;
mod validate;

pub use ablate::cmd_ablate;
pub use analyze::{cmd_analyze, AnalyzeRequest};
pub use derive::{cmd_derive, DeriveRequest};
pub use gen_demo::{cmd_gen_demo, GenDemoRequest};
pub use simulate::cmd_simulate;
pub use validate::{cmd_validate, ValidateRequest};

use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use serde::Serialize;
use studentsim::engine::{ExperimentOutput, PromptTemplates};
use studentsim::provider::{ChatClient, RateLimiter, RemoteTransport, RetryPolicy, SystemClock};

use crate::config::{ProviderKind, RunConfig};

/// Command outcome mapped to process exit codes: success is 0, a run where
/// some agents failed is 2, fatal errors are 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Success,
    Partial,
}

impl RunStatus {
    pub fn exit_code(self) -> u8 {
        match self {
            RunStatus::Success => 0,
            RunStatus::Partial => 2,
        }
    }
}

pub fn resolve_templates(config: &RunConfig) -> Result<PromptTemplates> {
    match &config.templates {
        Some(dir) => PromptTemplates::from_dir(dir)
            .with_context(|| format!("loading templates from {}", dir.display())),
        None => Ok(PromptTemplates::builtin()),
    }
}

pub fn build_client(config: &RunConfig) -> Result<ChatClient> {
    match config.provider {
        ProviderKind::Mock => Ok(ChatClient::mock(config.mock_policy.clone())),
        ProviderKind::Remote => {
            let transport = RemoteTransport::from_config(&config.remote)
                .context("configuring the remote provider")?;
            let clock = Arc::new(SystemClock::default());
            let limiter = RateLimiter::new(config.remote.requests_per_minute, clock.clone());
            Ok(ChatClient::new(
                Arc::new(transport),
                RetryPolicy {
                    max_attempts: config.remote.retry.max_attempts,
                    base_backoff_ms: config.remote.retry.base_backoff_ms,
                },
                Some(limiter),
                clock,
            ))
        }
    }
}

#[derive(Serialize)]
struct LogLine<'a> {
    student_id: &'a str,
    slide_index: u32,
    attempts: u32,
    fallback: bool,
    reflection: &'a str,
    prompt_system: &'a str,
    prompt_user: &'a str,
    raw_response: &'a str,
}

/// Writes one JSONL log per agent with the exact prompts and replies.
pub fn write_logs(output: &ExperimentOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating log directory {}", dir.display()))?;
    for (i, agent) in output.agents.iter().enumerate() {
        let path = dir.join(format!("agent-{i:04}.jsonl"));
        let mut lines = Vec::with_capacity(agent.steps.len());
        for step in &agent.steps {
            let line = LogLine {
                student_id: &agent.student_id,
                slide_index: step.slide_index,
                attempts: step.attempts,
                fallback: step.fallback,
                reflection: &step.reflection_text,
                prompt_system: &step.prompt_system,
                prompt_user: &step.prompt_user,
                raw_response: &step.raw_response,
            };
            lines.push(serde_json::to_string(&line).context("serializing log line")?);
        }
        std::fs::write(&path, lines.join("\n") + "\n")
            .with_context(|| format!("writing log {}", path.display()))?;
    }
    Ok(())
}
