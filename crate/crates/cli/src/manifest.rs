//! Run manifest: everything needed to re-execute a run bit-identically with
//! the mock provider. Deliberately timestamp-free so repeated runs produce
//! identical trees.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use studentsim::engine::ExperimentOutput;

use crate::config::{FileConfig, RunConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgentAccounting {
    pub student_id: String,
    pub steps: u32,
    pub attempts: u32,
    pub fallback_steps: u32,
    pub request_chars: usize,
    pub response_chars: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureEntry {
    pub student_id: String,
    pub slide_index: u32,
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    /// Re-executable configuration: feed this object back via `--config`.
    pub config: FileConfig,
    pub provider_identity: String,
    pub template_hash: String,
    pub agents: Vec<AgentAccounting>,
    pub failures: Vec<FailureEntry>,
}

impl RunManifest {
    pub fn new(
        config: &RunConfig,
        provider_identity: String,
        template_hash: String,
        output: &ExperimentOutput,
    ) -> Self {
        let agents = output
            .agents
            .iter()
            .map(|a| AgentAccounting {
                student_id: a.student_id.clone(),
                steps: a.steps.len() as u32,
                attempts: a.total_attempts(),
                fallback_steps: a.fallback_steps(),
                request_chars: a.steps.iter().map(|s| s.request_chars).sum(),
                response_chars: a.steps.iter().map(|s| s.response_chars).sum(),
            })
            .collect();
        let failures = output
            .failures
            .iter()
            .map(|f| FailureEntry {
                student_id: f.student_id.clone(),
                slide_index: f.slide_index,
                error: f.error.clone(),
            })
            .collect();
        Self {
            config: config.to_file_config(),
            provider_identity,
            template_hash,
            agents,
            failures,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).context("serializing manifest")?;
        std::fs::write(path, text + "\n")
            .with_context(|| format!("writing manifest {}", path.display()))
    }
}
