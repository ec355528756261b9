//! Run configuration: a JSON config file mirroring the CLI flags, with
//! flags taking precedence over file values.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use studentsim::engine::{AblationFlags, PriorMode, SimulationConfig};
use studentsim::provider::{MockPolicy, ProviderConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Experiment1,
    Experiment2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PriorArg {
    Cognitive,
    Standard,
}

impl PriorArg {
    pub fn to_mode(self) -> PriorMode {
        match self {
            PriorArg::Cognitive => PriorMode::CognitivePriors,
            PriorArg::Standard => PriorMode::Standard,
        }
    }
}

/// One-of ablation selector matching the experiment grid's cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum AblateArg {
    #[value(name = "none")]
    None,
    #[value(name = "M", alias = "m")]
    M,
    #[value(name = "P", alias = "p")]
    P,
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "D", alias = "d")]
    D,
}

impl AblateArg {
    pub fn to_flags(self) -> AblationFlags {
        match self {
            AblateArg::None => AblationFlags::default(),
            AblateArg::M => AblationFlags {
                drop_motor: true,
                ..AblationFlags::default()
            },
            AblateArg::P => AblationFlags {
                drop_gaze: true,
                ..AblationFlags::default()
            },
            AblateArg::C => AblationFlags {
                drop_cognitive: true,
                ..AblationFlags::default()
            },
            AblateArg::D => AblationFlags {
                drop_demonstration: true,
                ..AblationFlags::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    Remote,
    Mock,
}

/// The `provider` section of the config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderSection {
    pub kind: Option<ProviderKind>,
    /// Remote endpoint settings; the credential stays in the environment.
    pub remote: Option<ProviderConfig>,
    /// Mock response policy, including fault injection.
    pub mock_policy: Option<MockPolicy>,
}

/// The JSON config file: every field optional, flags override.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lecture: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub cohort_size: Option<usize>,
    pub records: Option<PathBuf>,
    pub prior: Option<PriorArg>,
    pub ablate: Option<AblateArg>,
    pub provider: Option<ProviderSection>,
    pub model: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
    pub templates: Option<PathBuf>,
    pub logs: Option<bool>,
    pub include_gender: Option<bool>,
}

impl FileConfig {
    /// Reads a config file. A run manifest is accepted too: its embedded
    /// `config` object is used, so a finished run re-executes directly.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        let config_value = value.get("config").cloned().unwrap_or(value);
        serde_json::from_value(config_value)
            .with_context(|| format!("interpreting config {}", path.display()))
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub lecture: PathBuf,
    pub mode: Mode,
    pub cohort_size: Option<usize>,
    pub records: Option<PathBuf>,
    pub prior: PriorArg,
    pub ablate: AblateArg,
    pub provider: ProviderKind,
    pub model: String,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub temperature: f64,
    pub max_tokens: u32,
    pub templates: Option<PathBuf>,
    pub logs: bool,
    pub include_gender: bool,
    pub remote: ProviderConfig,
    pub mock_policy: MockPolicy,
}

impl RunConfig {
    /// Merges file values and flag overrides, then validates the result.
    /// Every missing required key is reported by name.
    pub fn resolve(file: FileConfig, flags: FileConfig) -> Result<Self> {
        let pick = |a: Option<PathBuf>, b: Option<PathBuf>| b.or(a);
        let lecture = pick(file.lecture, flags.lecture)
            .ok_or_else(|| anyhow::anyhow!("config: `lecture` is required"))?;
        let mode = flags
            .mode
            .or(file.mode)
            .ok_or_else(|| anyhow::anyhow!("config: `mode` is required"))?;
        let out = pick(file.out, flags.out)
            .ok_or_else(|| anyhow::anyhow!("config: `out` is required"))?;

        let cohort_size = flags.cohort_size.or(file.cohort_size);
        let records = pick(file.records, flags.records);
        match mode {
            Mode::Experiment1 => {
                if records.is_none() {
                    bail!("config: `records` is required for experiment1");
                }
            }
            Mode::Experiment2 => {
                if cohort_size.is_none() {
                    bail!("config: `cohort_size` is required for experiment2");
                }
                if cohort_size == Some(0) {
                    bail!("config: `cohort_size` must be at least 1");
                }
            }
        }

        let file_provider = file.provider.unwrap_or_default();
        let flag_provider = flags.provider.unwrap_or_default();
        let kind = flag_provider
            .kind
            .or(file_provider.kind)
            .unwrap_or(ProviderKind::Mock);
        Ok(Self {
            lecture,
            mode,
            cohort_size,
            records,
            prior: flags.prior.or(file.prior).unwrap_or(PriorArg::Cognitive),
            ablate: flags.ablate.or(file.ablate).unwrap_or(AblateArg::None),
            provider: kind,
            model: flags.model.or(file.model).unwrap_or_else(|| match kind {
                ProviderKind::Mock => "mock".to_string(),
                ProviderKind::Remote => "gpt-3.5-turbo".to_string(),
            }),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            workers: flags.workers.or(file.workers).unwrap_or(4).max(1),
            out,
            temperature: flags.temperature.or(file.temperature).unwrap_or(0.0),
            max_tokens: flags.max_tokens.or(file.max_tokens).unwrap_or(2048),
            templates: pick(file.templates, flags.templates),
            logs: flags.logs.or(file.logs).unwrap_or(true),
            include_gender: flags
                .include_gender
                .or(file.include_gender)
                .unwrap_or(false),
            remote: flag_provider
                .remote
                .or(file_provider.remote)
                .unwrap_or_default(),
            mock_policy: flag_provider
                .mock_policy
                .or(file_provider.mock_policy)
                .unwrap_or_default(),
        })
    }

    pub fn simulation_config(&self) -> SimulationConfig {
        SimulationConfig {
            prior_mode: self.prior.to_mode(),
            ablation: self.ablate.to_flags(),
            seed: self.seed,
            temperature: self.temperature,
            max_tokens: self.max_tokens,
            model_name: self.model.clone(),
        }
    }

    /// The config as it would appear in a config file, for the manifest.
    pub fn to_file_config(&self) -> FileConfig {
        FileConfig {
            lecture: Some(self.lecture.clone()),
            mode: Some(self.mode),
            cohort_size: self.cohort_size,
            records: self.records.clone(),
            prior: Some(self.prior),
            ablate: Some(self.ablate),
            provider: Some(ProviderSection {
                kind: Some(self.provider),
                remote: Some(self.remote.clone()),
                mock_policy: Some(self.mock_policy.clone()),
            }),
            model: Some(self.model.clone()),
            seed: Some(self.seed),
            workers: Some(self.workers),
            out: Some(self.out.clone()),
            temperature: Some(self.temperature),
            max_tokens: Some(self.max_tokens),
            templates: self.templates.clone(),
            logs: Some(self.logs),
            include_gender: Some(self.include_gender),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_flags() -> FileConfig {
        FileConfig {
            lecture: Some("lecture.jsonl".into()),
            mode: Some(Mode::Experiment2),
            cohort_size: Some(3),
            out: Some("out".into()),
            ..FileConfig::default()
        }
    }

    #[test]
    fn experiment1_requires_records() {
        let mut flags = base_flags();
        flags.mode = Some(Mode::Experiment1);
        let err = RunConfig::resolve(FileConfig::default(), flags).unwrap_err();
        assert!(err.to_string().contains("records"));
    }

    #[test]
    fn experiment2_requires_cohort_size() {
        let mut flags = base_flags();
        flags.cohort_size = None;
        let err = RunConfig::resolve(FileConfig::default(), flags).unwrap_err();
        assert!(err.to_string().contains("cohort_size"));
    }

    #[test]
    fn flags_override_file_values() {
        let mut file = base_flags();
        file.seed = Some(1);
        file.model = Some("from-file".into());
        let mut flags = base_flags();
        flags.seed = Some(2);
        flags.model = None;
        let resolved = RunConfig::resolve(file, flags).unwrap();
        assert_eq!(resolved.seed, 2);
        assert_eq!(resolved.model, "from-file");
    }

    #[test]
    fn defaults_are_mock_and_cognitive() {
        let resolved = RunConfig::resolve(FileConfig::default(), base_flags()).unwrap();
        assert_eq!(resolved.provider, ProviderKind::Mock);
        assert_eq!(resolved.prior, PriorArg::Cognitive);
        assert!(resolved.logs);
        assert_eq!(resolved.workers, 4);
    }
}
