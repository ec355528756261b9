//! Command-line runner for virtual-student lecture simulations.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{
    cmd_ablate, cmd_analyze, cmd_derive, cmd_gen_demo, cmd_simulate, cmd_validate, RunStatus,
};
use commands::{AnalyzeRequest, DeriveRequest, GenDemoRequest, ValidateRequest};
use config::{AblateArg, FileConfig, Mode, PriorArg, ProviderKind, ProviderSection, RunConfig};

#[derive(Parser)]
#[command(
    name = "studentsim",
    version,
    about = "Drive virtual-student agents through slide lectures and analyze their behavior"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment configuration and write a reproducible output tree.
    Simulate(SimulateArgs),
    /// Run the six-cell memory/prompting ablation grid over the same inputs.
    Ablate(SimulateArgs),
    /// Score a cohort against ground truth, or summarize and correlate it.
    Analyze(AnalyzeArgs),
    /// Check lecture/cohort/raw files against every format invariant.
    Validate(ValidateArgs),
    /// Reduce raw per-second recordings to transcript-level student records.
    Derive(DeriveArgs),
    /// Write a seeded demo lecture and synthetic student files.
    GenDemo(GenDemoArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON config file; flags override its values. A run manifest works too.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Lecture file (JSONL, one slide per line).
    #[arg(long)]
    lecture: Option<PathBuf>,
    /// experiment1 replays real students; experiment2 generates a cohort.
    #[arg(long)]
    mode: Option<Mode>,
    /// Number of virtual students (experiment2).
    #[arg(long)]
    cohort_size: Option<usize>,
    /// Real-student records for replay (experiment1).
    #[arg(long)]
    records: Option<PathBuf>,
    /// Prompting mode.
    #[arg(long)]
    prior: Option<PriorArg>,
    /// Memory ablation: none, M (motor), P (gaze), C (cognitive), D (whole demonstration).
    #[arg(long)]
    ablate: Option<AblateArg>,
    #[arg(long)]
    provider: Option<ProviderKind>,
    /// Model name sent to the provider.
    #[arg(long)]
    model: Option<String>,
    /// Top-level seed; agent i derives seed XOR i.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker pool size.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    max_tokens: Option<u32>,
    /// Directory of prompt template overrides.
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Disable prompt/response logs (they are on by default).
    #[arg(long)]
    no_logs: bool,
    /// Include gender among the correlation columns.
    #[arg(long)]
    include_gender: bool,
}

impl SimulateArgs {
    fn resolve(self, forced_mode: Option<Mode>) -> anyhow::Result<RunConfig> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = FileConfig {
            lecture: self.lecture,
            mode: forced_mode.or(self.mode),
            cohort_size: self.cohort_size,
            records: self.records,
            prior: self.prior,
            ablate: self.ablate,
            provider: self.provider.map(|kind| ProviderSection {
                kind: Some(kind),
                remote: None,
                mock_policy: None,
            }),
            model: self.model,
            seed: self.seed,
            workers: self.workers,
            out: self.out,
            temperature: self.temperature,
            max_tokens: self.max_tokens,
            templates: self.templates,
            logs: self.no_logs.then_some(false),
            include_gender: self.include_gender.then_some(true),
        };
        RunConfig::resolve(file, flags)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    lecture: PathBuf,
    /// Cohort to analyze (JSONL of student records).
    #[arg(long)]
    cohort: PathBuf,
    /// Ground-truth records; when given, replay scores are computed instead
    /// of summaries.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    include_gender: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    lecture: PathBuf,
    #[arg(long)]
    cohort: Option<PathBuf>,
    #[arg(long)]
    raw: Option<PathBuf>,
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(long)]
    lecture: PathBuf,
    /// Raw per-second recordings (JSONL, one student per line).
    #[arg(long)]
    raw: PathBuf,
    /// Output student-records file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenDemoArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 6)]
    slides: u32,
    #[arg(long, default_value_t = 8)]
    students: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run(cli: Cli) -> anyhow::Result<RunStatus> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args.resolve(None)?),
        Command::Ablate(args) => cmd_ablate(&args.resolve(Some(Mode::Experiment1))?),
        Command::Analyze(args) => cmd_analyze(&AnalyzeRequest {
            lecture: args.lecture,
            cohort: args.cohort,
            truth: args.truth,
            out: args.out,
            include_gender: args.include_gender,
        }),
        Command::Validate(args) => cmd_validate(&ValidateRequest {
            lecture: args.lecture,
            cohort: args.cohort,
            raw: args.raw,
        }),
        Command::Derive(args) => cmd_derive(&DeriveRequest {
            lecture: args.lecture,
            raw: args.raw,
            out: args.out,
        }),
        Command::GenDemo(args) => cmd_gen_demo(&GenDemoRequest {
            out: args.out,
            slides: args.slides,
            students: args.students,
            seed: args.seed,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(1)
        }
    }
}
