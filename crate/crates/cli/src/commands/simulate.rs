//! The `simulate` command: run one experiment configuration end to end and
//! leave a reproducible output tree behind.

use anyhow::{Context, Result};
use studentsim::dataset::{export_cohort, load_cohort_validated, load_lecture, StudentRecord};
use studentsim::engine::{run_experiment1, run_experiment2, ExperimentOutput};
use studentsim::metrics::{
    behavior_summary, correlation_matrix, replay_scores, write_correlation_csv, write_scores_csv,
    write_summary_csv, MetricsError, ReplayScores,
};
use studentsim::model::Lecture;

use super::{build_client, resolve_templates, write_logs, RunStatus};
use crate::config::{Mode, RunConfig};
use crate::manifest::RunManifest;

pub fn cmd_simulate(config: &RunConfig) -> Result<RunStatus> {
    let lecture = load_lecture(&config.lecture)
        .with_context(|| format!("loading lecture {}", config.lecture.display()))?;
    let templates = resolve_templates(config)?;
    let client = build_client(config)?;
    std::fs::create_dir_all(&config.out)
        .with_context(|| format!("creating output directory {}", config.out.display()))?;

    let sim = config.simulation_config();
    let truth: Option<Vec<StudentRecord>> = match config.mode {
        Mode::Experiment1 => {
            let path = config.records.as_ref().expect("validated by RunConfig");
            Some(
                load_cohort_validated(path, &lecture)
                    .with_context(|| format!("loading records {}", path.display()))?,
            )
        }
        Mode::Experiment2 => None,
    };

    let output = match config.mode {
        Mode::Experiment1 => run_experiment1(
            &lecture,
            truth.as_ref().unwrap(),
            &sim,
            &client,
            &templates,
            config.workers,
        )?,
        Mode::Experiment2 => run_experiment2(
            &lecture,
            config.cohort_size.expect("validated by RunConfig"),
            &sim,
            &client,
            &templates,
            config.workers,
        )?,
    };

    let records = output.to_student_records();
    export_cohort(&records, config.out.join("cohort.jsonl")).context("writing cohort.jsonl")?;

    if config.logs {
        write_logs(&output, &config.out.join("logs"))?;
    }

    match config.mode {
        Mode::Experiment1 => {
            let scores = score_against_truth(&records, truth.as_ref().unwrap(), &lecture)?;
            write_scores_csv(&scores, config.out.join("scores.csv"))
                .context("writing scores.csv")?;
        }
        Mode::Experiment2 => {
            write_analysis(&records, &lecture, config.include_gender, &config.out)?;
        }
    }

    let manifest = RunManifest::new(config, client.identity(), templates.hash(), &output);
    manifest.write(&config.out.join("manifest.json"))?;

    report(&output, config);
    Ok(if output.failures.is_empty() {
        RunStatus::Success
    } else {
        RunStatus::Partial
    })
}

pub(super) fn score_against_truth(
    agents: &[StudentRecord],
    truth: &[StudentRecord],
    lecture: &Lecture,
) -> Result<Vec<(String, ReplayScores)>> {
    let mut scores = Vec::with_capacity(agents.len());
    for agent in agents {
        let reference = truth
            .iter()
            .find(|t| t.student_id == agent.student_id)
            .ok_or_else(|| {
                anyhow::anyhow!("no ground-truth record for student {}", agent.student_id)
            })?;
        let s = replay_scores(agent, reference, lecture)
            .with_context(|| format!("scoring student {}", agent.student_id))?;
        scores.push((agent.student_id.clone(), s));
    }
    Ok(scores)
}

pub(super) fn write_analysis(
    records: &[StudentRecord],
    lecture: &Lecture,
    include_gender: bool,
    out: &std::path::Path,
) -> Result<()> {
    let summaries: Vec<_> = records
        .iter()
        .map(|r| behavior_summary(r, lecture))
        .collect::<Result<_, MetricsError>>()
        .context("summarizing behaviors")?;
    write_summary_csv(&summaries, out.join("summary.csv")).context("writing summary.csv")?;
    match correlation_matrix(records, lecture, include_gender) {
        Ok(matrix) => {
            write_correlation_csv(&matrix, out.join("correlation.csv"))
                .context("writing correlation.csv")?;
        }
        Err(MetricsError::CohortTooSmall(n)) => {
            eprintln!("skipping correlation.csv: cohort of {n} is too small");
        }
        Err(e) => return Err(e).context("computing the correlation matrix"),
    }
    Ok(())
}

fn report(output: &ExperimentOutput, config: &RunConfig) {
    println!(
        "simulated {} agent(s), {} failure(s) -> {}",
        output.agents.len(),
        output.failures.len(),
        config.out.display()
    );
    for failure in &output.failures {
        eprintln!(
            "agent {} failed on slide {}: {}",
            failure.student_id, failure.slide_index, failure.error
        );
    }
}
