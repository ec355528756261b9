//! The `analyze` command: replay scores when ground truth is given,
//! behavior summaries plus the correlation matrix otherwise.

use std::path::PathBuf;

use anyhow::{Context, Result};
use studentsim::dataset::{load_cohort_validated, load_lecture};
use studentsim::metrics::write_scores_csv;

use super::simulate::{score_against_truth, write_analysis};
use super::RunStatus;

pub struct AnalyzeRequest {
    pub lecture: PathBuf,
    pub cohort: PathBuf,
    pub truth: Option<PathBuf>,
    pub out: PathBuf,
    pub include_gender: bool,
}

pub fn cmd_analyze(request: &AnalyzeRequest) -> Result<RunStatus> {
    let lecture = load_lecture(&request.lecture)
        .with_context(|| format!("loading lecture {}", request.lecture.display()))?;
    let cohort = load_cohort_validated(&request.cohort, &lecture)
        .with_context(|| format!("loading cohort {}", request.cohort.display()))?;
    std::fs::create_dir_all(&request.out)
        .with_context(|| format!("creating output directory {}", request.out.display()))?;

    match &request.truth {
        Some(truth_path) => {
            let truth = load_cohort_validated(truth_path, &lecture)
                .with_context(|| format!("loading truth {}", truth_path.display()))?;
            let scores = score_against_truth(&cohort, &truth, &lecture)?;
            write_scores_csv(&scores, request.out.join("scores.csv"))
                .context("writing scores.csv")?;
            println!(
                "scored {} agent(s) against ground truth -> {}",
                scores.len(),
                request.out.display()
            );
        }
        None => {
            write_analysis(&cohort, &lecture, request.include_gender, &request.out)?;
            println!(
                "summarized {} student(s) -> {}",
                cohort.len(),
                request.out.display()
            );
        }
    }
    Ok(RunStatus::Success)
}
