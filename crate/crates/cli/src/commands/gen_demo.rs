//! The `gen-demo` command: writes a seeded demo lecture plus synthetic
//! real-student files, so every other command can be tried immediately.

use std::path::PathBuf;

use anyhow::{Context, Result};
use studentsim::dataset::{export_cohort, save_lecture, save_raw_records};
use studentsim::fixtures::{demo_lecture, demo_raw_records, demo_student_records};

use super::RunStatus;

pub struct GenDemoRequest {
    pub out: PathBuf,
    pub slides: u32,
    pub students: usize,
    pub seed: u64,
}

pub fn cmd_gen_demo(request: &GenDemoRequest) -> Result<RunStatus> {
    anyhow::ensure!(request.slides >= 1, "config: `slides` must be at least 1");
    std::fs::create_dir_all(&request.out)
        .with_context(|| format!("creating output directory {}", request.out.display()))?;

    let lecture = demo_lecture(request.slides, request.seed);
    save_lecture(&lecture, request.out.join("lecture.jsonl")).context("writing lecture.jsonl")?;

    let students = demo_student_records(&lecture, request.students, request.seed);
    export_cohort(&students, request.out.join("students.jsonl"))
        .context("writing students.jsonl")?;

    let raw = demo_raw_records(&lecture, request.students, request.seed);
    save_raw_records(&raw, request.out.join("raw_samples.jsonl"))
        .context("writing raw_samples.jsonl")?;

    println!(
        "wrote demo lecture ({} slides) and {} synthetic student(s) -> {}",
        request.slides,
        request.students,
        request.out.display()
    );
    Ok(RunStatus::Success)
}
