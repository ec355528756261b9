//! The `validate` command: exit 0 iff every invariant of the given files
//! holds.

use std::path::PathBuf;

use anyhow::{Context, Result};
use studentsim::dataset::{load_cohort_validated, load_lecture, load_raw_records};

use super::RunStatus;

pub struct ValidateRequest {
    pub lecture: PathBuf,
    pub cohort: Option<PathBuf>,
    pub raw: Option<PathBuf>,
}

pub fn cmd_validate(request: &ValidateRequest) -> Result<RunStatus> {
    let lecture = load_lecture(&request.lecture)
        .with_context(|| format!("lecture {}", request.lecture.display()))?;
    println!(
        "lecture ok: {} slide(s), {} question(s)",
        lecture.slides.len(),
        lecture.questions().count()
    );

    if let Some(path) = &request.cohort {
        let cohort = load_cohort_validated(path, &lecture)
            .with_context(|| format!("cohort {}", path.display()))?;
        println!("cohort ok: {} record(s)", cohort.len());
    }

    if let Some(path) = &request.raw {
        let raw =
            load_raw_records(path).with_context(|| format!("raw samples {}", path.display()))?;
        println!("raw samples ok: {} student(s)", raw.len());
    }

    Ok(RunStatus::Success)
}
