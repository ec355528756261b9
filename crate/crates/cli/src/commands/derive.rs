//! The `derive` command: reduce raw per-second recordings to
//! transcript-level student records using the lecture's windows.

use std::path::PathBuf;

use anyhow::{Context, Result};
use studentsim::dataset::{derive_student_record, export_cohort, load_lecture, load_raw_records};

use super::RunStatus;

pub struct DeriveRequest {
    pub lecture: PathBuf,
    pub raw: PathBuf,
    pub out: PathBuf,
}

pub fn cmd_derive(request: &DeriveRequest) -> Result<RunStatus> {
    let lecture = load_lecture(&request.lecture)
        .with_context(|| format!("loading lecture {}", request.lecture.display()))?;
    let raw = load_raw_records(&request.raw)
        .with_context(|| format!("loading raw samples {}", request.raw.display()))?;

    let mut records = Vec::with_capacity(raw.len());
    for r in &raw {
        let record = derive_student_record(r, &lecture)
            .with_context(|| format!("deriving student {}", r.student_id))?;
        record
            .validate(&lecture)
            .with_context(|| format!("validating derived student {}", r.student_id))?;
        records.push(record);
    }

    if let Some(parent) = request.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    export_cohort(&records, &request.out)
        .with_context(|| format!("writing {}", request.out.display()))?;
    println!(
        "derived {} student record(s) -> {}",
        records.len(),
        request.out.display()
    );
    Ok(RunStatus::Success)
}
