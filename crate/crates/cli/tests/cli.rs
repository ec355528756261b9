//! End-to-end tests driving the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use studentsim::dataset::{export_cohort, save_lecture};
use studentsim::engine::agent_seed;
use studentsim::fixtures::{demo_lecture, demo_student_records};
use studentsim::persona::{render_persona_text, sample_persona};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_studentsim")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn demo_inputs(dir: &Path, slides: u32, students: usize, seed: u64) -> (PathBuf, PathBuf) {
    let lecture = demo_lecture(slides, seed);
    let lecture_path = dir.join("lecture.jsonl");
    save_lecture(&lecture, &lecture_path).unwrap();
    let records = demo_student_records(&lecture, students, seed);
    let records_path = dir.join("students.jsonl");
    export_cohort(&records, &records_path).unwrap();
    (lecture_path, records_path)
}

#[test]
fn gen_demo_then_validate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "gen-demo",
            "--out",
            "data",
            "--slides",
            "3",
            "--students",
            "2",
            "--seed",
            "5",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = run_in(
        dir.path(),
        &[
            "validate",
            "--lecture",
            "data/lecture.jsonl",
            "--cohort",
            "data/students.jsonl",
            "--raw",
            "data/raw_samples.jsonl",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn derive_converts_raw_recordings_to_valid_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["gen-demo", "--out", "data", "--slides", "3", "--students", "2", "--seed", "8"],
    );
    assert!(out.status.success());
    let out = run_in(
        dir.path(),
        &[
            "derive", "--lecture", "data/lecture.jsonl",
            "--raw", "data/raw_samples.jsonl", "--out", "derived.jsonl",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run_in(
        dir.path(),
        &["validate", "--lecture", "data/lecture.jsonl", "--cohort", "derived.jsonl"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // The derived cohort is usable as replay ground truth.
    let out = run_in(
        dir.path(),
        &[
            "simulate", "--lecture", "data/lecture.jsonl", "--mode", "experiment1",
            "--records", "derived.jsonl", "--seed", "2", "--out", "replayed",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("replayed/scores.csv").exists());
}

#[test]
fn identical_seeds_produce_identical_trees() {
    let dir = tempfile::tempdir().unwrap();
    let (lecture, _) = demo_inputs(dir.path(), 3, 0, 2);
    let lecture = lecture.to_str().unwrap().to_string();
    for out_dir in ["a", "b"] {
        let out = run_in(
            dir.path(),
            &[
                "simulate",
                "--lecture",
                &lecture,
                "--mode",
                "experiment2",
                "--cohort-size",
                "3",
                "--seed",
                "7",
                "--out",
                out_dir,
            ],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for file in [
        "cohort.jsonl",
        "correlation.csv",
        "summary.csv",
        "logs/agent-0000.jsonl",
    ] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn manifest_reexecutes_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let (lecture, _) = demo_inputs(dir.path(), 3, 0, 2);
    let lecture = lecture.to_str().unwrap().to_string();
    let out = run_in(
        dir.path(),
        &[
            "simulate",
            "--lecture",
            &lecture,
            "--mode",
            "experiment2",
            "--cohort-size",
            "4",
            "--seed",
            "11",
            "--out",
            "first",
        ],
    );
    assert!(out.status.success());
    // Re-execute from the manifest alone, redirecting the output directory.
    let out = run_in(
        dir.path(),
        &[
            "simulate",
            "--config",
            "first/manifest.json",
            "--out",
            "second",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let a = std::fs::read(dir.path().join("first/cohort.jsonl")).unwrap();
    let b = std::fs::read(dir.path().join("second/cohort.jsonl")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn missing_records_is_a_fatal_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (lecture, _) = demo_inputs(dir.path(), 2, 0, 2);
    let out = run_in(
        dir.path(),
        &[
            "simulate",
            "--lecture",
            lecture.to_str().unwrap(),
            "--mode",
            "experiment1",
            "--out",
            "x",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("records"));
}

#[test]
fn single_agent_fault_yields_partial_exit_with_other_outputs_intact() {
    let dir = tempfile::tempdir().unwrap();
    let (lecture, _) = demo_inputs(dir.path(), 2, 0, 2);
    // Target exactly agent index 1 of seed 3 by its full rendered persona.
    let seed = 3u64;
    let victim = render_persona_text(&sample_persona(agent_seed(seed, 1)));
    for i in [0usize, 2] {
        assert_ne!(
            render_persona_text(&sample_persona(agent_seed(seed, i))),
            victim,
            "victim persona must be unique in this cohort"
        );
    }
    let config = serde_json::json!({
        "lecture": lecture,
        "mode": "experiment2",
        "cohort_size": 3,
        "seed": seed,
        "out": "faulted",
        "provider": {
            "kind": "mock",
            "mock_policy": { "faults": { "fail_if_prompt_contains": victim } }
        }
    });
    std::fs::write(dir.path().join("config.json"), config.to_string()).unwrap();
    let out = run_in(dir.path(), &["simulate", "--config", "config.json"]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let cohort = std::fs::read_to_string(dir.path().join("faulted/cohort.jsonl")).unwrap();
    assert_eq!(cohort.lines().count(), 2);
    assert!(!cohort.contains("virtual-0002"));
    let manifest = std::fs::read_to_string(dir.path().join("faulted/manifest.json")).unwrap();
    assert!(manifest.contains("virtual-0002"));
}

#[test]
fn analyze_names_the_first_malformed_line() {
    let dir = tempfile::tempdir().unwrap();
    let (lecture, records) = demo_inputs(dir.path(), 2, 3, 9);
    let mut content = std::fs::read_to_string(&records).unwrap();
    content.push_str("{\"version\":1,\"student_id\":\"broken\"\n");
    std::fs::write(&records, content).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "analyze",
            "--lecture",
            lecture.to_str().unwrap(),
            "--cohort",
            records.to_str().unwrap(),
            "--out",
            "an",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":4:"));
}

#[test]
fn no_logs_flag_disables_the_log_tree() {
    let dir = tempfile::tempdir().unwrap();
    let (lecture, _) = demo_inputs(dir.path(), 2, 0, 2);
    let out = run_in(
        dir.path(),
        &[
            "simulate",
            "--lecture",
            lecture.to_str().unwrap(),
            "--mode",
            "experiment2",
            "--cohort-size",
            "2",
            "--seed",
            "1",
            "--out",
            "quiet",
            "--no-logs",
        ],
    );
    assert!(out.status.success());
    assert!(!dir.path().join("quiet/logs").exists());
}

#[test]
fn no_network_blocks_remote_providers() {
    let dir = tempfile::tempdir().unwrap();
    let (lecture, _) = demo_inputs(dir.path(), 2, 0, 2);
    let out = Command::new(bin())
        .current_dir(dir.path())
        .env("NO_NETWORK", "1")
        .env("OPENAI_API_KEY", "irrelevant")
        .args([
            "simulate",
            "--lecture",
            lecture.to_str().unwrap(),
            "--mode",
            "experiment2",
            "--cohort-size",
            "1",
            "--seed",
            "1",
            "--out",
            "x",
            "--provider",
            "remote",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NO_NETWORK"));
}
