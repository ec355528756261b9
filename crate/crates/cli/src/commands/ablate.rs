//! The `ablate` command: a fixed six-cell grid over the same inputs and
//! seed — both prompting modes with full memory, then each memory layer
//! removed in turn, and the whole demonstration removed.

use std::io::Write;

use anyhow::{Context, Result};
use studentsim::metrics::SCORE_METRICS;

use super::{cmd_simulate, RunStatus};
use crate::config::{AblateArg, Mode, PriorArg, RunConfig};

struct GridCell {
    name: &'static str,
    prior: PriorArg,
    ablate: AblateArg,
}

const GRID: [GridCell; 6] = [
    GridCell {
        name: "all_priors",
        prior: PriorArg::Cognitive,
        ablate: AblateArg::None,
    },
    GridCell {
        name: "all_standard",
        prior: PriorArg::Standard,
        ablate: AblateArg::None,
    },
    GridCell {
        name: "xm",
        prior: PriorArg::Cognitive,
        ablate: AblateArg::M,
    },
    GridCell {
        name: "xp",
        prior: PriorArg::Cognitive,
        ablate: AblateArg::P,
    },
    GridCell {
        name: "xc",
        prior: PriorArg::Cognitive,
        ablate: AblateArg::C,
    },
    GridCell {
        name: "xd",
        prior: PriorArg::Cognitive,
        ablate: AblateArg::D,
    },
];

pub fn cmd_ablate(base: &RunConfig) -> Result<RunStatus> {
    anyhow::ensure!(
        base.mode == Mode::Experiment1 && base.records.is_some(),
        "config: `ablate` runs the replay experiment and needs `records`"
    );
    std::fs::create_dir_all(&base.out)
        .with_context(|| format!("creating output directory {}", base.out.display()))?;

    let mut status = RunStatus::Success;
    let mut comparison: Vec<(String, String, f64)> = Vec::new();

    for cell in &GRID {
        let mut config = base.clone();
        config.prior = cell.prior;
        config.ablate = cell.ablate;
        config.out = base.out.join(cell.name);
        println!("== cell {} ==", cell.name);
        if cmd_simulate(&config)? == RunStatus::Partial {
            status = RunStatus::Partial;
        }
        for (student, metric, value) in read_scores(&config.out.join("scores.csv"))? {
            let _ = student;
            comparison.push((cell.name.to_string(), metric, value));
        }
    }

    // Mean per (cell, metric) across agents.
    let mut out = std::fs::File::create(base.out.join("comparison.csv"))
        .context("creating comparison.csv")?;
    writeln!(out, "cell,metric,mean_value").context("writing comparison.csv")?;
    for cell in &GRID {
        for metric in SCORE_METRICS {
            let values: Vec<f64> = comparison
                .iter()
                .filter(|(c, m, _)| c == cell.name && m == metric)
                .map(|(_, _, v)| *v)
                .collect();
            if values.is_empty() {
                continue;
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            writeln!(out, "{},{metric},{mean:.6}", cell.name).context("writing comparison.csv")?;
        }
    }

    println!("ablation grid complete -> {}", base.out.display());
    Ok(status)
}

fn read_scores(path: &std::path::Path) -> Result<Vec<(String, String, f64)>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for line in text.lines().skip(1) {
        let mut parts = line.splitn(3, ',');
        let student = parts.next().unwrap_or_default().to_string();
        let metric = parts.next().unwrap_or_default().to_string();
        let value: f64 = parts
            .next()
            .unwrap_or_default()
            .parse()
            .with_context(|| format!("bad score row: {line:?}"))?;
        rows.push((student, metric, value));
    }
    Ok(rows)
}
