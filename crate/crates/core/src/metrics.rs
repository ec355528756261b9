//! Evaluation mathematics: replay-fidelity scores against ground truth,
//! per-student behavior summaries, and Pearson correlation analytics over
//! persona encodings and behavior measures.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::StudentRecord;
use crate::model::{
    aoi_center_distance, AnswerRecord, AoiId, BehaviorRecord, CognitiveStateVector, Lecture,
};
use crate::persona::encode_persona;

/// Distance charged when exactly one side of a gaze/motor pair is off-AOI.
/// Generated agents always emit an AOI, so this only triggers against
/// degraded real data. Matched off-AOI pairs cost nothing.
pub const NONE_DISTANCE_PENALTY: f64 = 0.5;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("streams are misaligned: {0}")]
    Misaligned(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("sequence too short: need at least {need} entries, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("answer records disagree on the question: {agent} vs {truth}")]
    QuestionMismatch { agent: u32, truth: u32 },
    #[error("student {0} has no persona; correlation needs personas")]
    MissingPersona(String),
    #[error("cohort too small: need at least 2 students, got {0}")]
    CohortTooSmall(usize),
    #[error("lecture reference: {0}")]
    BadReference(String),
}

/// Replay-fidelity scores for one agent against its real student.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayScores {
    pub gaze_aoi_distance: f64,
    pub motor_aoi_distance: f64,
    /// Component-wise mean absolute error of the six cognitive states.
    pub cognitive_mae: CognitiveStateVector,
    pub cognitive_mae_overall: f64,
    pub choice_similarity: f64,
    pub accuracy_similarity: f64,
}

/// One slide's summary measures for one student.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlideSummary {
    pub slide_index: u32,
    pub gaze_entropy: f64,
    pub motor_entropy: f64,
    pub gaze_following: f64,
    pub motor_following: f64,
    /// Undefined on single-transcript slides.
    pub gaze_fixing: Option<f64>,
    pub motor_fixing: Option<f64>,
    pub cognitive: CognitiveStateVector,
    /// Mean accuracy over the slide's questions; `None` when it has none.
    pub question_accuracy: Option<f64>,
}

/// Per-slide summaries for one student, plus their per-student means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorSummary {
    pub student_id: String,
    pub per_slide: Vec<SlideSummary>,
}

/// Behavior measure names in canonical column order.
pub const BEHAVIOR_MEASURES: [&str; 13] = [
    "gaze_entropy",
    "motor_entropy",
    "gaze_following",
    "motor_following",
    "gaze_fixing",
    "motor_fixing",
    "workload",
    "curiosity",
    "valid_focus",
    "course_following",
    "engagement",
    "confusion",
    "question_accuracy",
];

impl BehaviorSummary {
    /// Slide-level values averaged per student, in [`BEHAVIOR_MEASURES`]
    /// order. Slides where a measure is undefined are left out of its mean.
    pub fn student_means(&self) -> Vec<Option<f64>> {
        fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
            let collected: Vec<f64> = values.collect();
            if collected.is_empty() {
                None
            } else {
                Some(collected.iter().sum::<f64>() / collected.len() as f64)
            }
        }
        let slides = &self.per_slide;
        let mut means = vec![
            mean(slides.iter().map(|s| s.gaze_entropy)),
            mean(slides.iter().map(|s| s.motor_entropy)),
            mean(slides.iter().map(|s| s.gaze_following)),
            mean(slides.iter().map(|s| s.motor_following)),
            mean(slides.iter().filter_map(|s| s.gaze_fixing)),
            mean(slides.iter().filter_map(|s| s.motor_fixing)),
        ];
        for i in 0..6 {
            means.push(mean(slides.iter().map(|s| s.cognitive.components()[i])));
        }
        means.push(mean(slides.iter().filter_map(|s| s.question_accuracy)));
        means
    }
}

/// Labeled symmetric matrix of Pearson coefficients. `None` marks pairs
/// involving a constant column, where the coefficient is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, row: &str, column: &str) -> Option<f64> {
        let r = self.labels.iter().position(|l| l == row)?;
        let c = self.labels.iter().position(|l| l == column)?;
        self.values[r][c]
    }
}

/// Shannon entropy (bits) of the AOI-id frequency distribution of a
/// sequence. Off-AOI entries are dropped; an empty-after-drop sequence has
/// zero entropy.
pub fn sequence_entropy(sequence: &[Option<AoiId>]) -> f64 {
    let mut counts: BTreeMap<AoiId, usize> = BTreeMap::new();
    let mut total = 0usize;
    for id in sequence.iter().flatten() {
        *counts.entry(*id).or_insert(0) += 1;
        total += 1;
    }
    if total == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &count in counts.values() {
        let p = count as f64 / total as f64;
        h -= p * p.log2();
    }
    h
}

/// Fraction of positions where the sequence matches the teacher's pace AOI.
/// Off-AOI entries never match.
pub fn following_rate(sequence: &[Option<AoiId>], pace: &[AoiId]) -> Result<f64, MetricsError> {
    if sequence.len() != pace.len() {
        return Err(MetricsError::LengthMismatch {
            left: sequence.len(),
            right: pace.len(),
        });
    }
    if sequence.is_empty() {
        return Err(MetricsError::TooShort { need: 1, got: 0 });
    }
    let matches = sequence
        .iter()
        .zip(pace)
        .filter(|(s, p)| **s == Some(**p))
        .count();
    Ok(matches as f64 / sequence.len() as f64)
}

/// Fraction of positions (from the second on) equal to their predecessor.
/// Both sides must be on an AOI to count as fixed.
pub fn fixing_rate(sequence: &[Option<AoiId>]) -> Result<f64, MetricsError> {
    if sequence.len() < 2 {
        return Err(MetricsError::TooShort {
            need: 2,
            got: sequence.len(),
        });
    }
    let fixed = sequence
        .windows(2)
        .filter(|w| w[0].is_some() && w[0] == w[1])
        .count();
    Ok(fixed as f64 / (sequence.len() - 1) as f64)
}

/// Pearson product-moment coefficient; `Ok(None)` when either vector is
/// constant (the coefficient is undefined there, not zero).
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>, MetricsError> {
    if x.len() != y.len() {
        return Err(MetricsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(MetricsError::TooShort {
            need: 2,
            got: x.len(),
        });
    }
    let constant = |v: &[f64]| v.iter().all(|&e| e == v[0]);
    if constant(x) || constant(y) {
        return Ok(None);
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    let denom = (var_x * var_y).sqrt();
    if denom == 0.0 || !denom.is_finite() {
        return Ok(None);
    }
    Ok(Some(cov / denom))
}

fn aligned_pairs<'a>(
    agent: &'a [BehaviorRecord],
    truth: &'a [BehaviorRecord],
) -> Result<Vec<(&'a BehaviorRecord, &'a BehaviorRecord)>, MetricsError> {
    if agent.len() != truth.len() {
        return Err(MetricsError::Misaligned(format!(
            "{} agent records vs {} truth records",
            agent.len(),
            truth.len()
        )));
    }
    let key = |r: &BehaviorRecord| (r.slide_index, r.transcript_index);
    let mut agent_sorted: Vec<&BehaviorRecord> = agent.iter().collect();
    let mut truth_sorted: Vec<&BehaviorRecord> = truth.iter().collect();
    agent_sorted.sort_by_key(|r| key(r));
    truth_sorted.sort_by_key(|r| key(r));
    for (a, t) in agent_sorted.iter().zip(&truth_sorted) {
        if key(a) != key(t) {
            return Err(MetricsError::Misaligned(format!(
                "agent has (slide {}, transcript {}) where truth has (slide {}, transcript {})",
                a.slide_index, a.transcript_index, t.slide_index, t.transcript_index
            )));
        }
    }
    Ok(agent_sorted.into_iter().zip(truth_sorted).collect())
}

fn pair_distance(
    agent: Option<AoiId>,
    truth: Option<AoiId>,
    slide_index: u32,
    lecture: &Lecture,
) -> Result<f64, MetricsError> {
    match (agent, truth) {
        (None, None) => Ok(0.0),
        (Some(_), None) | (None, Some(_)) => Ok(NONE_DISTANCE_PENALTY),
        (Some(a), Some(t)) => {
            let slide = lecture.slide(slide_index).ok_or_else(|| {
                MetricsError::BadReference(format!("slide {slide_index} not in lecture"))
            })?;
            let aoi_a = slide.aoi(a).ok_or_else(|| {
                MetricsError::BadReference(format!("AOI {a} not on slide {slide_index}"))
            })?;
            let aoi_t = slide.aoi(t).ok_or_else(|| {
                MetricsError::BadReference(format!("AOI {t} not on slide {slide_index}"))
            })?;
            Ok(aoi_center_distance(aoi_a, aoi_t))
        }
    }
}

/// Mean normalized AOI-center distance between agent and truth streams, for
/// gaze and motor. Pairs with exactly one off-AOI side cost the fixed
/// penalty.
pub fn gaze_motor_distance(
    agent: &[BehaviorRecord],
    truth: &[BehaviorRecord],
    lecture: &Lecture,
) -> Result<(f64, f64), MetricsError> {
    let pairs = aligned_pairs(agent, truth)?;
    if pairs.is_empty() {
        return Err(MetricsError::TooShort { need: 1, got: 0 });
    }
    let mut gaze_sum = 0.0;
    let mut motor_sum = 0.0;
    for (a, t) in &pairs {
        gaze_sum += pair_distance(a.gaze_aoi, t.gaze_aoi, a.slide_index, lecture)?;
        motor_sum += pair_distance(a.motor_aoi, t.motor_aoi, a.slide_index, lecture)?;
    }
    let n = pairs.len() as f64;
    Ok((gaze_sum / n, motor_sum / n))
}

/// Component-wise mean absolute error between aligned cognitive streams.
pub fn cognitive_mae(
    agent: &[BehaviorRecord],
    truth: &[BehaviorRecord],
) -> Result<CognitiveStateVector, MetricsError> {
    let pairs = aligned_pairs(agent, truth)?;
    if pairs.is_empty() {
        return Err(MetricsError::TooShort { need: 1, got: 0 });
    }
    let mut sums = [0.0; 6];
    for (a, t) in &pairs {
        let ac = a.cognitive.components();
        let tc = t.cognitive.components();
        for i in 0..6 {
            sums[i] += (ac[i] - tc[i]).abs();
        }
    }
    let n = pairs.len() as f64;
    Ok(CognitiveStateVector::from_components(sums.map(|s| s / n)))
}

/// 1 iff both records picked the same label, right or wrong.
pub fn choice_similarity(agent: &AnswerRecord, truth: &AnswerRecord) -> Result<f64, MetricsError> {
    if agent.question_id != truth.question_id {
        return Err(MetricsError::QuestionMismatch {
            agent: agent.question_id,
            truth: truth.question_id,
        });
    }
    Ok((agent.chosen == truth.chosen) as u8 as f64)
}

/// 1 iff both records agree on correctness, regardless of the labels.
pub fn accuracy_similarity(
    agent: &AnswerRecord,
    truth: &AnswerRecord,
) -> Result<f64, MetricsError> {
    if agent.question_id != truth.question_id {
        return Err(MetricsError::QuestionMismatch {
            agent: agent.question_id,
            truth: truth.question_id,
        });
    }
    Ok((agent.is_correct == truth.is_correct) as u8 as f64)
}

/// All replay scores for one agent/truth pair.
pub fn replay_scores(
    agent: &StudentRecord,
    truth: &StudentRecord,
    lecture: &Lecture,
) -> Result<ReplayScores, MetricsError> {
    let (gaze, motor) = gaze_motor_distance(&agent.behaviors, &truth.behaviors, lecture)?;
    let mae = cognitive_mae(&agent.behaviors, &truth.behaviors)?;
    let mae_overall = mae.components().iter().sum::<f64>() / 6.0;

    let mut choice_sum = 0.0;
    let mut accuracy_sum = 0.0;
    let mut n_questions = 0usize;
    for truth_answer in &truth.answers {
        let agent_answer = agent.answer_for(truth_answer.question_id).ok_or_else(|| {
            MetricsError::Misaligned(format!(
                "agent has no answer for question {}",
                truth_answer.question_id
            ))
        })?;
        choice_sum += choice_similarity(agent_answer, truth_answer)?;
        accuracy_sum += accuracy_similarity(agent_answer, truth_answer)?;
        n_questions += 1;
    }
    let (choice, accuracy) = if n_questions == 0 {
        (1.0, 1.0)
    } else {
        (
            choice_sum / n_questions as f64,
            accuracy_sum / n_questions as f64,
        )
    };

    Ok(ReplayScores {
        gaze_aoi_distance: gaze,
        motor_aoi_distance: motor,
        cognitive_mae: mae,
        cognitive_mae_overall: mae_overall,
        choice_similarity: choice,
        accuracy_similarity: accuracy,
    })
}

/// Per-slide behavior summary for one student record.
pub fn behavior_summary(
    record: &StudentRecord,
    lecture: &Lecture,
) -> Result<BehaviorSummary, MetricsError> {
    let mut per_slide = Vec::with_capacity(lecture.slides.len());
    for slide in &lecture.slides {
        let records = record.behaviors_for_slide(slide.index);
        if records.is_empty() {
            continue;
        }
        let gaze: Vec<Option<AoiId>> = records.iter().map(|r| r.gaze_aoi).collect();
        let motor: Vec<Option<AoiId>> = records.iter().map(|r| r.motor_aoi).collect();
        let pace: Vec<AoiId> = slide
            .transcripts
            .iter()
            .filter(|t| records.iter().any(|r| r.transcript_index == t.index))
            .map(|t| t.pace_aoi)
            .collect();
        let cognitive_values: Vec<CognitiveStateVector> =
            records.iter().map(|r| r.cognitive).collect();
        let question_accuracy = {
            let answered: Vec<f64> = slide
                .questions
                .iter()
                .filter_map(|q| record.answer_for(q.id))
                .map(|a| a.is_correct as u8 as f64)
                .collect();
            if answered.is_empty() {
                None
            } else {
                Some(answered.iter().sum::<f64>() / answered.len() as f64)
            }
        };
        per_slide.push(SlideSummary {
            slide_index: slide.index,
            gaze_entropy: sequence_entropy(&gaze),
            motor_entropy: sequence_entropy(&motor),
            gaze_following: following_rate(&gaze, &pace)?,
            motor_following: following_rate(&motor, &pace)?,
            gaze_fixing: fixing_rate(&gaze).ok(),
            motor_fixing: fixing_rate(&motor).ok(),
            cognitive: CognitiveStateVector::mean_of(&cognitive_values).expect("non-empty records"),
            question_accuracy,
        });
    }
    Ok(BehaviorSummary {
        student_id: record.student_id.clone(),
        per_slide,
    })
}

/// Column labels for the correlation matrix: encoded persona items (gender
/// optional), the aggregate persona, then the behavior measures.
fn correlation_labels(include_gender: bool) -> Vec<String> {
    let mut labels = Vec::new();
    for name in [
        "age",
        "gender",
        "major",
        "education",
        "attitude",
        "exam_performance",
        "focus",
        "curiosity",
        "interest",
        "prior_knowledge",
        "compliance",
        "smartness",
        "family",
    ] {
        if name == "gender" && !include_gender {
            continue;
        }
        labels.push(format!("persona_{name}"));
    }
    labels.push("persona_aggregate".into());
    labels.extend(BEHAVIOR_MEASURES.iter().map(|m| m.to_string()));
    labels
}

/// Pearson matrix over encoded personas and per-student behavior means.
/// Students missing a given measure (e.g. no multi-transcript slide) are
/// dropped pairwise for the columns involved.
pub fn correlation_matrix(
    cohort: &[StudentRecord],
    lecture: &Lecture,
    include_gender: bool,
) -> Result<CorrelationMatrix, MetricsError> {
    if cohort.len() < 2 {
        return Err(MetricsError::CohortTooSmall(cohort.len()));
    }
    let labels = correlation_labels(include_gender);
    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(cohort.len()); labels.len()];

    for record in cohort {
        let persona = record
            .persona
            .as_ref()
            .ok_or_else(|| MetricsError::MissingPersona(record.student_id.clone()))?;
        let encoding = encode_persona(persona);
        let mut row: Vec<Option<f64>> = Vec::with_capacity(labels.len());
        for (name, value) in &encoding.items {
            if name == "gender" && !include_gender {
                continue;
            }
            row.push(Some(*value));
        }
        row.push(Some(encoding.aggregate));
        row.extend(behavior_summary(record, lecture)?.student_means());
        debug_assert_eq!(row.len(), labels.len());
        for (column, value) in columns.iter_mut().zip(row) {
            column.push(value);
        }
    }

    let n = labels.len();
    let mut values = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i..n {
            // Pairwise-complete observations for this column pair.
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for (x, y) in columns[i].iter().zip(&columns[j]) {
                if let (Some(x), Some(y)) = (x, y) {
                    xs.push(*x);
                    ys.push(*y);
                }
            }
            let r = if xs.len() < 2 {
                None
            } else if i == j {
                // Unit diagonal unless the column is constant.
                let constant = xs.iter().all(|&v| v == xs[0]);
                (!constant).then_some(1.0)
            } else {
                pearson(&xs, &ys)?
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }

    Ok(CorrelationMatrix { labels, values })
}

/// Metric names for the per-agent scores report, in row order.
pub const SCORE_METRICS: [&str; 11] = [
    "gaze_aoi_distance",
    "motor_aoi_distance",
    "mae_workload",
    "mae_curiosity",
    "mae_valid_focus",
    "mae_course_following",
    "mae_engagement",
    "mae_confusion",
    "mae_overall",
    "choice_similarity",
    "accuracy_similarity",
];

impl ReplayScores {
    /// Values in [`SCORE_METRICS`] order.
    pub fn metric_values(&self) -> [f64; 11] {
        let mae = self.cognitive_mae.components();
        [
            self.gaze_aoi_distance,
            self.motor_aoi_distance,
            mae[0],
            mae[1],
            mae[2],
            mae[3],
            mae[4],
            mae[5],
            self.cognitive_mae_overall,
            self.choice_similarity,
            self.accuracy_similarity,
        ]
    }
}

fn create_file(path: &Path) -> Result<std::fs::File, MetricsError> {
    std::fs::File::create(path)
        .map_err(|e| MetricsError::BadReference(format!("{}: {e}", path.display())))
}

fn fmt_value(v: f64) -> String {
    format!("{v:.6}")
}

/// Quotes a CSV field when it contains a delimiter; ids come from input
/// files and are not otherwise constrained.
fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

/// Writes `scores.csv`: one row per (student, metric).
pub fn write_scores_csv(
    scores: &[(String, ReplayScores)],
    path: impl AsRef<Path>,
) -> Result<(), MetricsError> {
    let mut out = create_file(path.as_ref())?;
    let write = |out: &mut std::fs::File, line: String| {
        out.write_all(line.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| MetricsError::BadReference(e.to_string()))
    };
    write(&mut out, "student_id,metric,value".into())?;
    for (student_id, s) in scores {
        let student_id = csv_field(student_id);
        for (metric, value) in SCORE_METRICS.iter().zip(s.metric_values()) {
            write(
                &mut out,
                format!("{student_id},{metric},{}", fmt_value(value)),
            )?;
        }
    }
    Ok(())
}

/// Writes `summary.csv`: one row per student with the per-student means.
pub fn write_summary_csv(
    summaries: &[BehaviorSummary],
    path: impl AsRef<Path>,
) -> Result<(), MetricsError> {
    let mut out = create_file(path.as_ref())?;
    let mut header = vec!["student_id".to_string()];
    header.extend(BEHAVIOR_MEASURES.iter().map(|m| m.to_string()));
    let mut lines = vec![header.join(",")];
    for summary in summaries {
        let mut row = vec![csv_field(&summary.student_id)];
        for value in summary.student_means() {
            row.push(value.map(fmt_value).unwrap_or_else(|| "NA".into()));
        }
        lines.push(row.join(","));
    }
    out.write_all(lines.join("\n").as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| MetricsError::BadReference(e.to_string()))
}

/// Writes `correlation.csv`: a labeled square matrix, `NA` for undefined
/// entries.
pub fn write_correlation_csv(
    matrix: &CorrelationMatrix,
    path: impl AsRef<Path>,
) -> Result<(), MetricsError> {
    let mut out = create_file(path.as_ref())?;
    let mut lines = Vec::with_capacity(matrix.labels.len() + 1);
    lines.push(format!("label,{}", matrix.labels.join(",")));
    for (label, row) in matrix.labels.iter().zip(&matrix.values) {
        let cells: Vec<String> = row
            .iter()
            .map(|v| v.map(fmt_value).unwrap_or_else(|| "NA".into()))
            .collect();
        lines.push(format!("{label},{}", cells.join(",")));
    }
    out.write_all(lines.join("\n").as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| MetricsError::BadReference(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_matches_hand_values() {
        assert_eq!(sequence_entropy(&[Some(3), Some(3), Some(3), Some(3)]), 0.0);
        assert_eq!(sequence_entropy(&[Some(1), Some(2)]), 1.0);
        assert_eq!(sequence_entropy(&[Some(1), Some(1), Some(2), Some(3)]), 1.5);
        assert_eq!(sequence_entropy(&[None, None]), 0.0);
        assert_eq!(sequence_entropy(&[Some(5), None, Some(5)]), 0.0);
    }

    #[test]
    fn following_rate_examples() {
        let seq = [Some(1), Some(2), Some(3), Some(4)];
        assert_eq!(following_rate(&seq, &[1, 2, 3, 4]).unwrap(), 1.0);
        assert_eq!(following_rate(&seq, &[4, 3, 2, 1]).unwrap(), 0.0);
        assert_eq!(following_rate(&seq, &[1, 2, 4, 3]).unwrap(), 0.5);
        assert_eq!(following_rate(&[None, Some(2)], &[1, 2]).unwrap(), 0.5);
        assert!(following_rate(&seq, &[1, 2]).is_err());
    }

    #[test]
    fn fixing_rate_examples() {
        assert_eq!(fixing_rate(&[Some(5), Some(5), Some(5)]).unwrap(), 1.0);
        assert_eq!(
            fixing_rate(&[Some(1), Some(2), Some(1), Some(2)]).unwrap(),
            0.0
        );
        assert_eq!(fixing_rate(&[Some(1), Some(1), Some(2)]).unwrap(), 0.5);
        assert_eq!(fixing_rate(&[None, None]).unwrap(), 0.0);
        assert!(fixing_rate(&[Some(1)]).is_err());
    }

    #[test]
    fn pearson_matches_hand_values() {
        let x = [1.0, 2.0, 3.0];
        assert!((pearson(&x, &x).unwrap().unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &neg).unwrap().unwrap() + 1.0).abs() < 1e-12);
        let r = pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 7.0])
            .unwrap()
            .unwrap();
        assert!((r - 0.9934).abs() < 1e-3);
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &x).unwrap(), None);
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn distance_uses_centers_and_charges_one_sided_none() {
        use crate::model::{Aoi, BBox, Slide, Transcript};
        let slide = Slide {
            index: 1,
            aois: vec![
                Aoi {
                    id: 1,
                    bbox: BBox::new(0.0, 0.0, 0.5, 0.5),
                    label: "a".into(),
                },
                Aoi {
                    id: 2,
                    bbox: BBox::new(0.5, 0.5, 1.0, 1.0),
                    label: "b".into(),
                },
            ],
            transcripts: (1..=3)
                .map(|i| Transcript {
                    index: i,
                    text: "t".into(),
                    pace_aoi: 1,
                    window: None,
                })
                .collect(),
            questions: vec![],
        };
        let lecture = Lecture {
            slides: vec![slide],
        };
        let record = |t: u32, gaze: Option<AoiId>| BehaviorRecord {
            slide_index: 1,
            transcript_index: t,
            gaze_aoi: gaze,
            motor_aoi: gaze,
            cognitive: CognitiveStateVector::uniform(0.5),
        };

        // Constant stream: agent on AOI 1 (center .25,.25), truth on AOI 2.
        let agent: Vec<BehaviorRecord> = (1..=3).map(|t| record(t, Some(1))).collect();
        let truth: Vec<BehaviorRecord> = (1..=3).map(|t| record(t, Some(2))).collect();
        let (gaze, motor) = gaze_motor_distance(&agent, &truth, &lecture).unwrap();
        assert!((gaze - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((motor - 0.5f64.sqrt()).abs() < 1e-12);

        // One-sided NONE pays the penalty; matched NONE costs nothing.
        let agent = vec![record(1, None), record(2, Some(1)), record(3, None)];
        let truth = vec![record(1, Some(1)), record(2, Some(1)), record(3, None)];
        let (gaze, _) = gaze_motor_distance(&agent, &truth, &lecture).unwrap();
        assert!((gaze - NONE_DISTANCE_PENALTY / 3.0).abs() < 1e-12);

        // Misaligned streams error out.
        let shifted = vec![record(2, Some(1)), record(3, Some(1)), record(1, Some(1))];
        assert!(gaze_motor_distance(&agent, &shifted, &lecture).is_ok());
        let missing = vec![record(1, Some(1)), record(2, Some(1))];
        assert!(gaze_motor_distance(&agent, &missing, &lecture).is_err());
    }

    #[test]
    fn constant_columns_yield_labeled_missing_entries() {
        use crate::dataset::StudentRecord;
        use crate::fixtures::demo_lecture;
        use crate::persona::PersonaProfile;

        let lecture = demo_lecture(2, 5);
        // Two students with identical personas: every persona column is
        // constant, so those coefficients are undefined rather than 0.
        let records: Vec<StudentRecord> = (0..2)
            .map(|i| {
                let behaviors: Vec<BehaviorRecord> = lecture
                    .slides
                    .iter()
                    .flat_map(|s| {
                        s.transcripts.iter().map(move |t| BehaviorRecord {
                            slide_index: s.index,
                            transcript_index: t.index,
                            gaze_aoi: Some(1 + (t.index + i) % 2),
                            motor_aoi: Some(1),
                            cognitive: CognitiveStateVector::uniform(0.25 + 0.5 * i as f64),
                        })
                    })
                    .collect();
                StudentRecord {
                    version: 1,
                    student_id: format!("s{i}"),
                    persona: Some(PersonaProfile::minimum()),
                    behaviors,
                    answers: vec![],
                }
            })
            .collect();
        let matrix = correlation_matrix(&records, &lecture, false).unwrap();
        assert_eq!(matrix.get("persona_age", "workload"), None);
        assert_eq!(matrix.get("persona_age", "persona_age"), None);
        // Non-constant behavior columns still correlate.
        assert_eq!(matrix.get("workload", "workload"), Some(1.0));
    }

    #[test]
    fn similarity_compares_labels_and_correctness() {
        use crate::model::ChoiceLabel;
        let answer = |chosen: ChoiceLabel, correct: ChoiceLabel| AnswerRecord {
            question_id: 9,
            chosen,
            is_correct: chosen == correct,
        };
        // Same wrong label: both similarities hit.
        let a = answer(ChoiceLabel::B, ChoiceLabel::C);
        let t = answer(ChoiceLabel::B, ChoiceLabel::C);
        assert_eq!(choice_similarity(&a, &t).unwrap(), 1.0);
        assert_eq!(accuracy_similarity(&a, &t).unwrap(), 1.0);
        // Different wrong labels: accuracy-similar only.
        let a = answer(ChoiceLabel::A, ChoiceLabel::C);
        let t = answer(ChoiceLabel::B, ChoiceLabel::C);
        assert_eq!(choice_similarity(&a, &t).unwrap(), 0.0);
        assert_eq!(accuracy_similarity(&a, &t).unwrap(), 1.0);
        // Agent right, truth wrong.
        let a = answer(ChoiceLabel::C, ChoiceLabel::C);
        let t = answer(ChoiceLabel::B, ChoiceLabel::C);
        assert_eq!(accuracy_similarity(&a, &t).unwrap(), 0.0);
        // Mismatched questions error out.
        let mut other = answer(ChoiceLabel::A, ChoiceLabel::A);
        other.question_id = 10;
        assert!(choice_similarity(&a, &other).is_err());
    }
}
