//! Lecture, cohort, and raw-recording file formats, plus derivation of
//! per-transcript cognitive states from raw per-second samples.
//!
//! All three file formats are JSON Lines with a `version` field per record;
//! see `docs/formats.md` at the repository root for the schemas.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    map_point_to_aoi, AnswerRecord, AoiId, BehaviorRecord, ChoiceLabel, CognitiveStateVector,
    Lecture, ModelError, SecondRange, Slide,
};
use crate::persona::PersonaProfile;

/// Current schema version for all three JSONL formats.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: parse error: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: unsupported version {found} (expected {expected})")]
    Version {
        path: String,
        line: usize,
        found: u32,
        expected: u32,
    },
    #[error("validation: {0}")]
    Validation(#[from] ModelError),
    #[error("empty transcript window {0}..{1}: no samples in range")]
    EmptyWindow(u64, u64),
    #[error("student {student}: {message}")]
    InvalidRecord { student: String, message: String },
}

fn io_err(path: &Path, source: std::io::Error) -> DatasetError {
    DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// One second of raw recording: normalized gaze/mouse points when captured,
/// face detection, and the confusion self-report click.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawSecondSample {
    pub timestamp_s: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaze_point: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mouse_point: Option<(f64, f64)>,
    pub face_detected: bool,
    pub confusion_click: bool,
}

impl RawSecondSample {
    pub fn validate(&self) -> Result<(), DatasetError> {
        for (name, p) in [
            ("gaze_point", self.gaze_point),
            ("mouse_point", self.mouse_point),
        ] {
            if let Some((x, y)) = p {
                if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
                    return Err(DatasetError::InvalidRecord {
                        student: String::new(),
                        message: format!(
                            "{name} ({x}, {y}) outside [0,1]^2 at t={}",
                            self.timestamp_s
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Raw answer as recorded: the chosen label only; correctness is derived
/// against the lecture key when building a [`StudentRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawAnswer {
    pub question_id: u32,
    pub chosen: ChoiceLabel,
}

/// One student's full raw recording across the lecture timeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawStudentRecord {
    #[serde(default = "default_version")]
    pub version: u32,
    pub student_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persona: Option<PersonaProfile>,
    pub samples: Vec<RawSecondSample>,
    #[serde(default)]
    pub answers: Vec<RawAnswer>,
}

/// One student (real or virtual): persona when known, behavior records at
/// transcript granularity, and answered questions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudentRecord {
    #[serde(default = "default_version")]
    pub version: u32,
    pub student_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persona: Option<PersonaProfile>,
    pub behaviors: Vec<BehaviorRecord>,
    #[serde(default)]
    pub answers: Vec<AnswerRecord>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

impl StudentRecord {
    /// Behavior records for one slide, ordered by transcript index.
    pub fn behaviors_for_slide(&self, slide_index: u32) -> Vec<&BehaviorRecord> {
        let mut records: Vec<&BehaviorRecord> = self
            .behaviors
            .iter()
            .filter(|b| b.slide_index == slide_index)
            .collect();
        records.sort_by_key(|b| b.transcript_index);
        records
    }

    pub fn answer_for(&self, question_id: u32) -> Option<&AnswerRecord> {
        self.answers.iter().find(|a| a.question_id == question_id)
    }

    /// Validates every behavior and answer against the lecture.
    pub fn validate(&self, lecture: &Lecture) -> Result<(), DatasetError> {
        for b in &self.behaviors {
            let slide =
                lecture
                    .slide(b.slide_index)
                    .ok_or_else(|| DatasetError::InvalidRecord {
                        student: self.student_id.clone(),
                        message: format!(
                            "behavior names slide {} which is not in the lecture",
                            b.slide_index
                        ),
                    })?;
            b.validate(slide)?;
        }
        for a in &self.answers {
            let question =
                lecture
                    .question(a.question_id)
                    .ok_or_else(|| DatasetError::InvalidRecord {
                        student: self.student_id.clone(),
                        message: format!(
                            "answer names question {} which is not in the lecture",
                            a.question_id
                        ),
                    })?;
            a.validate(question)?;
        }
        if let Some(p) = &self.persona {
            p.validate().map_err(|e| DatasetError::InvalidRecord {
                student: self.student_id.clone(),
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// Checks that the record has exactly one behavior per lecture transcript
    /// and one answer per lecture question, as replay ground truth must.
    pub fn covers_lecture(&self, lecture: &Lecture) -> Result<(), DatasetError> {
        for slide in &lecture.slides {
            let present = self.behaviors_for_slide(slide.index);
            let expected = slide.transcript_indices();
            let found: Vec<u32> = present.iter().map(|b| b.transcript_index).collect();
            if found != expected {
                return Err(DatasetError::InvalidRecord {
                    student: self.student_id.clone(),
                    message: format!(
                        "slide {}: expected behaviors for transcripts {:?}, found {:?}",
                        slide.index, expected, found
                    ),
                });
            }
        }
        for q in lecture.questions() {
            if self.answer_for(q.id).is_none() {
                return Err(DatasetError::InvalidRecord {
                    student: self.student_id.clone(),
                    message: format!("missing answer for question {}", q.id),
                });
            }
        }
        Ok(())
    }
}

fn read_jsonl<T: serde::de::DeserializeOwned>(
    path: &Path,
) -> Result<Vec<(usize, T)>, DatasetError> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: T = serde_json::from_str(&line).map_err(|e| DatasetError::Parse {
            path: path.display().to_string(),
            line: line_no,
            message: e.to_string(),
        })?;
        out.push((line_no, value));
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(items: &[T], path: &Path) -> Result<(), DatasetError> {
    let mut file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    for item in items {
        let line = serde_json::to_string(item).map_err(|e| DatasetError::Parse {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        file.write_all(line.as_bytes())
            .map_err(|e| io_err(path, e))?;
        file.write_all(b"\n").map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct SlideLine {
    #[serde(default = "default_version")]
    version: u32,
    #[serde(flatten)]
    slide: Slide,
}

/// Loads and fully validates a lecture from its JSONL file (one slide per line).
pub fn load_lecture(path: impl AsRef<Path>) -> Result<Lecture, DatasetError> {
    let path = path.as_ref();
    let lines: Vec<(usize, SlideLine)> = read_jsonl(path)?;
    let mut slides = Vec::with_capacity(lines.len());
    for (line_no, entry) in lines {
        if entry.version != FORMAT_VERSION {
            return Err(DatasetError::Version {
                path: path.display().to_string(),
                line: line_no,
                found: entry.version,
                expected: FORMAT_VERSION,
            });
        }
        slides.push(entry.slide);
    }
    let lecture = Lecture { slides };
    lecture.validate()?;
    Ok(lecture)
}

/// Writes a lecture as JSONL, one slide per line.
pub fn save_lecture(lecture: &Lecture, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let lines: Vec<SlideLine> = lecture
        .slides
        .iter()
        .map(|s| SlideLine {
            version: FORMAT_VERSION,
            slide: s.clone(),
        })
        .collect();
    write_jsonl(&lines, path.as_ref())
}

/// Loads a cohort file (one [`StudentRecord`] per line) without validation.
pub fn load_cohort(path: impl AsRef<Path>) -> Result<Vec<StudentRecord>, DatasetError> {
    let path = path.as_ref();
    let mut records = Vec::new();
    for (line_no, record) in read_jsonl::<StudentRecord>(path)? {
        if record.version != FORMAT_VERSION {
            return Err(DatasetError::Version {
                path: path.display().to_string(),
                line: line_no,
                found: record.version,
                expected: FORMAT_VERSION,
            });
        }
        records.push(record);
    }
    Ok(records)
}

/// Loads a cohort and validates every record against the lecture, reporting
/// the first offending line on failure.
pub fn load_cohort_validated(
    path: impl AsRef<Path>,
    lecture: &Lecture,
) -> Result<Vec<StudentRecord>, DatasetError> {
    let path = path.as_ref();
    let records = load_cohort(path)?;
    for (i, record) in records.iter().enumerate() {
        record.validate(lecture).map_err(|e| DatasetError::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
    }
    Ok(records)
}

/// Writes a cohort as JSONL, one record per line; round-trips losslessly
/// through [`load_cohort`].
pub fn export_cohort(
    records: &[StudentRecord],
    path: impl AsRef<Path>,
) -> Result<(), DatasetError> {
    write_jsonl(records, path.as_ref())
}

/// Loads a raw-recordings file (one [`RawStudentRecord`] per line).
pub fn load_raw_records(path: impl AsRef<Path>) -> Result<Vec<RawStudentRecord>, DatasetError> {
    let path = path.as_ref();
    let mut records = Vec::new();
    for (line_no, record) in read_jsonl::<RawStudentRecord>(path)? {
        if record.version != FORMAT_VERSION {
            return Err(DatasetError::Version {
                path: path.display().to_string(),
                line: line_no,
                found: record.version,
                expected: FORMAT_VERSION,
            });
        }
        for s in &record.samples {
            s.validate().map_err(|e| DatasetError::Parse {
                path: path.display().to_string(),
                line: line_no,
                message: e.to_string(),
            })?;
        }
        records.push(record);
    }
    Ok(records)
}

/// Writes raw recordings as JSONL, one student per line.
pub fn save_raw_records(
    records: &[RawStudentRecord],
    path: impl AsRef<Path>,
) -> Result<(), DatasetError> {
    write_jsonl(records, path.as_ref())
}

/// Shannon entropy (bits) of a discrete distribution given by counts.
/// Empty and single-outcome distributions have zero entropy.
fn entropy_bits(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts {
        if c == 0 {
            continue;
        }
        let p = c as f64 / total as f64;
        h -= p * p.log2();
    }
    h
}

/// Derives the six cognitive states for one transcript window from raw
/// per-second samples.
///
/// Binary states (valid focus, course following, engagement, confusion) are
/// computed per second and averaged over the window. Workload is the Shannon
/// entropy of the gaze-AOI distribution in the window normalized by
/// `log2(K)` where `K` is the slide's AOI count, so the longest possible
/// wander over all AOIs scores 1. Curiosity is the entropy of consecutive
/// AOI-transition pairs normalized by `log2(K^2)`. Off-AOI seconds are
/// dropped from both entropy distributions, and transition pairs require
/// adjacent timestamps.
pub fn derive_cognitive_states(
    samples: &[RawSecondSample],
    slide: &Slide,
    pace_aoi: AoiId,
    window: SecondRange,
) -> Result<CognitiveStateVector, DatasetError> {
    let in_window: Vec<&RawSecondSample> = samples
        .iter()
        .filter(|s| window.contains(s.timestamp_s))
        .collect();
    if in_window.is_empty() {
        return Err(DatasetError::EmptyWindow(window.start_s, window.end_s));
    }

    let gaze_aois: Vec<Option<AoiId>> = in_window
        .iter()
        .map(|s| s.gaze_point.and_then(|p| map_point_to_aoi(p, slide)))
        .collect();

    let n = in_window.len() as f64;
    let valid_focus = gaze_aois.iter().filter(|a| a.is_some()).count() as f64 / n;
    let course_following = gaze_aois.iter().filter(|a| **a == Some(pace_aoi)).count() as f64 / n;
    let engagement = in_window.iter().filter(|s| s.face_detected).count() as f64 / n;
    let confusion = in_window.iter().filter(|s| s.confusion_click).count() as f64 / n;

    let k = slide.aois.len();

    // Stationary distribution over visited AOI ids.
    let mut stationary = vec![0usize; k + 1];
    for aoi in gaze_aois.iter().flatten() {
        stationary[*aoi as usize] += 1;
    }
    let workload = if k > 1 {
        entropy_bits(&stationary) / (k as f64).log2()
    } else {
        0.0
    };

    // Transition distribution over consecutive-second AOI pairs.
    let mut transitions = std::collections::BTreeMap::new();
    for pair in in_window.windows(2) {
        if pair[1].timestamp_s != pair[0].timestamp_s + 1 {
            continue;
        }
        let from = pair[0].gaze_point.and_then(|p| map_point_to_aoi(p, slide));
        let to = pair[1].gaze_point.and_then(|p| map_point_to_aoi(p, slide));
        if let (Some(from), Some(to)) = (from, to) {
            *transitions.entry((from, to)).or_insert(0usize) += 1;
        }
    }
    let transition_counts: Vec<usize> = transitions.values().copied().collect();
    let curiosity = if k > 1 {
        entropy_bits(&transition_counts) / ((k * k) as f64).log2()
    } else {
        0.0
    };

    Ok(CognitiveStateVector::new(
        workload,
        curiosity,
        valid_focus,
        course_following,
        engagement,
        confusion,
    )
    .clamped())
}

/// Modal AOI over a window of per-second points: the most frequent mapped
/// AOI, ties to the lowest id; `None` when no second lands in any AOI.
fn modal_aoi(points: &[Option<(f64, f64)>], slide: &Slide) -> Option<AoiId> {
    let mut counts: std::collections::BTreeMap<AoiId, usize> = std::collections::BTreeMap::new();
    for aoi in points
        .iter()
        .filter_map(|p| p.and_then(|p| map_point_to_aoi(p, slide)))
    {
        *counts.entry(aoi).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(id, _)| id)
}

/// Reduces one raw recording to transcript-level behaviors and answers.
///
/// Every transcript of the lecture must carry a second-range window. Gaze
/// and motor AOIs at transcript granularity are the modal per-second AOI
/// within the window.
pub fn derive_student_record(
    raw: &RawStudentRecord,
    lecture: &Lecture,
) -> Result<StudentRecord, DatasetError> {
    let mut behaviors = Vec::new();
    for slide in &lecture.slides {
        for transcript in &slide.transcripts {
            let window = transcript
                .window
                .ok_or_else(|| DatasetError::InvalidRecord {
                    student: raw.student_id.clone(),
                    message: format!(
                        "slide {} transcript {} has no second-range window in the lecture file",
                        slide.index, transcript.index
                    ),
                })?;
            let cognitive =
                derive_cognitive_states(&raw.samples, slide, transcript.pace_aoi, window)?;
            let in_window: Vec<&RawSecondSample> = raw
                .samples
                .iter()
                .filter(|s| window.contains(s.timestamp_s))
                .collect();
            let gaze_points: Vec<Option<(f64, f64)>> =
                in_window.iter().map(|s| s.gaze_point).collect();
            let mouse_points: Vec<Option<(f64, f64)>> =
                in_window.iter().map(|s| s.mouse_point).collect();
            behaviors.push(BehaviorRecord {
                slide_index: slide.index,
                transcript_index: transcript.index,
                gaze_aoi: modal_aoi(&gaze_points, slide),
                motor_aoi: modal_aoi(&mouse_points, slide),
                cognitive,
            });
        }
    }
    let mut answers = Vec::new();
    for a in &raw.answers {
        let question =
            lecture
                .question(a.question_id)
                .ok_or_else(|| DatasetError::InvalidRecord {
                    student: raw.student_id.clone(),
                    message: format!(
                        "answer names question {} which is not in the lecture",
                        a.question_id
                    ),
                })?;
        answers.push(AnswerRecord::new(question, a.chosen));
    }
    Ok(StudentRecord {
        version: FORMAT_VERSION,
        student_id: raw.student_id.clone(),
        persona: raw.persona,
        behaviors,
        answers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Aoi, BBox, Transcript};

    fn four_aoi_slide() -> Slide {
        // Quadrant layout: AOI 1 top-left, 2 top-right, 3 bottom-left, 4 bottom-right.
        let quads = [
            (0.0, 0.0, 0.5, 0.5),
            (0.5, 0.0, 1.0, 0.5),
            (0.0, 0.5, 0.5, 1.0),
            (0.5, 0.5, 1.0, 1.0),
        ];
        Slide {
            index: 1,
            aois: quads
                .iter()
                .enumerate()
                .map(|(i, q)| Aoi {
                    id: (i + 1) as u32,
                    bbox: BBox::new(q.0, q.1, q.2, q.3),
                    label: format!("quadrant {}", i + 1),
                })
                .collect(),
            transcripts: vec![Transcript {
                index: 1,
                text: "hello".into(),
                pace_aoi: 1,
                window: Some(SecondRange::new(0, 10)),
            }],
            questions: vec![],
        }
    }

    fn sample_at(t: u64, gaze: Option<(f64, f64)>) -> RawSecondSample {
        RawSecondSample {
            timestamp_s: t,
            gaze_point: gaze,
            mouse_point: None,
            face_detected: true,
            confusion_click: false,
        }
    }

    #[test]
    fn degenerate_window_is_all_or_nothing() {
        let slide = four_aoi_slide();
        // Gaze pinned to AOI 1 (the pace AOI), face always on, no clicks.
        let samples: Vec<RawSecondSample> =
            (0..10).map(|t| sample_at(t, Some((0.25, 0.25)))).collect();
        let states = derive_cognitive_states(&samples, &slide, 1, SecondRange::new(0, 10)).unwrap();
        assert_eq!(states.workload, 0.0);
        assert_eq!(states.curiosity, 0.0);
        assert_eq!(states.valid_focus, 1.0);
        assert_eq!(states.course_following, 1.0);
        assert_eq!(states.engagement, 1.0);
        assert_eq!(states.confusion, 0.0);
    }

    #[test]
    fn alternating_gaze_over_two_of_four_aois_halves_workload() {
        let slide = four_aoi_slide();
        let samples: Vec<RawSecondSample> = (0..10)
            .map(|t| {
                let p = if t % 2 == 0 {
                    (0.25, 0.25)
                } else {
                    (0.75, 0.25)
                };
                sample_at(t, Some(p))
            })
            .collect();
        let states = derive_cognitive_states(&samples, &slide, 1, SecondRange::new(0, 10)).unwrap();
        // One bit of stationary entropy over log2(4) = 2 bits.
        assert!((states.workload - 0.5).abs() < 1e-12);
    }

    #[test]
    fn missing_face_seconds_reduce_engagement() {
        let slide = four_aoi_slide();
        let samples: Vec<RawSecondSample> = (0..10)
            .map(|t| {
                let mut s = sample_at(t, Some((0.25, 0.25)));
                s.face_detected = t >= 3;
                s
            })
            .collect();
        let states = derive_cognitive_states(&samples, &slide, 1, SecondRange::new(0, 10)).unwrap();
        assert!((states.engagement - 0.7).abs() < 1e-12);
    }

    #[test]
    fn uniform_gaze_over_all_aois_saturates_workload() {
        let slide = four_aoi_slide();
        let centers = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)];
        let samples: Vec<RawSecondSample> = (0..8)
            .map(|t| sample_at(t, Some(centers[(t % 4) as usize])))
            .collect();
        let states = derive_cognitive_states(&samples, &slide, 1, SecondRange::new(0, 8)).unwrap();
        assert!((states.workload - 1.0).abs() < 1e-12);
    }

    #[test]
    fn off_aoi_gaze_drops_out_of_entropy_but_counts_against_focus() {
        let mut slide = four_aoi_slide();
        // Shrink AOIs so (0.99, 0.01)-style corners stay inside but we can
        // craft a clearly off-AOI point at the exact center seam.
        slide.aois[0].bbox = BBox::new(0.0, 0.0, 0.4, 0.4);
        slide.aois[1].bbox = BBox::new(0.6, 0.0, 1.0, 0.4);
        slide.aois[2].bbox = BBox::new(0.0, 0.6, 0.4, 1.0);
        slide.aois[3].bbox = BBox::new(0.6, 0.6, 1.0, 1.0);
        let samples = vec![
            sample_at(0, Some((0.2, 0.2))),
            sample_at(1, Some((0.5, 0.5))), // off every AOI
            sample_at(2, Some((0.2, 0.2))),
            sample_at(3, None), // no gaze captured
        ];
        let states = derive_cognitive_states(&samples, &slide, 1, SecondRange::new(0, 4)).unwrap();
        assert!((states.valid_focus - 0.5).abs() < 1e-12);
        assert_eq!(states.workload, 0.0); // only AOI 1 ever visited
    }

    #[test]
    fn empty_window_is_an_error() {
        let slide = four_aoi_slide();
        let samples = vec![sample_at(0, None)];
        let err = derive_cognitive_states(&samples, &slide, 1, SecondRange::new(5, 9)).unwrap_err();
        assert!(matches!(err, DatasetError::EmptyWindow(5, 9)));
    }

    #[test]
    fn modal_aoi_prefers_most_frequent_then_lowest_id() {
        let slide = four_aoi_slide();
        let points = vec![
            Some((0.25, 0.25)), // AOI 1
            Some((0.75, 0.25)), // AOI 2
            Some((0.75, 0.25)), // AOI 2
        ];
        assert_eq!(modal_aoi(&points, &slide), Some(2));
        let tied = vec![Some((0.25, 0.25)), Some((0.75, 0.25))];
        assert_eq!(modal_aoi(&tied, &slide), Some(1));
        assert_eq!(modal_aoi(&[None, None], &slide), None);
    }
}
