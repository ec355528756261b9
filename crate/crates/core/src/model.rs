//! Domain types shared by every module, plus AOI geometry utilities.
//!
//! All types are immutable values after construction and safe to share across
//! worker threads. The geometry operations are pure functions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// AOI identifier, unique and contiguous from 1 within a slide.
pub type AoiId = u32;
/// Question identifier, unique within a lecture.
pub type QuestionId = u32;

/// Validation failures for lecture structures and behavior records.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("slide {slide}: {message}")]
    InvalidSlide { slide: u32, message: String },
    #[error("slide {slide}, AOI {aoi}: {message}")]
    InvalidAoi {
        slide: u32,
        aoi: AoiId,
        message: String,
    },
    #[error("slide {slide}, transcript {transcript}: {message}")]
    InvalidTranscript {
        slide: u32,
        transcript: u32,
        message: String,
    },
    #[error("question {question}: {message}")]
    InvalidQuestion {
        question: QuestionId,
        message: String,
    },
    #[error("behavior record (slide {slide}, transcript {transcript}): {message}")]
    InvalidBehavior {
        slide: u32,
        transcript: u32,
        message: String,
    },
    #[error("lecture: {0}")]
    InvalidLecture(String),
}

/// Axis-aligned bounding box in normalized screen units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    pub fn is_valid(&self) -> bool {
        (0.0..self.x_max).contains(&self.x_min)
            && self.x_max <= 1.0
            && (0.0..self.y_max).contains(&self.y_min)
            && self.y_max <= 1.0
    }

    pub fn contains(&self, point: (f64, f64)) -> bool {
        let (x, y) = point;
        self.x_min <= x && x <= self.x_max && self.y_min <= y && y <= self.y_max
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.x_min + self.x_max) / 2.0,
            (self.y_min + self.y_max) / 2.0,
        )
    }
}

/// A labeled content region on a slide (text block, figure, plot, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aoi {
    pub id: AoiId,
    pub bbox: BBox,
    pub label: String,
}

/// Half-open second range `[start_s, end_s)` within the lecture timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecondRange {
    pub start_s: u64,
    pub end_s: u64,
}

impl SecondRange {
    pub fn new(start_s: u64, end_s: u64) -> Self {
        Self { start_s, end_s }
    }

    pub fn contains(&self, t: u64) -> bool {
        self.start_s <= t && t < self.end_s
    }
}

/// One spoken sentence of the lecture and the AOI the teacher is discussing.
///
/// `window` carries the second range the sentence spans; it is required only
/// when deriving per-transcript states from raw per-second recordings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub index: u32,
    pub text: String,
    pub pace_aoi: AoiId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<SecondRange>,
}

/// Answer label for a four-choice question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChoiceLabel {
    A,
    B,
    C,
    D,
}

impl ChoiceLabel {
    pub const ALL: [ChoiceLabel; 4] = [
        ChoiceLabel::A,
        ChoiceLabel::B,
        ChoiceLabel::C,
        ChoiceLabel::D,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ChoiceLabel::A => "A",
            ChoiceLabel::B => "B",
            ChoiceLabel::C => "C",
            ChoiceLabel::D => "D",
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl std::fmt::Display for ChoiceLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ChoiceLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(ChoiceLabel::A),
            "B" | "b" => Ok(ChoiceLabel::B),
            "C" | "c" => Ok(ChoiceLabel::C),
            "D" | "d" => Ok(ChoiceLabel::D),
            other => Err(format!("not a choice label: {other:?}")),
        }
    }
}

/// A four-choice question attached to a slide.
///
/// `choices` holds the option texts in label order A, B, C, D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Question {
    pub id: QuestionId,
    pub stem: String,
    pub choices: Vec<String>,
    pub correct: ChoiceLabel,
    pub slide_index: u32,
}

impl Question {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.choices.len() != 4 {
            return Err(ModelError::InvalidQuestion {
                question: self.id,
                message: format!("expected exactly 4 choices, got {}", self.choices.len()),
            });
        }
        if self.stem.contains('\n') || self.choices.iter().any(|c| c.contains('\n')) {
            return Err(ModelError::InvalidQuestion {
                question: self.id,
                message: "question text contains a newline".into(),
            });
        }
        Ok(())
    }
}

/// One lecture slide: its AOIs, ordered transcripts, and attached questions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slide {
    pub index: u32,
    pub aois: Vec<Aoi>,
    pub transcripts: Vec<Transcript>,
    #[serde(default)]
    pub questions: Vec<Question>,
}

impl Slide {
    pub fn aoi(&self, id: AoiId) -> Option<&Aoi> {
        self.aois.iter().find(|a| a.id == id)
    }

    pub fn aoi_ids(&self) -> Vec<AoiId> {
        self.aois.iter().map(|a| a.id).collect()
    }

    pub fn transcript_indices(&self) -> Vec<u32> {
        self.transcripts.iter().map(|t| t.index).collect()
    }

    pub fn question_ids(&self) -> Vec<QuestionId> {
        self.questions.iter().map(|q| q.id).collect()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.aois.is_empty() {
            return Err(ModelError::InvalidSlide {
                slide: self.index,
                message: "slide has no AOIs".into(),
            });
        }
        if self.transcripts.is_empty() {
            return Err(ModelError::InvalidSlide {
                slide: self.index,
                message: "slide has no transcripts".into(),
            });
        }
        for (i, aoi) in self.aois.iter().enumerate() {
            if aoi.id != (i + 1) as AoiId {
                return Err(ModelError::InvalidAoi {
                    slide: self.index,
                    aoi: aoi.id,
                    message: format!(
                        "AOI ids must be contiguous from 1; position {} has id {}",
                        i + 1,
                        aoi.id
                    ),
                });
            }
            if !aoi.bbox.is_valid() {
                return Err(ModelError::InvalidAoi {
                    slide: self.index,
                    aoi: aoi.id,
                    message: format!("invalid bbox {:?}", aoi.bbox),
                });
            }
            // Prompt blocks are line-oriented; labels must stay on one line.
            if aoi.label.contains('\n') {
                return Err(ModelError::InvalidAoi {
                    slide: self.index,
                    aoi: aoi.id,
                    message: "AOI label contains a newline".into(),
                });
            }
        }
        for (i, t) in self.transcripts.iter().enumerate() {
            if t.index != (i + 1) as u32 {
                return Err(ModelError::InvalidTranscript {
                    slide: self.index,
                    transcript: t.index,
                    message: format!(
                        "transcript indices must be contiguous from 1; position {} has index {}",
                        i + 1,
                        t.index
                    ),
                });
            }
            if t.text.trim().is_empty() {
                return Err(ModelError::InvalidTranscript {
                    slide: self.index,
                    transcript: t.index,
                    message: "transcript text is empty".into(),
                });
            }
            if t.text.contains('\n') {
                return Err(ModelError::InvalidTranscript {
                    slide: self.index,
                    transcript: t.index,
                    message: "transcript text contains a newline".into(),
                });
            }
            if self.aoi(t.pace_aoi).is_none() {
                return Err(ModelError::InvalidTranscript {
                    slide: self.index,
                    transcript: t.index,
                    message: format!(
                        "pace_aoi {} does not exist on slide {}",
                        t.pace_aoi, self.index
                    ),
                });
            }
            if let Some(w) = t.window {
                if w.end_s <= w.start_s {
                    return Err(ModelError::InvalidTranscript {
                        slide: self.index,
                        transcript: t.index,
                        message: format!("empty second range {}..{}", w.start_s, w.end_s),
                    });
                }
            }
        }
        for q in &self.questions {
            q.validate()?;
            if q.slide_index != self.index {
                return Err(ModelError::InvalidQuestion {
                    question: q.id,
                    message: format!(
                        "question names slide {} but is attached to slide {}",
                        q.slide_index, self.index
                    ),
                });
            }
        }
        Ok(())
    }
}

/// A full lecture: ordered slides with 1-based contiguous indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lecture {
    pub slides: Vec<Slide>,
}

impl Lecture {
    pub fn slide(&self, index: u32) -> Option<&Slide> {
        self.slides.iter().find(|s| s.index == index)
    }

    pub fn question(&self, id: QuestionId) -> Option<&Question> {
        self.slides
            .iter()
            .flat_map(|s| s.questions.iter())
            .find(|q| q.id == id)
    }

    pub fn questions(&self) -> impl Iterator<Item = &Question> {
        self.slides.iter().flat_map(|s| s.questions.iter())
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.slides.is_empty() {
            return Err(ModelError::InvalidLecture("lecture has no slides".into()));
        }
        let mut question_ids = std::collections::HashSet::new();
        for (i, slide) in self.slides.iter().enumerate() {
            if slide.index != (i + 1) as u32 {
                return Err(ModelError::InvalidLecture(format!(
                    "slide indices must be contiguous from 1; position {} has index {}",
                    i + 1,
                    slide.index
                )));
            }
            slide.validate()?;
            for q in &slide.questions {
                if !question_ids.insert(q.id) {
                    return Err(ModelError::InvalidQuestion {
                        question: q.id,
                        message: "duplicate question id".into(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// The six cognitive-state levels, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CognitiveStateVector {
    pub workload: f64,
    pub curiosity: f64,
    pub valid_focus: f64,
    pub course_following: f64,
    pub engagement: f64,
    pub confusion: f64,
}

/// Component names in canonical order, used for labels and reports.
pub const COGNITIVE_STATE_NAMES: [&str; 6] = [
    "workload",
    "curiosity",
    "valid_focus",
    "course_following",
    "engagement",
    "confusion",
];

impl CognitiveStateVector {
    pub fn new(
        workload: f64,
        curiosity: f64,
        valid_focus: f64,
        course_following: f64,
        engagement: f64,
        confusion: f64,
    ) -> Self {
        Self {
            workload,
            curiosity,
            valid_focus,
            course_following,
            engagement,
            confusion,
        }
    }

    pub fn uniform(value: f64) -> Self {
        Self::new(value, value, value, value, value, value)
    }

    pub fn components(&self) -> [f64; 6] {
        [
            self.workload,
            self.curiosity,
            self.valid_focus,
            self.course_following,
            self.engagement,
            self.confusion,
        ]
    }

    pub fn from_components(c: [f64; 6]) -> Self {
        Self::new(c[0], c[1], c[2], c[3], c[4], c[5])
    }

    pub fn clamped(&self) -> Self {
        Self::from_components(self.components().map(|v| v.clamp(0.0, 1.0)))
    }

    pub fn is_valid(&self) -> bool {
        self.components().iter().all(|v| (0.0..=1.0).contains(v))
    }

    /// Component-wise mean of a non-empty list; `None` when empty.
    pub fn mean_of(vectors: &[CognitiveStateVector]) -> Option<Self> {
        if vectors.is_empty() {
            return None;
        }
        let mut sums = [0.0; 6];
        for v in vectors {
            for (s, c) in sums.iter_mut().zip(v.components()) {
                *s += c;
            }
        }
        let n = vectors.len() as f64;
        Some(Self::from_components(sums.map(|s| s / n)))
    }
}

/// One simulated or annotated behavior sample at transcript granularity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorRecord {
    pub slide_index: u32,
    pub transcript_index: u32,
    pub gaze_aoi: Option<AoiId>,
    pub motor_aoi: Option<AoiId>,
    pub cognitive: CognitiveStateVector,
}

impl BehaviorRecord {
    /// Checks AOI references against the owning slide and state ranges.
    pub fn validate(&self, slide: &Slide) -> Result<(), ModelError> {
        let err = |message: String| ModelError::InvalidBehavior {
            slide: self.slide_index,
            transcript: self.transcript_index,
            message,
        };
        if self.slide_index != slide.index {
            return Err(err(format!(
                "record names slide {} but was checked against slide {}",
                self.slide_index, slide.index
            )));
        }
        if slide
            .transcripts
            .iter()
            .all(|t| t.index != self.transcript_index)
        {
            return Err(err(format!(
                "transcript {} does not exist on slide {}",
                self.transcript_index, slide.index
            )));
        }
        for (name, aoi) in [("gaze_aoi", self.gaze_aoi), ("motor_aoi", self.motor_aoi)] {
            if let Some(id) = aoi {
                if slide.aoi(id).is_none() {
                    return Err(err(format!(
                        "{name} {id} does not exist on slide {}",
                        slide.index
                    )));
                }
            }
        }
        if !self.cognitive.is_valid() {
            return Err(err(format!(
                "cognitive components out of [0,1]: {:?}",
                self.cognitive
            )));
        }
        Ok(())
    }
}

/// One answered question with correctness derived against the key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub question_id: QuestionId,
    pub chosen: ChoiceLabel,
    pub is_correct: bool,
}

impl AnswerRecord {
    pub fn new(question: &Question, chosen: ChoiceLabel) -> Self {
        Self {
            question_id: question.id,
            chosen,
            is_correct: chosen == question.correct,
        }
    }

    pub fn validate(&self, question: &Question) -> Result<(), ModelError> {
        if self.is_correct != (self.chosen == question.correct) {
            return Err(ModelError::InvalidQuestion {
                question: self.question_id,
                message: format!(
                    "is_correct={} inconsistent with chosen={} vs correct={}",
                    self.is_correct, self.chosen, question.correct
                ),
            });
        }
        Ok(())
    }
}

/// Maps a normalized point to the id of the AOI containing it.
///
/// When several AOIs contain the point the smallest bbox area wins, then the
/// lowest id. Points outside every AOI map to `None`.
pub fn map_point_to_aoi(point: (f64, f64), slide: &Slide) -> Option<AoiId> {
    slide
        .aois
        .iter()
        .filter(|a| a.bbox.contains(point))
        .min_by(|a, b| {
            a.bbox
                .area()
                .partial_cmp(&b.bbox.area())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.id.cmp(&b.id))
        })
        .map(|a| a.id)
}

/// Euclidean distance between the bbox centers of two AOIs, in normalized units.
pub fn aoi_center_distance(a: &Aoi, b: &Aoi) -> f64 {
    let (ax, ay) = a.bbox.center();
    let (bx, by) = b.bbox.center();
    ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
}
