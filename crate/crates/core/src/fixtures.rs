//! Seeded builders for demo lectures, synthetic student recordings, and
//! cohorts. Used by the test suites and the CLI's `gen-demo` command so the
//! harness is runnable end to end without shipping any recordings.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{RawAnswer, RawSecondSample, RawStudentRecord, StudentRecord, FORMAT_VERSION};
use crate::model::{
    AnswerRecord, Aoi, BBox, BehaviorRecord, ChoiceLabel, CognitiveStateVector, Lecture, Question,
    SecondRange, Slide, Transcript,
};
use crate::persona::sample_persona;

const AOI_LABELS: [&str; 6] = [
    "title banner",
    "bullet list",
    "figure",
    "equation block",
    "code sample",
    "caption",
];

const TOPICS: [&str; 8] = [
    "loss functions",
    "gradient descent",
    "overfitting",
    "regularization",
    "cross validation",
    "decision boundaries",
    "feature scaling",
    "model evaluation",
];

const SECONDS_PER_TRANSCRIPT: u64 = 8;

/// Builds a small, fully valid lecture: 3-5 AOIs per slide laid out as
/// horizontal bands, 2-4 transcripts per slide with sequential second
/// windows, and one question on every even slide.
pub fn demo_lecture(slide_count: u32, seed: u64) -> Lecture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slides = Vec::with_capacity(slide_count as usize);
    let mut clock_s: u64 = 0;
    let mut next_question_id: u32 = 1;

    for slide_index in 1..=slide_count {
        let aoi_count = rng.gen_range(3..=5u32);
        let aois: Vec<Aoi> = (1..=aoi_count)
            .map(|id| {
                let band = 1.0 / aoi_count as f64;
                let y0 = (id - 1) as f64 * band;
                Aoi {
                    id,
                    bbox: BBox::new(
                        0.05,
                        (y0 + 0.02 * band).min(0.98),
                        0.95,
                        (y0 + 0.95 * band).min(1.0),
                    ),
                    label: AOI_LABELS[(id as usize - 1) % AOI_LABELS.len()].to_string(),
                }
            })
            .collect();

        let topic = TOPICS[(slide_index as usize - 1) % TOPICS.len()];
        let transcript_count = rng.gen_range(2..=4u32);
        let transcripts: Vec<Transcript> = (1..=transcript_count)
            .map(|index| {
                let pace_aoi = rng.gen_range(1..=aoi_count);
                let window = SecondRange::new(clock_s, clock_s + SECONDS_PER_TRANSCRIPT);
                clock_s += SECONDS_PER_TRANSCRIPT;
                Transcript {
                    index,
                    text: format!("Point {index} about {topic} on slide {slide_index}."),
                    pace_aoi,
                    window: Some(window),
                }
            })
            .collect();

        let questions = if slide_index % 2 == 0 {
            let id = next_question_id;
            next_question_id += 1;
            let correct = ChoiceLabel::from_index(rng.gen_range(0..4)).unwrap();
            vec![Question {
                id,
                stem: format!("Which idea did slide {slide_index} emphasize?"),
                choices: vec![
                    format!("A narrow reading of {topic}"),
                    format!("The main point about {topic}"),
                    "An unrelated anecdote".to_string(),
                    "None of the above".to_string(),
                ],
                correct,
                slide_index,
            }]
        } else {
            vec![]
        };

        slides.push(Slide {
            index: slide_index,
            aois,
            transcripts,
            questions,
        });
    }

    let lecture = Lecture { slides };
    lecture
        .validate()
        .expect("demo lecture is valid by construction");
    lecture
}

fn random_states(rng: &mut ChaCha8Rng) -> CognitiveStateVector {
    CognitiveStateVector::new(
        rng.gen_range(0.0..=1.0),
        rng.gen_range(0.0..=1.0),
        rng.gen_range(0.0..=1.0),
        rng.gen_range(0.0..=1.0),
        rng.gen_range(0.0..=1.0),
        rng.gen_range(0.0..=1.0),
    )
}

/// Synthesizes `count` transcript-level student records that fully cover the
/// lecture: gaze mostly follows the pace AOI with occasional wandering and
/// rare off-AOI entries, answers cover every question.
pub fn demo_student_records(lecture: &Lecture, count: usize, seed: u64) -> Vec<StudentRecord> {
    let mut records = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e3779b9));
        let persona = sample_persona(seed ^ i as u64);
        let mut behaviors = Vec::new();
        for slide in &lecture.slides {
            let aoi_count = slide.aois.len() as u32;
            for t in &slide.transcripts {
                let pick = |rng: &mut ChaCha8Rng| -> Option<u32> {
                    let roll: f64 = rng.gen();
                    if roll < 0.65 {
                        Some(t.pace_aoi)
                    } else if roll < 0.95 {
                        Some(rng.gen_range(1..=aoi_count))
                    } else {
                        None
                    }
                };
                behaviors.push(BehaviorRecord {
                    slide_index: slide.index,
                    transcript_index: t.index,
                    gaze_aoi: pick(&mut rng),
                    motor_aoi: pick(&mut rng),
                    cognitive: random_states(&mut rng),
                });
            }
        }
        let answers: Vec<AnswerRecord> = lecture
            .questions()
            .map(|q| {
                let chosen = ChoiceLabel::from_index(rng.gen_range(0..4)).unwrap();
                AnswerRecord::new(q, chosen)
            })
            .collect();
        records.push(StudentRecord {
            version: FORMAT_VERSION,
            student_id: format!("student-{:03}", i + 1),
            persona: Some(persona),
            behaviors,
            answers,
        });
    }
    records
}

fn point_in_bbox(bbox: &BBox, rng: &mut ChaCha8Rng) -> (f64, f64) {
    (
        rng.gen_range(bbox.x_min..=bbox.x_max),
        rng.gen_range(bbox.y_min..=bbox.y_max),
    )
}

/// Synthesizes per-second raw recordings spanning every transcript window of
/// the lecture, suitable for the cognitive-state derivation pipeline.
pub fn demo_raw_records(lecture: &Lecture, count: usize, seed: u64) -> Vec<RawStudentRecord> {
    let mut records = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x6a09e667));
        let persona = sample_persona(seed ^ i as u64);
        let mut samples = Vec::new();
        for slide in &lecture.slides {
            for t in &slide.transcripts {
                let window = t.window.expect("demo lecture carries windows");
                for second in window.start_s..window.end_s {
                    let gaze_point = if rng.gen::<f64>() < 0.9 {
                        let aoi = if rng.gen::<f64>() < 0.7 {
                            slide.aoi(t.pace_aoi).unwrap()
                        } else {
                            &slide.aois[rng.gen_range(0..slide.aois.len())]
                        };
                        Some(point_in_bbox(&aoi.bbox, &mut rng))
                    } else {
                        None
                    };
                    let mouse_point = if rng.gen::<f64>() < 0.8 {
                        let aoi = &slide.aois[rng.gen_range(0..slide.aois.len())];
                        Some(point_in_bbox(&aoi.bbox, &mut rng))
                    } else {
                        None
                    };
                    samples.push(RawSecondSample {
                        timestamp_s: second,
                        gaze_point,
                        mouse_point,
                        face_detected: rng.gen::<f64>() < 0.93,
                        confusion_click: rng.gen::<f64>() < 0.05,
                    });
                }
            }
        }
        let answers: Vec<RawAnswer> = lecture
            .questions()
            .map(|q| RawAnswer {
                question_id: q.id,
                chosen: ChoiceLabel::from_index(rng.gen_range(0..4)).unwrap(),
            })
            .collect();
        records.push(RawStudentRecord {
            version: FORMAT_VERSION,
            student_id: format!("student-{:03}", i + 1),
            persona: Some(persona),
            samples,
            answers,
        });
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::derive_student_record;

    #[test]
    fn demo_lecture_is_valid_and_deterministic() {
        let a = demo_lecture(5, 42);
        let b = demo_lecture(5, 42);
        assert_eq!(a, b);
        assert_eq!(a.slides.len(), 5);
        assert!(a.questions().count() >= 2);
    }

    #[test]
    fn demo_records_cover_the_lecture() {
        let lecture = demo_lecture(4, 7);
        let records = demo_student_records(&lecture, 3, 11);
        for record in &records {
            record.validate(&lecture).unwrap();
            record.covers_lecture(&lecture).unwrap();
        }
    }

    #[test]
    fn demo_raw_records_derive_cleanly() {
        let lecture = demo_lecture(3, 7);
        let raw = demo_raw_records(&lecture, 2, 13);
        for r in &raw {
            let derived = derive_student_record(r, &lecture).unwrap();
            derived.validate(&lecture).unwrap();
            derived.covers_lecture(&lecture).unwrap();
        }
    }
}
