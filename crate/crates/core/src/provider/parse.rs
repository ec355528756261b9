//! Structured-output parsing: pulls the first JSON object out of a chat
//! reply (models often wrap JSON in prose) and validates it against the
//! step's expected action schema.

use serde_json::Value;

use crate::model::{AoiId, ChoiceLabel, CognitiveStateVector, COGNITIVE_STATE_NAMES};

/// What a step's reply must contain: one entry per transcript, one answer
/// per attached question, with AOI ids drawn from the slide.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSchema {
    pub transcript_indices: Vec<u32>,
    pub valid_aoi_ids: Vec<AoiId>,
    pub question_ids: Vec<u32>,
}

/// Parse failure carrying the first violation; a value, not a panic.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseFailure {
    pub message: String,
}

impl ParseFailure {
    fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

/// Validated per-transcript action.
#[derive(Debug, Clone, PartialEq)]
pub struct TranscriptAction {
    pub transcript_index: u32,
    pub gaze_aoi: AoiId,
    pub motor_aoi: AoiId,
    pub cognitive: CognitiveStateVector,
}

/// Validated per-question answer.
#[derive(Debug, Clone, PartialEq)]
pub struct AnswerAction {
    pub question_id: u32,
    pub choice: ChoiceLabel,
}

/// The full decoded step action.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedAction {
    pub reasoning: String,
    pub transcripts: Vec<TranscriptAction>,
    pub answers: Vec<AnswerAction>,
}

/// Scans for the first balanced `{...}` region that parses as a JSON object,
/// honoring string literals and escapes.
fn extract_first_object(text: &str) -> Option<Value> {
    let bytes = text.as_bytes();
    let mut start = 0;
    while let Some(open) = text[start..].find('{').map(|i| i + start) {
        let mut depth = 0usize;
        let mut in_string = false;
        let mut escaped = false;
        let mut end = None;
        for (i, &b) in bytes.iter().enumerate().skip(open) {
            if in_string {
                if escaped {
                    escaped = false;
                } else if b == b'\\' {
                    escaped = true;
                } else if b == b'"' {
                    in_string = false;
                }
                continue;
            }
            match b {
                b'"' => in_string = true,
                b'{' => depth += 1,
                b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        end = Some(i);
                        break;
                    }
                }
                _ => {}
            }
        }
        // Unbalanced from here on means no later '{' can close either.
        let end = end?;
        if let Ok(value) = serde_json::from_str::<Value>(&text[open..=end]) {
            if value.is_object() {
                return Some(value);
            }
        }
        start = open + 1;
    }
    None
}

fn require_u32(value: &Value, field: &str, context: &str) -> Result<u32, ParseFailure> {
    value
        .get(field)
        .and_then(Value::as_u64)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| {
            ParseFailure::new(format!(
                "{context}: field {field:?} must be a small integer"
            ))
        })
}

fn require_unit_float(value: &Value, field: &str, context: &str) -> Result<f64, ParseFailure> {
    let v = value
        .get(field)
        .and_then(Value::as_f64)
        .ok_or_else(|| ParseFailure::new(format!("{context}: field {field:?} must be a number")))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(ParseFailure::new(format!(
            "{context}: {field} out of range [0,1]: {v}"
        )));
    }
    Ok(v)
}

/// Extracts and validates the step action from a raw model reply.
pub fn parse_structured(
    response: &str,
    schema: &ActionSchema,
) -> Result<ParsedAction, ParseFailure> {
    let root = extract_first_object(response)
        .ok_or_else(|| ParseFailure::new("reply contains no JSON object"))?;

    let reasoning = root
        .get("reasoning")
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();

    let raw_transcripts = root
        .get("transcripts")
        .and_then(Value::as_array)
        .ok_or_else(|| ParseFailure::new("missing \"transcripts\" array"))?;

    let mut transcripts = Vec::with_capacity(raw_transcripts.len());
    for entry in raw_transcripts {
        let index = require_u32(entry, "transcript_index", "transcript entry")?;
        let context = format!("transcript {index}");
        let mut aois = [0u32; 2];
        for (slot, field) in aois.iter_mut().zip(["gaze_aoi", "motor_aoi"]) {
            let id = require_u32(entry, field, &context)?;
            if !schema.valid_aoi_ids.contains(&id) {
                return Err(ParseFailure::new(format!(
                    "{context}: {field} {id} is not an AOI on this slide"
                )));
            }
            *slot = id;
        }
        let mut components = [0.0; 6];
        for (slot, name) in components.iter_mut().zip(COGNITIVE_STATE_NAMES) {
            *slot = require_unit_float(entry, name, &context)?;
        }
        transcripts.push(TranscriptAction {
            transcript_index: index,
            gaze_aoi: aois[0],
            motor_aoi: aois[1],
            cognitive: CognitiveStateVector::from_components(components),
        });
    }

    let found: Vec<u32> = transcripts.iter().map(|t| t.transcript_index).collect();
    if found != schema.transcript_indices {
        return Err(ParseFailure::new(format!(
            "expected one entry per transcript {:?} in order, found {:?}",
            schema.transcript_indices, found
        )));
    }

    let mut answers = Vec::new();
    if !schema.question_ids.is_empty() || root.get("answers").is_some() {
        let raw_answers = root
            .get("answers")
            .and_then(Value::as_array)
            .ok_or_else(|| ParseFailure::new("missing \"answers\" array"))?;
        for entry in raw_answers {
            let question_id = require_u32(entry, "question_id", "answer entry")?;
            let context = format!("answer for question {question_id}");
            let choice = entry.get("choice").and_then(Value::as_str).ok_or_else(|| {
                ParseFailure::new(format!("{context}: field \"choice\" must be a string"))
            })?;
            let choice: ChoiceLabel = choice.parse().map_err(|_| {
                ParseFailure::new(format!(
                    "{context}: choice must be one of A/B/C/D, got {choice:?}"
                ))
            })?;
            answers.push(AnswerAction {
                question_id,
                choice,
            });
        }
        let found: Vec<u32> = answers.iter().map(|a| a.question_id).collect();
        if found != schema.question_ids {
            return Err(ParseFailure::new(format!(
                "expected one answer per question {:?} in order, found {:?}",
                schema.question_ids, found
            )));
        }
    }

    Ok(ParsedAction {
        reasoning,
        transcripts,
        answers,
    })
}
