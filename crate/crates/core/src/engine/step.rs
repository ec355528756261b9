//! One simulation step: prompt, call, decode, and the fallback action.

use crate::model::{AnswerRecord, BehaviorRecord, ChoiceLabel, CognitiveStateVector, Slide};
use crate::provider::{parse_structured, ActionSchema, ChatClient, ChatRequest, ParsedAction};

use super::memory::MemoryStore;
use super::prompt::{build_prompt, PromptTemplates};
use super::{EngineError, SimulationConfig};

/// Extra provider round-trips allowed when a reply cannot be decoded.
const MAX_CORRECTION_ROUNDS: u32 = 2;

/// Everything one slide step produced, including the exact prompt and the
/// verbatim final reply for logging.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub slide_index: u32,
    pub behaviors: Vec<BehaviorRecord>,
    pub answers: Vec<AnswerRecord>,
    pub reflection_text: String,
    pub raw_response: String,
    pub prompt_system: String,
    pub prompt_user: String,
    /// Provider round-trips used by this step (1 + correction rounds).
    pub attempts: u32,
    /// True when the step exhausted its correction rounds and emitted the
    /// deterministic fallback action instead of model output.
    pub fallback: bool,
    pub request_chars: usize,
    pub response_chars: usize,
}

fn assemble(slide: &Slide, action: ParsedAction, base: StepOutput) -> StepOutput {
    let behaviors = action
        .transcripts
        .iter()
        .map(|t| BehaviorRecord {
            slide_index: slide.index,
            transcript_index: t.transcript_index,
            gaze_aoi: Some(t.gaze_aoi),
            motor_aoi: Some(t.motor_aoi),
            cognitive: t.cognitive,
        })
        .collect();
    let answers = slide
        .questions
        .iter()
        .map(|q| {
            let choice = action
                .answers
                .iter()
                .find(|a| a.question_id == q.id)
                .map(|a| a.choice)
                .unwrap_or(ChoiceLabel::A);
            AnswerRecord::new(q, choice)
        })
        .collect();
    StepOutput {
        behaviors,
        answers,
        reflection_text: action.reasoning,
        ..base
    }
}

fn fallback_output(slide: &Slide, memory: &MemoryStore, base: StepOutput) -> StepOutput {
    // Stay on the teacher's pace and carry the remembered cognitive level
    // forward; 0.5 across the board when there is no memory yet.
    let cognitive = memory
        .mean_cognitive()
        .unwrap_or_else(|| CognitiveStateVector::uniform(0.5));
    let behaviors = slide
        .transcripts
        .iter()
        .map(|t| BehaviorRecord {
            slide_index: slide.index,
            transcript_index: t.index,
            gaze_aoi: Some(t.pace_aoi),
            motor_aoi: Some(t.pace_aoi),
            cognitive,
        })
        .collect();
    let answers = slide
        .questions
        .iter()
        .map(|q| AnswerRecord::new(q, ChoiceLabel::A))
        .collect();
    StepOutput {
        behaviors,
        answers,
        reflection_text: String::new(),
        fallback: true,
        ..base
    }
}

/// Runs one slide step: builds the prompt, calls the provider, decodes the
/// reply. Undecodable replies trigger a correction re-prompt up to
/// [`MAX_CORRECTION_ROUNDS`] times; after that the fallback action is
/// emitted. Provider exhaustion surfaces as an error carrying the attempt
/// count so far.
pub fn run_slide_step(
    memory: &MemoryStore,
    slide: &Slide,
    slide_count: usize,
    config: &SimulationConfig,
    client: &ChatClient,
    templates: &PromptTemplates,
) -> Result<StepOutput, EngineError> {
    let schema = ActionSchema {
        transcript_indices: slide.transcript_indices(),
        valid_aoi_ids: slide.aoi_ids(),
        question_ids: slide.question_ids(),
    };
    let base_request = build_prompt(memory, slide, slide_count, config, templates);

    let mut request: ChatRequest = base_request.clone();
    let mut request_chars = 0usize;
    let mut response_chars = 0usize;

    for attempt in 1..=(1 + MAX_CORRECTION_ROUNDS) {
        request_chars += request.system_text.len() + request.user_text.len();
        let response = client
            .complete(&request)
            .map_err(|source| EngineError::Provider {
                slide: slide.index,
                attempts: attempt,
                source,
            })?;
        response_chars += response.len();

        let base = StepOutput {
            slide_index: slide.index,
            behaviors: vec![],
            answers: vec![],
            reflection_text: String::new(),
            raw_response: response.clone(),
            prompt_system: base_request.system_text.clone(),
            prompt_user: base_request.user_text.clone(),
            attempts: attempt,
            fallback: false,
            request_chars,
            response_chars,
        };

        match parse_structured(&response, &schema) {
            Ok(action) => return Ok(assemble(slide, action, base)),
            Err(failure) => {
                if attempt == 1 + MAX_CORRECTION_ROUNDS {
                    return Ok(fallback_output(slide, memory, base));
                }
                request.user_text = format!(
                    "{}\n\n{}",
                    request.user_text,
                    templates.render_correction(&failure.message)
                );
            }
        }
    }
    unreachable!("step loop always returns within the attempt budget");
}
