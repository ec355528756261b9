//! Deterministic mock provider.
//!
//! The mock answers exactly like a remote model would have to: it reads the
//! prompt text (persona block, current-slide block) and emits a schema-valid
//! JSON action. Keeping it a pure function of the prompt guarantees it can
//! never "cheat" with information a real model would not have. Fault
//! injection (transient failures, malformed replies) layers on top for
//! resilience tests.

use std::sync::atomic::{AtomicU32, Ordering};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::client::Transport;
use super::{ChatRequest, ProviderError};
use crate::model::{AoiId, ChoiceLabel, CognitiveStateVector, COGNITIVE_STATE_NAMES};
use crate::persona::{encode_persona, parse_persona_text, PersonaProfile};

/// How the mock picks gaze/motor AOIs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum AoiRule {
    /// Always the transcript's pace AOI.
    FollowPace,
    /// Always the given AOI id (clamped to the slide's ids).
    Fixed { id: AoiId },
    /// Follow the pace AOI with the given probability, otherwise pick a
    /// hash-determined AOI on the slide.
    Wander { follow_probability: f64 },
}

/// How the mock answers questions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ChoiceRule {
    Fixed { label: ChoiceLabel },
    HashPick,
}

/// Cognitive-state component names for coupling configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateName {
    Workload,
    Curiosity,
    ValidFocus,
    CourseFollowing,
    Engagement,
    Confusion,
}

impl StateName {
    fn component_index(self) -> usize {
        match self {
            StateName::Workload => 0,
            StateName::Curiosity => 1,
            StateName::ValidFocus => 2,
            StateName::CourseFollowing => 3,
            StateName::Engagement => 4,
            StateName::Confusion => 5,
        }
    }
}

/// Linear link from one encoded persona item to one emitted cognitive state:
/// `state = intercept + slope * item`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub persona_item: String,
    pub state: StateName,
    pub slope: f64,
    pub intercept: f64,
}

/// Fault-injection plan. Counters apply across the transport's lifetime.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MockFaults {
    /// The first N sends fail with a transient error.
    #[serde(default)]
    pub transient_failures: u32,
    /// The first N otherwise-successful replies carry no JSON object.
    #[serde(default)]
    pub malformed_replies: u32,
    /// Prompts containing this marker always fail transiently, which
    /// exhausts the caller's retries.
    #[serde(default)]
    pub fail_if_prompt_contains: Option<String>,
    /// Prompts containing this marker always get a JSON-free reply.
    #[serde(default)]
    pub malformed_if_prompt_contains: Option<String>,
}

/// Deterministic response policy: a pure function of the prompt content.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockPolicy {
    #[serde(default = "default_gaze_rule")]
    pub gaze: AoiRule,
    #[serde(default = "default_motor_rule")]
    pub motor: AoiRule,
    /// Baseline emitted states before couplings and jitter.
    #[serde(default = "default_base_states")]
    pub base_states: CognitiveStateVector,
    /// Amplitude of deterministic pseudo-noise added to every state.
    #[serde(default = "default_jitter")]
    pub state_jitter: f64,
    #[serde(default)]
    pub couplings: Vec<Coupling>,
    #[serde(default = "default_choice_rule")]
    pub choice: ChoiceRule,
    #[serde(default)]
    pub faults: MockFaults,
}

fn default_gaze_rule() -> AoiRule {
    AoiRule::Wander {
        follow_probability: 0.75,
    }
}

fn default_motor_rule() -> AoiRule {
    AoiRule::Wander {
        follow_probability: 0.6,
    }
}

fn default_base_states() -> CognitiveStateVector {
    CognitiveStateVector::new(0.45, 0.4, 0.85, 0.7, 0.9, 0.1)
}

fn default_jitter() -> f64 {
    0.1
}

fn default_choice_rule() -> ChoiceRule {
    ChoiceRule::HashPick
}

impl Default for MockPolicy {
    /// A mildly persona-linked student: curious personas emit higher
    /// curiosity, smart ones lower workload, focused ones better focus.
    fn default() -> Self {
        Self {
            gaze: default_gaze_rule(),
            motor: default_motor_rule(),
            base_states: default_base_states(),
            state_jitter: default_jitter(),
            couplings: vec![
                Coupling {
                    persona_item: "curiosity".into(),
                    state: StateName::Curiosity,
                    slope: 0.5,
                    intercept: 0.25,
                },
                Coupling {
                    persona_item: "smartness".into(),
                    state: StateName::Workload,
                    slope: -0.5,
                    intercept: 0.7,
                },
                Coupling {
                    persona_item: "focus".into(),
                    state: StateName::ValidFocus,
                    slope: 0.3,
                    intercept: 0.6,
                },
                Coupling {
                    persona_item: "exam_performance".into(),
                    state: StateName::CourseFollowing,
                    slope: 0.3,
                    intercept: 0.55,
                },
            ],
            choice: default_choice_rule(),
            faults: MockFaults::default(),
        }
    }
}

impl MockPolicy {
    /// A policy with no persona linkage and no jitter: every agent behaves
    /// identically given identical slides.
    pub fn flat() -> Self {
        Self {
            gaze: AoiRule::FollowPace,
            motor: AoiRule::FollowPace,
            base_states: CognitiveStateVector::uniform(0.5),
            state_jitter: 0.0,
            couplings: vec![],
            choice: ChoiceRule::Fixed {
                label: ChoiceLabel::A,
            },
            faults: MockFaults::default(),
        }
    }
}

/// 64-bit FNV-1a; stable across platforms and releases, unlike the std hasher.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Hash of the listed parts mapped into `[0, 1)`.
fn unit_hash(parts: &[&str]) -> f64 {
    let mut buf = Vec::new();
    for p in parts {
        buf.extend_from_slice(p.as_bytes());
        buf.push(0x1f);
    }
    (fnv1a(&buf) >> 11) as f64 / (1u64 << 53) as f64
}

/// The prompt content the mock is allowed to see, recovered from the text.
#[derive(Debug, Clone, PartialEq)]
struct PromptView {
    persona: Option<PersonaProfile>,
    persona_key: String,
    slide_index: u32,
    aoi_ids: Vec<AoiId>,
    /// (transcript index, pace AOI)
    transcripts: Vec<(u32, AoiId)>,
    question_ids: Vec<u32>,
}

fn section<'a>(text: &'a str, header: &str) -> Option<Vec<&'a str>> {
    let mut lines = Vec::new();
    let mut inside = false;
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed == header {
            inside = true;
            continue;
        }
        if inside {
            if trimmed.starts_with('[') && trimmed.ends_with(']') {
                break;
            }
            lines.push(trimmed);
        }
    }
    inside.then_some(lines)
}

fn parse_prompt(user_text: &str) -> Result<PromptView, String> {
    let persona_lines = section(user_text, "[PERSONA]").unwrap_or_default();
    let persona_text = persona_lines
        .iter()
        .filter(|l| !l.is_empty())
        .copied()
        .collect::<Vec<_>>()
        .join("\n");
    let persona = parse_persona_text(&persona_text).ok();

    let slide_lines =
        section(user_text, "[CURRENT SLIDE]").ok_or("prompt has no [CURRENT SLIDE] block")?;

    let mut slide_index = None;
    let mut aoi_ids = Vec::new();
    let mut transcripts = Vec::new();
    let mut question_ids = Vec::new();
    for line in &slide_lines {
        if let Some(rest) = line.strip_prefix("Slide ") {
            let index = rest
                .split_whitespace()
                .next()
                .and_then(|t| t.parse::<u32>().ok())
                .ok_or_else(|| format!("bad slide header: {line:?}"))?;
            slide_index = Some(index);
        } else if let Some(rest) = line.strip_prefix("AOI ") {
            if let Some((id, _)) = rest.split_once(':') {
                aoi_ids.push(id.trim().parse::<AoiId>().map_err(|e| e.to_string())?);
            }
        } else if let Some(rest) = line.strip_prefix("Transcript ") {
            let (head, _) = rest
                .split_once(':')
                .ok_or_else(|| format!("bad transcript line: {line:?}"))?;
            let (index, pace) = head
                .split_once("(pace AOI")
                .ok_or_else(|| format!("transcript line missing pace AOI: {line:?}"))?;
            let index = index.trim().parse::<u32>().map_err(|e| e.to_string())?;
            let pace = pace
                .trim()
                .trim_end_matches(')')
                .trim()
                .parse::<AoiId>()
                .map_err(|e| e.to_string())?;
            transcripts.push((index, pace));
        } else if let Some(rest) = line.strip_prefix("Question ") {
            if let Some((id, _)) = rest.split_once(':') {
                question_ids.push(id.trim().parse::<u32>().map_err(|e| e.to_string())?);
            }
        }
    }

    let slide_index = slide_index.ok_or("no slide header in [CURRENT SLIDE] block")?;
    if transcripts.is_empty() {
        return Err("no transcript lines in [CURRENT SLIDE] block".into());
    }
    if aoi_ids.is_empty() {
        return Err("no AOI lines in [CURRENT SLIDE] block".into());
    }
    Ok(PromptView {
        persona,
        persona_key: persona_text,
        slide_index,
        aoi_ids,
        transcripts,
        question_ids,
    })
}

fn pick_aoi(rule: AoiRule, view: &PromptView, pace: AoiId, transcript: u32, salt: &str) -> AoiId {
    match rule {
        AoiRule::FollowPace => pace,
        AoiRule::Fixed { id } => {
            if view.aoi_ids.contains(&id) {
                id
            } else {
                pace
            }
        }
        AoiRule::Wander { follow_probability } => {
            let roll = unit_hash(&[
                &view.persona_key,
                &view.slide_index.to_string(),
                &transcript.to_string(),
                salt,
                "roll",
            ]);
            if roll < follow_probability {
                pace
            } else {
                let pick = unit_hash(&[
                    &view.persona_key,
                    &view.slide_index.to_string(),
                    &transcript.to_string(),
                    salt,
                    "pick",
                ]);
                view.aoi_ids[(pick * view.aoi_ids.len() as f64) as usize % view.aoi_ids.len()]
            }
        }
    }
}

fn emit_states(policy: &MockPolicy, view: &PromptView, transcript: u32) -> CognitiveStateVector {
    let mut components = policy.base_states.components();
    if let Some(persona) = &view.persona {
        let encoding = encode_persona(persona);
        for coupling in &policy.couplings {
            let item = encoding.value(&coupling.persona_item).unwrap_or(0.5);
            components[coupling.state.component_index()] =
                coupling.intercept + coupling.slope * item;
        }
    }
    for (i, component) in components.iter_mut().enumerate() {
        let noise = unit_hash(&[
            &view.persona_key,
            &view.slide_index.to_string(),
            &transcript.to_string(),
            COGNITIVE_STATE_NAMES[i],
            "noise",
        ]) * 2.0
            - 1.0;
        *component += noise * policy.state_jitter;
    }
    CognitiveStateVector::from_components(components).clamped()
}

fn render_reply(policy: &MockPolicy, view: &PromptView) -> String {
    let transcripts: Vec<serde_json::Value> = view
        .transcripts
        .iter()
        .map(|&(index, pace)| {
            let states = emit_states(policy, view, index);
            json!({
                "transcript_index": index,
                "gaze_aoi": pick_aoi(policy.gaze, view, pace, index, "gaze"),
                "motor_aoi": pick_aoi(policy.motor, view, pace, index, "motor"),
                "workload": states.workload,
                "curiosity": states.curiosity,
                "valid_focus": states.valid_focus,
                "course_following": states.course_following,
                "engagement": states.engagement,
                "confusion": states.confusion,
            })
        })
        .collect();

    let answers: Vec<serde_json::Value> = view
        .question_ids
        .iter()
        .map(|&question_id| {
            let choice = match policy.choice {
                ChoiceRule::Fixed { label } => label,
                ChoiceRule::HashPick => {
                    let roll = unit_hash(&[&view.persona_key, &question_id.to_string(), "choice"]);
                    ChoiceLabel::from_index((roll * 4.0) as usize % 4).unwrap()
                }
            };
            json!({ "question_id": question_id, "choice": choice.as_str() })
        })
        .collect();

    let body = json!({
        "reasoning": format!(
            "Considered the persona and the previous slide's behavior before acting on slide {}.",
            view.slide_index
        ),
        "transcripts": transcripts,
        "answers": answers,
    });
    format!("Simulation complete.\n{body}")
}

/// Mock transport: deterministic policy responses plus fault injection.
pub struct MockTransport {
    policy: MockPolicy,
    transient_remaining: AtomicU32,
    malformed_remaining: AtomicU32,
    calls: AtomicU32,
}

impl MockTransport {
    pub fn new(policy: MockPolicy) -> Self {
        let transient = policy.faults.transient_failures;
        let malformed = policy.faults.malformed_replies;
        Self {
            policy,
            transient_remaining: AtomicU32::new(transient),
            malformed_remaining: AtomicU32::new(malformed),
            calls: AtomicU32::new(0),
        }
    }

    pub fn with_faults(mut self, faults: MockFaults) -> Self {
        self.transient_remaining = AtomicU32::new(faults.transient_failures);
        self.malformed_remaining = AtomicU32::new(faults.malformed_replies);
        self.policy.faults = faults;
        self
    }

    /// Total send attempts observed, including ones that failed.
    pub fn calls(&self) -> u32 {
        self.calls.load(Ordering::SeqCst)
    }

    fn take_budget(counter: &AtomicU32) -> bool {
        counter
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |v| v.checked_sub(1))
            .is_ok()
    }
}

impl Transport for MockTransport {
    fn send(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        if let Some(marker) = &self.policy.faults.fail_if_prompt_contains {
            if request.user_text.contains(marker.as_str()) {
                return Err(ProviderError::Transient(
                    "injected failure for matching prompt".into(),
                ));
            }
        }
        if Self::take_budget(&self.transient_remaining) {
            return Err(ProviderError::Transient(
                "injected transient failure".into(),
            ));
        }
        if let Some(marker) = &self.policy.faults.malformed_if_prompt_contains {
            if request.user_text.contains(marker.as_str()) {
                return Ok("I am sorry, I cannot express that as JSON today.".into());
            }
        }
        if Self::take_budget(&self.malformed_remaining) {
            return Ok("Let me think about this in free prose instead.".into());
        }
        let view = parse_prompt(&request.user_text)
            .map_err(|e| ProviderError::InvalidRequest(format!("mock cannot read prompt: {e}")))?;
        Ok(render_reply(&self.policy, &view))
    }

    fn identity(&self) -> String {
        "mock".into()
    }
}
