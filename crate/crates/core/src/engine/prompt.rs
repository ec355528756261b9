//! Prompt assembly: versioned template files plus structured blocks built
//! from the current slide and the memory layers.
//!
//! Block order is fixed: persona, current slide, demonstration (previous
//! slide's layers, subject to ablation), priors + reflection instruction
//! (cognitive-priors mode only), output schema.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::model::Slide;
use crate::provider::ChatRequest;

use super::memory::MemoryStore;
use super::{PriorMode, SimulationConfig};

pub const PERSONA_MARKER: &str = "[PERSONA]";
pub const CURRENT_SLIDE_MARKER: &str = "[CURRENT SLIDE]";
pub const DEMONSTRATION_MARKER: &str = "[DEMONSTRATION]";
pub const PRIORS_MARKER: &str = "[PRIORS]";
pub const REFLECT_MARKER: &str = "[REFLECT FIRST]";
pub const OUTPUT_SCHEMA_MARKER: &str = "[OUTPUT SCHEMA]";
pub const CORRECTION_MARKER: &str = "[CORRECTION]";

/// Line prefixes of the three ablatable demonstration layers. Ablation
/// removes exactly the lines carrying these tags.
pub const GAZE_LINE_TAG: &str = "gaze AOI:";
pub const MOTOR_LINE_TAG: &str = "motor AOI:";
pub const COGNITIVE_LINE_TAG: &str = "cognitive:";

/// The fixed prompt wording, loaded from `templates/`. The hash of the
/// loaded set is recorded in run manifests.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptTemplates {
    pub system: String,
    pub priors: String,
    pub reflect: String,
    pub output_schema: String,
    pub qa_branch: String,
    pub no_answers: String,
    pub correction: String,
}

const TEMPLATE_FILES: [&str; 7] = [
    "system.txt",
    "priors.txt",
    "reflect.txt",
    "output_schema.txt",
    "qa_branch.txt",
    "no_answers.txt",
    "correction.txt",
];

impl PromptTemplates {
    /// The template set compiled into the binary (the repository's
    /// `templates/` directory at build time).
    pub fn builtin() -> Self {
        Self {
            system: include_str!("../../../../templates/system.txt").into(),
            priors: include_str!("../../../../templates/priors.txt").into(),
            reflect: include_str!("../../../../templates/reflect.txt").into(),
            output_schema: include_str!("../../../../templates/output_schema.txt").into(),
            qa_branch: include_str!("../../../../templates/qa_branch.txt").into(),
            no_answers: include_str!("../../../../templates/no_answers.txt").into(),
            correction: include_str!("../../../../templates/correction.txt").into(),
        }
    }

    /// Loads an override set from a directory holding the seven `.txt` files.
    pub fn from_dir(dir: impl AsRef<Path>) -> std::io::Result<Self> {
        let dir = dir.as_ref();
        let read = |name: &str| std::fs::read_to_string(dir.join(name));
        Ok(Self {
            system: read(TEMPLATE_FILES[0])?,
            priors: read(TEMPLATE_FILES[1])?,
            reflect: read(TEMPLATE_FILES[2])?,
            output_schema: read(TEMPLATE_FILES[3])?,
            qa_branch: read(TEMPLATE_FILES[4])?,
            no_answers: read(TEMPLATE_FILES[5])?,
            correction: read(TEMPLATE_FILES[6])?,
        })
    }

    /// SHA-256 over all template texts, recorded in run manifests.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        for text in [
            &self.system,
            &self.priors,
            &self.reflect,
            &self.output_schema,
            &self.qa_branch,
            &self.no_answers,
            &self.correction,
        ] {
            hasher.update(text.as_bytes());
            hasher.update([0u8]);
        }
        format!("{:x}", hasher.finalize())
    }

    pub fn render_correction(&self, violation: &str) -> String {
        format!(
            "{CORRECTION_MARKER}\n{}",
            fill(&self.correction, &[("violation", violation)])
        )
    }
}

fn fill(template: &str, substitutions: &[(&str, &str)]) -> String {
    let mut out = template.trim_end().to_string();
    for (key, value) in substitutions {
        out = out.replace(&format!("{{{{{key}}}}}"), value);
    }
    out
}

fn join_ids<T: std::fmt::Display>(ids: &[T]) -> String {
    let parts: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn current_slide_block(slide: &Slide, slide_count: usize) -> String {
    let mut lines = vec![
        CURRENT_SLIDE_MARKER.to_string(),
        format!("Slide {} of {}", slide.index, slide_count),
    ];
    for aoi in &slide.aois {
        lines.push(format!("AOI {}: {}", aoi.id, aoi.label));
    }
    for t in &slide.transcripts {
        lines.push(format!(
            "Transcript {} (pace AOI {}): \"{}\"",
            t.index, t.pace_aoi, t.text
        ));
    }
    for q in &slide.questions {
        lines.push(format!("Question {}: {}", q.id, q.stem));
        for (label, choice) in ["A", "B", "C", "D"].iter().zip(&q.choices) {
            lines.push(format!("  {label}) {choice}"));
        }
    }
    lines.join("\n")
}

fn demonstration_block(memory: &MemoryStore, config: &SimulationConfig) -> Option<String> {
    if config.ablation.drop_demonstration {
        return None;
    }
    let slide = memory.last_slide()?;
    let mut lines = vec![
        DEMONSTRATION_MARKER.to_string(),
        format!(
            "Your own behavior on the previous slide (slide {}), per transcript:",
            slide.slide_index
        ),
    ];
    for (id, label) in &slide.aoi_labels {
        lines.push(format!("Material AOI {id}: {label}"));
    }
    let fmt_aoi = |aoi: &Option<u32>| match aoi {
        Some(id) => id.to_string(),
        None => "none".to_string(),
    };
    for (i, text) in slide.transcript_texts.iter().enumerate() {
        let t = i + 1;
        lines.push(format!("Transcript {t}: \"{text}\""));
        if !config.ablation.drop_gaze {
            lines.push(format!(
                "Transcript {t} {GAZE_LINE_TAG} {}",
                fmt_aoi(&slide.gaze[i])
            ));
        }
        if !config.ablation.drop_motor {
            lines.push(format!(
                "Transcript {t} {MOTOR_LINE_TAG} {}",
                fmt_aoi(&slide.motor[i])
            ));
        }
        if !config.ablation.drop_cognitive {
            let c = slide.cognitive[i];
            lines.push(format!(
                "Transcript {t} {COGNITIVE_LINE_TAG} workload={:.2} curiosity={:.2} valid_focus={:.2} course_following={:.2} engagement={:.2} confusion={:.2}",
                c.workload, c.curiosity, c.valid_focus, c.course_following, c.engagement, c.confusion
            ));
        }
    }
    Some(lines.join("\n"))
}

fn output_schema_block(slide: &Slide, templates: &PromptTemplates) -> String {
    let answers_instruction = if slide.questions.is_empty() {
        templates.no_answers.trim_end().to_string()
    } else {
        fill(
            &templates.qa_branch,
            &[("question_ids", &join_ids(&slide.question_ids()))],
        )
    };
    let body = fill(
        &templates.output_schema,
        &[
            (
                "transcript_indices",
                join_ids(&slide.transcript_indices()).as_str(),
            ),
            ("aoi_ids", join_ids(&slide.aoi_ids()).as_str()),
            ("answers_instruction", answers_instruction.as_str()),
        ],
    );
    format!("{OUTPUT_SCHEMA_MARKER}\n{body}")
}

/// Assembles the chat request for one slide step.
pub fn build_prompt(
    memory: &MemoryStore,
    slide: &Slide,
    slide_count: usize,
    config: &SimulationConfig,
    templates: &PromptTemplates,
) -> ChatRequest {
    let mut blocks = vec![
        format!("{PERSONA_MARKER}\n{}", memory.persona_text),
        current_slide_block(slide, slide_count),
    ];
    if let Some(demo) = demonstration_block(memory, config) {
        blocks.push(demo);
    }
    if config.prior_mode == PriorMode::CognitivePriors {
        blocks.push(format!("{PRIORS_MARKER}\n{}", templates.priors.trim_end()));
        blocks.push(format!(
            "{REFLECT_MARKER}\n{}",
            templates.reflect.trim_end()
        ));
    }
    blocks.push(output_schema_block(slide, templates));

    ChatRequest {
        system_text: templates.system.trim_end().to_string(),
        user_text: blocks.join("\n\n"),
        temperature: config.temperature,
        max_tokens: config.max_tokens,
        model_name: config.model_name.clone(),
    }
}
