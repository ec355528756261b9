//! Experiment drivers.
//!
//! Replay mode pairs each agent with one real student and overwrites the
//! agent's memory with that student's previous-slide behaviors before every
//! step. Generative mode samples fresh personas and lets each agent feed on
//! its own previous outputs. Agents are independent and run on a bounded
//! worker pool; results are collected in agent order so mock-backed runs are
//! byte-deterministic regardless of scheduling.

use crate::dataset::{StudentRecord, FORMAT_VERSION};
use crate::model::Lecture;
use crate::persona::{render_persona_text, sample_persona, PersonaProfile};
use crate::provider::ChatClient;

use super::memory::{MemoryStore, SlideMemory};
use super::prompt::PromptTemplates;
use super::step::{run_slide_step, StepOutput};
use super::{agent_seed, EngineError, SimulationConfig};

/// One agent's full pass over the lecture.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentRunOutput {
    pub student_id: String,
    pub persona: Option<PersonaProfile>,
    pub steps: Vec<StepOutput>,
}

impl AgentRunOutput {
    pub fn to_student_record(&self) -> StudentRecord {
        StudentRecord {
            version: FORMAT_VERSION,
            student_id: self.student_id.clone(),
            persona: self.persona,
            behaviors: self
                .steps
                .iter()
                .flat_map(|s| s.behaviors.clone())
                .collect(),
            answers: self.steps.iter().flat_map(|s| s.answers.clone()).collect(),
        }
    }

    pub fn fallback_steps(&self) -> u32 {
        self.steps.iter().filter(|s| s.fallback).count() as u32
    }

    pub fn total_attempts(&self) -> u32 {
        self.steps.iter().map(|s| s.attempts).sum()
    }
}

/// A failed agent: the step error, kept alongside the successes.
#[derive(Debug, Clone)]
pub struct AgentFailure {
    pub student_id: String,
    pub slide_index: u32,
    pub error: String,
}

/// All agents of one run, successes and failures, in agent order.
#[derive(Debug, Default)]
pub struct ExperimentOutput {
    pub agents: Vec<AgentRunOutput>,
    pub failures: Vec<AgentFailure>,
}

impl ExperimentOutput {
    pub fn to_student_records(&self) -> Vec<StudentRecord> {
        self.agents.iter().map(|a| a.to_student_record()).collect()
    }
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool, EngineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| EngineError::Pool(e.to_string()))
}

fn collect_outcomes(outcomes: Vec<Result<AgentRunOutput, AgentFailure>>) -> ExperimentOutput {
    let mut output = ExperimentOutput::default();
    for outcome in outcomes {
        match outcome {
            Ok(agent) => output.agents.push(agent),
            Err(failure) => output.failures.push(failure),
        }
    }
    output
}

fn replay_one_agent(
    lecture: &Lecture,
    record: &StudentRecord,
    config: &SimulationConfig,
    client: &ChatClient,
    templates: &PromptTemplates,
) -> Result<AgentRunOutput, AgentFailure> {
    let persona_text = match &record.persona {
        Some(p) => render_persona_text(p),
        None => "No persona information available for this student.".to_string(),
    };
    let mut memory = MemoryStore::new(persona_text);
    let mut steps = Vec::with_capacity(lecture.slides.len());
    let slide_count = lecture.slides.len();

    for slide in &lecture.slides {
        // Personalize on the REAL student's previous slide, not the agent's
        // own outputs.
        if slide.index > 1 {
            let previous = lecture.slide(slide.index - 1).expect("validated lecture");
            let real = record.behaviors_for_slide(previous.index);
            let injected =
                SlideMemory::from_behaviors(previous, &real).map_err(|e| AgentFailure {
                    student_id: record.student_id.clone(),
                    slide_index: slide.index,
                    error: e.to_string(),
                })?;
            memory.remember(injected).map_err(|e| AgentFailure {
                student_id: record.student_id.clone(),
                slide_index: slide.index,
                error: e.to_string(),
            })?;
        }
        let step = run_slide_step(&memory, slide, slide_count, config, client, templates).map_err(
            |e| AgentFailure {
                student_id: record.student_id.clone(),
                slide_index: slide.index,
                error: e.to_string(),
            },
        )?;
        steps.push(step);
    }

    Ok(AgentRunOutput {
        student_id: record.student_id.clone(),
        persona: record.persona,
        steps,
    })
}

/// Replay experiment: one agent per real student record. Before simulating
/// slide `k`, the memory is overwritten with the real student's slide `k-1`
/// behaviors. Records must cover the lecture exactly.
pub fn run_experiment1(
    lecture: &Lecture,
    real_records: &[StudentRecord],
    config: &SimulationConfig,
    client: &ChatClient,
    templates: &PromptTemplates,
    workers: usize,
) -> Result<ExperimentOutput, EngineError> {
    for record in real_records {
        record
            .validate(lecture)
            .map_err(|e| EngineError::Mismatch(e.to_string()))?;
        record
            .covers_lecture(lecture)
            .map_err(|e| EngineError::Mismatch(e.to_string()))?;
    }
    let pool = build_pool(workers)?;
    let outcomes: Vec<Result<AgentRunOutput, AgentFailure>> = pool.install(|| {
        use rayon::prelude::*;
        real_records
            .par_iter()
            .map(|record| replay_one_agent(lecture, record, config, client, templates))
            .collect()
    });
    Ok(collect_outcomes(outcomes))
}

fn generate_one_agent(
    lecture: &Lecture,
    agent_index: usize,
    config: &SimulationConfig,
    client: &ChatClient,
    templates: &PromptTemplates,
) -> Result<AgentRunOutput, AgentFailure> {
    let student_id = format!("virtual-{:04}", agent_index + 1);
    let persona = sample_persona(agent_seed(config.seed, agent_index));
    let mut memory = MemoryStore::new(render_persona_text(&persona));
    let mut steps = Vec::with_capacity(lecture.slides.len());
    let slide_count = lecture.slides.len();

    for slide in &lecture.slides {
        let step = run_slide_step(&memory, slide, slide_count, config, client, templates).map_err(
            |e| AgentFailure {
                student_id: student_id.clone(),
                slide_index: slide.index,
                error: e.to_string(),
            },
        )?;
        // Self-generated memory: the agent's own behaviors become the
        // demonstration for the next slide.
        let refs: Vec<&crate::model::BehaviorRecord> = step.behaviors.iter().collect();
        let own = SlideMemory::from_behaviors(slide, &refs).map_err(|e| AgentFailure {
            student_id: student_id.clone(),
            slide_index: slide.index,
            error: e.to_string(),
        })?;
        memory.remember(own).map_err(|e| AgentFailure {
            student_id: student_id.clone(),
            slide_index: slide.index,
            error: e.to_string(),
        })?;
        steps.push(step);
    }

    Ok(AgentRunOutput {
        student_id,
        persona: Some(persona),
        steps,
    })
}

/// Generative experiment: samples `cohort_size` personas (seeded per agent)
/// and runs each agent through the lecture on its own generated memory.
/// Per-agent failures are recorded without aborting the cohort.
pub fn run_experiment2(
    lecture: &Lecture,
    cohort_size: usize,
    config: &SimulationConfig,
    client: &ChatClient,
    templates: &PromptTemplates,
    workers: usize,
) -> Result<ExperimentOutput, EngineError> {
    lecture
        .validate()
        .map_err(|e| EngineError::Mismatch(e.to_string()))?;
    let pool = build_pool(workers)?;
    let outcomes: Vec<Result<AgentRunOutput, AgentFailure>> = pool.install(|| {
        use rayon::prelude::*;
        (0..cohort_size)
            .into_par_iter()
            .map(|i| generate_one_agent(lecture, i, config, client, templates))
            .collect()
    });
    Ok(collect_outcomes(outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{demo_lecture, demo_student_records};
    use crate::provider::{AoiRule, MockFaults, MockPolicy};

    #[test]
    fn experiment2_is_deterministic_and_self_feeding() {
        let lecture = demo_lecture(3, 9);
        let run = |seed: u64| {
            let client = ChatClient::mock(MockPolicy::default());
            let config = SimulationConfig {
                seed,
                ..SimulationConfig::default()
            };
            run_experiment2(
                &lecture,
                5,
                &config,
                &client,
                &PromptTemplates::builtin(),
                2,
            )
            .unwrap()
        };
        let a = run(7);
        let b = run(7);
        assert_eq!(a.to_student_records(), b.to_student_records());
        assert_eq!(a.agents.len(), 5);
        assert!(a.failures.is_empty());

        // Slide-2 prompts carry the agent's own slide-1 gaze values.
        let agent = &a.agents[0];
        let own_gaze = agent.steps[0].behaviors[0].gaze_aoi.unwrap();
        let demo = &agent.steps[1].prompt_user;
        assert!(demo.contains(&format!("Transcript 1 gaze AOI: {own_gaze}")));

        let c = run(8);
        assert_ne!(a.to_student_records(), c.to_student_records());
    }

    #[test]
    fn experiment1_injects_real_memory_not_own() {
        let lecture = demo_lecture(3, 9);
        let records = demo_student_records(&lecture, 2, 21);
        // The mock is pinned to AOI 1 so its own outputs are distinguishable
        // from the real records (whose gaze moves around).
        let policy = MockPolicy {
            gaze: AoiRule::Fixed { id: 1 },
            motor: AoiRule::Fixed { id: 1 },
            ..MockPolicy::flat()
        };
        let client = ChatClient::mock(policy);
        let out = run_experiment1(
            &lecture,
            &records,
            &SimulationConfig::default(),
            &client,
            &PromptTemplates::builtin(),
            2,
        )
        .unwrap();
        assert_eq!(out.agents.len(), 2);

        let agent = &out.agents[0];
        let real = &records[0];
        for slide in &lecture.slides[1..] {
            let step = agent
                .steps
                .iter()
                .find(|s| s.slide_index == slide.index)
                .unwrap();
            let previous_real = real.behaviors_for_slide(slide.index - 1);
            for (i, record) in previous_real.iter().enumerate() {
                let aoi = match record.gaze_aoi {
                    Some(id) => id.to_string(),
                    None => "none".into(),
                };
                let line = format!("Transcript {} gaze AOI: {}", i + 1, aoi);
                assert!(
                    step.prompt_user.contains(&line),
                    "slide {} prompt missing real memory line {line:?}",
                    slide.index
                );
            }
        }
        // First slide has no demonstration at all.
        assert!(!out.agents[0].steps[0]
            .prompt_user
            .contains(super::super::DEMONSTRATION_MARKER));
    }

    #[test]
    fn experiment1_accepts_records_without_personas() {
        let lecture = demo_lecture(2, 9);
        let mut records = demo_student_records(&lecture, 1, 33);
        records[0].persona = None;
        let client = ChatClient::mock(MockPolicy::default());
        let out = run_experiment1(
            &lecture,
            &records,
            &SimulationConfig::default(),
            &client,
            &PromptTemplates::builtin(),
            1,
        )
        .unwrap();
        assert_eq!(out.agents.len(), 1);
        assert!(out.failures.is_empty());
        assert_eq!(out.agents[0].persona, None);
        assert!(out.agents[0].steps[0]
            .prompt_user
            .contains("No persona information available"));
    }

    #[test]
    fn experiment1_rejects_records_that_do_not_cover_the_lecture() {
        let lecture = demo_lecture(3, 9);
        let mut records = demo_student_records(&lecture, 1, 5);
        records[0].behaviors.pop();
        let client = ChatClient::mock(MockPolicy::default());
        let err = run_experiment1(
            &lecture,
            &records,
            &SimulationConfig::default(),
            &client,
            &PromptTemplates::builtin(),
            1,
        )
        .unwrap_err();
        assert!(matches!(err, EngineError::Mismatch(_)), "{err}");
    }

    #[test]
    fn failed_agents_do_not_abort_the_cohort() {
        let lecture = demo_lecture(2, 9);
        // Target one persona's rendered text: agent 1 of seed 3.
        let victim = render_persona_text(&sample_persona(agent_seed(3, 1)));
        let policy = MockPolicy {
            faults: MockFaults {
                fail_if_prompt_contains: Some(victim),
                ..MockFaults::default()
            },
            ..MockPolicy::default()
        };
        let client = ChatClient::mock(policy);
        let config = SimulationConfig {
            seed: 3,
            ..SimulationConfig::default()
        };
        let out = run_experiment2(
            &lecture,
            3,
            &config,
            &client,
            &PromptTemplates::builtin(),
            1,
        )
        .unwrap();
        assert_eq!(out.agents.len(), 2);
        assert_eq!(out.failures.len(), 1);
        assert_eq!(out.failures[0].student_id, "virtual-0002");
    }
}
