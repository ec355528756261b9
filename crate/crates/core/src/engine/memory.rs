//! Layered agent memory, scoped to exactly the most recent completed slide.
//!
//! Four layers are kept per transcript of that slide: gaze AOIs, motor AOIs,
//! cognitive states, and the course material (transcript texts plus AOI
//! labels). The persona text is static for the agent's lifetime.

use crate::model::{AoiId, BehaviorRecord, CognitiveStateVector, Slide};

use super::EngineError;

/// Behavior layers for one completed slide; all layers have one entry per
/// transcript of that slide.
#[derive(Debug, Clone, PartialEq)]
pub struct SlideMemory {
    pub slide_index: u32,
    pub transcript_texts: Vec<String>,
    pub aoi_labels: Vec<(AoiId, String)>,
    pub gaze: Vec<Option<AoiId>>,
    pub motor: Vec<Option<AoiId>>,
    pub cognitive: Vec<CognitiveStateVector>,
}

impl SlideMemory {
    /// Builds the layers from per-transcript behavior records of `slide`.
    /// Records must cover the slide's transcripts exactly, in order.
    pub fn from_behaviors(slide: &Slide, records: &[&BehaviorRecord]) -> Result<Self, EngineError> {
        let expected = slide.transcript_indices();
        let found: Vec<u32> = records.iter().map(|r| r.transcript_index).collect();
        if found != expected {
            return Err(EngineError::Memory(format!(
                "slide {}: memory layers need one record per transcript {:?}, got {:?}",
                slide.index, expected, found
            )));
        }
        Ok(Self {
            slide_index: slide.index,
            transcript_texts: slide.transcripts.iter().map(|t| t.text.clone()).collect(),
            aoi_labels: slide.aois.iter().map(|a| (a.id, a.label.clone())).collect(),
            gaze: records.iter().map(|r| r.gaze_aoi).collect(),
            motor: records.iter().map(|r| r.motor_aoi).collect(),
            cognitive: records.iter().map(|r| r.cognitive).collect(),
        })
    }

    pub fn transcript_count(&self) -> usize {
        self.transcript_texts.len()
    }

    fn layers_consistent(&self) -> bool {
        let n = self.transcript_count();
        self.gaze.len() == n && self.motor.len() == n && self.cognitive.len() == n
    }
}

/// Agent memory: the persona text plus at most one retained slide.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryStore {
    pub persona_text: String,
    last_slide: Option<SlideMemory>,
}

impl MemoryStore {
    pub fn new(persona_text: impl Into<String>) -> Self {
        Self {
            persona_text: persona_text.into(),
            last_slide: None,
        }
    }

    /// Replaces the retained slide; anything older is forgotten.
    pub fn remember(&mut self, memory: SlideMemory) -> Result<(), EngineError> {
        if !memory.layers_consistent() {
            return Err(EngineError::Memory(format!(
                "slide {}: layer lengths disagree with transcript count {}",
                memory.slide_index,
                memory.transcript_count()
            )));
        }
        self.last_slide = Some(memory);
        Ok(())
    }

    pub fn forget(&mut self) {
        self.last_slide = None;
    }

    pub fn last_slide(&self) -> Option<&SlideMemory> {
        self.last_slide.as_ref()
    }

    /// Mean of the retained cognitive layer, used by the fallback action.
    pub fn mean_cognitive(&self) -> Option<CognitiveStateVector> {
        self.last_slide
            .as_ref()
            .and_then(|m| CognitiveStateVector::mean_of(&m.cognitive))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Aoi, BBox, Transcript};

    fn slide() -> Slide {
        Slide {
            index: 2,
            aois: vec![Aoi {
                id: 1,
                bbox: BBox::new(0.0, 0.0, 1.0, 1.0),
                label: "body".into(),
            }],
            transcripts: vec![
                Transcript {
                    index: 1,
                    text: "one".into(),
                    pace_aoi: 1,
                    window: None,
                },
                Transcript {
                    index: 2,
                    text: "two".into(),
                    pace_aoi: 1,
                    window: None,
                },
            ],
            questions: vec![],
        }
    }

    fn record(transcript: u32, value: f64) -> BehaviorRecord {
        BehaviorRecord {
            slide_index: 2,
            transcript_index: transcript,
            gaze_aoi: Some(1),
            motor_aoi: None,
            cognitive: CognitiveStateVector::uniform(value),
        }
    }

    #[test]
    fn layers_align_with_transcripts() {
        let slide = slide();
        let records = [record(1, 0.2), record(2, 0.6)];
        let refs: Vec<&BehaviorRecord> = records.iter().collect();
        let memory = SlideMemory::from_behaviors(&slide, &refs).unwrap();
        assert_eq!(memory.transcript_count(), 2);
        assert_eq!(memory.gaze, vec![Some(1), Some(1)]);

        let mut store = MemoryStore::new("persona");
        store.remember(memory).unwrap();
        let mean = store.mean_cognitive().unwrap();
        assert!((mean.workload - 0.4).abs() < 1e-12);
    }

    #[test]
    fn missing_transcript_is_rejected() {
        let slide = slide();
        let records = [record(1, 0.2)];
        let refs: Vec<&BehaviorRecord> = records.iter().collect();
        assert!(SlideMemory::from_behaviors(&slide, &refs).is_err());
    }

    #[test]
    fn at_most_one_slide_is_retained() {
        let slide = slide();
        let records = [record(1, 0.1), record(2, 0.3)];
        let refs: Vec<&BehaviorRecord> = records.iter().collect();
        let mut store = MemoryStore::new("persona");
        store
            .remember(SlideMemory::from_behaviors(&slide, &refs).unwrap())
            .unwrap();
        let mut second = SlideMemory::from_behaviors(&slide, &refs).unwrap();
        second.slide_index = 3;
        store.remember(second).unwrap();
        assert_eq!(store.last_slide().unwrap().slide_index, 3);
    }
}
