//! The virtual-student persona space: sampling, text rendering, and numeric
//! encoding.
//!
//! A persona is four demographic categories (age, gender, major, education)
//! plus nine binary learning characteristics, giving
//! 4 x 3 x 6 x 4 x 2^9 = 147456 distinct profiles.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PersonaError {
    #[error("{field} = {value} is out of range (max {max})")]
    OutOfRange {
        field: &'static str,
        value: u8,
        max: u8,
    },
    #[error("unrecognized persona line: {0:?}")]
    UnrecognizedLine(String),
}

/// Category cardinalities for the four demographic fields.
pub const AGE_CATEGORIES: u8 = 4;
pub const GENDER_CATEGORIES: u8 = 3;
pub const MAJOR_CATEGORIES: u8 = 6;
pub const EDUCATION_CATEGORIES: u8 = 4;
/// Number of binary learning characteristics.
pub const CHARACTERISTIC_COUNT: usize = 9;

const AGE_ITEMS: [&str; 4] = ["18-24", "25-31", "32-38", "> 39"];
const GENDER_ITEMS: [&str; 3] = ["female", "male", "others"];
const MAJOR_ITEMS: [&str; 6] = [
    "Humanities",
    "Social",
    "Natural",
    "Technology",
    "Business",
    "Health",
];
const EDUCATION_ITEMS: [&str; 4] = ["high school", "undergraduate", "master", "doctor"];

/// (attribute label, positive phrase, negative phrase) for each characteristic.
const CHARACTERISTIC_ITEMS: [(&str, &str, &str); CHARACTERISTIC_COUNT] = [
    ("Learning Attitude", "Very motivated", "Not motivated"),
    (
        "Exam Performance",
        "High GPA, answer test questions correctly",
        "Low GPA. make mistakes in post-test",
    ),
    ("Focus", "Very focus", "Usually absent-minded"),
    (
        "Curiosity",
        "Curious to explore everything in the course",
        "Not curious at all",
    ),
    (
        "Interest in Course",
        "Super interested",
        "Not Interested at all",
    ),
    (
        "Prior knowledge",
        "Strong background with prior knowledge",
        "No background without priors",
    ),
    (
        "Compliance",
        "Well-behaved to follow teachers",
        "Unwilling to follow teachers",
    ),
    (
        "Smartness",
        "Smart to understand everything fast",
        "Not smart, understand things slowly",
    ),
    (
        "Family",
        "Parents have a strong academic background",
        "Parents do not care about education",
    ),
];

/// One virtual student: demographic categories plus binary characteristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PersonaProfile {
    pub age: u8,
    pub gender: u8,
    pub major: u8,
    pub education: u8,
    pub attitude: u8,
    pub exam_performance: u8,
    pub focus: u8,
    pub curiosity: u8,
    pub interest: u8,
    pub prior_knowledge: u8,
    pub compliance: u8,
    pub smartness: u8,
    pub family: u8,
}

impl PersonaProfile {
    pub fn characteristics(&self) -> [u8; CHARACTERISTIC_COUNT] {
        [
            self.attitude,
            self.exam_performance,
            self.focus,
            self.curiosity,
            self.interest,
            self.prior_knowledge,
            self.compliance,
            self.smartness,
            self.family,
        ]
    }

    pub fn validate(&self) -> Result<(), PersonaError> {
        let categorical = [
            ("age", self.age, AGE_CATEGORIES - 1),
            ("gender", self.gender, GENDER_CATEGORIES - 1),
            ("major", self.major, MAJOR_CATEGORIES - 1),
            ("education", self.education, EDUCATION_CATEGORIES - 1),
        ];
        for (field, value, max) in categorical {
            if value > max {
                return Err(PersonaError::OutOfRange { field, value, max });
            }
        }
        let binary_fields = [
            "attitude",
            "exam_performance",
            "focus",
            "curiosity",
            "interest",
            "prior_knowledge",
            "compliance",
            "smartness",
            "family",
        ];
        for (field, value) in binary_fields.into_iter().zip(self.characteristics()) {
            if value > 1 {
                return Err(PersonaError::OutOfRange {
                    field,
                    value,
                    max: 1,
                });
            }
        }
        Ok(())
    }

    /// The all-zeros profile (every category 0, every characteristic negative).
    pub fn minimum() -> Self {
        Self {
            age: 0,
            gender: 0,
            major: 0,
            education: 0,
            attitude: 0,
            exam_performance: 0,
            focus: 0,
            curiosity: 0,
            interest: 0,
            prior_knowledge: 0,
            compliance: 0,
            smartness: 0,
            family: 0,
        }
    }

    /// The all-max profile (every category at its top index, every characteristic positive).
    pub fn maximum() -> Self {
        Self {
            age: AGE_CATEGORIES - 1,
            gender: GENDER_CATEGORIES - 1,
            major: MAJOR_CATEGORIES - 1,
            education: EDUCATION_CATEGORIES - 1,
            attitude: 1,
            exam_performance: 1,
            focus: 1,
            curiosity: 1,
            interest: 1,
            prior_knowledge: 1,
            compliance: 1,
            smartness: 1,
            family: 1,
        }
    }
}

/// Normalized persona items plus their mean, all in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaEncoding {
    /// `(item name, normalized value)` in canonical order: the four
    /// demographics followed by the nine characteristics.
    pub items: Vec<(String, f64)>,
    /// Arithmetic mean of all item values.
    pub aggregate: f64,
}

impl PersonaEncoding {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.items.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Total number of distinct persona profiles.
pub fn persona_space_size() -> u64 {
    AGE_CATEGORIES as u64
        * GENDER_CATEGORIES as u64
        * MAJOR_CATEGORIES as u64
        * EDUCATION_CATEGORIES as u64
        * (1u64 << CHARACTERISTIC_COUNT)
}

/// Draws one profile uniformly from the full space; same seed, same profile.
pub fn sample_persona(seed: u64) -> PersonaProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PersonaProfile {
        age: rng.gen_range(0..AGE_CATEGORIES),
        gender: rng.gen_range(0..GENDER_CATEGORIES),
        major: rng.gen_range(0..MAJOR_CATEGORIES),
        education: rng.gen_range(0..EDUCATION_CATEGORIES),
        attitude: rng.gen_range(0..=1),
        exam_performance: rng.gen_range(0..=1),
        focus: rng.gen_range(0..=1),
        curiosity: rng.gen_range(0..=1),
        interest: rng.gen_range(0..=1),
        prior_knowledge: rng.gen_range(0..=1),
        compliance: rng.gen_range(0..=1),
        smartness: rng.gen_range(0..=1),
        family: rng.gen_range(0..=1),
    }
}

/// Encodes a profile to normalized items: a categorical at index `i` with max
/// index `M` becomes `i / M`; binaries pass through. The aggregate is the
/// mean of all 13 items.
pub fn encode_persona(p: &PersonaProfile) -> PersonaEncoding {
    let mut items: Vec<(String, f64)> = vec![
        ("age".into(), p.age as f64 / (AGE_CATEGORIES - 1) as f64),
        (
            "gender".into(),
            p.gender as f64 / (GENDER_CATEGORIES - 1) as f64,
        ),
        (
            "major".into(),
            p.major as f64 / (MAJOR_CATEGORIES - 1) as f64,
        ),
        (
            "education".into(),
            p.education as f64 / (EDUCATION_CATEGORIES - 1) as f64,
        ),
    ];
    let names = [
        "attitude",
        "exam_performance",
        "focus",
        "curiosity",
        "interest",
        "prior_knowledge",
        "compliance",
        "smartness",
        "family",
    ];
    for (name, value) in names.into_iter().zip(p.characteristics()) {
        items.push((name.into(), value as f64));
    }
    let aggregate = items.iter().map(|(_, v)| v).sum::<f64>() / items.len() as f64;
    PersonaEncoding { items, aggregate }
}

/// Renders a profile as one attribute line per item, 13 lines total, using
/// the fixed positive/negative phrase for each characteristic.
pub fn render_persona_text(p: &PersonaProfile) -> String {
    let mut lines = vec![
        format!("Age: {}", AGE_ITEMS[p.age as usize]),
        format!("Gender: {}", GENDER_ITEMS[p.gender as usize]),
        format!("Major: {}", MAJOR_ITEMS[p.major as usize]),
        format!("Education Level: {}", EDUCATION_ITEMS[p.education as usize]),
    ];
    for ((label, positive, negative), value) in
        CHARACTERISTIC_ITEMS.into_iter().zip(p.characteristics())
    {
        let phrase = if value == 1 { positive } else { negative };
        lines.push(format!("{label}: {phrase}"));
    }
    lines.join("\n")
}

/// Inverse of [`render_persona_text`]: recovers the profile from its
/// rendered attribute lines. Used by the deterministic mock provider, which
/// may only rely on information present in the prompt.
pub fn parse_persona_text(text: &str) -> Result<PersonaProfile, PersonaError> {
    let mut profile = PersonaProfile::minimum();
    let mut seen = 0usize;
    for raw_line in text.lines() {
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((label, phrase)) = line.split_once(": ") else {
            return Err(PersonaError::UnrecognizedLine(line.into()));
        };
        let assign_category =
            |items: &[&str], phrase: &str| items.iter().position(|i| *i == phrase).map(|i| i as u8);
        let matched = match label {
            "Age" => assign_category(&AGE_ITEMS, phrase).map(|v| profile.age = v),
            "Gender" => assign_category(&GENDER_ITEMS, phrase).map(|v| profile.gender = v),
            "Major" => assign_category(&MAJOR_ITEMS, phrase).map(|v| profile.major = v),
            "Education Level" => {
                assign_category(&EDUCATION_ITEMS, phrase).map(|v| profile.education = v)
            }
            _ => {
                let slot = CHARACTERISTIC_ITEMS
                    .iter()
                    .position(|(item_label, _, _)| *item_label == label);
                match slot {
                    Some(i) => {
                        let (_, positive, negative) = CHARACTERISTIC_ITEMS[i];
                        let value = if phrase == positive {
                            1
                        } else if phrase == negative {
                            0
                        } else {
                            return Err(PersonaError::UnrecognizedLine(line.into()));
                        };
                        let fields: [&mut u8; CHARACTERISTIC_COUNT] = [
                            &mut profile.attitude,
                            &mut profile.exam_performance,
                            &mut profile.focus,
                            &mut profile.curiosity,
                            &mut profile.interest,
                            &mut profile.prior_knowledge,
                            &mut profile.compliance,
                            &mut profile.smartness,
                            &mut profile.family,
                        ];
                        *fields[i] = value;
                        Some(())
                    }
                    None => return Err(PersonaError::UnrecognizedLine(line.into())),
                }
            }
        };
        if matched.is_none() {
            return Err(PersonaError::UnrecognizedLine(line.into()));
        }
        seen += 1;
    }
    if seen != 13 {
        return Err(PersonaError::UnrecognizedLine(format!(
            "expected 13 attribute lines, found {seen}"
        )));
    }
    Ok(profile)
}
