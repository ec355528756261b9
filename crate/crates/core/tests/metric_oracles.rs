//! Definition-level oracles for the metric functions.
//!
//! Each oracle below is written straight from the quantity's definition with
//! naive loops, independent of the library's implementation, and both are
//! compared on random instances.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use studentsim::metrics::{cognitive_mae, fixing_rate, following_rate, pearson, sequence_entropy};
use studentsim::model::{AoiId, BehaviorRecord, CognitiveStateVector};

const INSTANCES: u64 = 1000;
const TOLERANCE: f64 = 1e-9;

fn brute_entropy(sequence: &[Option<AoiId>]) -> f64 {
    let present: Vec<AoiId> = sequence.iter().filter_map(|v| *v).collect();
    if present.is_empty() {
        return 0.0;
    }
    let mut distinct: Vec<AoiId> = Vec::new();
    for v in &present {
        if !distinct.contains(v) {
            distinct.push(*v);
        }
    }
    let mut h = 0.0;
    for v in distinct {
        let count = present.iter().filter(|x| **x == v).count();
        let p = count as f64 / present.len() as f64;
        h -= p * p.log2();
    }
    h
}

fn brute_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.iter().all(|v| *v == x[0]) || y.iter().all(|v| *v == y[0]) {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let dx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let dy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    Some(num / (dx.sqrt() * dy.sqrt()))
}

fn brute_following(sequence: &[Option<AoiId>], pace: &[AoiId]) -> f64 {
    let mut hits = 0usize;
    for i in 0..sequence.len() {
        if let Some(s) = sequence[i] {
            if s == pace[i] {
                hits += 1;
            }
        }
    }
    hits as f64 / sequence.len() as f64
}

fn brute_fixing(sequence: &[Option<AoiId>]) -> f64 {
    let mut hits = 0usize;
    for i in 1..sequence.len() {
        if let (Some(prev), Some(cur)) = (sequence[i - 1], sequence[i]) {
            if prev == cur {
                hits += 1;
            }
        }
    }
    hits as f64 / (sequence.len() - 1) as f64
}

fn brute_mae(agent: &[BehaviorRecord], truth: &[BehaviorRecord]) -> [f64; 6] {
    let mut sums = [0.0; 6];
    for (a, t) in agent.iter().zip(truth) {
        let ac = a.cognitive.components();
        let tc = t.cognitive.components();
        for i in 0..6 {
            let d = ac[i] - tc[i];
            sums[i] += if d < 0.0 { -d } else { d };
        }
    }
    sums.map(|s| s / agent.len() as f64)
}

fn random_sequence(rng: &mut ChaCha8Rng, len: usize, k: u32) -> Vec<Option<AoiId>> {
    (0..len)
        .map(|_| {
            if rng.gen::<f64>() < 0.1 {
                None
            } else {
                Some(rng.gen_range(1..=k))
            }
        })
        .collect()
}

#[test]
fn entropy_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..INSTANCES {
        let len = rng.gen_range(2..=50);
        let k = rng.gen_range(1..=8);
        let seq = random_sequence(&mut rng, len, k);
        let fast = sequence_entropy(&seq);
        let brute = brute_entropy(&seq);
        assert!(
            (fast - brute).abs() < TOLERANCE,
            "{seq:?}: {fast} vs {brute}"
        );
    }
}

#[test]
fn pearson_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for i in 0..INSTANCES {
        let len = rng.gen_range(2..=50);
        let constant = i % 17 == 0;
        let x: Vec<f64> = (0..len)
            .map(|_| {
                if constant {
                    0.25
                } else {
                    rng.gen_range(-3.0..3.0)
                }
            })
            .collect();
        let y: Vec<f64> = (0..len).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let fast = pearson(&x, &y).unwrap();
        let brute = brute_pearson(&x, &y);
        match (fast, brute) {
            (None, None) => {}
            (Some(a), Some(b)) => assert!((a - b).abs() < TOLERANCE, "{a} vs {b}"),
            other => panic!("definedness disagrees: {other:?}"),
        }
    }
}

#[test]
fn following_rate_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..INSTANCES {
        let len = rng.gen_range(2..=50);
        let k = rng.gen_range(1..=6);
        let seq = random_sequence(&mut rng, len, k);
        let pace: Vec<AoiId> = (0..len).map(|_| rng.gen_range(1..=k)).collect();
        let fast = following_rate(&seq, &pace).unwrap();
        assert!((fast - brute_following(&seq, &pace)).abs() < TOLERANCE);
    }
}

#[test]
fn fixing_rate_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..INSTANCES {
        let len = rng.gen_range(2..=50);
        let k = rng.gen_range(1..=4);
        let seq = random_sequence(&mut rng, len, k);
        let fast = fixing_rate(&seq).unwrap();
        assert!((fast - brute_fixing(&seq)).abs() < TOLERANCE);
    }
}

fn random_record(rng: &mut ChaCha8Rng, slide: u32, transcript: u32) -> BehaviorRecord {
    BehaviorRecord {
        slide_index: slide,
        transcript_index: transcript,
        gaze_aoi: Some(rng.gen_range(1..=4)),
        motor_aoi: Some(rng.gen_range(1..=4)),
        cognitive: CognitiveStateVector::new(
            rng.gen(),
            rng.gen(),
            rng.gen(),
            rng.gen(),
            rng.gen(),
            rng.gen(),
        ),
    }
}

#[test]
fn cognitive_mae_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..INSTANCES {
        let len = rng.gen_range(2..=50);
        let agent: Vec<BehaviorRecord> = (0..len)
            .map(|i| random_record(&mut rng, 1, i + 1))
            .collect();
        let truth: Vec<BehaviorRecord> = (0..len)
            .map(|i| random_record(&mut rng, 1, i + 1))
            .collect();
        let fast = cognitive_mae(&agent, &truth).unwrap().components();
        let brute = brute_mae(&agent, &truth);
        for i in 0..6 {
            assert!((fast[i] - brute[i]).abs() < TOLERANCE);
        }
    }
}

#[test]
fn rates_are_invariant_under_aoi_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..300 {
        let len = rng.gen_range(2..=40);
        let k: u32 = rng.gen_range(2..=6);
        let seq = random_sequence(&mut rng, len, k);
        let pace: Vec<AoiId> = (0..len).map(|_| rng.gen_range(1..=k)).collect();

        // Random permutation of 1..=k applied consistently to both sequences.
        let mut perm: Vec<AoiId> = (1..=k).collect();
        for i in (1..perm.len()).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let relabel = |id: AoiId| perm[(id - 1) as usize];
        let seq2: Vec<Option<AoiId>> = seq.iter().map(|v| v.map(relabel)).collect();
        let pace2: Vec<AoiId> = pace.iter().map(|&v| relabel(v)).collect();

        assert_eq!(
            following_rate(&seq, &pace).unwrap(),
            following_rate(&seq2, &pace2).unwrap()
        );
        assert_eq!(fixing_rate(&seq).unwrap(), fixing_rate(&seq2).unwrap());
        assert!((sequence_entropy(&seq) - sequence_entropy(&seq2)).abs() < TOLERANCE);
    }
}

#[test]
fn replay_scores_and_summaries_stay_in_range_on_random_cohorts() {
    use studentsim::fixtures::{demo_lecture, demo_student_records};
    use studentsim::metrics::{behavior_summary, replay_scores};

    for seed in 0..20u64 {
        let lecture = demo_lecture(3 + (seed % 3) as u32, seed);
        let cohort = demo_student_records(&lecture, 3, seed);
        let other = demo_student_records(&lecture, 3, seed + 1000);
        for (agent, truth) in cohort.iter().zip(&other) {
            let truth = studentsim::dataset::StudentRecord {
                student_id: agent.student_id.clone(),
                ..truth.clone()
            };
            let scores = replay_scores(agent, &truth, &lecture).unwrap();
            for value in scores.metric_values() {
                assert!(value >= 0.0, "negative score {value}");
            }
            assert!((0.0..=1.0).contains(&scores.choice_similarity));
            assert!((0.0..=1.0).contains(&scores.accuracy_similarity));

            let summary = behavior_summary(agent, &lecture).unwrap();
            for slide in &summary.per_slide {
                assert!((0.0..=1.0).contains(&slide.gaze_following));
                assert!((0.0..=1.0).contains(&slide.motor_following));
                for rate in [
                    slide.gaze_fixing,
                    slide.motor_fixing,
                    slide.question_accuracy,
                ]
                .into_iter()
                .flatten()
                {
                    assert!((0.0..=1.0).contains(&rate));
                }
                assert!(slide.gaze_entropy >= 0.0 && slide.motor_entropy >= 0.0);
            }
        }
    }
}

#[test]
fn rates_stay_in_range_on_random_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..500 {
        let len = rng.gen_range(2..=50);
        let k = rng.gen_range(1..=6);
        let seq = random_sequence(&mut rng, len, k);
        let pace: Vec<AoiId> = (0..len).map(|_| rng.gen_range(1..=k)).collect();
        let f = following_rate(&seq, &pace).unwrap();
        let x = fixing_rate(&seq).unwrap();
        assert!((0.0..=1.0).contains(&f));
        assert!((0.0..=1.0).contains(&x));
        assert!(sequence_entropy(&seq) >= 0.0);
    }
}
