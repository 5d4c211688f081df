//! Shared fixtures for the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoshell::{CandidateSolution, DoseVector, Feasibility, ObjectiveVector};

/// Seeded dose vector on [0, 100] for the dose-score benchmarks.
pub fn seeded_doses(len: usize, exponent: f64, seed: u64) -> DoseVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let doses: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..=100.0)).collect();
    DoseVector::new(doses, exponent).expect("bench doses are valid")
}

/// Seeded biobjective points along a noisy tradeoff curve; roughly half
/// survive an exact antichain prune.
pub fn tradeoff_points(count: usize, seed: u64) -> Vec<CandidateSolution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t: f64 = rng.gen();
            let noise: f64 = rng.gen_range(-0.2..=0.2);
            CandidateSolution {
                x: vec![t],
                fx: ObjectiveVector::new(vec![t, 1.0 - t + noise]).expect("finite image"),
                feasibility: Feasibility::Unevaluated,
                violation: 0.0,
            }
        })
        .collect()
}
