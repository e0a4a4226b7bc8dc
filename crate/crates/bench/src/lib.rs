//! Shared fixtures for the benchmarks.

use ancient_core::{AncientSolution, SpectralMeasure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn random_solution(dim: usize, atoms: usize, seed: u64) -> AncientSolution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AncientSolution::new(SpectralMeasure::random(&mut rng, dim, atoms, 4.0)).expect("random measures are valid")
}

pub fn uniform(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}
