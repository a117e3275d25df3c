//! Seeded inputs shared by the benchmarks.

use oro_core::experiments::{build_budgets, generate_random_lp};
use oro_core::{Dataset, NominalLp, OrlpProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// A bounded feasible LP: `Ax ≤ b` with `b > 0` so the origin is feasible.
pub fn random_lp(cols: usize, rows: usize, seed: u64) -> NominalLp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..cols).map(|_| -rng.gen_range(0.0..1.0)).collect();
    let mut lp = NominalLp::new(c).with_bounds(vec![0.0; cols], vec![10.0; cols]);
    for _ in 0..rows {
        let a: Vec<f64> = (0..cols).map(|_| rng.gen_range(-0.2..1.0)).collect();
        lp = lp.with_ineq(a, rng.gen_range(1.0..5.0));
    }
    lp
}

/// The downscaled random family at budgets `(k, r)`.
pub fn orlp_instance(n: usize, rows: usize, k: f64, r: f64, seed: u64) -> OrlpProblem {
    build_budgets(&generate_random_lp(seed, n, rows, 0.1), k, r)
}

/// Two Gaussian-ish clouds around `(±1, 0, …)` with labels `±1`.
pub fn classification(samples: usize, features: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(samples);
    let mut y = Vec::with_capacity(samples);
    for i in 0..samples {
        let label = if i % 2 == 0 { 1.0 } else { -1.0 };
        let row: Vec<f64> =
            (0..features).map(|j| if j == 0 { label } else { 0.0 } + rng.gen_range(-1.0..1.0)).collect();
        x.push(row);
        y.push(label);
    }
    Dataset::new(x, y).expect("valid dataset")
}
