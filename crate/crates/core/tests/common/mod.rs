#![allow(dead_code)]

use fdp::curve::TradeoffCurve;
use fdp::dist::DiscreteDistribution;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GRID: usize = 10_001;

/// Positive weights of a random law on `len` outcomes.
pub fn weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, len)
}

pub fn normalize(w: &[f64]) -> DiscreteDistribution {
    DiscreteDistribution::from_weights(w).unwrap()
}

/// A pair of random laws on a shared support of 2..=max outcomes.
pub fn pair(max: usize) -> impl Strategy<Value = (DiscreteDistribution, DiscreteDistribution)> {
    (2..=max).prop_flat_map(|n| (weights(n), weights(n))).prop_map(|(a, b)| (normalize(&a), normalize(&b)))
}

/// Row-stochastic `rows x cols` matrix.
pub fn kernel(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(weights(cols), rows)
        .prop_map(|m| m.into_iter().map(|r| normalize(&r).mass().to_vec()).collect())
}

/// Seeded random law with `n` outcomes, some of them possibly empty.
pub fn seeded_law(rng: &mut ChaCha8Rng, n: usize) -> DiscreteDistribution {
    let w: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.01..1.0) }).collect();
    if w.iter().all(|&x| x == 0.0) {
        return normalize(&vec![1.0; n]);
    }
    normalize(&w)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Worst violation of the trade-off function axioms on a uniform grid.
pub fn validity_violation(f: &TradeoffCurve, grid: usize) -> f64 {
    let h = 1.0 / (grid - 1) as f64;
    let v: Vec<f64> = (0..grid).map(|i| f.value(i as f64 * h)).collect();
    let mut worst: f64 = 0.0;
    for (i, &y) in v.iter().enumerate() {
        let a = i as f64 * h;
        worst = worst.max(y - (1.0 - a)).max(-y).max(y - 1.0);
    }
    for w in v.windows(2) {
        worst = worst.max(w[1] - w[0]);
    }
    for w in v.windows(3) {
        // midpoint convexity
        worst = worst.max(w[1] - 0.5 * (w[0] + w[2]));
    }
    worst
}
