//! Seeded instance builders shared by the criterion benchmarks.

use lacuna_core::dyadic::DyadicInterval;
use lacuna_core::lacunary::{FrequencySelector, LacunarySequence};
use lacuna_core::GridFunction;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bench_grid(m: u32, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..1usize << m)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    GridFunction::from_samples(m, samples).expect("valid grid")
}

pub fn bench_indicator(m: u32, s: u32) -> GridFunction {
    let n = 1usize << m;
    let mut mask = vec![false; n];
    for b in mask.iter_mut().take(n >> s) {
        *b = true;
    }
    GridFunction::indicator(m, &mask).expect("valid mask")
}

pub fn bench_selector(m: u32, seed: u64) -> FrequencySelector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = LacunarySequence::new(2, (m - 2) as usize)
        .expect("alpha 2")
        .values();
    FrequencySelector::from_values(
        m,
        (0..1usize << m)
            .map(|_| values[rng.gen_range(0..values.len())])
            .collect(),
    )
    .expect("valid selector")
}

/// Random antichain of disjoint dyadic intervals for covering benches.
pub fn bench_intervals(max_level: u32, cap: usize, seed: u64) -> Vec<DyadicInterval> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut stack = vec![(0u32, 0u64)];
    while let Some((level, index)) = stack.pop() {
        if out.len() >= cap {
            break;
        }
        let roll: f64 = rng.gen();
        if level == max_level || roll < 0.22 {
            if roll < 0.85 {
                out.push(DyadicInterval::space(level, index));
            }
        } else if roll < 0.92 {
            stack.push((level + 1, 2 * index));
            stack.push((level + 1, 2 * index + 1));
        }
    }
    out
}
