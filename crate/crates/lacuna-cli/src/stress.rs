//! Randomized stress corpus for the greedy covering: per instance, the round
//! partition, within-round dilation disjointness, the 1/500 round inequality,
//! and the msum ratio against a random sample set.

use crate::config::Config;
use crate::families::seeded_rng;
use crate::report::{fmt_f64, CsvTable};
use lacuna_core::dyadic::DyadicInterval;
use lacuna_core::{check_round_inequality, greedy_cover, msum_ratio};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Random antichain of disjoint dyadic intervals: DFS from the root with
/// stop / recurse / skip choices, truncated at `cap` intervals.
pub fn random_disjoint_family(
    max_level: u32,
    cap: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<DyadicInterval> {
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

#[derive(Debug, Clone, Serialize)]
pub struct StressRow {
    pub seed: u64,
    pub intervals: usize,
    pub rounds: usize,
    pub min_round_ratio: f64,
    pub msum_ratio: f64,
    pub partition_ok: bool,
    pub disjoint_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StressOutcome {
    pub schema_version: u32,
    pub instances: usize,
    pub worst_round_ratio: f64,
    pub max_msum_ratio: f64,
    pub failures: usize,
    pub rows: Vec<StressRow>,
}

fn run_instance(cfg: &Config, seed: u64) -> StressRow {
    let level = cfg.cover.level;
    let mut rng = seeded_rng(seed);
    let family = random_disjoint_family(level, cfg.cover.max_intervals, &mut rng);
    let cover = greedy_cover(&family);

    let assigned: usize = cover.rounds.iter().map(|r| r.len()).sum();
    let partition_ok = assigned == family.len();

    let ref_level = family.iter().map(|i| i.level).max().unwrap_or(0);
    let mut disjoint_ok = true;
    for round in &cover.rounds {
        for (pos, &a) in round.iter().enumerate() {
            for &b in &round[pos + 1..] {
                let arc_a = family[a].space_dilation_arc(100, ref_level);
                let arc_b = family[b].space_dilation_arc(100, ref_level);
                if arc_a.overlaps(&arc_b) {
                    disjoint_ok = false;
                }
            }
        }
    }

    let min_round_ratio = if family.is_empty() {
        1.0
    } else {
        check_round_inequality(&cover).min_ratio
    };

    let m = level.max(6);
    let g: Vec<bool> = {
        let mut rng = seeded_rng(seed ^ 0x6a5);
        (0..1usize << m).map(|_| rng.gen_bool(0.4)).collect()
    };
    let msum = msum_ratio(&family, &g, m);

    StressRow {
        seed,
        intervals: family.len(),
        rounds: cover.round_count(),
        min_round_ratio,
        msum_ratio: msum,
        partition_ok,
        disjoint_ok,
    }
}

/// Deterministic adversarial families: dense packings of equal cells (the
/// msum ratio approaches 10 as the packing grows) and a mixed two-scale
/// packing. All are antichains, so the round inequality still applies.
fn adversarial_families(cfg: &Config) -> Vec<(u64, Vec<DyadicInterval>)> {
    let level = cfg.cover.level;
    let cells = 1u64 << level;
    let mut out = Vec::new();
    for (tag, count) in [(1u64, 64usize), (2, 200), (3, 512)] {
        let count = count.min(cfg.cover.max_intervals).min(cells as usize);
        let family = (0..count as u64).map(|i| DyadicInterval::space(level, i)).collect();
        out.push((u64::MAX - tag, family));
    }
    if level >= 2 {
        let mut mixed: Vec<DyadicInterval> = Vec::new();
        let band = (cells / 8).max(1);
        for i in 0..band.min(100) {
            mixed.push(DyadicInterval::space(level, i));
        }
        for i in 0..(band / 2).min(50) {
            mixed.push(DyadicInterval::space(level - 1, band / 2 + 1 + i));
        }
        for i in 0..(band / 4).min(25) {
            mixed.push(DyadicInterval::space(level - 2, band / 2 + 1 + i));
        }
        mixed.truncate(cfg.cover.max_intervals);
        out.push((u64::MAX - 4, mixed));
    }
    out
}

fn run_family(cfg: &Config, seed: u64, family: Vec<DyadicInterval>) -> StressRow {
    let cover = greedy_cover(&family);
    let assigned: usize = cover.rounds.iter().map(|r| r.len()).sum();
    let partition_ok = assigned == family.len();
    let ref_level = family.iter().map(|i| i.level).max().unwrap_or(0);
    let mut disjoint_ok = true;
    for round in &cover.rounds {
        for (pos, &a) in round.iter().enumerate() {
            for &b in &round[pos + 1..] {
                let arc_a = family[a].space_dilation_arc(100, ref_level);
                let arc_b = family[b].space_dilation_arc(100, ref_level);
                if arc_a.overlaps(&arc_b) {
                    disjoint_ok = false;
                }
            }
        }
    }
    let min_round_ratio = if family.is_empty() {
        1.0
    } else {
        check_round_inequality(&cover).min_ratio
    };
    let m = cfg.cover.level.max(6);
    let g = vec![true; 1usize << m];
    let msum = msum_ratio(&family, &g, m);
    StressRow {
        seed,
        intervals: family.len(),
        rounds: cover.round_count(),
        min_round_ratio,
        msum_ratio: msum,
        partition_ok,
        disjoint_ok,
    }
}

pub fn run_stress(cfg: &Config) -> Result<StressOutcome, String> {
    let mut rows: Vec<StressRow> = (0..cfg.cover.instances as u64)
        .into_par_iter()
        .map(|i| run_instance(cfg, cfg.run.seed.wrapping_add(i)))
        .collect();
    for (seed, family) in adversarial_families(cfg) {
        rows.push(run_family(cfg, seed, family));
    }
    let worst_round_ratio = rows
        .iter()
        .map(|r| r.min_round_ratio)
        .fold(f64::INFINITY, f64::min);
    let max_msum_ratio = rows.iter().map(|r| r.msum_ratio).fold(0.0f64, f64::max);
    let failures = rows
        .iter()
        .filter(|r| !r.partition_ok || !r.disjoint_ok || r.min_round_ratio < 1.0 / 500.0)
        .count();
    Ok(StressOutcome {
        schema_version: 1,
        instances: rows.len(),
        worst_round_ratio,
        max_msum_ratio,
        failures,
        rows,
    })
}

pub fn stress_csv(out: &StressOutcome) -> CsvTable {
    let mut table = CsvTable::new(vec![
        "seed",
        "intervals",
        "rounds",
        "min_round_ratio",
        "msum_ratio",
        "partition_ok",
        "disjoint_ok",
    ]);
    for r in &out.rows {
        table.push(vec![
            r.seed.to_string(),
            r.intervals.to_string(),
            r.rounds.to_string(),
            fmt_f64(r.min_round_ratio),
            fmt_f64(r.msum_ratio),
            r.partition_ok.to_string(),
            r.disjoint_ok.to_string(),
        ]);
    }
    table
}
