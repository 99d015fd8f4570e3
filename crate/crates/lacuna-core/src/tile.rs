//! The time-frequency tile lattice: area-one tiles P = [ω, I], the sets
//! E(P) cut out by a frequency selector, tile mass, dyadic mass bucketing,
//! and the greedy decomposition of a tile family into maximal trees.

use crate::dyadic::DyadicInterval;
use crate::error::CoreError;
use crate::lacunary::FrequencySelector;
use crate::util::ceil_log2;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Levels are clamped to [5, m-5] so adjoint supports never self-overlap
/// under torus wraparound and every bump is resolvable on the grid.
pub const MIN_TILE_LEVEL: u32 = 5;

pub fn max_tile_level(m: u32) -> u32 {
    m - 5
}

/// A tile [ω, I]: frequency and space cells at the same level k, so
/// |ω| · |I| = 2^k · 2^-k = 1 exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tile {
    pub omega: DyadicInterval,
    pub space: DyadicInterval,
}

impl Tile {
    pub fn new(level: u32, space_index: u64, freq_index: u64) -> Self {
        Tile {
            omega: DyadicInterval::frequency(level, freq_index),
            space: DyadicInterval::space(level, space_index),
        }
    }

    pub fn level(&self) -> u32 {
        debug_assert_eq!(self.omega.level, self.space.level);
        self.space.level
    }
}

/// Every tile with 5 <= level <= m-5 and ω ⊆ [0, N/2), ordered by
/// (level, space index, frequency index). Requires m >= 10.
pub fn all_tiles(m: u32) -> Result<Vec<Tile>, CoreError> {
    if m < 10 {
        return Err(CoreError::config(format!(
            "tile lattice needs m >= 10, got {m}"
        )));
    }
    let mut tiles = Vec::new();
    for level in MIN_TILE_LEVEL..=max_tile_level(m) {
        let space_count = 1u64 << level;
        let freq_count = 1u64 << (m - 1 - level);
        for space in 0..space_count {
            for freq in 0..freq_count {
                tiles.push(Tile::new(level, space, freq));
            }
        }
    }
    Ok(tiles)
}

/// E(P) = {x_i ∈ I_P : N(x_i) ∈ ω_P} as sorted sample indices.
pub fn e_set(tile: &Tile, selector: &FrequencySelector) -> Vec<usize> {
    tile.space
        .sample_range(selector.m())
        .filter(|&i| tile.omega.covers_freq(selector.value_at(i)))
        .collect()
}

pub fn e_count(tile: &Tile, selector: &FrequencySelector) -> usize {
    tile.space
        .sample_range(selector.m())
        .filter(|&i| tile.omega.covers_freq(selector.value_at(i)))
        .count()
}

/// Mass A(P) = |E(P)| / |I_P| ∈ [0, 1].
pub fn mass(tile: &Tile, selector: &FrequencySelector) -> f64 {
    let count = e_count(tile, selector) as u64;
    // count · 2^level / N, exact in f64 for the grid sizes in play
    ((count << tile.level()) as f64) / (1u64 << selector.m()) as f64
}

/// Buckets of the mass decomposition: bucket n holds 2^-n-1 < A(P) <= 2^-n;
/// zero-mass tiles land in the null bucket. Indices refer to the input slice.
#[derive(Clone, Debug, Default)]
pub struct MassPartition {
    pub buckets: BTreeMap<u32, Vec<usize>>,
    pub null_bucket: Vec<usize>,
}

/// Exact bucket index for mass count/2^denom_log2 (count >= 1):
/// n with 2^-n-1 < count/2^denom_log2 <= 2^-n.
pub fn mass_bucket(count: u64, denom_log2: u32) -> u32 {
    debug_assert!(count >= 1 && count <= 1u64 << denom_log2);
    denom_log2 - ceil_log2(count)
}

pub fn mass_partition(tiles: &[Tile], selector: &FrequencySelector) -> MassPartition {
    let mut out = MassPartition::default();
    for (idx, tile) in tiles.iter().enumerate() {
        let count = e_count(tile, selector) as u64;
        if count == 0 {
            out.null_bucket.push(idx);
        } else {
            let n = mass_bucket(count, selector.m() - tile.level());
            out.buckets.entry(n).or_default().push(idx);
        }
    }
    out
}

/// A tree: tiles whose frequency cells all contain the tree frequency.
#[derive(Clone, Debug)]
pub struct Tree {
    /// The common frequency c_l (left endpoint of the root tile's ω).
    pub freq: u64,
    /// Spatial interval of the root (largest) tile.
    pub top: DyadicInterval,
    pub tiles: Vec<Tile>,
}

/// Greedy maximal-tree decomposition: repeatedly take the unassigned tile
/// with the largest |I_P| (ties: lowest frequency index, then lowest space
/// index), set the tree frequency to the left endpoint of its ω, and absorb
/// every unassigned tile whose ω contains that frequency.
pub fn decompose_trees(family: &[Tile]) -> Vec<Tree> {
    let mut assigned = vec![false; family.len()];
    let mut trees = Vec::new();
    loop {
        let root = family
            .iter()
            .enumerate()
            .filter(|(i, _)| !assigned[*i])
            .min_by_key(|(_, t)| (t.level(), t.omega.index, t.space.index))
            .map(|(i, _)| i);
        let Some(root) = root else { break };
        let freq = family[root].omega.freq_left();
        let mut members = Vec::new();
        for (i, tile) in family.iter().enumerate() {
            if !assigned[i] && tile.omega.covers_freq(freq) {
                assigned[i] = true;
                members.push(*tile);
            }
        }
        trees.push(Tree { freq, top: family[root].space, tiles: members });
    }
    trees
}
