//! Tile classification driven by the level sets of (f, λ): clustered tiles
//! near frequency zero, the per-scale families 𝔭²/𝔭¹ attached to the tiles
//! P_O sitting on level-set intervals, and the residual classes.
//!
//! The labeling is not a partition: a tile may carry one (k, P_O) label per
//! scale k, but never for more than 14 distinct k. Coverage (every tile
//! labeled) and the multiplicity bound are checked on the output.

use crate::dyadic::DyadicInterval;
use crate::error::CoreError;
use crate::grid::GridFunction;
use crate::lacunary::FrequencySelector;
use crate::levelset::{f_bad, level_intervals, BadSet, LevelSets};
use crate::tile::{decompose_trees, max_tile_level, Tile, MIN_TILE_LEVEL};
use serde::Serialize;
use std::collections::{BTreeMap, HashSet};

/// The 14 dyadic cells of length |I_P| at signed offsets -8..-2 and 2..8
/// from I_P (torus wraparound): the support of the adjoint piece T_P*.
pub fn i_star(tile: &Tile) -> [DyadicInterval; 14] {
    let level = tile.level();
    let size = 1i64 << level;
    let idx = tile.space.index as i64;
    let mut out = [tile.space; 14];
    for (slot, off) in (-8i64..=-2).chain(2..=8).enumerate() {
        out[slot] = DyadicInterval::space(level, (idx + off).rem_euclid(size) as u64);
    }
    out
}

/// Arm index r ∈ 1..=14 for a slot of `i_star`.
fn r_of_slot(slot: usize) -> u8 {
    slot as u8 + 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Label {
    Cluster,
    P2 { k: u32, p_o: DyadicInterval, r: u8 },
    P1 { k: u32, p_o: DyadicInterval, r: u8 },
    Residual { l: u32 },
}

/// Key of a (scale, level-set interval) group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GroupKey {
    pub k: u32,
    pub p_o: DyadicInterval,
}

/// Members of one group, as (tile index, arm r) pairs.
#[derive(Clone, Debug, Default)]
pub struct GroupMembers {
    pub p2: Vec<(usize, u8)>,
    pub p1: Vec<(usize, u8)>,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub alpha: u64,
    pub lambda: f64,
    pub level_sets: LevelSets,
    pub bad: BadSet,
    /// Per-tile label list, deterministic order.
    pub labels: Vec<Vec<Label>>,
    pub cluster: Vec<usize>,
    pub groups: BTreeMap<GroupKey, GroupMembers>,
    pub uncovered: Vec<usize>,
    pub max_k_multiplicity: usize,
}

impl Classification {
    /// Distinct scales k at which the tile belongs to some 𝔭¹/𝔭² family.
    pub fn k_multiplicity(&self, tile_idx: usize) -> usize {
        let mut ks = HashSet::new();
        for label in &self.labels[tile_idx] {
            match label {
                Label::P1 { k, .. } | Label::P2 { k, .. } => {
                    ks.insert(*k);
                }
                _ => {}
            }
        }
        ks.len()
    }

    /// Coverage and the 14-fold multiplicity bound; these are structural
    /// guarantees of the decomposition, so a violation is a hard failure at
    /// every call site.
    pub fn validate(&self) -> Result<(), CoreError> {
        if !self.uncovered.is_empty() {
            return Err(CoreError::CoverageGap {
                uncovered: self.uncovered.len(),
                total: self.labels.len(),
            });
        }
        if self.max_k_multiplicity > 14 {
            return Err(CoreError::MultiplicityExceeded { found: self.max_k_multiplicity });
        }
        Ok(())
    }

    pub fn residual_levels(&self, tile_idx: usize) -> Vec<u32> {
        self.labels[tile_idx]
            .iter()
            .filter_map(|l| match l {
                Label::Residual { l } => Some(*l),
                _ => None,
            })
            .collect()
    }
}

/// Classify every tile against (f, λ) and the selector.
///
/// Label rules:
/// * Cluster: 0 ∈ 10α·ω_P (half-open center dilation).
/// * P2(k, P_O, r) for separated P: some arm I_{P*}^r contains I_{P_O},
///   2ω_P ∩ 2ω_{P_O} = ∅, and every I ∈ I_{k+1} meeting that arm contains it;
///   P1 likewise with 2ω_P ∩ 2ω_{P_O} ≠ ∅.
/// * Residual(l), l >= 1: some arm sits inside a single element of I_l and
///   misses Ī_{l-1}; Residual(0): I_{P*} carries no mass of f, or lies in
///   the 1000-dilated bad set.
pub fn classify(
    tiles: &[Tile],
    f: &GridFunction,
    lambda: f64,
    alpha: u64,
    selector: &FrequencySelector,
) -> Result<Classification, CoreError> {
    let m = f.m();
    if selector.m() != m {
        return Err(CoreError::config("selector grid does not match f"));
    }
    let level_sets = level_intervals(f, lambda)?;
    let bad = f_bad(f, lambda)?;
    let k_max = level_sets.k_max();

    // prefix counts of supp f and of the dilated bad set
    let n = 1usize << m;
    let supp_prefix = prefix_of(n, |i| f.samples()[i].norm() > 0.0);
    let dilated_prefix = prefix_of(n, |i| bad.dilated_mask[i]);

    let istars: Vec<[DyadicInterval; 14]> = tiles.iter().map(i_star).collect();
    let mut labels: Vec<Vec<Label>> = vec![Vec::new(); tiles.len()];

    // Cluster tiles.
    let mut cluster = Vec::new();
    let mut is_cluster = vec![false; tiles.len()];
    for (idx, tile) in tiles.iter().enumerate() {
        if tile.omega.freq_dilation_contains_zero(10 * alpha) {
            labels[idx].push(Label::Cluster);
            cluster.push(idx);
            is_cluster[idx] = true;
        }
    }

    // Arm admissibility per scale k: an arm cell is ruled out when some
    // element of I_{k+1} sits strictly inside it.
    let mut blocked: Vec<HashSet<(u32, u64)>> = Vec::new();
    for k in 0..k_max {
        let mut set = HashSet::new();
        for element in level_sets.level(k + 1) {
            if element.level == 0 {
                continue;
            }
            let hi = (element.level - 1).min(max_tile_level(m));
            for lev in MIN_TILE_LEVEL..=hi {
                let anc = element.ancestor(lev);
                set.insert((anc.level, anc.index));
            }
        }
        blocked.push(set);
    }

    // 𝔭² / 𝔭¹ labels, grouped by (k, P_O). The families are defined only for
    // scales with Ī_k ≠ T; P_O must be a lattice tile, so its interval level
    // is clamped to [5, m-5].
    let mut groups: BTreeMap<GroupKey, GroupMembers> = BTreeMap::new();
    for k in 0..k_max {
        if level_sets.union_is_full(k) {
            continue;
        }
        for p_o_interval in level_sets.level(k) {
            if p_o_interval.level < MIN_TILE_LEVEL || p_o_interval.level > max_tile_level(m) {
                continue;
            }
            let p_o_omega = DyadicInterval::frequency(p_o_interval.level, 0);
            let key = GroupKey { k, p_o: *p_o_interval };
            let mut members = GroupMembers::default();
            for (idx, tile) in tiles.iter().enumerate() {
                if is_cluster[idx] || tile.level() > p_o_interval.level {
                    continue;
                }
                let arm = istars[idx].iter().enumerate().find(|(_, arm)| {
                    arm.contains(p_o_interval)
                        && !blocked[k as usize].contains(&(arm.level, arm.index))
                });
                let Some((slot, _)) = arm else { continue };
                let r = r_of_slot(slot);
                if tile.omega.freq_dilations_overlap(&p_o_omega, 2) {
                    labels[idx].push(Label::P1 { k, p_o: *p_o_interval, r });
                    members.p1.push((idx, r));
                } else {
                    labels[idx].push(Label::P2 { k, p_o: *p_o_interval, r });
                    members.p2.push((idx, r));
                }
            }
            groups.insert(key, members);
        }
    }

    // Residual labels.
    for idx in 0..tiles.len() {
        let arms = &istars[idx];
        let supp_free = arms
            .iter()
            .all(|a| count_in(&supp_prefix, a.sample_range(m)) == 0);
        let in_dilated_bad = arms
            .iter()
            .all(|a| count_in(&dilated_prefix, a.sample_range(m)) == a.sample_range(m).len());
        if supp_free || in_dilated_bad {
            labels[idx].push(Label::Residual { l: 0 });
        }
        for l in 1..=k_max {
            let qualifies = arms.iter().any(|a| {
                level_sets.has_element_containing(l, a)
                    && level_sets.union_disjoint_from_cell(l - 1, a)
            });
            if qualifies {
                labels[idx].push(Label::Residual { l });
            }
        }
    }

    let uncovered: Vec<usize> =
        (0..tiles.len()).filter(|&i| labels[i].is_empty()).collect();
    let mut classification = Classification {
        alpha,
        lambda,
        level_sets,
        bad,
        labels,
        cluster,
        groups,
        uncovered,
        max_k_multiplicity: 0,
    };
    classification.max_k_multiplicity = (0..tiles.len())
        .map(|i| classification.k_multiplicity(i))
        .max()
        .unwrap_or(0);
    Ok(classification)
}

fn prefix_of(n: usize, pred: impl Fn(usize) -> bool) -> Vec<u32> {
    let mut prefix = Vec::with_capacity(n + 1);
    let mut acc = 0u32;
    prefix.push(0);
    for i in 0..n {
        acc += pred(i) as u32;
        prefix.push(acc);
    }
    prefix
}

fn count_in(prefix: &[u32], range: std::ops::Range<usize>) -> usize {
    (prefix[range.end] - prefix[range.start]) as usize
}

/// Per-group small-oscillation products: for each 𝔭¹(k, P_O) family, the max
/// over its maximal trees of c_l · |I_{P_O}|. On this positive-frequency
/// lattice the product is provably < 2 (the tree root satisfies
/// 2ω_root ∩ 2ω_{P_O} ≠ ∅, so its left endpoint stays within 2/|I_{P_O}|).
pub fn small_oscillation_products(
    classification: &Classification,
    tiles: &[Tile],
) -> Vec<(GroupKey, f64)> {
    let mut out = Vec::new();
    for (key, members) in &classification.groups {
        if members.p1.is_empty() {
            continue;
        }
        let family: Vec<Tile> = members.p1.iter().map(|&(i, _)| tiles[i]).collect();
        let trees = decompose_trees(&family);
        let width = (0.5f64).powi(key.p_o.level as i32);
        let worst = trees
            .iter()
            .map(|t| t.freq as f64 * width)
            .fold(0.0f64, f64::max);
        out.push((*key, worst));
    }
    out
}
