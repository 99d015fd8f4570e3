//! Level sets of the dyadic averages of |f|: for each k the antichain I_k of
//! maximal dyadic intervals with mean_I |f| > λ 2^-k, their unions, and the
//! exceptional set F_bad = {M|f| > λ/2} with its 1000-fold dilation.

use crate::dyadic::DyadicInterval;
use crate::error::CoreError;
use crate::grid::GridFunction;
use std::collections::HashSet;

/// Per-cell sums of |f| at every dyadic level, built by one bottom-up pass
/// of exact pairwise additions.
pub(crate) struct DyadicSums {
    m: u32,
    /// sums[level][index], level = 0..=m
    sums: Vec<Vec<f64>>,
}

impl DyadicSums {
    pub(crate) fn new(f: &GridFunction) -> Self {
        let m = f.m();
        let mut sums: Vec<Vec<f64>> = Vec::with_capacity(m as usize + 1);
        let finest: Vec<f64> = f.samples().iter().map(|z| z.norm()).collect();
        sums.push(finest);
        for _ in 0..m {
            let prev = sums.last().unwrap();
            let next: Vec<f64> = prev.chunks_exact(2).map(|c| c[0] + c[1]).collect();
            sums.push(next);
        }
        sums.reverse();
        Self { m, sums }
    }

    fn sum(&self, level: u32, index: u64) -> f64 {
        self.sums[level as usize][index as usize]
    }

    fn count(&self, level: u32) -> f64 {
        (1u64 << (self.m - level)) as f64
    }

    /// Maximal dyadic intervals with mean |f| > t: elements whose every
    /// strict ancestor fails, found top-down (ancestors are visited first).
    fn maximal_intervals(&self, t: f64) -> Vec<DyadicInterval> {
        let mut out = Vec::new();
        let mut stack = vec![(0u32, 0u64)];
        while let Some((level, index)) = stack.pop() {
            if self.sum(level, index) > t * self.count(level) {
                out.push(DyadicInterval::space(level, index));
            } else if level < self.m {
                // children pushed right-first so output stays sorted by position
                stack.push((level + 1, 2 * index + 1));
                stack.push((level + 1, 2 * index));
            }
        }
        out
    }
}

/// The collections I_0 .. I_k_max with membership structure for fast
/// containment/disjointness queries against the unions Ī_k.
#[derive(Clone, Debug)]
pub struct LevelSets {
    lambda: f64,
    m: u32,
    levels: Vec<Vec<DyadicInterval>>,
    /// prefix[k][i] = covered samples of Ī_k in [0, i)
    prefix: Vec<Vec<u32>>,
    elements: Vec<HashSet<(u32, u64)>>,
    k_max: u32,
}

impl LevelSets {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Smallest k with Ī_k = T, capped at m.
    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// The antichain I_k, k <= k_max.
    pub fn level(&self, k: u32) -> &[DyadicInterval] {
        &self.levels[k as usize]
    }

    pub fn levels(&self) -> &[Vec<DyadicInterval>] {
        &self.levels
    }

    fn covered_in(&self, k: u32, range: std::ops::Range<usize>) -> u32 {
        let p = &self.prefix[k as usize];
        p[range.end] - p[range.start]
    }

    /// Number of covered samples of Ī_k.
    pub fn union_count(&self, k: u32) -> u32 {
        *self.prefix[k as usize].last().unwrap()
    }

    pub fn union_measure(&self, k: u32) -> f64 {
        self.union_count(k) as f64 / (1u64 << self.m) as f64
    }

    pub fn union_is_full(&self, k: u32) -> bool {
        self.union_count(k) as usize == 1usize << self.m
    }

    pub fn union_contains_sample(&self, k: u32, i: usize) -> bool {
        self.prefix[k as usize][i + 1] > self.prefix[k as usize][i]
    }

    /// cell ⊆ Ī_k (as sample sets).
    pub fn union_contains_cell(&self, k: u32, cell: &DyadicInterval) -> bool {
        let range = cell.sample_range(self.m);
        let len = range.len() as u32;
        self.covered_in(k, range) == len
    }

    /// cell ∩ Ī_k = ∅.
    pub fn union_disjoint_from_cell(&self, k: u32, cell: &DyadicInterval) -> bool {
        self.covered_in(k, cell.sample_range(self.m)) == 0
    }

    /// Whether some single element I ∈ I_k contains the cell.
    pub fn has_element_containing(&self, k: u32, cell: &DyadicInterval) -> bool {
        let set = &self.elements[k as usize];
        let mut level = cell.level;
        let mut index = cell.index;
        loop {
            if set.contains(&(level, index)) {
                return true;
            }
            if level == 0 {
                return false;
            }
            level -= 1;
            index >>= 1;
        }
    }

    pub fn element_set(&self, k: u32) -> &HashSet<(u32, u64)> {
        &self.elements[k as usize]
    }
}

fn build_prefix(m: u32, intervals: &[DyadicInterval]) -> Vec<u32> {
    let n = 1usize << m;
    let mut mask = vec![false; n];
    for i in intervals {
        for s in i.sample_range(m) {
            mask[s] = true;
        }
    }
    let mut prefix = Vec::with_capacity(n + 1);
    let mut acc = 0u32;
    prefix.push(0);
    for b in mask {
        acc += b as u32;
        prefix.push(acc);
    }
    prefix
}

/// Compute the level sets of (f, λ). Requires 0 < λ < 1.
pub fn level_intervals(f: &GridFunction, lambda: f64) -> Result<LevelSets, CoreError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(CoreError::config(format!(
            "lambda = {lambda} must lie in (0, 1)"
        )));
    }
    let m = f.m();
    let sums = DyadicSums::new(f);
    let mut levels = Vec::new();
    let mut prefix = Vec::new();
    let mut elements = Vec::new();
    let mut k_max = m;
    for k in 0..=m {
        let t = lambda * (0.5f64).powi(k as i32);
        let intervals = sums.maximal_intervals(t);
        prefix.push(build_prefix(m, &intervals));
        elements.push(intervals.iter().map(|i| (i.level, i.index)).collect());
        let full = intervals.len() == 1 && intervals[0].level == 0;
        levels.push(intervals);
        if full {
            k_max = k;
            break;
        }
    }
    Ok(LevelSets { lambda, m, levels, prefix, elements, k_max })
}

/// F_bad = {M(|f|) > λ/2} (M = dyadic maximal function) as its maximal
/// dyadic components, with the union of their 1000-fold dilations.
#[derive(Clone, Debug)]
pub struct BadSet {
    pub threshold: f64,
    pub components: Vec<DyadicInterval>,
    pub mask: Vec<bool>,
    pub dilated_mask: Vec<bool>,
    pub dilated_is_full: bool,
}

impl BadSet {
    pub fn measure(&self) -> f64 {
        self.mask.iter().filter(|&&b| b).count() as f64 / self.mask.len() as f64
    }

    pub fn dilated_measure(&self) -> f64 {
        self.dilated_mask.iter().filter(|&&b| b).count() as f64 / self.dilated_mask.len() as f64
    }
}

pub const BAD_SET_DILATION: u64 = 1000;

pub fn f_bad(f: &GridFunction, lambda: f64) -> Result<BadSet, CoreError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(CoreError::config(format!(
            "lambda = {lambda} must lie in (0, 1)"
        )));
    }
    let m = f.m();
    let n = 1usize << m;
    let threshold = 0.5 * lambda;
    let components = DyadicSums::new(f).maximal_intervals(threshold);
    let mut mask = vec![false; n];
    for c in &components {
        for s in c.sample_range(m) {
            mask[s] = true;
        }
    }
    let mut dilated_mask = vec![false; n];
    let mut dilated_is_full = false;
    for c in &components {
        let arc = c.space_dilation_arc(BAD_SET_DILATION, m);
        if arc.is_full() {
            dilated_is_full = true;
        }
        arc.for_each_sample(m, |i| dilated_mask[i] = true);
    }
    if dilated_mask.iter().all(|&b| b) {
        dilated_is_full = true;
    }
    Ok(BadSet { threshold, components, mask, dilated_mask, dilated_is_full })
}

/// Dyadic Hardy-Littlewood maximal function: per sample, the sup of the
/// mean of |f| over the dyadic intervals containing it.
pub fn dyadic_maximal(f: &GridFunction) -> Vec<f64> {
    let m = f.m();
    let sums = DyadicSums::new(f);
    (0..1usize << m)
        .map(|i| {
            (0..=m)
                .map(|level| {
                    let idx = (i >> (m - level)) as u64;
                    sums.sum(level, idx) / sums.count(level)
                })
                .fold(0.0f64, f64::max)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_nonneg(m: u32, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridFunction::from_real(m, (0..1usize << m).map(|_| rng.gen_range(0.0..1.0)).collect())
            .unwrap()
    }

    fn prefix_indicator(m: u32, samples: usize) -> GridFunction {
        let mut mask = vec![false; 1 << m];
        for b in mask.iter_mut().take(samples) {
            *b = true;
        }
        GridFunction::indicator(m, &mask).unwrap()
    }

    /// Enumerate every dyadic interval and keep the maximal elements: the
    /// independent oracle for level_intervals.
    fn maximal_oracle(f: &GridFunction, t: f64) -> Vec<DyadicInterval> {
        let m = f.m();
        let mean = |level: u32, index: u64| -> f64 {
            let cell = DyadicInterval::space(level, index);
            let range = cell.sample_range(m);
            let len = range.len();
            range.map(|i| f.samples()[i].norm()).sum::<f64>() / len as f64
        };
        let mut out = Vec::new();
        for level in 0..=m {
            for index in 0..1u64 << level {
                if mean(level, index) <= t {
                    continue;
                }
                let mut has_qualifying_ancestor = false;
                for up in 0..level {
                    if mean(up, index >> (level - up)) > t {
                        has_qualifying_ancestor = true;
                        break;
                    }
                }
                if !has_qualifying_ancestor {
                    out.push(DyadicInterval::space(level, index));
                }
            }
        }
        out
    }

    #[test]
    fn full_torus_indicator_has_root_level_set() {
        let f = GridFunction::constant(5, Complex64::new(1.0, 0.0));
        let ls = level_intervals(&f, 0.5).unwrap();
        assert_eq!(ls.level(0), &[DyadicInterval::space(0, 0)]);
        assert_eq!(ls.k_max(), 0);
    }

    #[test]
    fn eighth_indicator_levels() {
        // f = χ_[0,1/8), λ = 1/2: I_0 = {[0,1/8)}, I_1 = {[0,1/4)}
        let f = prefix_indicator(6, 8);
        let ls = level_intervals(&f, 0.5).unwrap();
        assert_eq!(ls.level(0), &[DyadicInterval::space(3, 0)]);
        assert_eq!(ls.level(1), &[DyadicInterval::space(2, 0)]);
    }

    #[test]
    fn zero_function_has_empty_levels() {
        let f = GridFunction::zeros(6);
        let ls = level_intervals(&f, 0.5).unwrap();
        assert_eq!(ls.k_max(), 6);
        for k in 0..=6 {
            assert!(ls.level(k).is_empty());
            assert_eq!(ls.union_count(k), 0);
        }
    }

    #[test]
    fn lambda_range_is_enforced() {
        let f = GridFunction::zeros(5);
        assert!(level_intervals(&f, 0.0).is_err());
        assert!(level_intervals(&f, 1.0).is_err());
        assert!(level_intervals(&f, -0.3).is_err());
    }

    #[test]
    fn levels_match_enumeration_oracle() {
        for seed in [1u64, 2, 3] {
            let f = random_nonneg(7, seed);
            let lambda = 0.6;
            let ls = level_intervals(&f, lambda).unwrap();
            for k in 0..=ls.k_max() {
                let t = lambda * (0.5f64).powi(k as i32);
                let mut got = ls.level(k).to_vec();
                let mut oracle = maximal_oracle(&f, t);
                got.sort();
                oracle.sort();
                assert_eq!(got, oracle, "seed {seed}, k = {k}");
            }
        }
    }

    #[test]
    fn unions_are_nested_and_antichains_hold() {
        let f = random_nonneg(8, 9);
        let ls = level_intervals(&f, 0.35).unwrap();
        for k in 0..ls.k_max() {
            // nesting Ī_k ⊆ Ī_{k+1}
            for i in ls.level(k) {
                assert!(ls.union_contains_cell(k + 1, i));
            }
            // antichain within I_k
            let level = ls.level(k);
            for a in level {
                for b in level {
                    if a != b {
                        assert!(!a.contains(b) && !b.contains(a));
                    }
                }
            }
            // parent of each element fails the strict inequality
            let t = 0.35 * (0.5f64).powi(k as i32);
            let sums = DyadicSums::new(&f);
            for i in level {
                if let Some(p) = i.parent() {
                    assert!(sums.sum(p.level, p.index) <= t * sums.count(p.level));
                }
            }
        }
    }

    #[test]
    fn bad_set_of_zero_is_empty() {
        let f = GridFunction::zeros(6);
        let bad = f_bad(&f, 0.5).unwrap();
        assert!(bad.components.is_empty());
        assert_eq!(bad.measure(), 0.0);
        assert!(!bad.dilated_is_full);
    }

    #[test]
    fn bad_set_contains_the_support() {
        // M(χ_F) = 1 > λ/2 on F itself
        let f = prefix_indicator(6, 16);
        let bad = f_bad(&f, 0.25).unwrap();
        for i in 0..16 {
            assert!(bad.mask[i], "sample {i}");
        }
    }

    #[test]
    fn bad_set_matches_ancestor_scan_oracle() {
        let f = random_nonneg(7, 21);
        let lambda = 0.9;
        let bad = f_bad(&f, lambda).unwrap();
        let maximal = dyadic_maximal(&f);
        for i in 0..f.len() {
            assert_eq!(bad.mask[i], maximal[i] > lambda / 2.0, "sample {i}");
        }
    }

    #[test]
    fn level_shell_bound_holds_exactly() {
        // x ∈ Ī_l \ Ī_{l-1} forces |f(x)| <= 2^{-l+1} λ (the single-sample cell
        // containing x fails the level-(l-1) inequality).
        let f = random_nonneg(7, 5);
        let lambda = 0.8;
        let ls = level_intervals(&f, lambda).unwrap();
        for l in 1..=ls.k_max() {
            for i in 0..f.len() {
                if ls.union_contains_sample(l, i) && !ls.union_contains_sample(l - 1, i) {
                    assert!(f.samples()[i].norm() <= lambda * (0.5f64).powi(l as i32 - 1));
                }
            }
        }
    }

    #[test]
    fn level_shell_vanishing_for_indicators() {
        // dyadic I ⊆ Ī_{k+1} with I ∩ Ī_k = ∅ carries no mass of F
        let mut mask = vec![false; 128];
        for b in mask.iter_mut().take(9) {
            *b = true;
        }
        mask[77] = true;
        let f = GridFunction::indicator(7, &mask).unwrap();
        let ls = level_intervals(&f, 0.7).unwrap();
        for k in 0..ls.k_max() {
            for level in 0..=7u32 {
                for index in 0..1u64 << level {
                    let cell = DyadicInterval::space(level, index);
                    if ls.union_contains_cell(k + 1, &cell)
                        && ls.union_disjoint_from_cell(k, &cell)
                    {
                        let f_count =
                            cell.sample_range(7).filter(|&i| mask[i]).count();
                        assert_eq!(f_count, 0);
                    }
                }
            }
        }
    }
}
