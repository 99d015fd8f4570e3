//! Iterated Vitali-type greedy covering of an interval family: each round
//! repeatedly selects the largest remaining interval and defers everything
//! whose 100-fold dilation meets the selection's; deferred intervals feed
//! the next round. Within a round the 100-dilations are pairwise disjoint,
//! and the round measures satisfy |B̄_l| >= (1/500) Σ_{r>=l} |B̄_r| whenever
//! the input intervals are pairwise disjoint.

use crate::dyadic::{DyadicInterval, Side, TorusArc};

pub const COVER_DILATION: u64 = 100;

#[derive(Clone, Debug)]
pub struct CoverRounds {
    pub input: Vec<DyadicInterval>,
    /// Selected interval indices per round, in selection order.
    pub rounds: Vec<Vec<usize>>,
    /// 1-based round number for every input interval.
    pub assignment: Vec<u32>,
}

impl CoverRounds {
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    /// |B̄_r| as an exact merged-union measure.
    pub fn round_measure(&self, round: usize) -> f64 {
        let ref_level = max_level(&self.input);
        let unit = (0.5f64).powi(ref_level as i32);
        let mut ranges: Vec<(u64, u64)> = self.rounds[round]
            .iter()
            .map(|&i| {
                let iv = &self.input[i];
                let start = iv.index << (ref_level - iv.level);
                (start, start + (1u64 << (ref_level - iv.level)))
            })
            .collect();
        ranges.sort_unstable();
        let mut total = 0u64;
        let mut cur: Option<(u64, u64)> = None;
        for (a, b) in ranges {
            match cur {
                Some((s, e)) if a <= e => cur = Some((s, e.max(b))),
                Some((s, e)) => {
                    total += e - s;
                    cur = Some((a, b));
                }
                None => cur = Some((a, b)),
            }
        }
        if let Some((s, e)) = cur {
            total += e - s;
        }
        total as f64 * unit
    }
}

fn max_level(intervals: &[DyadicInterval]) -> u32 {
    intervals.iter().map(|i| i.level).max().unwrap_or(0)
}

/// Run the greedy algorithm. Ties among equal lengths break to the leftmost
/// interval, then to input order.
pub fn greedy_cover(intervals: &[DyadicInterval]) -> CoverRounds {
    debug_assert!(intervals.iter().all(|i| i.side == Side::Space));
    let n = intervals.len();
    let ref_level = max_level(intervals);
    let arcs: Vec<TorusArc> = intervals
        .iter()
        .map(|i| i.space_dilation_arc(COVER_DILATION, ref_level))
        .collect();
    let position = |i: usize| intervals[i].index << (ref_level - intervals[i].level);

    let mut assignment = vec![0u32; n];
    let mut rounds: Vec<Vec<usize>> = Vec::new();
    let mut pool: Vec<usize> = (0..n).collect();
    while !pool.is_empty() {
        let round_no = rounds.len() as u32 + 1;
        let mut selected = Vec::new();
        let mut deferred = Vec::new();
        let mut available = pool;
        while !available.is_empty() {
            let best_pos = (0..available.len())
                .min_by_key(|&p| {
                    let i = available[p];
                    (intervals[i].level, position(i), i)
                })
                .unwrap();
            let best = available.swap_remove(best_pos);
            assignment[best] = round_no;
            selected.push(best);
            available.retain(|&i| {
                if arcs[i].overlaps(&arcs[best]) {
                    deferred.push(i);
                    false
                } else {
                    true
                }
            });
        }
        deferred.sort_unstable();
        rounds.push(selected);
        pool = deferred;
    }
    CoverRounds { input: intervals.to_vec(), rounds, assignment }
}

#[derive(Clone, Debug)]
pub struct RoundInequalityReport {
    /// min over l of |B̄_l| / Σ_{r >= l} |B̄_r|
    pub min_ratio: f64,
    pub ratios: Vec<f64>,
}

/// Evaluate the round inequality; for disjoint inputs the minimum ratio is
/// guaranteed >= 1/500 and callers assert exactly that.
pub fn check_round_inequality(cover: &CoverRounds) -> RoundInequalityReport {
    let p = cover.round_count();
    let measures: Vec<f64> = (0..p).map(|r| cover.round_measure(r)).collect();
    let mut suffix = vec![0.0f64; p + 1];
    for r in (0..p).rev() {
        suffix[r] = suffix[r + 1] + measures[r];
    }
    let ratios: Vec<f64> = (0..p).map(|l| measures[l] / suffix[l]).collect();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    RoundInequalityReport { min_ratio, ratios }
}

/// Σ_J |J|^(1/2) |100J ∩ G|^(1/2) divided by |Ī|^(1/2) |100Ī ∩ G|^(1/2),
/// for an antichain of intervals and a sample set G on the 2^m grid.
/// Returns 0 when G misses the whole 100-enlargement.
pub fn msum_ratio(intervals: &[DyadicInterval], g_mask: &[bool], m: u32) -> f64 {
    assert_eq!(g_mask.len(), 1usize << m);
    if intervals.is_empty() {
        return 0.0;
    }
    let n = 1usize << m;
    let inv_n = 1.0 / n as f64;
    let mut covered = vec![false; n];
    let mut lhs = 0.0;
    let mut union_measure = 0.0;
    for iv in intervals {
        debug_assert!(iv.level <= m);
        let arc = iv.space_dilation_arc(COVER_DILATION, m);
        let mut g_count = 0usize;
        arc.for_each_sample(m, |i| {
            covered[i] = true;
            g_count += g_mask[i] as usize;
        });
        lhs += iv.measure().sqrt() * (g_count as f64 * inv_n).sqrt();
        union_measure += iv.measure();
    }
    let g_in_union = covered
        .iter()
        .zip(g_mask)
        .filter(|(&c, &g)| c && g)
        .count() as f64
        * inv_n;
    if g_in_union == 0.0 {
        return 0.0;
    }
    lhs / (union_measure.sqrt() * g_in_union.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random antichain of disjoint dyadic intervals (DFS with stop/skip).
    pub(crate) fn random_disjoint_family(
        max_level: u32,
        seed: u64,
        cap: usize,
    ) -> Vec<DyadicInterval> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        let mut stack = vec![(0u32, 0u64)];
        while let Some((level, index)) = stack.pop() {
            if out.len() >= cap {
                break;
            }
            let roll: f64 = rng.gen();
            if level == max_level || roll < 0.25 {
                if roll < 0.85 {
                    out.push(DyadicInterval::space(level, index));
                }
            } else if roll < 0.9 {
                stack.push((level + 1, 2 * index));
                stack.push((level + 1, 2 * index + 1));
            }
            // else: skip this cell entirely
        }
        out
    }

    #[test]
    fn empty_input_gives_zero_rounds() {
        let cover = greedy_cover(&[]);
        assert_eq!(cover.round_count(), 0);
    }

    #[test]
    fn separated_intervals_share_one_round() {
        // level-10 cells at thirds: 100-dilations have width ~0.195 < 1/3
        let intervals = vec![
            DyadicInterval::space(10, 0),
            DyadicInterval::space(10, 341),
            DyadicInterval::space(10, 682),
        ];
        let cover = greedy_cover(&intervals);
        assert_eq!(cover.round_count(), 1);
        assert_eq!(cover.rounds[0].len(), 3);
        let report = check_round_inequality(&cover);
        assert!((report.min_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_intervals_stack_into_singleton_rounds() {
        let iv = DyadicInterval::space(8, 17);
        let cover = greedy_cover(&[iv, iv, iv]);
        assert_eq!(cover.round_count(), 3);
        for r in &cover.rounds {
            assert_eq!(r.len(), 1);
        }
        // ratio at l = 1 is 1/3, fine against 1/500
        let report = check_round_inequality(&cover);
        assert!((report.ratios[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn adjacent_equal_cells_split_by_leftmost_rule() {
        let a = DyadicInterval::space(7, 0);
        let b = DyadicInterval::space(7, 1);
        let cover = greedy_cover(&[b, a]);
        assert_eq!(cover.round_count(), 2);
        assert_eq!(cover.rounds[0], vec![1]); // input index of a
        assert_eq!(cover.rounds[1], vec![0]);
        let report = check_round_inequality(&cover);
        // hand measure sums: |B̄_1| = |B̄_2| = 2^-7
        assert!((report.ratios[0] - 0.5).abs() < 1e-12);
        assert!((report.ratios[1] - 1.0).abs() < 1e-12);
        assert!((report.min_ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rounds_partition_and_dilations_are_disjoint_within_rounds() {
        for seed in 0..40u64 {
            let family = random_disjoint_family(10, seed, 256);
            let cover = greedy_cover(&family);
            // partition
            let total: usize = cover.rounds.iter().map(|r| r.len()).sum();
            assert_eq!(total, family.len());
            assert!(cover.assignment.iter().all(|&r| r >= 1));
            // within-round disjointness of 100-dilations
            let ref_level = family.iter().map(|i| i.level).max().unwrap_or(0);
            for round in &cover.rounds {
                for (a_pos, &a) in round.iter().enumerate() {
                    for &b in &round[a_pos + 1..] {
                        let arc_a = family[a].space_dilation_arc(100, ref_level);
                        let arc_b = family[b].space_dilation_arc(100, ref_level);
                        assert!(!arc_a.overlaps(&arc_b));
                    }
                }
            }
            if !family.is_empty() {
                let report = check_round_inequality(&cover);
                assert!(
                    report.min_ratio >= 1.0 / 500.0,
                    "seed {seed}: min ratio {}",
                    report.min_ratio
                );
            }
        }
    }

    #[test]
    fn msum_single_interval_is_one() {
        let m = 10;
        let g = vec![true; 1 << m];
        let intervals = vec![DyadicInterval::space(8, 3)];
        let ratio = msum_ratio(&intervals, &g, m);
        assert!((ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn msum_with_disjoint_dilations_obeys_cauchy_schwarz() {
        let m = 12;
        let intervals = vec![
            DyadicInterval::space(12, 0),
            DyadicInterval::space(12, 1365),
            DyadicInterval::space(12, 2730),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g: Vec<bool> = (0..1usize << m).map(|_| rng.gen_bool(0.5)).collect();
        let ratio = msum_ratio(&intervals, &g, m);
        assert!(ratio <= 1.0 + 1e-12, "ratio {ratio}");
    }

    #[test]
    fn msum_empty_g_returns_zero() {
        let m = 10;
        let g = vec![false; 1 << m];
        let intervals = vec![DyadicInterval::space(8, 3)];
        assert_eq!(msum_ratio(&intervals, &g, m), 0.0);
    }
}
