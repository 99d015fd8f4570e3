//! Exact dyadic intervals on the unit torus (space side) and on the integer
//! frequency axis, plus the torus-arc arithmetic used for center dilations.
//!
//! Space cell: [i 2^-k, (i+1) 2^-k) with i reduced mod 2^k.
//! Frequency cell: [i 2^k, (i+1) 2^k) in integer frequency units.
//! Dilations b·I are half-open about the center; positions are integers in
//! half-cell units so every geometric predicate is exact.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Space,
    Frequency,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub side: Side,
    pub level: u32,
    pub index: u64,
}

impl DyadicInterval {
    pub fn space(level: u32, index: u64) -> Self {
        let reduced = if level == 64 { index } else { index & ((1u64 << level) - 1) };
        Self { side: Side::Space, level, index: reduced }
    }

    pub fn frequency(level: u32, index: u64) -> Self {
        Self { side: Side::Frequency, level, index }
    }

    /// Space measure 2^-level.
    pub fn measure(&self) -> f64 {
        debug_assert_eq!(self.side, Side::Space);
        (0.5f64).powi(self.level as i32)
    }

    /// Integer frequency width 2^level.
    pub fn freq_width(&self) -> u64 {
        debug_assert_eq!(self.side, Side::Frequency);
        1u64 << self.level
    }

    /// Left endpoint of a frequency cell in integer units.
    pub fn freq_left(&self) -> u64 {
        debug_assert_eq!(self.side, Side::Frequency);
        self.index << self.level
    }

    /// Membership of an integer frequency in the half-open cell.
    pub fn covers_freq(&self, n: u64) -> bool {
        debug_assert_eq!(self.side, Side::Frequency);
        let left = self.freq_left();
        n >= left && n < left + self.freq_width()
    }

    /// Grid sample indices of a space cell at grid exponent m (level <= m).
    pub fn sample_range(&self, m: u32) -> std::ops::Range<usize> {
        debug_assert_eq!(self.side, Side::Space);
        debug_assert!(self.level <= m);
        let width = 1usize << (m - self.level);
        let start = self.index as usize * width;
        start..start + width
    }

    /// Dyadic containment (same side): self ⊇ other.
    pub fn contains(&self, other: &DyadicInterval) -> bool {
        debug_assert_eq!(self.side, other.side);
        self.level <= other.level && (other.index >> (other.level - self.level)) == self.index
    }

    /// Dyadic cells either nest or are disjoint; meeting = one contains the other.
    pub fn meets(&self, other: &DyadicInterval) -> bool {
        self.contains(other) || other.contains(self)
    }

    pub fn parent(&self) -> Option<DyadicInterval> {
        if self.level == 0 {
            return None;
        }
        Some(DyadicInterval {
            side: self.side,
            level: self.level - 1,
            index: self.index >> 1,
        })
    }

    /// Ancestor at the given coarser level.
    pub fn ancestor(&self, level: u32) -> DyadicInterval {
        debug_assert!(level <= self.level);
        DyadicInterval {
            side: self.side,
            level,
            index: self.index >> (self.level - level),
        }
    }

    /// Half-open bounds of the b-dilation of a frequency cell, in half-units
    /// (so positions are exact integers): [c - b|ω|/2, c + b|ω|/2).
    pub fn freq_dilated_bounds(&self, b: u64) -> (i64, i64) {
        debug_assert_eq!(self.side, Side::Frequency);
        let center2 = ((2 * self.index + 1) << self.level) as i64;
        let halfwidth2 = (b << self.level) as i64;
        (center2 - halfwidth2, center2 + halfwidth2)
    }

    /// Whether 0 lies in the half-open b-dilation of this frequency cell.
    pub fn freq_dilation_contains_zero(&self, b: u64) -> bool {
        let (lo, hi) = self.freq_dilated_bounds(b);
        lo <= 0 && 0 < hi
    }

    /// Whether the b-dilations of two frequency cells overlap.
    pub fn freq_dilations_overlap(&self, other: &DyadicInterval, b: u64) -> bool {
        let (l1, r1) = self.freq_dilated_bounds(b);
        let (l2, r2) = other.freq_dilated_bounds(b);
        l1 < r2 && l2 < r1
    }

    /// The b-dilation of a space cell as a torus arc in half-sample units at
    /// reference level `ref_level` >= self.level (modulus 2^(ref_level+1)).
    pub fn space_dilation_arc(&self, b: u64, ref_level: u32) -> TorusArc {
        debug_assert_eq!(self.side, Side::Space);
        debug_assert!(ref_level >= self.level);
        let unit = 1i64 << (ref_level - self.level);
        let modulus = 1i64 << (ref_level + 1);
        let center = (2 * self.index as i64 + 1) * unit;
        TorusArc::from_center_halfwidth(modulus, center, b as i64 * unit)
    }
}

/// Half-open arc [start, start+len) on the discrete circle Z/modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusArc {
    modulus: i64,
    start: i64,
    len: i64,
}

impl TorusArc {
    pub fn from_center_halfwidth(modulus: i64, center: i64, halfwidth: i64) -> Self {
        let len = (2 * halfwidth).min(modulus);
        let start = (center - halfwidth).rem_euclid(modulus);
        Self { modulus, start, len }
    }

    pub fn is_full(&self) -> bool {
        self.len >= self.modulus
    }

    pub fn len(&self) -> i64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn contains_point(&self, p: i64) -> bool {
        if self.is_full() {
            return true;
        }
        (p - self.start).rem_euclid(self.modulus) < self.len
    }

    /// Containment of a non-wrapping half-open range [start, start+len).
    pub fn contains_range(&self, start: i64, len: i64) -> bool {
        if self.is_full() {
            return true;
        }
        (start - self.start).rem_euclid(self.modulus) + len <= self.len
    }

    pub fn overlaps(&self, other: &TorusArc) -> bool {
        debug_assert_eq!(self.modulus, other.modulus);
        if self.is_empty() || other.is_empty() {
            return false;
        }
        if self.is_full() || other.is_full() {
            return true;
        }
        (other.start - self.start).rem_euclid(self.modulus) < self.len
            || (self.start - other.start).rem_euclid(self.modulus) < other.len
    }

    /// Visit grid samples (at exponent m) whose points fall in the arc; the
    /// arc must be in half-sample units (modulus 2^(m+1)).
    pub fn for_each_sample(&self, m: u32, mut visit: impl FnMut(usize)) {
        let n = 1i64 << m;
        debug_assert_eq!(self.modulus, 2 * n);
        if self.is_full() {
            for i in 0..n {
                visit(i as usize);
            }
            return;
        }
        // sample i sits at position 2i; first candidate is ceil(start/2)
        let first = (self.start + 1) / 2;
        let count = (self.start + self.len - 1) / 2 - first + 1;
        for k in 0..count.max(0) {
            visit(((first + k).rem_euclid(n)) as usize);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_sample_ranges() {
        let i = DyadicInterval::space(3, 5);
        assert_eq!(i.sample_range(6), 40..48);
        assert!((i.measure() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn index_reduction_mod_level() {
        let i = DyadicInterval::space(3, 13);
        assert_eq!(i.index, 5);
    }

    #[test]
    fn containment_and_meets() {
        let big = DyadicInterval::space(2, 1);
        let small = DyadicInterval::space(4, 7);
        assert!(big.contains(&small));
        assert!(!small.contains(&big));
        assert!(big.meets(&small) && small.meets(&big));
        let other = DyadicInterval::space(4, 9);
        assert!(!big.meets(&other));
    }

    #[test]
    fn frequency_cells() {
        let w = DyadicInterval::frequency(5, 3);
        assert_eq!(w.freq_left(), 96);
        assert_eq!(w.freq_width(), 32);
        assert!(w.covers_freq(96) && w.covers_freq(127) && !w.covers_freq(128));
    }

    #[test]
    fn zero_in_dilation_only_for_low_indices() {
        // half-open [c - b|ω|/2, c + b|ω|/2): 0 inside iff 2i+1 <= b
        let b = 20; // 10α with α = 2
        for (idx, expect) in [(0u64, true), (9, true), (10, false), (11, false)] {
            let w = DyadicInterval::frequency(4, idx);
            assert_eq!(w.freq_dilation_contains_zero(b), expect, "idx {idx}");
        }
        // 2ω contains 0 only for index 0
        assert!(DyadicInterval::frequency(6, 0).freq_dilation_contains_zero(2));
        assert!(!DyadicInterval::frequency(6, 1).freq_dilation_contains_zero(2));
    }

    #[test]
    fn freq_dilation_overlap() {
        let a = DyadicInterval::frequency(4, 0);
        let b = DyadicInterval::frequency(4, 1);
        let c = DyadicInterval::frequency(4, 5);
        assert!(a.freq_dilations_overlap(&b, 2));
        assert!(!a.freq_dilations_overlap(&c, 2));
        assert!(a.freq_dilations_overlap(&c, 20));
    }

    #[test]
    fn arcs_wrap_correctly() {
        let cell = DyadicInterval::space(5, 0);
        let arc = cell.space_dilation_arc(17, 5); // spans [c-8.5|I|, c+8.5|I|)
        assert!(!arc.is_full());
        assert!(arc.contains_point(2)); // sample 1 at position 2
        assert!(arc.contains_point((31 * 2) as i64)); // wraps to index 31
        assert!(!arc.contains_point((16 * 2) as i64)); // opposite side

        let full = cell.space_dilation_arc(100, 5);
        assert!(full.is_full());
    }

    #[test]
    fn arc_sample_enumeration_matches_membership() {
        let cell = DyadicInterval::space(4, 14);
        let arc = cell.space_dilation_arc(7, 6);
        let mut got = vec![];
        arc.for_each_sample(6, |i| got.push(i));
        let expect: Vec<usize> =
            (0..64).filter(|&i| arc.contains_point(2 * i as i64)).collect();
        let mut sorted = got.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, expect);
    }
}
