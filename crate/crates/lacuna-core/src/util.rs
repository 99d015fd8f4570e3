use num_complex::Complex64;

/// Pairwise (tree) summation. Keeps rounding error at O(log N · eps) so that
/// exact identities (Parseval, Khinchin p = 2) survive grids up to 2^18.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of `f` over an index range without materializing a buffer.
pub(crate) fn pairwise_sum_by<F: Fn(usize) -> f64 + Copy>(lo: usize, hi: usize, f: F) -> f64 {
    if hi - lo <= 32 {
        return (lo..hi).map(f).sum();
    }
    let mid = lo + (hi - lo) / 2;
    pairwise_sum_by(lo, mid, f) + pairwise_sum_by(mid, hi, f)
}

pub(crate) fn pairwise_sum_by_c64<F: Fn(usize) -> Complex64 + Copy>(
    lo: usize,
    hi: usize,
    f: F,
) -> Complex64 {
    if hi - lo <= 32 {
        return (lo..hi).map(f).sum();
    }
    let mid = lo + (hi - lo) / 2;
    pairwise_sum_by_c64(lo, mid, f) + pairwise_sum_by_c64(mid, hi, f)
}

/// Smallest t with c <= 2^t, for c >= 1.
pub(crate) fn ceil_log2(c: u64) -> u32 {
    debug_assert!(c >= 1);
    64 - (c - 1).leading_zeros()
}
