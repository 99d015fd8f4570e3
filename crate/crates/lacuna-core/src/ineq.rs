//! Ratio evaluations for the lacunary exponential-sum inequalities: the
//! exp(L²) bound for lacunary series with ℓ² coefficients, even-moment
//! Khinchin ratios, the dual coefficient bounds against L(log L)^α, the
//! dyadic BMO norm, and the general coefficient bound on level-set intervals.

use crate::dyadic::{DyadicInterval, Side};
use crate::error::CoreError;
use crate::grid::{to_spectrum, GridFunction};
use crate::lacunary::LacunarySequence;
use crate::orlicz::{orlicz_norm, OrliczGauge};
use crate::util::{pairwise_sum, pairwise_sum_by, pairwise_sum_by_c64};
use num_complex::Complex64;

/// Coefficients a_j paired with the lacunary frequencies n_j they ride on.
#[derive(Clone, Debug)]
pub struct CoefficientVector {
    pub values: Vec<Complex64>,
    pub seq: LacunarySequence,
}

impl CoefficientVector {
    pub fn new(values: Vec<Complex64>, seq: LacunarySequence) -> Result<Self, CoreError> {
        if values.len() != seq.count() {
            return Err(CoreError::config("coefficient count must match sequence length"));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CoreError::config("coefficients must be finite"));
        }
        Ok(Self { values, seq })
    }

    pub fn l2(&self) -> f64 {
        pairwise_sum(&self.values.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()).sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|z| z * c).collect(),
            seq: self.seq.clone(),
        }
    }
}

/// Σ_j a_j e_{n_j} synthesized directly on the grid.
pub fn lacunary_sum(a: &CoefficientVector, m: u32) -> Result<GridFunction, CoreError> {
    let n = 1usize << m;
    let half_n = (n / 2) as u64;
    if a.seq.max_value() >= half_n {
        return Err(CoreError::FrequencyOverflow { n: a.seq.max_value(), half_n });
    }
    let freqs = a.seq.values();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (coef, freq) in a.values.iter().zip(freqs) {
        if coef.norm_sqr() == 0.0 {
            continue;
        }
        for (i, slot) in out.iter_mut().enumerate() {
            let t = (freq * i as u64) % n as u64;
            *slot +=
                coef * Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / n as f64);
        }
    }
    GridFunction::from_samples(m, out)
}

/// ‖Σ a_j e_{n_j}‖_{exp(L²)} / ‖a‖_{ℓ²}; 0 for the zero vector.
pub fn zygmund_ratio(a: &CoefficientVector, m: u32) -> Result<f64, CoreError> {
    let l2 = a.l2();
    if l2 == 0.0 {
        return Ok(0.0);
    }
    let f = lacunary_sum(a, m)?;
    Ok(orlicz_norm(&f, &OrliczGauge::exp_l2())? / l2)
}

/// ‖Σ a_j e_{2^j}‖_p / (√p ‖a‖₂) for even p >= 2.
pub fn khinchin_moment_ratio(
    values: &[Complex64],
    p: u32,
    m: u32,
) -> Result<f64, CoreError> {
    if p < 2 || p % 2 != 0 {
        return Err(CoreError::config(format!("p = {p} must be a positive even integer")));
    }
    let a = CoefficientVector::new(values.to_vec(), LacunarySequence::new(2, values.len())?)?;
    let l2 = a.l2();
    if l2 == 0.0 {
        return Ok(0.0);
    }
    let f = lacunary_sum(&a, m)?;
    let n = f.len();
    // |f|^p for even p via integer powers of |f|²
    let half = (p / 2) as i32;
    let mean = pairwise_sum_by(0, n, |i| f.samples()[i].norm_sqr().powi(half)) / n as f64;
    Ok(mean.powf(1.0 / p as f64) / ((p as f64).sqrt() * l2))
}

/// ‖{f̂(2^j)}_j‖_{ℓ²} / ‖f‖_{L(log L)^α}; 0 for f ≡ 0.
pub fn coeff_dual_ratio(f: &GridFunction, alpha: f64) -> Result<f64, CoreError> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let spec = to_spectrum(f);
    let half_n = (f.len() / 2) as u64;
    let mut acc = 0.0;
    let mut j = 0u32;
    while (1u64 << j) < half_n {
        acc += spec.coeff(1i64 << j).norm_sqr();
        j += 1;
    }
    let denom = orlicz_norm(f, &OrliczGauge::l_log_l_pow(alpha))?;
    Ok(acc.sqrt() / denom)
}

/// sup over dyadic intervals I of the mean of |f - mean_I f| over I.
pub fn dyadic_bmo_norm(f: &GridFunction) -> f64 {
    let m = f.m();
    let n = f.len();
    let mut worst = 0.0f64;
    for level in 0..=m {
        let cells = 1usize << level;
        let width = n >> level;
        for idx in 0..cells {
            let lo = idx * width;
            let hi = lo + width;
            let mean =
                pairwise_sum_by_c64(lo, hi, |i| f.samples()[i]) / width as f64;
            let osc =
                pairwise_sum_by(lo, hi, |i| (f.samples()[i] - mean).norm()) / width as f64;
            worst = worst.max(osc);
        }
    }
    worst
}

#[derive(Clone, Copy, Debug)]
pub struct GeneralCoeffBound {
    pub ratio: f64,
    /// Set when λ 2^-k >= ‖f‖∞ forces the log clamp.
    pub degenerate: bool,
}

/// {Σ_l |∫_I f e_{-c_l}|² / |I|}^(1/2) against 2^-k λ (log(‖f‖∞/(2^-k λ)))^(1/2) |I|^(1/2),
/// with c_l running over the sequence members below N/2.
pub fn general_coeff_bound_ratio(
    f: &GridFunction,
    interval: &DyadicInterval,
    seq: &LacunarySequence,
    k: u32,
    lambda: f64,
) -> Result<GeneralCoeffBound, CoreError> {
    debug_assert_eq!(interval.side, Side::Space);
    if f.is_zero() {
        return Ok(GeneralCoeffBound { ratio: 0.0, degenerate: false });
    }
    let m = f.m();
    let n = f.len();
    let half_n = (n / 2) as u64;
    let range = interval.sample_range(m);
    let mut lhs_sq = 0.0;
    for c in seq.values().into_iter().filter(|&c| c < half_n) {
        let integral = pairwise_sum_by_c64(range.start, range.end, |i| {
            let t = (c * i as u64) % n as u64;
            f.samples()[i]
                * Complex64::from_polar(1.0, -std::f64::consts::TAU * t as f64 / n as f64)
        }) / n as f64;
        lhs_sq += integral.norm_sqr();
    }
    let measure = interval.measure();
    let lhs = (lhs_sq / measure).sqrt();
    let t = lambda * (0.5f64).powi(k as i32);
    let linf = f.max_modulus();
    let degenerate = t >= linf;
    let log_term = if degenerate { 2.0f64.ln() } else { (linf / t).ln().max(2.0f64.ln()) };
    let rhs = t * log_term.sqrt() * measure.sqrt();
    Ok(GeneralCoeffBound { ratio: lhs / rhs, degenerate })
}
