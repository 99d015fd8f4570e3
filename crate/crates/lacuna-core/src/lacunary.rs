//! Partial Fourier sums S_n f, the lacunary maximal function sup_j |S_{n_j} f|,
//! and its linearization N(x) (the per-sample maximizing frequency).

use crate::error::CoreError;
use crate::grid::{from_spectrum, to_spectrum, GridFunction, Spectrum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Geometric frequency sequence n_j = alpha^j, j = 0 .. count-1, alpha >= 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LacunarySequence {
    alpha: u64,
    count: usize,
}

impl LacunarySequence {
    pub fn new(alpha: u64, count: usize) -> Result<Self, CoreError> {
        if alpha < 2 {
            return Err(CoreError::config(format!("alpha = {alpha} must be >= 2")));
        }
        if count == 0 {
            return Err(CoreError::config("sequence must be nonempty"));
        }
        if alpha
            .checked_pow(count as u32 - 1)
            .is_none()
        {
            return Err(CoreError::config("alpha^(count-1) overflows u64"));
        }
        Ok(Self { alpha, count })
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn values(&self) -> Vec<u64> {
        (0..self.count as u32).map(|j| self.alpha.pow(j)).collect()
    }

    pub fn max_value(&self) -> u64 {
        self.alpha.pow(self.count as u32 - 1)
    }

    /// Largest J such that alpha^(J-1) < half_n, capped at `count`.
    pub fn truncated_to(&self, half_n: u64) -> Result<Self, CoreError> {
        let mut count = 0;
        let mut v = 1u64;
        while count < self.count && v < half_n {
            count += 1;
            v = v.saturating_mul(self.alpha);
        }
        Self::new(self.alpha, count)
    }
}

/// A measurable frequency choice: one sequence member per sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencySelector {
    m: u32,
    values: Vec<u64>,
}

impl FrequencySelector {
    pub fn from_values(m: u32, values: Vec<u64>) -> Result<Self, CoreError> {
        if values.len() != 1usize << m {
            return Err(CoreError::config("selector length must be 2^m"));
        }
        let half_n = 1u64 << (m - 1);
        if let Some(&bad) = values.iter().find(|&&v| v == 0 || v >= half_n) {
            return Err(CoreError::FrequencyOverflow { n: bad, half_n });
        }
        Ok(Self { m, values })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn value_at(&self, i: usize) -> u64 {
        self.values[i]
    }
}

fn check_frequency(f: &GridFunction, n: u64) -> Result<(), CoreError> {
    let half_n = (f.len() / 2) as u64;
    if n >= half_n {
        return Err(CoreError::FrequencyOverflow { n, half_n });
    }
    Ok(())
}

fn partial_sum_from_spectrum(s: &Spectrum, n: u64) -> GridFunction {
    let big_n = s.len() as i64;
    let mut truncated: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); s.len()];
    for k in -(n as i64)..=(n as i64) {
        truncated[k.rem_euclid(big_n) as usize] = s.coeff(k);
    }
    let spec = SpectrumBuilder { m: s.m(), coeffs: truncated }.build();
    from_spectrum(&spec)
}

// Local helper so partial sums can assemble a Spectrum without exposing a
// public mutable constructor.
struct SpectrumBuilder {
    m: u32,
    coeffs: Vec<Complex64>,
}

impl SpectrumBuilder {
    fn build(self) -> Spectrum {
        // SAFETY of invariants: coeffs has length 2^m by construction above.
        crate::grid::spectrum_from_fft_order(self.m, self.coeffs)
    }
}

/// n-th partial Fourier sum Σ_{|k| <= n} f̂(k) e_k. Requires n < N/2.
pub fn partial_sum(f: &GridFunction, n: u64) -> Result<GridFunction, CoreError> {
    check_frequency(f, n)?;
    Ok(partial_sum_from_spectrum(&to_spectrum(f), n))
}

/// Pointwise max over j of |S_{n_j} f|; real nonnegative samples.
pub fn lacunary_maximal(
    f: &GridFunction,
    seq: &LacunarySequence,
) -> Result<GridFunction, CoreError> {
    check_frequency(f, seq.max_value())?;
    let spec = to_spectrum(f);
    let mut out = vec![0.0f64; f.len()];
    for n in seq.values() {
        let s = partial_sum_from_spectrum(&spec, n);
        for (o, z) in out.iter_mut().zip(s.samples()) {
            *o = o.max(z.norm());
        }
    }
    GridFunction::from_real(f.m(), out)
}

/// Per-sample maximizing frequency N(x): the smallest j attaining
/// max_j |S_{n_j} f(x)| (ties break to the smallest index).
pub fn linearize(
    f: &GridFunction,
    seq: &LacunarySequence,
) -> Result<FrequencySelector, CoreError> {
    check_frequency(f, seq.max_value())?;
    let spec = to_spectrum(f);
    let values = seq.values();
    let mut best = vec![f64::NEG_INFINITY; f.len()];
    let mut chosen = vec![values[0]; f.len()];
    for &n in &values {
        let s = partial_sum_from_spectrum(&spec, n);
        for i in 0..f.len() {
            let v = s.samples()[i].norm();
            if v > best[i] {
                best[i] = v;
                chosen[i] = n;
            }
        }
    }
    FrequencySelector::from_values(f.m(), chosen)
}

/// One consistent sweep over every cutoff n = 0 .. N/2 - 1.
///
/// Produces the full maximal function sup_{n < N/2} |S_n f|, the lacunary
/// maximal function over `seq`, and the linearizing selector, all from the
/// same incrementally updated partial sums so that the pointwise domination
/// `lacunary <= full` holds exactly as computed.
pub struct CarlesonScan {
    pub full_max: Vec<f64>,
    pub lacunary_max: Vec<f64>,
    pub selector: FrequencySelector,
}

pub fn carleson_scan(f: &GridFunction, seq: &LacunarySequence) -> Result<CarlesonScan, CoreError> {
    check_frequency(f, seq.max_value())?;
    let big_n = f.len();
    let half_n = (big_n / 2) as u64;
    let spec = to_spectrum(f);
    let seq_values = seq.values();

    // current S_n, updated as S_n = S_{n-1} + f̂(n) e_n + f̂(-n) e_{-n}
    let mut cur: Vec<Complex64> = vec![spec.coeff(0); big_n];
    // e_n(x_i) tracked multiplicatively with periodic exact refresh
    let mut pos: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); big_n];
    let mut neg: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); big_n];
    let step: Vec<Complex64> = (0..big_n)
        .map(|i| Complex64::from_polar(1.0, std::f64::consts::TAU * i as f64 / big_n as f64))
        .collect();

    let mut full_max: Vec<f64> = cur.iter().map(|z| z.norm()).collect();
    let mut lac_max = vec![f64::NEG_INFINITY; big_n];
    let mut chosen = vec![seq_values[0]; big_n];

    let mut next_seq = 0usize;
    for n in 1..half_n {
        for i in 0..big_n {
            pos[i] *= step[i];
            neg[i] = pos[i].conj();
        }
        if n % 256 == 0 {
            // refresh phases exactly to stop multiplicative drift
            for (i, p) in pos.iter_mut().enumerate() {
                let t = (n * i as u64) % big_n as u64;
                *p = Complex64::from_polar(
                    1.0,
                    std::f64::consts::TAU * t as f64 / big_n as f64,
                );
                neg[i] = p.conj();
            }
        }
        let cp = spec.coeff(n as i64);
        let cn = spec.coeff(-(n as i64));
        for i in 0..big_n {
            cur[i] += cp * pos[i] + cn * neg[i];
            let v = cur[i].norm();
            if v > full_max[i] {
                full_max[i] = v;
            }
        }
        while next_seq < seq_values.len() && seq_values[next_seq] == n {
            for i in 0..big_n {
                let v = cur[i].norm();
                if v > lac_max[i] {
                    lac_max[i] = v;
                    chosen[i] = n;
                }
            }
            next_seq += 1;
        }
    }
    if next_seq < seq_values.len() {
        return Err(CoreError::FrequencyOverflow { n: seq_values[next_seq], half_n });
    }
    Ok(CarlesonScan {
        full_max,
        lacunary_max: lac_max,
        selector: FrequencySelector::from_values(f.m(), chosen)?,
    })
}
