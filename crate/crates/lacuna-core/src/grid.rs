//! Complex-valued functions sampled on the 2^m uniform grid over [0, 1),
//! their Fourier spectra, and the L^p / weak-L^1 norms.

use crate::error::CoreError;
use crate::util::{pairwise_sum, pairwise_sum_by, pairwise_sum_by_c64};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

/// Samples of a function on the grid x_i = i / 2^m, i = 0 .. 2^m - 1.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    m: u32,
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_samples(m: u32, samples: Vec<Complex64>) -> Result<Self, CoreError> {
        if m < 3 {
            return Err(CoreError::config(format!("grid exponent m = {m} must be >= 3")));
        }
        if samples.len() != 1usize << m {
            return Err(CoreError::config(format!(
                "expected {} samples for m = {m}, got {}",
                1usize << m,
                samples.len()
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CoreError::config("samples must be finite"));
        }
        Ok(Self { m, samples })
    }

    pub(crate) fn new_unchecked(m: u32, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), 1usize << m);
        Self { m, samples }
    }

    pub fn zeros(m: u32) -> Self {
        Self::new_unchecked(m, vec![Complex64::new(0.0, 0.0); 1 << m])
    }

    pub fn constant(m: u32, value: Complex64) -> Self {
        Self::new_unchecked(m, vec![value; 1 << m])
    }

    /// The character e_n(x) = exp(2πi n x) sampled on the grid.
    pub fn character(m: u32, n: i64) -> Self {
        let big_n = 1usize << m;
        let samples = (0..big_n)
            .map(|i| {
                let t = (n.rem_euclid(big_n as i64) as u64 * i as u64) % big_n as u64;
                Complex64::from_polar(1.0, TAU * t as f64 / big_n as f64)
            })
            .collect();
        Self::new_unchecked(m, samples)
    }

    /// Real indicator of a sample set.
    pub fn indicator(m: u32, mask: &[bool]) -> Result<Self, CoreError> {
        if mask.len() != 1usize << m {
            return Err(CoreError::config("indicator mask length mismatch"));
        }
        Ok(Self::new_unchecked(
            m,
            mask.iter()
                .map(|&b| Complex64::new(if b { 1.0 } else { 0.0 }, 0.0))
                .collect(),
        ))
    }

    pub fn from_real(m: u32, values: Vec<f64>) -> Result<Self, CoreError> {
        Self::from_samples(m, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of samples N = 2^m.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|z| z.norm_sqr() == 0.0)
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm()).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new_unchecked(self.m, self.samples.iter().map(|z| z * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m);
        Self::new_unchecked(
            self.m,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m);
        Self::new_unchecked(
            self.m,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

/// JSON wire form of a grid function: {m, re[], im[]}.
#[derive(Serialize, Deserialize)]
pub struct GridFunctionRecord {
    pub m: u32,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&GridFunction> for GridFunctionRecord {
    fn from(f: &GridFunction) -> Self {
        GridFunctionRecord {
            m: f.m,
            re: f.samples.iter().map(|z| z.re).collect(),
            im: f.samples.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<GridFunctionRecord> for GridFunction {
    type Error = CoreError;

    fn try_from(r: GridFunctionRecord) -> Result<Self, CoreError> {
        if r.re.len() != r.im.len() {
            return Err(CoreError::config("re/im length mismatch"));
        }
        GridFunction::from_samples(
            r.m,
            r.re.iter()
                .zip(&r.im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl Serialize for GridFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GridFunctionRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rec = GridFunctionRecord::deserialize(d)?;
        GridFunction::try_from(rec).map_err(serde::de::Error::custom)
    }
}

/// Fourier coefficients indexed by integer frequencies n in [-N/2, N/2),
/// stored in FFT order (index n mod N).
#[derive(Clone, Debug)]
pub struct Spectrum {
    m: u32,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficient at integer frequency n, -N/2 <= n < N/2.
    pub fn coeff(&self, n: i64) -> Complex64 {
        let big_n = self.coeffs.len() as i64;
        debug_assert!(n >= -big_n / 2 && n < big_n / 2);
        self.coeffs[n.rem_euclid(big_n) as usize]
    }

    pub fn coeffs_fft_order(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Iterate (n, coeff) over the symmetric frequency range.
    pub fn iter_freqs(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let big_n = self.coeffs.len() as i64;
        (-big_n / 2..big_n / 2).map(move |n| (n, self.coeff(n)))
    }
}

pub(crate) fn spectrum_from_fft_order(m: u32, coeffs: Vec<Complex64>) -> Spectrum {
    debug_assert_eq!(coeffs.len(), 1usize << m);
    Spectrum { m, coeffs }
}

thread_local! {
    static PLANNER: RefCell<rustfft::FftPlanner<f64>> = RefCell::new(rustfft::FftPlanner::new());
}

fn run_fft(buf: &mut [Complex64], forward: bool) {
    let fft: Arc<dyn rustfft::Fft<f64>> = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(buf.len())
        } else {
            p.plan_fft_inverse(buf.len())
        }
    });
    fft.process(buf);
}

/// Fourier coefficients under e_n(x) = exp(2πi n x): f̂(n) = (1/N) Σ_i f(x_i) e_n(-x_i).
pub fn to_spectrum(f: &GridFunction) -> Spectrum {
    let big_n = f.len();
    let mut buf = f.samples().to_vec();
    run_fft(&mut buf, true);
    let scale = 1.0 / big_n as f64;
    for z in &mut buf {
        *z *= scale;
    }
    Spectrum { m: f.m(), coeffs: buf }
}

/// Inverse transform: f(x_i) = Σ_n f̂(n) e_n(x_i).
pub fn from_spectrum(s: &Spectrum) -> GridFunction {
    let mut buf = s.coeffs.clone();
    run_fft(&mut buf, false);
    GridFunction::new_unchecked(s.m, buf)
}

/// Grid mean inner product (1/N) Σ f(x) conj(g(x)).
pub fn inner(f: &GridFunction, g: &GridFunction) -> Complex64 {
    assert_eq!(f.m(), g.m());
    let n = f.len();
    pairwise_sum_by_c64(0, n, |i| f.samples()[i] * g.samples()[i].conj()) / n as f64
}

/// ((1/N) Σ |f|^p)^(1/p); p = infinity gives the max modulus. Rejects p < 1.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64, CoreError> {
    if p.is_nan() || p < 1.0 {
        return Err(CoreError::config(format!("lp_norm requires p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.max_modulus());
    }
    let n = f.len();
    let mean = pairwise_sum_by(0, n, |i| f.samples()[i].norm().powf(p)) / n as f64;
    Ok(mean.powf(1.0 / p))
}

/// Weak-L^1 quasi-norm sup_λ λ |{|g| > λ}| computed exactly from sorted samples:
/// with |g| sorted descending v_1 >= ... >= v_N this is max_i v_i * (i/N).
pub fn weak_l1_norm(g: &GridFunction) -> f64 {
    weak_l1_from_moduli(&g.moduli())
}

pub fn weak_l1_from_moduli(moduli: &[f64]) -> f64 {
    let mut v = moduli.to_vec();
    v.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite moduli"));
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &vi)| vi * (i + 1) as f64 / n)
        .fold(0.0, f64::max)
}

/// Mean of |f| over the whole grid (the L^1 norm).
pub fn l1_norm(f: &GridFunction) -> f64 {
    let n = f.len();
    pairwise_sum_by(0, n, |i| f.samples()[i].norm()) / n as f64
}

/// L^2 norm via Parseval on the spectrum side, for cross-checks.
pub fn l2_norm_spectral(s: &Spectrum) -> f64 {
    pairwise_sum(&s.coeffs.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()).sqrt()
}
