//! Luxemburg (Orlicz) norms: inf{c > 0 : (1/N) Σ φ(|f|/c) <= 1}, solved by
//! bracketing and bisection.

use crate::error::CoreError;
use crate::grid::GridFunction;
use crate::util::pairwise_sum_by;
use std::sync::Arc;

type GaugeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A monotone convex gauge φ on [0, ∞) with φ(0) = 0.
#[derive(Clone)]
pub struct OrliczGauge {
    name: &'static str,
    phi: GaugeFn,
}

impl std::fmt::Debug for OrliczGauge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OrliczGauge").field("name", &self.name).finish()
    }
}

impl OrliczGauge {
    pub fn new(name: &'static str, phi: GaugeFn) -> Self {
        Self { name, phi }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn phi(&self, t: f64) -> f64 {
        (self.phi)(t)
    }

    /// φ(t) = e^{t²} - 1, the exp(L²) gauge.
    pub fn exp_l2() -> Self {
        Self::new("exp_l2", Arc::new(|t| (t * t).exp() - 1.0))
    }

    /// φ(t) = t, so the Luxemburg norm is the grid L¹ mean.
    pub fn l1() -> Self {
        Self::new("l1", Arc::new(|t| t))
    }

    /// φ(t) = t (ln(e + t))^α.
    pub fn l_log_l_pow(alpha: f64) -> Self {
        let name = if alpha == 0.5 {
            "l_log_l_half"
        } else if alpha == 1.0 {
            "l_log_l"
        } else {
            "l_log_l_pow"
        };
        Self::new(
            name,
            Arc::new(move |t| t * (std::f64::consts::E + t).ln().powf(alpha)),
        )
    }

    /// φ(t) = t ln(ln(e^e + t)).
    pub fn l_log_log_l() -> Self {
        let ee = std::f64::consts::E.exp();
        Self::new("l_log_log_l", Arc::new(move |t| t * (ee + t).ln().ln()))
    }

    /// φ(t) = t ln(ln(e^e + t)) ln(ln(ln(e^{e^e} + t))).
    pub fn l_log_log_l_log_log_log_l() -> Self {
        let ee = std::f64::consts::E.exp();
        let eee = ee.exp();
        Self::new(
            "l_log_log_l_log_log_log_l",
            Arc::new(move |t| t * (ee + t).ln().ln() * (eee + t).ln().ln().ln()),
        )
    }

    /// Max convexity defect of φ over sampled triples (t, (t+u)/2, u); a valid
    /// gauge keeps this <= 0 up to rounding. Test support.
    pub fn convexity_defect(&self, max_t: f64, steps: usize) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..steps {
            for j in (i + 1)..steps {
                let a = max_t * i as f64 / steps as f64;
                let b = max_t * j as f64 / steps as f64;
                let mid = 0.5 * (a + b);
                let defect = self.phi(mid) - 0.5 * (self.phi(a) + self.phi(b));
                worst = worst.max(defect);
            }
        }
        worst
    }
}

const MAX_BRACKET_STEPS: usize = 200;
const REL_TOL: f64 = 1e-9;

/// Luxemburg norm of f for the given gauge. Returns 0 for f ≡ 0.
pub fn orlicz_norm(f: &GridFunction, gauge: &OrliczGauge) -> Result<f64, CoreError> {
    let moduli = f.moduli();
    let linf = moduli.iter().fold(0.0f64, |a, &b| a.max(b));
    if linf == 0.0 {
        return Ok(0.0);
    }
    let n = moduli.len();
    let mean_at = |c: f64| -> f64 { pairwise_sum_by(0, n, |i| gauge.phi(moduli[i] / c)) / n as f64 };

    // Bracket around c = ||f||_inf by doubling/halving.
    let mut lo;
    let mut hi;
    if mean_at(linf) <= 1.0 {
        hi = linf;
        lo = linf;
        let mut steps = 0;
        loop {
            lo /= 2.0;
            if mean_at(lo) > 1.0 {
                break;
            }
            steps += 1;
            if steps > MAX_BRACKET_STEPS {
                return Err(CoreError::Gauge(format!(
                    "gauge {} never exceeds mean 1 while shrinking c",
                    gauge.name()
                )));
            }
        }
    } else {
        lo = linf;
        hi = linf;
        let mut steps = 0;
        loop {
            hi *= 2.0;
            if mean_at(hi) <= 1.0 {
                break;
            }
            steps += 1;
            if steps > MAX_BRACKET_STEPS {
                return Err(CoreError::Gauge(format!(
                    "gauge {} never drops below mean 1 while growing c",
                    gauge.name()
                )));
            }
        }
    }

    let mut iters = 0;
    while (hi - lo) > REL_TOL * hi && iters < MAX_BRACKET_STEPS {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iters += 1;
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn constant_one_exp_l2_has_closed_form() {
        // c solves e^{1/c²} - 1 = 1, i.e. c = 1/sqrt(ln 2)
        let f = GridFunction::constant(6, Complex64::new(1.0, 0.0));
        let got = orlicz_norm(&f, &OrliczGauge::exp_l2()).unwrap();
        let expect = 1.0 / (2.0f64.ln()).sqrt();
        assert!((got - expect).abs() < 1e-8, "got {got}, expect {expect}");
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let f = GridFunction::zeros(5);
        assert_eq!(orlicz_norm(&f, &OrliczGauge::exp_l2()).unwrap(), 0.0);
    }

    #[test]
    fn l1_gauge_recovers_the_mean() {
        let f = GridFunction::constant(5, Complex64::new(1.0, 0.0));
        let got = orlicz_norm(&f, &OrliczGauge::l1()).unwrap();
        assert!((got - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scaling_law() {
        let mut mask = vec![false; 64];
        for b in mask.iter_mut().take(13) {
            *b = true;
        }
        let f = GridFunction::indicator(6, &mask).unwrap();
        for gauge in [
            OrliczGauge::exp_l2(),
            OrliczGauge::l_log_l_pow(0.5),
            OrliczGauge::l_log_log_l(),
            OrliczGauge::l_log_log_l_log_log_log_l(),
        ] {
            let base = orlicz_norm(&f, &gauge).unwrap();
            let scaled = orlicz_norm(&f.scale(3.5), &gauge).unwrap();
            assert!(
                (scaled - 3.5 * base).abs() <= 1e-8 * scaled.abs().max(1.0),
                "gauge {}",
                gauge.name()
            );
        }
    }

    #[test]
    fn gauges_are_convex_at_sampled_triples() {
        for gauge in [
            OrliczGauge::exp_l2(),
            OrliczGauge::l1(),
            OrliczGauge::l_log_l_pow(0.5),
            OrliczGauge::l_log_l_pow(1.0),
            OrliczGauge::l_log_log_l(),
            OrliczGauge::l_log_log_l_log_log_log_l(),
        ] {
            assert!(gauge.phi(0.0).abs() < 1e-15, "gauge {}", gauge.name());
            assert!(
                gauge.convexity_defect(8.0, 40) < 1e-12,
                "gauge {}",
                gauge.name()
            );
            // strictly increasing on a few points
            let mut prev = 0.0;
            for i in 1..20 {
                let t = i as f64 * 0.4;
                let v = gauge.phi(t);
                assert!(v > prev, "gauge {} at t = {t}", gauge.name());
                prev = v;
            }
        }
    }
}
