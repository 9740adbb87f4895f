//! The critical sampling frequency `f_DR`.
//!
//! Waterfilling at rate `R` only spends bits on `F_theta = {S > theta}`. When
//! the sampler can see a set of that measure, `D̄(f_s, R)` already equals the
//! distortion-rate function, so `f_DR = |F_theta|` is the lowest sampling
//! frequency that costs nothing at this rate.

use crate::error::{Error, Result};
use crate::sampled::optimal_fstar;
use crate::spectra::Spectrum;
use crate::waterfill::{theta_from_distortion, theta_from_rate, WaterfillPoint};

/// `f_DR` at one operating point of the distortion-rate curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalFrequencyPoint {
    pub rate: f64,
    pub distortion: f64,
    pub f_dr: f64,
    pub theta: f64,
}

impl From<&WaterfillPoint> for CriticalFrequencyPoint {
    fn from(p: &WaterfillPoint) -> Self {
        Self {
            rate: p.rate,
            distortion: p.distortion,
            f_dr: p.domain.measure(),
            theta: p.theta,
        }
    }
}

/// `f_DR` at bitrate `rate`. Zero rate gives `f_DR = 0`.
pub fn fdr_from_rate<S: Spectrum + ?Sized>(spec: &S, rate: f64) -> Result<CriticalFrequencyPoint> {
    let point = theta_from_rate(spec, rate, None)?;
    let mut out = CriticalFrequencyPoint::from(&point);
    out.rate = rate;
    Ok(out)
}

/// `f_DR` at the rate where the distortion-rate function equals
/// `distortion`, which must lie strictly between 0 and `sigma^2`.
pub fn fdr_from_distortion<S: Spectrum + ?Sized>(spec: &S, distortion: f64) -> Result<CriticalFrequencyPoint> {
    let point = theta_from_distortion(spec, distortion, None)?;
    let mut out = CriticalFrequencyPoint::from(&point);
    out.distortion = distortion;
    Ok(out)
}

/// Measure of the symmetric difference between the waterfilling set
/// `{S > theta(R)}` and the optimal sampling set `F*(f_DR)`. Both describe
/// the same frequencies, so the result should vanish.
pub fn verify_set_coincidence<S: Spectrum + ?Sized>(spec: &S, rate: f64) -> Result<f64> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::Domain(format!("set coincidence needs a positive rate, got {rate}")));
    }
    let point = theta_from_rate(spec, rate, None)?;
    let f_dr = point.domain.measure();
    let fstar = optimal_fstar(spec, f_dr)?;
    Ok(fstar.symmetric_difference_measure(&point.domain))
}

/// Closed-form relations between `f_DR`, `R` and `D` for the model spectra,
/// worked out from the waterfilling integrals. The solvers never use them;
/// they serve as independent checks.
pub mod closed_form {
    use std::f64::consts::{LN_2, PI};

    /// Rate at which a triangle spectrum of half-width `f_b` reaches
    /// critical frequency `f_dr <= 2 f_b`.
    pub fn triangle_rate(f_b: f64, f_dr: f64) -> f64 {
        let a = f_dr / (2.0 * f_b);
        f_b * (-(1.0 - a).ln() - a) / LN_2
    }

    /// `f_DR = 2 f_B sqrt(1 - D)` for the unit-power triangle.
    pub fn triangle_fdr(f_b: f64, distortion: f64) -> f64 {
        2.0 * f_b * (1.0 - distortion).sqrt()
    }

    /// Rate at which the Gauss-Markov spectrum with corner `f_0` reaches
    /// critical frequency `f_dr`.
    pub fn gauss_markov_rate(f_0: f64, f_dr: f64) -> f64 {
        (f_dr - (2.0 * f_0 / PI) * (PI * f_dr / (2.0 * f_0)).atan()) / LN_2
    }

    /// Water level of the Gauss-Markov spectrum whose superlevel set has
    /// measure `f_dr`.
    pub fn gauss_markov_theta(f_0: f64, f_dr: f64) -> f64 {
        let u = PI * f_dr / (2.0 * f_0);
        1.0 / (f_0 * (1.0 + u * u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::Psd;
    use std::f64::consts::{LN_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn triangle_example() {
        let tri = Psd::triangle(1.0).unwrap();
        let r = closed_form::triangle_rate(1.0, 1.0);
        assert!(close(r, 0.5 - (0.5 - 0.5 * LN_2) / LN_2, 1e-15));
        let p = fdr_from_rate(&tri, r).unwrap();
        assert!(close(p.f_dr, 1.0, 1e-9));
        assert!(close(p.theta, 0.5, 1e-9));
        assert!(close(p.distortion, 0.75, 1e-9));
    }

    #[test]
    fn rect_needs_nyquist_at_every_rate() {
        let rect = Psd::rect(0.5).unwrap();
        for r in [0.01, 0.5, 3.0, 20.0] {
            assert!(close(fdr_from_rate(&rect, r).unwrap().f_dr, 1.0, 1e-12));
        }
        assert!(close(fdr_from_distortion(&rect, 0.5).unwrap().f_dr, 1.0, 1e-12));
    }

    #[test]
    fn gauss_markov_example() {
        let gm = Psd::gauss_markov(1.0).unwrap();
        // (1/pi) ∫_0^1 log2(2/(u^2+1)) du
        let r = (2.0 - PI / 2.0) / (PI * LN_2);
        assert!(close(closed_form::gauss_markov_rate(1.0, 2.0 / PI), r, 1e-14));
        let p = fdr_from_rate(&gm, r).unwrap();
        assert!(close(p.f_dr, 2.0 / PI, 1e-9));
        assert!(close(p.theta, 0.5, 1e-9));
    }

    #[test]
    fn zero_rate_has_zero_critical_frequency() {
        let p = fdr_from_rate(&Psd::triangle(1.0).unwrap(), 0.0).unwrap();
        assert_eq!(p.f_dr, 0.0);
        assert!(close(p.distortion, 1.0, 1e-12));
    }

    #[test]
    fn distortion_parametrization() {
        let tri = Psd::triangle(1.0).unwrap();
        assert!(close(fdr_from_distortion(&tri, 0.75).unwrap().f_dr, 1.0, 1e-12));
        let near_top = fdr_from_distortion(&tri, 1.0 - 1e-10).unwrap();
        assert!(near_top.f_dr < 1e-4);
        assert!(matches!(fdr_from_distortion(&tri, 1.5), Err(Error::Domain(_))));
        assert!(matches!(fdr_from_distortion(&tri, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn coincidence_examples() {
        let tri = Psd::triangle(1.0).unwrap();
        assert!(verify_set_coincidence(&tri, closed_form::triangle_rate(1.0, 1.0)).unwrap() <= 1e-8);
        assert!(verify_set_coincidence(&Psd::gauss_markov(1.0).unwrap(), 1.0).unwrap() <= 1e-8);
        assert!(verify_set_coincidence(&Psd::rect(0.5).unwrap(), 2.0).unwrap() <= 1e-8);
        assert!(verify_set_coincidence(&tri, 0.0).is_err());
    }

    #[test]
    fn coincidence_on_a_bimodal_table() {
        let psd = Psd::tabulated(vec![0.0, 1.0, 2.0], vec![0.5, 2.0, 0.0]).unwrap();
        for r in [0.3, 1.0, 4.0] {
            assert!(verify_set_coincidence(&psd, r).unwrap() <= 1e-8, "R={r}");
        }
    }

    #[test]
    fn closed_forms_agree_with_solver() {
        let tri = Psd::triangle(2.0).unwrap();
        for f_dr in [0.5, 1.5, 3.0, 3.9] {
            let p = fdr_from_rate(&tri, closed_form::triangle_rate(2.0, f_dr)).unwrap();
            assert!(close(p.f_dr, f_dr, 1e-8), "{f_dr}: {}", p.f_dr);
        }
        let gm = Psd::gauss_markov(0.5).unwrap();
        for f_dr in [0.2, 1.0, 5.0] {
            let p = fdr_from_rate(&gm, closed_form::gauss_markov_rate(0.5, f_dr)).unwrap();
            assert!(close(p.f_dr, f_dr, 1e-8), "{f_dr}: {}", p.f_dr);
            assert!(close(p.theta, closed_form::gauss_markov_theta(0.5, f_dr), 1e-10));
        }
    }
}
