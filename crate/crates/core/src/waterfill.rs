//! Reverse waterfilling over a spectrum.
//!
//! For a water level `theta` the rate and distortion are
//! `R = 1/2 ∫ log2+(S/theta)` and `D = sigma^2 - ∫ (S - theta)+`, both taken
//! over an optional restriction domain. With no restriction `D` reduces to
//! `∫ min(S, theta)`.

use crate::error::{Error, Result};
use crate::numeric::bisect_monotone;
use crate::spectra::{energy_on, integrate_map_on, superlevel_within, SpectralSet, Spectrum};

/// Which parametric system a [`WaterfillPoint`] solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaterfillSystem {
    /// Waterfilling of the source spectrum over the whole line.
    Direct,
    /// Waterfilling restricted to a spectral set of measure at most `f_s`.
    Sampled,
    /// Waterfilling over the effective spectrum of a noisy observation.
    Noisy,
}

/// A solution `(theta, R, D)` of a waterfilling system.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillPoint {
    pub theta: f64,
    pub rate: f64,
    pub distortion: f64,
    /// The frequencies that receive rate: `{S > theta}` within the
    /// restriction domain.
    pub domain: SpectralSet,
    pub system: WaterfillSystem,
}

impl WaterfillPoint {
    /// Replaces the reference variance in `D = variance - ∫ (S - theta)+`.
    /// Used when the waterfilled spectrum is an estimate of the source rather
    /// than the source itself.
    pub fn rebased(mut self, old_variance: f64, new_variance: f64) -> Self {
        self.distortion += new_variance - old_variance;
        self
    }
}

/// `1/2 ∫ log2+(S/theta)` over `domain` (the whole line when `None`).
pub fn rate_at_theta<S: Spectrum + ?Sized>(spec: &S, theta: f64, domain: Option<&SpectralSet>) -> f64 {
    let active = superlevel_within(spec, theta, domain);
    0.5 * integrate_map_on(spec, &active, |s| if s > theta { (s / theta).log2() } else { 0.0 })
}

/// `∫ (S - theta)+` over `domain` (the whole line when `None`).
pub fn excess_at_theta<S: Spectrum + ?Sized>(spec: &S, theta: f64, domain: Option<&SpectralSet>) -> f64 {
    let active = superlevel_within(spec, theta, domain);
    integrate_map_on(spec, &active, |s| (s - theta).max(0.0))
}

/// `∫_set min(S, theta)`, split at the level crossings so that the
/// quadrature never straddles the kink of the integrand.
pub fn clipped_energy_on<S: Spectrum + ?Sized>(spec: &S, set: &SpectralSet, theta: f64) -> f64 {
    let above = set.intersection(&spec.superlevel_set(theta));
    theta * above.measure() + energy_on(spec, &set.difference(&above))
}

fn point_at<S: Spectrum + ?Sized>(
    spec: &S,
    theta: f64,
    domain: Option<&SpectralSet>,
    system: WaterfillSystem,
) -> WaterfillPoint {
    let active = superlevel_within(spec, theta, domain);
    let rate = 0.5 * integrate_map_on(spec, &active, |s| if s > theta { (s / theta).log2() } else { 0.0 });
    let excess = integrate_map_on(spec, &active, |s| (s - theta).max(0.0));
    WaterfillPoint {
        theta,
        rate,
        distortion: (spec.variance() - excess).max(0.0),
        domain: active,
        system,
    }
}

fn system_for(domain: Option<&SpectralSet>) -> WaterfillSystem {
    if domain.is_some() {
        WaterfillSystem::Sampled
    } else {
        WaterfillSystem::Direct
    }
}

/// Rate and distortion of the direct distortion-rate function at water level
/// `theta`. Levels at or above the peak of the spectrum give `R = 0` and
/// `D = sigma^2`.
pub fn drf_from_theta<S: Spectrum + ?Sized>(spec: &S, theta: f64) -> Result<WaterfillPoint> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::Domain(format!("water level must be positive, got {theta}")));
    }
    Ok(point_at(spec, theta, None, WaterfillSystem::Direct))
}

/// Solves `R(theta) = rate` over `domain` (the whole line when `None`).
///
/// The residual on the rate is driven close to machine precision and the
/// result is rejected if it misses by more than `1e-9 * max(1, rate)`.
pub fn theta_from_rate<S: Spectrum + ?Sized>(spec: &S, rate: f64, domain: Option<&SpectralSet>) -> Result<WaterfillPoint> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::Domain(format!("rate must be finite and non-negative, got {rate}")));
    }
    let system = system_for(domain);
    let top = spec.ess_sup();
    if rate == 0.0 {
        return Ok(point_at(spec, top, domain, system));
    }
    let rate_of = |theta: f64| rate_at_theta(spec, theta, domain);

    // A flat spectrum at the peak level over the domain would need this
    // level; the true one is lower.
    let width = domain.map_or(spec.landau_rate(), SpectralSet::measure).min(spec.landau_rate());
    let mut lo = if width.is_finite() && width > 0.0 {
        top * (-2.0 * rate / width).exp2()
    } else {
        0.5 * top
    };
    let mut expansions = 0;
    while rate_of(lo) < rate {
        lo *= 0.5;
        expansions += 1;
        if lo < f64::MIN_POSITIVE || expansions > 4000 {
            return Err(Error::Domain(format!(
                "rate {rate} is not achievable: the spectrum carries no energy on the domain"
            )));
        }
    }
    if lo >= top {
        lo = 0.5 * top;
    }
    let tol = 1e-14 * rate.max(1.0);
    let theta = bisect_monotone(rate_of, lo, top, rate, true, tol, "water level for rate")?;
    let point = point_at(spec, theta, domain, system);
    let residual = point.rate - rate;
    if residual.abs() > 1e-9 * rate.max(1.0) {
        return Err(Error::NoConvergence {
            what: "water level for rate",
            iterations: 400,
            residual,
        });
    }
    Ok(point)
}

/// Solves `D(theta) = distortion` over `domain`.
///
/// `D(theta)` increases from the floor `sigma^2 - ∫_domain S` to `sigma^2`,
/// and targets outside that open range are domain errors.
pub fn theta_from_distortion<S: Spectrum + ?Sized>(
    spec: &S,
    distortion: f64,
    domain: Option<&SpectralSet>,
) -> Result<WaterfillPoint> {
    let variance = spec.variance();
    let captured = match domain {
        Some(d) => crate::spectra::energy_on(spec, d),
        None => variance,
    };
    let floor = variance - captured;
    if !(distortion > floor && distortion < variance) {
        return Err(Error::Domain(format!(
            "distortion {distortion} outside the attainable range ({floor}, {variance})"
        )));
    }
    let d_of = |theta: f64| variance - excess_at_theta(spec, theta, domain);
    let tol = 1e-14 * variance;
    let theta = bisect_monotone(d_of, 0.0, spec.ess_sup(), distortion, false, tol, "water level for distortion")?;
    Ok(point_at(spec, theta, domain, system_for(domain)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::Psd;
    use std::f64::consts::LN_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn flat_spectrum_level() {
        let p = drf_from_theta(&Psd::rect(0.5).unwrap(), 0.25).unwrap();
        assert!(close(p.rate, 1.0, 1e-12));
        assert!(close(p.distortion, 0.25, 1e-12));
        assert_eq!(p.system, WaterfillSystem::Direct);
    }

    #[test]
    fn triangle_level() {
        let p = drf_from_theta(&Psd::triangle(1.0).unwrap(), 0.5).unwrap();
        // 2 * 1/2 * ∫_0^{1/2} log2((1-f)/0.5) df evaluated by hand.
        let expected = 0.5 - (0.5 - 0.5 * LN_2) / LN_2;
        assert!(close(p.rate, expected, 1e-12), "{}", p.rate);
        assert!(close(p.distortion, 0.75, 1e-12));
        assert!(close(p.domain.measure(), 1.0, 1e-15));
    }

    #[test]
    fn peak_level_gives_zero_rate() {
        for psd in [Psd::rect(0.5).unwrap(), Psd::triangle(2.0).unwrap(), Psd::gauss_markov(1.0).unwrap()] {
            let p = drf_from_theta(&psd, psd.ess_sup()).unwrap();
            assert_eq!(p.rate, 0.0);
            assert!(close(p.distortion, 1.0, 1e-12));
        }
    }

    #[test]
    fn inverse_examples() {
        let p = theta_from_rate(&Psd::rect(0.5).unwrap(), 1.0, None).unwrap();
        assert!(close(p.theta, 0.25, 1e-12));

        let tri = Psd::triangle(1.0).unwrap();
        let r = 0.5 - (0.5 - 0.5 * LN_2) / LN_2;
        let p = theta_from_rate(&tri, r, None).unwrap();
        assert!(close(p.theta, 0.5, 1e-9));

        let p = theta_from_rate(&Psd::gauss_markov(1.0).unwrap(), 0.0, None).unwrap();
        assert!(close(p.distortion, 1.0, 1e-12));
    }

    #[test]
    fn rect_closed_form_over_rates() {
        let f_b = 0.5;
        let psd = Psd::rect(f_b).unwrap();
        for i in 0..=20 {
            let r = 0.5 * i as f64;
            let p = theta_from_rate(&psd, r, None).unwrap();
            assert!(close(p.distortion, (-r / f_b).exp2(), 1e-8), "R={r}");
        }
    }

    #[test]
    fn restricted_domain_caps_captured_energy() {
        let tri = Psd::triangle(1.0).unwrap();
        let dom = SpectralSet::centered(0.5);
        let p = theta_from_rate(&tri, 40.0, Some(&dom)).unwrap();
        assert_eq!(p.system, WaterfillSystem::Sampled);
        // At high rate the distortion approaches sigma^2 minus the energy on the domain.
        let floor = 1.0 - crate::spectra::energy_on(&tri, &dom);
        assert!(p.distortion >= floor - 1e-12 && p.distortion - floor < 1e-6);
    }

    #[test]
    fn distortion_inverse_and_range() {
        let tri = Psd::triangle(1.0).unwrap();
        let p = theta_from_distortion(&tri, 0.75, None).unwrap();
        assert!(close(p.theta, 0.5, 1e-12));
        assert!(matches!(theta_from_distortion(&tri, 1.0, None), Err(Error::Domain(_))));
        assert!(matches!(theta_from_distortion(&tri, 0.0, None), Err(Error::Domain(_))));
    }

    #[test]
    fn clipped_energy_of_triangle() {
        // ∫ min(1 - |f|, theta) over [-1, 1] is 2 theta - theta^2.
        let tri = Psd::triangle(1.0).unwrap();
        for theta in [0.0024, 0.3, 0.9] {
            let v = clipped_energy_on(&tri, &tri.support(), theta);
            assert!(close(v, 2.0 * theta - theta * theta, 1e-14), "{theta}: {v}");
        }
    }

    #[test]
    fn negative_rate_is_rejected() {
        assert!(theta_from_rate(&Psd::rect(1.0).unwrap(), -1.0, None).is_err());
        assert!(drf_from_theta(&Psd::rect(1.0).unwrap(), 0.0).is_err());
    }
}
