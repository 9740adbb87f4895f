//! The sampled distortion-rate bound `D̄(f_s, R)`.
//!
//! Sampling at frequency `f_s` with the best pre-sampling filter bank lets the
//! encoder see at most a measure-`f_s` slice `F*` of the spectrum, chosen to
//! carry maximal energy. The bound is waterfilling restricted to that slice:
//!
//! ```text
//! D̄(f_s, R) = sigma^2 - ∫_{F*} (S - theta)+ = mmse(f_s) + ∫_{F*} min(S, theta)
//! ```

use crate::error::{Error, Result};
use crate::spectra::{energy_on, SpectralSet, Spectrum};
use crate::waterfill::{theta_from_distortion, theta_from_rate, WaterfillPoint};

/// `D̄(f_s, R)` together with the pieces of its decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDrfResult {
    pub f_s: f64,
    pub rate: f64,
    pub distortion: f64,
    /// Error left by sampling alone, `sigma^2 - ∫_{F*} S`.
    pub mmse_component: f64,
    pub fstar: SpectralSet,
    pub theta: f64,
}

pub(crate) fn check_fs(f_s: f64) -> Result<()> {
    if f_s.is_finite() && f_s > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("sampling frequency must be positive, got {f_s}")))
    }
}

/// The maximal-energy spectral set of measure `min(f_s, landau rate)`.
///
/// Unimodal spectra use the centered interval. Otherwise the level `tau` of a
/// superlevel set `{S > tau}` is bisected until its measure meets `f_s`; if a
/// plateau of `S` makes the measure jump past `f_s`, each plateau piece
/// contributes the same fraction of its length, taken on the side facing the
/// origin, so the result stays symmetric.
pub fn optimal_fstar<S: Spectrum + ?Sized>(spec: &S, f_s: f64) -> Result<SpectralSet> {
    check_fs(f_s)?;
    if f_s >= spec.landau_rate() {
        return Ok(spec.support());
    }
    if spec.is_unimodal() {
        return Ok(SpectralSet::centered(f_s));
    }
    let measure_at = |tau: f64| spec.superlevel_set(tau).measure();
    // measure_at(hi) <= f_s < measure_at(lo) throughout.
    let (mut lo, mut hi) = (0.0, spec.ess_sup());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if measure_at(mid) > f_s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let inner = spec.superlevel_set(hi);
    let missing = f_s - inner.measure();
    if missing <= 1e-12 {
        return Ok(inner);
    }
    let plateau = spec.superlevel_set(lo).difference(&inner);
    let fraction = (missing / plateau.measure()).min(1.0);
    let slices = plateau.intervals().iter().map(|&(a, b)| {
        let take = fraction * (b - a);
        let mid = 0.5 * (a + b);
        if a >= 0.0 {
            (a, a + take)
        } else if b <= 0.0 {
            (b - take, b)
        } else {
            (mid - 0.5 * take, mid + 0.5 * take)
        }
    });
    Ok(inner.union(&SpectralSet::from_intervals(slices)))
}

/// Error of the best estimate of the signal from its samples at `f_s`, with
/// no constraint on the bitrate.
pub fn sub_sampling_mmse<S: Spectrum + ?Sized>(spec: &S, f_s: f64) -> Result<f64> {
    let fstar = optimal_fstar(spec, f_s)?;
    Ok((spec.variance() - energy_on(spec, &fstar)).max(0.0))
}

/// `D̄(f_s, R)`: waterfilling restricted to `F*(f_s)`.
pub fn sampled_drf<S: Spectrum + ?Sized>(spec: &S, f_s: f64, rate: f64) -> Result<SampledDrfResult> {
    let fstar = optimal_fstar(spec, f_s)?;
    let point = theta_from_rate(spec, rate, Some(&fstar))?;
    let mmse = (spec.variance() - energy_on(spec, &fstar)).max(0.0);
    Ok(SampledDrfResult {
        f_s,
        rate,
        distortion: point.distortion,
        mmse_component: mmse,
        fstar,
        theta: point.theta,
    })
}

/// The smallest rate with `D̄(f_s, R) <= distortion`.
///
/// Attainable targets lie strictly between the sampling MMSE and `sigma^2`.
pub fn rate_for_distortion<S: Spectrum + ?Sized>(spec: &S, f_s: f64, distortion: f64) -> Result<WaterfillPoint> {
    let fstar = optimal_fstar(spec, f_s)?;
    theta_from_distortion(spec, distortion, Some(&fstar))
}
