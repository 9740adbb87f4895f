//! Sampling and encoding a signal observed through additive Gaussian noise.
//!
//! The best the encoder can do is describe the Wiener estimate of the signal
//! from its noisy version, whose spectrum is `S_X^2 / (S_X + S_N)`. Every
//! quantity of the noise-free problem carries over with this effective
//! spectrum in place of `S_X`, plus the irreducible estimation error
//! `sigma_X^2 - ∫ S_eff`.

use crate::critical::CriticalFrequencyPoint;
use crate::error::{Error, Result};
use crate::sampled::{optimal_fstar, SampledDrfResult};
use crate::spectra::{energy_on, integrate_density_map, scan_superlevel, Psd, SpectralSet, Spectrum};
use crate::waterfill::{theta_from_rate, WaterfillPoint, WaterfillSystem};

/// Grid points per unit interval when locating level crossings of an
/// effective spectrum under coloured noise.
const SCAN_POINTS: usize = 4096;

/// Additive noise spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum Noise {
    /// Constant density `level` on the whole line.
    White { level: f64 },
    Colored(Psd),
}

impl Noise {
    pub fn density(&self, f: f64) -> f64 {
        match self {
            Noise::White { level } => *level,
            Noise::Colored(psd) => psd.density(f),
        }
    }
}

/// `S_X^2 / (S_X + S_N)`, with `0` where both vanish.
pub fn effective_density(signal: f64, noise: f64) -> f64 {
    let total = signal + noise;
    if total > 0.0 {
        signal * signal / total
    } else {
        0.0
    }
}

/// Spectrum of the Wiener estimate of the signal from signal plus noise.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveSpectrum {
    signal: Psd,
    noise: Noise,
    variance: f64,
    ess_sup: f64,
}

impl EffectiveSpectrum {
    fn new(signal: Psd, noise: Noise) -> Self {
        let mut spec = Self {
            signal,
            noise,
            variance: 0.0,
            ess_sup: 0.0,
        };
        spec.ess_sup = match &spec.noise {
            // S^2 / (S + c) increases with S.
            Noise::White { level } => effective_density(spec.signal.ess_sup(), *level),
            Noise::Colored(_) => spec.scan_peak(),
        };
        let (a, b) = spec.signal.support().hull().unwrap_or((0.0, 0.0));
        spec.variance = integrate_density_map(&spec, a, b, |s| s);
        spec
    }

    fn scan_peak(&self) -> f64 {
        // A dense grid over where the signal is non-negligible, plus every
        // breakpoint of either spectrum.
        let region = self.signal.superlevel_set(1e-6 * self.signal.ess_sup());
        let mut points: Vec<f64> = self.breakpoints();
        for &(a, b) in region.intervals() {
            let n = SCAN_POINTS;
            points.extend((0..=n).map(|i| a + (b - a) * i as f64 / n as f64));
        }
        points
            .into_iter()
            .filter(|f| f.is_finite())
            .map(|f| self.density(f))
            .fold(0.0, f64::max)
    }

    pub fn signal(&self) -> &Psd {
        &self.signal
    }

    pub fn noise(&self) -> &Noise {
        &self.noise
    }
}

impl Spectrum for EffectiveSpectrum {
    fn density(&self, f: f64) -> f64 {
        effective_density(self.signal.density(f), self.noise.density(f))
    }

    fn variance(&self) -> f64 {
        self.variance
    }

    fn ess_sup(&self) -> f64 {
        self.ess_sup
    }

    fn landau_rate(&self) -> f64 {
        self.signal.landau_rate()
    }

    fn is_unimodal(&self) -> bool {
        matches!(self.noise, Noise::White { .. }) && self.signal.is_unimodal()
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.signal.breakpoints();
        if let Noise::Colored(psd) = &self.noise {
            b.extend(psd.breakpoints());
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    fn support(&self) -> SpectralSet {
        self.signal.support()
    }

    fn bandwidth_scale(&self) -> f64 {
        self.signal.bandwidth_scale()
    }

    fn superlevel_set(&self, theta: f64) -> SpectralSet {
        if theta >= self.ess_sup {
            return SpectralSet::empty();
        }
        match &self.noise {
            Noise::White { level } => {
                // s^2 / (s + c) > theta  <=>  s > (theta + sqrt(theta^2 + 4 theta c)) / 2
                let threshold = 0.5 * (theta + (theta * theta + 4.0 * theta * level).sqrt());
                self.signal.superlevel_set(threshold)
            }
            Noise::Colored(_) => {
                let region = self.signal.superlevel_set(theta);
                let width = region.measure();
                let points = ((width * SCAN_POINTS as f64).ceil() as usize).clamp(SCAN_POINTS, 1 << 20);
                scan_superlevel(self, &region, theta, points)
            }
        }
    }
}

/// A signal observed through additive noise, with the derived effective
/// spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisySource {
    effective: EffectiveSpectrum,
    mmse_floor: f64,
}

impl NoisySource {
    pub fn new(signal: Psd, noise: Noise) -> Result<Self> {
        if let Noise::White { level } = noise {
            if !(level.is_finite() && level >= 0.0) {
                return Err(Error::Config(format!("noise level must be finite and >= 0, got {level}")));
            }
        }
        let effective = EffectiveSpectrum::new(signal, noise);
        let mmse_floor = (effective.signal.variance() - effective.variance).max(0.0);
        Ok(Self { effective, mmse_floor })
    }

    /// Signal plus white noise of density `level`.
    pub fn white(signal: Psd, level: f64) -> Result<Self> {
        Self::new(signal, Noise::White { level })
    }

    pub fn signal(&self) -> &Psd {
        &self.effective.signal
    }

    pub fn noise(&self) -> &Noise {
        &self.effective.noise
    }

    pub fn effective(&self) -> &EffectiveSpectrum {
        &self.effective
    }

    /// Error of the Wiener estimate from the complete noisy path,
    /// `sigma_X^2 - ∫ S_eff`.
    pub fn mmse_floor(&self) -> f64 {
        self.mmse_floor
    }

    /// The effective density at `f`.
    pub fn effective_psd(&self, f: f64) -> f64 {
        self.effective.density(f)
    }

    fn signal_variance(&self) -> f64 {
        self.signal().variance()
    }
}

/// The indirect distortion-rate function: waterfilling over the effective
/// spectrum, measured against the signal's variance.
pub fn dt_idrf(source: &NoisySource, rate: f64) -> Result<WaterfillPoint> {
    let eff = source.effective();
    let mut point =
        theta_from_rate(eff, rate, None)?.rebased(eff.variance(), source.signal_variance());
    point.system = WaterfillSystem::Noisy;
    Ok(point)
}

/// `D̄(f_s, R)` for the noisy observation.
pub fn noisy_sampled_drf(source: &NoisySource, f_s: f64, rate: f64) -> Result<SampledDrfResult> {
    let eff = source.effective();
    let fstar = optimal_fstar(eff, f_s)?;
    let point = theta_from_rate(eff, rate, Some(&fstar))?.rebased(eff.variance(), source.signal_variance());
    let mmse = (source.signal_variance() - energy_on(eff, &fstar)).max(0.0);
    Ok(SampledDrfResult {
        f_s,
        rate,
        distortion: point.distortion,
        mmse_component: mmse,
        fstar,
        theta: point.theta,
    })
}

/// Critical sampling frequency for the noisy observation: the measure of
/// `{S_eff > theta(R)}`.
pub fn noisy_fdr(source: &NoisySource, rate: f64) -> Result<CriticalFrequencyPoint> {
    let point = dt_idrf(source, rate)?;
    Ok(CriticalFrequencyPoint {
        rate,
        distortion: point.distortion,
        f_dr: point.domain.measure(),
        theta: point.theta,
    })
}
