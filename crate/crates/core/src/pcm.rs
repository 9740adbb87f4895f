//! PCM: uniform sampling followed by a scalar quantizer with `q = R / f_s`
//! bits per sample.
//!
//! The quantizer is modelled as additive white noise of variance
//! `c0 / (2^q - 1)^2`, independent of its input. With an ideal low-pass
//! pre-filter at `f_s / 2` and Wiener reconstruction, the distortion splits
//! into the sampling error and an in-band quantization error:
//!
//! ```text
//! D~(f_s, R) = mmse(f_s) + ∫_{-f_s/2}^{f_s/2} S / (1 + f_s S / sigma_eta^2) df
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{golden_section_min, integrate_split, QuadTolerance};
use crate::sampled::{check_fs, sub_sampling_mmse};
use crate::spectra::{SpectralSet, Spectrum};

/// Ratio `c0 / sigma_in^2` for a Gaussian input and the asymptotically
/// optimal point density of a scalar quantizer.
pub const GAUSSIAN_POINT_DENSITY_CONSTANT: f64 = PI * 1.732_050_807_568_877_2 / 2.0;

/// Coarse scan points before the golden-section refinement of `f_s*`.
const SCAN_POINTS: usize = 256;

/// Hard cap on aliasing terms for spectra and filters of unbounded extent.
const MAX_ALIASES: i64 = 1_000_000;

/// Bitrate and quantizer model of a PCM system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcmConfig {
    pub rate: f64,
    /// Numerator of the quantization noise variance.
    pub c0: f64,
    /// Quantizer input variance that `c0` was computed for.
    pub sigma_in_sq: f64,
    /// Upper end of the `f_s` search; never above `rate`.
    pub fs_max: f64,
    /// Scale `c0` with the actual filtered input variance
    /// `sigma_X^2 - mmse(f_s)` instead of holding it at `sigma_in_sq`.
    pub exact_sigma_in: bool,
}

impl PcmConfig {
    /// Defaults for a source of variance `signal_variance`: `sigma_in^2` is
    /// approximated by it and `f_s` ranges up to one bit per sample.
    pub fn new(rate: f64, signal_variance: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::Config(format!("PCM bitrate must be positive, got {rate}")));
        }
        if !(signal_variance.is_finite() && signal_variance > 0.0) {
            return Err(Error::Config(format!("signal variance must be positive, got {signal_variance}")));
        }
        Ok(Self {
            rate,
            c0: GAUSSIAN_POINT_DENSITY_CONSTANT * signal_variance,
            sigma_in_sq: signal_variance,
            fs_max: rate,
            exact_sigma_in: false,
        })
    }

    pub fn with_c0(mut self, c0: f64) -> Result<Self> {
        if !(c0.is_finite() && c0 > 0.0) {
            return Err(Error::Config(format!("c0 must be positive, got {c0}")));
        }
        self.c0 = c0;
        Ok(self)
    }

    pub fn with_fs_max(mut self, fs_max: f64) -> Result<Self> {
        if !(fs_max.is_finite() && fs_max > 0.0) {
            return Err(Error::Config(format!("f_s search bound must be positive, got {fs_max}")));
        }
        self.fs_max = fs_max.min(self.rate);
        Ok(self)
    }

    pub fn with_exact_sigma_in(mut self, exact: bool) -> Self {
        self.exact_sigma_in = exact;
        self
    }

    fn check_fs(&self, f_s: f64) -> Result<()> {
        check_fs(f_s)?;
        if f_s > self.rate {
            return Err(Error::Domain(format!(
                "f_s = {f_s} exceeds the bitrate {}: PCM needs at least one bit per sample",
                self.rate
            )));
        }
        Ok(())
    }
}

/// `c0 / (2^{R/f_s} - 1)^2`, the quantization noise variance at `f_s`.
pub fn quantizer_noise_var(config: &PcmConfig, f_s: f64) -> Result<f64> {
    config.check_fs(f_s)?;
    let levels = (config.rate / f_s).exp2() - 1.0;
    Ok(config.c0 / (levels * levels))
}

/// Quantization noise variance honouring [`PcmConfig::exact_sigma_in`].
pub fn noise_var_for<S: Spectrum + ?Sized>(spec: &S, config: &PcmConfig, f_s: f64) -> Result<f64> {
    let base = quantizer_noise_var(config, f_s)?;
    if !config.exact_sigma_in {
        return Ok(base);
    }
    let sigma_in = spec.variance() - sub_sampling_mmse(spec, f_s)?;
    Ok(base * sigma_in / config.sigma_in_sq)
}

/// Frequency response of an analog pre-sampling filter.
pub trait FilterResponse: Send + Sync {
    fn gain(&self, f: f64) -> Complex64;

    /// Half-width of a band outside which the gain vanishes (infinite if
    /// the filter has unbounded support).
    fn extent(&self) -> f64 {
        f64::INFINITY
    }

    /// Points where the gain is discontinuous.
    fn edges(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Ideal pre-filters.
#[derive(Debug, Clone, PartialEq)]
pub enum Prefilter {
    /// Unit gain on `|f| <= cutoff`.
    LowPass { cutoff: f64 },
    /// Unit gain on a spectral set.
    Band(SpectralSet),
    AllPass,
}

impl FilterResponse for Prefilter {
    fn gain(&self, f: f64) -> Complex64 {
        let pass = match self {
            Prefilter::LowPass { cutoff } => f.abs() <= *cutoff,
            Prefilter::Band(set) => set.contains(f),
            Prefilter::AllPass => true,
        };
        Complex64::new(if pass { 1.0 } else { 0.0 }, 0.0)
    }

    fn extent(&self) -> f64 {
        match self {
            Prefilter::LowPass { cutoff } => *cutoff,
            Prefilter::Band(set) => set.hull().map_or(0.0, |(a, b)| a.abs().max(b.abs())),
            Prefilter::AllPass => f64::INFINITY,
        }
    }

    fn edges(&self) -> Vec<f64> {
        match self {
            Prefilter::LowPass { cutoff } => vec![-cutoff, *cutoff],
            Prefilter::Band(set) => set.intervals().iter().flat_map(|&(a, b)| [a, b]).collect(),
            Prefilter::AllPass => Vec::new(),
        }
    }
}

/// Half-width of the band where `S |H|^2` can be non-zero.
fn joint_extent<S: Spectrum + ?Sized, H: FilterResponse + ?Sized>(spec: &S, filter: &H) -> f64 {
    let spec_extent = spec
        .support()
        .hull()
        .map_or(0.0, |(a, b)| a.abs().max(b.abs()));
    spec_extent.min(filter.extent())
}

/// `(Σ_k S^2 |H|^2, Σ_k S |H|^2)` over the aliases `f - k f_s`.
fn alias_sums<S: Spectrum + ?Sized, H: FilterResponse + ?Sized>(spec: &S, filter: &H, f_s: f64, f: f64, k_max: Option<i64>) -> (f64, f64) {
    let term = |k: i64| {
        let g = f - k as f64 * f_s;
        let s = spec.density(g);
        if s == 0.0 {
            return (0.0, 0.0);
        }
        let h2 = filter.gain(g).norm_sqr();
        (s * s * h2, s * h2)
    };
    let (mut num, mut den) = term(0);
    match k_max {
        Some(kmax) => {
            for k in 1..=kmax {
                let (a, b) = term(k);
                let (c, d) = term(-k);
                num += a + c;
                den += b + d;
            }
        }
        None => {
            for k in 1..=MAX_ALIASES {
                let (a, b) = term(k);
                let (c, d) = term(-k);
                num += a + c;
                den += b + d;
                if b + d <= 1e-10 * den && a + c <= 1e-10 * num {
                    break;
                }
            }
        }
    }
    (num, den)
}

fn alias_count(extent: f64, f_s: f64) -> Option<i64> {
    extent.is_finite().then(|| ((extent + 0.5 * f_s) / f_s).ceil() as i64)
}

/// Points inside the fundamental cell where the folded integrand has kinks.
fn folded_breaks<S: Spectrum + ?Sized, H: FilterResponse + ?Sized>(spec: &S, filter: &H, f_s: f64, k_max: i64) -> Vec<f64> {
    let half = 0.5 * f_s;
    let mut raw = spec.breakpoints();
    raw.extend(filter.edges());
    let mut out = Vec::new();
    for b in raw.into_iter().filter(|b| b.is_finite()) {
        for k in -k_max..=k_max {
            let x = b - k as f64 * f_s;
            if x > -half && x < half {
                out.push(x);
            }
        }
    }
    out
}

/// Minimal time-averaged MSE of PCM with pre-filter `filter` and white
/// quantization noise of variance `sigma_eta_sq` added to the samples:
///
/// `sigma^2 - ∫_{-f_s/2}^{f_s/2} Σ_k S^2 |H|^2 / (Σ_k S |H|^2 + sigma_eta^2 / f_s)`.
pub fn pcm_mmse_general<S, H>(spec: &S, filter: &H, f_s: f64, sigma_eta_sq: f64) -> Result<f64>
where
    S: Spectrum + ?Sized,
    H: FilterResponse + ?Sized,
{
    check_fs(f_s)?;
    if !(sigma_eta_sq.is_finite() && sigma_eta_sq >= 0.0) {
        return Err(Error::Domain(format!("noise variance must be >= 0, got {sigma_eta_sq}")));
    }
    let k_max = alias_count(joint_extent(spec, filter), f_s);
    let noise = sigma_eta_sq / f_s;
    let integrand = |f: f64| {
        let (num, den) = alias_sums(spec, filter, f_s, f, k_max);
        if den + noise > 0.0 {
            num / (den + noise)
        } else {
            0.0
        }
    };
    let breaks = folded_breaks(spec, filter, f_s, k_max.unwrap_or(4).min(64));
    let captured = integrate_split(integrand, -0.5 * f_s, 0.5 * f_s, &breaks, QuadTolerance::default());
    Ok((spec.variance() - captured).max(0.0))
}

/// `D~(f_s, R)` with the optimal low-pass pre-filter. Only unimodal spectra
/// are accepted; for anything else the best filter is not a low-pass and
/// [`pcm_mmse_general`] should be used with an explicit filter.
pub fn pcm_distortion<S: Spectrum + ?Sized>(spec: &S, config: &PcmConfig, f_s: f64) -> Result<f64> {
    if !spec.is_unimodal() {
        return Err(Error::Domain(
            "PCM distortion with the low-pass pre-filter needs a unimodal PSD; use pcm_mmse_general with an explicit filter"
                .into(),
        ));
    }
    let sigma_eta_sq = noise_var_for(spec, config, f_s)?;
    let mmse = sub_sampling_mmse(spec, f_s)?;
    let half = 0.5 * f_s;
    let quantization = if sigma_eta_sq == 0.0 {
        0.0
    } else {
        let g = |f: f64| {
            let s = spec.density(f);
            s * sigma_eta_sq / (sigma_eta_sq + f_s * s)
        };
        let breaks: Vec<f64> = spec.breakpoints().into_iter().filter(|b| b.abs() < half).collect();
        integrate_split(g, -half, half, &breaks, QuadTolerance::default())
    };
    Ok(mmse + quantization)
}

/// The sampling frequency minimizing `D~(f_s, R)` over `(0, min(R, fs_max)]`,
/// with the minimal distortion. `D~` is not known to be unimodal in `f_s`, so
/// a coarse scan picks the bracket for the golden-section refinement.
pub fn optimal_pcm_fs<S: Spectrum + ?Sized>(spec: &S, config: &PcmConfig) -> Result<(f64, f64)> {
    let scale = spec.bandwidth_scale();
    let hi = config.fs_max.min(config.rate);
    let grid: Vec<f64> = (1..=SCAN_POINTS).map(|i| hi * i as f64 / SCAN_POINTS as f64).collect();
    let values = grid
        .iter()
        .map(|&f| pcm_distortion(spec, config, f))
        .collect::<Result<Vec<f64>>>()?;
    let best = (0..grid.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    let lo_edge = if best == 0 { 0.5 * grid[0] } else { grid[best - 1] };
    let hi_edge = grid[(best + 1).min(grid.len() - 1)];
    let objective = |f: f64| pcm_distortion(spec, config, f).unwrap_or(f64::INFINITY);
    let (f_star, d_star) = golden_section_min(objective, lo_edge, hi_edge, 1e-6 * scale);
    if d_star <= values[best] {
        Ok((f_star, d_star))
    } else {
        Ok((grid[best], values[best]))
    }
}

/// Frequency response of the reconstruction filter applied to the quantized
/// samples:
///
/// `W(f) = conj(H(f)) S(f) / (Σ_k |H(f - k f_s)|^2 S(f - k f_s) + sigma_eta^2 / f_s)`.
pub fn wiener_filter<S, H>(spec: &S, filter: &H, f_s: f64, sigma_eta_sq: f64, f: f64) -> Result<Complex64>
where
    S: Spectrum + ?Sized,
    H: FilterResponse + ?Sized,
{
    check_fs(f_s)?;
    let numerator = filter.gain(f).conj() * spec.density(f);
    if numerator == Complex64::new(0.0, 0.0) {
        return Ok(numerator);
    }
    let k_max = alias_count(joint_extent(spec, filter), f_s);
    let (_, den) = alias_sums(spec, filter, f_s, f, k_max);
    let total = den + sigma_eta_sq / f_s;
    Ok(if total > 0.0 { numerator / total } else { Complex64::new(0.0, 0.0) })
}

/// For a flat spectrum of half-width `f_b`, whether the slope of the
/// quantization error at `f_s = 2 f_b` stays below that of the sampling
/// error, i.e. `c0 / sigma^2 < (2^{R / (2 f_b)} - 1)^2`. When this holds,
/// Nyquist-rate sampling minimizes `D~`.
pub fn flat_nyquist_condition(config: &PcmConfig, f_b: f64, signal_variance: f64) -> bool {
    let levels = (0.5 * config.rate / f_b).exp2() - 1.0;
    config.c0 / signal_variance < levels * levels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampled::sampled_drf;
    use crate::spectra::Psd;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn config(rate: f64) -> PcmConfig {
        PcmConfig::new(rate, 1.0).unwrap()
    }

    #[test]
    fn constant_matches_gaussian_point_density() {
        assert!(close(GAUSSIAN_POINT_DENSITY_CONSTANT, PI * 3f64.sqrt() / 2.0, 1e-15));
    }

    #[test]
    fn noise_variance_examples() {
        let c = config(4.0);
        assert!(close(quantizer_noise_var(&c, 1.0).unwrap(), c.c0 / 225.0, 1e-15));
        assert!(close(quantizer_noise_var(&c, 1.0).unwrap(), 0.012092, 1e-6));
        assert!(close(quantizer_noise_var(&c, 4.0).unwrap(), c.c0, 1e-15));
        assert!(quantizer_noise_var(&c, 0.01).unwrap() < 1e-200);
        assert_eq!(quantizer_noise_var(&c, 1e-4).unwrap(), 0.0);
        assert!(matches!(quantizer_noise_var(&c, 4.5), Err(Error::Domain(_))));
        assert!(quantizer_noise_var(&c, 0.0).is_err());
    }

    #[test]
    fn noiseless_general_form_is_sampling_mmse() {
        for psd in [Psd::triangle(1.0).unwrap(), Psd::gauss_markov(1.0).unwrap(), Psd::rect(0.5).unwrap()] {
            for f_s in [0.3, 1.0, 1.7] {
                let h = Prefilter::LowPass { cutoff: 0.5 * f_s };
                let general = pcm_mmse_general(&psd, &h, f_s, 0.0).unwrap();
                let mmse = sub_sampling_mmse(&psd, f_s).unwrap();
                assert!(close(general, mmse, 1e-7), "{} f_s={f_s}: {general} vs {mmse}", psd.describe());
            }
        }
    }

    #[test]
    fn zero_filter_passes_nothing() {
        let psd = Psd::triangle(1.0).unwrap();
        let d = pcm_mmse_general(&psd, &Prefilter::Band(SpectralSet::empty()), 1.0, 0.1).unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn flat_spectrum_at_nyquist() {
        let rect = Psd::rect(0.5).unwrap();
        let c = config(4.0);
        let eta = quantizer_noise_var(&c, 1.0).unwrap();
        let expected = 1.0 / (1.0 + 1.0 / eta);
        let general = pcm_mmse_general(&rect, &Prefilter::LowPass { cutoff: 0.5 }, 1.0, eta).unwrap();
        assert!(close(general, expected, 1e-12));
        assert!(close(expected, 0.011947, 1e-6));
        assert!(close(pcm_distortion(&rect, &c, 1.0).unwrap(), expected, 1e-12));
    }

    #[test]
    fn general_form_matches_low_pass_decomposition() {
        let c = config(3.0);
        for psd in [Psd::triangle(1.0).unwrap(), Psd::gauss_markov(1.0).unwrap()] {
            for f_s in [0.4, 1.1, 2.5] {
                let eta = quantizer_noise_var(&c, f_s).unwrap();
                let h = Prefilter::LowPass { cutoff: 0.5 * f_s };
                let a = pcm_mmse_general(&psd, &h, f_s, eta).unwrap();
                let b = pcm_distortion(&psd, &c, f_s).unwrap();
                assert!(close(a, b, 1e-8), "{} f_s={f_s}: {a} vs {b}", psd.describe());
            }
        }
    }

    #[test]
    fn one_bit_per_sample_is_worse_than_the_bound() {
        for psd in [Psd::triangle(1.0).unwrap(), Psd::gauss_markov(1.0).unwrap(), Psd::rect(0.5).unwrap()] {
            let c = config(1.5);
            let pcm = pcm_distortion(&psd, &c, 1.5).unwrap();
            let bound = sampled_drf(&psd, 1.5, 1.5).unwrap().distortion;
            assert!(pcm > bound);
        }
    }

    #[test]
    fn vanishing_sampling_rate_loses_everything() {
        let d = pcm_distortion(&Psd::triangle(1.0).unwrap(), &config(4.0), 1e-9).unwrap();
        assert!(close(d, 1.0, 1e-8));
    }

    #[test]
    fn non_unimodal_spectra_are_rejected() {
        let psd = Psd::tabulated(vec![0.0, 1.0, 2.0], vec![0.5, 2.0, 0.0]).unwrap();
        assert!(matches!(pcm_distortion(&psd, &config(4.0), 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn optimal_rates() {
        let rect = Psd::rect(0.5).unwrap();
        let (f, _) = optimal_pcm_fs(&rect, &config(4.0)).unwrap();
        assert!(close(f, 1.0, 1e-4), "{f}");

        let tri = Psd::triangle(1.0).unwrap();
        let (f, d) = optimal_pcm_fs(&tri, &config(4.0)).unwrap();
        assert!(f > 0.0 && f < 2.0 - 1e-3, "{f}");
        for g in [0.5 * f, 0.9 * f, 1.1 * f, 2.0, 3.0] {
            assert!(pcm_distortion(&tri, &config(4.0), g).unwrap() >= d - 1e-12);
        }

        let gm = Psd::gauss_markov(1.0).unwrap();
        let (f, _) = optimal_pcm_fs(&gm, &config(4.0)).unwrap();
        assert!(f > 0.0 && f < 4.0, "{f}");
    }

    #[test]
    fn exact_input_variance_lowers_the_noise_below_nyquist() {
        let tri = Psd::triangle(1.0).unwrap();
        let approx = config(4.0);
        let exact = approx.with_exact_sigma_in(true);
        let a = noise_var_for(&tri, &approx, 1.0).unwrap();
        let b = noise_var_for(&tri, &exact, 1.0).unwrap();
        assert!(close(b, 0.75 * a, 1e-12));
        assert!(close(noise_var_for(&tri, &exact, 3.0).unwrap(), noise_var_for(&tri, &approx, 3.0).unwrap(), 1e-15));
    }

    #[test]
    fn wiener_examples() {
        let rect = Psd::rect(0.5).unwrap();
        let h = Prefilter::LowPass { cutoff: 0.5 };
        assert!(close(wiener_filter(&rect, &h, 1.0, 0.0, 0.2).unwrap().re, 1.0, 1e-15));
        assert_eq!(wiener_filter(&rect, &h, 1.0, 0.0, 0.7).unwrap().re, 0.0);
        assert!(wiener_filter(&rect, &h, 1.0, 1e12, 0.2).unwrap().norm() < 1e-11);
    }

    #[test]
    fn wiener_gain_reproduces_captured_energy() {
        // ∫ S(f) W(f) H(f) over the pass band equals the energy term of the MMSE.
        let tri = Psd::triangle(1.0).unwrap();
        let f_s = 1.2;
        let eta = 0.05;
        let h = Prefilter::LowPass { cutoff: 0.5 * f_s };
        let captured = crate::numeric::integrate_split(
            |f| (wiener_filter(&tri, &h, f_s, eta, f).unwrap() * h.gain(f)).re * tri.density(f),
            -0.5 * f_s,
            0.5 * f_s,
            &[0.0],
            QuadTolerance::default(),
        );
        let mmse = pcm_mmse_general(&tri, &h, f_s, eta).unwrap();
        assert!(close(1.0 - captured, mmse, 1e-10));
    }

    #[test]
    fn aliasing_all_pass_filter() {
        // Without a pre-filter the aliases of the triangle fold into the cell.
        let tri = Psd::triangle(1.0).unwrap();
        let lp = pcm_mmse_general(&tri, &Prefilter::LowPass { cutoff: 0.5 }, 1.0, 0.0).unwrap();
        let ap = pcm_mmse_general(&tri, &Prefilter::AllPass, 1.0, 0.0).unwrap();
        assert!(ap > lp);
    }

    #[test]
    fn flat_condition_holds_for_typical_parameters() {
        assert!(flat_nyquist_condition(&config(4.0), 0.5, 1.0));
        assert!(!flat_nyquist_condition(&config(0.5), 0.5, 1.0));
    }
}
