//! Standard curves from fixed model setups.
//!
//! | name  | curves |
//! |-------|--------|
//! | fig1  | `D̄(f_s, R)`, `D_X(R)` and the sampling MMSE versus `f_s`, triangle PSD, `R = 1` |
//! | fig6  | `f_DR` versus `R` for the rect, triangle and Gauss-Markov PSDs |
//! | fig8  | `f_DR` versus SNR in dB, triangle PSD in white noise, `R = 1, 2` |
//! | fig11 | PCM distortion and `D̄` versus `f_s` for the three PSDs, `R = 4` |
//! | fig12 | PCM-optimal `f_s*` and `f_DR` versus `R`, triangle PSD |
//! | fig13 | PCM-optimal `f_s*` and `f_DR` versus `R`, Gauss-Markov PSD |
//!
//! All models use a unit bandwidth parameter (`f_B = 1` or `f_0 = 1`) and unit
//! variance. With `normalize`, frequencies and rates are divided by `2 f_B`
//! (or `2 f_0`).

use rayon::prelude::*;
use sampled_rd::critical::fdr_from_rate;
use sampled_rd::noisy::{noisy_fdr, NoisySource};
use sampled_rd::pcm::{optimal_pcm_fs, pcm_distortion, PcmConfig};
use sampled_rd::sampled::{sampled_drf, sub_sampling_mmse};
use sampled_rd::waterfill::theta_from_rate;
use sampled_rd::{Psd, Spectrum};

use crate::format::fmt_g12;
use crate::series::CurveSeries;
use crate::{CliError, CliResult};

pub const FIGURE_NAMES: [&str; 6] = ["fig1", "fig6", "fig8", "fig11", "fig12", "fig13"];

/// Direction a figure's series are expected to move in along `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    NonIncreasing,
    NonDecreasing,
    Free,
}

/// A built figure: its series and the trend each one follows.
#[derive(Debug, Clone)]
pub struct Figure {
    pub series: Vec<CurveSeries>,
    pub trends: Vec<Trend>,
}

/// Evaluates `f` at every `x` in parallel, keeping the input order.
pub fn evaluate<F>(xs: &[f64], f: F) -> CliResult<Vec<(f64, f64)>>
where
    F: Fn(f64) -> CliResult<f64> + Sync + Send,
{
    xs.par_iter().map(|&x| f(x).map(|y| (x, y))).collect()
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    crate::grid::parse_grid(&format!("{start}:{stop}:{step}")).expect("static grid")
}

fn scaled(points: Vec<(f64, f64)>, x_scale: f64, y_scale: f64) -> Vec<(f64, f64)> {
    points.into_iter().map(|(x, y)| (x / x_scale, y / y_scale)).collect()
}

fn models() -> Vec<(&'static str, Psd)> {
    vec![
        ("rect", Psd::rect(1.0).expect("valid model")),
        ("triangle", Psd::triangle(1.0).expect("valid model")),
        ("gauss-markov", Psd::gauss_markov(1.0).expect("valid model")),
    ]
}

fn freq_axis(name: &str, normalize: bool) -> String {
    if normalize {
        format!("{name}/2f_B")
    } else {
        name.to_string()
    }
}

/// Builds the figure called `name`.
pub fn build(name: &str, normalize: bool) -> CliResult<Figure> {
    match name {
        "fig1" => fig1(normalize),
        "fig6" => fig6(normalize),
        "fig8" => fig8(normalize),
        "fig11" => fig11(normalize),
        "fig12" => optimal_rates("fig12", Psd::triangle(1.0)?, normalize),
        "fig13" => optimal_rates("fig13", Psd::gauss_markov(1.0)?, normalize),
        _ => Err(CliError::Usage(format!(
            "unknown figure `{name}`; expected one of {}",
            FIGURE_NAMES.join(", ")
        ))),
    }
}

fn fig1(normalize: bool) -> CliResult<Figure> {
    let psd = Psd::triangle(1.0)?;
    let rate = 1.0;
    let scale = if normalize { 2.0 } else { 1.0 };
    let fs = grid(0.02, 3.0, 0.02);
    let bound = evaluate(&fs, |f| Ok(sampled_drf(&psd, f, rate)?.distortion))?;
    let mmse = evaluate(&fs, |f| Ok(sub_sampling_mmse(&psd, f)?))?;
    let dx = theta_from_rate(&psd, rate, None)?.distortion;
    let f_dr = fdr_from_rate(&psd, rate)?.f_dr;
    let x_name = freq_axis("f_s", normalize);
    let tag = |s: CurveSeries| s.meta("psd", psd.describe()).meta_num("rate", rate);
    let series = vec![
        tag(CurveSeries::new("sampled_drf", &x_name, "distortion").with_points(scaled(bound, scale, 1.0)))
            .meta_num("f_dr", f_dr / scale),
        tag(CurveSeries::new("drf", &x_name, "distortion").with_points(fs.iter().map(|&f| (f / scale, dx)).collect())),
        tag(CurveSeries::new("mmse", &x_name, "distortion").with_points(scaled(mmse, scale, 1.0))),
    ];
    Ok(Figure { series, trends: vec![Trend::NonIncreasing; 3] })
}

fn fig6(normalize: bool) -> CliResult<Figure> {
    let scale = if normalize { 2.0 } else { 1.0 };
    let rates = grid(0.05, 6.0, 0.05);
    let mut series = Vec::new();
    for (name, psd) in models() {
        let points = evaluate(&rates, |r| Ok(fdr_from_rate(&psd, r)?.f_dr))?;
        series.push(
            CurveSeries::new(name, freq_axis("R", normalize), freq_axis("f_DR", normalize))
                .with_points(scaled(points, scale, scale))
                .meta("psd", psd.describe()),
        );
    }
    Ok(Figure { trends: vec![Trend::NonDecreasing; series.len()], series })
}

fn fig8(normalize: bool) -> CliResult<Figure> {
    let signal = Psd::triangle(1.0)?;
    let scale = if normalize { 2.0 } else { 1.0 };
    let snr_db = grid(-10.0, 30.0, 0.5);
    let mut series = Vec::new();
    for rate in [1.0, 2.0] {
        let points = evaluate(&snr_db, |db| {
            let noise = signal.variance() * 10f64.powf(-db / 10.0);
            let source = NoisySource::white(signal.clone(), noise)?;
            Ok(noisy_fdr(&source, rate)?.f_dr)
        })?;
        let clean = fdr_from_rate(&signal, rate)?.f_dr;
        series.push(
            CurveSeries::new(format!("R={}", fmt_g12(rate)), "snr_db", freq_axis("f_DR", normalize))
                .with_points(scaled(points, 1.0, scale))
                .meta("psd", signal.describe())
                .meta("noise", "white")
                .meta_num("rate", rate)
                .meta_num("noiseless_f_dr", clean / scale),
        );
    }
    Ok(Figure { trends: vec![Trend::NonDecreasing; series.len()], series })
}

fn fig11(normalize: bool) -> CliResult<Figure> {
    let rate = 4.0;
    let scale = if normalize { 2.0 } else { 1.0 };
    let fs = grid(0.05, rate, 0.05);
    let x_name = freq_axis("f_s", normalize);
    let mut series = Vec::new();
    let mut trends = Vec::new();
    for (name, psd) in models() {
        let config = PcmConfig::new(rate, psd.variance())?;
        let pcm = evaluate(&fs, |f| Ok(pcm_distortion(&psd, &config, f)?))?;
        let bound = evaluate(&fs, |f| Ok(sampled_drf(&psd, f, rate)?.distortion))?;
        let (f_star, d_star) = optimal_pcm_fs(&psd, &config)?;
        let f_dr = fdr_from_rate(&psd, rate)?.f_dr;
        series.push(
            CurveSeries::new(format!("pcm-{name}"), &x_name, "distortion")
                .with_points(scaled(pcm, scale, 1.0))
                .meta("psd", psd.describe())
                .meta_num("rate", rate)
                .meta_num("fs_star", f_star / scale)
                .meta_num("d_star", d_star),
        );
        trends.push(Trend::Free);
        series.push(
            CurveSeries::new(format!("bound-{name}"), &x_name, "distortion")
                .with_points(scaled(bound, scale, 1.0))
                .meta("psd", psd.describe())
                .meta_num("rate", rate)
                .meta_num("f_dr", f_dr / scale),
        );
        trends.push(Trend::NonIncreasing);
    }
    Ok(Figure { series, trends })
}

fn optimal_rates(label: &str, psd: Psd, normalize: bool) -> CliResult<Figure> {
    let scale = if normalize { 2.0 } else { 1.0 };
    let rates = grid(0.25, 10.0, 0.25);
    let f_star = evaluate(&rates, |r| Ok(optimal_pcm_fs(&psd, &PcmConfig::new(r, psd.variance())?)?.0))?;
    let f_dr = evaluate(&rates, |r| Ok(fdr_from_rate(&psd, r)?.f_dr))?;
    let x_name = freq_axis("R", normalize);
    let series = vec![
        CurveSeries::new(format!("{label}-fs_star"), &x_name, freq_axis("f_s", normalize))
            .with_points(scaled(f_star, scale, scale))
            .meta("psd", psd.describe()),
        CurveSeries::new(format!("{label}-f_dr"), &x_name, freq_axis("f_s", normalize))
            .with_points(scaled(f_dr, scale, scale))
            .meta("psd", psd.describe()),
    ];
    Ok(Figure { series, trends: vec![Trend::NonDecreasing; 2] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_keeps_order() {
        let xs: Vec<f64> = (0..500).map(f64::from).collect();
        let out = evaluate(&xs, |x| Ok(2.0 * x)).unwrap();
        assert!(out.iter().enumerate().all(|(i, &(x, y))| x == i as f64 && y == 2.0 * x));
    }

    #[test]
    fn unknown_figure_is_a_usage_error() {
        assert!(matches!(build("fig2", false), Err(CliError::Usage(_))));
    }

    #[test]
    fn fig1_meets_the_flat_level_at_f_dr() {
        let fig = build("fig1", false).unwrap();
        let f_dr: f64 = fig.series[0].metadata["f_dr"].parse().unwrap();
        let dx = fig.series[1].points[0].1;
        for (&(f, d), &(_, m)) in fig.series[0].points.iter().zip(&fig.series[2].points) {
            assert!(d >= m - 1e-12 && d >= dx - 1e-12);
            if f >= f_dr + 1e-9 {
                assert!((d - dx).abs() < 1e-8, "f_s = {f}");
            }
        }
    }
}
