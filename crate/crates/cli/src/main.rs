use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sampled_rd::critical::fdr_from_rate;
use sampled_rd::findim::discretize_psd;
use sampled_rd::multibranch::{multibranch_drf, multibranch_plan};
use sampled_rd::noisy::{noisy_fdr, NoisySource};
use sampled_rd::pcm::{optimal_pcm_fs, pcm_distortion, PcmConfig};
use sampled_rd::sampled::{sampled_drf, sub_sampling_mmse};
use sampled_rd::waterfill::theta_from_rate;
use sampled_rd::{Psd, Spectrum};
use sampled_rd_cli::figures::{self, evaluate};
use sampled_rd_cli::series::{write_series, Format};
use sampled_rd_cli::{parse_grid, CliError, CliResult, CurveSeries, PsdChoice};

/// Distortion-rate curves for sampled Gaussian stationary processes.
#[derive(Parser)]
#[command(name = "sampled-rd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distortion-rate function D_X(R).
    Drf {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        rate: RateArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sampled distortion-rate bound over f_s or R; with --branches, the
    /// P-branch filter-bank distortion instead.
    Idrf {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        rate: RateArgs,
        #[command(flatten)]
        fs: FsArgs,
        /// Number of sampling branches.
        #[arg(long)]
        branches: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// MMSE of reconstruction from samples at f_s, without a rate limit.
    Mmse {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        fs: FsArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Critical sampling frequency f_DR(R).
    Fdr {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        rate: RateArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Critical sampling frequency with white noise added before sampling.
    NoisyFdr {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        rate: RateArgs,
        /// Density of the white noise.
        #[arg(long)]
        noise_var: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// PCM distortion over f_s at a fixed bitrate; f_s* goes in the metadata.
    Pcm {
        #[command(flatten)]
        model: ModelArgs,
        /// Bitrate in bits per time unit.
        #[arg(long)]
        rate: f64,
        #[command(flatten)]
        fs: FsArgs,
        /// Quantizer noise constant; defaults to pi sqrt(3) / 2 times the variance.
        #[arg(long)]
        c0: Option<f64>,
        /// Scale the quantizer noise with the filtered input variance.
        #[arg(long)]
        exact_sigma_in: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Distortion-rate function of the discretized spectrum.
    Findim {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        rate: RateArgs,
        /// Number of frequency cells.
        #[arg(long, default_value_t = 4096)]
        cells: usize,
        /// Half-width of the discretized band; defaults to the support.
        #[arg(long)]
        band: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// One of the standard figures: fig1, fig6, fig8, fig11, fig12, fig13.
    Figure {
        name: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// rect, triangle, gauss-markov or file:PATH (CSV with header f,S).
    #[arg(long, default_value = "triangle")]
    psd: PsdChoice,
    /// Band edge of the rect and triangle models.
    #[arg(long, default_value_t = 1.0)]
    fb: f64,
    /// Corner frequency of the Gauss-Markov model.
    #[arg(long, default_value_t = 1.0)]
    f0: f64,
}

#[derive(Args)]
struct RateArgs {
    /// A single bitrate.
    #[arg(long, conflicts_with = "rate_grid")]
    rate: Option<f64>,
    /// Bitrates as start:stop:step.
    #[arg(long)]
    rate_grid: Option<String>,
}

#[derive(Args)]
struct FsArgs {
    /// A single sampling frequency.
    #[arg(long, conflicts_with = "fs_grid")]
    fs: Option<f64>,
    /// Sampling frequencies as start:stop:step.
    #[arg(long)]
    fs_grid: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<String>,
    /// Divide frequencies and rates by twice the bandwidth parameter.
    #[arg(long)]
    normalize: bool,
}

/// Values given either as a single number or a grid, `None` when neither.
fn values(single: Option<f64>, grid: Option<&str>) -> CliResult<Option<Vec<f64>>> {
    match (single, grid) {
        (Some(v), _) => Ok(Some(vec![v])),
        (None, Some(g)) => parse_grid(g).map(Some),
        (None, None) => Ok(None),
    }
}

fn required(v: Option<Vec<f64>>, what: &str) -> CliResult<Vec<f64>> {
    v.ok_or_else(|| CliError::Usage(format!("missing {what}")))
}

impl RateArgs {
    fn values(&self) -> CliResult<Option<Vec<f64>>> {
        values(self.rate, self.rate_grid.as_deref())
    }
}

impl FsArgs {
    fn values(&self) -> CliResult<Option<Vec<f64>>> {
        values(self.fs, self.fs_grid.as_deref())
    }
}

impl ModelArgs {
    fn psd(&self) -> CliResult<Psd> {
        self.psd.build(self.fb, self.f0)
    }
}

/// Divisor applied to per-unit-time axes.
fn unit(psd: &Psd, normalize: bool) -> f64 {
    if normalize {
        2.0 * psd.bandwidth_scale()
    } else {
        1.0
    }
}

fn axis(name: &str, normalize: bool) -> String {
    if normalize {
        format!("{name}/2f_B")
    } else {
        name.to_string()
    }
}

fn curve(label: &str, x: String, y: String, psd: &Psd, points: Vec<(f64, f64)>, x_div: f64, y_div: f64) -> CurveSeries {
    let points = points.into_iter().map(|(a, b)| (a / x_div, b / y_div)).collect();
    CurveSeries::new(label, x, y).with_points(points).meta("psd", psd.describe())
}

fn run(command: Command) -> CliResult<(Vec<CurveSeries>, OutputArgs)> {
    match command {
        Command::Drf { model, rate, output } => {
            let psd = model.psd()?;
            let rates = required(rate.values()?, "--rate or --rate-grid")?;
            let points = evaluate(&rates, |r| Ok(theta_from_rate(&psd, r, None)?.distortion))?;
            let u = unit(&psd, output.normalize);
            let s = curve("drf", axis("R", output.normalize), "D".into(), &psd, points, u, 1.0);
            Ok((vec![s], output))
        }
        Command::Idrf { model, rate, fs, branches, output } => {
            let psd = model.psd()?;
            let u = unit(&psd, output.normalize);
            if branches == Some(0) {
                return Err(CliError::Usage("--branches must be at least 1".into()));
            }
            let eval = |f: f64, r: f64| -> CliResult<f64> {
                match branches {
                    Some(p) => Ok(multibranch_drf(&psd, &multibranch_plan(&psd, f, p)?, r)?),
                    None => Ok(sampled_drf(&psd, f, r)?.distortion),
                }
            };
            let label = if branches.is_some() { "multibranch" } else { "idrf" };
            let (rates, freqs) = (rate.values()?, fs.values()?);
            let series = match (rates, freqs) {
                (Some(r), Some(f)) if f.len() == 1 => {
                    let f = f[0];
                    let points = evaluate(&r, |r| eval(f, r))?;
                    curve(label, axis("R", output.normalize), "D".into(), &psd, points, u, 1.0).meta_num("fs", f / u)
                }
                (Some(r), Some(f)) if r.len() == 1 => {
                    let r = r[0];
                    let points = evaluate(&f, |f| eval(f, r))?;
                    curve(label, axis("f_s", output.normalize), "D".into(), &psd, points, u, 1.0)
                        .meta_num("rate", r / u)
                }
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage("sweep either the rate or the sampling frequency, not both".into()))
                }
                _ => return Err(CliError::Usage("idrf needs both a rate and a sampling frequency".into())),
            };
            let series = match branches {
                Some(p) => series.meta("branches", p.to_string()),
                None => series,
            };
            Ok((vec![series], output))
        }
        Command::Mmse { model, fs, output } => {
            let psd = model.psd()?;
            let freqs = required(fs.values()?, "--fs or --fs-grid")?;
            let points = evaluate(&freqs, |f| Ok(sub_sampling_mmse(&psd, f)?))?;
            let u = unit(&psd, output.normalize);
            let s = curve("mmse", axis("f_s", output.normalize), "mmse".into(), &psd, points, u, 1.0);
            Ok((vec![s], output))
        }
        Command::Fdr { model, rate, output } => {
            let psd = model.psd()?;
            let rates = required(rate.values()?, "--rate or --rate-grid")?;
            let points = evaluate(&rates, |r| Ok(fdr_from_rate(&psd, r)?.f_dr))?;
            let u = unit(&psd, output.normalize);
            let s = curve("fdr", axis("R", output.normalize), axis("f_DR", output.normalize), &psd, points, u, u);
            Ok((vec![s], output))
        }
        Command::NoisyFdr { model, rate, noise_var, output } => {
            let psd = model.psd()?;
            let rates = required(rate.values()?, "--rate or --rate-grid")?;
            let source = NoisySource::white(psd.clone(), noise_var)?;
            let points = evaluate(&rates, |r| Ok(noisy_fdr(&source, r)?.f_dr))?;
            let u = unit(&psd, output.normalize);
            let s = curve("noisy-fdr", axis("R", output.normalize), axis("f_DR", output.normalize), &psd, points, u, u)
                .meta_num("noise_var", noise_var);
            Ok((vec![s], output))
        }
        Command::Pcm { model, rate, fs, c0, exact_sigma_in, output } => {
            let psd = model.psd()?;
            let freqs = required(fs.values()?, "--fs or --fs-grid")?;
            if let Some(&f) = freqs.iter().find(|&&f| f > rate) {
                return Err(CliError::Usage(format!(
                    "f_s = {f} exceeds the bitrate {rate}; PCM needs at least one bit per sample"
                )));
            }
            let mut config = PcmConfig::new(rate, psd.variance())?.with_exact_sigma_in(exact_sigma_in);
            if let Some(c0) = c0 {
                config = config.with_c0(c0)?;
            }
            let points = evaluate(&freqs, |f| Ok(pcm_distortion(&psd, &config, f)?))?;
            let (f_star, d_star) = optimal_pcm_fs(&psd, &config)?;
            let u = unit(&psd, output.normalize);
            let s = curve("pcm", axis("f_s", output.normalize), "D".into(), &psd, points, u, 1.0)
                .meta_num("rate", rate / u)
                .meta_num("c0", config.c0)
                .meta_num("fs_star", f_star / u)
                .meta_num("d_star", d_star);
            Ok((vec![s], output))
        }
        Command::Findim { model, rate, cells, band, output } => {
            let psd = model.psd()?;
            let rates = required(rate.values()?, "--rate or --rate-grid")?;
            let band = match (band, psd.support().hull()) {
                (Some(w), _) if w.is_finite() && w > 0.0 => (-w, w),
                (Some(w), _) => return Err(CliError::Usage(format!("--band must be positive, got {w}"))),
                (None, Some((lo, hi))) if lo.is_finite() && hi.is_finite() => (lo, hi),
                (None, _) => return Err(CliError::Usage("the PSD has unbounded support; pass --band".into())),
            };
            let grid = discretize_psd(&psd, band, cells)?;
            let points = evaluate(&rates, |r| Ok(grid.drf(r)?.distortion))?;
            let u = unit(&psd, output.normalize);
            let s = curve("findim", axis("R", output.normalize), "D".into(), &psd, points, u, 1.0)
                .meta("cells", cells.to_string());
            Ok((vec![s], output))
        }
        Command::Figure { name, output } => Ok((figures::build(&name, output.normalize)?.series, output)),
    }
}

fn emit(series: &[CurveSeries], output: &OutputArgs) -> CliResult<()> {
    let format = match output.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    match &output.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write_series(&mut file, series, format)?;
            file.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_series(&mut lock, series, format)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command).and_then(|(series, output)| emit(&series, &output)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `sampled-rd --help` for usage");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
