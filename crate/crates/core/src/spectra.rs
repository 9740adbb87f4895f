//! Power spectral density models, interval-union frequency sets and sampling
//! densities.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numeric::{integrate_split, integrate_to_infinity, QuadTolerance};

/// A finite union of disjoint closed frequency intervals, kept sorted.
///
/// Endpoints may be infinite (the support of a spectrum that is positive on
/// the whole line), in which case the measure is infinite as well.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralSet {
    intervals: Vec<(f64, f64)>,
}

impl SpectralSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Self::from_intervals([(lo, hi)])
    }

    /// `[-width/2, width/2]`.
    pub fn centered(width: f64) -> Self {
        Self::interval(-0.5 * width, 0.5 * width)
    }

    /// Builds a set from arbitrary intervals: empty pieces are dropped and
    /// overlapping or touching pieces merged.
    pub fn from_intervals<I: IntoIterator<Item = (f64, f64)>>(intervals: I) -> Self {
        let mut raw: Vec<(f64, f64)> = intervals.into_iter().filter(|(a, b)| b > a).collect();
        raw.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self { intervals: merged }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure: the sum of the interval lengths.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, f: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= f && f <= b)
    }

    /// Smallest interval containing the set.
    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    pub fn union(&self, other: &SpectralSet) -> SpectralSet {
        Self::from_intervals(self.intervals.iter().chain(other.intervals.iter()).copied())
    }

    pub fn intersection(&self, other: &SpectralSet) -> SpectralSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a1, b1) = self.intervals[i];
            let (a2, b2) = other.intervals[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if hi > lo {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { intervals: out }
    }

    /// Points of `self` not in `other` (up to the shared boundary points).
    pub fn difference(&self, other: &SpectralSet) -> SpectralSet {
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            let mut lo = a;
            for &(c, d) in &other.intervals {
                if d <= lo || c >= b {
                    continue;
                }
                if c > lo {
                    out.push((lo, c));
                }
                lo = lo.max(d);
                if lo >= b {
                    break;
                }
            }
            if lo < b {
                out.push((lo, b));
            }
        }
        Self::from_intervals(out)
    }

    /// Measure of `(self \ other) ∪ (other \ self)`.
    pub fn symmetric_difference_measure(&self, other: &SpectralSet) -> f64 {
        self.difference(other).measure() + other.difference(self).measure()
    }

    pub fn shifted(&self, by: f64) -> SpectralSet {
        Self {
            intervals: self.intervals.iter().map(|&(a, b)| (a + by, b + by)).collect(),
        }
    }

    pub fn mirrored(&self) -> SpectralSet {
        Self::from_intervals(self.intervals.iter().map(|&(a, b)| (-b, -a)))
    }

    /// True when the set equals its reflection about the origin up to `tol`
    /// in measure.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.symmetric_difference_measure(&self.mirrored()) <= tol
    }

    /// True when the shifts of the set by non-zero multiples of `period`
    /// overlap each other only on a set of measure at most `tol`.
    pub fn is_aliasing_free(&self, period: f64, tol: f64) -> bool {
        let Some((lo, hi)) = self.hull() else {
            return true;
        };
        if !(hi - lo).is_finite() {
            return false;
        }
        let max_shift = ((hi - lo) / period).ceil() as i64;
        (1..=max_shift).all(|k| self.intersection(&self.shifted(k as f64 * period)).measure() <= tol)
    }
}

/// Tabulated spectrum sampled on a strictly increasing, symmetric frequency
/// grid; linear interpolation in between, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedGrid {
    freqs: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedGrid {
    /// Validates the raw samples and symmetrizes them.
    ///
    /// A grid that starts at `f >= 0` is read as the positive half of a
    /// symmetric spectrum and mirrored; otherwise `S(f)` and `S(-f)` are
    /// averaged on the union of both grids.
    pub fn new(freqs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::Config("tabulated PSD has an empty grid".into()));
        }
        if freqs.len() != values.len() {
            return Err(Error::Config(format!(
                "tabulated PSD has {} frequencies but {} values",
                freqs.len(),
                values.len()
            )));
        }
        if let Some(f) = freqs.iter().find(|f| !f.is_finite()) {
            return Err(Error::Config(format!("non-finite frequency {f} in tabulated PSD")));
        }
        if let Some(s) = values.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::Config(format!("invalid PSD value {s}: must be finite and >= 0")));
        }
        if freqs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("tabulated PSD frequencies must be strictly increasing".into()));
        }
        let raw = Self { freqs, values };
        let mut grid: Vec<f64> = raw.freqs.iter().flat_map(|&f| [f, -f]).collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let one_sided = raw.freqs[0] >= 0.0;
        let values = grid
            .iter()
            .map(|&f| {
                if one_sided {
                    raw.eval(f.abs())
                } else {
                    0.5 * (raw.eval(f) + raw.eval(-f))
                }
            })
            .collect();
        Ok(Self { freqs: grid, values })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn eval(&self, f: f64) -> f64 {
        let n = self.freqs.len();
        if n == 1 {
            return if f == self.freqs[0] { self.values[0] } else { 0.0 };
        }
        if f < self.freqs[0] || f > self.freqs[n - 1] {
            return 0.0;
        }
        let i = self.freqs.partition_point(|&x| x <= f);
        if i == 0 {
            return self.values[0];
        }
        if i == n {
            return self.values[n - 1];
        }
        let (f0, f1) = (self.freqs[i - 1], self.freqs[i]);
        let (s0, s1) = (self.values[i - 1], self.values[i]);
        s0 + (s1 - s0) * (f - f0) / (f1 - f0)
    }

    fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        self.freqs
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(f, s)| ((f[0], f[1]), (s[0], s[1])))
    }

    /// `{f : S(f) > theta}` solved exactly on each linear segment.
    fn superlevel(&self, theta: f64) -> SpectralSet {
        let mut out = Vec::new();
        for ((f0, f1), (s0, s1)) in self.segments() {
            let above0 = s0 > theta;
            let above1 = s1 > theta;
            match (above0, above1) {
                (true, true) => out.push((f0, f1)),
                (false, false) => {}
                _ => {
                    let cross = f0 + (theta - s0) * (f1 - f0) / (s1 - s0);
                    if above0 {
                        out.push((f0, cross));
                    } else {
                        out.push((cross, f1));
                    }
                }
            }
        }
        SpectralSet::from_intervals(out)
    }
}

/// Spectral shape of a [`Psd`].
#[derive(Debug, Clone, PartialEq)]
pub enum PsdKind {
    /// `1/(2 f_B)` on `|f| <= f_B`.
    Rect { f_b: f64 },
    /// `(1/f_B) [1 - |f/f_B|]^+`.
    Triangle { f_b: f64 },
    /// `(1/f_0) / ((pi f / f_0)^2 + 1)`, the spectrum of a Gauss-Markov
    /// (Ornstein-Uhlenbeck) process; positive on the whole line.
    GaussMarkov { f_0: f64 },
    Tabulated(TabulatedGrid),
}

/// Common interface of the spectra the solvers operate on: the analytic and
/// tabulated models in [`Psd`] and derived spectra such as the effective
/// spectrum of a noisy observation.
pub trait Spectrum: Send + Sync {
    /// Spectral density at `f` (two-sided, power per Hz).
    fn density(&self, f: f64) -> f64;

    /// Total power, `∫ S(f) df` over the real line.
    fn variance(&self) -> f64;

    /// Essential supremum of the density.
    fn ess_sup(&self) -> f64;

    /// Lebesgue measure of the support (may be infinite).
    fn landau_rate(&self) -> f64;

    /// Symmetric and non-increasing in `|f|`.
    fn is_unimodal(&self) -> bool;

    /// Points where the density is not smooth; quadrature splits there.
    fn breakpoints(&self) -> Vec<f64>;

    /// Closure of `{f : S(f) > 0}`.
    fn support(&self) -> SpectralSet;

    /// `{f : S(f) > theta}` as a union of intervals. Points where `S = theta`
    /// exactly are excluded.
    fn superlevel_set(&self, theta: f64) -> SpectralSet;

    /// Characteristic frequency used to scale tolerances on frequencies.
    /// Defaults to half the Landau rate, or 1 Hz for unbounded support.
    fn bandwidth_scale(&self) -> f64 {
        let half = 0.5 * self.landau_rate();
        if half.is_finite() && half > 0.0 {
            half
        } else {
            1.0
        }
    }

    /// `∫_a^b S(f) df`; either end may be infinite.
    fn integral(&self, a: f64, b: f64) -> f64 {
        integrate_density_map(self, a, b, |s| s)
    }
}

/// Integrates `g(S(f))` over `[a, b]`, splitting at the spectrum's
/// breakpoints. Infinite ends are mapped onto a finite interval.
pub fn integrate_density_map<S, G>(spec: &S, a: f64, b: f64, g: G) -> f64
where
    S: Spectrum + ?Sized,
    G: Fn(f64) -> f64,
{
    if !(b > a) {
        return 0.0;
    }
    let tol = QuadTolerance::default();
    let h = |f: f64| g(spec.density(f));
    let breaks = spec.breakpoints();
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate_split(h, a, b, &breaks, tol),
        _ => {
            // Split the line at the finite breakpoints, treat the two outer
            // pieces with the semi-infinite transform.
            let lo_core = if a.is_finite() { a } else { breaks.iter().copied().fold(0.0, f64::min).min(b) };
            let hi_core = if b.is_finite() { b } else { breaks.iter().copied().fold(0.0, f64::max).max(lo_core) };
            let mut total = integrate_split(h, lo_core, hi_core, &breaks, tol);
            if !a.is_finite() {
                total += integrate_to_infinity(|x| h(-x), -lo_core, tol);
            }
            if !b.is_finite() {
                total += integrate_to_infinity(h, hi_core, tol);
            }
            total
        }
    }
}

/// `∫_set S(f) df` (adaptive quadrature on each interval).
pub fn energy_on<S: Spectrum + ?Sized>(spec: &S, set: &SpectralSet) -> f64 {
    set.intervals().iter().map(|&(a, b)| spec.integral(a, b)).sum()
}

/// Superlevel set of a continuous spectrum found by scanning each interval of
/// `region` on a uniform grid (plus breakpoints) and refining every sign change
/// of `S - theta` by bisection to `1e-12` Hz.
pub(crate) fn scan_superlevel<S: Spectrum + ?Sized>(spec: &S, region: &SpectralSet, theta: f64, points: usize) -> SpectralSet {
    let breaks = spec.breakpoints();
    let mut out = Vec::new();
    for &(a, b) in region.intervals() {
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        let mut grid: Vec<f64> = (0..=points).map(|i| a + (b - a) * i as f64 / points as f64).collect();
        grid.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let above = |f: f64| spec.density(f) > theta;
        let refine = |mut lo: f64, mut hi: f64| {
            // `above(lo)` differs from `above(hi)`.
            let lo_state = above(lo);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if above(mid) == lo_state {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let mut start = if above(grid[0]) { Some(grid[0]) } else { None };
        for w in grid.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            match (above(x0), above(x1)) {
                (false, true) => start = Some(refine(x0, x1)),
                (true, false) => {
                    let end = refine(x0, x1);
                    out.push((start.take().unwrap_or(x0), end));
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, b));
        }
    }
    SpectralSet::from_intervals(out)
}

/// A power spectral density model with its summary statistics precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    kind: PsdKind,
    variance: f64,
    landau_rate: f64,
    ess_sup: f64,
}

// Beyond this many multiples of f_0 the Gauss-Markov tails are integrated in
// closed form.
const GM_CORE: f64 = 64.0;

fn positive(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Config(format!("{name} must be a positive finite number, got {value}")))
    }
}

impl Psd {
    pub fn rect(f_b: f64) -> Result<Self> {
        let f_b = positive("f_B", f_b)?;
        Ok(Self {
            kind: PsdKind::Rect { f_b },
            variance: 1.0,
            landau_rate: 2.0 * f_b,
            ess_sup: 0.5 / f_b,
        })
    }

    pub fn triangle(f_b: f64) -> Result<Self> {
        let f_b = positive("f_B", f_b)?;
        Ok(Self {
            kind: PsdKind::Triangle { f_b },
            variance: 1.0,
            landau_rate: 2.0 * f_b,
            ess_sup: 1.0 / f_b,
        })
    }

    pub fn gauss_markov(f_0: f64) -> Result<Self> {
        let f_0 = positive("f_0", f_0)?;
        Ok(Self {
            kind: PsdKind::GaussMarkov { f_0 },
            variance: 1.0,
            landau_rate: f64::INFINITY,
            ess_sup: 1.0 / f_0,
        })
    }

    pub fn tabulated(freqs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let grid = TabulatedGrid::new(freqs, values)?;
        let mut variance = 0.0;
        let mut landau = 0.0;
        for ((f0, f1), (s0, s1)) in grid.segments() {
            variance += 0.5 * (s0 + s1) * (f1 - f0);
            if s0 > 0.0 || s1 > 0.0 {
                landau += f1 - f0;
            }
        }
        let ess_sup = grid.values.iter().copied().fold(0.0, f64::max);
        if ess_sup <= 0.0 {
            return Err(Error::Config("tabulated PSD is identically zero".into()));
        }
        Ok(Self {
            kind: PsdKind::Tabulated(grid),
            variance,
            landau_rate: landau,
            ess_sup,
        })
    }

    /// Loads a tabulated PSD from CSV text with header `f,S`.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "f" || &headers[1] != "S" {
            return Err(Error::Config(format!(
                "tabulated PSD header must be `f,S`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut freqs = Vec::new();
        let mut values = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("row {}: cannot parse `{}`: {e}", line + 2, &record[i])))
            };
            let f = parse(0)?;
            let s = parse(1)?;
            if s.is_nan() || s < 0.0 {
                return Err(Error::Config(format!("row {}: PSD value {s} is negative or NaN", line + 2)));
            }
            freqs.push(f);
            values.push(s);
        }
        Self::tabulated(freqs, values)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn kind(&self) -> &PsdKind {
        &self.kind
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            PsdKind::Rect { f_b } => format!("rect(f_B={f_b})"),
            PsdKind::Triangle { f_b } => format!("triangle(f_B={f_b})"),
            PsdKind::GaussMarkov { f_0 } => format!("gauss-markov(f_0={f_0})"),
            PsdKind::Tabulated(g) => format!("tabulated({} points)", g.freqs.len()),
        }
    }

    /// Half-width `w` with `{S > theta} = (-w, w)` for the analytic
    /// unimodal models; `None` for tables.
    fn unimodal_half_width(&self, theta: f64) -> Option<f64> {
        let w = match self.kind {
            PsdKind::Rect { f_b } => {
                if theta < self.ess_sup {
                    f_b
                } else {
                    0.0
                }
            }
            PsdKind::Triangle { f_b } => (f_b * (1.0 - f_b * theta)).max(0.0),
            PsdKind::GaussMarkov { f_0 } => {
                if theta < self.ess_sup {
                    (f_0 / PI) * (1.0 / (theta * f_0) - 1.0).sqrt()
                } else {
                    0.0
                }
            }
            PsdKind::Tabulated(_) => return None,
        };
        Some(w)
    }

    fn gauss_markov_tail(f_0: f64, a: f64) -> f64 {
        0.5 * (1.0 - (2.0 / PI) * (PI * a / f_0).atan())
    }
}

impl Spectrum for Psd {
    fn density(&self, f: f64) -> f64 {
        match &self.kind {
            PsdKind::Rect { f_b } => {
                if f.abs() <= *f_b {
                    0.5 / f_b
                } else {
                    0.0
                }
            }
            PsdKind::Triangle { f_b } => (1.0 - (f / f_b).abs()).max(0.0) / f_b,
            PsdKind::GaussMarkov { f_0 } => {
                let u = PI * f / f_0;
                (1.0 / f_0) / (u * u + 1.0)
            }
            PsdKind::Tabulated(g) => g.eval(f),
        }
    }

    fn variance(&self) -> f64 {
        self.variance
    }

    fn ess_sup(&self) -> f64 {
        self.ess_sup
    }

    fn landau_rate(&self) -> f64 {
        self.landau_rate
    }

    fn is_unimodal(&self) -> bool {
        match &self.kind {
            PsdKind::Tabulated(g) => {
                let start = g.freqs.partition_point(|&f| f < 0.0);
                let positive_half = &g.values[start..];
                // The grid is symmetric, so monotone decay on f >= 0 suffices,
                // provided the peak sits at the origin.
                g.freqs.get(start) == Some(&0.0) && positive_half.windows(2).all(|w| w[1] <= w[0])
            }
            _ => true,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            PsdKind::Rect { f_b } => vec![-f_b, *f_b],
            PsdKind::Triangle { f_b } => vec![-f_b, 0.0, *f_b],
            PsdKind::GaussMarkov { .. } => vec![0.0],
            PsdKind::Tabulated(g) => g.freqs.clone(),
        }
    }

    fn support(&self) -> SpectralSet {
        match &self.kind {
            PsdKind::Rect { f_b } | PsdKind::Triangle { f_b } => SpectralSet::interval(-f_b, *f_b),
            PsdKind::GaussMarkov { .. } => SpectralSet::interval(f64::NEG_INFINITY, f64::INFINITY),
            PsdKind::Tabulated(g) => SpectralSet::from_intervals(
                g.segments()
                    .filter(|(_, (s0, s1))| *s0 > 0.0 || *s1 > 0.0)
                    .map(|(f, _)| f),
            ),
        }
    }

    /// `f_B` for the bandlimited shapes, `f_0` for Gauss-Markov, half the
    /// Landau rate for tables.
    fn bandwidth_scale(&self) -> f64 {
        match &self.kind {
            PsdKind::Rect { f_b } | PsdKind::Triangle { f_b } => *f_b,
            PsdKind::GaussMarkov { f_0 } => *f_0,
            PsdKind::Tabulated(_) => 0.5 * self.landau_rate,
        }
    }

    fn superlevel_set(&self, theta: f64) -> SpectralSet {
        if theta >= self.ess_sup {
            return SpectralSet::empty();
        }
        match &self.kind {
            PsdKind::Tabulated(g) => g.superlevel(theta),
            _ => {
                let w = self.unimodal_half_width(theta).unwrap_or(0.0);
                SpectralSet::interval(-w, w)
            }
        }
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        match &self.kind {
            PsdKind::GaussMarkov { f_0 } if !(a.is_finite() && b.is_finite()) => {
                let core = GM_CORE * f_0;
                let lo = if a.is_finite() { a } else { -core.max(-b) };
                let hi = if b.is_finite() { b } else { core.max(lo) };
                // lo <= -core < 0 < core <= hi whenever the matching end is
                // infinite, so both tails start away from the origin.
                let mut total = integrate_density_map(self, lo, hi, |s| s);
                if !a.is_finite() {
                    total += Self::gauss_markov_tail(*f_0, -lo);
                }
                if !b.is_finite() {
                    total += Self::gauss_markov_tail(*f_0, hi);
                }
                total
            }
            _ => {
                // Every other model vanishes outside a bounded support.
                let (lo, hi) = match self.support().hull() {
                    Some((s0, s1)) => (a.max(s0), b.min(s1)),
                    None => return 0.0,
                };
                integrate_density_map(self, lo, hi, |s| s)
            }
        }
    }
}

/// A periodic sampling set `{t : t = n T + offset_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSamplingSet {
    period: f64,
    offsets: Vec<f64>,
}

impl PeriodicSamplingSet {
    /// `offsets` must be strictly increasing and lie in `[0, period)`.
    pub fn new(period: f64, offsets: Vec<f64>) -> Result<Self> {
        let period = positive("period", period)?;
        if offsets.is_empty() {
            return Err(Error::Config("a periodic sampling set needs at least one offset".into()));
        }
        if offsets.iter().any(|&t| !(0.0..period).contains(&t)) {
            return Err(Error::Config(format!("offsets must lie in [0, {period})")));
        }
        if offsets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("offsets must be strictly increasing".into()));
        }
        Ok(Self { period, offsets })
    }

    /// The uniform grid `Z / f_s`.
    pub fn uniform(f_s: f64) -> Result<Self> {
        let f_s = positive("f_s", f_s)?;
        Self::new(1.0 / f_s, vec![0.0])
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Lower and upper Beurling densities. A periodic set places exactly `P`
    /// points in every period, so both equal `P / T`.
    pub fn beurling_density(&self) -> (f64, f64) {
        let d = self.offsets.len() as f64 / self.period;
        (d, d)
    }
}

/// `{S > theta}` restricted to `region`, using the analytic or exact routine
/// of `spec`.
pub(crate) fn superlevel_within<S: Spectrum + ?Sized>(spec: &S, theta: f64, region: Option<&SpectralSet>) -> SpectralSet {
    let level = spec.superlevel_set(theta);
    match region {
        Some(r) => level.intersection(r),
        None => level,
    }
}

/// Integrates `g(S(f))` over every interval of `set`.
pub fn integrate_map_on<S, G>(spec: &S, set: &SpectralSet, g: G) -> f64
where
    S: Spectrum + ?Sized,
    G: Fn(f64) -> f64 + Copy,
{
    set.intervals()
        .iter()
        .map(|&(a, b)| integrate_density_map(spec, a, b, g))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Psd::rect(0.5).unwrap().density(0.0), 1.0);
        assert_eq!(Psd::triangle(1.0).unwrap().density(1.5), 0.0);
        assert!(close(Psd::gauss_markov(1.0).unwrap().density(1.0 / PI), 0.5, 1e-15));
    }

    #[test]
    fn empty_tabulated_grid_is_rejected() {
        assert!(matches!(Psd::tabulated(vec![], vec![]), Err(Error::Config(_))));
    }

    #[test]
    fn superlevel_examples() {
        let tri = Psd::triangle(1.0).unwrap().superlevel_set(0.5);
        assert_eq!(tri.intervals(), &[(-0.5, 0.5)]);
        assert!(close(tri.measure(), 1.0, 1e-15));

        let gm = Psd::gauss_markov(1.0).unwrap().superlevel_set(0.5);
        assert!(close(gm.intervals()[0].0, -1.0 / PI, 1e-15));
        assert!(close(gm.measure(), 2.0 / PI, 1e-15));

        assert!(Psd::rect(0.5).unwrap().superlevel_set(2.0).is_empty());
    }

    #[test]
    fn energy_examples() {
        let rect = Psd::rect(0.5).unwrap();
        assert!(close(energy_on(&rect, &SpectralSet::interval(-0.5, 0.5)), 1.0, 1e-13));
        let tri = Psd::triangle(1.0).unwrap();
        assert!(close(energy_on(&tri, &SpectralSet::interval(-0.5, 0.5)), 0.75, 1e-13));
        assert_eq!(energy_on(&tri, &SpectralSet::empty()), 0.0);
    }

    #[test]
    fn gauss_markov_full_line_energy_uses_tails() {
        let gm = Psd::gauss_markov(2.0).unwrap();
        assert!(close(gm.integral(f64::NEG_INFINITY, f64::INFINITY), 1.0, 1e-12));
        assert!(close(gm.integral(1.0, f64::INFINITY), Psd::gauss_markov_tail(2.0, 1.0), 1e-12));
        assert!(close(gm.integral(f64::NEG_INFINITY, -300.0), Psd::gauss_markov_tail(2.0, 300.0), 1e-13));
        // Half-line starting left of the origin.
        assert!(close(gm.integral(-1.0, f64::INFINITY), 1.0 - Psd::gauss_markov_tail(2.0, 1.0), 1e-12));
    }

    #[test]
    fn variance_matches_quadrature() {
        for psd in [Psd::rect(0.7).unwrap(), Psd::triangle(1.3).unwrap(), Psd::gauss_markov(0.4).unwrap()] {
            let q = psd.integral(f64::NEG_INFINITY, f64::INFINITY);
            assert!(close(q, psd.variance(), 1e-9 * psd.variance()), "{}: {q}", psd.describe());
        }
    }

    #[test]
    fn beurling_examples() {
        assert_eq!(PeriodicSamplingSet::new(1.0, vec![0.0]).unwrap().beurling_density(), (1.0, 1.0));
        assert_eq!(PeriodicSamplingSet::new(2.0, vec![0.0, 0.3]).unwrap().beurling_density(), (1.0, 1.0));
        assert_eq!(PeriodicSamplingSet::new(0.5, vec![0.0]).unwrap().beurling_density(), (2.0, 2.0));
        assert!(PeriodicSamplingSet::new(1.0, vec![0.5, 0.2]).is_err());
        assert!(PeriodicSamplingSet::new(1.0, vec![1.0]).is_err());
    }

    #[test]
    fn set_algebra() {
        let a = SpectralSet::from_intervals([(0.0, 2.0), (3.0, 5.0)]);
        let b = SpectralSet::from_intervals([(1.0, 4.0)]);
        assert_eq!(a.intersection(&b).intervals(), &[(1.0, 2.0), (3.0, 4.0)]);
        assert_eq!(a.difference(&b).intervals(), &[(0.0, 1.0), (4.0, 5.0)]);
        assert_eq!(a.union(&b).intervals(), &[(0.0, 5.0)]);
        assert!(close(a.symmetric_difference_measure(&b), 3.0, 1e-15));
        assert!(SpectralSet::centered(1.0).is_aliasing_free(1.0, 1e-12));
        assert!(!SpectralSet::centered(1.2).is_aliasing_free(1.0, 1e-12));
    }

    #[test]
    fn tabulated_csv_loading() {
        let text = "f,S\n-1,0\n0,2\n1,0\n";
        let psd = Psd::from_csv_reader(text.as_bytes()).unwrap();
        assert!(close(psd.variance(), 2.0, 1e-15));
        assert!(close(psd.density(0.5), 1.0, 1e-15));
        assert_eq!(psd.density(1.5), 0.0);
        assert!(psd.is_unimodal());
        assert!(close(psd.landau_rate(), 2.0, 1e-15));

        assert!(Psd::from_csv_reader("f,S\n0,1\n1,-1\n".as_bytes()).is_err());
        assert!(Psd::from_csv_reader("f,S\n0,NaN\n".as_bytes()).is_err());
        assert!(Psd::from_csv_reader("freq,S\n0,1\n".as_bytes()).is_err());
        assert!(Psd::from_csv_reader("f,S\n1,1\n0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn one_sided_tables_are_mirrored() {
        let psd = Psd::tabulated(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert!(close(psd.density(-0.25), 0.75, 1e-15));
        assert!(close(psd.variance(), 1.0, 1e-15));
    }

    #[test]
    fn asymmetric_tables_are_averaged() {
        let psd = Psd::tabulated(vec![-1.0, 0.0, 2.0], vec![0.0, 1.0, 1.0]).unwrap();
        assert!(close(psd.density(1.0), psd.density(-1.0), 1e-15));
        assert!(close(psd.density(1.0), 0.5, 1e-15));
    }

    #[test]
    fn tabulated_superlevel_is_exact_on_segments() {
        // Two bumps: peaks of 2 at +-1, dip of 0.5 at the origin.
        let psd = Psd::tabulated(vec![0.0, 1.0, 2.0], vec![0.5, 2.0, 0.0]).unwrap();
        let set = psd.superlevel_set(1.0);
        assert_eq!(set.intervals().len(), 2);
        // Rising edge 0.5 -> 2 over [0,1] crosses 1 at 1/3; falling edge at 1.5.
        assert!(close(set.intervals()[1].0, 1.0 / 3.0, 1e-15));
        assert!(close(set.intervals()[1].1, 1.5, 1e-15));
        assert!(!psd.is_unimodal());
    }

    #[test]
    fn scan_matches_exact_superlevel() {
        let psd = Psd::tabulated(vec![0.0, 1.0, 2.0], vec![0.5, 2.0, 0.0]).unwrap();
        let scanned = scan_superlevel(&psd, &psd.support(), 1.0, 333);
        assert!(scanned.symmetric_difference_measure(&psd.superlevel_set(1.0)) < 1e-10);
    }
}
