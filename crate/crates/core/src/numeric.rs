//! Adaptive quadrature and one-dimensional solvers shared by the spectral
//! computations.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Requested accuracy of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadTolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Default for QuadTolerance {
    fn default() -> Self {
        Self {
            abs: 1e-15,
            rel: 1e-12,
            max_segments: 4000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over the finite interval `[a, b]` by globally adaptive
/// Gauss-Kronrod (7, 15) quadrature.
///
/// Returns the best available estimate even when the segment budget runs out;
/// the integrands used in this crate are piecewise smooth once split at their
/// breakpoints, so the budget is never the binding constraint in practice.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: QuadTolerance) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let mut segments = vec![kronrod15(&f, a, b)];
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= tol.abs.max(tol.rel * total.abs()) || segments.len() >= tol.max_segments {
            return total;
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval exhausted at machine precision; keep it as is.
            segments.push(Segment { error: 0.0, ..seg });
            continue;
        }
        segments.push(kronrod15(&f, seg.a, mid));
        segments.push(kronrod15(&f, mid, seg.b));
    }
}

/// Integrates `f` over `[a, b]` after splitting at the given interior points.
pub fn integrate_split<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, splits: &[f64], tol: QuadTolerance) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let mut points: Vec<f64> = splits.iter().copied().filter(|&x| x > a && x < b).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut lo = a;
    let mut total = 0.0;
    for p in points.into_iter().chain(std::iter::once(b)) {
        total += integrate(&f, lo, p, tol);
        lo = p;
    }
    total
}

/// Integrates `f` over `[a, +inf)` through the substitution `x = a + t/(1-t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: QuadTolerance) -> f64 {
    integrate(
        |t: f64| {
            let s = 1.0 - t;
            f(a + t / s) / (s * s)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Finds the root of a function that is non-increasing (`decreasing = true`)
/// or non-decreasing in `x` on `[lo, hi]` by bisection.
///
/// The bracket is searched in log-space when both ends are positive and span
/// more than a decade, which is the common situation for water levels.
pub fn bisect_monotone<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    decreasing: bool,
    tol: f64,
    what: &'static str,
) -> Result<f64> {
    let geometric = lo > 0.0 && hi / lo > 10.0;
    let mut last = f64::INFINITY;
    for _ in 0..400 {
        let mid = if geometric { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        let value = f(mid);
        last = value - target;
        if last.abs() <= tol {
            return Ok(mid);
        }
        let above = (value > target) == decreasing;
        if above {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = if geometric { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
    let residual = f(mid) - target;
    if residual.abs() <= tol.max(last.abs()) || (hi - lo) <= 4.0 * f64::EPSILON * hi.abs() {
        Ok(mid)
    } else {
        Err(Error::NoConvergence {
            what,
            iterations: 400,
            residual,
        })
    }
}

/// Golden-section minimization of `f` on `[lo, hi]` down to an interval of
/// width `tol`. Returns `(argmin, min)`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
