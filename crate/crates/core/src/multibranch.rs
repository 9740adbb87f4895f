//! Filter banks of `P` uniform samplers, each running at `f_s / P`.
//!
//! Branch `p` sees the spectrum through an ideal band-pass filter whose
//! passband is aliasing-free at the branch rate: no two of its points differ
//! by a multiple of `f_s / P`. The plan below picks, for every residue class
//! modulo `f_s / P`, the `P` strongest shifts of the spectrum and hands one to
//! each branch, which maximizes the total captured energy for the given `P`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::sampled::{check_fs, optimal_fstar};
use crate::spectra::{energy_on, SpectralSet, Spectrum};
use crate::waterfill::theta_from_rate;

/// Residue cells per period of the branch rate.
const CELLS: usize = 2048;

/// Passbands of a `P`-branch uniform filter bank.
#[derive(Debug, Clone, PartialEq)]
pub struct MultibranchPlan {
    pub branches: usize,
    pub f_s: f64,
    /// Sampling rate of each branch, `f_s / P`.
    pub branch_rate: f64,
    pub passbands: Vec<SpectralSet>,
}

impl MultibranchPlan {
    /// Union of all passbands; the branches never overlap.
    pub fn combined(&self) -> SpectralSet {
        self.passbands
            .iter()
            .fold(SpectralSet::empty(), |acc, band| acc.union(band))
    }

    /// Total spectral energy reaching the samplers.
    pub fn captured_energy<S: Spectrum + ?Sized>(&self, spec: &S) -> f64 {
        self.passbands.iter().map(|band| energy_on(spec, band)).sum()
    }
}

/// The shifts `k` (frequency `r + k * delta`) chosen for residue `r`, sorted
/// ascending. Ties in density prefer the smaller `|k|`, then the smaller `k`.
fn chosen_shifts<S: Spectrum + ?Sized>(spec: &S, r: f64, delta: f64, k_max: i64, branches: usize) -> Vec<i64> {
    let mut candidates: Vec<(f64, i64)> = (-k_max..=k_max)
        .map(|k| (spec.density(r + k as f64 * delta), k))
        .filter(|(s, _)| *s > 0.0)
        .collect();
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.abs().cmp(&b.1.abs()))
            .then(a.1.cmp(&b.1))
    });
    let mut ks: Vec<i64> = candidates.into_iter().take(branches).map(|(_, k)| k).collect();
    ks.sort_unstable();
    ks
}

/// Builds the `P`-branch plan for sampling frequency `f_s`.
pub fn multibranch_plan<S: Spectrum + ?Sized>(spec: &S, f_s: f64, branches: usize) -> Result<MultibranchPlan> {
    check_fs(f_s)?;
    if branches == 0 {
        return Err(Error::Domain("a filter bank needs at least one branch".into()));
    }
    let delta = f_s / branches as f64;

    // Frequencies that can matter: everything in a bounded support, or a
    // margin around the optimal set for spectra on the whole line.
    let reach = match spec.support().hull() {
        Some((a, b)) if a.is_finite() && b.is_finite() => a.abs().max(b.abs()),
        _ => {
            let fstar = optimal_fstar(spec, f_s)?;
            let (a, b) = fstar.hull().unwrap_or((0.0, 0.0));
            a.abs().max(b.abs()).max(0.5 * f_s) + 2.0 * delta
        }
    };
    let k_max = (reach / delta).ceil() as i64 + 1;

    let cell = delta / CELLS as f64;
    let lo = -0.5 * delta;
    let centre = |j: usize| lo + (j as f64 + 0.5) * cell;
    let lists: Vec<Vec<i64>> = (0..CELLS)
        .map(|j| chosen_shifts(spec, centre(j), delta, k_max, branches))
        .collect();

    // Segments of constant choice, with switch points refined by bisection.
    let mut edges = vec![lo];
    let mut segment_lists = vec![lists[0].clone()];
    for j in 1..CELLS {
        if lists[j] == lists[j - 1] {
            continue;
        }
        let (mut a, mut b) = (centre(j - 1), centre(j));
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if chosen_shifts(spec, mid, delta, k_max, branches) == lists[j - 1] {
                a = mid;
            } else {
                b = mid;
            }
        }
        edges.push(0.5 * (a + b));
        segment_lists.push(lists[j].clone());
    }
    edges.push(-lo);

    let passbands = (0..branches)
        .map(|p| {
            SpectralSet::from_intervals(segment_lists.iter().enumerate().filter_map(|(i, ks)| {
                let shift = *ks.get(p)? as f64 * delta;
                Some((edges[i] + shift, edges[i + 1] + shift))
            }))
        })
        .collect();

    Ok(MultibranchPlan {
        branches,
        f_s,
        branch_rate: delta,
        passbands,
    })
}

/// Distortion of the filter bank at `rate`: waterfilling restricted to the
/// union of the passbands.
pub fn multibranch_drf<S: Spectrum + ?Sized>(spec: &S, plan: &MultibranchPlan, rate: f64) -> Result<f64> {
    Ok(theta_from_rate(spec, rate, Some(&plan.combined()))?.distortion)
}
