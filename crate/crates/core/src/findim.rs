//! Finite-dimensional Gaussian vectors observed through a linear map.
//!
//! A source `x ~ N(0, Sigma_x)` is seen through `y = H x` and the encoder
//! describes `y` with `R` bits. The optimal distortion waterfills over the
//! eigenvalues of `Sigma_{x|y} = Sigma_x H^T (H Sigma_x H^T)^+ H Sigma_x`, the
//! covariance of the estimate `E[x | y]`. Discretizing a spectrum into a
//! diagonal covariance turns the continuous problem into this one, which makes
//! it a brute-force check of the spectral solvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::spectra::Spectrum;

/// Relative cutoff on singular values inside the pseudo-inverse.
const PINV_CUTOFF: f64 = 1e-12;

/// Tolerance on negative eigenvalues (relative to the largest magnitude)
/// before a covariance is rejected.
const PSD_SLACK: f64 = 1e-10;

/// Distortion and water level of a vector waterfilling problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorRd {
    pub rate: f64,
    pub distortion: f64,
    pub theta: f64,
}

/// Source covariance and sampling matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSource {
    cov_x: DMatrix<f64>,
    sampling: DMatrix<f64>,
}

/// Symmetrizes `m` and clamps slightly negative eigenvalues to zero.
fn clean_covariance(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::Config(format!("covariance must be square, got {}x{}", m.nrows(), m.ncols())));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("covariance has non-finite entries".into()));
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let asym = (m - m.transpose()).amax();
    if asym > PSD_SLACK * scale {
        return Err(Error::Config(format!("covariance is not symmetric (max asymmetry {asym})")));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym.clone());
    let min = eig.eigenvalues.min();
    if min < -PSD_SLACK * scale {
        return Err(Error::Config(format!("covariance is not positive semidefinite (eigenvalue {min})")));
    }
    if min >= 0.0 {
        return Ok(sym);
    }
    let clamped = eig.eigenvalues.map(|l| l.max(0.0));
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&clamped) * eig.eigenvectors.transpose())
}

impl VectorSource {
    /// `sampling` is `m x n` with `m <= n`; `m = 0` means nothing is observed.
    pub fn new(cov_x: DMatrix<f64>, sampling: DMatrix<f64>) -> Result<Self> {
        let cov_x = clean_covariance(&cov_x)?;
        let n = cov_x.nrows();
        if sampling.ncols() != n {
            return Err(Error::Config(format!(
                "sampling matrix has {} columns but the source has dimension {n}",
                sampling.ncols()
            )));
        }
        if sampling.nrows() > n {
            return Err(Error::Config(format!("sampling matrix has {} rows, more than {n}", sampling.nrows())));
        }
        if sampling.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sampling matrix has non-finite entries".into()));
        }
        Ok(Self { cov_x, sampling })
    }

    pub fn cov_x(&self) -> &DMatrix<f64> {
        &self.cov_x
    }

    pub fn sampling(&self) -> &DMatrix<f64> {
        &self.sampling
    }

    /// Covariance of `E[x | y]`.
    pub fn conditional_cov(&self) -> DMatrix<f64> {
        let n = self.cov_x.nrows();
        if self.sampling.nrows() == 0 {
            return DMatrix::zeros(n, n);
        }
        let h = &self.sampling;
        let cross = h * &self.cov_x; // H Sigma_x
        let gram = &cross * h.transpose(); // H Sigma_x H^T
        let svd = gram.clone().svd(true, true);
        let top = svd.singular_values.max();
        if top <= 0.0 {
            return DMatrix::zeros(n, n);
        }
        let pinv = svd
            .pseudo_inverse(PINV_CUTOFF * top)
            .expect("both singular vector sets were computed");
        let out = cross.transpose() * pinv * &cross;
        (&out + out.transpose()) * 0.5
    }

    /// True when every sorted eigenvalue of `Sigma_{x|y}` is at most the
    /// matching sorted eigenvalue of `Sigma_x`, up to `tol`.
    pub fn interlacing_holds(&self, tol: f64) -> bool {
        let a = sorted_eigenvalues(&self.conditional_cov());
        let b = sorted_eigenvalues(&self.cov_x);
        a.iter().zip(&b).all(|(x, y)| *x >= -tol && x <= &(y + tol))
    }
}

/// Eigenvalues in decreasing order, negatives clamped to zero.
pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0))
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `Tr(Sigma_x - Sigma_{x|y})`.
pub fn vector_mmse(source: &VectorSource) -> f64 {
    (source.cov_x.trace() - source.conditional_cov().trace()).max(0.0)
}

/// `1/2 Σ log2+(lambda_i / theta)`.
pub fn rate_at_theta(eigenvalues: &[f64], theta: f64) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > theta)
        .map(|&l| 0.5 * (l / theta).log2())
        .sum()
}

/// `Σ (lambda_i - theta)+`.
pub fn excess_at_theta(eigenvalues: &[f64], theta: f64) -> f64 {
    eigenvalues.iter().map(|&l| (l - theta).max(0.0)).sum()
}

/// Water level for `rate` over the eigenvalues, in closed form: with the `k`
/// largest eigenvalues active, `theta = (Π lambda_i)^{1/k} 2^{-2R/k}`, and the
/// right `k` is the one whose level falls between `lambda_{k+1}` and
/// `lambda_k`.
pub fn waterfill_eigenvalues(eigenvalues: &[f64], rate: f64) -> Result<f64> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::Domain(format!("rate must be finite and non-negative, got {rate}")));
    }
    let mut sorted: Vec<f64> = eigenvalues.iter().copied().filter(|&l| l > 0.0).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let Some(&top) = sorted.first() else {
        if rate == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Domain(format!("rate {rate} cannot be spent: every eigenvalue is zero")));
    };
    if rate == 0.0 {
        return Ok(top);
    }
    let mut log_sum = 0.0;
    for (k, &l) in sorted.iter().enumerate() {
        log_sum += l.log2();
        let active = (k + 1) as f64;
        let theta = ((log_sum - 2.0 * rate) / active).exp2();
        let next = sorted.get(k + 1).copied().unwrap_or(0.0);
        if theta >= next {
            return Ok(theta.min(l));
        }
    }
    unreachable!("the last candidate level is compared against 0")
}

fn solve(total: f64, eigenvalues: &[f64], rate: f64) -> Result<VectorRd> {
    let theta = waterfill_eigenvalues(eigenvalues, rate)?;
    Ok(VectorRd {
        rate,
        distortion: (total - excess_at_theta(eigenvalues, theta)).max(0.0),
        theta,
    })
}

/// Distortion-rate function of `x` itself.
pub fn vector_drf(cov_x: &DMatrix<f64>, rate: f64) -> Result<VectorRd> {
    let cov = clean_covariance(cov_x)?;
    solve(cov.trace(), &sorted_eigenvalues(&cov), rate)
}

/// Indirect distortion-rate function: encode `y`, reconstruct `x`.
pub fn vector_idrf(source: &VectorSource, rate: f64) -> Result<VectorRd> {
    solve(source.cov_x.trace(), &sorted_eigenvalues(&source.conditional_cov()), rate)
}

/// Rate and distortion at water level `theta`, where `total` is the trace of
/// the source covariance and `eigenvalues` those being waterfilled.
pub fn rd_at_theta(total: f64, eigenvalues: &[f64], theta: f64) -> VectorRd {
    VectorRd {
        rate: rate_at_theta(eigenvalues, theta),
        distortion: total - excess_at_theta(eigenvalues, theta),
        theta,
    }
}

/// A spectrum sampled at the midpoints of `n` equal cells: each cell acts
/// as one independent component whose variance per unit bandwidth is the
/// density there.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalCovariance {
    pub eigenvalues: Vec<f64>,
    pub cell_width: f64,
}

impl DiagonalCovariance {
    /// Approximates the spectral distortion-rate function at `rate`: the
    /// vector problem is solved at `rate / cell_width` bits and its
    /// distortion scaled back by `cell_width`.
    pub fn drf(&self, rate: f64) -> Result<VectorRd> {
        let total: f64 = self.eigenvalues.iter().sum();
        let r = solve(total, &self.eigenvalues, rate / self.cell_width)?;
        Ok(VectorRd {
            rate,
            distortion: r.distortion * self.cell_width,
            theta: r.theta,
        })
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(&self.eigenvalues))
    }
}

/// Discretizes `spec` on `band = (lo, hi)` into `n >= 2` cells.
pub fn discretize_psd<S: Spectrum + ?Sized>(spec: &S, band: (f64, f64), n: usize) -> Result<DiagonalCovariance> {
    let (lo, hi) = band;
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 cells, got {n}")));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Config(format!("invalid band [{lo}, {hi}]")));
    }
    let width = (hi - lo) / n as f64;
    let eigenvalues = (0..n).map(|i| spec.density(lo + (i as f64 + 0.5) * width)).collect();
    Ok(DiagonalCovariance {
        eigenvalues,
        cell_width: width,
    })
}
