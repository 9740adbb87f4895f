//! Distortion-rate limits for sampled Gaussian stationary processes.
//!
//! The crate evaluates the minimal mean squared error attainable when a
//! Gaussian stationary signal with a known power spectral density is sampled
//! at frequency `f_s` and the samples are encoded at `R` bits per second:
//!
//! * [`waterfill`]: reverse waterfilling over a spectrum (the distortion-rate
//!   function `D_X(R)` and its restricted-set variants);
//! * [`sampled`]: the sampled distortion-rate bound `D̄(f_s, R)`, the optimal
//!   spectral set `F*` and the sampling-only MMSE;
//! * [`multibranch`]: filter-bank approximations with `P` uniform branches;
//! * [`critical`]: the critical sampling frequency `f_DR(R)` above which
//!   sampling costs nothing once the bitrate is constrained;
//! * [`noisy`]: the same quantities when noise is added before sampling;
//! * [`pcm`]: scalar quantization (PCM) under an additive white noise model;
//! * [`findim`]: the finite-dimensional vector analogue, also used as a
//!   brute-force oracle for the continuous solvers.
//!
//! Rates are in bits per second, frequencies in Hz and distortions in the
//! power units of the spectrum.

pub mod critical;
pub mod error;
pub mod findim;
pub mod multibranch;
pub mod noisy;
pub mod numeric;
pub mod pcm;
pub mod sampled;
pub mod spectra;
pub mod waterfill;

pub use error::{Error, Result};
pub use spectra::{PeriodicSamplingSet, Psd, PsdKind, SpectralSet, Spectrum};
