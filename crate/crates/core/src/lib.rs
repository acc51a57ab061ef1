//! Deconvolution toolkit for four-mode chromatographic tensors
//! (modulations × second-dimension scans × samples × mass channels).
//!
//! The crate implements non-negativity constrained MCR-ALS together with a
//! shift-invariant multi-linearity (SIML) constraint and its denoised variant
//! (SIML-DN). Elution profiles are synchronized in the Fourier domain: the
//! amplitude spectrum of a profile is invariant to circular shifts, so
//! enforcing a rank-1 structure on per-column amplitude spectra imposes
//! multi-linearity without destroying per-sample retention shifts, which are
//! carried by the separately stored phase spectra.
//!
//! Modules:
//! - [`tensor`]: the four-mode container and all reshapes between tensor,
//!   augmented matrix and per-component profile matrices.
//! - [`kernels`]: DFT with amplitude/phase separation, dominant singular
//!   triple extraction, and non-negative least squares.
//! - [`wavelet`]: the in-loop wavelet denoiser that turns SIML into SIML-DN.
//! - [`siml`]: the shift-invariant multi-linearity projection.
//! - [`mcr`]: the alternating least squares driver and multi-start ensembles.
//! - [`sim`]: synthetic data generation with known ground truth.
//! - [`metrics`]: figures of merit (variance explained, matched cosine
//!   similarity, calibration fit, pooled RSD, extrapolation protocol).
//! - [`io`]: the tensor container file format and model serialization.
//! - [`bench`]: the SNR-sweep benchmark harness and report emission.

pub mod bench;
pub mod io;
pub mod kernels;
pub mod mcr;
pub mod metrics;
pub mod sim;
pub mod siml;
pub mod tensor;
pub mod wavelet;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
