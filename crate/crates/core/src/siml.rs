//! Shift-invariant multi-linearity projection of one component's
//! concatenated elution profile.
//!
//! The projection synchronizes elution profiles in the Fourier domain
//! (amplitude spectra are shift-invariant, phases carry the positions),
//! enforces a rank-1 structure on the amplitude matrices of both
//! chromatographic modes, and restores the original peak positions by
//! recombining with the stored phases.

use ndarray::{Array2, Axis};
use num_complex::Complex64;

use crate::kernels::{
    dft_forward, rank1_approx, recombine_invert_with_residue, second_singular_ratio,
    split_spectrum, SpectrumSplit,
};
use crate::tensor::{
    mode1_matrix_as_profile, profile_as_mode1_matrix, vector_as_mode2_matrix, ComponentProfile,
};
use crate::wavelet::{denoise, DenoiseConfig};
use crate::Result;

/// Options of the constraint stage.
#[derive(Debug, Clone)]
pub struct SimlConfig {
    pub denoise: DenoiseConfig,
    /// Denoise each K-length second-dimension segment independently (the
    /// default) or the whole IKL vector at once.
    pub denoise_per_segment: bool,
}

impl SimlConfig {
    /// SIML without denoising.
    pub fn plain() -> Self {
        SimlConfig {
            denoise: DenoiseConfig {
                enabled: false,
                ..DenoiseConfig::default()
            },
            denoise_per_segment: true,
        }
    }

    /// SIML-DN with default denoiser settings.
    pub fn denoised() -> Self {
        SimlConfig {
            denoise: DenoiseConfig::default(),
            denoise_per_segment: true,
        }
    }
}

/// Per-stage diagnostics of one projection.
#[derive(Debug, Clone, Default)]
pub struct SimlDiagnostics {
    /// Second-to-first singular value ratio of the mode-1 amplitude matrix.
    pub mode1_rank_ratio: f64,
    /// Second-to-first singular value ratio of the mode-2 amplitude matrix.
    pub mode2_rank_ratio: f64,
    /// Largest imaginary residue discarded during desynchronization,
    /// relative to the largest real part.
    pub imag_residue: f64,
    /// Total negative mass clipped to zero, over both clip points.
    pub clip_mass: f64,
}

/// Output of [`apply_siml`].
#[derive(Debug, Clone)]
pub struct SimlResult {
    /// Constrained non-negative profile, length `IKL` in canonical order.
    pub constrained_profile: Vec<f64>,
    /// Relative per-sample concentrations (right singular vector of the
    /// mode-2 stage), length `L`, non-negative.
    pub concentrations: Vec<f64>,
    /// Mode-1 amplitude spectrum factor, length `I`.
    pub mode1_amplitude: Vec<f64>,
    /// Mode-2 amplitude spectrum factor, length `K`.
    pub mode2_amplitude: Vec<f64>,
    pub diagnostics: SimlDiagnostics,
}

/// Columns of `m` transformed to (amplitude, phase) pairs. The amplitude
/// matrix is entrywise non-negative and invariant to per-column circular
/// shifts of `m`.
pub fn synchronize_columns(m: &Array2<f64>) -> Result<(Array2<f64>, Array2<Complex64>)> {
    let (n, cols) = m.dim();
    let mut amp = Array2::zeros((n, cols));
    let mut phase = Array2::from_elem((n, cols), Complex64::new(1.0, 0.0));
    for c in 0..cols {
        let col: Vec<f64> = m.column(c).to_vec();
        let sp = split_spectrum(&dft_forward(&col)?);
        for r in 0..n {
            amp[[r, c]] = sp.amplitude[r];
            phase[[r, c]] = sp.phase[r];
        }
    }
    Ok((amp, phase))
}

/// Inverse of [`synchronize_columns`]: recombines each amplitude column with
/// its stored phase column and inverts back to the time domain.
pub fn desynchronize_columns(
    amp: &Array2<f64>,
    phase: &Array2<Complex64>,
) -> Result<(Array2<f64>, f64)> {
    let (n, cols) = amp.dim();
    let mut out = Array2::zeros((n, cols));
    let mut worst_residue = 0.0f64;
    for c in 0..cols {
        let sp = SpectrumSplit {
            amplitude: amp.column(c).to_vec(),
            phase: phase.column(c).to_vec(),
        };
        let (time, residue) = recombine_invert_with_residue(&sp)?;
        worst_residue = worst_residue.max(residue);
        for r in 0..n {
            out[[r, c]] = time[r];
        }
    }
    Ok((out, worst_residue))
}

fn clip_negative(m: &mut Array2<f64>) -> f64 {
    let mut mass = 0.0;
    for v in m.iter_mut() {
        if *v < 0.0 {
            mass -= *v;
            *v = 0.0;
        }
    }
    mass
}

fn outer(left: &ndarray::Array1<f64>, sigma: f64, right: &ndarray::Array1<f64>) -> Array2<f64> {
    sigma
        * &left
            .view()
            .insert_axis(Axis(1))
            .dot(&right.view().insert_axis(Axis(0)))
}

/// Applies the shift-invariant multi-linearity constraint to one component's
/// concatenated elution profile.
///
/// Pipeline: optional denoising of the second-dimension segments; reshape to
/// `(I x KL)` and synchronize along the first dimension; rank-1 projection of
/// the amplitude matrix; reshape the right factor to `(K x L)`, synchronize
/// along the second dimension and project again (its right factor is the
/// per-sample concentration vector); then rebuild both amplitude matrices
/// from their rank-1 factors and desynchronize with the stored phases to
/// restore peak positions, clipping negatives.
pub fn apply_siml(profile: &ComponentProfile, cfg: &SimlConfig) -> Result<SimlResult> {
    let dims = profile.dims;
    let mut diagnostics = SimlDiagnostics::default();

    if profile.vector.iter().all(|&v| v == 0.0) {
        return Ok(SimlResult {
            constrained_profile: profile.vector.clone(),
            concentrations: vec![0.0; dims.l],
            mode1_amplitude: vec![0.0; dims.i],
            mode2_amplitude: vec![0.0; dims.k],
            diagnostics,
        });
    }

    // Step 4a: optional denoising before any reshaping.
    let working = if cfg.denoise.enabled {
        denoise_profile(profile, cfg)?
    } else {
        profile.clone()
    };

    // Step 4b/4c: mode-1 matrix and synchronization along the modulations.
    let m1 = profile_as_mode1_matrix(&working)?;
    let (amp1, phase1) = synchronize_columns(&m1)?;

    // Step 4d: one-component SVD of the mode-1 amplitude matrix.
    let t1 = rank1_approx(amp1.view())?;
    diagnostics.mode1_rank_ratio = second_singular_ratio(amp1.view(), &t1);

    // Step 5a/5b: right factor reshaped to (K x L), synchronized along the
    // second-dimension scans.
    let m2 = vector_as_mode2_matrix(t1.right.as_slice().unwrap(), dims.k, dims.l)?;
    let (amp2, phase2) = synchronize_columns(&m2)?;

    // Step 5c: second rank-1 projection; its right factor holds the relative
    // per-sample concentrations.
    let t2 = rank1_approx(amp2.view())?;
    diagnostics.mode2_rank_ratio = second_singular_ratio(amp2.view(), &t2);
    let concentrations: Vec<f64> = t2.right.iter().map(|&v| v.max(0.0)).collect();

    // Steps 6a/6b: rebuild the mode-2 amplitude matrix from its rank-1
    // factors and restore the second-dimension peak positions.
    let amp2_rebuilt = outer(&t2.left, t2.sigma, &t2.right);
    let (mut mode2_time, res2) = desynchronize_columns(&amp2_rebuilt, &phase2)?;
    diagnostics.imag_residue = diagnostics.imag_residue.max(res2);
    diagnostics.clip_mass += clip_negative(&mut mode2_time);
    let mode2_vec = crate::tensor::mode2_matrix_as_vector(&mode2_time);

    // Steps 7a/7b: rebuild the mode-1 amplitude matrix with the restored
    // mode-2 profiles as column weights and desynchronize along mode 1.
    let weights = ndarray::Array1::from_vec(mode2_vec);
    let amp1_rebuilt = outer(&t1.left, t1.sigma, &weights);
    let (mut mode1_time, res1) = desynchronize_columns(&amp1_rebuilt, &phase1)?;
    diagnostics.imag_residue = diagnostics.imag_residue.max(res1);

    // Step 8: clip and flatten back to canonical order.
    diagnostics.clip_mass += clip_negative(&mut mode1_time);
    let out = mode1_matrix_as_profile(&mode1_time, dims, profile.component);

    Ok(SimlResult {
        constrained_profile: out.vector,
        concentrations,
        mode1_amplitude: t1.left.to_vec(),
        mode2_amplitude: t2.left.to_vec(),
        diagnostics,
    })
}

/// Denoises either each K-length second-dimension segment (one per
/// (modulation, sample) pair) or the whole concatenated vector.
fn denoise_profile(profile: &ComponentProfile, cfg: &SimlConfig) -> Result<ComponentProfile> {
    let dims = profile.dims;
    let mut out = profile.clone();
    if cfg.denoise_per_segment {
        for l in 0..dims.l {
            for i in 0..dims.i {
                let mut segment = Vec::with_capacity(dims.k);
                for k in 0..dims.k {
                    segment.push(profile.vector[dims.row(i, k, l)]);
                }
                let den = denoise(&segment, &cfg.denoise)?;
                for (k, v) in den.output.into_iter().enumerate() {
                    out.vector[dims.row(i, k, l)] = v;
                }
            }
        }
    } else {
        out.vector = denoise(&profile.vector, &cfg.denoise)?.output;
    }
    Ok(out)
}
