//! Synthetic multi-sample two-dimensional chromatographic data with known
//! ground truth: Gaussian peaks in both retention dimensions, an optional
//! intra-sample retention drift across modulations, random inter-sample
//! shifts, sparse mass spectra with configurable overlap, and i.i.d.
//! Gaussian noise at a controlled SNR.
//!
//! SNR is defined internally as the maximum clean peak amplitude divided by
//! the noise standard deviation. Absolute SNR values are therefore only
//! comparable within this toolkit.

use ndarray::{Array2, Array4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::tensor::{Dims, Gc2Dataset};
use crate::{Error, Result};

/// Per-analyte peak description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyteConfig {
    /// Apex position along the modulation axis (bins).
    pub apex1: f64,
    /// Apex position along the second-dimension scan axis (bins).
    pub apex2: f64,
}

/// How per-sample concentrations are laid out.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcentrationDesign {
    /// Geometric dilution across the samples: sample `l` of analyte `a` gets
    /// `ratio^l`, slightly offset per analyte so profiles are correlated but
    /// not identical.
    DilutionSeries { ratio: f64 },
    /// Explicit `(L x n_analytes)` table, row per sample.
    Explicit { values: Vec<Vec<f64>> },
}

/// Simulation configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub dims: Dims,
    pub n_analytes: usize,
    /// Nominal signal-to-noise ratio; `None` disables noise (infinite SNR).
    /// The noise standard deviation is `peak_max / (snr * snr_gain)`.
    pub snr: Option<f64>,
    /// Converts the nominal SNR axis to the raw peak-amplitude-to-sigma
    /// ratio. The default of 1 makes `snr` the plain amplitude ratio; the
    /// benchmark raises it so that nominal SNR 1 sits near the two-component
    /// recovery limit of its default geometry.
    #[serde(default = "default_snr_gain")]
    pub snr_gain: f64,
    /// Mode-1 peak width in modulations.
    pub sigma1: f64,
    /// Mode-2 peak width in scans.
    pub sigma2: f64,
    pub analytes: Vec<AnalyteConfig>,
    /// Second-dimension drift in scans per modulation; negative values mean
    /// faster elution at later modulations.
    pub shift_slope: f64,
    /// Half-range of the random mode-1 inter-sample shift (bins).
    pub inter_shift1: usize,
    /// Half-range of the random mode-2 inter-sample shift (bins).
    pub inter_shift2: usize,
    /// Sample shifts as integer bins (default) or continuous offsets.
    #[serde(default)]
    pub fractional_shifts: bool,
    pub concentrations: ConcentrationDesign,
    /// Number of non-zero channels per analyte spectrum.
    #[serde(default = "default_n_fragments")]
    pub spectral_fragments: usize,
    /// Fraction of fragments shared between consecutive analytes, in [0, 1].
    #[serde(default)]
    pub spectral_overlap: f64,
    /// Constant baseline amplitude; 0 disables the extra baseline component.
    #[serde(default)]
    pub baseline: f64,
    pub seed: u64,
}

fn default_n_fragments() -> usize {
    12
}

fn default_snr_gain() -> f64 {
    1.0
}

impl SimConfig {
    /// Defaults mirroring the benchmark protocol at full scale:
    /// 20 modulations x 200 scans x 10 samples x 761 mass channels, two
    /// analytes.
    pub fn default_full_scale() -> Self {
        SimConfig {
            dims: Dims::new(20, 200, 10, 761),
            n_analytes: 2,
            snr: Some(3.0),
            snr_gain: 1.0,
            sigma1: 2.0,
            sigma2: 12.0,
            analytes: vec![
                AnalyteConfig {
                    apex1: 9.0,
                    apex2: 90.0,
                },
                AnalyteConfig {
                    apex1: 11.0,
                    apex2: 110.0,
                },
            ],
            shift_slope: -0.5,
            inter_shift1: 1,
            inter_shift2: 3,
            fractional_shifts: false,
            concentrations: ConcentrationDesign::DilutionSeries { ratio: 0.5 },
            spectral_fragments: 12,
            spectral_overlap: 0.25,
            baseline: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dims;
        if d.i == 0 || d.k == 0 || d.l == 0 || d.j == 0 {
            return Err(Error::InvalidConfig("all dims must be >= 1".into()));
        }
        if self.n_analytes == 0 || self.analytes.len() != self.n_analytes {
            return Err(Error::InvalidConfig(format!(
                "need {} analyte configs, got {}",
                self.n_analytes,
                self.analytes.len()
            )));
        }
        if self.sigma1 <= 0.0 || self.sigma2 <= 0.0 {
            return Err(Error::InvalidConfig("peak widths must be > 0".into()));
        }
        if let Some(snr) = self.snr {
            if snr <= 0.0 {
                return Err(Error::InvalidConfig("SNR must be > 0".into()));
            }
        }
        if !(self.snr_gain > 0.0) {
            return Err(Error::InvalidConfig("snr_gain must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.spectral_overlap) {
            return Err(Error::InvalidConfig(
                "spectral_overlap must be in [0,1]".into(),
            ));
        }
        if self.spectral_fragments == 0 || self.spectral_fragments > d.j {
            return Err(Error::InvalidConfig(
                "spectral_fragments must be in [1, J]".into(),
            ));
        }
        // Peaks must stay inside the window (3 sigma) after the worst-case
        // shift; the generated truth never wraps.
        for (idx, a) in self.analytes.iter().enumerate() {
            let m1_min = a.apex1 - 3.0 * self.sigma1 - self.inter_shift1 as f64;
            let m1_max = a.apex1 + 3.0 * self.sigma1 + self.inter_shift1 as f64;
            if m1_min < 0.0 || m1_max > (d.i - 1) as f64 {
                return Err(Error::InvalidConfig(format!(
                    "analyte {idx} mode-1 peak leaves the window after worst-case shift"
                )));
            }
            let drift = self.shift_slope * (d.i - 1) as f64;
            let drift_lo = drift.min(0.0);
            let drift_hi = drift.max(0.0);
            let m2_min = a.apex2 + drift_lo - 3.0 * self.sigma2 - self.inter_shift2 as f64;
            let m2_max = a.apex2 + drift_hi + 3.0 * self.sigma2 + self.inter_shift2 as f64;
            if m2_min < 0.0 || m2_max > (d.k - 1) as f64 {
                return Err(Error::InvalidConfig(format!(
                    "analyte {idx} mode-2 peak leaves the window after worst-case shift"
                )));
            }
        }
        if let ConcentrationDesign::Explicit { values } = &self.concentrations {
            if values.len() != d.l || values.iter().any(|row| row.len() != self.n_analytes) {
                return Err(Error::InvalidConfig(
                    "explicit concentration table must be L x n_analytes".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Everything known about a simulated dataset.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    /// Unit-norm spectra, `(J x n_components)`. Includes the baseline
    /// component last when a baseline was requested.
    pub spectra: Array2<f64>,
    /// Per-sample concentrations, `(L x n_components)`.
    pub concentrations: Array2<f64>,
    /// Noise-free tensor.
    pub clean: Array4<f64>,
    /// Additive noise field; `clean + noise` equals the delivered data
    /// exactly.
    pub noise: Array4<f64>,
    /// `(sample, analyte) -> (mode-1 apex, mode-2 apex at modulation 0)`.
    pub apexes: Vec<Vec<(f64, f64)>>,
    /// Noise standard deviation used (0 when SNR was infinite).
    pub noise_sigma: f64,
}

fn unit_max_gauss(x: f64, center: f64, sigma: f64) -> f64 {
    (-((x - center) / sigma).powi(2) / 2.0).exp()
}

fn make_spectra(cfg: &SimConfig, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let d = cfg.dims;
    let n_comp = cfg.n_analytes + usize::from(cfg.baseline > 0.0);
    let mut spectra = Array2::<f64>::zeros((d.j, n_comp));
    let n_shared = (cfg.spectral_overlap * cfg.spectral_fragments as f64).round() as usize;
    let mut prev_channels: Vec<usize> = Vec::new();
    for a in 0..cfg.n_analytes {
        let mut channels: Vec<usize> = Vec::new();
        // Shared fragments reuse channels of the previous analyte.
        for s in 0..n_shared.min(prev_channels.len()) {
            channels.push(prev_channels[s]);
        }
        while channels.len() < cfg.spectral_fragments {
            let ch = rng.gen_range(0..d.j);
            if !channels.contains(&ch) {
                channels.push(ch);
            }
        }
        for &ch in &channels {
            let existing = spectra[[ch, a]];
            spectra[[ch, a]] = existing + rng.gen_range(0.1..1.0);
        }
        let norm = spectra.column(a).dot(&spectra.column(a)).sqrt();
        spectra.column_mut(a).mapv_inplace(|v| v / norm);
        prev_channels = channels;
    }
    if cfg.baseline > 0.0 {
        // Flat unit-norm baseline spectrum.
        let v = 1.0 / (d.j as f64).sqrt();
        spectra.column_mut(cfg.n_analytes).fill(v);
    }
    spectra
}

fn make_concentrations(cfg: &SimConfig) -> Array2<f64> {
    let d = cfg.dims;
    let n_comp = cfg.n_analytes + usize::from(cfg.baseline > 0.0);
    let mut conc = Array2::<f64>::zeros((d.l, n_comp));
    match &cfg.concentrations {
        ConcentrationDesign::DilutionSeries { ratio } => {
            for l in 0..d.l {
                for a in 0..cfg.n_analytes {
                    // Slight per-analyte offset keeps the series correlated
                    // without being identical.
                    let base = 1.0 + 0.3 * a as f64;
                    conc[[l, a]] = base * ratio.powi(l as i32);
                }
            }
        }
        ConcentrationDesign::Explicit { values } => {
            for l in 0..d.l {
                for a in 0..cfg.n_analytes {
                    conc[[l, a]] = values[l][a];
                }
            }
        }
    }
    if cfg.baseline > 0.0 {
        conc.column_mut(cfg.n_analytes).fill(cfg.baseline);
    }
    conc
}

/// Generates one dataset plus its ground truth. Deterministic for a given
/// configuration and seed.
pub fn generate(cfg: &SimConfig) -> Result<(Gc2Dataset, GroundTruth)> {
    cfg.validate()?;
    let d = cfg.dims;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let spectra = make_spectra(cfg, &mut rng);
    let conc = make_concentrations(cfg);

    // Per-sample, per-analyte shifts.
    let mut apexes: Vec<Vec<(f64, f64)>> = Vec::with_capacity(d.l);
    for _l in 0..d.l {
        let mut row = Vec::with_capacity(cfg.n_analytes);
        for a in &cfg.analytes {
            let (d1, d2) = if cfg.fractional_shifts {
                (
                    rng.gen_range(-(cfg.inter_shift1 as f64)..=cfg.inter_shift1 as f64),
                    rng.gen_range(-(cfg.inter_shift2 as f64)..=cfg.inter_shift2 as f64),
                )
            } else {
                (
                    rng.gen_range(-(cfg.inter_shift1 as i64)..=cfg.inter_shift1 as i64) as f64,
                    rng.gen_range(-(cfg.inter_shift2 as i64)..=cfg.inter_shift2 as i64) as f64,
                )
            };
            row.push((a.apex1 + d1, a.apex2 + d2));
        }
        apexes.push(row);
    }

    // Clean signal.
    let mut clean = Array4::<f64>::zeros((d.i, d.k, d.l, d.j));
    for l in 0..d.l {
        for (a, _) in cfg.analytes.iter().enumerate() {
            let (c1, c2_base) = apexes[l][a];
            let amp = conc[[l, a]];
            if amp == 0.0 {
                continue;
            }
            for i in 0..d.i {
                let g1 = unit_max_gauss(i as f64, c1, cfg.sigma1);
                if g1 < 1e-14 {
                    continue;
                }
                let c2 = c2_base + cfg.shift_slope * i as f64;
                for k in 0..d.k {
                    let g2 = unit_max_gauss(k as f64, c2, cfg.sigma2);
                    if g2 < 1e-14 {
                        continue;
                    }
                    let w = amp * g1 * g2;
                    for j in 0..d.j {
                        let sp = spectra[[j, a]];
                        if sp != 0.0 {
                            clean[[i, k, l, j]] += w * sp;
                        }
                    }
                }
            }
        }
        if cfg.baseline > 0.0 {
            let b_col = cfg.n_analytes;
            let amp = conc[[l, b_col]];
            let sp = spectra[[0, b_col]]; // flat spectrum, all entries equal
            for i in 0..d.i {
                for k in 0..d.k {
                    for j in 0..d.j {
                        clean[[i, k, l, j]] += amp * sp;
                    }
                }
            }
        }
    }

    // Noise.
    let peak = clean.iter().cloned().fold(0.0f64, f64::max);
    let (noise, noise_sigma) = match cfg.snr {
        None => (Array4::zeros(clean.raw_dim()), 0.0),
        Some(snr) => {
            let sigma = peak / (snr * cfg.snr_gain);
            let dist = Normal::new(0.0, sigma)
                .map_err(|e| Error::InvalidConfig(format!("bad noise distribution: {e}")))?;
            let noise = Array4::from_shape_fn(clean.raw_dim(), |_| dist.sample(&mut rng));
            (noise, sigma)
        }
    };

    let data = &clean + &noise;
    let dataset = Gc2Dataset::new(data)?;
    Ok((
        dataset,
        GroundTruth {
            spectra,
            concentrations: conc,
            clean,
            noise,
            apexes,
            noise_sigma,
        },
    ))
}

/// Generates a geometric dilution series: `n_points` datasets sharing the
/// spectra and shift regime, with all concentrations scaled by `ratio^p` for
/// point `p`. Each dataset carries `replicates` samples at the same level
/// (the sample axis holds the replicates).
pub fn dilution_series(
    cfg: &SimConfig,
    n_points: usize,
    ratio: f64,
    replicates: usize,
) -> Result<Vec<(Gc2Dataset, GroundTruth)>> {
    if n_points < 2 {
        return Err(Error::InvalidConfig("n_points must be >= 2".into()));
    }
    if !(0.0 < ratio && ratio <= 1.0) {
        return Err(Error::InvalidConfig("ratio must be in (0, 1]".into()));
    }
    let mut out = Vec::with_capacity(n_points);
    for p in 0..n_points {
        let scale = ratio.powi(p as i32);
        let mut point_cfg = cfg.clone();
        point_cfg.dims.l = replicates;
        // All replicates at the same level.
        let base: Vec<f64> = (0..cfg.n_analytes)
            .map(|a| scale * (1.0 + 0.3 * a as f64))
            .collect();
        point_cfg.concentrations = ConcentrationDesign::Explicit {
            values: vec![base; replicates],
        };
        // Same spectra across points (same seed drives the spectrum draw),
        // fresh shifts/noise per point via the sub-seed.
        point_cfg.seed = cfg.seed; // spectra come from the head of the stream
        let (mut ds, mut gt) = generate(&point_cfg)?;
        if p > 0 {
            // Re-noise with a per-point stream so replicate noise differs
            // across points while spectra stay shared.
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (0xD1B5_4A32 + p as u64));
            if let Some(snr) = cfg.snr {
                let peak = gt.clean.iter().cloned().fold(0.0f64, f64::max);
                let sigma = peak / (snr * cfg.snr_gain);
                let dist = Normal::new(0.0, sigma).unwrap();
                gt.noise = Array4::from_shape_fn(gt.clean.raw_dim(), |_| dist.sample(&mut rng));
                gt.noise_sigma = sigma;
                ds = Gc2Dataset::new(&gt.clean + &gt.noise)?;
            }
        }
        out.push((ds, gt));
    }
    Ok(out)
}
