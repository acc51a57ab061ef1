//! Alternating least squares driver: plain non-negative MCR, SIML, and
//! SIML-DN, with convergence control and multi-start ensembles.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernels::{cls_step_c, cls_step_s};
use crate::siml::{apply_siml, SimlConfig};
use crate::tensor::{AugmentedMatrix, ComponentProfile};
use crate::wavelet::DenoiseConfig;
use crate::{Error, Result};

/// Constraint mode of a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Non-negativity constrained MCR-ALS only.
    Mcr,
    /// Shift-invariant multi-linearity constraint.
    Siml,
    /// SIML with in-loop wavelet denoising.
    SimlDn,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Mcr => "mcr",
            Mode::Siml => "siml",
            Mode::SimlDn => "siml_dn",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mcr" => Ok(Mode::Mcr),
            "siml" => Ok(Mode::Siml),
            "siml_dn" | "siml-dn" => Ok(Mode::SimlDn),
            other => Err(Error::InvalidConfig(format!("unknown mode `{other}`"))),
        }
    }
}

/// Options controlling one ALS fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitOptions {
    /// Number of components.
    pub r: usize,
    pub mode: Mode,
    /// Per-component opt-out of the SIML projection (e.g. a baseline
    /// component); empty means all components are constrained.
    #[serde(default)]
    pub unconstrained_components: Vec<usize>,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Relative loss-change convergence tolerance.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub seed: u64,
    /// Evaluate this many candidate random starts by one ALS sweep and keep
    /// the best; 1 disables the search.
    #[serde(default = "default_best_of")]
    pub best_of: usize,
    #[serde(default)]
    pub denoise: DenoiseConfig,
    /// Denoise K-length segments independently rather than the whole vector.
    #[serde(default = "default_true")]
    pub denoise_per_segment: bool,
}

fn default_max_iterations() -> usize {
    1000
}
fn default_tolerance() -> f64 {
    1e-8
}
fn default_best_of() -> usize {
    1
}
fn default_true() -> bool {
    true
}

impl FitOptions {
    pub fn new(r: usize, mode: Mode, seed: u64) -> Self {
        FitOptions {
            r,
            mode,
            unconstrained_components: Vec::new(),
            max_iterations: default_max_iterations(),
            tolerance: default_tolerance(),
            seed,
            best_of: 1,
            denoise: DenoiseConfig::default(),
            denoise_per_segment: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::InvalidConfig("R must be >= 1".into()));
        }
        if self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig("tolerance must be > 0".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        Ok(())
    }

    fn siml_config(&self) -> SimlConfig {
        let mut denoise = self.denoise.clone();
        denoise.enabled = matches!(self.mode, Mode::SimlDn);
        SimlConfig {
            denoise,
            denoise_per_segment: self.denoise_per_segment,
        }
    }
}

/// A converged (or exhausted) factorization.
#[derive(Debug, Clone)]
pub struct Model {
    /// Concentration factor, `(IKL x R)`, entrywise non-negative. Columns
    /// carry the scale (spectra are unit-norm) and are sorted by descending
    /// norm.
    pub c: Array2<f64>,
    /// Spectral factor, `(J x R)`, entrywise non-negative, unit-norm columns.
    pub s: Array2<f64>,
    /// Residual sum of squares per iteration.
    pub loss_trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Per-sample relative concentrations `(L x R)` from the SIML stage;
    /// `None` for plain MCR.
    pub concentrations: Option<Array2<f64>>,
    /// Components whose re-seeding recurred; they stayed degenerate.
    pub degenerate_components: Vec<usize>,
    pub options: FitOptions,
}

impl Model {
    pub fn final_loss(&self) -> f64 {
        *self.loss_trace.last().unwrap_or(&f64::NAN)
    }
}

/// A set of converged models from independent random starts.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub models: Vec<Model>,
    /// True when the retry budget ran out before the requested count was
    /// reached.
    pub partial: bool,
}

const INIT_EPS: f64 = 1e-6;

/// Draws the random positive starting factors. Deterministic for a given
/// seed. When `opts.best_of > 1`, candidates are scored by the loss after a
/// single ALS sweep and the best start is returned.
pub fn initialize(x: &AugmentedMatrix, opts: &FitOptions) -> Result<(Array2<f64>, Array2<f64>)> {
    opts.validate()?;
    let draw = |seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c0 =
            Array2::from_shape_fn((x.values.nrows(), opts.r), |_| rng.gen_range(INIT_EPS..1.0));
        let s0 =
            Array2::from_shape_fn((x.values.ncols(), opts.r), |_| rng.gen_range(INIT_EPS..1.0));
        (c0, s0)
    };
    if opts.best_of <= 1 {
        return Ok(draw(opts.seed));
    }
    let mut best: Option<(f64, (Array2<f64>, Array2<f64>))> = None;
    for cand in 0..opts.best_of {
        // Candidate streams are offset far from the per-fit seed sequence so
        // multi-start fits never share a candidate stream.
        let (c0, s0) = draw(opts.seed.wrapping_add(0x9E37_79B9 * cand as u64));
        let c1 = cls_step_c(x.values.view(), s0.view(), None)?;
        let s1 = cls_step_s(x.values.view(), c1.view(), None)?;
        let l = loss(&x.values, &c1, &s1);
        if best.as_ref().map_or(true, |(bl, _)| l < *bl) {
            best = Some((l, (c0, s0)));
        }
    }
    Ok(best.unwrap().1)
}

/// Squared Frobenius norm of the residual `X - C S^T`.
pub fn loss(x: &Array2<f64>, c: &Array2<f64>, s: &Array2<f64>) -> f64 {
    let recon = c.dot(&s.t());
    x.iter()
        .zip(recon.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

/// Runs one alternating least squares fit.
pub fn fit(x: &AugmentedMatrix, opts: &FitOptions) -> Result<Model> {
    opts.validate()?;
    let (rows, j) = x.values.dim();
    if opts.r > rows.min(j) {
        return Err(Error::InvalidConfig(format!(
            "R = {} exceeds min(IKL, J) = {}",
            opts.r,
            rows.min(j)
        )));
    }
    let siml_cfg = opts.siml_config();
    let (_c0, mut s) = initialize(x, opts)?;
    let sst: f64 = x.values.iter().map(|v| v * v).sum();

    let mut c = Array2::<f64>::zeros((rows, opts.r));
    let mut loss_trace = Vec::new();
    let mut converged = false;
    let mut concentrations: Option<Array2<f64>> = None;
    let mut reseeded = vec![false; opts.r];
    let mut degenerate_components = Vec::new();
    let mut warm_c: Vec<Vec<usize>> = vec![Vec::new(); rows];
    let mut warm_s: Vec<Vec<usize>> = vec![Vec::new(); j];
    let mut iterations = 0;

    for iter in 0..opts.max_iterations {
        iterations = iter + 1;

        c = cls_step_c(x.values.view(), s.view(), Some(&mut warm_c))?;

        if opts.mode != Mode::Mcr {
            let dims = x.dims;
            let mut conc = Array2::<f64>::zeros((dims.l, opts.r));
            for r in 0..opts.r {
                if opts.unconstrained_components.contains(&r) {
                    continue;
                }
                let profile = ComponentProfile {
                    vector: c.column(r).to_vec(),
                    dims,
                    component: r,
                };
                let res = apply_siml(&profile, &siml_cfg)?;
                c.column_mut(r)
                    .assign(&Array1::from_vec(res.constrained_profile));
                conc.column_mut(r)
                    .assign(&Array1::from_vec(res.concentrations));
            }
            concentrations = Some(conc);
        }

        // A component driven to zero starves the next regression; re-seed it
        // once from the largest residual row.
        for r in 0..opts.r {
            if c.column(r).iter().all(|&v| v == 0.0) {
                if reseeded[r] {
                    if !degenerate_components.contains(&r) {
                        degenerate_components.push(r);
                    }
                }
                reseeded[r] = true;
                reseed_component(x, &mut c, &s, r);
            }
        }

        s = cls_step_s(x.values.view(), c.view(), Some(&mut warm_s))?;
        for r in 0..opts.r {
            if s.column(r).iter().all(|&v| v == 0.0) {
                // Spectral collapse; give the column a uniform spectrum so
                // the next C-step can recover or the component gets flagged.
                if reseeded[r] && !degenerate_components.contains(&r) {
                    degenerate_components.push(r);
                }
                reseeded[r] = true;
                s.column_mut(r).fill(1.0 / (j as f64).sqrt());
            }
        }

        normalize_columns(&mut c, &mut s);

        let l = loss(&x.values, &c, &s);
        if !l.is_finite() {
            return Err(Error::NanLoss { iteration: iter });
        }
        let prev = loss_trace.last().copied();
        loss_trace.push(l);
        // An essentially exact fit never satisfies the relative criterion
        // (the loss keeps shrinking geometrically toward zero), so treat a
        // negligible residual as converged too.
        if l <= 1e-12 * sst {
            converged = true;
            break;
        }
        if let Some(prev) = prev {
            let rel = (prev - l).abs() / prev.max(f64::MIN_POSITIVE);
            if rel < opts.tolerance {
                converged = true;
                break;
            }
        }
    }

    let mut model = Model {
        c,
        s,
        loss_trace,
        converged,
        iterations,
        concentrations,
        degenerate_components,
        options: opts.clone(),
    };
    sort_components(&mut model);
    Ok(model)
}

/// Unit-norm spectra with the scale absorbed into C; the reconstruction
/// `C S^T` is unchanged.
fn normalize_columns(c: &mut Array2<f64>, s: &mut Array2<f64>) {
    for r in 0..s.ncols() {
        let norm = s.column(r).dot(&s.column(r)).sqrt();
        if norm > 0.0 {
            s.column_mut(r).mapv_inplace(|v| v / norm);
            c.column_mut(r).mapv_inplace(|v| v * norm);
        }
    }
}

/// Orders components by descending concentration-column norm, deterministic
/// tie-break by original index.
fn sort_components(model: &mut Model) {
    let r = model.c.ncols();
    let mut order: Vec<usize> = (0..r).collect();
    let norms: Vec<f64> = (0..r)
        .map(|k| model.c.column(k).dot(&model.c.column(k)))
        .collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap().then(a.cmp(&b)));
    if order.iter().enumerate().all(|(pos, &k)| pos == k) {
        return;
    }
    let permute = |m: &Array2<f64>| {
        let mut out = Array2::zeros(m.raw_dim());
        for (pos, &k) in order.iter().enumerate() {
            out.column_mut(pos).assign(&m.column(k));
        }
        out
    };
    model.c = permute(&model.c);
    model.s = permute(&model.s);
    if let Some(conc) = &model.concentrations {
        model.concentrations = Some(permute(conc));
    }
    model.degenerate_components = model
        .degenerate_components
        .iter()
        .map(|&k| order.iter().position(|&o| o == k).unwrap())
        .collect();
}

fn reseed_component(x: &AugmentedMatrix, c: &mut Array2<f64>, s: &Array2<f64>, r: usize) {
    let recon = c.dot(&s.t());
    let resid = &x.values - &recon;
    let mut best_row = 0;
    let mut best_norm = -1.0;
    for row in 0..resid.nrows() {
        let n = resid.row(row).dot(&resid.row(row));
        if n > best_norm {
            best_norm = n;
            best_row = row;
        }
    }
    // Seed the concentration column with the positive part of the residual's
    // projection onto that row's profile across rows.
    let row = resid.row(best_row).to_owned();
    let scores = resid.dot(&row);
    let max_score = scores.iter().cloned().fold(0.0f64, f64::max);
    if max_score <= 0.0 {
        c.column_mut(r).fill(INIT_EPS);
    } else {
        c.column_mut(r)
            .assign(&scores.mapv(|v| (v / max_score).max(INIT_EPS)));
    }
}

/// Runs `n_fits` independent fits from seeds `seed, seed+1, ...`,
/// re-drawing non-converged fits with fresh seeds until the ensemble holds
/// `n_fits` converged models or the retry budget (3x) is exhausted.
pub fn multi_start(x: &AugmentedMatrix, opts: &FitOptions, n_fits: usize) -> Result<Ensemble> {
    if n_fits == 0 {
        return Err(Error::InvalidConfig("n_fits must be >= 1".into()));
    }
    let budget = 3 * n_fits;
    let first_wave: Vec<Result<Model>> = (0..n_fits)
        .into_par_iter()
        .map(|k| {
            let mut o = opts.clone();
            o.seed = opts.seed.wrapping_add(k as u64);
            fit(x, &o)
        })
        .collect();

    // Models that collapsed a component count as failed starts: they sit in
    // a rank-deficient local minimum, not a usable factorization. Collapse
    // shows up either as an explicit degeneracy flag or as a concentration
    // column whose norm is negligible next to the largest one.
    let usable = |m: &Model| {
        if !m.converged || !m.degenerate_components.is_empty() {
            return false;
        }
        let norms: Vec<f64> = (0..m.c.ncols())
            .map(|r| m.c.column(r).dot(&m.c.column(r)).sqrt())
            .collect();
        let max = norms.iter().cloned().fold(0.0f64, f64::max);
        norms.iter().all(|&n| n > 1e-6 * max)
    };
    let mut models = Vec::with_capacity(n_fits);
    for res in first_wave {
        let m = res?;
        if usable(&m) {
            models.push(m);
        }
    }
    let mut attempts = n_fits;
    let mut next_seed = n_fits as u64;
    while models.len() < n_fits && attempts < budget {
        let mut o = opts.clone();
        o.seed = opts.seed.wrapping_add(next_seed);
        next_seed += 1;
        attempts += 1;
        let m = fit(x, &o)?;
        if usable(&m) {
            models.push(m);
        }
    }
    Ok(Ensemble {
        partial: models.len() < n_fits,
        models,
    })
}

/// Per-sample peak volumes of one component: the sum of its concentration
/// column over each sample's `(i, k)` block.
pub fn sample_areas(model: &Model, dims: crate::tensor::Dims, component: usize) -> Vec<f64> {
    let mut areas = vec![0.0; dims.l];
    let col = model.c.column(component);
    for (flat, &v) in col.iter().enumerate() {
        let (_, _, l) = dims.unrow(flat);
        areas[l] += v;
    }
    areas
}
