//! Figures of merit: variance explained, cosine similarity with component
//! matching, calibration line fits, pooled relative standard deviation, and
//! the extrapolation-error protocol.

use itertools::Itertools;
use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Summary metrics of one fit (or aggregates over an ensemble).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub var_explained: f64,
    /// `(estimated component, reference component, cosine)` per matched pair.
    pub matched: Vec<(usize, usize, f64)>,
    /// Calibration line per reference analyte, when concentrations are known.
    pub calibration: Vec<CalibrationFit>,
    pub pooled_rsd: Option<f64>,
    pub extrapolation_errors: Vec<f64>,
    /// Mean/std/quartiles over an ensemble, per metric name.
    pub spread: Vec<SpreadStat>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationFit {
    pub slope: f64,
    pub bias: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpreadStat {
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

impl SpreadStat {
    pub fn from_values(metric: &str, values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let quantile = |q: f64| -> f64 {
            if sorted.is_empty() {
                return f64::NAN;
            }
            let pos = q * (sorted.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            let frac = pos - lo as f64;
            sorted[lo] * (1.0 - frac) + sorted[hi] * frac
        };
        SpreadStat {
            metric: metric.to_string(),
            mean,
            std,
            q25: quantile(0.25),
            median: quantile(0.5),
            q75: quantile(0.75),
        }
    }
}

/// Percent of the total sum of squares explained by the reconstruction
/// `C S^T`: `100 * (1 - SSE / SST)` with `SST = sum(x^2)`.
pub fn var_explained(x: ArrayView2<f64>, c: ArrayView2<f64>, s: ArrayView2<f64>) -> Result<f64> {
    let sst: f64 = x.iter().map(|v| v * v).sum();
    if sst == 0.0 {
        return Err(Error::Degenerate("var_explained on all-zero data".into()));
    }
    let recon = c.dot(&s.t());
    if recon.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            context: "var_explained",
            expected: format!("{:?}", x.dim()),
            actual: format!("{:?}", recon.dim()),
        });
    }
    let sse: f64 = x
        .iter()
        .zip(recon.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(100.0 * (1.0 - sse / sst))
}

/// Cosine similarity (Tucker congruence) between two non-zero vectors.
pub fn cosine_similarity(a: ArrayView1<f64>, b: ArrayView1<f64>) -> Result<f64> {
    let na = a.dot(&a).sqrt();
    let nb = b.dot(&b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Degenerate("cosine of a zero vector".into()));
    }
    Ok(a.dot(&b) / (na * nb))
}

/// Matches estimated components to reference components, maximizing the
/// total cosine. Exhaustive over permutations for up to 6 components, greedy
/// beyond. Ties break toward the lowest index.
///
/// Returns `(est index, ref index, cosine)` triples sorted by ref index.
pub fn match_components(
    s_est: ArrayView2<f64>,
    s_ref: ArrayView2<f64>,
) -> Result<Vec<(usize, usize, f64)>> {
    let r_est = s_est.ncols();
    let r_ref = s_ref.ncols();
    if r_est == 0 || r_ref == 0 {
        return Err(Error::Degenerate(
            "match_components needs >= 1 column".into(),
        ));
    }
    let mut cos = Array2::<f64>::zeros((r_est, r_ref));
    for e in 0..r_est {
        for r in 0..r_ref {
            cos[[e, r]] = cosine_similarity(s_est.column(e), s_ref.column(r)).unwrap_or(0.0);
        }
    }
    let k = r_est.min(r_ref);
    let assignment: Vec<(usize, usize)> = if r_est.max(r_ref) <= 6 {
        // Exhaustive search over ordered selections of estimated columns.
        let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
        for perm in (0..r_est).permutations(k) {
            let pairs: Vec<(usize, usize)> =
                perm.iter().enumerate().map(|(r, &e)| (e, r)).collect();
            if pairs.iter().any(|&(_, r)| r >= r_ref) {
                continue;
            }
            let total: f64 = pairs.iter().map(|&(e, r)| cos[[e, r]]).sum();
            if best.as_ref().map_or(true, |(bt, _)| total > *bt + 1e-15) {
                best = Some((total, pairs));
            }
        }
        best.unwrap().1
    } else {
        // Greedy: repeatedly take the best remaining pair.
        let mut used_e = vec![false; r_est];
        let mut used_r = vec![false; r_ref];
        let mut pairs = Vec::with_capacity(k);
        for _ in 0..k {
            let mut best = (0usize, 0usize, f64::NEG_INFINITY);
            for e in 0..r_est {
                if used_e[e] {
                    continue;
                }
                for r in 0..r_ref {
                    if used_r[r] {
                        continue;
                    }
                    if cos[[e, r]] > best.2 {
                        best = (e, r, cos[[e, r]]);
                    }
                }
            }
            used_e[best.0] = true;
            used_r[best.1] = true;
            pairs.push((best.0, best.1));
        }
        pairs
    };
    let mut out: Vec<(usize, usize, f64)> = assignment
        .into_iter()
        .map(|(e, r)| (e, r, cos[[e, r]]))
        .collect();
    out.sort_by_key(|&(_, r, _)| r);
    Ok(out)
}

/// Ordinary least squares calibration line `area = slope * conc + bias` with
/// the standard coefficient of determination.
pub fn calibration_fit(areas: &[f64], conc: &[f64]) -> Result<CalibrationFit> {
    if areas.len() != conc.len() || areas.len() < 2 {
        return Err(Error::Degenerate(
            "calibration needs >= 2 paired points".into(),
        ));
    }
    let n = conc.len() as f64;
    let mean_x = conc.iter().sum::<f64>() / n;
    let mean_y = areas.iter().sum::<f64>() / n;
    let sxx: f64 = conc.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate(
            "calibration with constant concentrations".into(),
        ));
    }
    let sxy: f64 = conc
        .iter()
        .zip(areas)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let bias = mean_y - slope * mean_x;
    let ss_tot: f64 = areas.iter().map(|y| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = conc
        .iter()
        .zip(areas)
        .map(|(x, y)| (y - (slope * x + bias)).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(CalibrationFit { slope, bias, r2 })
}

/// Pooled relative standard deviation over replicate groups: the square root
/// of the dof-weighted mean of per-group variances, divided by the grand
/// mean. Returned as a fraction.
pub fn pooled_rsd(groups: &[Vec<f64>]) -> Result<f64> {
    if groups.is_empty() || groups.iter().any(|g| g.len() < 2) {
        return Err(Error::Degenerate(
            "pooled RSD needs groups of >= 2 values".into(),
        ));
    }
    let mut pooled_num = 0.0;
    let mut pooled_dof = 0.0;
    let mut grand_sum = 0.0;
    let mut grand_n = 0.0;
    for g in groups {
        let n = g.len() as f64;
        let mean = g.iter().sum::<f64>() / n;
        let var = g.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        pooled_num += (n - 1.0) * var;
        pooled_dof += n - 1.0;
        grand_sum += g.iter().sum::<f64>();
        grand_n += n;
    }
    let grand_mean = grand_sum / grand_n;
    if grand_mean == 0.0 {
        return Err(Error::Degenerate("pooled RSD with zero grand mean".into()));
    }
    Ok((pooled_num / pooled_dof).sqrt() / grand_mean)
}

/// Extrapolation protocol: `points` are `(concentration, area)` pairs sorted
/// ascending by concentration; the last point is held out. For each removal
/// depth `p` in `depths`, a calibration line is fitted on the lowest
/// `n - 1 - p` points and used to predict the held-out concentration from
/// its area; the relative error `(predicted - true) / true` is reported.
pub fn extrapolation_protocol(points: &[(f64, f64)], depths: &[usize]) -> Result<Vec<f64>> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Degenerate("extrapolation needs >= 3 points".into()));
    }
    let (true_conc, held_area) = points[n - 1];
    if true_conc == 0.0 {
        return Err(Error::Degenerate("held-out concentration is zero".into()));
    }
    let mut out = Vec::with_capacity(depths.len());
    for &p in depths {
        let keep = n
            .checked_sub(1 + p)
            .filter(|&k| k >= 2)
            .ok_or_else(|| Error::Degenerate(format!("removal depth {p} leaves < 2 points")))?;
        let conc: Vec<f64> = points[..keep].iter().map(|&(c, _)| c).collect();
        let areas: Vec<f64> = points[..keep].iter().map(|&(_, a)| a).collect();
        let fit = calibration_fit(&areas, &conc)?;
        if fit.slope == 0.0 {
            return Err(Error::Degenerate("zero calibration slope".into()));
        }
        let predicted = (held_area - fit.bias) / fit.slope;
        out.push((predicted - true_conc) / true_conc);
    }
    Ok(out)
}
