//! SNR-sweep benchmark harness: generates one dataset per SNR level, fits
//! ensembles of every requested mode, computes per-fit metrics, and emits a
//! versioned results CSV, per-cell model archives, SVG trend plots, and a
//! markdown summary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::io::{write_model, write_sidecar, write_tensor, GroundTruthSidecar};
use crate::mcr::{multi_start, sample_areas, FitOptions, Mode, Model};
use crate::metrics::{calibration_fit, match_components, var_explained, SpreadStat};
use crate::sim::{generate, SimConfig};
use crate::tensor::{augment, AugmentedMatrix};
use crate::{Error, Result};

/// CSV schema version written into every row.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Full description of one benchmark run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    /// SNR levels (internal definition: peak max over noise sigma).
    pub snr_grid: Vec<f64>,
    pub modes: Vec<Mode>,
    pub fits_per_cell: usize,
    pub sim: SimConfig,
    /// Fit template; its `mode` and `seed` are overridden per cell.
    pub fit: FitOptions,
    pub base_seed: u64,
    /// Keep every converged model on disk for offline spread analysis.
    #[serde(default = "default_true")]
    pub archive_models: bool,
}

fn default_true() -> bool {
    true
}

impl BenchmarkSpec {
    pub fn default_desk_scale() -> Self {
        let mut sim = SimConfig::default_full_scale();
        sim.dims = crate::tensor::Dims::new(16, 48, 6, 60);
        sim.analytes[0].apex1 = 5.5;
        sim.analytes[0].apex2 = 20.0;
        sim.analytes[1].apex1 = 8.5;
        sim.analytes[1].apex2 = 28.0;
        sim.sigma1 = 1.5;
        sim.sigma2 = 3.0;
        sim.shift_slope = -0.2;
        sim.inter_shift1 = 1;
        sim.inter_shift2 = 2;
        // Heavy fragment sharing keeps plain MCR rotationally ambiguous,
        // which is the regime the sweep is meant to probe.
        sim.spectral_overlap = 0.7;
        // The gain places nominal SNR 1 near the two-component recovery
        // limit for this geometry, so the grid brackets the transition.
        sim.snr_gain = 20.0;
        BenchmarkSpec {
            snr_grid: vec![3.0, 1.0, 0.45],
            modes: vec![Mode::Mcr, Mode::Siml, Mode::SimlDn],
            fits_per_cell: 50,
            sim,
            fit: {
                let mut fit = FitOptions::new(2, Mode::Mcr, 0);
                fit.max_iterations = 500;
                fit
            },
            base_seed: 42,
            archive_models: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_grid.is_empty() {
            return Err(Error::InvalidConfig("SNR grid must be non-empty".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::InvalidConfig("modes must be non-empty".into()));
        }
        if self.fits_per_cell == 0 {
            return Err(Error::InvalidConfig("fits_per_cell must be >= 1".into()));
        }
        self.sim.validate()?;
        self.fit.validate()
    }
}

/// Scalar metrics of one fitted model against ground truth.
#[derive(Debug, Clone)]
pub struct FitMetrics {
    pub converged: bool,
    pub iterations: usize,
    pub loss: f64,
    pub var_explained: f64,
    pub cosine_mean: f64,
    pub cosine_min: f64,
    pub r2_mean: f64,
    pub bias_mean: f64,
}

/// Evaluates one model against the simulator's ground truth.
pub fn evaluate_model(
    x: &AugmentedMatrix,
    model: &Model,
    truth: &GroundTruthSidecar,
) -> Result<FitMetrics> {
    let ve = var_explained(x.values.view(), model.c.view(), model.s.view())?;
    let spectra_ref = truth.spectra_matrix();
    let conc_ref = truth.concentration_matrix();
    let n_analytes = truth.apexes.first().map_or(spectra_ref.ncols(), Vec::len);
    // Match against analyte spectra only; a baseline component, when
    // present, sits in the trailing reference column and is excluded.
    let matched = match_components(
        model.s.view(),
        spectra_ref.slice(ndarray::s![.., ..n_analytes]),
    )?;
    let cosines: Vec<f64> = matched.iter().map(|&(_, _, c)| c).collect();
    let cosine_mean = cosines.iter().sum::<f64>() / cosines.len() as f64;
    let cosine_min = cosines.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut r2s = Vec::new();
    let mut biases = Vec::new();
    for &(est, refc, _) in &matched {
        let areas = sample_areas(model, x.dims, est);
        let conc: Vec<f64> = (0..conc_ref.nrows()).map(|l| conc_ref[[l, refc]]).collect();
        if let Ok(fit) = calibration_fit(&areas, &conc) {
            r2s.push(fit.r2);
            // Bias relative to the largest area keeps it comparable across
            // SNR levels.
            let scale = areas.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
            biases.push(fit.bias / scale);
        }
    }
    let r2_mean = if r2s.is_empty() {
        f64::NAN
    } else {
        r2s.iter().sum::<f64>() / r2s.len() as f64
    };
    let bias_mean = if biases.is_empty() {
        f64::NAN
    } else {
        biases.iter().sum::<f64>() / biases.len() as f64
    };
    Ok(FitMetrics {
        converged: model.converged,
        iterations: model.iterations,
        loss: model.final_loss(),
        var_explained: ve,
        cosine_mean,
        cosine_min,
        r2_mean,
        bias_mean,
    })
}

const CSV_COLUMNS: &[&str] = &[
    "schema",
    "snr",
    "mode",
    "kind",
    "fit_index",
    "seed",
    "converged",
    "iterations",
    "loss",
    "var_explained",
    "cosine_mean",
    "cosine_min",
    "r2_mean",
    "bias_mean",
];

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.12e}")
    }
}

/// Runs the full benchmark and writes `results.csv` (one detail row per fit,
/// `mean`/`std` aggregate rows per cell) plus optional model archives under
/// `out_dir`.
pub fn run_benchmark(spec: &BenchmarkSpec, out_dir: &Path) -> Result<PathBuf> {
    spec.validate()?;
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("results.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(CSV_COLUMNS)?;

    let mut warnings = Vec::new();
    for (snr_idx, &snr) in spec.snr_grid.iter().enumerate() {
        // One fresh dataset per fit index, shared across modes: cell means
        // then average over noise realizations instead of riding on one
        // draw, while every mode still sees identical data.
        let mut cell: BTreeMap<&'static str, Vec<(u64, FitMetrics)>> = BTreeMap::new();
        for fit_idx in 0..spec.fits_per_cell {
            let mut sim = spec.sim.clone();
            sim.snr = if snr.is_finite() { Some(snr) } else { None };
            sim.seed = spec
                .base_seed
                .wrapping_add(1000 * snr_idx as u64)
                .wrapping_add(10_007 * fit_idx as u64);
            let (ds, gt) = generate(&sim)?;
            let x = augment(&ds)?;
            let sidecar = GroundTruthSidecar::from_truth(ds.dims(), &gt);
            if spec.archive_models && fit_idx == 0 {
                let cell_dir = out_dir.join(format!("snr_{snr_idx}"));
                fs::create_dir_all(&cell_dir)?;
                write_tensor(&cell_dir.join("tensor.bin"), &ds)?;
                write_sidecar(&cell_dir.join("truth.json"), &sidecar)?;
            }

            for &mode in &spec.modes {
                let mut opts = spec.fit.clone();
                opts.mode = mode;
                opts.seed = sim.seed.wrapping_add(100_000 * (mode as u64 + 1));
                let ensemble = multi_start(&x, &opts, 1)?;
                let Some(model) = ensemble.models.first() else {
                    warnings.push(format!(
                        "cell snr={snr} mode={} fit={fit_idx}: no usable model",
                        mode.as_str()
                    ));
                    continue;
                };
                let m = evaluate_model(&x, model, &sidecar)?;
                if spec.archive_models {
                    let stem = out_dir
                        .join(format!("snr_{snr_idx}"))
                        .join(format!("model_{}_{fit_idx}", mode.as_str()));
                    fs::create_dir_all(out_dir.join(format!("snr_{snr_idx}")))?;
                    write_model(&stem, ds.dims(), model)?;
                }
                cell.entry(mode.as_str())
                    .or_default()
                    .push((model.options.seed, m));
            }
        }

        for &mode in &spec.modes {
            let cell_entries = cell.remove(mode.as_str()).unwrap_or_default();
            if cell_entries.len() < spec.fits_per_cell {
                warnings.push(format!(
                    "cell snr={snr} mode={}: only {}/{} usable fits",
                    mode.as_str(),
                    cell_entries.len(),
                    spec.fits_per_cell
                ));
            }
            let mut cell_metrics = Vec::new();
            for (fit_idx, (seed, m)) in cell_entries.into_iter().enumerate() {
                w.write_record([
                    CSV_SCHEMA_VERSION.to_string(),
                    format!("{snr}"),
                    mode.as_str().to_string(),
                    "detail".to_string(),
                    fit_idx.to_string(),
                    seed.to_string(),
                    u8::from(m.converged).to_string(),
                    m.iterations.to_string(),
                    fmt(m.loss),
                    fmt(m.var_explained),
                    fmt(m.cosine_mean),
                    fmt(m.cosine_min),
                    fmt(m.r2_mean),
                    fmt(m.bias_mean),
                ])?;
                cell_metrics.push(m);
            }
            for kind in ["mean", "std"] {
                let agg = |f: &dyn Fn(&FitMetrics) -> f64| -> f64 {
                    let vals: Vec<f64> = cell_metrics.iter().map(f).collect();
                    let stat = SpreadStat::from_values("", &vals);
                    if kind == "mean" {
                        stat.mean
                    } else {
                        stat.std
                    }
                };
                w.write_record([
                    CSV_SCHEMA_VERSION.to_string(),
                    format!("{snr}"),
                    mode.as_str().to_string(),
                    kind.to_string(),
                    String::new(),
                    String::new(),
                    cell_metrics
                        .iter()
                        .filter(|m| m.converged)
                        .count()
                        .to_string(),
                    String::new(),
                    fmt(agg(&|m| m.loss)),
                    fmt(agg(&|m| m.var_explained)),
                    fmt(agg(&|m| m.cosine_mean)),
                    fmt(agg(&|m| m.cosine_min)),
                    fmt(agg(&|m| m.r2_mean)),
                    fmt(agg(&|m| m.bias_mean)),
                ])?;
            }
        }
    }
    w.flush()?;
    if !warnings.is_empty() {
        fs::write(out_dir.join("warnings.txt"), warnings.join("\n"))?;
    }
    Ok(csv_path)
}

/// One parsed results row.
#[derive(Debug, Clone)]
pub struct ResultsRow {
    pub snr: f64,
    pub mode: String,
    pub kind: String,
    pub metrics: BTreeMap<String, f64>,
}

/// Parses a results CSV back into rows.
pub fn read_results(path: &Path) -> Result<Vec<ResultsRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let get = |name: &str| -> Option<&str> {
            headers.iter().position(|h| h == name).map(|i| &record[i])
        };
        let snr: f64 = get("snr")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Container("results.csv missing snr".into()))?;
        let mode = get("mode").unwrap_or("").to_string();
        let kind = get("kind").unwrap_or("").to_string();
        let mut metrics = BTreeMap::new();
        for name in [
            "loss",
            "var_explained",
            "cosine_mean",
            "cosine_min",
            "r2_mean",
            "bias_mean",
        ] {
            if let Some(v) = get(name).and_then(|v| v.parse::<f64>().ok()) {
                metrics.insert(name.to_string(), v);
            }
        }
        rows.push(ResultsRow {
            snr,
            mode,
            kind,
            metrics,
        });
    }
    Ok(rows)
}

const PLOT_METRICS: &[&str] = &["var_explained", "cosine_mean", "r2_mean", "bias_mean"];
const MODE_COLORS: &[(&str, &str)] = &[
    ("mcr", "#1f77b4"),
    ("siml", "#ff7f0e"),
    ("siml_dn", "#2ca02c"),
];

/// Emits one SVG per metric (value vs SNR, one polyline per mode, log-scaled
/// SNR axis) plus `summary.md`. Data points carry `data-snr`/`data-value`
/// attributes so plotted values can be parsed back and checked against the
/// CSV.
pub fn write_report(results_csv: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let rows = read_results(results_csv)?;
    let means: Vec<&ResultsRow> = rows.iter().filter(|r| r.kind == "mean").collect();
    if means.is_empty() {
        return Err(Error::Degenerate(
            "results CSV contains no aggregate rows".into(),
        ));
    }
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for &metric in PLOT_METRICS {
        let svg = render_metric_svg(&means, metric)?;
        let path = out_dir.join(format!("{metric}_vs_snr.svg"));
        fs::write(&path, svg)?;
        written.push(path);
    }

    let mut md = String::from("# Benchmark summary\n\n");
    md.push_str("Mean metric values per (SNR, mode) cell; see the SVG plots for trends.\n\n");
    md.push_str("| SNR | mode | var_explained | cosine_mean | r2_mean | bias_mean |\n");
    md.push_str("|----:|------|--------------:|------------:|--------:|----------:|\n");
    let mut sorted = means.clone();
    sorted.sort_by(|a, b| {
        b.snr
            .partial_cmp(&a.snr)
            .unwrap()
            .then_with(|| a.mode.cmp(&b.mode))
    });
    for row in sorted {
        md.push_str(&format!(
            "| {} | {} | {:.4} | {:.4} | {:.4} | {:.4} |\n",
            row.snr,
            row.mode,
            row.metrics
                .get("var_explained")
                .copied()
                .unwrap_or(f64::NAN),
            row.metrics.get("cosine_mean").copied().unwrap_or(f64::NAN),
            row.metrics.get("r2_mean").copied().unwrap_or(f64::NAN),
            row.metrics.get("bias_mean").copied().unwrap_or(f64::NAN),
        ));
    }
    let md_path = out_dir.join("summary.md");
    fs::write(&md_path, md)?;
    written.push(md_path);
    Ok(written)
}

fn render_metric_svg(means: &[&ResultsRow], metric: &str) -> Result<String> {
    let (w, h) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 30.0, 50.0);
    let mut points: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for row in means {
        if let Some(&v) = row.metrics.get(metric) {
            if v.is_finite() {
                points
                    .entry(row.mode.clone())
                    .or_default()
                    .push((row.snr, v));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::Degenerate(format!("no data for metric {metric}")));
    }
    let all: Vec<(f64, f64)> = points.values().flatten().copied().collect();
    let x_min = all.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = all.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let mut y_min = all.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let mut y_max = all.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if (y_max - y_min).abs() < 1e-12 {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
    let lx_min = x_min.ln();
    let lx_max = if x_max > x_min {
        x_max.ln()
    } else {
        x_min.ln() + 1.0
    };
    let sx = |x: f64| -> f64 {
        if lx_max > lx_min {
            ml + (x.ln() - lx_min) / (lx_max - lx_min) * (w - ml - mr)
        } else {
            (ml + w - mr) / 2.0
        }
    };
    let sy = |y: f64| -> f64 { h - mb - (y - y_min) / (y_max - y_min) * (h - mt - mb) };

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{metric} vs SNR</text>\n\
         <line x1=\"{ml}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
         <line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        w / 2.0,
        h - mb,
        w - mr,
        h - mb,
        h - mb,
    );
    // Axis labels.
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">SNR (log scale)</text>\n\
         <text x=\"18\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{metric}</text>\n",
        (ml + w - mr) / 2.0,
        h - 12.0,
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0,
    ));
    let mut legend_y = mt + 10.0;
    for (mode, pts) in &points {
        let color = MODE_COLORS
            .iter()
            .find(|(m, _)| m == mode)
            .map(|(_, c)| *c)
            .unwrap_or("#555555");
        let mut pts = pts.clone();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        for &(x, y) in &pts {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{color}\" data-mode=\"{mode}\" data-snr=\"{x}\" data-value=\"{y}\"/>\n",
                sx(x),
                sy(y)
            ));
        }
        svg.push_str(&format!(
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">{mode}</text>\n",
            w - mr - 110.0,
            legend_y - 10.0,
            w - mr - 92.0,
            legend_y
        ));
        legend_y += 18.0;
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Dims;

    fn tiny_spec() -> BenchmarkSpec {
        let mut spec = BenchmarkSpec::default_desk_scale();
        spec.sim.dims = Dims::new(8, 24, 3, 16);
        spec.sim.analytes[0].apex1 = 3.5;
        spec.sim.analytes[0].apex2 = 8.0;
        spec.sim.analytes[1].apex1 = 4.5;
        spec.sim.analytes[1].apex2 = 14.0;
        spec.sim.sigma1 = 0.8;
        spec.sim.sigma2 = 1.6;
        spec.sim.shift_slope = 0.0;
        spec.sim.inter_shift1 = 0;
        spec.sim.inter_shift2 = 1;
        spec.sim.spectral_fragments = 5;
        spec.sim.spectral_overlap = 0.0;
        spec.fit.max_iterations = 60;
        spec.fit.tolerance = 1e-6;
        spec.archive_models = false;
        spec
    }

    #[test]
    fn one_cell_one_fit_row_counts() {
        let mut spec = tiny_spec();
        spec.snr_grid = vec![5.0];
        spec.modes = vec![Mode::Mcr];
        spec.fits_per_cell = 1;
        let dir = tempfile::tempdir().unwrap();
        let csv = run_benchmark(&spec, dir.path()).unwrap();
        let rows = read_results(&csv).unwrap();
        assert_eq!(rows.iter().filter(|r| r.kind == "detail").count(), 1);
        assert_eq!(rows.iter().filter(|r| r.kind == "mean").count(), 1);
        assert_eq!(rows.iter().filter(|r| r.kind == "std").count(), 1);
    }

    #[test]
    fn grid_row_counts_and_aggregate_consistency() {
        let mut spec = tiny_spec();
        spec.snr_grid = vec![8.0, 4.0];
        spec.modes = vec![Mode::Mcr, Mode::Siml];
        spec.fits_per_cell = 3;
        let dir = tempfile::tempdir().unwrap();
        let csv = run_benchmark(&spec, dir.path()).unwrap();
        let rows = read_results(&csv).unwrap();
        let details: Vec<&ResultsRow> = rows.iter().filter(|r| r.kind == "detail").collect();
        assert_eq!(details.len(), 12);
        // Aggregate mean equals the mean of the detail rows.
        for snr in [8.0, 4.0] {
            for mode in ["mcr", "siml"] {
                let cell: Vec<f64> = details
                    .iter()
                    .filter(|r| r.snr == snr && r.mode == mode)
                    .map(|r| r.metrics["cosine_mean"])
                    .collect();
                let mean_row = rows
                    .iter()
                    .find(|r| r.kind == "mean" && r.snr == snr && r.mode == mode)
                    .unwrap();
                let expected = cell.iter().sum::<f64>() / cell.len() as f64;
                assert!(
                    (mean_row.metrics["cosine_mean"] - expected).abs() < 1e-9,
                    "aggregate mismatch"
                );
            }
        }
    }

    #[test]
    fn benchmark_deterministic() {
        let mut spec = tiny_spec();
        spec.snr_grid = vec![6.0];
        spec.modes = vec![Mode::Mcr];
        spec.fits_per_cell = 2;
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let c1 = run_benchmark(&spec, d1.path()).unwrap();
        let c2 = run_benchmark(&spec, d2.path()).unwrap();
        assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());
    }

    #[test]
    fn report_svg_parse_back() {
        let mut spec = tiny_spec();
        spec.snr_grid = vec![8.0, 4.0];
        spec.modes = vec![Mode::Mcr];
        spec.fits_per_cell = 2;
        let dir = tempfile::tempdir().unwrap();
        let csv = run_benchmark(&spec, dir.path()).unwrap();
        let report_dir = dir.path().join("report");
        let files = write_report(&csv, &report_dir).unwrap();
        assert!(files.iter().any(|f| f.ends_with("summary.md")));

        // Parse the plotted data-value attributes back and compare with the
        // CSV's aggregate means.
        let rows = read_results(&csv).unwrap();
        let svg = fs::read_to_string(report_dir.join("cosine_mean_vs_snr.svg")).unwrap();
        let mut found = 0;
        for token in svg.split("<circle ").skip(1) {
            let attr = |name: &str| -> Option<f64> {
                let tag = format!("{name}=\"");
                let start = token.find(&tag)? + tag.len();
                let end = token[start..].find('"')? + start;
                token[start..end].parse().ok()
            };
            let snr = attr("data-snr").unwrap();
            let value = attr("data-value").unwrap();
            let row = rows
                .iter()
                .find(|r| r.kind == "mean" && r.snr == snr && r.mode == "mcr")
                .unwrap();
            assert!((row.metrics["cosine_mean"] - value).abs() < 1e-12);
            found += 1;
        }
        assert_eq!(found, 2);
    }

    #[test]
    fn report_rejects_empty_results() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("empty.csv");
        fs::write(&csv, CSV_COLUMNS.join(",") + "\n").unwrap();
        assert!(write_report(&csv, dir.path()).is_err());
    }
}
