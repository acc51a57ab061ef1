//! File formats: the tensor container (one JSON header line followed by
//! little-endian 64-bit floats in canonical order), CSV export for small
//! tensors, the ground-truth sidecar, and model serialization.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array2, Array4};
use serde::{Deserialize, Serialize};

use crate::mcr::{FitOptions, Model};
use crate::sim::GroundTruth;
use crate::tensor::{Dims, Gc2Dataset};
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct ContainerHeader {
    dims: [usize; 4],
    order: String,
    dtype: String,
}

const CANONICAL_ORDER: &str = "ikl-row-major";
const DTYPE: &str = "f64le";

/// Writes a dataset in the container format: header line
/// `{"dims":[I,K,L,J],"order":"ikl-row-major","dtype":"f64le"}` followed by
/// `I*K*L*J` little-endian doubles, canonical row order, `J` values per row.
pub fn write_tensor(path: &Path, dataset: &Gc2Dataset) -> Result<()> {
    let dims = dataset.dims();
    let mut w = BufWriter::new(File::create(path)?);
    let header = ContainerHeader {
        dims: [dims.i, dims.k, dims.l, dims.j],
        order: CANONICAL_ORDER.to_string(),
        dtype: DTYPE.to_string(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    let rows = dims.rows()?;
    for r in 0..rows {
        let (i, k, l) = dims.unrow(r);
        for j in 0..dims.j {
            w.write_all(&dataset.data[[i, k, l, j]].to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a container file written by [`write_tensor`].
pub fn read_tensor(path: &Path) -> Result<Gc2Dataset> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header_line = String::new();
    r.read_line(&mut header_line)?;
    let header: ContainerHeader = serde_json::from_str(header_line.trim_end())
        .map_err(|e| Error::Container(format!("bad header: {e}")))?;
    if header.order != CANONICAL_ORDER || header.dtype != DTYPE {
        return Err(Error::Container(format!(
            "unsupported order/dtype: {}/{}",
            header.order, header.dtype
        )));
    }
    let [i, k, l, j] = header.dims;
    let dims = Dims::new(i, k, l, j);
    let rows = dims.rows()?;
    let total = rows
        .checked_mul(j)
        .ok_or(Error::IndexOverflow([i, k, l, j]))?;
    let mut bytes = Vec::with_capacity(total * 8);
    r.read_to_end(&mut bytes)?;
    if bytes.len() != total * 8 {
        return Err(Error::Container(format!(
            "expected {} payload bytes, found {}",
            total * 8,
            bytes.len()
        )));
    }
    let mut data = Array4::zeros((i, k, l, j));
    for row in 0..rows {
        let (ii, kk, ll) = dims.unrow(row);
        for jj in 0..j {
            let off = (row * j + jj) * 8;
            let v = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
            data[[ii, kk, ll, jj]] = v;
        }
    }
    Gc2Dataset::new(data)
}

/// CSV export for small tensors: one row per `(i, k, l)`, one column per
/// mass channel, preceded by the index columns.
pub fn write_tensor_csv(path: &Path, dataset: &Gc2Dataset) -> Result<()> {
    let dims = dataset.dims();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["i".to_string(), "k".to_string(), "l".to_string()];
    header.extend((0..dims.j).map(|j| format!("j{j}")));
    w.write_record(&header)?;
    let rows = dims.rows()?;
    for r in 0..rows {
        let (i, k, l) = dims.unrow(r);
        let mut record = vec![i.to_string(), k.to_string(), l.to_string()];
        record.extend((0..dims.j).map(|j| format!("{}", dataset.data[[i, k, l, j]])));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON sidecar carrying the simulator's ground truth (spectra,
/// concentrations, apex positions); the raw noise field goes to its own
/// container file.
#[derive(Debug, Serialize, Deserialize)]
pub struct GroundTruthSidecar {
    pub dims: [usize; 4],
    /// Column-per-component spectra, `J` rows.
    pub spectra: Vec<Vec<f64>>,
    /// Row-per-sample concentrations.
    pub concentrations: Vec<Vec<f64>>,
    /// `apexes[sample][analyte] = [mode-1 apex, mode-2 apex]`.
    pub apexes: Vec<Vec<[f64; 2]>>,
    pub noise_sigma: f64,
}

impl GroundTruthSidecar {
    pub fn from_truth(dims: Dims, gt: &GroundTruth) -> Self {
        let n_comp = gt.spectra.ncols();
        GroundTruthSidecar {
            dims: [dims.i, dims.k, dims.l, dims.j],
            spectra: (0..n_comp).map(|c| gt.spectra.column(c).to_vec()).collect(),
            concentrations: (0..gt.concentrations.nrows())
                .map(|l| gt.concentrations.row(l).to_vec())
                .collect(),
            apexes: gt
                .apexes
                .iter()
                .map(|row| row.iter().map(|&(a, b)| [a, b]).collect())
                .collect(),
            noise_sigma: gt.noise_sigma,
        }
    }

    /// Spectra as a `(J x n_components)` matrix.
    pub fn spectra_matrix(&self) -> Array2<f64> {
        let j = self.dims[3];
        let n = self.spectra.len();
        let mut m = Array2::zeros((j, n));
        for (c, col) in self.spectra.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                m[[r, c]] = v;
            }
        }
        m
    }

    /// Concentrations as an `(L x n_components)` matrix.
    pub fn concentration_matrix(&self) -> Array2<f64> {
        let l = self.concentrations.len();
        let n = self.concentrations.first().map_or(0, Vec::len);
        let mut m = Array2::zeros((l, n));
        for (r, row) in self.concentrations.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m[[r, c]] = v;
            }
        }
        m
    }
}

pub fn write_sidecar(path: &Path, sidecar: &GroundTruthSidecar) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(w, sidecar)?;
    Ok(())
}

pub fn read_sidecar(path: &Path) -> Result<GroundTruthSidecar> {
    let r = BufReader::new(File::open(path)?);
    Ok(serde_json::from_reader(r)?)
}

/// JSON metadata of a saved model; factor matrices go to companion container
/// files (`<stem>.c.bin`, `<stem>.s.bin`) reusing the tensor format with a
/// flat layout.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub dims: [usize; 4],
    pub r: usize,
    pub loss_trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub concentrations: Option<Vec<Vec<f64>>>,
    pub degenerate_components: Vec<usize>,
    pub options: FitOptions,
}

fn write_matrix(path: &Path, m: &Array2<f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header = ContainerHeader {
        dims: [m.nrows(), m.ncols(), 1, 1],
        order: "row-major".to_string(),
        dtype: DTYPE.to_string(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for v in m.iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_matrix(path: &Path) -> Result<Array2<f64>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header_line = String::new();
    r.read_line(&mut header_line)?;
    let header: ContainerHeader = serde_json::from_str(header_line.trim_end())
        .map_err(|e| Error::Container(format!("bad matrix header: {e}")))?;
    let (rows, cols) = (header.dims[0], header.dims[1]);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != rows * cols * 8 {
        return Err(Error::Container("matrix payload size mismatch".into()));
    }
    let mut m = Array2::zeros((rows, cols));
    for row in 0..rows {
        for col in 0..cols {
            let off = (row * cols + col) * 8;
            m[[row, col]] = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        }
    }
    Ok(m)
}

/// Saves a fitted model as `<stem>.json` + `<stem>.c.bin` + `<stem>.s.bin`.
pub fn write_model(stem: &Path, dims: Dims, model: &Model) -> Result<()> {
    let meta = ModelMetadata {
        dims: [dims.i, dims.k, dims.l, dims.j],
        r: model.c.ncols(),
        loss_trace: model.loss_trace.clone(),
        converged: model.converged,
        iterations: model.iterations,
        concentrations: model
            .concentrations
            .as_ref()
            .map(|m| (0..m.nrows()).map(|l| m.row(l).to_vec()).collect()),
        degenerate_components: model.degenerate_components.clone(),
        options: model.options.clone(),
    };
    let w = BufWriter::new(File::create(stem.with_extension("json"))?);
    serde_json::to_writer_pretty(w, &meta)?;
    write_matrix(&stem.with_extension("c.bin"), &model.c)?;
    write_matrix(&stem.with_extension("s.bin"), &model.s)?;
    Ok(())
}

/// Loads a model written by [`write_model`].
pub fn read_model(stem: &Path) -> Result<(Model, Dims)> {
    let r = BufReader::new(File::open(stem.with_extension("json"))?);
    let meta: ModelMetadata = serde_json::from_reader(r)?;
    let c = read_matrix(&stem.with_extension("c.bin"))?;
    let s = read_matrix(&stem.with_extension("s.bin"))?;
    let [i, k, l, j] = meta.dims;
    let concentrations = meta.concentrations.map(|rows| {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = Array2::zeros((rows.len(), ncols));
        for (ri, row) in rows.iter().enumerate() {
            for (ci, &v) in row.iter().enumerate() {
                m[[ri, ci]] = v;
            }
        }
        m
    });
    Ok((
        Model {
            c,
            s,
            loss_trace: meta.loss_trace,
            converged: meta.converged,
            iterations: meta.iterations,
            concentrations,
            degenerate_components: meta.degenerate_components,
            options: meta.options,
        },
        Dims::new(i, k, l, j),
    ))
}
