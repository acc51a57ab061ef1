//! Four-mode tensor container and the reshapes between tensor, augmented
//! matrix, and per-component profile matrices.
//!
//! Canonical row order: `row(i, k, l) = i + I * (k + K * l)` — the modulation
//! index varies fastest, then the scan index, then the sample index. Every
//! reshape in the crate is index arithmetic over this one ordering.

use ndarray::{Array2, Array4};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dimensions of a four-mode chromatographic tensor.
///
/// `i`: modulations (first dimension), `k`: second-dimension scans,
/// `l`: samples, `j`: mass channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub i: usize,
    pub k: usize,
    pub l: usize,
    pub j: usize,
}

impl Dims {
    pub fn new(i: usize, k: usize, l: usize, j: usize) -> Self {
        Dims { i, k, l, j }
    }

    /// Number of rows of the augmented matrix, checked for overflow.
    pub fn rows(&self) -> Result<usize> {
        self.i
            .checked_mul(self.k)
            .and_then(|v| v.checked_mul(self.l))
            .ok_or(Error::IndexOverflow([self.i, self.k, self.l, self.j]))
    }

    /// Canonical flat row index of the (modulation, scan, sample) triple.
    #[inline]
    pub fn row(&self, i: usize, k: usize, l: usize) -> usize {
        i + self.i * (k + self.k * l)
    }

    /// Inverse of [`Dims::row`].
    #[inline]
    pub fn unrow(&self, row: usize) -> (usize, usize, usize) {
        let i = row % self.i;
        let rest = row / self.i;
        (i, rest % self.k, rest / self.k)
    }
}

/// A four-mode chromatographic data tensor with optional axis metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Gc2Dataset {
    /// Dense values indexed `(i, k, l, j)`.
    pub data: Array4<f64>,
    /// Optional first-dimension retention times, length `I`.
    pub rt1: Option<Vec<f64>>,
    /// Optional second-dimension retention times, length `K`.
    pub rt2: Option<Vec<f64>>,
    /// Optional m/z axis, length `J`.
    pub mz: Option<Vec<f64>>,
}

impl Gc2Dataset {
    /// Builds a dataset, validating finiteness, minimum dimensions, and axis
    /// label lengths.
    pub fn new(data: Array4<f64>) -> Result<Self> {
        let shape = data.shape();
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::InvalidConfig(format!(
                "all tensor dimensions must be >= 1, got {shape:?}"
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("Gc2Dataset::data"));
        }
        Ok(Gc2Dataset {
            data,
            rt1: None,
            rt2: None,
            mz: None,
        })
    }

    pub fn with_axes(
        mut self,
        rt1: Option<Vec<f64>>,
        rt2: Option<Vec<f64>>,
        mz: Option<Vec<f64>>,
    ) -> Result<Self> {
        let d = self.dims();
        for (axis, len, dim) in [
            ("rt1", rt1.as_ref().map(Vec::len), d.i),
            ("rt2", rt2.as_ref().map(Vec::len), d.k),
            ("mz", mz.as_ref().map(Vec::len), d.j),
        ] {
            if let Some(len) = len {
                if len != dim {
                    return Err(Error::DimensionMismatch {
                        context: "axis label length",
                        expected: dim.to_string(),
                        actual: format!("{axis} has {len}"),
                    });
                }
            }
        }
        self.rt1 = rt1;
        self.rt2 = rt2;
        self.mz = mz;
        Ok(self)
    }

    pub fn dims(&self) -> Dims {
        let s = self.data.shape();
        Dims::new(s[0], s[1], s[2], s[3])
    }
}

/// The `(IKL × J)` unfolding of a [`Gc2Dataset`] in canonical row order.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMatrix {
    pub values: Array2<f64>,
    pub dims: Dims,
}

/// One component's concatenated elution profile, length `IKL` in canonical
/// order, together with the dimensions needed to reshape it.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentProfile {
    pub vector: Vec<f64>,
    pub dims: Dims,
    pub component: usize,
}

/// Unfolds the tensor into the `(IKL × J)` augmented matrix.
pub fn augment(dataset: &Gc2Dataset) -> Result<AugmentedMatrix> {
    let dims = dataset.dims();
    let rows = dims.rows()?;
    let mut values = Array2::zeros((rows, dims.j));
    for l in 0..dims.l {
        for k in 0..dims.k {
            for i in 0..dims.i {
                let r = dims.row(i, k, l);
                for j in 0..dims.j {
                    values[[r, j]] = dataset.data[[i, k, l, j]];
                }
            }
        }
    }
    Ok(AugmentedMatrix { values, dims })
}

/// Folds an augmented matrix back into the tensor; exact inverse of
/// [`augment`].
pub fn unaugment(matrix: &AugmentedMatrix) -> Result<Gc2Dataset> {
    let dims = matrix.dims;
    let rows = dims.rows()?;
    if matrix.values.nrows() != rows || matrix.values.ncols() != dims.j {
        return Err(Error::DimensionMismatch {
            context: "unaugment",
            expected: format!("{rows}x{}", dims.j),
            actual: format!("{}x{}", matrix.values.nrows(), matrix.values.ncols()),
        });
    }
    let mut data = Array4::zeros((dims.i, dims.k, dims.l, dims.j));
    for r in 0..rows {
        let (i, k, l) = dims.unrow(r);
        for j in 0..dims.j {
            data[[i, k, l, j]] = matrix.values[[r, j]];
        }
    }
    Gc2Dataset::new(data)
}

/// Reshapes a concatenated elution profile into its `(I × KL)` matrix.
/// Column `k + K*l` holds the first-dimension profile of that (scan, sample)
/// pair.
pub fn profile_as_mode1_matrix(profile: &ComponentProfile) -> Result<Array2<f64>> {
    let d = profile.dims;
    let rows = d.rows()?;
    if profile.vector.len() != rows {
        return Err(Error::DimensionMismatch {
            context: "profile_as_mode1_matrix",
            expected: rows.to_string(),
            actual: profile.vector.len().to_string(),
        });
    }
    let mut m = Array2::zeros((d.i, d.k * d.l));
    for (flat, &v) in profile.vector.iter().enumerate() {
        let (i, k, l) = d.unrow(flat);
        m[[i, k + d.k * l]] = v;
    }
    Ok(m)
}

/// Inverse of [`profile_as_mode1_matrix`].
pub fn mode1_matrix_as_profile(m: &Array2<f64>, dims: Dims, component: usize) -> ComponentProfile {
    let mut vector = vec![0.0; dims.i * dims.k * dims.l];
    for i in 0..dims.i {
        for c in 0..dims.k * dims.l {
            let (k, l) = (c % dims.k, c / dims.k);
            vector[dims.row(i, k, l)] = m[[i, c]];
        }
    }
    ComponentProfile {
        vector,
        dims,
        component,
    }
}

/// Reshapes a `KL` vector into its `(K × L)` matrix; column `l` is the
/// second-dimension profile of sample `l`.
pub fn vector_as_mode2_matrix(v: &[f64], k: usize, l: usize) -> Result<Array2<f64>> {
    if v.len() != k * l {
        return Err(Error::DimensionMismatch {
            context: "vector_as_mode2_matrix",
            expected: (k * l).to_string(),
            actual: v.len().to_string(),
        });
    }
    let mut m = Array2::zeros((k, l));
    for (flat, &x) in v.iter().enumerate() {
        m[[flat % k, flat / k]] = x;
    }
    Ok(m)
}

/// Inverse of [`vector_as_mode2_matrix`].
pub fn mode2_matrix_as_vector(m: &Array2<f64>) -> Vec<f64> {
    let (k, l) = m.dim();
    let mut v = vec![0.0; k * l];
    for li in 0..l {
        for ki in 0..k {
            v[ki + k * li] = m[[ki, li]];
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array4;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn random_dataset(i: usize, k: usize, l: usize, j: usize, seed: u64) -> Gc2Dataset {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let data = Array4::from_shape_fn((i, k, l, j), |_| rng.gen_range(-1.0..1.0));
        Gc2Dataset::new(data).unwrap()
    }

    #[test]
    fn augment_identity_case() {
        let ds = Gc2Dataset::new(Array4::from_elem((1, 1, 1, 1), 3.5)).unwrap();
        let m = augment(&ds).unwrap();
        assert_eq!(m.values.dim(), (1, 1));
        assert_eq!(m.values[[0, 0]], 3.5);
    }

    #[test]
    fn augment_matches_index_oracle() {
        // I=2, K=2, L=1, J=1 with data[i,k] = 10i + k.
        let data = Array4::from_shape_fn((2, 2, 1, 1), |(i, k, _, _)| 10.0 * i as f64 + k as f64);
        let ds = Gc2Dataset::new(data).unwrap();
        let m = augment(&ds).unwrap();
        assert_eq!(m.values.dim(), (4, 1));
        // Oracle: brute-force index enumeration of row(i,k,l) = i + I*(k + K*l).
        for i in 0..2usize {
            for k in 0..2usize {
                let row = i + 2 * k;
                assert_eq!(m.values[[row, 0]], 10.0 * i as f64 + k as f64);
            }
        }
    }

    #[test]
    fn augment_full_scale_dims() {
        // 20 x 200 x 10 x 761 would be slow to fill element-wise in a unit
        // test; check the row arithmetic at that scale instead plus a smaller
        // allocation sanity check.
        let d = Dims::new(20, 200, 10, 761);
        assert_eq!(d.rows().unwrap(), 40_000);
        assert_eq!(d.row(19, 199, 9), 39_999);
        let ds = random_dataset(4, 5, 3, 6, 1);
        let m = augment(&ds).unwrap();
        assert_eq!(m.values.dim(), (60, 6));
    }

    #[test]
    fn unaugment_round_trip_exact() {
        let ds = random_dataset(3, 4, 2, 5, 7);
        let back = unaugment(&augment(&ds).unwrap()).unwrap();
        // Element-by-element oracle, bit-exact.
        for (a, b) in ds.data.iter().zip(back.data.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn unaugment_rejects_bad_row_count() {
        let ds = random_dataset(2, 2, 2, 2, 3);
        let mut m = augment(&ds).unwrap();
        m.dims.l = 3;
        assert!(unaugment(&m).is_err());
    }

    #[test]
    fn single_sample_layout() {
        // L=1 tensor: augmented matrix is the (IK x J) single-measurement
        // layout.
        let ds = random_dataset(3, 4, 1, 2, 9);
        let m = augment(&ds).unwrap();
        assert_eq!(m.values.nrows(), 12);
        for k in 0..4 {
            for i in 0..3 {
                assert_eq!(m.values[[i + 3 * k, 1]], ds.data[[i, k, 0, 1]]);
            }
        }
    }

    #[test]
    fn mode1_reshape_against_enumeration() {
        // I=2, K=3, L=1, vector [1..6] canonical.
        let dims = Dims::new(2, 3, 1, 1);
        let profile = ComponentProfile {
            vector: (1..=6).map(|v| v as f64).collect(),
            dims,
            component: 0,
        };
        let m = profile_as_mode1_matrix(&profile).unwrap();
        assert_eq!(m.dim(), (2, 3));
        for i in 0..2 {
            for k in 0..3 {
                assert_eq!(m[[i, k]], (dims.row(i, k, 0) + 1) as f64);
            }
        }
    }

    #[test]
    fn mode1_trivial_and_errors() {
        let dims = Dims::new(1, 1, 1, 1);
        let p = ComponentProfile {
            vector: vec![2.0],
            dims,
            component: 0,
        };
        assert_eq!(profile_as_mode1_matrix(&p).unwrap()[[0, 0]], 2.0);

        let bad = ComponentProfile {
            vector: vec![1.0, 2.0],
            dims,
            component: 0,
        };
        assert!(profile_as_mode1_matrix(&bad).is_err());
    }

    #[test]
    fn mode2_reshape_and_errors() {
        let v: Vec<f64> = (0..6).map(|x| x as f64).collect();
        let m = vector_as_mode2_matrix(&v, 2, 3).unwrap();
        for l in 0..3 {
            for k in 0..2 {
                assert_eq!(m[[k, l]], (k + 2 * l) as f64);
            }
        }
        assert_eq!(mode2_matrix_as_vector(&m), v);
        assert!(vector_as_mode2_matrix(&v, 4, 2).is_err());
    }

    #[test]
    fn axis_label_validation() {
        let ds = random_dataset(2, 3, 1, 4, 5);
        assert!(ds
            .clone()
            .with_axes(Some(vec![0.0; 2]), Some(vec![0.0; 3]), Some(vec![0.0; 4]))
            .is_ok());
        assert!(ds.with_axes(Some(vec![0.0; 3]), None, None).is_err());
    }

    proptest! {
        #[test]
        fn reshapes_are_mutual_inverses(
            i in 1usize..5, k in 1usize..5, l in 1usize..4, j in 1usize..4, seed in 0u64..100
        ) {
            let ds = random_dataset(i, k, l, j, seed);
            let aug = augment(&ds).unwrap();
            let back = unaugment(&aug).unwrap();
            prop_assert_eq!(&ds.data, &back.data);

            // Frobenius norm preserved by the unfolding.
            let n_t: f64 = ds.data.iter().map(|v| v * v).sum();
            let n_m: f64 = aug.values.iter().map(|v| v * v).sum();
            prop_assert!((n_t - n_m).abs() <= 1e-12 * n_t.max(1.0));

            let profile = ComponentProfile {
                vector: aug.values.column(0).to_vec(),
                dims: ds.dims(),
                component: 0,
            };
            let m1 = profile_as_mode1_matrix(&profile).unwrap();
            let p_back = mode1_matrix_as_profile(&m1, ds.dims(), 0);
            prop_assert_eq!(&profile.vector, &p_back.vector);

            let n_p: f64 = profile.vector.iter().map(|v| v * v).sum();
            let n_m1: f64 = m1.iter().map(|v| v * v).sum();
            prop_assert!((n_p - n_m1).abs() <= 1e-12 * n_p.max(1.0));

            let v: Vec<f64> = (0..k * l).map(|x| x as f64 * 0.5).collect();
            let m2 = vector_as_mode2_matrix(&v, k, l).unwrap();
            prop_assert_eq!(mode2_matrix_as_vector(&m2), v);
        }
    }
}
