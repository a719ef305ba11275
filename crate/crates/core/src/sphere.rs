//! Standardization and the hyperplane isometry.
//!
//! Centering a column projects it onto the hyperplane orthogonal to the
//! all-ones vector; dividing by the centered norm puts it on the unit sphere
//! of that hyperplane. [`HyperplaneBasis`] holds an explicit orthonormal
//! basis of the hyperplane, and [`phi`]/[`phi_inverse`] move vectors between
//! the hyperplane (in `R^N`) and coordinates (in `R^(N-1)`) isometrically,
//! which is what lets the von Mises-Fisher machinery work in `R^(N-1)`.

use ndarray::{Array2, ShapeBuilder};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

/// Centered norm below which a column counts as constant.
const CONSTANT_COLUMN_TOL: f64 = 1e-12;
/// Relative tolerance on the coordinate sum for hyperplane membership.
const HYPERPLANE_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SphereError {
    #[error("column {index} ({name:?}) is constant: centered norm {norm:.3e} is below 1e-12")]
    ConstantColumn { index: usize, name: String, norm: f64 },
    #[error("need at least {min} observations, got {n}")]
    DimensionTooSmall { n: usize, min: usize },
    #[error("vector is not in the centering hyperplane: |sum| = {sum:.3e} exceeds 1e-8 x norm")]
    NotInHyperplane { sum: f64 },
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

/// A design matrix with centered, unit-L2-norm columns plus the affine
/// provenance needed to map coefficients back to the original scale.
#[derive(Debug, Clone)]
pub struct StandardizedDesign {
    /// N x P, column-major so per-column slices are contiguous.
    values: Array2<f64>,
    column_means: Vec<f64>,
    column_scales: Vec<f64>,
    variable_names: Vec<String>,
}

impl StandardizedDesign {
    /// Number of observations (rows).
    pub fn n_obs(&self) -> usize {
        self.values.nrows()
    }

    /// Number of variables (columns).
    pub fn n_vars(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Contiguous slice of column `p`.
    pub fn column(&self, p: usize) -> &[f64] {
        self.values
            .column(p)
            .to_slice()
            .expect("design is stored column-major")
    }

    pub fn column_means(&self) -> &[f64] {
        &self.column_means
    }

    pub fn column_scales(&self) -> &[f64] {
        &self.column_scales
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    /// Wraps values that are already centered and unit-norm.
    ///
    /// Used for perturbed designs whose columns are centered/unit by
    /// construction; no re-standardization is applied, so columns that were
    /// copied verbatim stay bit-identical to their source.
    pub fn from_parts_unchecked(
        values: Array2<f64>,
        column_means: Vec<f64>,
        column_scales: Vec<f64>,
        variable_names: Vec<String>,
    ) -> Self {
        debug_assert_eq!(values.ncols(), column_means.len());
        debug_assert_eq!(values.ncols(), column_scales.len());
        debug_assert_eq!(values.ncols(), variable_names.len());
        Self { values, column_means, column_scales, variable_names }
    }
}

/// Centers each column and scales it to unit L2 norm.
///
/// Constant columns are a hard error rather than being dropped: removing a
/// column would desynchronize variable indices with every downstream
/// grouping, so callers must pre-filter.
pub fn standardize(x: &Array2<f64>, names: &[String]) -> Result<StandardizedDesign, SphereError> {
    let n = x.nrows();
    let p = x.ncols();
    if n < 3 {
        return Err(SphereError::DimensionTooSmall { n, min: 3 });
    }
    if names.len() != p {
        return Err(SphereError::DimensionMismatch { expected: p, actual: names.len() });
    }

    let mut values = Array2::<f64>::zeros((n, p).f());
    let mut means = Vec::with_capacity(p);
    let mut scales = Vec::with_capacity(p);
    for j in 0..p {
        let col = x.column(j);
        let mean = col.sum() / n as f64;
        let norm = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>().sqrt();
        if norm < CONSTANT_COLUMN_TOL {
            return Err(SphereError::ConstantColumn {
                index: j,
                name: names[j].clone(),
                norm,
            });
        }
        let mut out = values.column_mut(j);
        for (o, v) in out.iter_mut().zip(col.iter()) {
            *o = (v - mean) / norm;
        }
        means.push(mean);
        scales.push(norm);
    }
    Ok(StandardizedDesign {
        values,
        column_means: means,
        column_scales: scales,
        variable_names: names.to_vec(),
    })
}

/// Default variable names `V1..VP`.
pub fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("V{j}")).collect()
}

/// Orthonormal basis of the hyperplane orthogonal to the all-ones vector.
///
/// Row `n` (1-based) is `(e_1 + ... + e_n - n e_{n+1}) / sqrt(n (n+1))`.
#[derive(Debug, Clone)]
pub struct HyperplaneBasis {
    dimension: usize,
    /// (N-1) x N, row-major; row n holds the n-th basis vector.
    vectors: Array2<f64>,
}

impl HyperplaneBasis {
    pub fn new(n: usize) -> Result<Self, SphereError> {
        if n < 2 {
            return Err(SphereError::DimensionTooSmall { n, min: 2 });
        }
        let mut vectors = Array2::<f64>::zeros((n - 1, n));
        for row in 1..n {
            let norm = (row as f64 * (row as f64 + 1.0)).sqrt();
            let mut r = vectors.row_mut(row - 1);
            for i in 0..row {
                r[i] = 1.0 / norm;
            }
            r[row] = -(row as f64) / norm;
        }
        Ok(Self { dimension: n, vectors })
    }

    /// Process-wide cache; basis construction is O(N^2) and every boost
    /// replicate needs the same one.
    pub fn cached(n: usize) -> Result<Arc<HyperplaneBasis>, SphereError> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<HyperplaneBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("basis cache poisoned");
        if let Some(b) = guard.get(&n) {
            return Ok(Arc::clone(b));
        }
        let basis = Arc::new(Self::new(n)?);
        guard.insert(n, Arc::clone(&basis));
        Ok(basis)
    }

    /// Ambient dimension N.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    fn row(&self, i: usize) -> &[f64] {
        self.vectors
            .row(i)
            .to_slice()
            .expect("basis is stored row-major")
    }
}

/// Convenience constructor matching the basis type.
pub fn helmert_basis(n: usize) -> Result<HyperplaneBasis, SphereError> {
    HyperplaneBasis::new(n)
}

/// Coordinates of a centered vector in the hyperplane basis.
///
/// An isometry: norms are preserved, so unit columns map to unit vectors.
pub fn phi(v: &[f64], basis: &HyperplaneBasis) -> Result<Vec<f64>, SphereError> {
    let n = basis.dimension();
    if v.len() != n {
        return Err(SphereError::DimensionMismatch { expected: n, actual: v.len() });
    }
    let sum: f64 = v.iter().sum();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if sum.abs() > HYPERPLANE_TOL * norm {
        return Err(SphereError::NotInHyperplane { sum });
    }
    let mut w = vec![0.0; n - 1];
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = dot(basis.row(i), v);
    }
    Ok(w)
}

/// Reconstructs the hyperplane vector with the given basis coordinates.
pub fn phi_inverse(w: &[f64], basis: &HyperplaneBasis) -> Result<Vec<f64>, SphereError> {
    let n = basis.dimension();
    if w.len() != n - 1 {
        return Err(SphereError::DimensionMismatch { expected: n - 1, actual: w.len() });
    }
    let mut v = vec![0.0; n];
    for (i, &wi) in w.iter().enumerate() {
        if wi == 0.0 {
            continue;
        }
        for (vj, bj) in v.iter_mut().zip(basis.row(i)) {
            *vj += wi * bj;
        }
    }
    Ok(v)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
