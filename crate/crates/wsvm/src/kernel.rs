//! Kernel functions, Gram matrices and the median-distance bandwidth heuristic.
//!
//! The RBF kernel is parameterized as `K(x, z) = exp(-‖x - z‖² / σ²)` (no
//! factor of 2 in the denominator), so the bandwidth grids built from the
//! median cross-class distance `σ_M` can be used directly as σ values.

use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::types::{dot, sq_dist, PointMatrix};

/// Kernel choice. RBF carries its bandwidth; the linear kernel has no
/// parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Rbf { sigma: f64 },
    Linear,
}

impl KernelSpec {
    pub fn rbf(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(KernelSpec::Rbf { sigma })
    }

    /// K(x, z). Errors on dimension mismatch.
    pub fn eval(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch(x.len(), z.len()));
        }
        Ok(self.eval_unchecked(x, z))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], z: &[f64]) -> f64 {
        match *self {
            KernelSpec::Rbf { sigma } => (-sq_dist(x, z) / (sigma * sigma)).exp(),
            KernelSpec::Linear => dot(x, z),
        }
    }
}

/// Dense kernel matrix `values[i][j] = K(a_i, b_j)` between two point sets.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl GramMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

/// RBF eval with explicit bandwidth; kept as a standalone helper because the
/// bandwidth is often swept over a grid.
pub fn rbf_eval(x: &[f64], z: &[f64], sigma: f64) -> Result<f64> {
    KernelSpec::rbf(sigma)?.eval(x, z)
}

/// Build the (possibly rectangular) Gram matrix between two point sets.
pub fn gram(points_a: &PointMatrix, points_b: &PointMatrix, spec: &KernelSpec) -> Result<GramMatrix> {
    if points_a.dim() != points_b.dim() {
        return Err(Error::DimensionMismatch(points_a.dim(), points_b.dim()));
    }
    if points_a.n() == 0 || points_b.n() == 0 {
        return Err(Error::EmptyInput("point list".into()));
    }
    let (n, m) = (points_a.n(), points_b.n());
    let mut values = vec![0.0; n * m];
    for i in 0..n {
        let xi = points_a.row(i);
        let row = &mut values[i * m..(i + 1) * m];
        for (j, v) in row.iter_mut().enumerate() {
            *v = spec.eval_unchecked(xi, points_b.row(j));
        }
    }
    Ok(GramMatrix { values, rows: n, cols: m })
}

/// Square Gram matrix of one point set. Filled symmetrically so that
/// `get(i, j) == get(j, i)` holds bitwise.
pub fn gram_square(points: &PointMatrix, spec: &KernelSpec) -> Result<GramMatrix> {
    if points.n() == 0 {
        return Err(Error::EmptyInput("point list".into()));
    }
    let n = points.n();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        let xi = points.row(i);
        for j in i..n {
            let v = spec.eval_unchecked(xi, points.row(j));
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    Ok(GramMatrix { values, rows: n, cols: n })
}

/// Median of the pairwise Euclidean distances between points of different
/// classes. For an even number of cross pairs, the mean of the two central
/// order statistics.
pub fn median_sigma(dataset: &LabeledDataset) -> Result<f64> {
    let n = dataset.n();
    let mut dists = Vec::new();
    for s in 0..n {
        for t in (s + 1)..n {
            if dataset.labels()[s] != dataset.labels()[t] {
                dists.push(crate::types::euclidean(dataset.features().row(s), dataset.features().row(t)));
            }
        }
    }
    if dists.is_empty() {
        return Err(Error::InvalidInput("median_sigma needs at least two distinct classes".into()));
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = dists.len();
    Ok(if k % 2 == 1 { dists[k / 2] } else { 0.5 * (dists[k / 2 - 1] + dists[k / 2]) })
}
