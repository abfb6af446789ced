//! Dense point storage shared by the kernel, solver and data modules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major n×p matrix of points, one row per point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMatrix {
    data: Vec<f64>,
    n: usize,
    p: usize,
}

impl PointMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("point list".into()));
        }
        let p = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * p);
        for r in rows {
            if r.len() != p {
                return Err(Error::DimensionMismatch(r.len(), p));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { data, n: rows.len(), p })
    }

    pub fn from_flat(data: Vec<f64>, n: usize, p: usize) -> Result<Self> {
        if data.len() != n * p {
            return Err(Error::DimensionMismatch(data.len(), n * p));
        }
        Ok(Self { data, n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.p)
    }

    /// Gather the given rows into a new matrix.
    pub fn select(&self, indices: &[usize]) -> PointMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.p);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        PointMatrix { data, n: indices.len(), p: self.p }
    }
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, z)| (x - z) * (x - z)).sum()
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    sq_dist(a, b).sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, z)| x * z).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_gathers_rows() {
        let m = PointMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let s = m.select(&[2, 0]);
        assert_eq!(s.row(0), &[5.0, 6.0]);
        assert_eq!(s.row(1), &[1.0, 2.0]);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(PointMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
