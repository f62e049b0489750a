//! Empirical covariance of the binary samples, plus the diagonal ridge
//! that keeps the solver away from singular inputs.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::transform::BinarySampleMatrix;

/// Symmetric covariance estimate over the binary samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    s: Array2<f64>,
    n_samples: usize,
}

impl CovarianceMatrix {
    /// Wrap an externally supplied symmetric matrix.
    pub fn from_matrix(s: Array2<f64>, n_samples: usize) -> Result<Self> {
        if s.nrows() != s.ncols() {
            return Err(Error::InvalidParameter("covariance must be square".into()));
        }
        for i in 0..s.nrows() {
            for j in 0..i {
                if s[[i, j]] != s[[j, i]] {
                    return Err(Error::InvalidParameter("covariance must be symmetric".into()));
                }
            }
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("covariance entries"));
        }
        Ok(CovarianceMatrix { s, n_samples })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.s
    }

    pub fn k(&self) -> usize {
        self.s.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// Indices of columns with zero variance (constant columns). They are
    /// kept in place so matrix indexing stays aligned with the schema;
    /// the ridge restores solvability.
    pub fn zero_variance_columns(&self) -> Vec<usize> {
        (0..self.k()).filter(|&i| self.s[[i, i]] == 0.0).collect()
    }
}

/// Population covariance (1/N normalization) of the 0/1 sample matrix.
///
/// Products of binary columns are accumulated as exact integer counts on
/// packed bitsets, so the result is symmetric to the last bit and
/// independent of row order.
pub fn empirical_covariance(m: &BinarySampleMatrix) -> Result<CovarianceMatrix> {
    let rows = m.n_rows();
    let k = m.k();
    if rows < 2 {
        return Err(Error::InvalidDataset(
            "covariance needs at least 2 sample rows".into(),
        ));
    }

    let words = rows.div_ceil(64);
    let mut bits: Vec<Vec<u64>> = vec![vec![0u64; words]; k];
    let data = m.data();
    for r in 0..rows {
        let row = data.row(r);
        for j in 0..k {
            if row[j] == 1 {
                bits[j][r / 64] |= 1u64 << (r % 64);
            }
        }
    }

    let n = rows as f64;
    let mut counts = vec![vec![0u64; k]; k];
    for i in 0..k {
        for j in i..k {
            let c: u64 = bits[i]
                .iter()
                .zip(&bits[j])
                .map(|(a, b)| (a & b).count_ones() as u64)
                .sum();
            counts[i][j] = c;
        }
    }

    let mut s = Array2::<f64>::zeros((k, k));
    for i in 0..k {
        let mean_i = counts[i][i] as f64 / n;
        for j in i..k {
            let mean_j = counts[j][j] as f64 / n;
            let v = counts[i][j] as f64 / n - mean_i * mean_j;
            s[[i, j]] = v;
            s[[j, i]] = v;
        }
    }

    CovarianceMatrix::from_matrix(s, rows)
}

/// Add `eps` to every diagonal entry, leaving off-diagonals untouched.
pub fn ridge_regularize(s: &CovarianceMatrix, eps: f64) -> Result<CovarianceMatrix> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter("ridge eps must be >= 0".into()));
    }
    let mut m = s.matrix().clone();
    for i in 0..m.nrows() {
        m[[i, i]] += eps;
    }
    CovarianceMatrix::from_matrix(m, s.n_samples())
}

/// Default diagonal ridge applied before the solver.
pub const DEFAULT_RIDGE: f64 = 1e-6;
