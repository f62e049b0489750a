//! Pairwise-equality sample construction.
//!
//! The table is shuffled once, then for each attribute the shuffled rows
//! are stably sorted by that attribute, circularly shifted by one, and
//! compared elementwise against the unshifted copy. Each of the k passes
//! contributes n binary rows, concatenated in schema order, so the output
//! is an (n·k) x k matrix of 0/1 agreement indicators.

use ndarray::Array2;
use rand::seq::SliceRandom;

use crate::dataset::{cmp_cells, equality, Dataset};
use crate::error::{Error, Result};
use crate::rng;

/// Binary agreement samples produced by [`transform`].
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySampleMatrix {
    data: Array2<u8>,
    schema: Vec<String>,
    n_source: usize,
}

impl BinarySampleMatrix {
    /// Wrap an existing 0/1 matrix. Row count must be `n_source * k`.
    pub fn from_matrix(data: Array2<u8>, schema: Vec<String>, n_source: usize) -> Result<Self> {
        if data.ncols() != schema.len() {
            return Err(Error::InvalidParameter(
                "sample matrix width does not match schema".into(),
            ));
        }
        if data.nrows() != n_source * schema.len() {
            return Err(Error::InvalidParameter(
                "sample matrix must have n_source * k rows".into(),
            ));
        }
        if data.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParameter("sample entries must be 0 or 1".into()));
        }
        Ok(BinarySampleMatrix {
            data,
            schema,
            n_source,
        })
    }

    pub fn data(&self) -> &Array2<u8> {
        &self.data
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn n_source(&self) -> usize {
        self.n_source
    }

    pub fn k(&self) -> usize {
        self.schema.len()
    }

    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    /// Rows contributed by the pass that sorted on attribute `i`.
    pub fn block(&self, i: usize) -> ndarray::ArrayView2<'_, u8> {
        let n = self.n_source;
        self.data.slice(ndarray::s![i * n..(i + 1) * n, ..])
    }

    pub fn column_mean(&self, j: usize) -> f64 {
        let col = self.data.column(j);
        col.iter().map(|&b| b as f64).sum::<f64>() / col.len() as f64
    }
}

/// Build the binary sample matrix. Deterministic given `(d, seed)`.
pub fn transform(d: &Dataset, seed: u64) -> Result<BinarySampleMatrix> {
    let n = d.n();
    let k = d.k();
    if n < 2 {
        return Err(Error::InvalidDataset(
            "need at least 2 rows to form comparison pairs".into(),
        ));
    }

    let mut r = rng::rng(seed);
    let mut shuffled: Vec<usize> = (0..n).collect();
    shuffled.shuffle(&mut r);

    let mut data = Array2::<u8>::zeros((n * k, k));
    let mut order = vec![0usize; n];
    for i in 0..k {
        let key = d.column(i);
        order.copy_from_slice(&shuffled);
        // stable sort: ties keep the shuffled order
        order.sort_by(|&a, &b| cmp_cells(&key[a], &key[b]));
        for j in 0..n {
            let a = order[j];
            let b = order[(j + 1) % n];
            for l in 0..k {
                data[[i * n + j, l]] = equality(&d.column(l)[a], &d.column(l)[b]);
            }
        }
    }

    BinarySampleMatrix::from_matrix(data, d.schema().to_vec(), n)
}

/// Uniform row sample of size `max_rows` when the table is larger,
/// otherwise the table unchanged. Deterministic given `seed`.
pub fn subsample_rows(d: &Dataset, max_rows: usize, seed: u64) -> Result<Dataset> {
    if max_rows < 2 {
        return Err(Error::InvalidParameter("max_rows must be at least 2".into()));
    }
    if d.n() <= max_rows {
        return Ok(d.clone());
    }
    let mut r = rng::rng(seed);
    let mut keep = rand::seq::index::sample(&mut r, d.n(), max_rows).into_vec();
    keep.sort_unstable();
    Ok(d.select_rows(&keep))
}
