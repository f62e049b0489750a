//! Small dense linear algebra helpers used by the solver.

use ndarray::{Array2, ArrayView2};

/// Lower-triangular Cholesky factor of a symmetric positive-definite
/// matrix, or `None` when a nonpositive pivot shows up.
pub fn cholesky(a: &ArrayView2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return None;
    }
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for m in 0..j {
                sum -= l[[i, m]] * l[[j, m]];
            }
            if i == j {
                if !(sum > 0.0) || !sum.is_finite() {
                    return None;
                }
                l[[i, i]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    Some(l)
}

/// log(det A) for symmetric positive-definite A, via Cholesky.
pub fn log_det_pd(a: &ArrayView2<f64>) -> Option<f64> {
    let l = cholesky(a)?;
    let mut acc = 0.0;
    for i in 0..l.nrows() {
        acc += l[[i, i]].ln();
    }
    Some(2.0 * acc)
}

/// Largest absolute entry.
pub fn max_abs(a: &ArrayView2<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}
