//! Triangular factorization of the precision estimate.
//!
//! A symmetric positive-definite matrix T factors as U * diag(d) * U^T
//! with U unit upper triangular once indices are processed from the last
//! attribute upward (the reverse-order analogue of unit-lower LDL^T).
//! Subtracting U from the identity then yields the strictly upper
//! triangular autoregression matrix whose nonzero column entries point at
//! dependency determinants.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Unit upper-triangular factor and positive diagonal.
#[derive(Debug, Clone)]
pub struct UduFactorization {
    u: Array2<f64>,
    d: Array1<f64>,
}

impl UduFactorization {
    pub fn u(&self) -> &Array2<f64> {
        &self.u
    }

    pub fn d(&self) -> &Array1<f64> {
        &self.d
    }

    pub fn k(&self) -> usize {
        self.d.len()
    }

    /// Rebuild U * diag(d) * U^T (used for residual checks).
    pub fn reconstruct(&self) -> Array2<f64> {
        let k = self.k();
        let mut ud = self.u.clone();
        for j in 0..k {
            for i in 0..k {
                ud[[i, j]] *= self.d[j];
            }
        }
        ud.dot(&self.u.t())
    }
}

/// Strictly upper-triangular coefficient matrix of the implied linear
/// model; entry (i, j) couples attribute i into attribute j.
#[derive(Debug, Clone)]
pub struct AutoregressionMatrix {
    b: Array2<f64>,
    schema: Vec<String>,
}

impl AutoregressionMatrix {
    pub fn new(b: Array2<f64>, schema: Vec<String>) -> Result<Self> {
        if b.nrows() != b.ncols() || b.nrows() != schema.len() {
            return Err(Error::InvalidParameter(
                "autoregression matrix shape must match schema".into(),
            ));
        }
        for i in 0..b.nrows() {
            for j in 0..=i {
                if b[[i, j]] != 0.0 {
                    return Err(Error::InvalidParameter(
                        "autoregression matrix must be strictly upper triangular".into(),
                    ));
                }
            }
        }
        Ok(AutoregressionMatrix { b, schema })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.b
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn k(&self) -> usize {
        self.schema.len()
    }
}

/// Factor a symmetric positive-definite matrix as U * diag(d) * U^T.
///
/// Errors with `NotPositiveDefinite` on a nonpositive pivot, which in the
/// pipeline signals that the ridge or penalty must be raised.
pub fn udu_factorize(theta: &Array2<f64>) -> Result<UduFactorization> {
    let k = theta.nrows();
    if theta.ncols() != k {
        return Err(Error::InvalidParameter("factorization input must be square".into()));
    }
    let mut u = Array2::<f64>::eye(k);
    let mut d = Array1::<f64>::zeros(k);

    for j in (0..k).rev() {
        let mut pivot = theta[[j, j]];
        for m in (j + 1)..k {
            pivot -= u[[j, m]] * u[[j, m]] * d[m];
        }
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite("factorization pivot"));
        }
        d[j] = pivot;
        for i in 0..j {
            let mut v = theta[[i, j]];
            for m in (j + 1)..k {
                v -= u[[i, m]] * d[m] * u[[j, m]];
            }
            u[[i, j]] = v / pivot;
        }
    }

    Ok(UduFactorization { u, d })
}

/// B = I - U: strictly upper triangular by construction.
pub fn autoregression(f: &UduFactorization, schema: &[String]) -> Result<AutoregressionMatrix> {
    if schema.len() != f.k() {
        return Err(Error::InvalidParameter(
            "schema length must match factorization size".into(),
        ));
    }
    let b = Array2::<f64>::eye(f.k()) - f.u();
    AutoregressionMatrix::new(b, schema.to_vec())
}
