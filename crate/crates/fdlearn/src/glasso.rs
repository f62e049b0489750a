//! Sparse inverse covariance estimation.
//!
//! The estimator minimizes `-log det(T) + tr(S*T) + lambda * ||T||_1`
//! (penalty over all entries, diagonal included) by block coordinate
//! descent on the working covariance W: each sweep solves one L1
//! regression per column against the remaining block of W, the classic
//! series-of-lasso scheme. Updates are cyclic in a fixed order, so equal
//! inputs give bit-identical outputs.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::Serialize;

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::linalg;

/// Solver knobs. `tol` bounds the mean absolute change of W per sweep.
#[derive(Debug, Clone)]
pub struct GlassoConfig {
    pub lambda: f64,
    pub tol: f64,
    pub max_sweeps: usize,
    pub inner_tol: f64,
    pub inner_max_iter: usize,
}

impl GlassoConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        GlassoConfig {
            lambda,
            tol: 1e-4,
            max_sweeps: 100,
            inner_tol: 1e-7,
            inner_max_iter: 1000,
        }
    }

    /// Dimension-aware default penalty `0.5 * sqrt(log k / N)`.
    pub fn default_lambda(k: usize, n_samples: usize) -> f64 {
        0.5 * ((k as f64).ln().max(f64::MIN_POSITIVE) / n_samples as f64).sqrt()
    }

    fn validate(&self) -> Result<()> {
        let ok = self.lambda > 0.0
            && self.tol > 0.0
            && self.max_sweeps >= 1
            && self.inner_tol > 0.0
            && self.inner_max_iter >= 1
            && self.lambda.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "glasso config requires positive lambda/tolerances and max_sweeps >= 1".into(),
            ))
        }
    }
}

/// Per-sweep solver trace entry.
#[derive(Debug, Clone, Serialize)]
pub struct SweepTrace {
    pub sweep: usize,
    pub objective: f64,
    pub max_change: f64,
    pub mean_change: f64,
}

/// Estimated precision matrix together with the working covariance W,
/// the penalty used, and the solver trace.
#[derive(Debug, Clone)]
pub struct PrecisionMatrix {
    theta: Array2<f64>,
    w: Array2<f64>,
    lambda: f64,
    iterations: usize,
    converged: bool,
    trace: Vec<SweepTrace>,
}

impl PrecisionMatrix {
    pub fn theta(&self) -> &Array2<f64> {
        &self.theta
    }

    pub fn w(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn trace(&self) -> &[SweepTrace] {
        &self.trace
    }

    pub fn k(&self) -> usize {
        self.theta.nrows()
    }

    /// Off-diagonal support: pairs (i, j) with i < j and theta != 0.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let k = self.k();
        let mut out = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                if self.theta[[i, j]] != 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Worst-case KKT stationarity violation at the current iterate.
    /// Zero entries require |s - w| <= lambda; nonzero entries require
    /// w - s = lambda * sign(theta).
    pub fn kkt_violation(&self, s: &CovarianceMatrix) -> f64 {
        let k = self.k();
        let (s, w, lam) = (s.matrix(), &self.w, self.lambda);
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let gap = w[[i, j]] - s[[i, j]];
                let th = self.theta[[i, j]];
                let v = if th.abs() <= 1e-12 {
                    (gap.abs() - lam).max(0.0)
                } else {
                    (gap - lam * th.signum()).abs()
                };
                worst = worst.max(v);
            }
        }
        worst
    }
}

fn soft_threshold(x: f64, lambda: f64) -> f64 {
    if x > lambda {
        x - lambda
    } else if x < -lambda {
        x + lambda
    } else {
        0.0
    }
}

/// Cyclic coordinate descent for `0.5 b'Gb - t'b + lambda ||b||_1`,
/// starting from the zero vector. `gram` must be symmetric positive
/// definite.
pub fn lasso_cd(
    gram: ArrayView2<f64>,
    target: ArrayView1<f64>,
    lambda: f64,
    inner_tol: f64,
    inner_max_iter: usize,
) -> Result<Array1<f64>> {
    let mut beta = Array1::<f64>::zeros(target.len());
    lasso_cd_warm(gram, target, lambda, inner_tol, inner_max_iter, &mut beta)?;
    Ok(beta)
}

/// In-place variant used by the solver to warm-start across sweeps.
fn lasso_cd_warm(
    gram: ArrayView2<f64>,
    target: ArrayView1<f64>,
    lambda: f64,
    inner_tol: f64,
    inner_max_iter: usize,
    beta: &mut Array1<f64>,
) -> Result<()> {
    let m = target.len();
    if m == 0 {
        return Ok(());
    }
    // maintained product q = gram * beta
    let mut q = gram.dot(beta);
    for _ in 0..inner_max_iter {
        let mut max_delta = 0.0f64;
        for c in 0..m {
            let g_cc = gram[[c, c]];
            if !(g_cc > 0.0) {
                return Err(Error::NotPositiveDefinite("lasso gram diagonal"));
            }
            let partial = target[c] - (q[c] - g_cc * beta[c]);
            let updated = soft_threshold(partial, lambda) / g_cc;
            let delta = updated - beta[c];
            if delta != 0.0 {
                for l in 0..m {
                    q[l] += delta * gram[[l, c]];
                }
                beta[c] = updated;
            }
            max_delta = max_delta.max(delta.abs());
        }
        if !max_delta.is_finite() {
            return Err(Error::NonFinite("lasso coordinate descent"));
        }
        if max_delta < inner_tol {
            break;
        }
    }
    Ok(())
}

/// Penalized negative log-likelihood `-log det(T) + tr(S*T) + lambda*||T||_1`
/// with the L1 term ranging over every entry.
pub fn objective(theta: &ArrayView2<f64>, s: &ArrayView2<f64>, lambda: f64) -> Result<f64> {
    let log_det =
        linalg::log_det_pd(theta).ok_or(Error::NotPositiveDefinite("objective argument"))?;
    let mut trace = 0.0;
    let mut l1 = 0.0;
    for i in 0..theta.nrows() {
        for j in 0..theta.ncols() {
            trace += s[[i, j]] * theta[[j, i]];
            l1 += theta[[i, j]].abs();
        }
    }
    Ok(-log_det + trace + lambda * l1)
}

/// Recover the precision estimate from the working covariance and the
/// per-column regression coefficients, then symmetrize by averaging.
fn recover_theta(w: &Array2<f64>, beta: &Array2<f64>) -> Result<Array2<f64>> {
    let k = w.nrows();
    let mut theta = Array2::<f64>::zeros((k, k));
    for j in 0..k {
        let mut dot = 0.0;
        for i in 0..k {
            if i != j {
                dot += w[[i, j]] * beta[[i, j]];
            }
        }
        let denom = w[[j, j]] - dot;
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(Error::NotPositiveDefinite("recovered precision diagonal"));
        }
        let t_jj = 1.0 / denom;
        theta[[j, j]] = t_jj;
        for i in 0..k {
            if i != j {
                theta[[i, j]] = -beta[[i, j]] * t_jj;
            }
        }
    }
    let sym = (&theta + &theta.t()) * 0.5;
    if sym.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("recovered precision matrix"));
    }
    Ok(sym)
}

/// Estimate a sparse precision matrix from a (post-ridge) covariance.
///
/// W starts at S with `lambda` added to the diagonal; each sweep updates
/// every column of W through a lasso on the complementary block, and the
/// precision estimate is recovered from W and the coefficients.
pub fn graphical_lasso(s: &CovarianceMatrix, cfg: &GlassoConfig) -> Result<PrecisionMatrix> {
    cfg.validate()?;
    let k = s.k();
    let s_mat = s.matrix();
    let lambda = cfg.lambda;

    let mut w = s_mat.clone();
    for i in 0..k {
        w[[i, i]] += lambda;
    }
    if linalg::cholesky(&w.view()).is_none() {
        return Err(Error::NotPositiveDefinite("initial working covariance"));
    }

    // beta[(i, j)]: coefficient of variable i in the column-j subproblem
    let mut beta = Array2::<f64>::zeros((k, k));
    let mut gram = Array2::<f64>::zeros((k.saturating_sub(1), k.saturating_sub(1)));
    let mut target = Array1::<f64>::zeros(k.saturating_sub(1));
    let mut coef = Array1::<f64>::zeros(k.saturating_sub(1));

    let mut trace = Vec::new();
    let mut converged = false;
    let mut sweeps = 0;
    let mut theta = recover_theta(&w, &beta)?;

    for sweep in 1..=cfg.max_sweeps {
        sweeps = sweep;
        let w_prev = w.clone();

        for j in 0..k {
            if k == 1 {
                break;
            }
            // assemble the (k-1) block excluding row/column j
            let mut row = 0;
            for i in 0..k {
                if i == j {
                    continue;
                }
                target[row] = s_mat[[i, j]];
                coef[row] = beta[[i, j]];
                let mut col = 0;
                for l in 0..k {
                    if l == j {
                        continue;
                    }
                    gram[[row, col]] = w[[i, l]];
                    col += 1;
                }
                row += 1;
            }

            lasso_cd_warm(
                gram.view(),
                target.view(),
                lambda,
                cfg.inner_tol,
                cfg.inner_max_iter,
                &mut coef,
            )?;

            // w12 = W11 * beta, written back symmetrically
            let w12 = gram.dot(&coef);
            let mut row = 0;
            for i in 0..k {
                if i == j {
                    continue;
                }
                beta[[i, j]] = coef[row];
                w[[i, j]] = w12[row];
                w[[j, i]] = w12[row];
                row += 1;
            }
        }

        let mut max_change = 0.0f64;
        let mut sum_change = 0.0f64;
        for (a, b) in w.iter().zip(w_prev.iter()) {
            let d = (a - b).abs();
            max_change = max_change.max(d);
            sum_change += d;
        }
        let mean_change = sum_change / (k * k) as f64;
        if !mean_change.is_finite() {
            return Err(Error::NonFinite("working covariance update"));
        }

        theta = recover_theta(&w, &beta)?;
        let obj = objective(&theta.view(), &s_mat.view(), lambda)?;
        trace.push(SweepTrace {
            sweep,
            objective: obj,
            max_change,
            mean_change,
        });

        if mean_change < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(PrecisionMatrix {
        theta,
        w,
        lambda,
        iterations: sweeps,
        converged,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::Rng;

    fn cov(m: Array2<f64>) -> CovarianceMatrix {
        CovarianceMatrix::from_matrix(m, 1000).unwrap()
    }

    /// Gauss-Jordan dense inverse, kept here purely as a test oracle.
    fn invert(a: &Array2<f64>) -> Array2<f64> {
        let n = a.nrows();
        let mut m = a.clone();
        let mut inv = Array2::<f64>::eye(n);
        for col in 0..n {
            let mut pivot = col;
            for r in (col + 1)..n {
                if m[[r, col]].abs() > m[[pivot, col]].abs() {
                    pivot = r;
                }
            }
            if pivot != col {
                for c in 0..n {
                    m.swap([col, c], [pivot, c]);
                    inv.swap([col, c], [pivot, c]);
                }
            }
            let p = m[[col, col]];
            assert!(p.abs() > 1e-14, "singular oracle input");
            for c in 0..n {
                m[[col, c]] /= p;
                inv[[col, c]] /= p;
            }
            for r in 0..n {
                if r != col {
                    let f = m[[r, col]];
                    for c in 0..n {
                        m[[r, c]] -= f * m[[col, c]];
                        inv[[r, c]] -= f * inv[[col, c]];
                    }
                }
            }
        }
        inv
    }

    /// Proximal-gradient oracle for the lasso subproblem, run to high
    /// precision; independent of the coordinate-descent path.
    fn lasso_oracle(gram: &Array2<f64>, target: &Array1<f64>, lambda: f64) -> Array1<f64> {
        let m = target.len();
        // Gershgorin upper bound on the largest eigenvalue
        let lip = (0..m)
            .map(|i| (0..m).map(|j| gram[[i, j]].abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        let step = 1.0 / lip;
        let mut beta = Array1::<f64>::zeros(m);
        for _ in 0..200_000 {
            let grad = gram.dot(&beta) - target;
            let mut next = Array1::<f64>::zeros(m);
            let mut delta = 0.0f64;
            for i in 0..m {
                let v = soft_threshold(beta[i] - step * grad[i], step * lambda);
                delta = delta.max((v - beta[i]).abs());
                next[i] = v;
            }
            beta = next;
            if delta < 1e-13 {
                break;
            }
        }
        beta
    }

    fn lasso_objective(gram: &Array2<f64>, target: &Array1<f64>, lambda: f64, b: &Array1<f64>) -> f64 {
        0.5 * b.dot(&gram.dot(b)) - target.dot(b) + lambda * b.iter().map(|v| v.abs()).sum::<f64>()
    }

    fn random_spd(k: usize, seed: u64) -> Array2<f64> {
        let mut r = crate::rng::rng(seed);
        let a = Array2::from_shape_fn((k, k), |_| r.gen_range(-1.0..1.0));
        let mut m = a.t().dot(&a) / k as f64;
        for i in 0..k {
            m[[i, i]] += 0.5;
        }
        (&m + &m.t()) * 0.5
    }

    #[test]
    fn lasso_zero_target_gives_zero() {
        let gram = random_spd(4, 1);
        let target = Array1::<f64>::zeros(4);
        let beta = lasso_cd(gram.view(), target.view(), 0.1, 1e-9, 1000).unwrap();
        assert!(beta.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lasso_identity_gram_soft_thresholds() {
        let gram = Array2::<f64>::eye(2);
        let target = array![0.5, 0.05];
        let beta = lasso_cd(gram.view(), target.view(), 0.1, 1e-12, 1000).unwrap();
        assert!((beta[0] - 0.4).abs() < 1e-12);
        assert_eq!(beta[1], 0.0);
    }

    #[test]
    fn lasso_matches_convex_oracle() {
        for seed in [3u64, 5, 8] {
            let gram = random_spd(3, seed);
            let mut r = crate::rng::rng(seed + 100);
            let target = Array1::from_shape_fn(3, |_| r.gen_range(-1.0..1.0));
            let beta = lasso_cd(gram.view(), target.view(), 0.05, 1e-12, 10_000).unwrap();
            let oracle = lasso_oracle(&gram, &target, 0.05);
            let f_cd = lasso_objective(&gram, &target, 0.05, &beta);
            let f_or = lasso_objective(&gram, &target, 0.05, &oracle);
            assert!(
                (f_cd - f_or).abs() < 1e-6,
                "seed {seed}: cd {f_cd} vs oracle {f_or}"
            );
        }
    }

    #[test]
    fn identity_covariance_stays_diagonal() {
        let s = cov(Array2::<f64>::eye(3));
        let fit = graphical_lasso(&s, &GlassoConfig::with_lambda(0.2)).unwrap();
        assert!(fit.support().is_empty());
        for i in 0..3 {
            assert!((fit.theta()[[i, i]] - 1.0 / 1.2).abs() < 1e-10);
        }
        assert!(fit.converged());
    }

    #[test]
    fn tightly_coupled_pair_gets_strong_negative_entry() {
        let s_mat = array![[0.25, 0.24], [0.24, 0.25]];
        let s = cov(s_mat.clone());
        let fit = graphical_lasso(&s, &GlassoConfig::with_lambda(0.001)).unwrap();
        assert!(fit.theta()[[0, 1]] < -30.0, "got {}", fit.theta()[[0, 1]]);
        // direct-inversion oracle in the small-penalty limit
        let tiny = graphical_lasso(&s, &GlassoConfig {
            lambda: 1e-6,
            tol: 1e-8,
            max_sweeps: 500,
            inner_tol: 1e-12,
            inner_max_iter: 10_000,
        })
        .unwrap();
        let inv = invert(&s_mat);
        let gap = (&inv - tiny.theta()).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(gap < 1e-2, "gap to dense inverse: {gap}");
    }

    #[test]
    fn large_penalty_yields_diagonal_estimate() {
        let s_mat = random_spd(4, 9);
        let max_off = {
            let mut m = 0.0f64;
            for i in 0..4 {
                for j in 0..4 {
                    if i != j {
                        m = m.max(s_mat[[i, j]].abs());
                    }
                }
            }
            m
        };
        let s = cov(s_mat.clone());
        let fit = graphical_lasso(&s, &GlassoConfig::with_lambda(max_off)).unwrap();
        assert!(fit.support().is_empty());
        // KKT: with W = diag(S) + lambda*I all off-diagonal subgradient
        // conditions hold, and no diagonal candidate beats the objective.
        assert!(fit.kkt_violation(&s) <= max_off * 1e-6 + 1e-12);
        let f_star = objective(&fit.theta().view(), &s_mat.view(), max_off).unwrap();
        for scale in [0.9, 1.1] {
            let cand = fit.theta() * scale;
            let f = objective(&cand.view(), &s_mat.view(), max_off).unwrap();
            assert!(f >= f_star - 1e-9);
        }
    }

    #[test]
    fn objective_identity_values() {
        let eye3 = Array2::<f64>::eye(3);
        let v = objective(&eye3.view(), &eye3.view(), 0.0).unwrap();
        assert!((v - 3.0).abs() < 1e-12);

        let one = Array2::<f64>::eye(1);
        let two = &one * 2.0;
        let v = objective(&two.view(), &one.view(), 0.0).unwrap();
        assert!((v - (2.0 - 2.0_f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn objective_is_monotone_across_sweeps() {
        for seed in 0..20u64 {
            let k = 3 + (seed as usize % 5);
            let s = cov(random_spd(k, seed));
            let lambda = [0.01, 0.05, 0.1][seed as usize % 3];
            let fit = graphical_lasso(&s, &GlassoConfig::with_lambda(lambda)).unwrap();
            let objs: Vec<f64> = fit.trace().iter().map(|t| t.objective).collect();
            for w in objs.windows(2) {
                assert!(
                    w[1] <= w[0] + 1e-8,
                    "seed {seed}: objective rose {} -> {}",
                    w[0],
                    w[1]
                );
            }
        }
    }

    #[test]
    fn kkt_holds_at_convergence() {
        for seed in 0..10u64 {
            let k = 3 + (seed as usize % 4);
            let s = cov(random_spd(k, seed + 50));
            let lambda = 0.05;
            let cfg = GlassoConfig {
                lambda,
                tol: 1e-7,
                max_sweeps: 500,
                inner_tol: 1e-10,
                inner_max_iter: 10_000,
            };
            let fit = graphical_lasso(&s, &cfg).unwrap();
            assert!(fit.converged());
            let viol = fit.kkt_violation(&s);
            assert!(viol <= lambda * 1e-2, "seed {seed}: kkt violation {viol}");
        }
    }

    #[test]
    fn w_times_theta_is_identity_at_convergence() {
        let s = cov(random_spd(5, 77));
        let cfg = GlassoConfig {
            lambda: 0.05,
            tol: 1e-8,
            max_sweeps: 1000,
            inner_tol: 1e-11,
            inner_max_iter: 10_000,
        };
        let fit = graphical_lasso(&s, &cfg).unwrap();
        let prod = fit.w().dot(fit.theta());
        let eye = Array2::<f64>::eye(5);
        let gap = (&prod - &eye).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(gap < 1e-4, "W*Theta deviates from identity by {gap}");
    }

    #[test]
    fn support_shrinks_along_the_penalty_path() {
        let s = cov(random_spd(6, 13));
        let low = graphical_lasso(&s, &GlassoConfig::with_lambda(0.02)).unwrap();
        let high = graphical_lasso(&s, &GlassoConfig::with_lambda(0.1)).unwrap();
        assert!(high.support().len() <= low.support().len());
    }

    #[test]
    fn determinism_bit_for_bit() {
        let s = cov(random_spd(5, 21));
        let a = graphical_lasso(&s, &GlassoConfig::with_lambda(0.03)).unwrap();
        let b = graphical_lasso(&s, &GlassoConfig::with_lambda(0.03)).unwrap();
        assert_eq!(a.theta(), b.theta());
        assert_eq!(a.w(), b.w());
        assert_eq!(a.iterations(), b.iterations());
    }

    #[test]
    fn non_psd_input_is_rejected() {
        // eigenvalues 0.6 and -0.4: no lambda-sized ridge can rescue it
        let s = cov(array![[0.1, 0.5], [0.5, 0.1]]);
        let err = graphical_lasso(&s, &GlassoConfig::with_lambda(0.01)).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite(_)));
    }

    #[test]
    fn invalid_config_is_rejected() {
        let s = cov(Array2::<f64>::eye(2));
        for bad in [
            GlassoConfig { lambda: 0.0, ..GlassoConfig::with_lambda(0.1) },
            GlassoConfig { tol: 0.0, ..GlassoConfig::with_lambda(0.1) },
            GlassoConfig { max_sweeps: 0, ..GlassoConfig::with_lambda(0.1) },
        ] {
            assert!(matches!(
                graphical_lasso(&s, &bad),
                Err(Error::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn single_variable_problem() {
        let s = cov(Array2::from_elem((1, 1), 0.25));
        let fit = graphical_lasso(&s, &GlassoConfig::with_lambda(0.05)).unwrap();
        assert!((fit.theta()[[0, 0]] - 1.0 / 0.3).abs() < 1e-12);
    }
}
