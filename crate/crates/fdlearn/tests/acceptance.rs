//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them as they complete).
//!
//! Hyper-parameters, tolerances, and seeds are pinned in code here; the
//! two exact-recovery checks encode reference targets that the pinned
//! penalty does not reach on this generator (the `lambda_path` example
//! shows the trade-off), and they are expected to stay red until the
//! pinned values change.

use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::Rng;

use fdlearn::bench::{bench_noise, bench_scaling, run_setting};
use fdlearn::{
    autoregression, discover, generate, graphical_lasso, median_aggregate, score, transform,
    udu_factorize, CellValue, CovarianceMatrix, Dataset, DiscoverOptions, Fd, FdSet, GlassoConfig,
    NoiseLevel, Scale, Setting, SynthConfig,
};

fn check(name: &str, pass: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

/// Pinned hyper-parameters for the recovery criteria.
fn pinned_opts() -> DiscoverOptions {
    DiscoverOptions {
        lambda: Some(0.01),
        tau: 0.05,
        ..DiscoverOptions::default()
    }
}

const BASE_SEED: u64 = 42;
const INSTANCES: usize = 5;

#[test]
fn criterion_01_zero_noise_exact_recovery() {
    let start = Instant::now();
    let setting = Setting::new(NoiseLevel::Zero, Scale::Small, Scale::Small, Scale::Small);
    let reports = run_setting(&setting, INSTANCES, &pinned_opts(), BASE_SEED).unwrap();
    let median = median_aggregate(&reports).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let f1s: Vec<f64> = reports.iter().map(|r| r.f1).collect();

    check(
        "criterion 01 zero-noise exact recovery",
        median.f1 == 1.0 && elapsed < 30.0,
        &format!(
            "median F1 = {:.3} (need 1.0), instance F1s {:?}, {:.1}s (limit 30s)",
            median.f1,
            f1s.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            elapsed
        ),
    );
}

#[test]
fn criterion_02_low_noise_recovery() {
    let start = Instant::now();
    let setting = Setting::new(NoiseLevel::Low, Scale::Small, Scale::Small, Scale::Small);
    let reports = run_setting(&setting, INSTANCES, &pinned_opts(), BASE_SEED).unwrap();
    let median = median_aggregate(&reports).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    check(
        "criterion 02 low-noise recovery",
        median.f1 >= 0.85 && elapsed < 30.0,
        &format!("median F1 = {:.3} (need >= 0.85), {:.1}s (limit 30s)", median.f1, elapsed),
    );
}

#[test]
fn criterion_03_high_noise_degradation_bound() {
    let setting = Setting::new(NoiseLevel::High, Scale::Small, Scale::Small, Scale::Small);
    let reports = run_setting(&setting, INSTANCES, &pinned_opts(), BASE_SEED).unwrap();
    let median = median_aggregate(&reports).unwrap();

    check(
        "criterion 03 high-noise degradation bound",
        median.f1 >= 0.35 && median.f1 > 0.0,
        &format!("median F1 = {:.3} (need >= 0.35 and > 0)", median.f1),
    );
}

#[test]
fn criterion_04_noise_monotonicity() {
    let setting = Setting::new(NoiseLevel::Zero, Scale::Small, Scale::Small, Scale::Small);
    let points = bench_noise(&setting, &[0.01, 0.5], INSTANCES, &pinned_opts(), BASE_SEED).unwrap();
    let low = points[0].median.f1;
    let high = points[1].median.f1;

    check(
        "criterion 04 noise monotonicity",
        low >= high,
        &format!("median F1 at noise 0.01 = {low:.3} vs at 0.5 = {high:.3}"),
    );
}

#[test]
fn criterion_05_column_scalability() {
    let report = bench_scaling(
        &[8, 16, 32, 64],
        3,
        1000,
        &DiscoverOptions::default(),
        BASE_SEED,
    )
    .unwrap();
    let slope = report.slope.unwrap();
    let at_16 = report.points.iter().find(|p| p.k == 16).unwrap().total_sec;

    // doubling the column count should grow the structure-learning
    // phase by a bounded factor, consistent with the slope band
    let mut ratio_ok = true;
    let mut ratios = Vec::new();
    for w in report.points.windows(2) {
        let r = w[1].structure_sec / w[0].structure_sec.max(1e-9);
        ratios.push((r * 100.0).round() / 100.0);
        if !(2.5..=10.0).contains(&r) {
            ratio_ok = false;
        }
    }

    check(
        "criterion 05 column scalability",
        (1.5..=3.0).contains(&slope) && at_16 < 5.0 && ratio_ok,
        &format!(
            "loglog slope = {slope:.3} (need 1.5..3.0), k=16 runtime = {at_16:.3}s (limit 5s), structure-time doubling ratios {ratios:?} (need 2.5..10)"
        ),
    );
}

fn random_spd(k: usize, seed: u64) -> Array2<f64> {
    let mut r = fdlearn::rng::rng(seed);
    let a = Array2::from_shape_fn((k, k), |_| r.gen_range(-1.0..1.0));
    let mut m = a.t().dot(&a) / k as f64;
    for i in 0..k {
        m[[i, i]] += 0.5;
    }
    (&m + &m.t()) * 0.5
}

/// Gauss-Jordan dense inverse, used only as an oracle here.
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

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn criterion_06_solver_correctness() {
    // (a) monotone objective per sweep on 20 random SPD fixtures
    let mut worst_rise = f64::NEG_INFINITY;
    for seed in 0..20u64 {
        let k = 3 + (seed as usize % 5);
        let s = CovarianceMatrix::from_matrix(random_spd(k, seed), 1000).unwrap();
        let lambda = [0.01, 0.05, 0.1][seed as usize % 3];
        let fit = graphical_lasso(&s, &GlassoConfig::with_lambda(lambda)).unwrap();
        for w in fit.trace().windows(2) {
            worst_rise = worst_rise.max(w[1].objective - w[0].objective);
        }
    }
    check(
        "criterion 06a monotone objective",
        worst_rise <= 1e-8,
        &format!("worst per-sweep objective rise = {worst_rise:.2e} (tol 1e-8)"),
    );

    // (b) KKT stationarity at convergence within lambda/100
    let mut worst_rel = 0.0f64;
    for seed in 0..20u64 {
        let k = 3 + (seed as usize % 5);
        let s = CovarianceMatrix::from_matrix(random_spd(k, seed + 100), 1000).unwrap();
        let lambda = [0.01, 0.05, 0.1][seed as usize % 3];
        let cfg = GlassoConfig {
            lambda,
            tol: 1e-7,
            max_sweeps: 500,
            inner_tol: 1e-10,
            inner_max_iter: 10_000,
        };
        let fit = graphical_lasso(&s, &cfg).unwrap();
        assert!(fit.converged(), "fixture {seed} did not converge");
        worst_rel = worst_rel.max(fit.kkt_violation(&s) / lambda);
    }
    check(
        "criterion 06b KKT at convergence",
        worst_rel <= 1e-2,
        &format!("worst violation = lambda * {worst_rel:.2e} (tol lambda * 1e-2)"),
    );

    // (c) near-zero penalty matches the dense inverse on k <= 4
    let mut worst_gap = 0.0f64;
    for (i, k) in [2usize, 3, 4, 4].iter().enumerate() {
        let s_mat = random_spd(*k, 200 + i as u64);
        let s = CovarianceMatrix::from_matrix(s_mat.clone(), 1000).unwrap();
        let cfg = GlassoConfig {
            lambda: 1e-6,
            tol: 1e-8,
            max_sweeps: 1000,
            inner_tol: 1e-12,
            inner_max_iter: 100_000,
        };
        let fit = graphical_lasso(&s, &cfg).unwrap();
        worst_gap = worst_gap.max(max_abs_diff(fit.theta(), &invert(&s_mat)));
    }
    check(
        "criterion 06c dense-inverse oracle",
        worst_gap <= 1e-2,
        &format!("worst max-norm gap to inverse = {worst_gap:.2e} (tol 1e-2)"),
    );

    // (d) penalty above the largest off-diagonal forces a diagonal estimate
    let mut all_diagonal = true;
    for seed in 300..305u64 {
        let s_mat = random_spd(5, seed);
        let mut max_off = 0.0f64;
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    max_off = max_off.max(s_mat[[i, j]].abs());
                }
            }
        }
        let s = CovarianceMatrix::from_matrix(s_mat, 1000).unwrap();
        let fit = graphical_lasso(&s, &GlassoConfig::with_lambda(max_off)).unwrap();
        if !fit.support().is_empty() {
            all_diagonal = false;
        }
    }
    check(
        "criterion 06d large penalty yields diagonal",
        all_diagonal,
        "support empty at lambda = max |s_ij| on 5 fixtures",
    );
}

#[test]
fn criterion_07_factorization_correctness() {
    let mut worst_resid = 0.0f64;
    for seed in 0..50u64 {
        let k = 2 + (seed as usize % 19); // 2..=20
        let theta = random_spd(k, seed + 1000);
        let f = udu_factorize(&theta).unwrap();

        for i in 0..k {
            assert_eq!(f.u()[[i, i]], 1.0, "diagonal of U must be exactly 1");
            for j in 0..i {
                assert_eq!(f.u()[[i, j]], 0.0, "U must be upper triangular");
            }
            assert!(f.d()[i] > 0.0, "d must be positive");
        }

        let scale = theta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let resid = max_abs_diff(&f.reconstruct(), &theta) / scale;
        worst_resid = worst_resid.max(resid);

        let schema: Vec<String> = (0..k).map(|i| format!("A{i}")).collect();
        let b = autoregression(&f, &schema).unwrap();
        for i in 0..k {
            for j in 0..=i {
                assert_eq!(b.matrix()[[i, j]], 0.0, "B must be strictly upper triangular");
            }
        }
    }
    check(
        "criterion 07 factorization correctness",
        worst_resid <= 1e-8,
        &format!("worst relative reconstruction residual = {worst_resid:.2e} (tol 1e-8)"),
    );
}

#[test]
fn criterion_08_transform_properties() {
    let mut checked_rows = 0usize;
    for noise in [NoiseLevel::Zero, NoiseLevel::Low, NoiseLevel::High] {
        let setting = Setting::new(noise, Scale::Small, Scale::Small, Scale::Small);
        for i in 0..INSTANCES as u64 {
            let cfg = setting.config(fdlearn::rng::derive(BASE_SEED, i));
            let out = generate(&cfg).unwrap();
            let clean = &out.clean;
            let samples = transform(clean, BASE_SEED).unwrap();

            assert_eq!(
                samples.data().dim(),
                (clean.n() * clean.k(), clean.k()),
                "output shape must be (n*k, k)"
            );

            let again = transform(clean, BASE_SEED).unwrap();
            assert_eq!(samples, again, "fixed seed must give bit-identical output");

            for fd in out.truth.fds() {
                let lhs_idx: Vec<usize> = fd
                    .lhs
                    .iter()
                    .map(|a| clean.attribute_index(a).unwrap())
                    .collect();
                let rhs_idx = clean.attribute_index(&fd.rhs).unwrap();
                for row in samples.data().rows() {
                    if lhs_idx.iter().all(|&c| row[c] == 1) {
                        assert_eq!(
                            row[rhs_idx], 1,
                            "row with all determinant columns set must set the dependent column"
                        );
                        checked_rows += 1;
                    }
                }
            }
        }
    }
    check(
        "criterion 08 transform properties",
        checked_rows > 0,
        &format!("dependency implication held on {checked_rows} agreeing rows across 15 instances"),
    );
}

#[test]
fn criterion_09_metric_units() {
    let schema: Vec<String> = (0..40).map(|i| format!("A{i}")).collect();
    let fd = |l: usize, r: usize| Fd {
        lhs: vec![format!("A{l}")],
        rhs: format!("A{r}"),
        weights: vec![1.0],
    };
    let truth_fds: Vec<Fd> = (0..10).map(|g| fd(2 * g, 2 * g + 1)).collect();
    let mut pred_fds = truth_fds.clone();
    for g in 0..10 {
        pred_fds.push(fd(20 + 2 * g, 20 + 2 * g + 1));
    }
    let truth = FdSet::from_fds(truth_fds, schema.clone(), 0.0).unwrap();
    let pred = FdSet::from_fds(pred_fds, schema, 0.0).unwrap();
    let r = score(&pred, &truth).unwrap();

    let arithmetic_ok =
        r.precision == 0.5 && r.recall == 1.0 && (r.f1 - 2.0 / 3.0).abs() < 1e-12;

    // aggregation must return one report whole, preserving its coupling
    let mk = |p: f64, rec: f64| fdlearn::EvalReport {
        precision: p,
        recall: rec,
        f1: if p + rec > 0.0 { 2.0 * p * rec / (p + rec) } else { 0.0 },
        matched: vec![],
        spurious: vec![],
        missed: vec![],
        precision_undefined: false,
    };
    let reports = [mk(1.0, 0.2), mk(0.5, 1.0), mk(1.0, 1.0)];
    let med = median_aggregate(&reports).unwrap();
    let coupling_ok = med.precision == 0.5 && med.recall == 1.0 && (med.f1 - 2.0 / 3.0).abs() < 1e-12;

    check(
        "criterion 09 metric units",
        arithmetic_ok && coupling_ok,
        &format!(
            "P={:.3} R={:.3} F1={:.3}; median kept (P={:.3}, R={:.3})",
            r.precision, r.recall, r.f1, med.precision, med.recall
        ),
    );
}

#[test]
fn criterion_10_end_to_end_smoke_oracle() {
    let n = 1000;

    // B an exact function of A, modest domain, repeats guaranteed
    let mut r = fdlearn::rng::rng(9001);
    let m = 100usize;
    let map: Vec<usize> = (0..m).map(|_| r.gen_range(0..m)).collect();
    let a_vals: Vec<usize> = (0..n).map(|_| r.gen_range(0..m)).collect();
    let d = Dataset::new(
        vec!["A".into(), "B".into()],
        vec![
            a_vals.iter().map(|v| CellValue::Categorical(v.to_string())).collect(),
            a_vals
                .iter()
                .map(|&v| CellValue::Categorical(format!("y{}", map[v])))
                .collect(),
        ],
    )
    .unwrap();
    let disc = discover(&d, &DiscoverOptions::default()).unwrap();
    let functional_ok = disc.fds.len() == 1
        && disc.fds.fds()[0].lhs == vec!["A".to_string()]
        && disc.fds.fds()[0].rhs == "B";

    // independent uniform columns over a large domain: no dependency
    // exists and none may be reported
    let mut r = fdlearn::rng::rng(9002);
    let big = 1_000_000usize;
    let ind = Dataset::new(
        vec!["A".into(), "B".into()],
        vec![
            (0..n).map(|_| CellValue::Categorical(r.gen_range(0..big).to_string())).collect(),
            (0..n).map(|_| CellValue::Categorical(r.gen_range(0..big).to_string())).collect(),
        ],
    )
    .unwrap();
    let disc_ind = discover(&ind, &DiscoverOptions::default()).unwrap();
    let independent_ok = disc_ind.fds.is_empty();

    let found: Vec<String> = disc
        .fds
        .fds()
        .iter()
        .map(|f| format!("{} -> {}", f.lhs.join(","), f.rhs))
        .collect();
    check(
        "criterion 10 end-to-end smoke oracle",
        functional_ok && independent_ok,
        &format!(
            "functional table -> {found:?} (need exactly [\"A -> B\"]); independent table -> {} dependencies (need 0)",
            disc_ind.fds.len()
        ),
    );
}

/// Opt-in large suite: the 100k-tuple settings with the reference F1
/// values minus 0.15 tolerance. Run with
/// `cargo test --release -p fdlearn --test acceptance -- --ignored`.
#[test]
#[ignore = "sized for ~100k-tuple instances; run explicitly in release mode"]
fn large_suite_reference_bounds() {
    // (attributes, cardinality) -> reference F1 per noise level
    let rows = [
        (NoiseLevel::Zero, Scale::Large, Scale::Large, 0.632),
        (NoiseLevel::Zero, Scale::Large, Scale::Small, 0.800),
        (NoiseLevel::Zero, Scale::Small, Scale::Large, 1.000),
        (NoiseLevel::Zero, Scale::Small, Scale::Small, 1.000),
        (NoiseLevel::Low, Scale::Large, Scale::Large, 0.571),
        (NoiseLevel::Low, Scale::Large, Scale::Small, 0.833),
        (NoiseLevel::Low, Scale::Small, Scale::Large, 0.800),
        (NoiseLevel::Low, Scale::Small, Scale::Small, 0.667),
        (NoiseLevel::High, Scale::Large, Scale::Large, 0.667),
        (NoiseLevel::High, Scale::Large, Scale::Small, 0.606),
        (NoiseLevel::High, Scale::Small, Scale::Large, 0.500),
        (NoiseLevel::High, Scale::Small, Scale::Small, 0.500),
    ];
    let mut failures = Vec::new();
    for (noise, attrs, card, reference) in rows {
        let setting = Setting::new(noise, Scale::Large, attrs, card);
        let reports = run_setting(&setting, INSTANCES, &pinned_opts(), BASE_SEED).unwrap();
        let median = median_aggregate(&reports).unwrap();
        let bound = reference - 0.15;
        let pass = median.f1 >= bound;
        println!(
            "[{}] large {}: median F1 = {:.3} (bound {:.3})",
            if pass { "PASS" } else { "FAIL" },
            setting.label(),
            median.f1,
            bound
        );
        if !pass {
            failures.push(setting.label());
        }
    }
    assert!(failures.is_empty(), "settings under bound: {failures:?}");
}
