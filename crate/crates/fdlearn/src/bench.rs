//! Micro-benchmark harnesses: column-count scaling and noise-rate
//! sweeps over generated instances.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{median_aggregate, score, EvalReport};
use crate::pipeline::{discover, DiscoverOptions};
use crate::rng;
use crate::synth::{generate, Setting, SynthConfig};

/// Noise rates exercised by the default sweep.
pub const NOISE_SWEEP_RATES: [f64; 4] = [0.01, 0.1, 0.3, 0.5];

/// Average timings for one column count.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingPoint {
    pub k: usize,
    pub total_sec: f64,
    pub structure_sec: f64,
}

/// Scaling table plus the fitted log-log slope of total runtime vs k
/// (absent when fewer than two points were measured).
#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    pub slope: Option<f64>,
}

impl ScalingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,total_sec,structure_sec\n");
        for p in &self.points {
            out.push_str(&format!("{},{:.6},{:.6}\n", p.k, p.total_sec, p.structure_sec));
        }
        if let Some(s) = self.slope {
            out.push_str(&format!("# loglog_slope={s:.4}\n"));
        }
        out
    }
}

/// Ordinary least squares slope of ln(y) against ln(x).
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| (x.ln(), y.max(1e-9).ln()))
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Generate and score one instance: the table goes through the full
/// pipeline and the result is matched against the generator's truth.
pub fn evaluate_config(cfg: &SynthConfig, opts: &DiscoverOptions) -> Result<EvalReport> {
    let out = generate(cfg)?;
    let disc = discover(&out.dataset, opts)?;
    score(&disc.fds, &out.truth)
}

/// Score `instances` instances of a setting with derived per-instance
/// seeds.
pub fn run_setting(
    setting: &Setting,
    instances: usize,
    opts: &DiscoverOptions,
    base_seed: u64,
) -> Result<Vec<EvalReport>> {
    (0..instances)
        .map(|i| {
            let cfg = setting.config(rng::derive(base_seed, i as u64));
            evaluate_config(&cfg, opts)
        })
        .collect()
}

/// Time the pipeline across an ascending list of column counts, holding
/// the rest of the setting fixed: zero noise, small domains, `n_tuples`
/// rows. Both the total pipeline time and the structure-learning slice
/// (covariance through factorization) are averaged over `reps` runs.
pub fn bench_scaling(
    k_list: &[usize],
    reps: usize,
    n_tuples: usize,
    opts: &DiscoverOptions,
    base_seed: u64,
) -> Result<ScalingReport> {
    if k_list.is_empty() || reps == 0 {
        return Err(Error::InvalidParameter(
            "scaling bench needs columns and at least one rep".into(),
        ));
    }
    if k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("k list must be ascending".into()));
    }

    let mut points = Vec::with_capacity(k_list.len());
    for (ki, &k) in k_list.iter().enumerate() {
        let mut total = 0.0;
        let mut structure = 0.0;
        for rep in 0..reps {
            let cfg = SynthConfig {
                n_tuples,
                n_attributes: k,
                ..SynthConfig::small(rng::derive(base_seed, (ki * 1000 + rep) as u64))
            };
            let out = generate(&cfg)?;
            let disc = discover(&out.dataset, opts)?;
            total += disc.timings.total();
            structure += disc.timings.structure_learning();
        }
        points.push(ScalingPoint {
            k,
            total_sec: total / reps as f64,
            structure_sec: structure / reps as f64,
        });
    }

    let slope = fit_loglog_slope(
        &points
            .iter()
            .map(|p| (p.k as f64, p.total_sec))
            .collect::<Vec<_>>(),
    );
    Ok(ScalingReport { points, slope })
}

/// Median scores for one noise rate.
#[derive(Debug, Clone, Serialize)]
pub struct NoisePoint {
    pub rate: f64,
    pub instances: usize,
    pub median: EvalReport,
}

/// Sweep noise rates on a fixed setting: `instances` instances per rate,
/// reported as the median-F1 report per rate.
pub fn bench_noise(
    setting: &Setting,
    rates: &[f64],
    instances: usize,
    opts: &DiscoverOptions,
    base_seed: u64,
) -> Result<Vec<NoisePoint>> {
    if rates.is_empty() || instances == 0 {
        return Err(Error::InvalidParameter(
            "noise sweep needs rates and at least one instance".into(),
        ));
    }
    let mut out = Vec::with_capacity(rates.len());
    for (ri, &rate) in rates.iter().enumerate() {
        let mut reports = Vec::with_capacity(instances);
        for i in 0..instances {
            let mut cfg = setting.config(rng::derive(base_seed, (ri * 1000 + i) as u64));
            cfg.noise_rate = rate;
            reports.push(evaluate_config(&cfg, opts)?);
        }
        out.push(NoisePoint {
            rate,
            instances,
            median: median_aggregate(&reports)?,
        });
    }
    Ok(out)
}
