//! End-to-end discovery: load, transform, covariance, precision
//! estimate, factorization, dependency generation — with per-stage
//! timings and a manifest that records every resolved parameter.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::covariance::{empirical_covariance, ridge_regularize, CovarianceMatrix, DEFAULT_RIDGE};
use crate::dataset::{CsvOptions, Dataset};
use crate::error::{Error, Result};
use crate::factorize::{autoregression, udu_factorize, AutoregressionMatrix, UduFactorization};
use crate::fdgen::{generate_fds, FdSet, DEFAULT_TAU};
use crate::glasso::{graphical_lasso, GlassoConfig, PrecisionMatrix};
use crate::transform::{subsample_rows, transform};

/// Everything the discovery run needs beyond the data itself.
#[derive(Debug, Clone)]
pub struct DiscoverOptions {
    pub csv: CsvOptions,
    /// Subsample the table to this many rows before transforming.
    pub max_rows: Option<usize>,
    /// Permute columns into this order before anything downstream runs.
    pub column_order: Option<Vec<String>>,
    /// Penalty; `None` resolves to the dimension-aware default.
    pub lambda: Option<f64>,
    pub tau: f64,
    pub ridge: f64,
    pub seed: u64,
    pub glasso_tol: f64,
    pub glasso_max_sweeps: usize,
    pub glasso_inner_tol: f64,
    pub glasso_inner_max_iter: usize,
    /// When set, debug matrices (D_t, S, theta, trace, U, d, B) are
    /// dumped into this directory as CSV/JSON-lines.
    pub dump_dir: Option<PathBuf>,
}

impl Default for DiscoverOptions {
    fn default() -> Self {
        let glasso = GlassoConfig::with_lambda(1.0);
        DiscoverOptions {
            csv: CsvOptions::default(),
            max_rows: None,
            column_order: None,
            lambda: None,
            tau: DEFAULT_TAU,
            ridge: DEFAULT_RIDGE,
            seed: 42,
            glasso_tol: glasso.tol,
            glasso_max_sweeps: glasso.max_sweeps,
            glasso_inner_tol: glasso.inner_tol,
            glasso_inner_max_iter: glasso.inner_max_iter,
            dump_dir: None,
        }
    }
}

/// Wall-clock seconds per stage. Stages that did not run report zero.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct StageTimings {
    pub load: f64,
    pub subsample: f64,
    pub transform: f64,
    pub covariance: f64,
    pub glasso: f64,
    pub factorize: f64,
    pub generate: f64,
}

impl StageTimings {
    pub fn total(&self) -> f64 {
        self.load
            + self.subsample
            + self.transform
            + self.covariance
            + self.glasso
            + self.factorize
            + self.generate
    }

    /// Structure-learning portion: covariance through factorization.
    pub fn structure_learning(&self) -> f64 {
        self.covariance + self.glasso + self.factorize
    }
}

/// Full result of one discovery run, intermediates included.
#[derive(Debug, Clone)]
pub struct Discovery {
    pub fds: FdSet,
    pub cov: CovarianceMatrix,
    pub precision: PrecisionMatrix,
    pub udu: UduFactorization,
    pub autoregression: AutoregressionMatrix,
    pub timings: StageTimings,
    pub resolved_lambda: f64,
    pub zero_variance_columns: Vec<usize>,
    pub n_rows_used: usize,
}

/// Run the pipeline on an in-memory table.
pub fn discover(d: &Dataset, opts: &DiscoverOptions) -> Result<Discovery> {
    if d.k() < 2 {
        return Err(Error::InvalidDataset(
            "discovery needs at least 2 attributes".into(),
        ));
    }

    let mut timings = StageTimings::default();

    let permuted;
    let mut table = match &opts.column_order {
        Some(order) => {
            permuted = d.permute_columns(order)?;
            &permuted
        }
        None => d,
    };

    let capped;
    if let Some(max_rows) = opts.max_rows {
        let t = Instant::now();
        capped = subsample_rows(table, max_rows, opts.seed)?;
        timings.subsample = t.elapsed().as_secs_f64();
        table = &capped;
    }

    let t = Instant::now();
    let samples = transform(table, opts.seed)?;
    timings.transform = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let raw_cov = empirical_covariance(&samples)?;
    let zero_variance_columns = raw_cov.zero_variance_columns();
    let cov = ridge_regularize(&raw_cov, opts.ridge)?;
    timings.covariance = t.elapsed().as_secs_f64();

    let resolved_lambda = opts
        .lambda
        .unwrap_or_else(|| GlassoConfig::default_lambda(table.k(), samples.n_rows()));
    let cfg = GlassoConfig {
        lambda: resolved_lambda,
        tol: opts.glasso_tol,
        max_sweeps: opts.glasso_max_sweeps,
        inner_tol: opts.glasso_inner_tol,
        inner_max_iter: opts.glasso_inner_max_iter,
    };

    let t = Instant::now();
    let precision = graphical_lasso(&cov, &cfg)?;
    timings.glasso = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let udu = udu_factorize(precision.theta())?;
    let b = autoregression(&udu, table.schema())?;
    timings.factorize = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let fds = generate_fds(&b, opts.tau)?;
    timings.generate = t.elapsed().as_secs_f64();

    let discovery = Discovery {
        fds,
        cov,
        precision,
        udu,
        autoregression: b,
        timings,
        resolved_lambda,
        zero_variance_columns,
        n_rows_used: table.n(),
    };

    if let Some(dir) = &opts.dump_dir {
        write_debug_dumps(dir, &samples, &discovery)?;
    }

    Ok(discovery)
}

/// Load a CSV, run the pipeline, and return the result together with a
/// manifest that is sufficient to replay the run.
pub fn discover_csv(path: &Path, opts: &DiscoverOptions) -> Result<(Discovery, RunManifest)> {
    let t = Instant::now();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let input_sha256 = hex_digest(&bytes);
    let dataset = crate::dataset::load_csv_reader(bytes.as_slice(), &opts.csv)?;
    let load = t.elapsed().as_secs_f64();

    let mut discovery = discover(&dataset, opts)?;
    discovery.timings.load = load;

    let manifest = RunManifest::new("discover", path, &input_sha256, opts, &discovery);
    Ok((discovery, manifest))
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Resolved parameters echoed into the manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestParams {
    pub lambda: f64,
    pub tau: f64,
    pub ridge: f64,
    pub seed: u64,
    pub max_rows: Option<usize>,
    pub column_order: Option<Vec<String>>,
    pub header: bool,
    pub na_tokens: Vec<String>,
    pub numeric_detect: bool,
    pub glasso_tol: f64,
    pub glasso_max_sweeps: usize,
    pub glasso_inner_tol: f64,
    pub glasso_inner_max_iter: usize,
}

/// Run statistics recorded alongside the parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunStats {
    pub n_rows_used: usize,
    pub k: usize,
    pub n_samples: usize,
    pub glasso_sweeps: usize,
    pub glasso_converged: bool,
    pub zero_variance_columns: Vec<usize>,
    pub fd_count: usize,
}

/// Reproducibility record for one CLI run: resolved parameters, input
/// hash, per-stage timings, and summary statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub input_path: String,
    pub input_sha256: String,
    pub params: ManifestParams,
    pub timings: StageTimings,
    pub stats: RunStats,
}

impl RunManifest {
    fn new(
        command: &str,
        path: &Path,
        sha256: &str,
        opts: &DiscoverOptions,
        d: &Discovery,
    ) -> Self {
        let mut na_tokens: Vec<String> = opts.csv.na_tokens.iter().cloned().collect();
        na_tokens.sort();
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_path: path.display().to_string(),
            input_sha256: sha256.to_string(),
            params: ManifestParams {
                lambda: d.resolved_lambda,
                tau: opts.tau,
                ridge: opts.ridge,
                seed: opts.seed,
                max_rows: opts.max_rows,
                column_order: opts.column_order.clone(),
                header: opts.csv.header,
                na_tokens,
                numeric_detect: opts.csv.numeric_detect,
                glasso_tol: opts.glasso_tol,
                glasso_max_sweeps: opts.glasso_max_sweeps,
                glasso_inner_tol: opts.glasso_inner_tol,
                glasso_inner_max_iter: opts.glasso_inner_max_iter,
            },
            timings: d.timings.clone(),
            stats: RunStats {
                n_rows_used: d.n_rows_used,
                k: d.autoregression.k(),
                n_samples: d.cov.n_samples(),
                glasso_sweeps: d.precision.iterations(),
                glasso_converged: d.precision.converged(),
                zero_variance_columns: d.zero_variance_columns.clone(),
                fd_count: d.fds.len(),
            },
        }
    }

    /// Rebuild the options that produced this manifest; running them on
    /// the same input reproduces the run exactly.
    pub fn to_options(&self) -> DiscoverOptions {
        DiscoverOptions {
            csv: CsvOptions {
                header: self.params.header,
                na_tokens: self.params.na_tokens.iter().cloned().collect(),
                numeric_detect: self.params.numeric_detect,
            },
            max_rows: self.params.max_rows,
            column_order: self.params.column_order.clone(),
            lambda: Some(self.params.lambda),
            tau: self.params.tau,
            ridge: self.params.ridge,
            seed: self.params.seed,
            glasso_tol: self.params.glasso_tol,
            glasso_max_sweeps: self.params.glasso_max_sweeps,
            glasso_inner_tol: self.params.glasso_inner_tol,
            glasso_inner_max_iter: self.params.glasso_inner_max_iter,
            dump_dir: None,
        }
    }
}

fn write_matrix_csv(path: &Path, header: &[String], m: &ndarray::Array2<f64>) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_debug_dumps(
    dir: &Path,
    samples: &crate::transform::BinarySampleMatrix,
    d: &Discovery,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let schema = d.autoregression.schema().to_vec();

    // D_t as 0/1 CSV
    let mut out = String::new();
    out.push_str(&schema.join(","));
    out.push('\n');
    for row in samples.data().rows() {
        let cells: Vec<String> = row.iter().map(|b| b.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(dir.join("dt.csv"), out).map_err(|source| Error::Io {
        path: dir.join("dt.csv"),
        source,
    })?;

    write_matrix_csv(&dir.join("s.csv"), &schema, d.cov.matrix())?;
    write_matrix_csv(&dir.join("theta.csv"), &schema, d.precision.theta())?;
    write_matrix_csv(&dir.join("u.csv"), &schema, d.udu.u())?;
    write_matrix_csv(&dir.join("b.csv"), &schema, d.autoregression.matrix())?;

    let mut out = String::new();
    out.push_str("attribute,d\n");
    for (name, v) in schema.iter().zip(d.udu.d().iter()) {
        out.push_str(&format!("{name},{v}\n"));
    }
    fs::write(dir.join("d.csv"), out).map_err(|source| Error::Io {
        path: dir.join("d.csv"),
        source,
    })?;

    let mut f = fs::File::create(dir.join("trace.jsonl")).map_err(|source| Error::Io {
        path: dir.join("trace.jsonl"),
        source,
    })?;
    for entry in d.precision.trace() {
        let line = serde_json::to_string(entry).expect("trace serializes");
        writeln!(f, "{line}").map_err(|source| Error::Io {
            path: dir.join("trace.jsonl"),
            source,
        })?;
    }
    Ok(())
}
