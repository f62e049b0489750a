//! Functional dependency discovery for noisy relational data.
//!
//! The pipeline converts a table into binary pairwise-equality samples
//! (one shuffled copy, one stable sort per attribute, circular shift,
//! elementwise comparison), estimates a sparse inverse covariance matrix
//! over those samples with an L1-penalized solver, factorizes the
//! estimate into a unit upper-triangular system, and reads dependencies
//! `X -> Y` off the surviving coefficients of `B = I - U`. A synthetic
//! benchmark generator, a precision/recall harness, and scaling/noise
//! micro-benchmarks round out the toolkit.
//!
//! ```
//! use fdlearn::{discover, generate, score, DiscoverOptions, SynthConfig};
//!
//! let out = generate(&SynthConfig::small(7)).unwrap();
//! let opts = DiscoverOptions { lambda: Some(0.01), ..Default::default() };
//! let found = discover(&out.dataset, &opts).unwrap();
//! let report = score(&found.fds, &out.truth).unwrap();
//! assert!(report.f1 > 0.0);
//! ```
//!
//! Each runnable example under `examples/` exercises one capability:
//! CSV discovery, the synthetic benchmark grid, noise sweeps, column
//! scaling, the transform anatomy, and the penalty path.

pub mod bench;
pub mod covariance;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod factorize;
pub mod fdgen;
pub mod glasso;
pub mod linalg;
pub mod pipeline;
pub mod rng;
pub mod synth;
pub mod transform;

pub use covariance::{empirical_covariance, ridge_regularize, CovarianceMatrix, DEFAULT_RIDGE};
pub use dataset::{equality, load_csv, write_csv, CellValue, CsvOptions, Dataset};
pub use error::{Error, Result};
pub use eval::{holds_exactly, median_aggregate, render_table, score, EvalReport};
pub use factorize::{autoregression, udu_factorize, AutoregressionMatrix, UduFactorization};
pub use fdgen::{generate_fds, parse_fd_lines, serialize_fds, Fd, FdFormat, FdSet, DEFAULT_TAU};
pub use glasso::{graphical_lasso, lasso_cd, objective, GlassoConfig, PrecisionMatrix};
pub use pipeline::{discover, discover_csv, DiscoverOptions, Discovery, RunManifest, StageTimings};
pub use synth::{generate, inject_noise, NoiseLevel, Scale, Setting, SynthConfig, SynthOutput};
pub use transform::{subsample_rows, transform, BinarySampleMatrix};
