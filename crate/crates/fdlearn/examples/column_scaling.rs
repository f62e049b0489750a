//! Runtime as the column count grows, with the fitted log-log slope.
//!
//! Two curves are reported: total pipeline time and the
//! structure-learning slice (covariance, solver, factorization).
//!
//! ```bash
//! cargo run --release --example column_scaling
//! ```

use anyhow::Result;
use fdlearn::bench::bench_scaling;
use fdlearn::DiscoverOptions;

fn main() -> Result<()> {
    let report = bench_scaling(
        &[8, 16, 32, 64, 128],
        3,
        1000,
        &DiscoverOptions::default(),
        42,
    )?;
    print!("{}", report.to_csv());
    if let Some(slope) = report.slope {
        eprintln!("total runtime grows roughly like k^{slope:.2}");
    }
    Ok(())
}
