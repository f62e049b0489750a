//! Sweep the L1 penalty on one benchmark instance and watch the
//! trade-off: a loose penalty admits structural false positives, a tight
//! one starves the weak multi-attribute dependencies.
//!
//! ```bash
//! cargo run --release --example lambda_path
//! ```

use anyhow::Result;
use fdlearn::{discover, generate, score, DiscoverOptions, SynthConfig};

fn main() -> Result<()> {
    let out = generate(&SynthConfig {
        n_attributes: 12,
        ..SynthConfig::small(42)
    })?;
    eprintln!(
        "instance: {} attributes, {} true dependencies",
        out.dataset.k(),
        out.truth.len()
    );

    println!(
        "{:>8} {:>10} {:>8} {:>10} {:>10} {:>8}",
        "lambda", "support", "fds", "precision", "recall", "f1"
    );
    for lambda in [0.001, 0.005, 0.01, 0.02, 0.025, 0.03, 0.05, 0.1] {
        let opts = DiscoverOptions {
            lambda: Some(lambda),
            ..DiscoverOptions::default()
        };
        let disc = discover(&out.dataset, &opts)?;
        let report = score(&disc.fds, &out.truth)?;
        println!(
            "{:>8} {:>10} {:>8} {:>10.3} {:>10.3} {:>8.3}",
            lambda,
            disc.precision.support().len(),
            disc.fds.len(),
            report.precision,
            report.recall,
            report.f1
        );
    }
    Ok(())
}
