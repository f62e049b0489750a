//! Full CSV round trip: generate a benchmark instance, write it to disk,
//! discover dependencies from the file, and compare against the truth.
//!
//! ```bash
//! cargo run --release --example discover_from_csv
//! ```

use anyhow::Result;
use fdlearn::fdgen::{serialize_fds, FdFormat};
use fdlearn::pipeline::discover_csv;
use fdlearn::{generate, score, write_csv, DiscoverOptions, SynthConfig};

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("fdlearn_demo");
    std::fs::create_dir_all(&dir)?;
    let csv_path = dir.join("demo.csv");

    let out = generate(&SynthConfig {
        noise_rate: 0.01,
        n_attributes: 10,
        ..SynthConfig::small(7)
    })?;
    write_csv(&out.dataset, std::fs::File::create(&csv_path)?)?;
    eprintln!(
        "wrote {} rows x {} columns to {}",
        out.dataset.n(),
        out.dataset.k(),
        csv_path.display()
    );

    let opts = DiscoverOptions {
        lambda: Some(0.025),
        ..DiscoverOptions::default()
    };
    let (discovery, manifest) = discover_csv(&csv_path, &opts)?;

    println!("discovered dependencies:");
    print!("{}", serialize_fds(&discovery.fds, FdFormat::Human));
    println!();
    println!("ground truth:");
    print!("{}", serialize_fds(&out.truth, FdFormat::Human));

    let report = score(&discovery.fds, &out.truth)?;
    println!();
    println!(
        "precision {:.3}  recall {:.3}  f1 {:.3}",
        report.precision, report.recall, report.f1
    );
    println!(
        "stage timings (s): load {:.4} transform {:.4} covariance {:.4} solver {:.4} factorize {:.4}",
        discovery.timings.load,
        discovery.timings.transform,
        discovery.timings.covariance,
        discovery.timings.glasso,
        discovery.timings.factorize,
    );
    println!();
    println!("manifest:\n{}", serde_json::to_string_pretty(&manifest)?);
    Ok(())
}
