//! Median F1 as the cell-flip noise rate rises on a fixed setting.
//!
//! ```bash
//! cargo run --release --example noise_sweep
//! ```

use anyhow::Result;
use fdlearn::bench::{bench_noise, NOISE_SWEEP_RATES};
use fdlearn::{render_table, DiscoverOptions, NoiseLevel, Scale, Setting};

fn main() -> Result<()> {
    let setting = Setting::new(NoiseLevel::Zero, Scale::Small, Scale::Small, Scale::Small);
    let opts = DiscoverOptions {
        lambda: Some(0.01),
        ..DiscoverOptions::default()
    };
    let points = bench_noise(&setting, &NOISE_SWEEP_RATES, 5, &opts, 42)?;

    let rows: Vec<(String, &fdlearn::EvalReport)> = points
        .iter()
        .map(|p| (format!("noise={}", p.rate), &p.median))
        .collect();
    print!("{}", render_table(&rows));
    Ok(())
}
