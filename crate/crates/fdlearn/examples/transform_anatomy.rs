//! Walk a tiny table through every pipeline stage and print the
//! intermediate matrices: the binary samples, their covariance, the
//! precision estimate, and the autoregression matrix.
//!
//! ```bash
//! cargo run --example transform_anatomy
//! ```

use anyhow::Result;
use fdlearn::fdgen::{serialize_fds, FdFormat};
use fdlearn::{discover, CellValue, Dataset, DiscoverOptions};
use ndarray::Array2;

fn cat(tokens: &[&str]) -> Vec<CellValue> {
    tokens.iter().map(|t| CellValue::Categorical(t.to_string())).collect()
}

fn print_matrix(title: &str, m: &Array2<f64>, schema: &[String]) {
    println!("{title}");
    print!("{:>8}", "");
    for name in schema {
        print!("{name:>8}");
    }
    println!();
    for (i, row) in m.rows().into_iter().enumerate() {
        print!("{:>8}", schema[i]);
        for v in row {
            print!("{v:>8.3}");
        }
        println!();
    }
    println!();
}

fn main() -> Result<()> {
    // dept determines floor exactly; badge is an independent key
    let d = Dataset::new(
        vec!["dept".into(), "floor".into(), "badge".into()],
        vec![
            cat(&["sales", "sales", "eng", "eng", "ops", "ops", "sales", "eng"]),
            cat(&["2", "2", "3", "3", "1", "1", "2", "3"]),
            cat(&["b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8"]),
        ],
    )?;

    let samples = fdlearn::transform(&d, 42)?;
    println!("binary samples ({} rows x {} cols):", samples.n_rows(), samples.k());
    for i in 0..d.k() {
        println!("  block sorted on {}:", d.schema()[i]);
        for row in samples.block(i).rows() {
            println!("    {:?}", row.iter().copied().collect::<Vec<u8>>());
        }
    }
    println!();

    let opts = DiscoverOptions {
        lambda: Some(0.05),
        ..DiscoverOptions::default()
    };
    let disc = discover(&d, &opts)?;
    let schema = d.schema().to_vec();
    print_matrix("covariance S:", disc.cov.matrix(), &schema);
    print_matrix("precision estimate:", disc.precision.theta(), &schema);
    print_matrix("autoregression B = I - U:", disc.autoregression.matrix(), &schema);

    println!("dependencies at tau = {}:", opts.tau);
    print!("{}", serialize_fds(&disc.fds, FdFormat::Human));
    Ok(())
}
