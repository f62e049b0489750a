//! Command-line front end: discover dependencies in a CSV, generate
//! benchmark suites, score predictions, and run the micro-benchmarks.
//!
//! stdout carries only the primary artifact of each command; diagnostics
//! go to stderr. Exit codes: 0 success, 1 usage error, 2 data error,
//! 3 numerical failure.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fdlearn::bench::{bench_noise, bench_scaling, NOISE_SWEEP_RATES};
use fdlearn::eval::{render_table, score};
use fdlearn::fdgen::{parse_fd_lines, serialize_fds, FdFormat, FdSet};
use fdlearn::pipeline::{discover_csv, DiscoverOptions};
use fdlearn::synth::{generate, Setting};
use fdlearn::{write_csv, CsvOptions, Error};

#[derive(Parser)]
#[command(name = "fdlearn", version, about = "Functional dependency discovery from noisy tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discover dependencies in a CSV file
    Discover(DiscoverArgs),
    /// Generate synthetic benchmark instances
    Synth(SynthArgs),
    /// Score a predicted dependency file against a truth file
    Eval(EvalArgs),
    /// Time the pipeline over a range of column counts
    BenchScaling(BenchScalingArgs),
    /// Median F1 across a sweep of noise rates
    BenchNoise(BenchNoiseArgs),
}

#[derive(Args)]
struct DiscoverArgs {
    /// Input CSV path
    input: PathBuf,
    /// L1 penalty; defaults to 0.5*sqrt(log k / N)
    #[arg(long)]
    lambda: Option<f64>,
    /// Coefficient magnitude threshold for emitting a dependency
    #[arg(long, default_value_t = fdlearn::DEFAULT_TAU)]
    tau: f64,
    /// Diagonal ridge added to the covariance
    #[arg(long, default_value_t = fdlearn::DEFAULT_RIDGE)]
    ridge: f64,
    /// Seed for the transform shuffle (and row cap, when used)
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Uniformly subsample the table to at most this many rows
    #[arg(long)]
    max_rows: Option<usize>,
    /// Comma-separated attribute order applied before the pipeline
    #[arg(long, value_delimiter = ',')]
    column_order: Option<Vec<String>>,
    /// Output format for dependencies
    #[arg(long, default_value = "json", value_parser = ["json", "human"])]
    format: String,
    /// Write dependencies here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the run manifest (JSON) here
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Treat these tokens as missing (repeatable); defaults to
    /// "", NULL, null, NaN
    #[arg(long = "na-token")]
    na_tokens: Vec<String>,
    /// First row is data, not attribute names
    #[arg(long)]
    no_header: bool,
    /// Keep all-numeric columns as plain tokens
    #[arg(long)]
    no_numeric_detect: bool,
    /// Dump intermediate matrices (D_t, S, theta, U, d, B, solver trace)
    #[arg(long)]
    dump_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Setting label like zero/s/s/s, or "all24" for the full grid
    #[arg(long, default_value = "zero/s/s/s")]
    setting: String,
    /// Instances per setting
    #[arg(long, default_value_t = 5)]
    instances: usize,
    /// Output directory
    #[arg(long)]
    outdir: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct EvalArgs {
    /// Predicted dependencies (JSON lines)
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth dependencies (JSON lines)
    #[arg(long)]
    truth: PathBuf,
    /// Explicit comma-separated schema; inferred from the files when
    /// omitted
    #[arg(long, value_delimiter = ',')]
    schema: Option<Vec<String>>,
}

#[derive(Args)]
struct BenchScalingArgs {
    /// Ascending comma-separated column counts
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    k_list: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 1000)]
    tuples: usize,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = fdlearn::DEFAULT_TAU)]
    tau: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the CSV table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchNoiseArgs {
    /// Comma-separated noise rates
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    #[arg(long, default_value_t = 5)]
    instances: usize,
    /// Base setting; its noise level is overridden by each rate
    #[arg(long, default_value = "zero/s/s/s")]
    setting: String,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = fdlearn::DEFAULT_TAU)]
    tau: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };

    let result = match cli.command {
        Command::Discover(args) => cmd_discover(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Eval(args) => cmd_eval(args),
        Command::BenchScaling(args) => cmd_bench_scaling(args),
        Command::BenchNoise(args) => cmd_bench_noise(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn write_artifact(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_discover(args: DiscoverArgs) -> Result<(), Error> {
    let na_tokens: HashSet<String> = if args.na_tokens.is_empty() {
        CsvOptions::default_na_tokens()
    } else {
        args.na_tokens.iter().cloned().collect()
    };
    let opts = DiscoverOptions {
        csv: CsvOptions {
            header: !args.no_header,
            na_tokens,
            numeric_detect: !args.no_numeric_detect,
        },
        max_rows: args.max_rows,
        column_order: args.column_order.clone(),
        lambda: args.lambda,
        tau: args.tau,
        ridge: args.ridge,
        seed: args.seed,
        dump_dir: args.dump_dir.clone(),
        ..DiscoverOptions::default()
    };

    let (discovery, manifest) = discover_csv(&args.input, &opts)?;

    if !discovery.zero_variance_columns.is_empty() {
        let names: Vec<&str> = discovery
            .zero_variance_columns
            .iter()
            .map(|&i| discovery.autoregression.schema()[i].as_str())
            .collect();
        eprintln!("note: zero-variance sample columns kept in place: {names:?}");
    }
    if !discovery.precision.converged() {
        eprintln!(
            "note: solver stopped at the sweep limit ({})",
            discovery.precision.iterations()
        );
    }
    eprintln!(
        "discovered {} dependencies in {:.3}s (lambda={:.6}, tau={})",
        discovery.fds.len(),
        discovery.timings.total(),
        discovery.resolved_lambda,
        args.tau
    );

    let format = if args.format == "human" {
        FdFormat::Human
    } else {
        FdFormat::JsonLines
    };
    write_artifact(&args.out, &serialize_fds(&discovery.fds, format))?;

    if let Some(path) = &args.manifest {
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(path, json).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), Error> {
    let settings: Vec<Setting> = if args.setting == "all24" {
        Setting::all24()
    } else {
        vec![Setting::parse(&args.setting)?]
    };

    fs::create_dir_all(&args.outdir).map_err(|source| Error::Io {
        path: args.outdir.clone(),
        source,
    })?;

    let mut dirs = 0usize;
    for (si, setting) in settings.iter().enumerate() {
        for i in 0..args.instances {
            let seed = fdlearn::rng::derive(args.seed, (si * 1000 + i) as u64);
            let cfg = setting.config(seed);
            let out = generate(&cfg)?;

            let final_dir = args
                .outdir
                .join(setting.label())
                .join(format!("inst{i:02}"));
            let tmp_dir = final_dir.with_extension("tmp");
            if tmp_dir.exists() {
                fs::remove_dir_all(&tmp_dir).map_err(|source| Error::Io {
                    path: tmp_dir.clone(),
                    source,
                })?;
            }
            fs::create_dir_all(&tmp_dir).map_err(|source| Error::Io {
                path: tmp_dir.clone(),
                source,
            })?;

            write_dataset(&tmp_dir.join("data.csv"), &out.dataset)?;
            write_dataset(&tmp_dir.join("clean.csv"), &out.clean)?;
            fs::write(
                tmp_dir.join("truth.jsonl"),
                serialize_fds(&out.truth, FdFormat::JsonLines),
            )
            .map_err(|source| Error::Io {
                path: tmp_dir.join("truth.jsonl"),
                source,
            })?;

            let manifest = serde_json::json!({
                "setting": setting.label(),
                "config": cfg,
                "schema": out.clean.schema(),
                "truth_fd_count": out.truth.len(),
                "noised_cells": out.noised_cells.len(),
                "groups": out.groups,
            });
            fs::write(
                tmp_dir.join("manifest.json"),
                serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
            )
            .map_err(|source| Error::Io {
                path: tmp_dir.join("manifest.json"),
                source,
            })?;

            // instance directories appear atomically
            if final_dir.exists() {
                fs::remove_dir_all(&final_dir).map_err(|source| Error::Io {
                    path: final_dir.clone(),
                    source,
                })?;
            }
            fs::create_dir_all(final_dir.parent().expect("instance dir has a parent")).map_err(
                |source| Error::Io {
                    path: final_dir.clone(),
                    source,
                },
            )?;
            fs::rename(&tmp_dir, &final_dir).map_err(|source| Error::Io {
                path: final_dir.clone(),
                source,
            })?;
            dirs += 1;
        }
    }
    eprintln!("wrote {dirs} instance directories under {}", args.outdir.display());
    Ok(())
}

fn write_dataset(path: &Path, d: &fdlearn::Dataset) -> Result<(), Error> {
    let file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(d, file)
}

fn read_fd_file(path: &Path) -> Result<Vec<fdlearn::Fd>, Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_fd_lines(&text)
}

fn cmd_eval(args: EvalArgs) -> Result<(), Error> {
    let pred = read_fd_file(&args.pred)?;
    let truth = read_fd_file(&args.truth)?;

    let schema: Vec<String> = match &args.schema {
        Some(s) => s.clone(),
        None => {
            // union of mentioned attributes, sorted for a stable order
            let mut names: Vec<String> = pred
                .iter()
                .chain(truth.iter())
                .flat_map(|fd| fd.lhs.iter().chain(std::iter::once(&fd.rhs)))
                .cloned()
                .collect();
            names.sort();
            names.dedup();
            names
        }
    };

    let pred = FdSet::for_eval(pred, schema.clone())?;
    let truth = FdSet::for_eval(truth, schema)?;
    let report = score(&pred, &truth)?;

    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    println!();
    print!("{}", render_table(&[("eval".to_string(), &report)]));
    Ok(())
}

fn cmd_bench_scaling(args: BenchScalingArgs) -> Result<(), Error> {
    let opts = DiscoverOptions {
        lambda: args.lambda,
        tau: args.tau,
        ..DiscoverOptions::default()
    };
    let report = bench_scaling(&args.k_list, args.reps, args.tuples, &opts, args.seed)?;
    if let Some(slope) = report.slope {
        eprintln!("fitted log-log slope of total runtime vs k: {slope:.3}");
    }
    write_artifact(&args.out, &report.to_csv())
}

fn cmd_bench_noise(args: BenchNoiseArgs) -> Result<(), Error> {
    let setting = Setting::parse(&args.setting)?;
    let rates = args.rates.unwrap_or_else(|| NOISE_SWEEP_RATES.to_vec());
    let opts = DiscoverOptions {
        lambda: args.lambda,
        tau: args.tau,
        ..DiscoverOptions::default()
    };
    let points = bench_noise(&setting, &rates, args.instances, &opts, args.seed)?;

    let rows: Vec<(String, &fdlearn::EvalReport)> = points
        .iter()
        .map(|p| (format!("noise={}", p.rate), &p.median))
        .collect();
    let mut out = std::io::stdout().lock();
    let json = serde_json::to_string_pretty(
        &points
            .iter()
            .map(|p| {
                serde_json::json!({
                    "rate": p.rate,
                    "instances": p.instances,
                    "precision": p.median.precision,
                    "recall": p.median.recall,
                    "f1": p.median.f1,
                })
            })
            .collect::<Vec<_>>(),
    )
    .expect("summary serializes");
    writeln!(out, "{json}").ok();
    writeln!(out).ok();
    write!(out, "{}", render_table(&rows)).ok();
    Ok(())
}
