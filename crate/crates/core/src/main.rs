//! `siml` command-line interface: simulate datasets, fit models, run the
//! SNR-sweep benchmark, and render reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use siml::bench::{run_benchmark, write_report, BenchmarkSpec};
use siml::io::{
    read_tensor, write_model, write_sidecar, write_tensor, write_tensor_csv, GroundTruthSidecar,
};
use siml::mcr::{multi_start, FitOptions, Mode};
use siml::sim::{generate, SimConfig};
use siml::tensor::augment;
use siml::Error;

#[derive(Parser)]
#[command(
    name = "siml",
    version,
    about = "Four-mode chromatographic deconvolution toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and its ground-truth sidecar.
    Simulate(SimulateArgs),
    /// Fit a model to a dataset container.
    Fit(FitArgs),
    /// Run the SNR-sweep benchmark.
    Benchmark(BenchmarkArgs),
    /// Render SVG plots and a markdown summary from benchmark results.
    Report(ReportArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON simulation config; defaults to the full-scale protocol.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output tensor container path.
    #[arg(long, short)]
    out: PathBuf,
    /// Also write the ground truth sidecar here.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Also export the tensor as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Override the configured SNR (omit the flag to keep the config value).
    #[arg(long)]
    snr: Option<f64>,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct FitArgs {
    /// Input tensor container path.
    #[arg(long, short)]
    input: PathBuf,
    /// JSON fit options; flags below override individual fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of components.
    #[arg(long, short)]
    r: Option<usize>,
    /// Constraint mode: mcr, siml, or siml_dn.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Number of random restarts; the best (lowest-loss) model is saved.
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    /// Output model stem; writes `<stem>.json`, `<stem>.c.bin`, `<stem>.s.bin`.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// JSON benchmark spec; defaults to the desk-scale sweep.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for results.csv and model archives.
    #[arg(long, short)]
    out: PathBuf,
    /// Override fits per (SNR, mode) cell.
    #[arg(long)]
    fits_per_cell: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Benchmark results.csv path.
    #[arg(long)]
    results: PathBuf,
    /// Output directory for SVG plots and summary.md.
    #[arg(long, short)]
    out: PathBuf,
}

fn load_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Error> {
    let mut cfg: SimConfig = match &args.config {
        Some(path) => load_json(path)?,
        None => SimConfig::default_full_scale(),
    };
    if let Some(snr) = args.snr {
        cfg.snr = if snr.is_finite() { Some(snr) } else { None };
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let (ds, gt) = generate(&cfg)?;
    write_tensor(&args.out, &ds)?;
    if let Some(path) = &args.truth {
        write_sidecar(path, &GroundTruthSidecar::from_truth(ds.dims(), &gt))?;
    }
    if let Some(path) = &args.csv {
        write_tensor_csv(path, &ds)?;
    }
    let d = ds.dims();
    println!(
        "wrote {} ({}x{}x{}x{}, noise sigma {:.6e})",
        args.out.display(),
        d.i,
        d.k,
        d.l,
        d.j,
        gt.noise_sigma
    );
    Ok(())
}

fn cmd_fit(args: FitArgs) -> Result<(), Error> {
    let mut opts: FitOptions = match &args.config {
        Some(path) => load_json(path)?,
        None => FitOptions::new(args.r.unwrap_or(2), Mode::Mcr, 0),
    };
    if let Some(r) = args.r {
        opts.r = r;
    }
    if let Some(mode) = &args.mode {
        opts.mode = mode.parse()?;
    }
    if let Some(seed) = args.seed {
        opts.seed = seed;
    }
    if let Some(max) = args.max_iterations {
        opts.max_iterations = max;
    }
    let ds = read_tensor(&args.input)?;
    let x = augment(&ds)?;
    let ensemble = multi_start(&x, &opts, args.restarts)?;
    let best = ensemble
        .models
        .iter()
        .min_by(|a, b| a.final_loss().partial_cmp(&b.final_loss()).unwrap())
        .ok_or_else(|| Error::NonConvergence("no fit converged".into()))?;
    write_model(&args.out, ds.dims(), best)?;
    println!(
        "wrote {} (mode {}, loss {:.6e}, {} iterations, converged: {})",
        args.out.display(),
        best.options.mode.as_str(),
        best.final_loss(),
        best.iterations,
        best.converged
    );
    Ok(())
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<(), Error> {
    let mut spec: BenchmarkSpec = match &args.config {
        Some(path) => load_json(path)?,
        None => BenchmarkSpec::default_desk_scale(),
    };
    if let Some(n) = args.fits_per_cell {
        spec.fits_per_cell = n;
    }
    let csv = run_benchmark(&spec, &args.out)?;
    println!("wrote {}", csv.display());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), Error> {
    for path in write_report(&args.results, &args.out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Benchmark(args) => cmd_benchmark(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err @ (Error::InvalidConfig(_) | Error::Json(_))) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
