//! `marspec` — estimate and identify causal, noncausal, and mixed
//! autoregressions from the command line.
//!
//! Subcommands wrap the library modules one-for-one: `simulate` draws
//! stable-innovation series, `estimate` fits one candidate shape, `identify`
//! scans every shape of a total order, `montecarlo` runs replication
//! campaigns from a TOML config, `ingest` prepares empirical series
//! (Hodrick–Prescott cycle or log returns) with diagnostics, `rt-surface`
//! grids the criterion over a coefficient plane, and `dump-spectra` exports
//! periodograms, biperiodograms, and their model counterparts for plotting.
//!
//! Every run writes a JSON manifest (command, flags, seed, input hashes,
//! outputs) and each output references it. Data outputs are deterministic
//! given `--seed` and inputs, independent of `--threads`. Log verbosity is
//! controlled by `RUST_LOG` only.

mod cmd_dump_spectra;
mod cmd_estimate;
mod cmd_identify;
mod cmd_ingest;
mod cmd_montecarlo;
mod cmd_rt_surface;
mod cmd_simulate;
mod manifest;

use clap::{Parser, Subcommand};
use marspec::Error;

#[derive(Parser)]
#[command(name = "marspec", version, about = "Frequency-domain identification of mixed causal-noncausal autoregressions")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores). Results
    /// never depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic series from an autoregression with alpha-stable innovations.
    Simulate(cmd_simulate::SimulateArgs),
    /// Fit one candidate shape (r, s) to a series by criterion minimization.
    Estimate(cmd_estimate::EstimateArgs),
    /// Estimate every shape with r + s = p and select the smallest criterion.
    Identify(cmd_identify::IdentifyArgs),
    /// Run replication campaigns from a TOML config; emit rate and coefficient tables.
    Montecarlo(cmd_montecarlo::MontecarloArgs),
    /// Load a CSV column, transform it (HP cycle or log returns), and report diagnostics.
    Ingest(cmd_ingest::IngestArgs),
    /// Evaluate the criterion over a (phi, varphi) grid for surface plots.
    RtSurface(cmd_rt_surface::RtSurfaceArgs),
    /// Export empirical or model spectra and bispectra as CSV grids.
    DumpSpectra(cmd_dump_spectra::DumpSpectraArgs),
}

/// Stable exit codes per error class, so scripts can react to failures:
/// 2 flag/usage (from the parser), 3 I/O, 4 data validation,
/// 5 model/parameter, 6 estimation.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Csv(_) => 3,
        Error::BadRow { .. }
        | Error::MissingColumn { .. }
        | Error::NonFiniteData { .. }
        | Error::SeriesTooShort { .. }
        | Error::ZeroVariance => 4,
        Error::EmptyOrder
        | Error::DegenerateOrder { .. }
        | Error::NonStationary { .. }
        | Error::UnitRootBoundary { .. }
        | Error::RootPartition { .. }
        | Error::ComplexResidual { .. }
        | Error::InvalidParameter(_) => 5,
        Error::PreliminaryFit(_)
        | Error::Quadrature(_)
        | Error::InfeasibleStart
        | Error::NoConvergedCandidate => 6,
    }
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: could not size the thread pool: {e}");
            std::process::exit(5);
        }
    }
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate::run(args),
        Command::Estimate(args) => cmd_estimate::run(args),
        Command::Identify(args) => cmd_identify::run(args),
        Command::Montecarlo(args) => cmd_montecarlo::run(args),
        Command::Ingest(args) => cmd_ingest::run(args),
        Command::RtSurface(args) => cmd_rt_surface::run(args),
        Command::DumpSpectra(args) => cmd_dump_spectra::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
