//! `dcqt` — command-line front end for the driven-comb quantum
//! thermometry library.
//!
//! Every tabular command emits byte-deterministic CSV (17 significant
//! digits, `.` decimal separator, `\n` line endings) or pretty JSON via
//! `--format`. Grid scans parallelize across temperatures; row order is
//! independent of the worker count.

mod commands;
mod output;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dcqt::config::Config;
use dcqt::{Error, Result};

use commands::{Figure, Format};

#[derive(Parser)]
#[command(name = "dcqt", version, about = "Sensitivity analysis of periodically driven thermometer probes", long_about = None)]
struct Cli {
    /// Path to the JSON configuration document.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for grid scans (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Override the sideband cutoff `M` (keep lines with `|m| <= M`).
    #[arg(long, global = true, value_name = "M")]
    sidebands: Option<u32>,

    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose the configured drive into its sideband comb.
    Sidebands,
    /// Stationary level populations of the driven probe.
    SteadyState,
    /// Quantum Fisher information across the configured temperature grid.
    QfiScan,
    /// Relative-error bound across the grid (or at a single temperature).
    ErrorBound,
    /// Integrate the master equation and check relaxation to the
    /// predicted stationary state; the exit status reflects the check.
    LindbladVerify,
    /// Search for the drive that maximizes sensitivity at the target
    /// temperature(s). Always emits JSON.
    Optimize,
    /// Emit one of the built-in study datasets.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

fn load_config(cli: &Cli) -> Result<Config> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("this command needs --config <PATH>".into()))?;
    Config::from_path(path)
}

fn emit(cli: &Cli, rendered: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(rendered.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(Error::Io)
        }
    }
}

/// Runs the chosen command; the bool is false when a verification
/// command completed but its check failed.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Sidebands => {
            let cfg = load_config(cli)?;
            emit(cli, &commands::cmd_sidebands(&cfg, cli.sidebands, cli.format)?)?;
        }
        Command::SteadyState => {
            let cfg = load_config(cli)?;
            emit(cli, &commands::cmd_steady_state(&cfg, cli.sidebands, cli.format)?)?;
        }
        Command::QfiScan => {
            let cfg = load_config(cli)?;
            emit(cli, &commands::cmd_qfi_scan(&cfg, cli.sidebands, cli.workers, cli.format)?)?;
        }
        Command::ErrorBound => {
            let cfg = load_config(cli)?;
            emit(cli, &commands::cmd_error_bound(&cfg, cli.sidebands, cli.workers, cli.format)?)?;
        }
        Command::LindbladVerify => {
            let cfg = load_config(cli)?;
            let outcome = commands::cmd_lindblad_verify(&cfg, cli.sidebands, cli.format)?;
            emit(cli, &outcome.rendered)?;
            if outcome.passed {
                eprintln!(
                    "PASS: final trace distance {:e} < {:e}",
                    outcome.final_trace_distance, outcome.threshold
                );
            } else {
                eprintln!(
                    "FAIL: final trace distance {:e} >= {:e}",
                    outcome.final_trace_distance, outcome.threshold
                );
            }
            return Ok(outcome.passed);
        }
        Command::Optimize => {
            let cfg = load_config(cli)?;
            emit(cli, &commands::cmd_optimize(&cfg)?)?;
        }
        Command::Reproduce { figure } => {
            emit(cli, &commands::cmd_reproduce(*figure, cli.workers, cli.format)?)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
