use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mhd1d_cli::{commands, exit_code, CliError};

#[derive(Parser)]
#[command(name = "mhd1d", version, about = "Planar compressible MHD solver and estimate harness")]
struct Cli {
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured problem and write series, snapshots and reports.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence study of the configured manufactured case.
    Mms {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Roots of `z - ln z - 1 = e0` and the level-set measure bound.
    Roots {
        #[arg(allow_negative_numbers = true)]
        e0: f64,
    },
    /// Compare `v` with its representation from a probe node.
    Reconstruct {
        config: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        probe: f64,
        #[arg(long)]
        at: f64,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out } => {
            commands::cmd_run(&config, out.as_deref(), cli.quiet).map(|_| ())
        }
        Command::Mms { config, levels, out } => {
            commands::cmd_mms(&config, levels, out.as_deref(), cli.quiet).map(|_| ())
        }
        Command::Roots { e0 } => commands::cmd_roots(e0),
        Command::Reconstruct { config, probe, at } => {
            commands::cmd_reconstruct(&config, probe, at, cli.quiet).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let result = dispatch(cli);
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    exit_code(&result)
}
