//! `chancoh`: channel coherence monotones from the command line.
//!
//! Exit codes: 0 success, 1 invariant violation, 2 input error, 3 numerical
//! failure.

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "chancoh",
    version,
    about = "Coherence monotones of quantum channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report the monotones and rate bounds of a channel file.
    Analyze {
        path: PathBuf,
        /// Ancilla dimension of the boosting search [default: channel input dimension]
        #[arg(long)]
        ancilla_dim: Option<usize>,
        /// Random starts of the boosting search.
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Convergence tolerance of the SDP solver.
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate c_r_i and the boosting bound for qubit rotations.
    SweepRotation {
        #[arg(long, default_value_t = 0.0)]
        theta_min: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        theta_max: f64,
        /// Number of grid points, endpoints included.
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 2)]
        ancilla_dim: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Diamond distance between two channel files.
    Diamond { first: PathBuf, second: PathBuf },
    /// Run every invariant suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples per check [default: each check's own count]
        #[arg(long)]
        trials: Option<usize>,
        /// Where the worst violation is written on failure.
        #[arg(long, default_value = "chancoh-verify-diagnostics.json")]
        diagnostics: PathBuf,
        #[arg(
            long,
            hide = true,
            allow_negative_numbers = true,
            default_value_t = 1.0
        )]
        corrupt_tolerance: f64,
    },
    /// Write a built-in channel as a channel file.
    Channel {
        kind: ChannelKind,
        /// Rotation angle for `rotation`.
        #[arg(long, default_value_t = std::f64::consts::PI / 10.0)]
        theta: f64,
        /// Dimension for `identity`, `dephasing` and `max-coherent`.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ChannelKind {
    Rotation,
    Hadamard,
    PauliX,
    Identity,
    Dephasing,
    /// Constant channel onto the maximally coherent state.
    MaxCoherent,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze {
            path,
            ancilla_dim,
            restarts,
            seed,
            tolerance,
            out,
        } => commands::analyze(
            &path,
            ancilla_dim,
            restarts,
            seed,
            tolerance,
            out.as_deref(),
        ),
        Command::SweepRotation {
            theta_min,
            theta_max,
            steps,
            ancilla_dim,
            restarts,
            seed,
            out,
        } => commands::sweep_rotation(
            theta_min,
            theta_max,
            steps,
            ancilla_dim,
            restarts,
            seed,
            &out,
        ),
        Command::Diamond { first, second } => commands::diamond(&first, &second),
        Command::Verify {
            seed,
            trials,
            diagnostics,
            corrupt_tolerance,
        } => commands::verify(seed, trials, &diagnostics, corrupt_tolerance),
        Command::Channel {
            kind,
            theta,
            dim,
            out,
        } => commands::export_channel(kind, theta, dim, out.as_deref()),
    };
    match outcome {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
