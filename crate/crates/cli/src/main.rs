//! `lll-lab`: config-driven runs of the Fock, limit and shell systems.
//!
//! Exit codes: 0 success, 2 config error, 3 numerical failure.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod setup;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::Common;
use crate::config::Mode;
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "lll-lab",
    version,
    about = "Numerical lab for the LLL equation and its limit systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Flags {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Right-hand side variant for limit/shell systems (overrides system.mode).
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Seed for random initial data.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Fock,
    Limit,
    Shell,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Fock => "fock",
            Kind::Limit => "limit",
            Kind::Shell => "shell",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the truncated LLL flow in Fock coefficients.
    SimulateFock(Flags),
    /// Integrate the limit system on a dyadic grid.
    SimulateLimit(Flags),
    /// Integrate the dyadic shell model.
    SimulateShell(Flags),
    /// Tabulate exact Hamiltonian pieces against their limiting integrals.
    VerifyAsymptotics(Flags),
    /// Compare the right-hand side with the finite-difference gradient of H.
    CheckGradients(Flags),
    /// Print equations, mode, constants and grid of a system.
    Describe {
        /// System to describe when no config is given (default: all three).
        #[arg(value_enum)]
        system: Option<Kind>,
        #[command(flatten)]
        flags: Flags,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Describe { system, flags } = &cli.command {
        let cfg = flags.config.as_deref().map(config::load).transpose()?;
        return commands::describe(cfg.as_ref(), system.map(Kind::name), &common(flags));
    }
    let flags = match &cli.command {
        Command::SimulateFock(f)
        | Command::SimulateLimit(f)
        | Command::SimulateShell(f)
        | Command::VerifyAsymptotics(f)
        | Command::CheckGradients(f) => f,
        Command::Describe { .. } => unreachable!(),
    };
    let path = flags
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let cfg = config::load(path)?;
    let opts = common(flags);
    match &cli.command {
        Command::SimulateFock(_) => commands::simulate(&cfg, "fock", &opts),
        Command::SimulateLimit(_) => commands::simulate(&cfg, "limit", &opts),
        Command::SimulateShell(_) => commands::simulate(&cfg, "shell", &opts),
        Command::VerifyAsymptotics(_) => commands::verify_asymptotics(&cfg, &opts),
        Command::CheckGradients(_) => commands::check_gradients(&cfg, &opts),
        Command::Describe { .. } => unreachable!(),
    }
}

fn common(flags: &Flags) -> Common {
    Common {
        out: flags.out.clone(),
        mode: flags.mode,
        seed: flags.seed,
        quiet: flags.quiet,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lll-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
