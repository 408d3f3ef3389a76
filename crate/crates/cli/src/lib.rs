//! Batch front end: classification, `Q(k)` curves, phase sweeps and oracle
//! verification, written as JSON reports or CSV tables.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use clap::{Parser, Subcommand};

use crate::commands::{SweepArgs, VerifyArgs};
use crate::config::CommonArgs;
pub use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "torsion",
    version,
    about = "Second-order shape analysis of two-phase torsion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the concentric ball as a critical shape.
    Classify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tabulate Q(k) and Q̃(k) for k = 1..kmax.
    Qcurve {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Classification over a (rho, R) grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: SweepArgs,
    },
    /// Run the radial and/or finite-element oracles against the closed forms.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        verify: VerifyArgs,
    },
}

/// Executes a parsed command line. A failed verification counts as a
/// numerical failure.
pub fn run(cli: Cli) -> Result<(), CliError> {
    use commands::*;
    match cli.command {
        Command::Classify { common } => {
            let report = cmd_classify(resolve(&common, CLASSIFY_DEFAULTS)?)?;
            report.emit()
        }
        Command::Qcurve { common } => cmd_qcurve(resolve(&common, QCURVE_DEFAULTS)?)?.emit(),
        Command::Sweep { common, grid } => {
            cmd_sweep(resolve(&common, SWEEP_DEFAULTS)?, &grid)?.emit()
        }
        Command::Verify { common, verify } => {
            let report = cmd_verify(resolve(&common, VERIFY_DEFAULTS)?, &verify)?;
            report.emit()?;
            if report.result.pass {
                Ok(())
            } else {
                Err(CliError::Numerical("verification failed".into()))
            }
        }
    }
}
