//! Run configuration: command-line flags layered over an optional key-value file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use torsion_core::{BallGeometry, Constraint, Medium};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintArg {
    Volume,
    Perimeter,
}

impl From<ConstraintArg> for Constraint {
    fn from(c: ConstraintArg) -> Self {
        match c {
            ConstraintArg::Volume => Constraint::Volume,
            ConstraintArg::Perimeter => Constraint::Perimeter,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Key-value configuration file (`key = value` per line); flags take precedence.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Space dimension N >= 2.
    #[arg(long)]
    pub dim: Option<u32>,
    /// Radius of the inclusion, 0 < R < 1.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Conductivity inside the inclusion.
    #[arg(long = "sigma-in")]
    pub sigma_in: Option<f64>,
    /// Conductivity outside the inclusion.
    #[arg(long = "sigma-out")]
    pub sigma_out: Option<f64>,
    #[arg(long, value_enum)]
    pub constraint: Option<ConstraintArg>,
    /// Largest mode index.
    #[arg(long)]
    pub kmax: Option<u32>,
    /// Coarsest finite-element mesh size.
    #[arg(long = "mesh-h")]
    pub mesh_h: Option<f64>,
    /// Largest perturbation amplitude in the fit window.
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Number of amplitudes in the fit window.
    #[arg(long = "n-t")]
    pub n_t: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Values read from a configuration file. Keys use underscores.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dim: Option<u32>,
    radius: Option<f64>,
    sigma_in: Option<f64>,
    sigma_out: Option<f64>,
    constraint: Option<ConstraintArg>,
    kmax: Option<u32>,
    mesh_h: Option<f64>,
    t_max: Option<f64>,
    n_t: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub dim: u32,
    pub radius: f64,
    pub sigma_in: f64,
    pub sigma_out: f64,
    pub constraint: Constraint,
    pub kmax: u32,
    pub mesh_h: f64,
    pub t_max: f64,
    pub n_t: usize,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// Per-command fallbacks for values given neither on the command line nor in a file.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub kmax: u32,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, defaults: Defaults) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let cfg = RunConfig {
            dim: args.dim.or(file.dim).unwrap_or(2),
            radius: args.radius.or(file.radius).unwrap_or(0.5),
            sigma_in: args.sigma_in.or(file.sigma_in).unwrap_or(2.0),
            sigma_out: args.sigma_out.or(file.sigma_out).unwrap_or(1.0),
            constraint: args
                .constraint
                .or(file.constraint)
                .unwrap_or(ConstraintArg::Volume)
                .into(),
            kmax: args.kmax.or(file.kmax).unwrap_or(defaults.kmax),
            mesh_h: args.mesh_h.or(file.mesh_h).unwrap_or(0.01),
            t_max: args.t_max.or(file.t_max).unwrap_or(0.03),
            n_t: args.n_t.or(file.n_t).unwrap_or(9),
            format: args.format.or(file.format).unwrap_or(defaults.format),
            out: args.out.clone().or(file.out),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.geometry()?;
        self.medium()?;
        if self.kmax < 1 {
            return Err(CliError::Usage("--kmax must be at least 1".into()));
        }
        if !(self.mesh_h > 0.0 && self.mesh_h.is_finite()) {
            return Err(CliError::Usage(format!(
                "--mesh-h must be positive, got {}",
                self.mesh_h
            )));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(CliError::Usage(format!(
                "--t-max must be positive, got {}",
                self.t_max
            )));
        }
        if self.n_t < 5 {
            return Err(CliError::Usage(format!(
                "--n-t must be at least 5, got {}",
                self.n_t
            )));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<BallGeometry, CliError> {
        BallGeometry::new(self.dim, self.radius).map_err(CliError::from_core)
    }

    pub fn medium(&self) -> Result<Medium, CliError> {
        Medium::new(self.sigma_in, self.sigma_out).map_err(CliError::from_core)
    }
}
