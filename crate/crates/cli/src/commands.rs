use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use torsion_core::analytic::{classify, q_perimeter, q_volume, quadratic_form, Verdict};
use torsion_core::fem2d::{
    admissible_window, build_family, estimate_q, EnergyFit, FemOptions, MeshLevel,
};
use torsion_core::radial::{self, RadialGrid};
use torsion_core::{
    torsional_rigidity_concentric, BallGeometry, Constraint, Medium, StressProfile,
};

use crate::config::{CommonArgs, Defaults, Format, RunConfig};
use crate::error::CliError;
use crate::report::{fmt_f64, fmt_opt, CsvRows, Report};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModeValue {
    pub k: u64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyResult {
    pub constraint: Constraint,
    pub verdict: Verdict,
    pub critical_mode: Option<u64>,
    /// `Q(1)`, or `Q̃(1)` under the perimeter constraint (the two coincide).
    pub q_first: f64,
    pub q_at_critical: Option<ModeValue>,
    /// Values far out in the spectrum, showing the sign the form settles on.
    pub tail: Vec<ModeValue>,
}

impl CsvRows for ClassifyResult {
    fn header(&self) -> Vec<&'static str> {
        vec!["constraint", "verdict", "critical_mode", "q_first"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.constraint.to_string(),
            format!("{:?}", self.verdict),
            fmt_opt(self.critical_mode),
            fmt_f64(self.q_first),
        ]]
    }
}

const TAIL_MODES: [u64; 3] = [10, 100, 1000];

fn core<T>(r: torsion_core::Result<T>) -> Result<T, CliError> {
    r.map_err(CliError::from_core)
}

pub fn cmd_classify(config: RunConfig) -> Result<Report<ClassifyResult>, CliError> {
    let geom = config.geometry()?;
    let medium = config.medium()?;
    let c = core(classify(&geom, &medium, config.constraint))?;
    let q =
        |k: u64| core(quadratic_form(&geom, &medium, config.constraint, k as f64)).map(|v| v.value);
    let q_at_critical = match c.critical_mode {
        Some(k) => Some(ModeValue { k, value: q(k)? }),
        None => None,
    };
    let tail = TAIL_MODES
        .iter()
        .map(|&k| Ok(ModeValue { k, value: q(k)? }))
        .collect::<Result<_, CliError>>()?;
    let result = ClassifyResult {
        constraint: config.constraint,
        verdict: c.verdict,
        critical_mode: c.critical_mode,
        q_first: q(1)?,
        q_at_critical,
        tail,
    };
    Ok(Report::new("classify", config, result))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QCurveRow {
    pub k: u32,
    pub q_volume: f64,
    pub q_perimeter: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QCurve {
    pub rows: Vec<QCurveRow>,
}

impl CsvRows for QCurve {
    fn header(&self) -> Vec<&'static str> {
        vec!["k", "q_volume", "q_perimeter"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![r.k.to_string(), fmt_f64(r.q_volume), fmt_f64(r.q_perimeter)])
            .collect()
    }
}

pub fn cmd_qcurve(config: RunConfig) -> Result<Report<QCurve>, CliError> {
    let geom = config.geometry()?;
    let medium = config.medium()?;
    let rows = (1..=config.kmax)
        .map(|k| {
            Ok(QCurveRow {
                k,
                q_volume: core(q_volume(&geom, &medium, k as f64))?.value,
                q_perimeter: core(q_perimeter(&geom, &medium, k as f64))?.value,
            })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(Report::new("qcurve", config, QCurve { rows }))
}

/// Grid of the `(rho, R)` phase map.
#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long = "rho-min", default_value_t = 0.1)]
    pub rho_min: f64,
    #[arg(long = "rho-max", default_value_t = 10.0)]
    pub rho_max: f64,
    #[arg(long = "n-rho", default_value_t = 10)]
    pub n_rho: usize,
    #[arg(long = "r-min", default_value_t = 0.1)]
    pub r_min: f64,
    #[arg(long = "r-max", default_value_t = 0.9)]
    pub r_max: f64,
    #[arg(long = "n-r", default_value_t = 10)]
    pub n_r: usize,
}

impl Default for SweepArgs {
    fn default() -> Self {
        Self {
            rho_min: 0.1,
            rho_max: 10.0,
            n_rho: 10,
            r_min: 0.1,
            r_max: 0.9,
            n_r: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepCell {
    pub index: usize,
    pub rho: f64,
    pub radius: f64,
    pub verdict: Verdict,
    pub critical_mode: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub constraint: Constraint,
    pub cells: Vec<SweepCell>,
}

impl CsvRows for Sweep {
    fn header(&self) -> Vec<&'static str> {
        vec!["index", "rho", "radius", "verdict", "critical_mode"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.cells
            .iter()
            .map(|c| {
                vec![
                    c.index.to_string(),
                    fmt_f64(c.rho),
                    fmt_f64(c.radius),
                    format!("{:?}", c.verdict),
                    fmt_opt(c.critical_mode),
                ]
            })
            .collect()
    }
}

/// `n` points from `a` to `b`, geometric when `log` is set.
fn spaced(a: f64, b: f64, n: usize, log: bool) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            if log {
                10f64.powf(a.log10() + s * (b.log10() - a.log10()))
            } else {
                a + s * (b - a)
            }
        })
        .collect()
}

pub fn cmd_sweep(config: RunConfig, grid: &SweepArgs) -> Result<Report<Sweep>, CliError> {
    if grid.n_rho == 0 || grid.n_r == 0 {
        return Err(CliError::Usage(
            "sweep grid needs at least one point per axis".into(),
        ));
    }
    if !(grid.rho_min > 0.0 && grid.rho_max >= grid.rho_min) {
        return Err(CliError::Usage("need 0 < rho-min <= rho-max".into()));
    }
    let rhos = spaced(grid.rho_min, grid.rho_max, grid.n_rho, true);
    let radii = spaced(grid.r_min, grid.r_max, grid.n_r, false);
    let points: Vec<(f64, f64)> = rhos
        .iter()
        .flat_map(|&rho| radii.iter().map(move |&r| (rho, r)))
        .collect();
    let cells = points
        .par_iter()
        .enumerate()
        .map(|(index, &(rho, radius))| {
            let geom = core(BallGeometry::new(config.dim, radius))?;
            let medium = core(Medium::new(rho * config.sigma_out, config.sigma_out))?;
            let c = core(classify(&geom, &medium, config.constraint))?;
            Ok(SweepCell {
                index,
                rho,
                radius,
                verdict: c.verdict,
                critical_mode: c.critical_mode,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let constraint = config.constraint;
    Ok(Report::new("sweep", config, Sweep { constraint, cells }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Radial,
    Fem,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Cell count for the radial solver.
    #[arg(long, default_value_t = 4096)]
    pub cells: usize,
    /// Number of finite-element mesh levels (h, h/2, ...).
    #[arg(long, default_value_t = 2)]
    pub levels: usize,
}

impl Default for VerifyArgs {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            cells: 4096,
            levels: 2,
        }
    }
}

/// Relative tolerances of the finite-element comparison.
pub const FEM_VOLUME_TOLERANCE: f64 = 0.10;
pub const FEM_PERIMETER_TOLERANCE: f64 = 0.15;
pub const RADIAL_MAX_REL_ERROR: f64 = 1e-6;
pub const RADIAL_ENERGY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct RadialRecord {
    pub dim: u32,
    pub radius: f64,
    pub rho: f64,
    pub cells: usize,
    pub max_rel_error: f64,
    pub order: f64,
    pub energy_rel_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FemRecordConfig {
    pub dim: u32,
    pub radius: f64,
    pub sigma_in: f64,
    pub sigma_out: f64,
    pub constraint: Constraint,
    pub k: u32,
    pub mesh_h: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FemRecord {
    pub config: FemRecordConfig,
    pub mesh_levels: Vec<MeshLevel>,
    pub t_samples: Vec<f64>,
    pub energies: Vec<Vec<f64>>,
    pub fit: EnergyFit,
    pub q_estimate: f64,
    pub q_analytic: f64,
    pub rel_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub radial: Vec<RadialRecord>,
    pub fem: Vec<FemRecord>,
    pub pass: bool,
}

impl CsvRows for Verification {
    fn header(&self) -> Vec<&'static str> {
        vec!["suite", "case", "measured_error", "pass"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        let radial = self.radial.iter().map(|r| {
            vec![
                "radial".to_string(),
                format!("N={} R={} rho={} n={}", r.dim, r.radius, r.rho, r.cells),
                fmt_f64(r.max_rel_error),
                r.pass.to_string(),
            ]
        });
        let fem = self.fem.iter().map(|r| {
            vec![
                "fem".to_string(),
                format!(
                    "{} k={} h={}",
                    r.config.constraint, r.config.k, r.config.mesh_h
                ),
                fmt_f64(r.rel_error),
                r.pass.to_string(),
            ]
        });
        radial.chain(fem).collect()
    }
}

pub fn verify_radial(
    geom: &BallGeometry,
    medium: &Medium,
    cells: usize,
) -> Result<RadialRecord, CliError> {
    core(RadialGrid::new(geom.radius(), cells))?;
    let exact = StressProfile::new(*geom, *medium);
    let sol = core(radial::solve_radial(geom, medium, cells))?;
    let scale = exact.value(0.0);
    let max_rel_error = sol.max_error(|r| exact.value(r)) / scale;
    let order = core(radial::observed_order(geom, medium, cells / 2))?;
    let e = core(radial::richardson_energy(geom, medium, cells))?;
    let e_exact = torsional_rigidity_concentric(geom, medium);
    let energy_rel_error = (e - e_exact).abs() / e_exact;
    let pass = max_rel_error <= RADIAL_MAX_REL_ERROR
        && (1.8..=2.2).contains(&order)
        && energy_rel_error <= RADIAL_ENERGY_TOLERANCE;
    Ok(RadialRecord {
        dim: geom.dim(),
        radius: geom.radius(),
        rho: medium.rho(),
        cells,
        max_rel_error,
        order,
        energy_rel_error,
        pass,
    })
}

pub fn verify_fem(config: &RunConfig, k: u32, levels: usize) -> Result<FemRecord, CliError> {
    let geom = config.geometry()?;
    let medium = config.medium()?;
    let family = core(build_family(&geom, k, config.constraint))?;
    let window = admissible_window(&family, &FemOptions::window(config.t_max, config.n_t));
    let options = FemOptions {
        h: config.mesh_h,
        levels,
        t_samples: window,
        ..FemOptions::default()
    };
    let est = core(estimate_q(&geom, &medium, k, config.constraint, &options))?;
    let fit = *est.finest_fit();
    let tolerance = match config.constraint {
        Constraint::Volume => FEM_VOLUME_TOLERANCE,
        Constraint::Perimeter => FEM_PERIMETER_TOLERANCE,
    };
    let critical =
        config.constraint == Constraint::Perimeter || fit.c1.abs() <= 3.0 * fit.c1_std_error;
    let pass = if medium.is_single_phase() {
        est.relative_energy_variation() <= 1e-6
    } else {
        est.rel_error <= tolerance && critical
    };
    Ok(FemRecord {
        config: FemRecordConfig {
            dim: geom.dim(),
            radius: geom.radius(),
            sigma_in: medium.sigma_minus(),
            sigma_out: medium.sigma_plus(),
            constraint: config.constraint,
            k,
            mesh_h: config.mesh_h,
        },
        mesh_levels: est.mesh_levels,
        t_samples: est.t_samples,
        energies: est.energies,
        fit,
        q_estimate: est.q_estimate,
        q_analytic: est.q_analytic,
        rel_error: est.rel_error,
        pass,
    })
}

pub fn cmd_verify(config: RunConfig, args: &VerifyArgs) -> Result<Report<Verification>, CliError> {
    let geom = config.geometry()?;
    let medium = config.medium()?;
    let run_radial = matches!(args.suite, Suite::Radial | Suite::All);
    let run_fem = match args.suite {
        Suite::Fem if config.dim != 2 => {
            return Err(CliError::Usage(
                "the finite-element suite requires --dim 2".into(),
            ))
        }
        Suite::Fem => true,
        Suite::All => config.dim == 2,
        Suite::Radial => false,
    };
    let radial = if run_radial {
        vec![verify_radial(&geom, &medium, args.cells)?]
    } else {
        Vec::new()
    };
    let fem = if run_fem {
        (1..=config.kmax)
            .map(|k| verify_fem(&config, k, args.levels))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let pass = radial.iter().all(|r| r.pass) && fem.iter().all(|r| r.pass);
    Ok(Report::new(
        "verify",
        config,
        Verification { radial, fem, pass },
    ))
}

pub const CLASSIFY_DEFAULTS: Defaults = Defaults {
    kmax: 50,
    format: Format::Json,
};
pub const QCURVE_DEFAULTS: Defaults = Defaults {
    kmax: 50,
    format: Format::Csv,
};
pub const SWEEP_DEFAULTS: Defaults = CLASSIFY_DEFAULTS;
pub const VERIFY_DEFAULTS: Defaults = Defaults {
    kmax: 3,
    format: Format::Json,
};

pub fn resolve(args: &CommonArgs, defaults: Defaults) -> Result<RunConfig, CliError> {
    RunConfig::resolve(args, defaults)
}
