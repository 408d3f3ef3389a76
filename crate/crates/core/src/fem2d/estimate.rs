use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::family::{build_family, PerturbationFamily};
use super::mesh::ReferenceMesh;
use super::solver::{assemble_solve_with, energy, Energies, DEFAULT_RELATIVE_RESIDUAL};
use crate::analytic::quadratic_form;
use crate::error::{Error, Result};
use crate::params::{BallGeometry, Constraint, Medium};

/// Default amplitude window; scaled down when it exceeds the admissible range.
pub const DEFAULT_T_SAMPLES: [f64; 9] = [-0.03, -0.02, -0.01, -0.005, 0.0, 0.005, 0.01, 0.02, 0.03];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemOptions {
    /// Coarsest target element size.
    pub h: f64,
    /// Number of mesh levels `h, h/2, h/4, ...` (at least two).
    pub levels: usize,
    /// Amplitudes, symmetric about zero.
    pub t_samples: Vec<f64>,
    /// Largest accepted root-mean-square fit residual, relative to `E(0)`.
    pub max_relative_residual: f64,
    pub solver_tolerance: f64,
}

impl Default for FemOptions {
    fn default() -> Self {
        Self {
            h: 0.01,
            levels: 2,
            t_samples: DEFAULT_T_SAMPLES.to_vec(),
            max_relative_residual: 1e-8,
            solver_tolerance: DEFAULT_RELATIVE_RESIDUAL,
        }
    }
}

impl FemOptions {
    /// Symmetric window of `count` amplitudes (odd counts include `t = 0`),
    /// geometrically spaced from `t_max / 6` up to `t_max`.
    pub fn window(t_max: f64, count: usize) -> Vec<f64> {
        let half = count / 2;
        let mut pos: Vec<f64> = match half {
            0 => Vec::new(),
            1 => vec![t_max],
            _ => (0..half)
                .map(|i| t_max * 6f64.powf(i as f64 / (half - 1) as f64 - 1.0))
                .collect(),
        };
        pos.sort_by(f64::total_cmp);
        let mut all: Vec<f64> = pos.iter().rev().map(|t| -t).collect();
        if count % 2 == 1 {
            all.push(0.0);
        }
        all.extend(pos);
        all
    }
}

/// Least-squares fit `E(t) ≈ e0 + c1 t + c2 t² + c4 t⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyFit {
    pub e0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c4: f64,
    pub c1_std_error: f64,
    pub c2_std_error: f64,
    pub residual_rms: f64,
}

pub fn fit_energy_curve(t: &[f64], e: &[f64]) -> Result<EnergyFit> {
    const P: usize = 4;
    if t.len() != e.len() || t.len() < P + 1 {
        return Err(Error::IllConditionedFit(format!(
            "need at least {} paired samples, got {} amplitudes and {} energies",
            P + 1,
            t.len(),
            e.len()
        )));
    }
    let n = t.len();
    let scale = t.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::IllConditionedFit("all amplitudes are zero".into()));
    }
    let mean = e.iter().sum::<f64>() / n as f64;
    let x = DMatrix::from_fn(n, P, |i, j| {
        let s = t[i] / scale;
        match j {
            0 => 1.0,
            1 => s,
            2 => s * s,
            _ => s.powi(4),
        }
    });
    let y = DVector::from_iterator(n, e.iter().map(|v| v - mean));
    let normal = x.transpose() * &x;
    let inverse = normal.clone().try_inverse().ok_or_else(|| {
        Error::IllConditionedFit("normal matrix is singular; amplitudes are not distinct".into())
    })?;
    let beta = x
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|msg| Error::IllConditionedFit(msg.to_string()))?;
    let residual = &y - &x * &beta;
    let rss = residual.norm_squared();
    let dof = (n - P) as f64;
    let variance = rss / dof;
    let se = |j: usize| (variance * inverse[(j, j)]).sqrt();
    Ok(EnergyFit {
        e0: beta[0] + mean,
        c1: beta[1] / scale,
        c2: beta[2] / scale.powi(2),
        c4: beta[3] / scale.powi(4),
        c1_std_error: se(1) / scale,
        c2_std_error: se(2) / scale.powi(2),
        residual_rms: (rss / n as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshLevel {
    pub h: f64,
    pub nodes: usize,
    pub triangles: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemEstimate {
    pub family: PerturbationFamily,
    pub medium: Medium,
    pub mesh_levels: Vec<MeshLevel>,
    pub t_samples: Vec<f64>,
    /// `∫u_h` per level, per amplitude.
    pub energies: Vec<Vec<f64>>,
    /// `∫σ|∇u_h|²` per level, per amplitude.
    pub dirichlet_energies: Vec<Vec<f64>>,
    /// Fit per level.
    pub fits: Vec<EnergyFit>,
    /// Richardson extrapolation of the `t²` coefficient over the two finest levels.
    pub q_estimate: f64,
    pub q_analytic: f64,
    pub rel_error: f64,
    /// `|c2(h_i) - c2(h_{i+1})| / |c2(h_{i+1}) - c2(h_{i+2})|`, present with three or more levels.
    pub refinement_ratios: Vec<f64>,
}

impl FemEstimate {
    /// Fit on the finest level.
    pub fn finest_fit(&self) -> &EnergyFit {
        self.fits.last().expect("at least two levels")
    }

    /// Largest relative spread of `E(t)` around its mean on the finest level.
    pub fn relative_energy_variation(&self) -> f64 {
        let e = self.energies.last().expect("at least two levels");
        let max = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = e.iter().cloned().fold(f64::INFINITY, f64::min);
        (max - min) / (0.5 * (max + min)).abs()
    }
}

fn validate_samples(family: &PerturbationFamily, t: &[f64]) -> Result<()> {
    if t.len() < 5 {
        return Err(Error::invalid(
            "t_samples",
            format!("need at least 5 amplitudes, got {}", t.len()),
        ));
    }
    for &v in t {
        family.check(v)?;
        if !t.iter().any(|&w| (w + v).abs() <= 1e-15 * v.abs().max(1.0)) {
            return Err(Error::invalid(
                "t_samples",
                format!("window is not symmetric: {v} has no mirror image"),
            ));
        }
    }
    Ok(())
}

/// Rescales a window so that it fits strictly inside the admissible range.
pub fn admissible_window(family: &PerturbationFamily, t: &[f64]) -> Vec<f64> {
    let largest = t.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let limit = 0.9 * family.max_amplitude();
    if largest <= limit {
        t.to_vec()
    } else {
        t.iter().map(|v| v * limit / largest).collect()
    }
}

/// Fits the `t²` coefficient of `E(t)` on every mesh level and extrapolates it.
pub fn estimate_q(
    geom: &BallGeometry,
    medium: &Medium,
    k: u32,
    constraint: Constraint,
    options: &FemOptions,
) -> Result<FemEstimate> {
    let family = build_family(geom, k, constraint)?;
    if options.levels < 2 {
        return Err(Error::invalid(
            "levels",
            "Richardson extrapolation needs two mesh levels",
        ));
    }
    validate_samples(&family, &options.t_samples)?;
    let t = &options.t_samples;

    let mut mesh_levels = Vec::with_capacity(options.levels);
    let mut energies = Vec::with_capacity(options.levels);
    let mut dirichlet_energies = Vec::with_capacity(options.levels);
    let mut fits = Vec::with_capacity(options.levels);
    for level in 0..options.levels {
        let h = options.h / 2f64.powi(level as i32);
        let reference = ReferenceMesh::new(geom.radius(), h)?;
        mesh_levels.push(MeshLevel {
            h,
            nodes: reference.node_count(),
            triangles: reference.triangle_count(),
        });
        let runs: Vec<Energies> =
            solve_window(&reference, &family, medium, t, options.solver_tolerance)?;
        let e: Vec<f64> = runs.iter().map(|r| r.integral).collect();
        let fit = fit_energy_curve(t, &e)?;
        if !(fit.residual_rms <= options.max_relative_residual * fit.e0.abs()) {
            return Err(Error::IllConditionedFit(format!(
                "h = {h}: rms residual {:e} exceeds {:e} (E0 = {}, c2 = {:e}, c4 = {:e}); shrink the amplitude window",
                fit.residual_rms,
                options.max_relative_residual * fit.e0.abs(),
                fit.e0,
                fit.c2,
                fit.c4
            )));
        }
        dirichlet_energies.push(runs.iter().map(|r| r.dirichlet).collect());
        energies.push(e);
        fits.push(fit);
    }

    let c2: Vec<f64> = fits.iter().map(|f| f.c2).collect();
    let (coarse, fine) = (c2[c2.len() - 2], c2[c2.len() - 1]);
    let q_estimate = fine + (fine - coarse) / 3.0;
    let q_analytic = quadratic_form(geom, medium, constraint, k as f64)?.value;
    let rel_error = if q_analytic != 0.0 {
        (q_estimate - q_analytic).abs() / q_analytic.abs()
    } else {
        q_estimate.abs()
    };
    let refinement_ratios = c2
        .windows(3)
        .map(|w| (w[0] - w[1]).abs() / (w[1] - w[2]).abs())
        .collect();

    Ok(FemEstimate {
        family,
        medium: *medium,
        mesh_levels,
        t_samples: t.clone(),
        energies,
        dirichlet_energies,
        fits,
        q_estimate,
        q_analytic,
        rel_error,
        refinement_ratios,
    })
}

/// Independent solves over the amplitude window, returned in input order.
fn solve_window(
    reference: &ReferenceMesh,
    family: &PerturbationFamily,
    medium: &Medium,
    t: &[f64],
    tol: f64,
) -> Result<Vec<Energies>> {
    use rayon::prelude::*;
    t.par_iter()
        .map(|&ti| {
            let mesh = reference.deform(&family.curve(ti)?)?;
            let sol = assemble_solve_with(&mesh, medium, tol)?;
            Ok(energy(&mesh, medium, &sol))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_polynomial() {
        let t = FemOptions::window(0.03, 9);
        let e: Vec<f64> = t
            .iter()
            .map(|&t| 0.3 + 2e-9 * t - 0.09 * t * t + 4.0 * t.powi(4))
            .collect();
        let f = fit_energy_curve(&t, &e).unwrap();
        assert!((f.e0 - 0.3).abs() < 1e-15);
        assert!((f.c2 + 0.09).abs() < 1e-10);
        assert!((f.c4 - 4.0).abs() < 1e-5);
        assert!((f.c1 - 2e-9).abs() < 1e-12);
    }

    #[test]
    fn window_shape() {
        let t = FemOptions::window(0.03, 9);
        assert_eq!(t.len(), 9);
        assert_eq!(t[4], 0.0);
        assert!((t[8] - 0.03).abs() < 1e-16);
        assert!((t[5] - 0.005).abs() < 1e-16);
        for i in 0..9 {
            assert_eq!(t[i], -t[8 - i]);
        }
    }

    #[test]
    fn fit_rejects_short_input() {
        assert!(fit_energy_curve(&[0.0, 0.1, -0.1, 0.2], &[1.0; 4]).is_err());
    }

    #[test]
    fn asymmetric_window_rejected() {
        let g = BallGeometry::new(2, 0.5).unwrap();
        let m = Medium::new(2.0, 1.0).unwrap();
        let opts = FemOptions {
            t_samples: vec![0.0, 0.01, 0.02, -0.01, 0.03],
            ..FemOptions::default()
        };
        assert!(estimate_q(&g, &m, 1, Constraint::Volume, &opts).is_err());
    }
}
