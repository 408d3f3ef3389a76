//! Conservative finite-volume solver for the radial torsion problem
//!
//! `-(σ(r) r^{N-1} u')' = r^{N-1}` on `(0, 1)`, `u(1) = 0`,
//!
//! used as an independent check of the concentric closed forms. The interface
//! radius is always a grid node, so every cell lies in a single phase and the
//! flux continuity condition holds without special treatment. At the origin the
//! weight `r^{N-1}` vanishes and the natural zero-flux condition applies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{BallGeometry, Medium};

pub const MIN_CELLS: usize = 16;

/// Union of uniform grids on `[0, R]` and `[R, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    interface: usize,
}

impl RadialGrid {
    pub fn new(radius: f64, cells: usize) -> Result<Self> {
        if cells < MIN_CELLS {
            return Err(Error::invalid(
                "n",
                format!("need at least {MIN_CELLS} cells, got {cells}"),
            ));
        }
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::invalid(
                "radius",
                format!("must lie in (0, 1), got {radius}"),
            ));
        }
        let inner = ((cells as f64 * radius).round() as usize).clamp(1, cells - 1);
        let outer = cells - inner;
        let mut nodes = Vec::with_capacity(cells + 1);
        nodes.extend((0..inner).map(|i| radius * i as f64 / inner as f64));
        nodes.extend((0..outer).map(|i| radius + (1.0 - radius) * i as f64 / outer as f64));
        nodes.push(1.0);
        Ok(Self {
            nodes,
            interface: inner,
        })
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Index of the node sitting on the interface.
    pub fn interface_index(&self) -> usize {
        self.interface
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub geometry: BallGeometry,
    pub medium: Medium,
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub energy: f64,
}

impl RadialSolution {
    /// Discrete radial fluxes `σ r^{N-1} u'` on the two cells adjacent to the interface.
    pub fn interface_fluxes(&self) -> (f64, f64) {
        let m = self.grid.interface_index();
        let r = self.grid.nodes();
        let w = |i: usize| face_weight(self.geometry.dim_f64(), r[i], r[i + 1]);
        let left = self.medium.sigma_minus() * w(m - 1) * (self.values[m] - self.values[m - 1]);
        let right = self.medium.sigma_plus() * w(m) * (self.values[m + 1] - self.values[m]);
        (left, right)
    }

    /// Largest nodal deviation from a reference profile.
    pub fn max_error(&self, exact: impl Fn(f64) -> f64) -> f64 {
        self.grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&r, &u)| (u - exact(r)).abs())
            .fold(0.0, f64::max)
    }
}

/// `r_{i+1/2}^{N-1} / (r_{i+1} - r_i)`.
fn face_weight(n: f64, a: f64, b: f64) -> f64 {
    (0.5 * (a + b)).powf(n - 1.0) / (b - a)
}

pub fn solve_radial(geom: &BallGeometry, medium: &Medium, cells: usize) -> Result<RadialSolution> {
    let grid = RadialGrid::new(geom.radius(), cells)?;
    let n = geom.dim_f64();
    let r = grid.nodes();
    let m = grid.interface_index();
    let unknowns = grid.cells(); // u_0..u_{n-1}; u_n = 0

    let face: Vec<f64> = (0..grid.cells())
        .map(|i| {
            let sigma = if i < m {
                medium.sigma_minus()
            } else {
                medium.sigma_plus()
            };
            sigma * face_weight(n, r[i], r[i + 1])
        })
        .collect();

    let mut lower = vec![0.0; unknowns];
    let mut diag = vec![0.0; unknowns];
    let mut upper = vec![0.0; unknowns];
    let mut rhs = vec![0.0; unknowns];
    for i in 0..unknowns {
        let west = if i > 0 { face[i - 1] } else { 0.0 };
        let east = face[i];
        lower[i] = -west;
        diag[i] = west + east;
        upper[i] = -east;
        let left = if i > 0 { 0.5 * (r[i - 1] + r[i]) } else { 0.0 };
        let right = 0.5 * (r[i] + r[i + 1]);
        rhs[i] = r[i].powf(n - 1.0) * (right - left);
    }

    let mut values = thomas(&lower, &diag, &upper, &rhs)?;
    values.push(0.0);
    let energy = trapezoid_energy(geom, r, &values);
    Ok(RadialSolution {
        geometry: *geom,
        medium: *medium,
        grid,
        values,
        energy,
    })
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    for i in 0..n {
        if i > 0 {
            pivot = diag[i] - lower[i] * c[i - 1];
        }
        if !(pivot.abs() > f64::MIN_POSITIVE) || !pivot.is_finite() {
            return Err(Error::SolverDivergence {
                iterations: i,
                residual: f64::NAN,
            });
        }
        c[i] = upper[i] / pivot;
        let prev = if i > 0 { d[i - 1] } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * prev) / pivot;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

fn trapezoid_energy(geom: &BallGeometry, r: &[f64], u: &[f64]) -> f64 {
    let n = geom.dim_f64();
    let f = |i: usize| u[i] * r[i].powf(n - 1.0);
    let integral: f64 = (0..r.len() - 1)
        .map(|i| 0.5 * (r[i + 1] - r[i]) * (f(i) + f(i + 1)))
        .sum();
    geom.unit_sphere_area() * integral
}

/// `|S^{N-1}| ∫_0^1 u r^{N-1} dr` by the composite trapezoid rule on the solution grid.
pub fn energy_from_solution(sol: &RadialSolution) -> f64 {
    trapezoid_energy(&sol.geometry, sol.grid.nodes(), &sol.values)
}

/// Energies on `n` and `2n` cells combined as `(4 E_{2n} - E_n) / 3`.
pub fn richardson_energy(geom: &BallGeometry, medium: &Medium, cells: usize) -> Result<f64> {
    let coarse = solve_radial(geom, medium, cells)?.energy;
    let fine = solve_radial(geom, medium, 2 * cells)?.energy;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Observed order `log2(e_n / e_{2n})` of the max-norm error against the closed form.
pub fn observed_order(geom: &BallGeometry, medium: &Medium, cells: usize) -> Result<f64> {
    let exact = crate::analytic::StressProfile::new(*geom, *medium);
    let e1 = solve_radial(geom, medium, cells)?.max_error(|r| exact.value(r));
    let e2 = solve_radial(geom, medium, 2 * cells)?.max_error(|r| exact.value(r));
    Ok((e1 / e2).log2())
}
