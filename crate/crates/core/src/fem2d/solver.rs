//! Piecewise-linear Galerkin discretization of `-div(σ∇u) = 1`, `u = 0` on
//! the unit circle, and a Jacobi-preconditioned conjugate gradient solver.

use serde::{Deserialize, Serialize};

use super::mesh::{Mesh, Region};
use crate::error::{Error, Result};
use crate::params::Medium;

pub const DEFAULT_RELATIVE_RESIDUAL: f64 = 1e-10;

/// Symmetric matrix in compressed sparse row form.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Sparsity pattern of the P1 stiffness matrix restricted to free nodes.
    fn pattern(mesh: &Mesh, dof: &[Option<usize>], n: usize) -> Self {
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        for tri in &mesh.triangles {
            for &a in tri {
                let Some(i) = dof[a] else { continue };
                for &b in tri {
                    if let Some(j) = dof[b] {
                        adjacency[i].push(j);
                    }
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        row_ptr.push(0);
        for row in &mut adjacency {
            row.sort_unstable();
            row.dedup();
            cols.extend_from_slice(row);
            row_ptr.push(cols.len());
        }
        let vals = vec![0.0; cols.len()];
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        let pos = row
            .binary_search(&j)
            .expect("entry outside sparsity pattern");
        self.vals[self.row_ptr[i] + pos] += v;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let range = self.row_ptr[i]..self.row_ptr[i + 1];
            *yi = self.cols[range.clone()]
                .iter()
                .zip(&self.vals[range])
                .map(|(&j, &a)| a * x[j])
                .sum();
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let range = self.row_ptr[i]..self.row_ptr[i + 1];
                let pos = self.cols[range.clone()].binary_search(&i).unwrap();
                self.vals[range.start + pos]
            })
            .collect()
    }
}

/// Assembled linear system with boundary nodes eliminated.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Free-node index per mesh node; `None` on the Dirichlet boundary.
    pub dof: Vec<Option<usize>>,
}

/// P1 gradients of the three barycentric functions and the triangle area.
fn p1_gradients(p: [[f64; 2]; 3]) -> ([[f64; 2]; 3], f64) {
    let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let mut g = [[0.0; 2]; 3];
    for v in 0..3 {
        let a = p[(v + 1) % 3];
        let b = p[(v + 2) % 3];
        g[v] = [(a[1] - b[1]) / det, (b[0] - a[0]) / det];
    }
    (g, 0.5 * det)
}

fn conductivity(medium: &Medium, region: Region) -> f64 {
    match region {
        Region::Inner => medium.sigma_minus(),
        Region::Outer => medium.sigma_plus(),
    }
}

pub fn assemble(mesh: &Mesh, medium: &Medium) -> LinearSystem {
    let mut next = 0;
    let dof: Vec<Option<usize>> = mesh
        .boundary
        .iter()
        .map(|&b| {
            (!b).then(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    let mut matrix = CsrMatrix::pattern(mesh, &dof, next);
    let mut rhs = vec![0.0; next];
    for (tri, &region) in mesh.triangles.iter().zip(&mesh.regions) {
        let (g, area) = p1_gradients(tri.map(|i| mesh.nodes[i]));
        let sigma = conductivity(medium, region);
        for a in 0..3 {
            let Some(i) = dof[tri[a]] else { continue };
            rhs[i] += area / 3.0;
            for b in 0..3 {
                if let Some(j) = dof[tri[b]] {
                    let k = sigma * area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                    matrix.add(i, j, k);
                }
            }
        }
    }
    LinearSystem { matrix, rhs, dof }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FemSolution {
    /// Nodal values, zero on the boundary.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Preconditioned conjugate gradients from a zero initial guess.
pub fn conjugate_gradient(
    a: &CsrMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize, f64)> {
    let n = a.dim();
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();

    let b_norm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok((x, 0, 0.0));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);

    for it in 1..=max_iter {
        a.mul_vec(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let res = dot(&r, &r).sqrt() / b_norm;
        if res <= tol {
            // confirm against the true residual
            a.mul_vec(&x, &mut ap);
            let true_res = b
                .iter()
                .zip(&ap)
                .map(|(b, ax)| (b - ax).powi(2))
                .sum::<f64>()
                .sqrt()
                / b_norm;
            if true_res <= tol {
                return Ok((x, it, true_res));
            }
        }
        if !res.is_finite() {
            return Err(Error::SolverDivergence {
                iterations: it,
                residual: res,
            });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        if !(rz_new > 0.0) {
            break;
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = dot(&r, &r).sqrt() / b_norm;
    Err(Error::SolverDivergence {
        iterations: max_iter,
        residual: res,
    })
}

/// Assembles and solves to relative residual `tol`.
pub fn assemble_solve_with(mesh: &Mesh, medium: &Medium, tol: f64) -> Result<FemSolution> {
    let system = assemble(mesh, medium);
    let max_iter = 20 * system.matrix.dim() + 100;
    let (x, iterations, relative_residual) =
        conjugate_gradient(&system.matrix, &system.rhs, tol, max_iter)?;
    let values = system.dof.iter().map(|d| d.map_or(0.0, |i| x[i])).collect();
    Ok(FemSolution {
        values,
        iterations,
        relative_residual,
    })
}

pub fn assemble_solve(mesh: &Mesh, medium: &Medium) -> Result<FemSolution> {
    assemble_solve_with(mesh, medium, DEFAULT_RELATIVE_RESIDUAL)
}

/// The two discrete expressions of the torsional rigidity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energies {
    /// `∫ u_h`, exact for piecewise-linear `u_h`.
    pub integral: f64,
    /// `∫ σ |∇u_h|²`.
    pub dirichlet: f64,
}

pub fn energy(mesh: &Mesh, medium: &Medium, solution: &FemSolution) -> Energies {
    let u = &solution.values;
    let mut integral = 0.0;
    let mut dirichlet = 0.0;
    for (tri, &region) in mesh.triangles.iter().zip(&mesh.regions) {
        let (g, area) = p1_gradients(tri.map(|i| mesh.nodes[i]));
        let vals = tri.map(|i| u[i]);
        integral += area * (vals[0] + vals[1] + vals[2]) / 3.0;
        let grad = (0..3).fold([0.0, 0.0], |acc, v| {
            [acc[0] + vals[v] * g[v][0], acc[1] + vals[v] * g[v][1]]
        });
        dirichlet += conductivity(medium, region) * area * (grad[0] * grad[0] + grad[1] * grad[1]);
    }
    Energies {
        integral,
        dirichlet,
    }
}
