//! Planar finite-element check of the second-order expansion.
//!
//! For a mode-`k` deformation of the interface circle the rigidity is
//! computed on interface-fitted meshes over a symmetric window of amplitudes,
//! and the `t²` coefficient of a polynomial fit is compared with the closed
//! forms of [`crate::analytic`].

mod estimate;
mod family;
mod mesh;
mod solver;

pub use estimate::{
    admissible_window, estimate_q, fit_energy_curve, EnergyFit, FemEstimate, FemOptions, MeshLevel,
    DEFAULT_T_SAMPLES,
};
pub use family::{build_family, InterfaceCurve, PerturbationFamily};
pub use mesh::{build_mesh, Mesh, ReferenceMesh, Region, MIN_ANGLE_DEG, RING_SYMMETRY};
pub use solver::{
    assemble, assemble_solve, assemble_solve_with, conjugate_gradient, energy, CsrMatrix, Energies,
    FemSolution, LinearSystem, DEFAULT_RELATIVE_RESIDUAL,
};
