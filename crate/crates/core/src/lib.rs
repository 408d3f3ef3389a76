//! Second-order shape analysis of the two-phase torsion problem in the unit
//! ball with a concentric inclusion.
//!
//! * [`analytic`] holds the closed forms: stress function, mode coefficients,
//!   the quadratic forms `Q(k)` / `Q̃(k)` and the classification of the
//!   concentric configuration.
//! * [`radial`] is a finite-volume solver for the radial problem, used to check
//!   the stress function and the rigidity.
//! * [`fem2d`] solves the planar transmission problem on perturbed interfaces
//!   and recovers the second-order coefficients from energies.

// `!(x > tol)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod analytic;
pub mod error;
pub mod fem2d;
pub mod params;
pub mod radial;

pub use analytic::{
    b_coefficient, classify, harmonic_data, j_function, q_first_mode, q_perimeter, q_volume,
    solve_mode_coefficients, stress_function, torsional_rigidity_concentric,
    volume_sap_coefficient, Classification, Mode, ModeCoefficients, QuadraticFormValue,
    StressProfile, Verdict,
};
pub use error::{Error, Result};
pub use params::{BallGeometry, Constraint, Medium};
