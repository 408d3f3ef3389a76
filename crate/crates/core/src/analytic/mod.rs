//! Closed-form quantities for the concentric configuration.
//!
//! Everything here is a pure function of `(BallGeometry, Medium)` and a mode index.
//! The radial and finite-element oracles in the sibling modules check these
//! formulas independently.

mod classify;
mod coefficients;
mod harmonics;
mod quadratic;
mod stress;

pub use classify::{classify, Classification, Verdict, CRITICAL_MODE_SCAN_CAP};
pub use coefficients::{
    b_coefficient, mode_ratio, solve_mode_coefficients, ModeCoefficients, ModeRatio,
};
pub use harmonics::{harmonic_data, Mode};
pub use quadratic::{
    j_function, q_first_mode, q_perimeter, q_volume, q_volume_rho_form, q_volume_sigma_form,
    quadratic_form, volume_sap_coefficient, QuadraticFormValue,
};
pub use stress::{stress_function, torsional_rigidity_concentric, StressProfile};
