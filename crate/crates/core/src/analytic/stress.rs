use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{BallGeometry, Medium};

/// Radial stress function of the concentric two-phase ball.
///
/// Inside the inclusion `u = (1-R^2)/(2N s+) + (R^2-r^2)/(2N s-)`, outside
/// `u = (1-r^2)/(2N s+)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressProfile {
    pub geometry: BallGeometry,
    pub medium: Medium,
}

impl StressProfile {
    pub fn new(geometry: BallGeometry, medium: Medium) -> Self {
        Self { geometry, medium }
    }

    /// Inner branch, valid as a polynomial for any `r`.
    pub fn inner(&self, r: f64) -> f64 {
        let n = self.geometry.dim_f64();
        let rr = self.geometry.radius();
        (1.0 - rr * rr) / (2.0 * n * self.medium.sigma_plus())
            + (rr * rr - r * r) / (2.0 * n * self.medium.sigma_minus())
    }

    /// Outer branch, valid as a polynomial for any `r`.
    pub fn outer(&self, r: f64) -> f64 {
        let n = self.geometry.dim_f64();
        (1.0 - r * r) / (2.0 * n * self.medium.sigma_plus())
    }

    pub fn inner_slope(&self, r: f64) -> f64 {
        -r / (self.geometry.dim_f64() * self.medium.sigma_minus())
    }

    pub fn outer_slope(&self, r: f64) -> f64 {
        -r / (self.geometry.dim_f64() * self.medium.sigma_plus())
    }

    /// `u(r)`; the branch at `r = R` is the inner one (both agree there).
    pub fn value(&self, r: f64) -> f64 {
        if r <= self.geometry.radius() {
            self.inner(r)
        } else {
            self.outer(r)
        }
    }

    /// Radial flux `sigma * du/dr`, equal to `-r/N` on both sides.
    pub fn flux(&self, r: f64) -> f64 {
        if r <= self.geometry.radius() {
            self.medium.sigma_minus() * self.inner_slope(r)
        } else {
            self.medium.sigma_plus() * self.outer_slope(r)
        }
    }

    /// `E = |S^{N-1}| / (N^2 (N+2)) * (1/s+ + (1/s- - 1/s+) R^{N+2})`.
    pub fn torsional_rigidity(&self) -> f64 {
        let n = self.geometry.dim_f64();
        let r = self.geometry.radius();
        let m = &self.medium;
        self.geometry.unit_sphere_area() / (n * n * (n + 2.0))
            * (1.0 / m.sigma_plus() + m.compliance_jump() * r.powf(n + 2.0))
    }
}

pub fn stress_function(geom: &BallGeometry, medium: &Medium, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::OutOfDomain {
            quantity: "r",
            value: r,
            range: "[0, 1]",
        });
    }
    Ok(StressProfile::new(*geom, *medium).value(r))
}

/// Torsional rigidity `E(B_R) = ∫_Ω u` of the concentric configuration.
pub fn torsional_rigidity_concentric(geom: &BallGeometry, medium: &Medium) -> f64 {
    StressProfile::new(*geom, *medium).torsional_rigidity()
}
