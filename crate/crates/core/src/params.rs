//! Physical and geometric parameters shared by every module.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to decide that the two conductivities coincide.
pub const RHO_UNIT_TOL: f64 = 1e-12;

/// Pair of conductivities: `sigma_minus` inside the inclusion, `sigma_plus` outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    sigma_minus: f64,
    sigma_plus: f64,
}

impl Medium {
    pub fn new(sigma_minus: f64, sigma_plus: f64) -> Result<Self> {
        for (name, v) in [("sigma_minus", sigma_minus), ("sigma_plus", sigma_plus)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        Ok(Self {
            sigma_minus,
            sigma_plus,
        })
    }

    /// Medium with the given ratio `rho = sigma_minus / sigma_plus` and `sigma_plus = 1`.
    pub fn from_ratio(rho: f64) -> Result<Self> {
        Self::new(rho, 1.0)
    }

    #[inline]
    pub fn sigma_minus(&self) -> f64 {
        self.sigma_minus
    }

    #[inline]
    pub fn sigma_plus(&self) -> f64 {
        self.sigma_plus
    }

    #[inline]
    pub fn rho(&self) -> f64 {
        self.sigma_minus / self.sigma_plus
    }

    /// `(sigma_plus - sigma_minus) / (sigma_plus * sigma_minus)`, i.e. `1/sigma_minus - 1/sigma_plus`.
    #[inline]
    pub fn compliance_jump(&self) -> f64 {
        (self.sigma_plus - self.sigma_minus) / (self.sigma_plus * self.sigma_minus)
    }

    pub fn is_single_phase(&self) -> bool {
        (self.sigma_minus - self.sigma_plus).abs()
            <= RHO_UNIT_TOL * self.sigma_minus.max(self.sigma_plus)
    }

    /// Both conductivities multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(c * self.sigma_minus, c * self.sigma_plus)
    }

    /// Conductivity at distance `r` from the origin for the concentric inclusion of radius `radius`.
    #[inline]
    pub fn at_radius(&self, r: f64, radius: f64) -> f64 {
        if r < radius {
            self.sigma_minus
        } else {
            self.sigma_plus
        }
    }
}

/// Unit ball in dimension `dim` holding a concentric inclusion of radius `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallGeometry {
    dim: u32,
    radius: f64,
}

impl BallGeometry {
    pub fn new(dim: u32, radius: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid(
                "dim",
                format!("must be at least 2, got {dim}"),
            ));
        }
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::invalid(
                "radius",
                format!("must lie in (0, 1), got {radius}"),
            ));
        }
        Ok(Self { dim, radius })
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim
    }

    #[inline]
    pub fn dim_f64(&self) -> f64 {
        self.dim as f64
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Additive mean curvature `(N-1)/R` of the interface sphere.
    #[inline]
    pub fn mean_curvature(&self) -> f64 {
        (self.dim_f64() - 1.0) / self.radius
    }

    /// Surface measure of the unit sphere in R^N.
    pub fn unit_sphere_area(&self) -> f64 {
        unit_sphere_area(self.dim)
    }
}

/// `|S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)`, via the two-step recurrence.
pub fn unit_sphere_area(dim: u32) -> f64 {
    use std::f64::consts::PI;
    // |S^{n+1}| = 2 pi / n * |S^{n-1}|
    let (mut area, mut n) = if dim.is_multiple_of(2) {
        (2.0 * PI, 2)
    } else {
        (4.0 * PI, 3)
    };
    if dim == 1 {
        return 2.0;
    }
    while n < dim {
        area *= 2.0 * PI / n as f64;
        n += 2;
    }
    area
}

/// Which quantity the admissible perturbations keep fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    Volume,
    Perimeter,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::Volume => "volume",
            Constraint::Perimeter => "perimeter",
        })
    }
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "volume" => Ok(Constraint::Volume),
            "perimeter" | "surface" | "area" => Ok(Constraint::Perimeter),
            other => Err(Error::invalid(
                "constraint",
                format!("expected `volume` or `perimeter`, got `{other}`"),
            )),
        }
    }
}
