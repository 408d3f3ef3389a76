use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{BallGeometry, Constraint};

/// Largest admissible normal excursion as a fraction of `R` (keeps the
/// interface away from the origin).
const INNER_CLEARANCE: f64 = 0.7;

/// Mode-`k` deformation of the planar interface circle,
/// `r(θ; t) = c(t) + t a cos(kθ)` with `a = (πR)^{-1/2}`.
///
/// `c(t)` keeps the enclosed area (volume constraint) or the curve length
/// (perimeter constraint) equal to its value at `t = 0`. The normal speed at
/// `t = 0` is `a cos(kθ)`, whose square integrates to `1/R` over the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationFamily {
    pub geometry: BallGeometry,
    pub k: u32,
    pub amplitude: f64,
    pub constraint: Constraint,
}

pub fn build_family(
    geom: &BallGeometry,
    k: u32,
    constraint: Constraint,
) -> Result<PerturbationFamily> {
    if geom.dim() != 2 {
        return Err(Error::invalid(
            "dim",
            format!(
                "the finite-element oracle is planar, got N = {}",
                geom.dim()
            ),
        ));
    }
    if k == 0 {
        return Err(Error::invalid("k", "mode index must be at least 1"));
    }
    Ok(PerturbationFamily {
        geometry: *geom,
        k,
        amplitude: (PI * geom.radius()).powf(-0.5),
        constraint,
    })
}

impl PerturbationFamily {
    /// Bound on `|t|` keeping the interface inside `Ω` and away from the origin.
    pub fn max_amplitude(&self) -> f64 {
        let r = self.geometry.radius();
        (1.0 - r).min(INNER_CLEARANCE * r) / self.amplitude
    }

    pub fn check(&self, t: f64) -> Result<()> {
        let limit = self.max_amplitude();
        if !(t.abs() < limit) {
            return Err(Error::InadmissibleAmplitude { t, limit });
        }
        Ok(())
    }

    /// Mean radius `c(t)`.
    pub fn base_radius(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let r = self.geometry.radius();
        let eps = t * self.amplitude;
        Ok(match self.constraint {
            Constraint::Volume => (r * r - 0.5 * eps * eps).sqrt(),
            Constraint::Perimeter => self.length_preserving_radius(eps),
        })
    }

    /// Interface as a closure `θ ↦ r(θ; t)`.
    pub fn curve(&self, t: f64) -> Result<InterfaceCurve> {
        Ok(InterfaceCurve {
            base: self.base_radius(t)?,
            excursion: t * self.amplitude,
            k: self.k as f64,
        })
    }

    fn length_preserving_radius(&self, eps: f64) -> f64 {
        let r = self.geometry.radius();
        if eps == 0.0 {
            return r;
        }
        let target = 2.0 * PI * r;
        let k = self.k as f64;
        let length = |c: f64| {
            InterfaceCurve {
                base: c,
                excursion: eps,
                k,
            }
            .length()
        };
        // length(c) is increasing in c and length(r) >= 2πr
        let mut hi = r;
        let mut lo = r - eps.abs() * (1.0 + k * k * eps.abs() / r);
        while length(lo) > target {
            lo -= r - lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if length(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `r(θ) = base + excursion · cos(kθ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceCurve {
    pub base: f64,
    pub excursion: f64,
    pub k: f64,
}

impl InterfaceCurve {
    #[inline]
    pub fn radius(&self, theta: f64) -> f64 {
        self.base + self.excursion * (self.k * theta).cos()
    }

    fn samples(&self) -> usize {
        512 * self.k as usize
    }

    /// Arc length by the periodic trapezoid rule.
    pub fn length(&self) -> f64 {
        let m = self.samples();
        let h = 2.0 * PI / m as f64;
        (0..m)
            .map(|i| {
                let th = i as f64 * h;
                let r = self.radius(th);
                let dr = -self.excursion * self.k * (self.k * th).sin();
                (r * r + dr * dr).sqrt()
            })
            .sum::<f64>()
            * h
    }

    /// Enclosed area `½∫ r² dθ` by the periodic trapezoid rule.
    pub fn area(&self) -> f64 {
        let m = self.samples();
        let h = 2.0 * PI / m as f64;
        0.5 * h
            * (0..m)
                .map(|i| self.radius(i as f64 * h).powi(2))
                .sum::<f64>()
    }
}
