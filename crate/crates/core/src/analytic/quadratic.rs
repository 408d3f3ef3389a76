//! Diagonalized second-order coefficients of the torsional rigidity.
//!
//! Along a volume-preserving (resp. surface-area-preserving) deformation whose
//! normal speed on the interface is a single degree-`k` harmonic normalized by
//! `∫_{S^{N-1}} Y^2 = R^{1-N}`, the rigidity behaves like
//! `E(t) = E(B_R) + t^2 Q(k) + o(t^2)` (resp. `t^2 Q̃(k)`).

use serde::{Deserialize, Serialize};

use super::coefficients::mode_ratio;
use crate::error::{Error, Result};
use crate::params::{BallGeometry, Constraint, Medium};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFormValue {
    pub constraint: Constraint,
    pub k: f64,
    pub value: f64,
}

/// `R/N^2 * (s+ - s-)/(s+ s-)`, common to both quadratic forms.
fn prefactor(geom: &BallGeometry, medium: &Medium) -> f64 {
    let n = geom.dim_f64();
    geom.radius() / (n * n) * medium.compliance_jump()
}

/// `Q(k)` written with both conductivities and the closed form of `B_k`.
pub fn q_volume_sigma_form(geom: &BallGeometry, medium: &Medium, k: f64) -> Result<f64> {
    let ratio = mode_ratio(geom, medium, k)?;
    Ok(prefactor(geom, medium) * (1.0 - k * ratio.value()))
}

/// `Q(k)` written through the ratio `rho` and the auxiliary function `j`.
///
/// `Q(k) = R/N^2 (1-rho)/s- (1 - (1-rho) j(k))`.
pub fn q_volume_rho_form(geom: &BallGeometry, medium: &Medium, k: f64) -> Result<f64> {
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::OutOfDomain {
            quantity: "k",
            value: k,
            range: "[1, inf)",
        });
    }
    let n = geom.dim_f64();
    let rho = medium.rho();
    let j = j_function(k, geom.dim(), geom.radius(), rho)?;
    Ok(geom.radius() / (n * n) * (1.0 - rho) / medium.sigma_minus() * (1.0 - (1.0 - rho) * j))
}

/// First-mode value `Q(1) = R/N^2 (1-rho)/s- * N rho / (rho (1 - R^N) + N - 1 + R^N)`.
///
/// The denominator is positive, so `Q(1)` has the sign of `1 - rho`.
pub fn q_first_mode(geom: &BallGeometry, medium: &Medium) -> f64 {
    let n = geom.dim_f64();
    let r = geom.radius();
    let rho = medium.rho();
    let rn = r.powf(n);
    r / (n * n) * (1.0 - rho) / medium.sigma_minus() * n * rho / (rho * (1.0 - rn) + n - 1.0 + rn)
}

/// Volume-constrained second-order coefficient `Q(k)`.
pub fn q_volume(geom: &BallGeometry, medium: &Medium, k: f64) -> Result<QuadraticFormValue> {
    Ok(QuadraticFormValue {
        constraint: Constraint::Volume,
        k,
        value: q_volume_sigma_form(geom, medium, k)?,
    })
}

/// Surface-area-constrained second-order coefficient `Q̃(k)`.
///
/// Differs from `Q(k)` by replacing the constant `1` with
/// `3/2 - k(k+N-2)/(2(N-1))`; the two coincide at `k = 1`.
pub fn q_perimeter(geom: &BallGeometry, medium: &Medium, k: f64) -> Result<QuadraticFormValue> {
    let ratio = mode_ratio(geom, medium, k)?;
    let n = geom.dim_f64();
    let lambda = k * (k + n - 2.0);
    let base = 1.5 - lambda / (2.0 * (n - 1.0));
    Ok(QuadraticFormValue {
        constraint: Constraint::Perimeter,
        k,
        value: prefactor(geom, medium) * (base - k * ratio.value()),
    })
}

pub fn quadratic_form(
    geom: &BallGeometry,
    medium: &Medium,
    constraint: Constraint,
    k: f64,
) -> Result<QuadraticFormValue> {
    match constraint {
        Constraint::Volume => q_volume(geom, medium, k),
        Constraint::Perimeter => q_perimeter(geom, medium, k),
    }
}

/// `j(x) = x (x - (2-N-x) P) / ((1-rho) x + (N-2+x+rho x) P)` with `P = R^{2-N-2x}`.
///
/// `Q` is decreasing in `k` exactly when `j` is increasing. Evaluated after
/// dividing through by `P`, which is harmless for large `x`.
pub fn j_function(x: f64, dim: u32, radius: f64, rho: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::OutOfDomain {
            quantity: "x",
            value: x,
            range: "(0, inf)",
        });
    }
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::OutOfDomain {
            quantity: "radius",
            value: radius,
            range: "(0, 1)",
        });
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::OutOfDomain {
            quantity: "rho",
            value: rho,
            range: "(0, inf)",
        });
    }
    let n = dim as f64;
    let inv_p = radius.powf(n - 2.0 + 2.0 * x);
    let num = x * (x * inv_p - (2.0 - n - x));
    let den = (1.0 - rho) * x * inv_p + (n - 2.0 + x + rho * x);
    Ok(num / den)
}

/// `t^2` coefficient of `Vol(Φ(t)(B_R))` along a surface-area-preserving
/// deformation with a degree-`k` normal speed.
pub fn volume_sap_coefficient(geom: &BallGeometry, k: u32) -> f64 {
    let n = geom.dim_f64();
    let r = geom.radius();
    let kf = k as f64;
    let lambda = kf * (kf + n - 2.0);
    0.5 * (1.0 / r - lambda / ((n - 1.0) * r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: u32, r: f64, sm: f64, sp: f64) -> (BallGeometry, Medium) {
        (
            BallGeometry::new(n, r).unwrap(),
            Medium::new(sm, sp).unwrap(),
        )
    }

    #[test]
    fn vanishes_without_contrast() {
        let (g, m) = setup(3, 0.6, 2.5, 2.5);
        for k in 1..20 {
            let k = k as f64;
            assert_eq!(q_volume(&g, &m, k).unwrap().value, 0.0);
            assert_eq!(q_perimeter(&g, &m, k).unwrap().value, 0.0);
        }
    }

    // Independent 40-digit reference: dense solve of the interface system,
    // then Q = R/N (s+-s-)/(s+ s-) (-s- B k R^{k-1} + 1/N).
    #[test]
    fn pinned_disk_values() {
        let (g, m) = setup(2, 0.5, 2.0, 1.0);
        assert!((q_volume(&g, &m, 1.0).unwrap().value + 1.0 / 11.0).abs() < 1e-15);
        assert!((q_volume(&g, &m, 2.0).unwrap().value + 0.107_712_765_957_446_8).abs() < 1e-15);
        assert!((q_volume(&g, &m, 3.0).unwrap().value + 0.126_308_900_523_560_2).abs() < 1e-15);
        assert!((q_perimeter(&g, &m, 2.0).unwrap().value + 0.013_962_765_957_446_81).abs() < 1e-15);
        let (g, m) = setup(2, 0.5, 1.0, 2.0);
        assert!((q_volume(&g, &m, 1.0).unwrap().value - 1.0 / 26.0).abs() < 1e-15);
        assert!((q_volume(&g, &m, 3.0).unwrap().value + 6.476_683_937_823_834e-4).abs() < 1e-16);
        assert!((q_perimeter(&g, &m, 3.0).unwrap().value + 0.250_647_668_393_782_4).abs() < 1e-15);
    }

    #[test]
    fn first_mode_closed_form() {
        for n in 2..=6 {
            for r in [0.05, 0.4, 0.95] {
                for rho in [0.01, 0.7, 1.3, 100.0] {
                    let (g, m) = setup(n, r, rho, 1.0);
                    let a = q_first_mode(&g, &m);
                    let b = q_volume(&g, &m, 1.0).unwrap().value;
                    assert!((a - b).abs() <= 1e-12 * a.abs(), "N={n} R={r} rho={rho}");
                }
            }
        }
    }

    #[test]
    fn sign_for_reversed_contrast() {
        let (g, m) = setup(2, 0.5, 1.0, 2.0);
        assert!(q_volume(&g, &m, 1.0).unwrap().value > 0.0);
    }

    #[test]
    fn perimeter_tail_grows_for_stiff_core() {
        let (g, m) = setup(2, 0.5, 2.0, 1.0);
        assert!(q_perimeter(&g, &m, 200.0).unwrap().value > 0.0);
    }

    #[test]
    fn forms_agree_at_first_mode() {
        let (g, m) = setup(4, 0.35, 0.2, 1.3);
        let a = q_volume(&g, &m, 1.0).unwrap().value;
        let b = q_perimeter(&g, &m, 1.0).unwrap().value;
        assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn j_at_unit_ratio() {
        // rho = 1: j(x) = x (x - (2-N-x) P) / ((N - 2 + 2x) P)
        for (n, r) in [(2u32, 0.5f64), (3, 0.2), (5, 0.9)] {
            for x in [1.0, 1.5, 7.0, 40.0] {
                let nf = n as f64;
                let p = r.powf(2.0 - nf - 2.0 * x);
                let expected = x * (x - (2.0 - nf - x) * p) / ((nf - 2.0 + 2.0 * x) * p);
                let got = j_function(x, n, r, 1.0).unwrap();
                assert!((got - expected).abs() <= 1e-13 * expected.abs());
                assert!(got.is_finite() && got > 0.0);
            }
        }
    }

    #[test]
    fn sap_volume_coefficient() {
        for n in 2..6 {
            for r in [0.2, 0.5, 0.8] {
                let g = BallGeometry::new(n, r).unwrap();
                assert!(volume_sap_coefficient(&g, 1).abs() < 1e-15);
            }
        }
        let g = BallGeometry::new(2, 0.5).unwrap();
        assert_eq!(volume_sap_coefficient(&g, 5), -24.0);
        let mut last = volume_sap_coefficient(&g, 1);
        for k in 2..50 {
            let v = volume_sap_coefficient(&g, k);
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn j_rejects_bad_domain() {
        assert!(j_function(0.0, 2, 0.5, 2.0).is_err());
        assert!(j_function(2.0, 2, 1.0, 2.0).is_err());
        assert!(j_function(2.0, 2, 0.5, -1.0).is_err());
    }
}
