//! Interior coefficient of the shape derivative of the stress function for a
//! single harmonic mode.
//!
//! For `h_n(R θ) = Y_k(θ)` the shape derivative is `B r^k Y_k` inside the
//! inclusion and `(C r^{2-N-k} + D r^k) Y_k` outside. The three constants solve
//! the jump condition, flux continuity and the outer Dirichlet condition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{BallGeometry, Medium};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Numerator and denominator of the fraction in the closed form of `B_k`,
/// both divided by `R^{2-N-k}` so that large `k` neither overflows nor underflows.
///
/// The denominator is negative for every admissible input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRatio {
    pub numerator: f64,
    pub denominator: f64,
}

impl ModeRatio {
    #[inline]
    pub fn value(&self) -> f64 {
        self.numerator / self.denominator
    }
}

const DENOMINATOR_TOL: f64 = 1e-14;
const PIVOT_TOL: f64 = 1e-14;

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::OutOfDomain {
            quantity: "k",
            value: k,
            range: "[1, inf)",
        });
    }
    Ok(())
}

/// The fraction appearing in `B_k` for a real mode index `k >= 1`.
pub fn mode_ratio(geom: &BallGeometry, medium: &Medium, k: f64) -> Result<ModeRatio> {
    check_k(k)?;
    let n = geom.dim_f64();
    let xi = 2.0 - n - k;
    let jump = medium.sigma_minus() - medium.sigma_plus();
    // R^{k - xi}
    let decay = geom.radius().powf(2.0 * k + n - 2.0);

    let lead = k * jump * decay;
    let numerator = lead - xi * jump;
    let tail = xi * medium.sigma_plus() - k * medium.sigma_minus();
    let denominator = lead + tail;

    let scale = lead.abs() + (xi * medium.sigma_plus()).abs() + (k * medium.sigma_minus()).abs();
    if !(denominator.abs() > DENOMINATOR_TOL * scale) {
        return Err(Error::DegenerateDenominator {
            k,
            value: denominator,
            threshold: DENOMINATOR_TOL * scale,
        });
    }
    Ok(ModeRatio {
        numerator,
        denominator,
    })
}

/// Closed-form interior coefficient `B_k`.
pub fn b_coefficient(geom: &BallGeometry, medium: &Medium, k: f64) -> Result<f64> {
    let ratio = mode_ratio(geom, medium, k)?;
    let n = geom.dim_f64();
    Ok(geom.radius().powf(1.0 - k) / (n * medium.sigma_minus()) * ratio.value())
}

/// Solves the 3x3 interface system for `(B, C, D)` by Gaussian elimination.
///
/// The unknowns are scaled to their traces on the interface (`B R^k`,
/// `C R^{2-N-k}`, `D R^k`) before elimination, which keeps the matrix entries
/// of order one for all `k`.
pub fn solve_mode_coefficients(
    geom: &BallGeometry,
    medium: &Medium,
    k: u32,
) -> Result<ModeCoefficients> {
    if k == 0 {
        return Err(Error::invalid("k", "mode index must be at least 1"));
    }
    let n = geom.dim_f64();
    let r = geom.radius();
    let kf = k as f64;
    let xi = 2.0 - n - kf;
    let (sm, sp) = (medium.sigma_minus(), medium.sigma_plus());

    // unknowns x = [B R^k, C R^xi, D R^k]
    //   jump of u' :  -x0 + x1 + x2 = -R/(N s-) + R/(N s+)
    //   flux       :  s- k x0 - s+ xi x1 - s+ k x2 = 0          (times R)
    //   u'(1) = 0  :  R^{k-xi} x1 + x2 = 0                       (C + D = 0, times R^k)
    let mut a = [
        [-1.0, 1.0, 1.0],
        [sm * kf, -sp * xi, -sp * kf],
        [0.0, r.powf(kf - xi), 1.0],
    ];
    let mut rhs = [-r / (n * sm) + r / (n * sp), 0.0, 0.0];
    let x = gauss_solve(&mut a, &mut rhs, k)?;

    Ok(ModeCoefficients {
        b: x[0] * r.powf(-kf),
        c: x[1] * r.powf(-xi),
        d: x[2] * r.powf(-kf),
    })
}

fn gauss_solve(a: &mut [[f64; 3]; 3], rhs: &mut [f64; 3], k: u32) -> Result<[f64; 3]> {
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        let pivot = a[pivot_row][col];
        if !(pivot.abs() > PIVOT_TOL * scale) {
            return Err(Error::SingularSystem { k, pivot });
        }
        a.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in col + 1..3 {
            let f = a[row][col] / pivot;
            for c in col..3 {
                a[row][c] -= f * a[col][c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|c| a[row][c] * x[c]).sum();
        x[row] = (rhs[row] - s) / a[row][row];
    }
    Ok(x)
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
    fn single_phase_has_no_interior_response() {
        let (g, m) = setup(3, 0.4, 1.7, 1.7);
        for k in 1..10 {
            assert_eq!(b_coefficient(&g, &m, k as f64).unwrap(), 0.0);
            let c = solve_mode_coefficients(&g, &m, k).unwrap();
            assert_eq!(c.b, 0.0);
        }
    }

    #[test]
    fn outer_dirichlet_condition() {
        let (g, m) = setup(3, 0.7, 0.3, 2.0);
        for k in 1..30 {
            let c = solve_mode_coefficients(&g, &m, k).unwrap();
            assert!((c.c + c.d).abs() <= 1e-12 * c.c.abs().max(c.d.abs()));
        }
    }

    // Reference values from an independent 40-digit dense solve of the
    // unscaled system with unknowns (B, C, D).
    #[test]
    fn pinned_values_disk() {
        let (g, m) = setup(2, 0.5, 2.0, 1.0);
        let b = b_coefficient(&g, &m, 1.0).unwrap();
        assert!((b - (-5.0 / 44.0)).abs() < 1e-15);
        let (g, m) = setup(2, 0.5, 1.0, 2.0);
        let b = solve_mode_coefficients(&g, &m, 1).unwrap().b;
        assert!((b - 5.0 / 26.0).abs() < 1e-15);
        let b2 = b_coefficient(&g, &m, 2.0).unwrap();
        assert!((b2 - 0.346_938_775_510_204_1).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_elimination() {
        for n in 2..=6 {
            for r in [0.05, 0.3, 0.5, 0.95] {
                for rho in [0.01, 0.5, 2.0, 100.0] {
                    let (g, m) = setup(n, r, rho, 1.0);
                    for k in 1..=60 {
                        let closed = b_coefficient(&g, &m, k as f64).unwrap();
                        let solved = solve_mode_coefficients(&g, &m, k).unwrap().b;
                        let err = (closed - solved).abs() / closed.abs();
                        assert!(err < 1e-12, "N={n} R={r} rho={rho} k={k}: {err:e}");
                    }
                }
            }
        }
    }

    #[test]
    fn real_k_below_one_is_rejected() {
        let (g, m) = setup(2, 0.5, 2.0, 1.0);
        assert!(mode_ratio(&g, &m, 0.5).is_err());
        assert!(mode_ratio(&g, &m, f64::NAN).is_err());
        assert!(solve_mode_coefficients(&g, &m, 0).is_err());
    }
}
