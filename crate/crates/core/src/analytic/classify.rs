use serde::{Deserialize, Serialize};

use super::quadratic::quadratic_form;
use crate::error::Result;
use crate::params::{BallGeometry, Constraint, Medium};

/// Largest mode index examined when searching for a sign change.
pub const CRITICAL_MODE_SCAN_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    LocalMaximizer,
    Saddle,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// Smallest mode whose second-order coefficient has the opposite sign of
    /// the first mode's. `None` unless the verdict is `Saddle`, or when the
    /// sign change lies beyond [`CRITICAL_MODE_SCAN_CAP`].
    pub critical_mode: Option<u64>,
}

/// Nature of the concentric ball as a critical shape of the rigidity.
///
/// Under the volume constraint `Q` decreases in `k` and `Q(1)` has the sign of
/// `1 - rho`, so a stiffer core gives a local maximizer and a softer core a
/// saddle. Under the surface-area constraint `Q̃` diverges with the opposite
/// sign of `Q̃(1)` and the ball is always a saddle.
pub fn classify(
    geom: &BallGeometry,
    medium: &Medium,
    constraint: Constraint,
) -> Result<Classification> {
    if medium.is_single_phase() {
        return Ok(Classification {
            verdict: Verdict::Degenerate,
            critical_mode: None,
        });
    }
    let q = |k: u64| quadratic_form(geom, medium, constraint, k as f64).map(|v| v.value);
    let q1 = q(1)?;

    let first_flip = |start: u64| -> Result<Option<u64>> {
        for k in start..=CRITICAL_MODE_SCAN_CAP {
            let v = q(k)?;
            if v != 0.0 && v.signum() != q1.signum() {
                return Ok(Some(k));
            }
        }
        Ok(None)
    };

    Ok(match constraint {
        Constraint::Volume if q1 < 0.0 => Classification {
            verdict: Verdict::LocalMaximizer,
            critical_mode: None,
        },
        Constraint::Volume => Classification {
            verdict: Verdict::Saddle,
            critical_mode: first_flip(2)?,
        },
        Constraint::Perimeter => Classification {
            verdict: Verdict::Saddle,
            critical_mode: first_flip(2)?,
        },
    })
}
