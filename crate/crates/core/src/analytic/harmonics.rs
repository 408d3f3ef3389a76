use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Degree-`k` spherical harmonic data on the unit sphere of R^N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: u32,
    /// Laplace-Beltrami eigenvalue `k (k + N - 2)`.
    pub lambda: f64,
    pub multiplicity: u64,
    /// Exponent of the regular radial solution, `k`.
    pub eta: f64,
    /// Exponent of the singular radial solution, `2 - N - k`.
    pub xi: f64,
}

pub fn harmonic_data(dim: u32, k: u32) -> Result<Mode> {
    if dim < 2 {
        return Err(Error::invalid(
            "dim",
            format!("must be at least 2, got {dim}"),
        ));
    }
    if k == 0 {
        return Err(Error::invalid(
            "k",
            "degree 0 is excluded: it violates first-order volume preservation",
        ));
    }
    let n = dim as f64;
    let kf = k as f64;
    Ok(Mode {
        k,
        lambda: kf * (kf + n - 2.0),
        multiplicity: multiplicity(dim, k)?,
        eta: kf,
        xi: 2.0 - n - kf,
    })
}

/// Dimension of the space of degree-`k` spherical harmonics in R^N:
/// `C(N+k-1, k) - C(N+k-3, k-2)`.
fn multiplicity(dim: u32, k: u32) -> Result<u64> {
    let n = dim as u64;
    let k = k as u64;
    let overflow = || {
        Error::invalid(
            "k",
            format!("multiplicity overflows u64 for N={dim}, k={k}"),
        )
    };
    let total = binomial(n + k - 1, k).ok_or_else(overflow)?;
    let lower = if k >= 2 {
        binomial(n + k - 3, k - 2).ok_or_else(overflow)?
    } else {
        0
    };
    Ok(total - lower)
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact: acc * (n - i) is divisible by (i + 1)
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    u64::try_from(acc).ok()
}
