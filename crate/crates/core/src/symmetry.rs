//! Certificates of symmetry-breaking secondary bifurcation.
//!
//! Take `X` = functions of period `2π/p` and `Y` = functions of period `2π/q` with
//! `p | q`, `p < q`. When `k_max/2 < q <= k_max`, the primary continuum in `Y` meets the
//! trivial curve exactly at `z_{q,1}` and `z_{q,2}`. If the index jumps measured in `X`
//! at these two points do not cancel, the `Y`-continuum cannot be the whole
//! `X`-continuum, so solutions of period `2π/p` but not `2π/q` branch off it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primary::{all_primary_points, compute_kmax, find_primary_points, PrimaryBifPoint};
use crate::spectral::{index_jump_with, IndexJump};
use crate::trivial::{turning_points, Params};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub q: usize,
    pub p_div: usize,
    pub points: Vec<PrimaryBifPoint>,
    pub jumps: Vec<IndexJump>,
    pub total: i32,
    pub certified: bool,
}

fn check_window(q: usize, k_max: usize) -> Result<()> {
    // k_max / 2 < q  <=>  k_max < 2 q
    if q == 0 || k_max >= 2 * q || q > k_max {
        return Err(Error::OutOfWindow { q, k_max });
    }
    Ok(())
}

/// The two trivial points met by the primary `2π/q` continuum.
pub fn primary_pair(q: usize, p: &Params) -> Result<Vec<PrimaryBifPoint>> {
    check_window(q, compute_kmax(p)?)?;
    let pts = find_primary_points(q, p)?;
    if pts.len() != 2 {
        return Err(Error::MissingPair { q, found: pts.len() });
    }
    Ok(pts)
}

/// Sums the `X = 2π/p_div` index jumps over the `q`-pair and decides the certificate.
pub fn certify(q: usize, p_div: usize, p: &Params) -> Result<Certificate> {
    if p_div == 0 || q % p_div != 0 || p_div >= q {
        return Err(Error::Config(format!(
            "p_div = {p_div} must divide q = {q} and be smaller than it"
        )));
    }
    let points = primary_pair(q, p)?;
    let primaries = all_primary_points(p)?;
    let folds = turning_points(p);
    let jumps = points
        .iter()
        .map(|bp| index_jump_with(bp, p_div, p, &primaries, &folds))
        .collect::<Result<Vec<_>>>()?;
    let total = jumps.iter().map(|j| j.delta_star).sum();
    Ok(Certificate { q, p_div, points, jumps, total, certified: total != 0 })
}

/// Sum of the index jumps in `2π/p_div` over the given points.
///
/// When the points exhaust the contacts of a bounded continuum with the trivial
/// curve the sum has to vanish.
pub fn dancer_balance(points: &[PrimaryBifPoint], p_div: usize, p: &Params) -> Result<i32> {
    if points.is_empty() {
        return Ok(0);
    }
    let primaries = all_primary_points(p)?;
    let folds = turning_points(p);
    points
        .iter()
        .map(|bp| index_jump_with(bp, p_div, p, &primaries, &folds).map(|j| j.delta_star))
        .sum()
}
