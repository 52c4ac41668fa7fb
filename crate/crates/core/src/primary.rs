//! Primary bifurcation points on the trivial curve.
//!
//! A mode-`k` eigenvalue of the linearization at `(a(t), zeta(t))` vanishes exactly when
//!
//! ```text
//!     g_k(t) = (zeta(t) + d k^2)^2 - 4 |a(t)|^2 (zeta(t) + d k^2) + 1 + 3 |a(t)|^4 = 0.
//! ```
//!
//! For generic `(d, f)` each `g_k` has either none or two simple zeros `t_{k,1} < t_{k,2}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{bisect_newton, sign_change_brackets};
use crate::trivial::{self, eval_trivial, modulus_sq, Params, TrivialPoint, SCAN_INTERVALS, T_GUARD};

/// Residual bound accepted at a polished root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;
/// Minimal `|g_k'(t)|` at a root for it to count as simple.
pub const SIMPLE_ROOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimaryBifPoint {
    /// Fourier mode of the kernel.
    pub k: usize,
    /// 1 for the smaller root, 2 for the larger one.
    pub slot: u8,
    pub t: f64,
    pub point: TrivialPoint,
}

impl PrimaryBifPoint {
    /// `z_{k,slot}` style label.
    pub fn label(&self) -> String {
        format!("z_{{{},{}}}", self.k, self.slot)
    }
}

fn residual_unchecked(t: f64, k: usize, p: &Params) -> f64 {
    let zeta = trivial::zeta_at(t, p).unwrap_or(f64::NAN);
    let m = zeta + p.d * (k * k) as f64;
    let a2 = modulus_sq(t, p);
    m * m - 4.0 * a2 * m + 1.0 + 3.0 * a2 * a2
}

fn residual_derivative_unchecked(t: f64, k: usize, p: &Params) -> f64 {
    let zeta = trivial::zeta_at(t, p).unwrap_or(f64::NAN);
    let zp = trivial::zeta_prime(t, p).unwrap_or(f64::NAN);
    let m = zeta + p.d * (k * k) as f64;
    let a2 = modulus_sq(t, p);
    let a2p = -2.0 * p.f * p.f * t;
    2.0 * m * zp - 4.0 * a2p * m - 4.0 * a2 * zp + 6.0 * a2 * a2p
}

/// `g_k(t)`.
pub fn bifurcation_residual(t: f64, k: usize, p: &Params) -> Result<f64> {
    eval_trivial(t, p)?;
    Ok(residual_unchecked(t, k, p))
}

/// `d g_k / dt`.
pub fn bifurcation_residual_derivative(t: f64, k: usize, p: &Params) -> Result<f64> {
    eval_trivial(t, p)?;
    Ok(residual_derivative_unchecked(t, k, p))
}

/// All simple zeros of `g_k` on `(-1, 1)`, ascending, with the default scan grid.
pub fn find_primary_points(k: usize, p: &Params) -> Result<Vec<PrimaryBifPoint>> {
    find_primary_points_with_grid(k, p, SCAN_INTERVALS)
}

pub fn find_primary_points_with_grid(k: usize, p: &Params, intervals: usize) -> Result<Vec<PrimaryBifPoint>> {
    if k == 0 {
        return Err(Error::InvalidParams("mode number k must be positive".into()));
    }
    let g = |t: f64| residual_unchecked(t, k, p);
    let dg = |t: f64| residual_derivative_unchecked(t, k, p);
    let mut out = Vec::new();
    for (a, b) in sign_change_brackets(g, -1.0 + T_GUARD, 1.0 - T_GUARD, intervals) {
        let t = bisect_newton(g, dg, a, b, 1e-14);
        let res = g(t);
        let slope = dg(t);
        // Scale-aware residual test: g carries terms of size (zeta + d k^2)^2.
        let scale = 1.0 + (trivial::zeta_at(t, p)? + p.d * (k * k) as f64).powi(2);
        if res.abs() > ROOT_RESIDUAL_TOL * scale {
            return Err(Error::GenericityViolation(format!(
                "root of g_{k} near t = {t} has residual {res:e}"
            )));
        }
        if slope.abs() <= SIMPLE_ROOT_TOL {
            return Err(Error::GenericityViolation(format!(
                "root of g_{k} at t = {t} is not simple (g' = {slope:e})"
            )));
        }
        out.push(t);
    }
    if out.len() % 2 == 1 {
        return Err(Error::GenericityViolation(format!(
            "g_{k} has an odd number ({}) of roots",
            out.len()
        )));
    }
    out.iter()
        .enumerate()
        .map(|(i, &t)| {
            Ok(PrimaryBifPoint { k, slot: (i + 1).min(u8::MAX as usize) as u8, t, point: eval_trivial(t, p)? })
        })
        .collect()
}

/// Range of `zeta` over the compact set `{|a(t)|^4 >= 1}`; `None` when the set is empty.
fn zeta_range_on_real_spectrum(p: &Params) -> Option<(f64, f64)> {
    let f2 = p.f * p.f;
    if f2 <= 1.0 {
        return None;
    }
    let edge = (1.0 - 1.0 / f2).sqrt();
    let mut cands = vec![-edge, edge];
    cands.extend(trivial::turning_points(p).into_iter().filter(|t| t.abs() <= edge));
    let zs: Vec<f64> = cands.iter().filter_map(|&t| trivial::zeta_at(t, p).ok()).collect();
    let lo = zs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = zs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Some((lo, hi))
}

/// Admissible window for `zeta + d k^2` at a root: `[2A - sqrt(A^2 - 1), 2A + sqrt(A^2 - 1)]`
/// with `A = |a|^2 in [1, f^2]`, widened to its extremes over `A`.
fn shifted_zeta_window(p: &Params) -> (f64, f64) {
    let f2 = p.f * p.f;
    let disc = (f2 * f2 - 1.0).sqrt();
    // 2A - sqrt(A^2 - 1) decreases in A, 2A + sqrt(A^2 - 1) increases.
    (2.0 * f2 - disc, 2.0 * f2 + disc)
}

/// Largest mode with primary bifurcation points, 0 if there are none.
///
/// Roots of `g_k` need `zeta(t) + d k^2` inside [`shifted_zeta_window`] for some `t`
/// with `|a(t)|^4 >= 1`; the scan over `k` stops once the monotone shift `d k^2`
/// has pushed the attainable `zeta` range past that window for good.
pub fn compute_kmax(p: &Params) -> Result<usize> {
    let Some((zlo, zhi)) = zeta_range_on_real_spectrum(p) else {
        return Ok(0);
    };
    let (lower, upper) = shifted_zeta_window(p);
    let mut k_max = 0;
    for k in 1.. {
        let shift = p.d * (k * k) as f64;
        if (p.d > 0.0 && zlo + shift > upper) || (p.d < 0.0 && zhi + shift < lower) {
            break;
        }
        let possible = zlo + shift <= upper && zhi + shift >= lower;
        if possible && !find_primary_points(k, p)?.is_empty() {
            k_max = k;
        }
    }
    Ok(k_max)
}

/// Every primary point for `k = 1..=k_max`, ordered by `k` then slot.
pub fn all_primary_points(p: &Params) -> Result<Vec<PrimaryBifPoint>> {
    let k_max = compute_kmax(p)?;
    let mut out = Vec::new();
    for k in 1..=k_max {
        out.extend(find_primary_points(k, p)?);
    }
    Ok(out)
}
