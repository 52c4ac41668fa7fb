//! Linearized spectrum along the trivial curve, Leray-Schauder indices and index jumps.
//!
//! At a constant solution the linearization of the fixed-point map
//! `F(a, zeta) = a - sign(d) D^{-1}(-zeta a + sign(d) a + |a|^2 a + i a - i f)`,
//! `D = -|d| d^2/dx^2 + 1`, decouples into 2x2 blocks, one per cosine mode `l`.
//! Writing `mu = zeta + d l^2 - E (d l^2 + sign d)`, an eigenvalue `E` of mode `l`
//! solves `mu^2 - 4|a|^2 mu + 1 + 3|a|^4 = 0`, so `mu = 2|a|^2 ± sqrt(|a|^4 - 1)`.
//!
//! The index of a trivial point inside the space of `2π/p`-periodic functions is
//! `(-1)^n` where `n` counts negative real `E` over the modes `l in {0, p, 2p, ...}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primary::{all_primary_points, PrimaryBifPoint};
use crate::trivial::{eval_trivial, modulus_sq, turning_points, Params, T_GUARD};

/// Eigenvalues closer to zero than this make a point degenerate.
pub const ZERO_EIGEN_TOL: f64 = 1e-10;
/// `|d l^2 + sign d|` below this makes a mode resonant.
pub const RESONANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub l: usize,
    /// Real eigenvalues of this mode, ascending.
    pub roots: Vec<f64>,
    /// True when `|a|^4 < 1`, i.e. the two eigenvalues are a complex-conjugate pair.
    pub complex_pair: bool,
}

impl ModeSpectrum {
    pub fn negative_count(&self) -> usize {
        self.roots.iter().filter(|&&e| e < 0.0).count()
    }
}

/// The quadratic `mu^2 - 4 A mu + 1 + 3 A^2` evaluated at the `mu` belonging to `e`.
pub fn eigenvalue_formula_residual(t: f64, l: usize, e: f64, p: &Params) -> Result<f64> {
    let tp = eval_trivial(t, p)?;
    let a2 = modulus_sq(t, p);
    let dl2 = p.d * (l * l) as f64;
    let mu = tp.zeta + dl2 - e * (dl2 + p.sign_d());
    Ok(mu * mu - 4.0 * a2 * mu + 1.0 + 3.0 * a2 * a2)
}

/// Real eigenvalues of the mode-`l` block at `(a(t), zeta(t))`.
pub fn mode_eigenvalues(t: f64, l: usize, p: &Params) -> Result<ModeSpectrum> {
    let tp = eval_trivial(t, p)?;
    let dl2 = p.d * (l * l) as f64;
    let denom = dl2 + p.sign_d();
    if denom.abs() < RESONANCE_TOL {
        return Err(Error::ResonantMode { l });
    }
    let a2 = modulus_sq(t, p);
    let disc = a2 * a2 - 1.0;
    if disc < 0.0 {
        return Ok(ModeSpectrum { l, roots: Vec::new(), complex_pair: true });
    }
    let sq = disc.sqrt();
    let mut roots: Vec<f64> =
        [2.0 * a2 + sq, 2.0 * a2 - sq].iter().map(|mu| (tp.zeta + dl2 - mu) / denom).collect();
    roots.sort_by(f64::total_cmp);
    Ok(ModeSpectrum { l, roots, complex_pair: false })
}

/// Negative-eigenvalue count of the linearization restricted to `2π/p_div`-periodic functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorseData {
    pub t: f64,
    pub p_div: usize,
    pub count: usize,
    pub iota: i32,
    /// Largest mode examined.
    pub cutoff: usize,
}

/// Largest `l` that can still carry a negative eigenvalue, rounded up to a multiple of `p_div`.
///
/// For `d > 0`, `E < 0` needs `d l^2 < mu_+ - zeta`; for `d < 0` it needs
/// `|d| l^2 < zeta - mu_-`. Both give an explicit finite range.
fn analytic_cutoff(t: f64, p_div: usize, p: &Params) -> Result<usize> {
    let tp = eval_trivial(t, p)?;
    let a2 = modulus_sq(t, p);
    let disc = a2 * a2 - 1.0;
    if disc < 0.0 {
        return Ok(0);
    }
    let sq = disc.sqrt();
    let room = if p.d > 0.0 { 2.0 * a2 + sq - tp.zeta } else { tp.zeta - (2.0 * a2 - sq) };
    if room <= 0.0 {
        return Ok(0);
    }
    let l = (room / p.d.abs()).sqrt().ceil() as usize;
    Ok(l.div_ceil(p_div) * p_div)
}

fn count_modes(t: f64, p_div: usize, cutoff: usize, p: &Params) -> Result<usize> {
    let mut count = 0;
    for l in (0..=cutoff).step_by(p_div) {
        let spec = mode_eigenvalues(t, l, p)?;
        if spec.roots.iter().any(|e| e.abs() < ZERO_EIGEN_TOL) {
            return Err(Error::DegeneratePoint { t, l });
        }
        count += spec.negative_count();
    }
    Ok(count)
}

/// Counts negative real eigenvalues over `l in {0, p_div, 2 p_div, ...}`.
pub fn morse_count(t: f64, p_div: usize, p: &Params) -> Result<MorseData> {
    if p_div == 0 {
        return Err(Error::InvalidParams("period divisor must be positive".into()));
    }
    let cutoff = analytic_cutoff(t, p_div, p)?;
    let count = count_modes(t, p_div, cutoff, p)?;
    let check = count_modes(t, p_div, cutoff + 2 * p_div, p)?;
    if check != count {
        return Err(Error::GenericityViolation(format!(
            "negative-eigenvalue count at t = {t} not stable under cutoff extension ({count} vs {check})"
        )));
    }
    Ok(MorseData { t, p_div, count, iota: if count % 2 == 0 { 1 } else { -1 }, cutoff })
}

/// Leray-Schauder index jump `delta*` at a primary point, seen from the ambient `2π/p_div` space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexJump {
    pub at: PrimaryBifPoint,
    pub p_div: usize,
    pub eps: f64,
    pub iota_left: i32,
    pub iota_right: i32,
    pub sign_zeta_prime: i32,
    pub delta_star: i32,
}

const EPS_START: f64 = 1e-3;
const EPS_FLOOR: f64 = 1e-10;
/// Distance from a turning point below which a primary point counts as sitting on it.
const FOLD_TOL: f64 = 1e-9;

/// Negative count contributed by the constant mode alone.
fn constant_mode_negatives(t: f64, p: &Params) -> Result<usize> {
    Ok(mode_eigenvalues(t, 0, p)?.negative_count())
}

/// `sign(zeta'(t)) * (iota(t + eps) - iota(t - eps))` with `eps` chosen adaptively.
pub fn index_jump(bp: &PrimaryBifPoint, p_div: usize, p: &Params) -> Result<IndexJump> {
    let others = all_primary_points(p)?;
    index_jump_with(bp, p_div, p, &others, &turning_points(p))
}

/// As [`index_jump`], with the primary point list and fold list supplied by the caller.
pub fn index_jump_with(
    bp: &PrimaryBifPoint,
    p_div: usize,
    p: &Params,
    primaries: &[PrimaryBifPoint],
    folds: &[f64],
) -> Result<IndexJump> {
    if p_div == 0 {
        return Err(Error::InvalidParams("period divisor must be positive".into()));
    }
    let t = bp.t;
    let zp = bp.point.zeta_prime;
    if zp == 0.0 || folds.iter().any(|tau| (tau - t).abs() < FOLD_TOL) {
        return Err(Error::TurningPointBifurcation { t });
    }

    let admissible = |eps: f64| -> bool {
        if (t - eps).abs() >= 1.0 - T_GUARD || (t + eps).abs() >= 1.0 - T_GUARD {
            return false;
        }
        let other_inside = primaries.iter().any(|o| {
            o.k % p_div == 0 && !(o.k == bp.k && o.slot == bp.slot) && (o.t - t).abs() <= eps
        });
        !other_inside && !folds.iter().any(|tau| (tau - t).abs() <= eps)
    };
    let side_counts = |eps: f64| -> Option<(usize, usize)> {
        let left = morse_count(t - eps, p_div, p).ok()?;
        let right = morse_count(t + eps, p_div, p).ok()?;
        Some((left.count, right.count))
    };

    let mut eps = EPS_START;
    while eps >= EPS_FLOOR {
        if admissible(eps) {
            if let (Some(here), Some(finer)) = (side_counts(eps), side_counts(eps / 2.0)) {
                if here == finer {
                    let (left, right) = here;
                    if constant_mode_negatives(t - eps, p)? != constant_mode_negatives(t + eps, p)? {
                        return Err(Error::GenericityViolation(format!(
                            "constant-mode eigenvalue crosses zero at t = {t}"
                        )));
                    }
                    let iota_left = if left % 2 == 0 { 1 } else { -1 };
                    let iota_right = if right % 2 == 0 { 1 } else { -1 };
                    let sign_zeta_prime = if zp > 0.0 { 1 } else { -1 };
                    return Ok(IndexJump {
                        at: *bp,
                        p_div,
                        eps,
                        iota_left,
                        iota_right,
                        sign_zeta_prime,
                        delta_star: sign_zeta_prime * (iota_right - iota_left),
                    });
                }
            }
        }
        eps /= 2.0;
    }
    Err(Error::NoStableEps { t })
}

/// Hard check that exactly mode `bp.k` has a zero eigenvalue at `bp`, and it is isolated.
pub fn check_simple_crossing(bp: &PrimaryBifPoint, p: &Params) -> Result<()> {
    let crit = mode_eigenvalues(bp.t, bp.k, p)?;
    if !crit.roots.iter().any(|e| e.abs() < 1e-8) {
        return Err(Error::GenericityViolation(format!(
            "no zero eigenvalue in mode {} at {}",
            bp.k,
            bp.label()
        )));
    }
    let cutoff = analytic_cutoff(bp.t, 1, p)?.max(bp.k) + 2;
    for l in (0..=cutoff).filter(|&l| l != bp.k) {
        let spec = mode_eigenvalues(bp.t, l, p)?;
        if spec.roots.iter().any(|e| e.abs() < 1e-6) {
            return Err(Error::GenericityViolation(format!(
                "mode {l} also has a near-zero eigenvalue at {}",
                bp.label()
            )));
        }
    }
    Ok(())
}
