//! Branch switching, pseudo-arclength tracing and secondary-point location.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::negative_real_count;
use super::galerkin::{fixed_point_weights, FourierState, Galerkin};
use super::newton::{newton_correct, tangent, Constraint};
use super::ContinuationConfig;
use crate::error::{Error, Result};
use crate::primary::{all_primary_points, PrimaryBifPoint};
use crate::spectral::check_simple_crossing;
use crate::trivial::Params;

/// Distance in `(zeta, amplitude)` within which a return is attributed to a primary point.
pub const NEAR_PRIMARY_TOL: f64 = 1e-2;
/// Arclength width to which [`locate_secondary`] narrows a bracket.
pub const BRACKET_WIDTH: f64 = 1e-4;
/// Corrector solves allowed per bracket.
pub const BRACKET_SOLVES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub state: FourierState,
    /// Accumulated arclength.
    pub s: f64,
    /// Unit tangent over all `2(L+1)` real coefficients followed by `zeta`.
    pub tangent: Vec<f64>,
    pub morse_in_ambient: usize,
    pub sym_residual: f64,
    /// `max_x |a(x) - c_0|`.
    pub amplitude: f64,
}

impl BranchPoint {
    /// `(-1)^morse * sign(dzeta/ds)`. Flips at bifurcations but not at folds,
    /// where the count and the direction of `zeta` change together.
    pub fn index_indicator(&self) -> i32 {
        let parity = if self.morse_in_ambient % 2 == 0 { 1 } else { -1 };
        let dz = self.tangent.last().copied().unwrap_or(0.0);
        if dz < 0.0 {
            -parity
        } else {
            parity
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Terminus {
    /// The branch came back to the trivial curve.
    ReturnedToTrivial { zeta: f64, amplitude: f64, near: Option<PrimaryBifPoint> },
    StepLimit,
    /// The coefficient norm left the a priori bound.
    Diverged { norm: f64 },
    /// The corrector kept failing down to the minimal step.
    StepUnderflow { s: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    pub origin: Option<PrimaryBifPoint>,
    pub terminus: Terminus,
    pub ambient_div: usize,
    /// Divisor used for `sym_residual`.
    pub symmetry_q: usize,
    pub params: Params,
    pub config: ContinuationConfig,
}

/// A pair of branch points across which the index indicator flips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondaryBracket {
    pub left: BranchPoint,
    pub right: BranchPoint,
}

impl SecondaryBracket {
    pub fn width(&self) -> f64 {
        self.right.s - self.left.s
    }
}

/// Negative real eigenvalue count of the fixed-point linearization `-diag(w)^{-1} J`
/// restricted to modes divisible by `ambient_div`.
pub fn ambient_morse(state: &FourierState, ambient_div: usize, galerkin: &Galerkin, p: &Params) -> Result<usize> {
    if ambient_div == 0 || state.sym_div % ambient_div != 0 {
        return Err(Error::Config(format!(
            "ambient divisor {ambient_div} must divide the state divisor {}",
            state.sym_div
        )));
    }
    let jac = galerkin.jacobian(state, p)?;
    let w = fixed_point_weights(state.modes(), p);
    let idx: Vec<usize> = (0..=state.modes())
        .filter(|l| l % ambient_div == 0)
        .flat_map(|l| [2 * l, 2 * l + 1])
        .collect();
    let m = DMatrix::from_fn(idx.len(), idx.len(), |i, j| -jac[(idx[i], idx[j])] / w[idx[i]]);
    negative_real_count(m)
}

/// Unit null vector `(re, im)` of the mode-`k` block of the linearization at `bp`.
pub fn kernel_direction(bp: &PrimaryBifPoint, p: &Params) -> [f64; 2] {
    let a = bp.point.a;
    let a2 = a.norm_sqr();
    let lin = Complex64::new(-p.d * (bp.k * bp.k) as f64 - bp.point.zeta, 1.0);
    let col = |h: Complex64| lin * h + 2.0 * a2 * h + a * a * h.conj();
    let (c0, c1) = (col(Complex64::new(1.0, 0.0)), col(Complex64::new(0.0, 1.0)));
    // Rows of the 2x2 block; take the better conditioned one.
    let rows = [[c0.re, c1.re], [c0.im, c1.im]];
    let r = if rows[0][0].hypot(rows[0][1]) >= rows[1][0].hypot(rows[1][1]) { rows[0] } else { rows[1] };
    let n = r[0].hypot(r[1]);
    if n == 0.0 {
        return [1.0, 0.0];
    }
    [-r[1] / n, r[0] / n]
}

/// Predictor state at a primary point: the trivial constant plus `sign * amplitude`
/// times the kernel direction in `c_k`. The state lives in the `k`-divisible modes.
pub fn branch_switch(
    bp: &PrimaryBifPoint,
    sign: f64,
    amplitude: f64,
    modes: usize,
    p: &Params,
) -> Result<FourierState> {
    check_simple_crossing(bp, p)?;
    if bp.k > modes {
        return Err(Error::Config(format!("mode {} exceeds truncation L = {modes}", bp.k)));
    }
    let [re, im] = kernel_direction(bp, p);
    let mut s = FourierState::trivial(&bp.point, modes, bp.k);
    s.coeffs[bp.k] = Complex64::new(re, im) * (sign.signum() * amplitude);
    Ok(s)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn nonconstant_part(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out[0] = 0.0;
    out[1] = 0.0;
    let n = out.len();
    out[n - 1] = 0.0;
    out
}

struct Tracer<'a> {
    galerkin: Galerkin,
    cfg: &'a ContinuationConfig,
    p: &'a Params,
    ambient_div: usize,
    symmetry_q: usize,
}

impl Tracer<'_> {
    fn point(&self, state: FourierState, s: f64, tangent: Vec<f64>) -> Result<BranchPoint> {
        let morse_in_ambient = ambient_morse(&state, self.ambient_div, &self.galerkin, self.p)?;
        let amplitude = self.galerkin.amplitude(&state);
        let sym_residual = state.sym_residual(self.symmetry_q);
        Ok(BranchPoint { state, s, tangent, morse_in_ambient, sym_residual, amplitude })
    }

    fn oriented_tangent(&self, state: &FourierState, reference: &[f64]) -> Result<Vec<f64>> {
        let mut t = tangent(state, reference, &self.galerkin, self.p)?;
        if dot(&t, reference) < 0.0 {
            t.iter_mut().for_each(|x| *x = -*x);
        }
        Ok(t)
    }

    /// Corrects the point at arclength offset `h` from `from` along its tangent.
    fn step(&self, from: &BranchPoint, h: f64) -> Result<(BranchPoint, usize)> {
        let u = from.state.to_vector();
        let guess: Vec<f64> = u.iter().zip(&from.tangent).map(|(a, t)| a + h * t).collect();
        let guess = FourierState::from_vector(&guess, from.state.sym_div);
        let c = newton_correct(
            &guess,
            Constraint::Arclength { prev: &u, tangent: &from.tangent, step: h },
            &self.galerkin,
            self.cfg,
            self.p,
        )?;
        let t = self.oriented_tangent(&c.state, &from.tangent)?;
        Ok((self.point(c.state, from.s + h, t)?, c.iterations))
    }
}

fn nearest_primary(zeta: f64, amplitude: f64, p: &Params) -> Option<PrimaryBifPoint> {
    all_primary_points(p)
        .ok()?
        .into_iter()
        .map(|bp| ((bp.point.zeta - zeta).hypot(amplitude), bp))
        .filter(|(dist, _)| *dist < NEAR_PRIMARY_TOL)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, bp)| bp)
}

/// Traces from `start`, leaving in the direction of its nonconstant part.
pub fn trace_branch(start: &FourierState, ambient_div: usize, cfg: &ContinuationConfig, p: &Params) -> Result<Branch> {
    let direction = nonconstant_part(&start.to_vector());
    trace_branch_with_direction(start, &direction, ambient_div, cfg, p)
}

/// Switches onto the primary branch at `bp` and traces it.
pub fn trace_from_primary(
    bp: &PrimaryBifPoint,
    sign: f64,
    ambient_div: usize,
    cfg: &ContinuationConfig,
    p: &Params,
) -> Result<Branch> {
    let start = branch_switch(bp, sign, cfg.switch_amplitude, cfg.modes, p)?;
    let mut branch = trace_branch(&start, ambient_div, cfg, p)?;
    branch.origin = Some(*bp);
    branch.symmetry_q = bp.k;
    Ok(branch)
}

/// Traces from `start` with the initial tangent oriented along `direction`
/// (flattened like [`FourierState::to_vector`]).
///
/// The start is first corrected on the hyperplane through it orthogonal to `direction`.
pub fn trace_branch_with_direction(
    start: &FourierState,
    direction: &[f64],
    ambient_div: usize,
    cfg: &ContinuationConfig,
    p: &Params,
) -> Result<Branch> {
    let galerkin = cfg.galerkin()?;
    if start.modes() != cfg.modes {
        return Err(Error::Config(format!("state has L = {}, config has L = {}", start.modes(), cfg.modes)));
    }
    let dn = dot(direction, direction).sqrt();
    if direction.len() != 2 * (cfg.modes + 1) + 1 || !(dn > 0.0) {
        return Err(Error::Config("initial direction must be a nonzero vector of length 2(L+1)+1".into()));
    }
    let reference: Vec<f64> = direction.iter().map(|x| x / dn).collect();
    let detected = start.detected_period_divisor(1e-8);
    let symmetry_q = if start.sym_div > 1 || detected == 0 { start.sym_div } else { detected };
    let tr = Tracer { galerkin, cfg, p, ambient_div, symmetry_q };

    let u0 = start.to_vector();
    let first = newton_correct(
        start,
        Constraint::Arclength { prev: &u0, tangent: &reference, step: 0.0 },
        &tr.galerkin,
        cfg,
        p,
    )?;
    let t0 = tr.oriented_tangent(&first.state, &reference)?;
    let mut points = vec![tr.point(first.state, 0.0, t0)?];

    let bound = 10.0 * (1.0 + p.f.abs());
    let mut armed = points[0].amplitude >= 2.0 * cfg.return_tol;
    let mut h = cfg.max_step;
    let mut easy = 0;
    let mut accepted = 0;
    let terminus = loop {
        if accepted >= cfg.budget {
            break Terminus::StepLimit;
        }
        let last = points.last().expect("nonempty");
        let (next, iters) = match tr.step(last, h) {
            Ok(r) => r,
            Err(_) => {
                h *= 0.5;
                easy = 0;
                if h < cfg.min_step {
                    break Terminus::StepUnderflow { s: last.s };
                }
                continue;
            }
        };
        accepted += 1;

        let norm = next.state.coeff_norm();
        if norm > bound {
            points.push(next);
            break Terminus::Diverged { norm };
        }

        if armed {
            // The branch may pass through the trivial curve between two points;
            // look for the closest approach of the nonconstant coefficients on the chord.
            let v0 = nonconstant_part(&last.state.to_vector());
            let v1 = nonconstant_part(&next.state.to_vector());
            let dv: Vec<f64> = v1.iter().zip(&v0).map(|(a, b)| a - b).collect();
            let dd = dot(&dv, &dv);
            let theta = if dd > 0.0 { -dot(&v0, &dv) / dd } else { -1.0 };
            if theta > 0.0 && theta < 1.0 {
                let closest: f64 =
                    v0.iter().zip(&dv).map(|(a, b)| (a + theta * b).powi(2)).sum::<f64>().sqrt();
                if closest < cfg.return_tol {
                    if let Ok((hit, _)) = tr.step(last, theta * h) {
                        if hit.amplitude < cfg.return_tol {
                            let (zeta, amplitude) = (hit.state.zeta, hit.amplitude);
                            points.push(hit);
                            break Terminus::ReturnedToTrivial { zeta, amplitude, near: nearest_primary(zeta, amplitude, p) };
                        }
                    }
                }
            }
            if next.amplitude < cfg.return_tol {
                let (zeta, amplitude) = (next.state.zeta, next.amplitude);
                points.push(next);
                break Terminus::ReturnedToTrivial { zeta, amplitude, near: nearest_primary(zeta, amplitude, p) };
            }
        } else if next.amplitude >= 2.0 * cfg.return_tol {
            armed = true;
        }
        points.push(next);

        if iters <= 3 {
            easy += 1;
            if easy >= 3 {
                h = (h * 1.3).min(cfg.max_step);
                easy = 0;
            }
        } else {
            easy = 0;
        }
        h = h.clamp(cfg.min_step, cfg.max_step);
    };

    Ok(Branch { points, origin: None, terminus, ambient_div, symmetry_q, params: *p, config: *cfg })
}

/// Consecutive points across which the index indicator flips, each narrowed by
/// arclength bisection.
///
/// The raw count of negative eigenvalues also changes at folds of the branch in
/// `zeta`; the indicator of [`BranchPoint::index_indicator`] discounts those.
pub fn locate_secondary(branch: &Branch, ambient_div: usize) -> Result<Vec<SecondaryBracket>> {
    if ambient_div != branch.ambient_div {
        return Err(Error::Config(format!(
            "branch was traced with ambient divisor {}, not {ambient_div}",
            branch.ambient_div
        )));
    }
    let galerkin = branch.config.galerkin()?;
    let tr = Tracer {
        galerkin,
        cfg: &branch.config,
        p: &branch.params,
        ambient_div,
        symmetry_q: branch.symmetry_q,
    };
    let mut out = Vec::new();
    for pair in branch.points.windows(2) {
        let (mut left, mut right) = (pair[0].clone(), pair[1].clone());
        if left.index_indicator() == right.index_indicator() {
            continue;
        }
        for _ in 0..BRACKET_SOLVES {
            let width = right.s - left.s;
            if width <= BRACKET_WIDTH {
                break;
            }
            let Ok((mid, _)) = tr.step(&left, 0.5 * width) else { break };
            if mid.index_indicator() == left.index_indicator() {
                left = mid;
            } else {
                right = mid;
            }
        }
        out.push(SecondaryBracket { left, right });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primary::find_primary_points;

    fn reference_params() -> Params {
        Params::new(0.1, 1.6).unwrap()
    }

    #[test]
    fn kernel_annihilates_the_mode_block() {
        let p = reference_params();
        for bp in all_primary_points(&p).unwrap() {
            let [re, im] = kernel_direction(&bp, &p);
            let g = Galerkin::new(bp.k, 3 * bp.k.max(1) + 3).unwrap();
            let mut s = FourierState::trivial(&bp.point, bp.k, 1);
            s.coeffs[bp.k] = Complex64::new(0.0, 0.0);
            let jac = g.jacobian(&s, &p).unwrap();
            let r0 = jac[(2 * bp.k, 2 * bp.k)] * re + jac[(2 * bp.k, 2 * bp.k + 1)] * im;
            let r1 = jac[(2 * bp.k + 1, 2 * bp.k)] * re + jac[(2 * bp.k + 1, 2 * bp.k + 1)] * im;
            assert!(r0.hypot(r1) < 1e-8, "{} {r0} {r1}", bp.label());
        }
    }

    #[test]
    fn switch_only_touches_mode_k() {
        let p = reference_params();
        let bp = find_primary_points(6, &p).unwrap()[0];
        let s = branch_switch(&bp, 1.0, 1e-2, 32, &p).unwrap();
        for (l, c) in s.coeffs.iter().enumerate().skip(1) {
            if l == 6 {
                assert!((c.norm() - 1e-2).abs() < 1e-15);
            } else {
                assert_eq!(c.norm(), 0.0);
            }
        }
        assert_eq!(s.zeta, bp.point.zeta);
        assert_eq!(s.sym_div, 6);
    }

    #[test]
    fn switch_rejects_too_small_truncation() {
        let p = reference_params();
        let bp = find_primary_points(7, &p).unwrap()[0];
        assert!(matches!(branch_switch(&bp, 1.0, 1e-2, 4, &p), Err(Error::Config(_))));
    }

    #[test]
    fn ambient_must_divide_state_divisor() {
        let p = reference_params();
        let g = Galerkin::new(8, 24).unwrap();
        let s = FourierState::zeros(8, 1.0, 6);
        assert!(ambient_morse(&s, 4, &g, &p).is_err());
        assert!(ambient_morse(&s, 3, &g, &p).is_ok());
    }

    #[test]
    fn indicator_discounts_folds() {
        let s = FourierState::zeros(1, 0.0, 1);
        let mk = |m: usize, dz: f64| BranchPoint {
            state: s.clone(),
            s: 0.0,
            tangent: vec![0.0, 0.0, 0.0, 0.0, dz],
            morse_in_ambient: m,
            sym_residual: 0.0,
            amplitude: 0.0,
        };
        assert_eq!(mk(2, 1.0).index_indicator(), mk(3, -1.0).index_indicator());
        assert_ne!(mk(2, 1.0).index_indicator(), mk(3, 1.0).index_indicator());
    }
}
