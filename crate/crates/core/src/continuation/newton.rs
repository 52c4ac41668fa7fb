//! Damped Newton corrector on the (optionally bordered) Galerkin system.

use nalgebra::{DMatrix, DVector};

use super::galerkin::{FourierState, Galerkin};
use super::ContinuationConfig;
use crate::error::{Error, Result};
use crate::trivial::Params;

/// Extra equation closing the system.
#[derive(Debug, Clone, Copy)]
pub enum Constraint<'a> {
    /// `zeta` is held at the value of the initial guess.
    FixedZeta,
    /// `tangent . (u - prev) = step`, with `u` the flattened unknowns (coefficients then `zeta`).
    Arclength { prev: &'a [f64], tangent: &'a [f64], step: f64 },
}

/// Indices of the active real unknowns (coefficients only) for a state.
pub(crate) fn active_indices(state: &FourierState) -> Vec<usize> {
    (0..=state.modes()).filter(|&l| state.is_active(l)).flat_map(|l| [2 * l, 2 * l + 1]).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Outcome of a successful correction.
#[derive(Debug, Clone)]
pub struct Corrected {
    pub state: FourierState,
    pub iterations: usize,
    pub residual_norm: f64,
}

fn constraint_value(c: &Constraint, u: &[f64]) -> f64 {
    match c {
        Constraint::FixedZeta => 0.0,
        Constraint::Arclength { prev, tangent, step } => {
            tangent.iter().zip(u.iter().zip(prev.iter())).map(|(t, (a, b))| t * (a - b)).sum::<f64>() - step
        }
    }
}

/// Newton iteration for `R(c, zeta) = 0` plus the constraint, restricted to the state's
/// active modes. Converged when `|R| < newton_tol` and the constraint holds to the same tolerance.
pub fn newton_correct(
    guess: &FourierState,
    constraint: Constraint,
    galerkin: &Galerkin,
    cfg: &ContinuationConfig,
    p: &Params,
) -> Result<Corrected> {
    let active = active_indices(guess);
    let bordered = matches!(constraint, Constraint::Arclength { .. });
    let dim = active.len() + usize::from(bordered);
    let zeta_index = 2 * (guess.modes() + 1);

    let mut state = guess.clone();
    let merit = |s: &FourierState| -> Result<(f64, f64)> {
        let r = norm(&galerkin.residual(s, p)?);
        let g = constraint_value(&constraint, &s.to_vector()).abs();
        Ok((r, g))
    };

    let (mut res, mut gval) = merit(&state)?;
    for it in 0..=cfg.max_iters {
        if res < cfg.newton_tol && gval < cfg.newton_tol {
            return Ok(Corrected { state, iterations: it, residual_norm: res });
        }
        if it == cfg.max_iters {
            break;
        }
        let r = galerkin.residual(&state, p)?;
        let jac = galerkin.jacobian(&state, p)?;
        let zcol = galerkin.zeta_column(&state);
        let u = state.to_vector();

        let mut sys = DMatrix::zeros(dim, dim);
        let mut rhs = DVector::zeros(dim);
        for (i, &ri) in active.iter().enumerate() {
            for (j, &cj) in active.iter().enumerate() {
                sys[(i, j)] = jac[(ri, cj)];
            }
            rhs[i] = -r[ri];
            if bordered {
                sys[(i, dim - 1)] = zcol[ri];
            }
        }
        if let Constraint::Arclength { tangent, .. } = constraint {
            for (j, &cj) in active.iter().enumerate() {
                sys[(dim - 1, j)] = tangent[cj];
            }
            sys[(dim - 1, dim - 1)] = tangent[zeta_index];
            rhs[dim - 1] = -constraint_value(&constraint, &u);
        }
        let delta = sys.lu().solve(&rhs).ok_or(Error::SingularJacobian)?;
        if delta.iter().any(|x| !x.is_finite()) {
            return Err(Error::SingularJacobian);
        }

        // Backtracking on |R|^2 + g^2; keep the best trial if none improves.
        let current = res * res + gval * gval;
        let mut best: Option<(f64, FourierState, f64, f64)> = None;
        let mut lambda = 1.0;
        for _ in 0..7 {
            let mut v = u.clone();
            for (i, &ai) in active.iter().enumerate() {
                v[ai] += lambda * delta[i];
            }
            if bordered {
                v[zeta_index] += lambda * delta[dim - 1];
            }
            let trial = FourierState::from_vector(&v, state.sym_div);
            let (tr, tg) = merit(&trial)?;
            let m = tr * tr + tg * tg;
            if m.is_finite() && best.as_ref().is_none_or(|b| m < b.0) {
                best = Some((m, trial, tr, tg));
            }
            if m < current {
                break;
            }
            lambda *= 0.5;
        }
        let (_, next, nr, ng) = best.ok_or(Error::NoConvergence { iters: it + 1, residual: res })?;
        state = next;
        res = nr;
        gval = ng;
    }
    Err(Error::NoConvergence { iters: cfg.max_iters, residual: res })
}

/// Unit tangent of the solution curve through `state`: solves
/// `[J  J_zeta; reference^T] tau = [0; 1]` on the active unknowns and normalizes.
pub fn tangent(state: &FourierState, reference: &[f64], galerkin: &Galerkin, p: &Params) -> Result<Vec<f64>> {
    let active = active_indices(state);
    let dim = active.len() + 1;
    let zeta_index = 2 * (state.modes() + 1);
    let jac = galerkin.jacobian(state, p)?;
    let zcol = galerkin.zeta_column(state);
    let mut sys = DMatrix::zeros(dim, dim);
    let mut rhs = DVector::zeros(dim);
    for (i, &ri) in active.iter().enumerate() {
        for (j, &cj) in active.iter().enumerate() {
            sys[(i, j)] = jac[(ri, cj)];
        }
        sys[(i, dim - 1)] = zcol[ri];
    }
    for (j, &cj) in active.iter().enumerate() {
        sys[(dim - 1, j)] = reference[cj];
    }
    sys[(dim - 1, dim - 1)] = reference[zeta_index];
    rhs[dim - 1] = 1.0;
    let sol = sys.lu().solve(&rhs).ok_or(Error::SingularJacobian)?;
    let n = sol.norm();
    if !n.is_finite() || n == 0.0 {
        return Err(Error::SingularJacobian);
    }
    let mut out = vec![0.0; zeta_index + 1];
    for (i, &ai) in active.iter().enumerate() {
        out[ai] = sol[i] / n;
    }
    out[zeta_index] = sol[dim - 1] / n;
    Ok(out)
}
