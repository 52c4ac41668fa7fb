//! The curve of constant solutions of the stationary Lugiato-Lefever equation
//!
//! ```text
//!     d a'' + (i - zeta) a + |a|^2 a - i f = 0
//! ```
//!
//! Constant solutions form a single smooth curve parametrized by `t in (-1, 1)`:
//!
//! ```text
//!     a(t)    = f (1 - t^2) - i f t (1 - t^2)^{1/2}
//!     zeta(t) = f^2 (1 - t^2) + t (1 - t^2)^{-1/2}
//! ```
//!
//! so that `|a(t)|^2 = f^2 (1 - t^2)`. The curve is unbounded at `t = ±1` and may
//! fold back in `zeta` (turning points), which is why `t` rather than `zeta` is
//! the master parameter everywhere in this crate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{bisect_newton, sign_change_brackets};

/// Distance to `t = ±1` below which the parametrization is refused.
pub const T_GUARD: f64 = 1e-9;

/// Physical constants of one LLE instance: dispersion `d` and forcing `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub d: f64,
    pub f: f64,
}

impl Params {
    pub fn new(d: f64, f: f64) -> Result<Self> {
        if !d.is_finite() || !f.is_finite() {
            return Err(Error::InvalidParams(format!("d = {d}, f = {f} must be finite")));
        }
        if d == 0.0 {
            return Err(Error::InvalidParams("dispersion d must be nonzero".into()));
        }
        if f == 0.0 {
            return Err(Error::InvalidParams("forcing f must be nonzero".into()));
        }
        Ok(Params { d, f })
    }

    /// `sign(d)` as ±1.
    pub fn sign_d(&self) -> f64 {
        self.d.signum()
    }
}

/// A point on the trivial curve together with its `t`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrivialPoint {
    pub t: f64,
    pub a: Complex64,
    pub zeta: f64,
    pub a_prime: Complex64,
    pub zeta_prime: f64,
}

impl TrivialPoint {
    /// `|a|^2`, evaluated through the closed form `f^2 (1 - t^2)`.
    pub fn modulus_sq(&self, p: &Params) -> f64 {
        modulus_sq(self.t, p)
    }
}

fn check_domain(t: f64) -> Result<()> {
    if !t.is_finite() || t.abs() >= 1.0 - T_GUARD {
        return Err(Error::Domain { t });
    }
    Ok(())
}

/// `|a(t)|^2 = f^2 (1 - t^2)`.
pub fn modulus_sq(t: f64, p: &Params) -> f64 {
    p.f * p.f * (1.0 - t * t)
}

/// Evaluates the constant solution and its tangent at curve parameter `t`.
pub fn eval_trivial(t: f64, p: &Params) -> Result<TrivialPoint> {
    check_domain(t)?;
    let f = p.f;
    let s = 1.0 - t * t;
    let r = s.sqrt();
    let a = Complex64::new(f * s, -f * t * r);
    let zeta = f * f * s + t / r;
    let a_prime = Complex64::new(-2.0 * f * t, -f * (1.0 - 2.0 * t * t) / r);
    Ok(TrivialPoint { t, a, zeta, a_prime, zeta_prime: zeta_prime_unchecked(t, p) })
}

/// `zeta(t)` alone.
pub fn zeta_at(t: f64, p: &Params) -> Result<f64> {
    check_domain(t)?;
    let s = 1.0 - t * t;
    Ok(p.f * p.f * s + t / s.sqrt())
}

fn zeta_prime_unchecked(t: f64, p: &Params) -> f64 {
    let s = 1.0 - t * t;
    -2.0 * p.f * p.f * t + s.powf(-1.5)
}

fn zeta_second_unchecked(t: f64, p: &Params) -> f64 {
    let s = 1.0 - t * t;
    -2.0 * p.f * p.f + 3.0 * t * s.powf(-2.5)
}

/// `d zeta / dt = -2 f^2 t + (1 - t^2)^{-3/2}`.
pub fn zeta_prime(t: f64, p: &Params) -> Result<f64> {
    check_domain(t)?;
    Ok(zeta_prime_unchecked(t, p))
}

/// `d^2 zeta / dt^2 = -2 f^2 + 3 t (1 - t^2)^{-5/2}`.
pub fn zeta_second(t: f64, p: &Params) -> Result<f64> {
    check_domain(t)?;
    Ok(zeta_second_unchecked(t, p))
}

/// Number of grid intervals used when scanning `(-1, 1)` for sign changes.
pub const SCAN_INTERVALS: usize = 10_000;

/// All folds of the trivial curve, i.e. the zeros of `zeta'(t)` in `(-1, 1)`, ascending.
pub fn turning_points(p: &Params) -> Vec<f64> {
    let lo = -1.0 + T_GUARD;
    let hi = 1.0 - T_GUARD;
    let zp = |t: f64| zeta_prime_unchecked(t, p);
    let zpp = |t: f64| zeta_second_unchecked(t, p);
    sign_change_brackets(zp, lo, hi, SCAN_INTERVALS)
        .into_iter()
        .map(|(a, b)| bisect_newton(zp, zpp, a, b, 1e-13))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference_params() -> Params {
        Params::new(0.1, 1.6).unwrap()
    }

    #[test]
    fn rejects_zero_constants() {
        assert!(matches!(Params::new(0.0, 1.0), Err(Error::InvalidParams(_))));
        assert!(matches!(Params::new(0.1, 0.0), Err(Error::InvalidParams(_))));
        assert!(Params::new(-0.1, -2.0).is_ok());
    }

    #[test]
    fn origin_of_the_curve() {
        let p = reference_params();
        let tp = eval_trivial(0.0, &p).unwrap();
        assert_eq!(tp.a, Complex64::new(1.6, 0.0));
        assert_relative_eq!(tp.zeta, 2.56, epsilon = 1e-15);
    }

    #[test]
    fn tabulated_zeta_values() {
        let p = reference_params();
        assert!((eval_trivial(0.77130, &p).unwrap().zeta - 2.24888).abs() < 2e-5);
        assert!((eval_trivial(-0.20600, &p).unwrap().zeta - 2.24085).abs() < 2e-5);
    }

    #[test]
    fn domain_guard() {
        let p = reference_params();
        assert!(matches!(eval_trivial(1.0 - 1e-10, &p), Err(Error::Domain { .. })));
        assert!(matches!(eval_trivial(-1.0, &p), Err(Error::Domain { .. })));
        assert!(matches!(eval_trivial(f64::NAN, &p), Err(Error::Domain { .. })));
        assert!(eval_trivial(0.999_999, &p).is_ok());
    }

    #[test]
    fn turning_points_are_simple_folds() {
        let p = reference_params();
        let tps = turning_points(&p);
        assert_eq!(tps.len(), 2);
        for &tau in &tps {
            assert!(zeta_prime(tau, &p).unwrap().abs() < 1e-9);
            assert!(zeta_second(tau, &p).unwrap().abs() > 1e-3);
        }
        // The fold equation 2 f^2 t (1 - t^2)^{3/2} = 1 has no solution for small forcing.
        assert!(turning_points(&Params::new(0.1, 0.1).unwrap()).is_empty());
    }

    #[test]
    fn monotone_between_turning_points() {
        let p = reference_params();
        let mut cuts = vec![-0.999];
        cuts.extend(turning_points(&p));
        cuts.push(0.999);
        for w in cuts.windows(2) {
            let (a, b) = (w[0] + 1e-3, w[1] - 1e-3);
            let n = ((b - a) / 1e-3) as usize;
            let vals: Vec<f64> = (0..=n).map(|i| zeta_at(a + (b - a) * i as f64 / n as f64, &p).unwrap()).collect();
            let inc = vals[1] > vals[0];
            assert!(vals.windows(2).all(|v| (v[1] > v[0]) == inc));
        }
    }
}
