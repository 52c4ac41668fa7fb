//! A scalar map that is differentiable, vanishes on `x = 0`, has a simple sign change
//! of `F_x(0, ·)` at `λ = 0`, and still bifurcates at every `λ_n = 2^{-n}`.
//!
//! The building block is
//!
//! ```text
//!     f(x, λ) = x - sin^2(x λ^{-3}) λ^3 / M,   f(x, 0) = x,   M = max_z sin^2(z) / z,
//! ```
//!
//! which is not locally uniformly differentiable along `x = 0`. Copies of it shifted to
//! `±2^{-k}` and localized by a smooth cutoff `χ` are summed into
//!
//! ```text
//!     F(x, λ) = λ ( sum_k χ(a 2^k (λ - 2^{-k})) f(x, λ - 2^{-k})
//!                 + sum_k χ(a 2^k (λ + 2^{-k})) f(x, λ + 2^{-k}) ),   2 < a < 3.
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`verify_counterexample`]; beyond it `λ_n^3` underflows the checks.
pub const MAX_SCALE: u32 = 40;
const GOLDEN_TOL: f64 = 1e-14;
const SIGN_SAMPLES: usize = 2000;
const BOUND_SAMPLES: usize = 2000;
const SEED: u64 = 0x5eed;

/// Smooth cutoff profile: 1 on `|z| <= 1/2`, strictly between 0 and 1 on `1/2 < |z| < 1`,
/// 0 on `|z| >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Bump {
    /// Built from `g(s) = exp(-1/s)`; smooth.
    #[default]
    Exponential,
    /// Quintic smoothstep; twice continuously differentiable.
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CexParams {
    /// Localization rate `a`, in `(2, 3)`.
    pub a_cut: f64,
    pub z_star: f64,
    /// `sin^2(z_star) / z_star`.
    pub m: f64,
    pub bump: Bump,
}

impl CexParams {
    pub fn new(a_cut: f64) -> Result<Self> {
        if !(a_cut > 2.0 && a_cut < 3.0) {
            return Err(Error::InvalidParams(format!("a_cut = {a_cut} must lie in (2, 3)")));
        }
        let (z_star, m) = maximize_sin2_over_z();
        Ok(CexParams { a_cut, z_star, m, bump: Bump::Exponential })
    }

    pub fn with_bump(self, bump: Bump) -> Self {
        CexParams { bump, ..self }
    }

    /// `min{(a-1)/(2a), (a-2)/a}`: relative half-width of the window around `2^{-n}`
    /// in which only one cutoff is active and equals 1.
    pub fn isolation_ratio(&self) -> f64 {
        let a = self.a_cut;
        ((a - 1.0) / (2.0 * a)).min((a - 2.0) / a)
    }
}

impl Default for CexParams {
    fn default() -> Self {
        CexParams::new(2.5).expect("2.5 lies in (2, 3)")
    }
}

fn sin2_over_z(z: f64) -> f64 {
    z.sin().powi(2) / z
}

/// Maximizer `z*` of `sin^2(z)/z` and the maximum `M`.
///
/// Golden-section search brackets the maximizer; the flat top limits it to about
/// `sqrt(eps)`, so a few Newton steps on the stationarity condition `2z cos z = sin z` follow.
pub fn maximize_sin2_over_z() -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.5f64, 2.0f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (sin2_over_z(x1), sin2_over_z(x2));
    while hi - lo > GOLDEN_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = sin2_over_z(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = sin2_over_z(x1);
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..4 {
        let phi = 2.0 * z * z.cos() - z.sin();
        let dphi = z.cos() - 2.0 * z * z.sin();
        let next = z - phi / dphi;
        if !next.is_finite() || (next - z).abs() > 1e-6 {
            break;
        }
        z = next;
    }
    (z, sin2_over_z(z))
}

fn smooth_g(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// The cutoff `χ`.
pub fn chi(z: f64, bump: Bump) -> f64 {
    let r = z.abs();
    if r <= 0.5 {
        return 1.0;
    }
    if r >= 1.0 {
        return 0.0;
    }
    match bump {
        Bump::Exponential => {
            let up = smooth_g(2.0 - 2.0 * r);
            up / (up + smooth_g(2.0 * r - 1.0))
        }
        Bump::Polynomial => {
            let u = 2.0 - 2.0 * r;
            u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
        }
    }
}

/// `1 - χ(z)` without cancellation. Near `|z| = 1/2` the smooth bump is within an ulp of 1,
/// so strictness of `χ < 1` is only visible here.
pub fn chi_complement(z: f64, bump: Bump) -> f64 {
    let r = z.abs();
    if r <= 0.5 {
        return 0.0;
    }
    if r >= 1.0 {
        return 1.0;
    }
    match bump {
        Bump::Exponential => {
            let down = smooth_g(2.0 * r - 1.0);
            down / (smooth_g(2.0 - 2.0 * r) + down)
        }
        Bump::Polynomial => chi(1.5 - r, bump),
    }
}

/// `f(x, λ)`.
pub fn f_cex(x: f64, lambda: f64, c: &CexParams) -> f64 {
    if lambda == 0.0 {
        return x;
    }
    let l3 = lambda.powi(3);
    x - (x / l3).sin().powi(2) * l3 / c.m
}

/// `(f(x_λ,λ) - f(0,λ) - f_x(0,λ) x_λ) / x_λ` at `x_λ = z* λ^3`.
pub fn uniform_diff_quotient(lambda: f64, c: &CexParams) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::InvalidParams("the quotient is undefined at lambda = 0".into()));
    }
    let l3 = lambda.powi(3);
    let x = c.z_star * l3;
    let u = x / l3;
    Ok(u.sin().powi(2) / (c.m * u))
}

/// The (at most two) `k` for which `χ(a 2^k (μ - 2^{-k}))` can be nonzero, for `μ > 0`.
///
/// Nonzero requires `2^k μ ∈ ((a-1)/a, (a+1)/a) ⊂ (1/2, 2)`.
fn candidates(mu: f64) -> [i32; 2] {
    let mut k = (-mu.log2()).floor() as i32;
    // Fix rounding so that 2^k μ lies in (1/2, 1].
    while mu * 2f64.powi(k) > 1.0 {
        k -= 1;
    }
    while mu * 2f64.powi(k) <= 0.5 {
        k += 1;
    }
    [k, k + 1]
}

fn summand(x: f64, lambda: f64, k: i32, shift_sign: f64, c: &CexParams) -> (f64, f64) {
    let pk = 2f64.powi(k);
    let shifted = lambda - shift_sign * 2f64.powi(-k);
    let w = chi(c.a_cut * pk * shifted, c.bump);
    if w == 0.0 {
        return (0.0, 0.0);
    }
    (w, w * f_cex(x, shifted, c))
}

/// `(sum of cutoffs, sum of cutoff * f)` over the nonzero terms.
fn active_sums(x: f64, lambda: f64, c: &CexParams) -> (f64, f64) {
    if lambda == 0.0 {
        return (0.0, 0.0);
    }
    // For λ > 0 only the first series can be active, for λ < 0 only the second.
    let sign = lambda.signum();
    candidates(lambda.abs()).iter().fold((0.0, 0.0), |(ws, fs), &k| {
        let (w, v) = summand(x, lambda, k, sign, c);
        (ws + w, fs + v)
    })
}

/// `F(x, λ)`.
#[allow(non_snake_case)]
pub fn F_cex(x: f64, lambda: f64, c: &CexParams) -> f64 {
    lambda * active_sums(x, lambda, c).1
}

/// `F` by direct summation of both series over `k ∈ [-k_range, k_range]`.
#[allow(non_snake_case)]
pub fn F_cex_brute(x: f64, lambda: f64, k_range: i32, c: &CexParams) -> f64 {
    let mut sum = 0.0;
    for sign in [1.0, -1.0] {
        for k in -k_range..=k_range {
            sum += summand(x, lambda, k, sign, c).1;
        }
    }
    lambda * sum
}

/// `F_x(0, λ) = λ (sum of active cutoffs)`.
pub fn fx_at_zero(lambda: f64, c: &CexParams) -> f64 {
    lambda * active_sums(0.0, lambda, c).0
}

/// Checks `F_x(0, λ) λ > 0` at every nonzero grid point; returns how many were checked.
pub fn check_sign_condition(grid: &[f64], c: &CexParams) -> Result<usize> {
    let mut checked = 0;
    for &lambda in grid {
        if lambda == 0.0 {
            continue;
        }
        let v = fx_at_zero(lambda, c) * lambda;
        if !(v > 0.0) {
            return Err(Error::ReportedFailure {
                claim: "(ii) sign change of F_x(0, λ) at λ = 0".into(),
                detail: format!("F_x(0, λ) λ = {v:e} at λ = {lambda:e}"),
            });
        }
        checked += 1;
    }
    Ok(checked)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub claim: String,
    pub passed: bool,
    pub checked: usize,
    /// Largest observed ratio to the claimed bound (0 when the claim is qualitative).
    pub worst_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub params: CexParams,
    pub n_max: u32,
    pub claims: Vec<ClaimResult>,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }
}

/// Nontrivial zeros close to `(0, 2^{-n})` for `n = 1..=n_max`, taken at half the
/// isolation width. Returns the largest `|F| / (|λ| |x|)` seen.
fn check_zeros(n_max: u32, c: &CexParams) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        let base = 2f64.powi(-(n as i32));
        let offset = 0.5 * c.isolation_ratio() * base;
        let x = c.z_star * offset.powi(3);
        let lambda = base + offset;
        let v = F_cex(x, lambda, c);
        let ratio = v.abs() / (lambda.abs() * x.abs());
        worst = worst.max(ratio);
        if x == 0.0 || !(ratio < 1e-12) {
            return Err(Error::ReportedFailure {
                claim: "(iii) bifurcation at λ_n = 2^-n".into(),
                detail: format!("n = {n}: F({x:e}, {lambda:e}) = {v:e}"),
            });
        }
    }
    Ok(worst)
}

fn sign_grid(n_max: u32) -> Vec<f64> {
    let lo = 2f64.powi(-(n_max as i32) - 2);
    let hi = 4.0f64;
    let ratio = (hi / lo).ln();
    let mut grid: Vec<f64> = (0..SIGN_SAMPLES)
        .map(|i| lo * (ratio * i as f64 / (SIGN_SAMPLES - 1) as f64).exp())
        .flat_map(|l| [l, -l])
        .collect();
    // The points 2^-n themselves and the window edges.
    for n in 0..=n_max as i32 {
        let b = 2f64.powi(-n);
        grid.extend([b, -b, 1.5 * b, -1.5 * b]);
    }
    grid.push(0.0);
    grid
}

fn check_bound(n_max: u32, c: &CexParams) -> Result<(usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let scale = n_max as f64 + 2.0;
    let mut worst = 0.0f64;
    for _ in 0..BOUND_SAMPLES {
        let lambda = rng.gen_range(-1.0..1.0) * 2f64.powf(-rng.gen_range(0.0..scale));
        let x = rng.gen_range(-1.0..1.0) * 2f64.powf(-rng.gen_range(0.0..3.0 * scale));
        let v = F_cex(x, lambda, c);
        let bound = 4.0 * lambda.abs() * x.abs();
        if bound > 0.0 {
            worst = worst.max(v.abs() / bound);
        }
        if v.abs() > bound {
            return Err(Error::ReportedFailure {
                claim: "(i) |F(x, λ)| <= 4 |λ| |x|".into(),
                detail: format!("F({x:e}, {lambda:e}) = {v:e} exceeds {bound:e}"),
            });
        }
    }
    Ok((BOUND_SAMPLES, worst))
}

/// Runs the three quantitative checks; fails with the first violated claim.
pub fn verify_counterexample(n_max: u32, c: &CexParams) -> Result<CounterexampleReport> {
    if n_max == 0 || n_max > MAX_SCALE {
        return Err(Error::InvalidParams(format!("n_max = {n_max} must lie in 1..={MAX_SCALE}")));
    }
    let zeros = check_zeros(n_max, c)?;
    let signs = check_sign_condition(&sign_grid(n_max), c)?;
    let (bounded, bound_ratio) = check_bound(n_max, c)?;
    Ok(CounterexampleReport {
        params: *c,
        n_max,
        claims: vec![
            ClaimResult { claim: "(i) |F(x, λ)| <= 4 |λ| |x|".into(), passed: true, checked: bounded, worst_ratio: bound_ratio },
            ClaimResult { claim: "(ii) F_x(0, λ) λ > 0 for λ != 0".into(), passed: true, checked: signs, worst_ratio: 0.0 },
            ClaimResult { claim: "(iii) nontrivial zeros near (0, 2^-n)".into(), passed: true, checked: n_max as usize, worst_ratio: zeros },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximizer_is_stationary() {
        let (z, m) = maximize_sin2_over_z();
        assert!((z - 1.165561).abs() < 1e-5);
        assert_eq!(m, sin2_over_z(z));
        let deriv = z.sin() * (2.0 * z * z.cos() - z.sin()) / (z * z);
        assert!(deriv.abs() < 1e-12);
        assert!(sin2_over_z(z + 1e-4) < m && sin2_over_z(z - 1e-4) < m);
    }

    #[test]
    fn rejects_rate_outside_interval() {
        assert!(CexParams::new(2.0).is_err());
        assert!(CexParams::new(3.0).is_err());
        assert!(CexParams::new(f64::NAN).is_err());
    }

    #[test]
    fn f_on_its_zero_curve() {
        let c = CexParams::default();
        let l = 0.1f64;
        assert!(f_cex(c.z_star * l.powi(3), l, &c).abs() < 1e-14);
        assert_eq!(f_cex(0.37, 0.0, &c), 0.37);
        assert_eq!(f_cex(0.0, 0.3, &c), 0.0);
    }

    #[test]
    fn quotient_is_one() {
        let c = CexParams::default();
        for l in [1.0, 1e-2, 1e-5] {
            assert!((uniform_diff_quotient(l, &c).unwrap() - 1.0).abs() < 1e-10);
        }
        assert!(uniform_diff_quotient(0.0, &c).is_err());
    }

    #[test]
    fn zero_on_the_trivial_line() {
        let c = CexParams::default();
        for l in [-3.0, -0.2, 0.0, 1e-9, 0.7] {
            assert_eq!(F_cex(0.0, l, &c), 0.0);
        }
    }

    #[test]
    fn zero_near_lambda_four() {
        let c = CexParams::new(2.5).unwrap();
        let lp = 0.5 * ((2.5 - 1.0) / 5.0f64).min(0.5 / 2.5) * 2f64.powi(-4);
        let v = F_cex(c.z_star * lp.powi(3), 2f64.powi(-4) + lp, &c);
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn candidate_window() {
        for mu in [1e-9, 0.3, 0.5, 1.0, 1.0 + 1e-15, 7.0] {
            let [k, _] = candidates(mu);
            let y = mu * 2f64.powi(k);
            assert!(y > 0.5 && y <= 1.0, "mu = {mu}");
        }
    }

    #[test]
    fn vanishes_in_a_cutoff_gap() {
        // Gaps between consecutive windows need a >= 3; build such parameters by hand.
        let c = CexParams { a_cut: 3.5, ..CexParams::default() };
        for x in [-1.0, 1e-3, 0.5] {
            assert_eq!(F_cex(x, 0.68, &c), 0.0);
            assert_eq!(F_cex(x, -0.68 * 0.25, &c), 0.0);
        }
    }

    #[test]
    fn sign_check_skips_zero() {
        let c = CexParams::default();
        assert_eq!(check_sign_condition(&[0.0, 0.25, -0.25], &c).unwrap(), 2);
        assert_eq!(check_sign_condition(&[0.0], &c).unwrap(), 0);
    }

    #[test]
    fn scale_guard() {
        let c = CexParams::default();
        assert!(verify_counterexample(0, &c).is_err());
        assert!(verify_counterexample(41, &c).is_err());
    }
}
