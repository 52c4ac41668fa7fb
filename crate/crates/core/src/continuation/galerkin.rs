//! Cosine-Galerkin discretization of `d a'' + (i - zeta) a + |a|^2 a - i f = 0` on `[0, π]`
//! with homogeneous Neumann conditions.
//!
//! A state is `a(x) = sum_{l=0}^{L} c_l cos(l x)`. The cubic term is evaluated on the
//! `N + 1` nodes `x_j = j π / N` and projected back with the trapezoidal rule, which is
//! exact for the degree-`4L` trigonometric products involved as long as `N > 2L`.
//! We require `N >= 3L`.
//!
//! Real unknowns are interleaved per mode: index `2l` is `Re c_l`, `2l + 1` is `Im c_l`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trivial::{Params, TrivialPoint};

/// A discretized solution candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierState {
    pub zeta: f64,
    /// Cosine coefficients `c_0..=c_L`.
    pub coeffs: Vec<Complex64>,
    /// Only modes divisible by `sym_div` are active; the rest stay exactly zero.
    pub sym_div: usize,
}

impl FourierState {
    pub fn zeros(modes: usize, zeta: f64, sym_div: usize) -> Self {
        FourierState { zeta, coeffs: vec![Complex64::new(0.0, 0.0); modes + 1], sym_div: sym_div.max(1) }
    }

    /// The constant state sitting on the trivial curve.
    pub fn trivial(tp: &TrivialPoint, modes: usize, sym_div: usize) -> Self {
        let mut s = FourierState::zeros(modes, tp.zeta, sym_div);
        s.coeffs[0] = tp.a;
        s
    }

    /// Truncation order `L`.
    pub fn modes(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_active(&self, l: usize) -> bool {
        l % self.sym_div == 0
    }

    /// Relative coefficient energy outside the `q`-divisible modes.
    pub fn sym_residual(&self, q: usize) -> f64 {
        let q = q.max(1);
        let total: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let outside: f64 =
            self.coeffs.iter().enumerate().filter(|(l, _)| l % q != 0).map(|(_, c)| c.norm_sqr()).sum();
        outside / total
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Euclidean norm of the non-constant coefficients.
    pub fn nonconstant_norm(&self) -> f64 {
        self.coeffs[1..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Flattened unknowns `[Re c_0, Im c_0, ..., Re c_L, Im c_L, zeta]`.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.coeffs.len() + 1);
        for c in &self.coeffs {
            v.push(c.re);
            v.push(c.im);
        }
        v.push(self.zeta);
        v
    }

    pub fn from_vector(v: &[f64], sym_div: usize) -> Self {
        let n = (v.len() - 1) / 2;
        let coeffs = (0..n).map(|l| Complex64::new(v[2 * l], v[2 * l + 1])).collect();
        FourierState { zeta: v[v.len() - 1], coeffs, sym_div }
    }

    /// Greatest common divisor of the modes `l >= 1` carrying coefficients above
    /// `rel_tol * max|c|`; 0 when the state is constant.
    pub fn detected_period_divisor(&self, rel_tol: f64) -> usize {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| c.norm() > rel_tol * max)
            .fold(0, |g, (l, _)| gcd(g, l))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Synthesis/analysis tables for one `(L, N)` pair.
#[derive(Debug, Clone)]
pub struct Galerkin {
    modes: usize,
    nodes: usize,
    /// `cos(l x_j)`, row-major in `j`.
    cos: Vec<f64>,
    /// Trapezoid weights divided by `N`.
    weights: Vec<f64>,
}

impl Galerkin {
    pub fn new(modes: usize, nodes: usize) -> Result<Self> {
        if modes < 1 {
            return Err(Error::Config("truncation order L must be at least 1".into()));
        }
        if nodes < 3 * modes {
            return Err(Error::Config(format!("collocation size N = {nodes} must be at least 3L = {}", 3 * modes)));
        }
        let mut cos = Vec::with_capacity((nodes + 1) * (modes + 1));
        for j in 0..=nodes {
            for l in 0..=modes {
                // cos(l j π / N) via the reduced angle keeps the table exact at the nodes.
                let m = (l * j) % (2 * nodes);
                cos.push((std::f64::consts::PI * m as f64 / nodes as f64).cos());
            }
        }
        let weights = (0..=nodes)
            .map(|j| if j == 0 || j == nodes { 0.5 } else { 1.0 } / nodes as f64)
            .collect();
        Ok(Galerkin { modes, nodes, cos, weights })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    fn cos_at(&self, j: usize, l: usize) -> f64 {
        self.cos[j * (self.modes + 1) + l]
    }

    fn check_state(&self, state: &FourierState) -> Result<()> {
        if state.modes() != self.modes {
            return Err(Error::Config(format!(
                "state has L = {} but the discretization expects L = {}",
                state.modes(),
                self.modes
            )));
        }
        Ok(())
    }

    /// Values of `a` on the nodes.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        (0..=self.nodes)
            .map(|j| coeffs.iter().enumerate().map(|(l, c)| c * self.cos_at(j, l)).sum())
            .collect()
    }

    /// Cosine coefficients `0..=L` of nodal values.
    pub fn analyze(&self, values: &[Complex64]) -> Vec<Complex64> {
        (0..=self.modes)
            .map(|l| {
                let s: Complex64 =
                    values.iter().enumerate().map(|(j, v)| v * (self.weights[j] * self.cos_at(j, l))).sum();
                if l == 0 {
                    s
                } else {
                    2.0 * s
                }
            })
            .collect()
    }

    /// `max_x |a(x) - c_0|` over the nodes.
    pub fn amplitude(&self, state: &FourierState) -> f64 {
        let c0 = state.coeffs[0];
        self.synthesize(&state.coeffs).iter().map(|v| (v - c0).norm()).fold(0.0, f64::max)
    }

    /// Per-mode residual with explicit constants; `f = 0` is allowed here.
    pub fn residual_with(&self, state: &FourierState, d: f64, f: f64) -> Result<Vec<f64>> {
        self.check_state(state)?;
        let a = self.synthesize(&state.coeffs);
        let cubic: Vec<Complex64> = a.iter().map(|v| v * v.norm_sqr()).collect();
        let cubic = self.analyze(&cubic);
        let mut out = Vec::with_capacity(2 * (self.modes + 1));
        for (l, (c, nl)) in state.coeffs.iter().zip(cubic).enumerate() {
            let lin = Complex64::new(-d * (l * l) as f64 - state.zeta, 1.0);
            let mut r = lin * c + nl;
            if l == 0 {
                r -= Complex64::new(0.0, f);
            }
            out.push(r.re);
            out.push(r.im);
        }
        Ok(out)
    }

    pub fn residual(&self, state: &FourierState, p: &Params) -> Result<Vec<f64>> {
        self.residual_with(state, p.d, p.f)
    }

    /// Exact derivative of [`Galerkin::residual`] with respect to the `2(L+1)` real coefficients.
    pub fn jacobian(&self, state: &FourierState, p: &Params) -> Result<DMatrix<f64>> {
        self.check_state(state)?;
        let n = self.modes + 1;
        let a = self.synthesize(&state.coeffs);
        // Linearization of |a|^2 a is h -> 2|a|^2 h + a^2 conj(h).
        let pw: Vec<f64> = a.iter().zip(&self.weights).map(|(v, w)| 2.0 * v.norm_sqr() * w).collect();
        let qw: Vec<Complex64> = a.iter().zip(&self.weights).map(|(v, w)| v * v * *w).collect();
        let mut jac = DMatrix::zeros(2 * n, 2 * n);
        for l in 0..n {
            let scale = if l == 0 { 1.0 } else { 2.0 };
            for m in 0..n {
                let mut gp = 0.0;
                let mut gq = Complex64::new(0.0, 0.0);
                for j in 0..=self.nodes {
                    let cc = self.cos_at(j, l) * self.cos_at(j, m);
                    gp += pw[j] * cc;
                    gq += qw[j] * cc;
                }
                gp *= scale;
                gq *= scale;
                // Column 2m: real unit input; column 2m+1: imaginary unit input.
                jac[(2 * l, 2 * m)] = gp + gq.re;
                jac[(2 * l + 1, 2 * m)] = gq.im;
                jac[(2 * l, 2 * m + 1)] = gq.im;
                jac[(2 * l + 1, 2 * m + 1)] = gp - gq.re;
            }
            let diag = -p.d * (l * l) as f64 - state.zeta;
            jac[(2 * l, 2 * l)] += diag;
            jac[(2 * l + 1, 2 * l)] += 1.0;
            jac[(2 * l, 2 * l + 1)] -= 1.0;
            jac[(2 * l + 1, 2 * l + 1)] += diag;
        }
        Ok(jac)
    }

    /// Derivative of the residual with respect to `zeta`, i.e. `-c` flattened.
    pub fn zeta_column(&self, state: &FourierState) -> Vec<f64> {
        state.coeffs.iter().flat_map(|c| [-c.re, -c.im]).collect()
    }
}

/// Diagonal of the mode weights `d l^2 + sign(d)` that turns the residual Jacobian
/// into the linearization of the fixed-point map: `F' = -diag(w)^{-1} J`.
pub fn fixed_point_weights(modes: usize, p: &Params) -> Vec<f64> {
    (0..=modes).flat_map(|l| {
        let w = p.d * (l * l) as f64 + p.sign_d();
        [w, w]
    })
    .collect()
}
