//! Numerical continuation of nonconstant solution branches.
//!
//! States are truncated cosine series (see [`galerkin`]). Branches start at a primary
//! bifurcation point with a kernel-direction predictor and are followed by
//! pseudo-arclength continuation. Along a branch we record the number of negative
//! real eigenvalues of the linearized fixed-point map restricted to an ambient
//! divisibility class of modes; its parity, corrected for folds, exposes
//! symmetry-breaking secondary bifurcations.

pub mod branch;
pub mod eigen;
pub mod galerkin;
pub mod newton;

use serde::{Deserialize, Serialize};

pub use branch::{
    ambient_morse, branch_switch, kernel_direction, locate_secondary, trace_branch, trace_branch_with_direction,
    trace_from_primary, Branch, BranchPoint, SecondaryBracket, Terminus,
};
pub use galerkin::{FourierState, Galerkin};
pub use newton::{newton_correct, Constraint, Corrected};

use crate::error::{Error, Result};

/// Discretization sizes, tolerances and step control for continuation runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContinuationConfig {
    /// Truncation order `L`.
    pub modes: usize,
    /// Collocation size `N`, at least `3L`.
    pub nodes: usize,
    pub newton_tol: f64,
    pub max_iters: usize,
    pub max_step: f64,
    pub min_step: f64,
    /// Maximal number of accepted continuation steps.
    pub budget: usize,
    /// Distance in `(zeta, amplitude)` at which a branch counts as back on the trivial curve.
    pub return_tol: f64,
    /// Size of the kernel-direction offset used by [`branch_switch`].
    pub switch_amplitude: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            modes: 32,
            nodes: 128,
            newton_tol: 1e-10,
            max_iters: 25,
            max_step: 5e-2,
            min_step: 1e-5,
            budget: 5000,
            return_tol: 1e-2,
            switch_amplitude: 1e-2,
        }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.modes < 1 {
            return Err(Error::Config("L must be at least 1".into()));
        }
        if self.nodes < 3 * self.modes {
            return Err(Error::Config(format!("N = {} must be at least 3L = {}", self.nodes, 3 * self.modes)));
        }
        for (name, v) in [
            ("newton_tol", self.newton_tol),
            ("max_step", self.max_step),
            ("min_step", self.min_step),
            ("return_tol", self.return_tol),
            ("switch_amplitude", self.switch_amplitude),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.min_step > self.max_step {
            return Err(Error::Config("min_step exceeds max_step".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        Ok(())
    }

    pub fn galerkin(&self) -> Result<Galerkin> {
        self.validate()?;
        Galerkin::new(self.modes, self.nodes)
    }
}
