//! Bifurcation analysis for steady states of the Lugiato-Lefever equation
//!
//! ```text
//!     d a'' + (i - zeta) a + |a|^2 a - i f = 0,   a'(0) = a'(π) = 0.
//! ```
//!
//! The constant solutions form an explicit curve parametrized by `t ∈ (-1, 1)`. This
//! crate locates the primary bifurcation points on it, computes Leray-Schauder index
//! jumps in spaces of `2π/p`-periodic functions, certifies symmetry-breaking secondary
//! bifurcation from index imbalances, and follows the branches numerically.

pub mod cli_io;
pub mod continuation;
pub mod counterexample;
pub mod error;
pub mod primary;
pub mod roots;
pub mod spectral;
pub mod symmetry;
pub mod trivial;

pub use error::{Error, Result};
pub use primary::{compute_kmax, find_primary_points, PrimaryBifPoint};
pub use trivial::{eval_trivial, Params, TrivialPoint};
