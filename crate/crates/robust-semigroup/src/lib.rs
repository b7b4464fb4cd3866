//! Distributionally robust transition operators over truncated grids.
//!
//! The crate builds three layers on top of finitely supported measures:
//!
//! * [`measures`] — discrete probability measures, Lévy models (drift,
//!   covariance, finite-activity jumps) and the discretized increment
//!   laws `μ_t` they induce on a uniform grid.
//! * [`transport`] — exact Wasserstein distances (quantile coupling in 1-d,
//!   transportation simplex in general) and the worst-case expectation over
//!   a Wasserstein ball or a distance-penalized family of measures.
//! * [`semigroup`] / [`pde`] — the one-step robust operator applied to grid
//!   functions, its dyadic iteration, and an explicit monotone scheme for
//!   the limiting equation `∂_t u = A^μ u + φ*(|∇u|)`, so the two routes
//!   can be cross-validated.
//!
//! [`oracles`] holds independent reference computations (primal greedy
//! transport, LP vertex enumeration, closed-form Gaussian smoothing) used
//! by the verification harness and the test suites.

pub mod error;
pub mod grid;
pub mod measures;
pub mod oracles;
pub mod parallel;
pub mod pde;
pub mod semigroup;
pub mod transport;

pub use error::Error;
pub use grid::{GridFunction, GridSpec};
pub use measures::{DiscreteMeasure, JumpSpec, LevyModel};
pub use transport::Penalty;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
