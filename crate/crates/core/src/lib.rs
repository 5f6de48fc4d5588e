//! Simulation and estimation for Gaussian processes with seasonal long memory.
//!
//! The spectral density of the processes handled here has the form
//! `f(λ) = h(λ) / |λ² − s0²|^{2α}` with a pole at `±s0`. The crate estimates
//! `(s0, α)` from the mean squared filter coefficients at a sequence of scales,
//! using a closed-form inversion through the principal branch of Lambert W.
//!
//! Modules, bottom up:
//!
//! - [`specfun`]: Lambert W, Gegenbauer coefficients, adaptive quadrature.
//! - [`model`]: spectral densities and filters with their moments `c2`, `c3`.
//! - [`simulate`]: Gegenbauer moving-average paths and an exact Gaussian
//!   sampler of filter coefficients.
//! - [`transform`]: scale schedules and the discrete filter transform.
//! - [`estimator`]: first and second statistics, feasible-region adjustment,
//!   the closed-form solver.
//! - [`mc`]: the replication harness and its CSV/JSON outputs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimator;
pub mod mc;
pub mod model;
pub mod simulate;
pub mod specfun;
pub mod transform;

pub use error::{Error, Result};
