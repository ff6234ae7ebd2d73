//! Twistor-space formulation of the regularized (2n-1)-dimensional Kepler problem.
//!
//! The crate is organised bottom-up:
//!
//! - [`twistor_core`]: hermitian forms of signature (n, n), twistor vectors,
//!   `U(n,n)` / `u(n,n)` membership, nilpotency and orbit labels.
//! - [`momentum`]: the four momentum maps, the group actions on each
//!   Hamiltonian space, linear functionals and Poisson brackets.
//! - [`regularize`]: Cayley transform, Kustaanheimo-Stiefel sections, the two
//!   regularization maps and the `n = 2` Pauli specialization.
//! - [`dynamics`]: the Riccati flow of the regularized Kepler Hamiltonian, its
//!   closed form, RK4 integration and the conserved matrices `M`, `R`.
//! - [`integrable`]: the integrable perturbation, action-angle charts, torus
//!   reduction and the quadrature solution of the reduced system.
//!
//! Sign and scale conventions that are fixed numerically are collected in
//! [`conventions`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conventions;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod integrable;
pub mod matrix;
pub mod momentum;
pub mod random;
pub mod regularize;
pub mod twistor_core;

pub use error::{Error, Result};
pub use matrix::{CMatrix, CVector, C64};
