//! Numerical laboratory for the Lowest Landau Level (LLL) equation in its
//! high-frequency regime.
//!
//! Three dynamical systems live here, all written as Hamiltonian flows
//! `i w_k ż_k = ∂H/∂z̄_k` on a flat vector of complex coordinates:
//!
//! * [`fock`]: the LLL equation in Fock coefficients, with an `O(N³)`
//!   reference right-hand side and an `O(N²)` factorized one.
//! * [`limit`]: the limiting integro-differential system for a condensate
//!   amplitude `a` and a profile `g(s)`, discretized on dyadic rays.
//! * [`shell`]: the dyadic shell model, a single-ray instance of the limit
//!   kernel.
//!
//! [`asymptotics`] compares exact Fock Hamiltonian pieces with their limiting
//! integrals, [`integrate`] marches the flows in time and [`diagnostics`]
//! post-processes trajectories.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod diagnostics;
pub mod error;
pub mod fock;
pub mod grid;
pub mod integrate;
pub mod limit;
pub mod model;
pub mod numerics;
pub mod shell;
pub mod system;
pub mod wirtinger;

pub use error::{LabError, Result};
pub use model::{interaction_constant, FockState, LimitState, ModelConstants, ShellState, C64};
pub use system::HamiltonianSystem;
