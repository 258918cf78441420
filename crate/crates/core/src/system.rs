//! The common Hamiltonian-flow interface shared by the Fock, limit and shell
//! systems.
//!
//! Every system is a finite vector of complex coordinates `z_k` obeying
//! `i w_k ż_k = ∂H/∂z̄_k` with positive symplectic weights `w_k`, where the
//! Wirtinger derivative is `∂/∂z̄ = ½(∂/∂Re z + i ∂/∂Im z)`. Coordinate 0 is
//! always the condensate amplitude (`a`, or `c_0` for Fock states).

use crate::error::Result;
use crate::model::C64;

/// Quantities conserved (or monitored) along a flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub mass: f64,
    /// Kinetic energy for limit/shell systems, angular momentum `Σ n|c_n|²`
    /// for Fock states.
    pub energy: f64,
    pub hamiltonian: f64,
    /// `|a| + max ⟨s⟩^α |g(s)|` over grid points.
    pub xalpha: f64,
}

/// Frequencies and mass contributions of the non-condensate coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub masses: Vec<f64>,
}

pub trait HamiltonianSystem {
    /// Number of complex coordinates.
    fn dim(&self) -> usize;

    /// Time derivative `ż` written into `out`.
    fn rhs(&self, z: &[C64], out: &mut [C64]) -> Result<()>;

    fn hamiltonian(&self, z: &[C64]) -> f64;

    /// Weights `w_k` in `i w_k ż_k = ∂H/∂z̄_k`.
    fn symplectic_weights(&self) -> Vec<f64>;

    /// Per-coordinate phase rates of the modulation symmetry
    /// `z_k ↦ e^{iθ ν_k} z_k`.
    fn modulation_frequencies(&self) -> Vec<f64>;

    fn invariants(&self, z: &[C64], alpha: f64) -> Invariants;

    fn spectrum(&self, z: &[C64]) -> Spectrum;

    /// Human-readable summary of equations, mode and parameters.
    fn describe(&self) -> String;

    fn rhs_vec(&self, z: &[C64]) -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); z.len()];
        self.rhs(z, &mut out)?;
        Ok(out)
    }
}
