//! The dyadic shell model: one complex amplitude per band `[2^j, 2^j(1+ε)]`.
//!
//! It is the limit system on a single ray `s_j = 2^j` with weights
//! `w_j = ε 2^j`, so the symplectic weights are `λ ε 2^j` and one kernel
//! serves both models. `ε` cancels from the `g` equations; only `ȧ` sees it.

use std::f64::consts::LN_2;

use crate::error::{LabError, Result};
use crate::grid::DyadicGrid;
use crate::limit::{LimitSystem, RhsMode};
use crate::model::{ModelConstants, ShellState, C64};
use crate::system::{HamiltonianSystem, Invariants, Spectrum};

/// `ε = ln 2` makes the shell weights coincide with the one-ray
/// log-midpoint quadrature weights `s ln 2`.
pub const DEFAULT_EPSILON: f64 = LN_2;

#[derive(Debug, Clone)]
pub struct ShellSystem {
    inner: LimitSystem,
    epsilon: f64,
}

impl ShellSystem {
    pub fn new(
        j_min: i32,
        j_max: i32,
        epsilon: f64,
        constants: ModelConstants,
        mode: RhsMode,
    ) -> Result<Self> {
        let grid = DyadicGrid::shell(j_min, j_max, epsilon)?;
        Ok(Self {
            inner: LimitSystem::new(grid, constants, mode),
            epsilon,
        })
    }

    /// The equivalent limit system on the weight-overridden single-ray grid.
    pub fn as_limit(&self) -> &LimitSystem {
        &self.inner
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn j_min(&self) -> i32 {
        self.inner.grid().j_min()
    }

    pub fn j_max(&self) -> i32 {
        self.inner.grid().j_max()
    }

    pub fn mode(&self) -> RhsMode {
        self.inner.mode()
    }

    pub fn with_mode(&self, mode: RhsMode) -> Self {
        Self {
            inner: self.inner.with_mode(mode),
            epsilon: self.epsilon,
        }
    }

    pub fn constants(&self) -> ModelConstants {
        self.inner.constants()
    }

    pub fn state(&self, a: C64, g: Vec<C64>) -> Result<ShellState> {
        ShellState::new(a, g, self.j_min(), self.epsilon, self.constants())
    }

    fn check(&self, state: &ShellState) -> Result<()> {
        if state.j_min() != self.j_min()
            || state.j_max() != self.j_max()
            || state.epsilon() != self.epsilon
            || state.constants() != self.constants()
        {
            return Err(LabError::InvalidParameter(
                "shell state does not match the system's levels, epsilon or constants".into(),
            ));
        }
        Ok(())
    }

    pub fn coords(&self, state: &ShellState) -> Result<Vec<C64>> {
        self.check(state)?;
        let mut z = Vec::with_capacity(state.g.len() + 1);
        z.push(state.a);
        z.extend_from_slice(&state.g);
        Ok(z)
    }

    pub fn from_coords(&self, z: &[C64]) -> Result<ShellState> {
        if z.len() != self.dim() {
            return Err(LabError::InvalidParameter(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                z.len()
            )));
        }
        self.state(z[0], z[1..].to_vec())
    }

    /// `|a|⁴ + 4ε Σ_j 2^j |a g_j 2^{-λ 2^{j-1}} + K (2^j/λ)^{1/4} g_{j-1}²|²`.
    pub fn shell_hamiltonian(&self, state: &ShellState) -> Result<f64> {
        Ok(self.hamiltonian(&self.coords(state)?))
    }

    /// `(ȧ, ġ_j)` in the system's mode.
    pub fn shell_rhs(&self, state: &ShellState) -> Result<(C64, Vec<C64>)> {
        let mut out = self.rhs_vec(&self.coords(state)?)?;
        let a_dot = out.remove(0);
        Ok((a_dot, out))
    }

    /// `M = |a|² + λε Σ 2^j |g_j|²`.
    pub fn mass(&self, state: &ShellState) -> Result<f64> {
        Ok(self.invariants(&self.coords(state)?, 0.0).mass)
    }

    /// `E = ε Σ 2^{2j} |g_j|²`.
    pub fn energy(&self, state: &ShellState) -> Result<f64> {
        Ok(self.invariants(&self.coords(state)?, 0.0).energy)
    }
}

impl HamiltonianSystem for ShellSystem {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn rhs(&self, z: &[C64], out: &mut [C64]) -> Result<()> {
        self.inner.rhs(z, out)
    }

    fn hamiltonian(&self, z: &[C64]) -> f64 {
        self.inner.hamiltonian(z)
    }

    fn symplectic_weights(&self) -> Vec<f64> {
        self.inner.symplectic_weights()
    }

    fn modulation_frequencies(&self) -> Vec<f64> {
        self.inner.modulation_frequencies()
    }

    fn invariants(&self, z: &[C64], alpha: f64) -> Invariants {
        self.inner.invariants(z, alpha)
    }

    fn spectrum(&self, z: &[C64]) -> Spectrum {
        self.inner.spectrum(z)
    }

    fn describe(&self) -> String {
        format!(
            "shell system ({mode}):\n\
             i da/dt = 2|a|^2 a + 4a eps sum 2^j |g_j|^2 2^(-lambda 2^j) + 4K eps sum 2^j conj(g_j) 2^(-lambda 2^(j-1)) (2^j/lambda)^(1/4) g_(j-1)^2\n\
             i dg_j/dt = (1/lambda)[4|a|^2 g_j 2^(-lambda 2^j) + 4K (2^j/lambda)^(1/4) conj(a) 2^(-lambda 2^(j-1)) g_(j-1)^2\n\
             \x20           + {c3}K (2^(j+1)/lambda)^(1/4) a 2^(-lambda 2^j) conj(g_j) g_(j+1) + 16K^2 (2^(j+1)/lambda)^(1/2) |g_j|^2 g_j]\n\
             shells j in [{jmin}, {jmax}] ({n} shells), eps = {eps}, K = {k:.12}, lambda = {lambda}\n\
             symplectic weights lambda eps 2^j",
            mode = self.mode().name(),
            c3 = if self.mode() == RhsMode::PaperLiteral { 8 } else { 16 },
            jmin = self.j_min(),
            jmax = self.j_max(),
            n = self.dim() - 1,
            eps = self.epsilon,
            k = self.constants().k(),
            lambda = self.constants().lambda(),
        )
    }
}
