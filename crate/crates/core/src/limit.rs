//! The limiting integro-differential system on a dyadic-ray grid.
//!
//! The discrete Hamiltonian is
//! `h = |a|⁴ + 4 Σ_k w_k |X_k|²`, `X_k = a g_k 2^{-λs_k/2} + K (s_k/λ)^{1/4} g_{k↓}²`
//! where `k↓` is the point `s_k/2` on the same ray (absent at the lowest
//! level, where `g` is taken to be zero). Because `g` is zero-padded, the
//! level just above the top of each ray still carries
//! `X = K (s/λ)^{1/4} g_top²`; that clipped level is part of `h`. The flow is
//! `i ȧ = ∂h/∂ā`, `i λ w_k ġ_k = ∂h/∂ḡ_k`, which conserves
//! `M = |a|² + λ Σ w|g|²`, `E = Σ w s |g|²` and `h` exactly in time.
//!
//! Differentiating through `g(s/2)` brings the weight ratio
//! `w_{k↑}/w_k = 2` into the third `g` term, giving the coefficient `16K`;
//! [`RhsMode::PaperLiteral`] keeps the halved `8K` coefficient instead, which
//! breaks the exact conservation of `h`.

use crate::error::{LabError, Result};
use crate::grid::DyadicGrid;
use crate::model::{LimitState, ModelConstants, C64};
use crate::numerics::{sum_c64, sum_f64};
use crate::system::{HamiltonianSystem, Invariants, Spectrum};

const ZERO: C64 = C64::new(0.0, 0.0);
const MINUS_I: C64 = C64::new(0.0, -1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhsMode {
    /// Right-hand side is the symplectic gradient of the discrete Hamiltonian
    /// (third `g` coefficient `16K`).
    #[default]
    GradientConsistent,
    /// Third `g` coefficient `8K`, as in the displayed equations.
    PaperLiteral,
}

impl RhsMode {
    pub fn name(self) -> &'static str {
        match self {
            RhsMode::GradientConsistent => "gradient_consistent",
            RhsMode::PaperLiteral => "paper_literal",
        }
    }
}

/// The four contributions to `i ġ_k`, in display order:
/// condensate damping, `ā g(s/2)²`, `a ḡ g(2s)` and the quartic self-term.
#[derive(Debug, Clone, PartialEq)]
pub struct GTerms {
    pub terms: [Vec<C64>; 4],
}

#[derive(Debug, Clone)]
pub struct LimitSystem {
    grid: DyadicGrid,
    constants: ModelConstants,
    mode: RhsMode,
    // 2^{-λ s/2}
    damp: Vec<f64>,
    // K (s/λ)^{1/4}
    coupling: Vec<f64>,
    // 2^{-λ s} and K (2s/λ)^{1/4}: the same factors at the level above
    damp_up: Vec<f64>,
    coupling_up: Vec<f64>,
}

impl LimitSystem {
    pub fn new(grid: DyadicGrid, constants: ModelConstants, mode: RhsMode) -> Self {
        let lambda = constants.lambda();
        let damp = grid
            .points()
            .iter()
            .map(|s| 2f64.powf(-0.5 * lambda * s))
            .collect();
        let coupling = grid
            .points()
            .iter()
            .map(|s| constants.k() * (s / lambda).powf(0.25))
            .collect();
        let damp_up = grid
            .points()
            .iter()
            .map(|s| 2f64.powf(-lambda * s))
            .collect();
        let coupling_up = grid
            .points()
            .iter()
            .map(|s| constants.k() * (2.0 * s / lambda).powf(0.25))
            .collect();
        Self {
            grid,
            constants,
            mode,
            damp,
            coupling,
            damp_up,
            coupling_up,
        }
    }

    pub fn grid(&self) -> &DyadicGrid {
        &self.grid
    }

    pub fn constants(&self) -> ModelConstants {
        self.constants
    }

    pub fn mode(&self) -> RhsMode {
        self.mode
    }

    pub fn with_mode(&self, mode: RhsMode) -> Self {
        Self {
            mode,
            ..self.clone()
        }
    }

    /// Samples a profile at every grid point.
    pub fn sample<F: Fn(f64) -> C64>(&self, a: C64, profile: F) -> Result<LimitState> {
        let g = self.grid.points().iter().map(|&s| profile(s)).collect();
        LimitState::new(a, g, self.constants)
    }

    pub fn coords(&self, state: &LimitState) -> Result<Vec<C64>> {
        self.check(state)?;
        let mut z = Vec::with_capacity(self.grid.len() + 1);
        z.push(state.a);
        z.extend_from_slice(&state.g);
        Ok(z)
    }

    pub fn state(&self, z: &[C64]) -> Result<LimitState> {
        if z.len() != self.grid.len() + 1 {
            return Err(LabError::InvalidParameter(format!(
                "expected {} coordinates, got {}",
                self.grid.len() + 1,
                z.len()
            )));
        }
        LimitState::new(z[0], z[1..].to_vec(), self.constants)
    }

    fn check(&self, state: &LimitState) -> Result<()> {
        if state.g.len() != self.grid.len() {
            return Err(LabError::InvalidParameter(format!(
                "profile has {} samples but the grid has {} points",
                state.g.len(),
                self.grid.len()
            )));
        }
        if state.constants() != self.constants {
            return Err(LabError::InvalidParameter(
                "state and system constants differ".into(),
            ));
        }
        Ok(())
    }

    fn x_from(&self, a: C64, g: &[C64]) -> Vec<C64> {
        (0..g.len())
            .map(|k| {
                let cascade = match self.grid.down(k) {
                    Some(d) => g[d] * g[d] * self.coupling[k],
                    None => ZERO,
                };
                a * g[k] * self.damp[k] + cascade
            })
            .collect()
    }

    fn clipped_from(&self, g: &[C64]) -> Vec<C64> {
        let top = self.grid.levels() - 1;
        (0..self.grid.rays())
            .map(|r| {
                let k = r * self.grid.levels() + top;
                g[k] * g[k] * self.coupling_up[k]
            })
            .collect()
    }

    fn h_from(&self, a: C64, g: &[C64]) -> f64 {
        let x = self.x_from(a, g);
        let w = self.grid.weights();
        let top = self.grid.levels() - 1;
        let clipped = self.clipped_from(g);
        let on_grid = x.iter().zip(w).map(|(x, w)| w * x.norm_sqr());
        let above = clipped
            .iter()
            .enumerate()
            .map(|(r, x)| 2.0 * w[r * self.grid.levels() + top] * x.norm_sqr());
        a.norm_sqr().powi(2) + 4.0 * sum_f64(on_grid.chain(above))
    }

    /// `X_k = a g_k 2^{-λs_k/2} + K (s_k/λ)^{1/4} g_{k↓}²`.
    pub fn x_field(&self, state: &LimitState) -> Result<Vec<C64>> {
        self.check(state)?;
        Ok(self.x_from(state.a, &state.g))
    }

    /// `X` at the level above the top of each ray, where `g` itself is zero.
    pub fn x_clipped(&self, state: &LimitState) -> Result<Vec<C64>> {
        self.check(state)?;
        Ok(self.clipped_from(&state.g))
    }

    pub fn discrete_hamiltonian(&self, state: &LimitState) -> Result<f64> {
        self.check(state)?;
        Ok(self.h_from(state.a, &state.g))
    }

    fn a_dot(&self, a: C64, g: &[C64], x: &[C64]) -> C64 {
        let w = self.grid.weights();
        let coupling = sum_c64((0..g.len()).map(|k| g[k].conj() * x[k] * (w[k] * self.damp[k])));
        MINUS_I * (2.0 * a.norm_sqr() * a + 4.0 * coupling)
    }

    fn terms_from(&self, a: C64, g: &[C64]) -> GTerms {
        let lambda = self.constants.lambda();
        let n = g.len();
        let mut t = [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]];
        for k in 0..n {
            // from |X_k|²: 4 w_k X_k ā d_k, split along the two parts of X_k
            let own = 4.0 * self.damp[k] / lambda;
            t[0][k] = own * a.norm_sqr() * g[k] * self.damp[k];
            if let Some(d) = self.grid.down(k) {
                t[1][k] = own * a.conj() * g[d] * g[d] * self.coupling[k];
            }
            // from |X_{k↑}|²: 4 w_{k↑} X_{k↑} · 2 c_{k↑} ḡ_k, with w_{k↑} = 2 w_k
            let up = 16.0 * self.coupling_up[k] / lambda;
            if let Some(u) = self.grid.up(k) {
                t[2][k] = up * g[k].conj() * a * g[u] * self.damp_up[k];
            }
            t[3][k] = up * g[k].conj() * g[k] * g[k] * self.coupling_up[k];
        }
        if self.mode == RhsMode::PaperLiteral {
            t[2].iter_mut().for_each(|v| *v *= 0.5);
        }
        GTerms { terms: t }
    }

    /// Per-term decomposition of `i ġ` in the system's mode.
    pub fn g_terms(&self, state: &LimitState) -> Result<GTerms> {
        self.check(state)?;
        Ok(self.terms_from(state.a, &state.g))
    }

    /// `(ȧ, ġ)` in the system's mode.
    pub fn limit_rhs(&self, state: &LimitState) -> Result<(C64, Vec<C64>)> {
        self.check(state)?;
        let mut out = vec![ZERO; self.grid.len() + 1];
        self.rhs_into(state.a, &state.g, &mut out);
        let a_dot = out[0];
        out.remove(0);
        Ok((a_dot, out))
    }

    fn rhs_into(&self, a: C64, g: &[C64], out: &mut [C64]) {
        let x = self.x_from(a, g);
        out[0] = self.a_dot(a, g, &x);
        let t = self.terms_from(a, g);
        for k in 0..g.len() {
            out[k + 1] = MINUS_I * (t.terms[0][k] + t.terms[1][k] + t.terms[2][k] + t.terms[3][k]);
        }
    }

    pub fn limit_invariants(&self, state: &LimitState, alpha: f64) -> Result<LimitInvariants> {
        self.check(state)?;
        Ok(self.invariants_from(state.a, &state.g, alpha))
    }

    fn invariants_from(&self, a: C64, g: &[C64], alpha: f64) -> LimitInvariants {
        let lambda = self.constants.lambda();
        let pts = self.grid.points();
        let w = self.grid.weights();
        let sup = pts
            .iter()
            .zip(g)
            .map(|(s, g)| (1.0 + s * s).powf(0.5 * alpha) * g.norm())
            .fold(0.0, f64::max);
        LimitInvariants {
            mass: a.norm_sqr() + lambda * sum_f64(w.iter().zip(g).map(|(w, g)| w * g.norm_sqr())),
            energy: sum_f64((0..g.len()).map(|k| w[k] * pts[k] * g[k].norm_sqr())),
            xalpha: a.norm() + sup,
            hamiltonian: self.h_from(a, g),
        }
    }

    /// Explains a reference right-hand side `reference` (typically the
    /// finite-difference symplectic gradient) in terms of this system's
    /// literal `g` terms: fits the coefficient multiplying the third term and
    /// reports what is left unexplained.
    pub fn third_term_attribution(&self, z: &[C64], reference: &[C64]) -> Result<TermAttribution> {
        let state = self.state(z)?;
        let terms = self.g_terms(&state)?;
        let own = self.rhs_vec(z)?;
        let third: Vec<C64> = terms.terms[2].iter().map(|t| MINUS_I * t).collect();
        let mismatch: Vec<C64> = (1..z.len()).map(|k| reference[k] - own[k]).collect();
        let den = sum_f64(third.iter().map(|t| t.norm_sqr()));
        if den == 0.0 {
            return Err(LabError::InvalidParameter(
                "third term vanishes identically for this state".into(),
            ));
        }
        let num = sum_c64(third.iter().zip(&mismatch).map(|(t, m)| t.conj() * m));
        let excess = num.re / den;
        let scale = reference.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let residual = third
            .iter()
            .zip(&mismatch)
            .map(|(t, m)| (m - t * excess).norm())
            .fold(0.0, f64::max)
            / scale;
        let mismatch_total = mismatch.iter().map(|m| m.norm()).fold(0.0, f64::max) / scale;
        let a_mismatch = (reference[0] - own[0]).norm() / scale;
        Ok(TermAttribution {
            coefficient_ratio: 1.0 + excess,
            residual,
            mismatch: mismatch_total,
            a_mismatch,
        })
    }
}

/// Outcome of [`LimitSystem::third_term_attribution`]. All errors are relative
/// to the largest reference component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermAttribution {
    /// Reference third-term coefficient divided by this system's.
    pub coefficient_ratio: f64,
    /// What the fitted third term leaves unexplained in `ġ`.
    pub residual: f64,
    /// Raw `ġ` mismatch before attribution.
    pub mismatch: f64,
    /// Mismatch in `ȧ`.
    pub a_mismatch: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitInvariants {
    pub mass: f64,
    pub energy: f64,
    pub xalpha: f64,
    pub hamiltonian: f64,
}

impl HamiltonianSystem for LimitSystem {
    fn dim(&self) -> usize {
        self.grid.len() + 1
    }

    fn rhs(&self, z: &[C64], out: &mut [C64]) -> Result<()> {
        if z.len() != self.dim() || out.len() != self.dim() {
            return Err(LabError::InvalidParameter(
                "coordinate length mismatch".into(),
            ));
        }
        self.rhs_into(z[0], &z[1..], out);
        Ok(())
    }

    fn hamiltonian(&self, z: &[C64]) -> f64 {
        self.h_from(z[0], &z[1..])
    }

    fn symplectic_weights(&self) -> Vec<f64> {
        let lambda = self.constants.lambda();
        std::iter::once(1.0)
            .chain(self.grid.weights().iter().map(|w| lambda * w))
            .collect()
    }

    fn modulation_frequencies(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.grid.points().iter().copied())
            .collect()
    }

    fn invariants(&self, z: &[C64], alpha: f64) -> Invariants {
        let inv = self.invariants_from(z[0], &z[1..], alpha);
        Invariants {
            mass: inv.mass,
            energy: inv.energy,
            hamiltonian: inv.hamiltonian,
            xalpha: inv.xalpha,
        }
    }

    fn spectrum(&self, z: &[C64]) -> Spectrum {
        let lambda = self.constants.lambda();
        Spectrum {
            frequencies: self.grid.points().to_vec(),
            masses: self
                .grid
                .weights()
                .iter()
                .zip(&z[1..])
                .map(|(w, g)| lambda * w * g.norm_sqr())
                .collect(),
        }
    }

    fn describe(&self) -> String {
        format!(
            "limit system ({mode}):\n\
             i da/dt = 2|a|^2 a + 4a sum w |g|^2 2^(-lambda s) + 4K sum w conj(g) 2^(-lambda s/2) (s/lambda)^(1/4) g(s/2)^2\n\
             i dg/dt = (1/lambda)[4|a|^2 g 2^(-lambda s) + 4K (s/lambda)^(1/4) conj(a) 2^(-lambda s/2) g(s/2)^2\n\
             \x20         + {c3}K (2s/lambda)^(1/4) a 2^(-lambda s) conj(g) g(2s) + 16K^2 (2s/lambda)^(1/2) |g|^2 g]\n\
             K = {k:.12}, lambda = {lambda}\n\
             {grid}",
            mode = self.mode.name(),
            c3 = if self.mode == RhsMode::PaperLiteral { 8 } else { 16 },
            k = self.constants.k(),
            lambda = self.constants.lambda(),
            grid = self.grid.describe()
        )
    }
}
