//! Domain types shared by every dynamical module.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{LabError, Result};

pub type C64 = Complex64;

/// The interaction constant `K = 2^{-3/4} π^{1/4}` of the limit Hamiltonian.
pub fn interaction_constant() -> f64 {
    2f64.powf(-0.75) * PI.powf(0.25)
}

/// Interaction constant and frequency scale `λ ≥ 1`.
///
/// Fields are private so that `K` and `λ` cannot change once a state or
/// system has been built from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConstants {
    k: f64,
    lambda: f64,
}

impl ModelConstants {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 1.0) {
            return Err(LabError::InvalidParameter(format!(
                "lambda must be finite and >= 1, got {lambda}"
            )));
        }
        Ok(Self {
            k: interaction_constant(),
            lambda,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

pub(crate) fn ensure_finite(values: &[C64], what: &str) -> Result<()> {
    match values
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        Some(i) => Err(LabError::InvalidParameter(format!(
            "{what}: non-finite value at index {i}"
        ))),
        None => Ok(()),
    }
}

/// Fock-basis amplitudes `c_0 … c_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    c: Vec<C64>,
}

impl FockState {
    pub fn new(c: Vec<C64>) -> Result<Self> {
        if c.is_empty() {
            return Err(LabError::InvalidParameter(
                "a Fock state needs at least c_0".into(),
            ));
        }
        ensure_finite(&c, "fock state")?;
        Ok(Self { c })
    }

    pub fn zeros(truncation: usize) -> Self {
        Self {
            c: vec![C64::new(0.0, 0.0); truncation + 1],
        }
    }

    /// Truncation order `N` (the highest stored index).
    pub fn truncation(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.c
    }
}

/// Condensate amplitude plus profile samples on a dyadic grid.
///
/// The grid itself belongs to the [`LimitSystem`](crate::limit::LimitSystem);
/// `g` is stored in the grid's point order and is zero off-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitState {
    pub a: C64,
    pub g: Vec<C64>,
    constants: ModelConstants,
}

impl LimitState {
    pub fn new(a: C64, g: Vec<C64>, constants: ModelConstants) -> Result<Self> {
        ensure_finite(&[a], "condensate amplitude")?;
        ensure_finite(&g, "profile")?;
        Ok(Self { a, g, constants })
    }

    pub fn constants(&self) -> ModelConstants {
        self.constants
    }
}

/// Condensate amplitude plus dyadic shell amplitudes `g_j`, `j_min ≤ j ≤ j_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellState {
    pub a: C64,
    pub g: Vec<C64>,
    j_min: i32,
    epsilon: f64,
    constants: ModelConstants,
}

impl ShellState {
    pub fn new(
        a: C64,
        g: Vec<C64>,
        j_min: i32,
        epsilon: f64,
        constants: ModelConstants,
    ) -> Result<Self> {
        if g.is_empty() {
            return Err(LabError::InvalidParameter(
                "shell state needs j_min <= j_max (at least one shell)".into(),
            ));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(LabError::InvalidParameter(format!(
                "epsilon must be > 0, got {epsilon}"
            )));
        }
        ensure_finite(&[a], "condensate amplitude")?;
        ensure_finite(&g, "shell amplitudes")?;
        Ok(Self {
            a,
            g,
            j_min,
            epsilon,
            constants,
        })
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_min + self.g.len() as i32 - 1
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn constants(&self) -> ModelConstants {
        self.constants
    }

    /// Amplitude of shell `j`, zero outside the stored range.
    pub fn shell(&self, j: i32) -> C64 {
        if j < self.j_min || j > self.j_max() {
            C64::new(0.0, 0.0)
        } else {
            self.g[(j - self.j_min) as usize]
        }
    }
}
