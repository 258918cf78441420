use thiserror::Error;

use crate::integrate::Trajectory;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("hamiltonian overflow")]
    HamiltonianOverflow,

    #[error("momentum mismatch: {k} + {l} != {m} + {n}")]
    MomentumMismatch {
        k: usize,
        l: usize,
        m: usize,
        n: usize,
    },

    #[error("index {index} exceeds weight table range {max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),

    #[error("overflow in interaction block S = {s}")]
    BlockOverflow { s: usize },

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("asymptote not applicable: {0}")]
    AsymptoteNotApplicable(String),

    #[error("quadrature did not converge (achieved relative tolerance {achieved:e})")]
    QuadratureNonConvergent { achieved: f64 },

    #[error("blow-up detected at t = {t}")]
    BlowUp {
        t: f64,
        /// Snapshots recorded up to the last finite state.
        partial: Option<Box<Trajectory>>,
    },

    #[error("implicit midpoint did not converge in {max_iter} iterations (residual {residual:e}); try a smaller dt")]
    NoConvergence { max_iter: usize, residual: f64 },

    #[error("zero g-mass: spectral front undefined")]
    ZeroMass,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

impl LabError {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            LabError::HamiltonianOverflow
                | LabError::BlockOverflow { .. }
                | LabError::BlowUp { .. }
                | LabError::NoConvergence { .. }
                | LabError::QuadratureNonConvergent { .. }
        )
    }
}
