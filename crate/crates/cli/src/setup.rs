//! Builds systems and initial states from a parsed config.

use lll_core::fock::{ansatz_coefficients, FockSystem};
use lll_core::grid::DyadicGrid;
use lll_core::integrate::Scheme;
use lll_core::limit::{LimitSystem, RhsMode};
use lll_core::shell::ShellSystem;
use lll_core::{HamiltonianSystem, ModelConstants, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{complex, InitialData, IntegratorConfig, Mode, SchemeName, SystemConfig};
use crate::error::CliError;

pub enum System {
    Fock(FockSystem),
    Limit(LimitSystem),
    Shell(ShellSystem),
}

impl System {
    pub fn as_dyn(&self) -> &dyn HamiltonianSystem {
        match self {
            System::Fock(s) => s,
            System::Limit(s) => s,
            System::Shell(s) => s,
        }
    }

    /// The limit-system view used for grid lookups and term attribution.
    pub fn as_limit(&self) -> Option<&LimitSystem> {
        match self {
            System::Fock(_) => None,
            System::Limit(s) => Some(s),
            System::Shell(s) => Some(s.as_limit()),
        }
    }
}

fn rhs_mode(mode: Mode) -> RhsMode {
    match mode {
        Mode::Gradient => RhsMode::GradientConsistent,
        Mode::Paper => RhsMode::PaperLiteral,
    }
}

/// `mode_override` is the `--mode` flag; it has no effect on Fock systems.
pub fn build_system(cfg: &SystemConfig, mode_override: Option<Mode>) -> Result<System, CliError> {
    Ok(match *cfg {
        SystemConfig::Fock { n } => {
            if n == 0 {
                return Err(CliError::Config("system.n must be >= 1".into()));
            }
            System::Fock(FockSystem::new(n))
        }
        SystemConfig::Limit {
            lambda,
            rays,
            j_min,
            j_max,
            mode,
        } => System::Limit(LimitSystem::new(
            DyadicGrid::new(rays, j_min, j_max)?,
            ModelConstants::new(lambda)?,
            rhs_mode(mode_override.unwrap_or(mode)),
        )),
        SystemConfig::Shell {
            lambda,
            epsilon,
            j_min,
            j_max,
            mode,
        } => System::Shell(ShellSystem::new(
            j_min,
            j_max,
            epsilon,
            ModelConstants::new(lambda)?,
            rhs_mode(mode_override.unwrap_or(mode)),
        )?),
    })
}

pub fn scheme(cfg: &IntegratorConfig) -> Scheme {
    match cfg.scheme {
        SchemeName::Rk4 => Scheme::Rk4,
        SchemeName::ImplicitMidpoint => Scheme::ImplicitMidpoint {
            tol: cfg.tol,
            max_iter: cfg.max_iter,
        },
    }
}

/// Coordinate index of `(ray, level)`; for Fock states `level` is `n`.
fn slot(system: &System, ray: usize, level: i32) -> Result<usize, CliError> {
    let found = match system {
        System::Fock(s) => {
            (ray == 0 && level >= 1 && (level as usize) < s.dim()).then_some(level as usize)
        }
        _ => system
            .as_limit()
            .and_then(|l| l.grid().index(ray, level))
            .map(|k| k + 1),
    };
    found.ok_or_else(|| {
        CliError::Config(format!(
            "initial_data mode (ray {ray}, level {level}) is not a coordinate of the {} system",
            match system {
                System::Fock(_) => "fock",
                System::Limit(_) => "limit",
                System::Shell(_) => "shell",
            }
        ))
    })
}

pub fn initial_state(system: &System, data: &InitialData, seed: u64) -> Result<Vec<C64>, CliError> {
    let dim = system.as_dyn().dim();
    let mut z = vec![C64::new(0.0, 0.0); dim];
    match data {
        InitialData::Literal { a, g } => {
            if g.len() != dim - 1 {
                return Err(CliError::Config(format!(
                    "initial_data.g has {} entries, the system has {} non-condensate coordinates",
                    g.len(),
                    dim - 1
                )));
            }
            z[0] = complex(*a);
            for (zk, gk) in z[1..].iter_mut().zip(g) {
                *zk = complex(*gk);
            }
        }
        InitialData::Gaussian {
            a,
            amplitude,
            center,
            width,
            ansatz_lambda,
        } => {
            if !(*width > 0.0) {
                return Err(CliError::Config("initial_data.width must be > 0".into()));
            }
            let amp = complex(*amplitude);
            let g = |s: f64| amp * (-((s - center) / width).powi(2)).exp();
            match system {
                System::Fock(_) => {
                    let lambda = ansatz_lambda.ok_or_else(|| {
                        CliError::Config(
                            "initial_data.ansatz_lambda is required for fock systems".into(),
                        )
                    })?;
                    // n = 0 is the condensate slot
                    let mut samples: Vec<C64> = (0..dim)
                        .map(|n| g(n as f64 / lambda.max(1) as f64))
                        .collect();
                    samples[0] = C64::new(0.0, 0.0);
                    z = ansatz_coefficients(complex(*a), &samples, lambda, dim - 1)?.into_coeffs();
                }
                _ => {
                    let lim = system.as_limit().expect("non-fock");
                    z = lim.coords(&lim.sample(complex(*a), g)?)?;
                }
            }
        }
        InitialData::SingleShell {
            a,
            level,
            ray,
            amplitude,
        } => {
            z[0] = complex(*a);
            z[slot(system, *ray, *level)?] = complex(*amplitude);
        }
        InitialData::TwoMode { a, modes } => {
            z[0] = complex(*a);
            for m in modes {
                z[slot(system, m.ray, m.level)?] += complex(m.amplitude);
            }
        }
        InitialData::Random { a, amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            z[0] = complex(*a);
            for zk in z[1..].iter_mut() {
                *zk =
                    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * *amplitude;
            }
        }
    }
    if z.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(CliError::Config("initial data is not finite".into()));
    }
    Ok(z)
}
