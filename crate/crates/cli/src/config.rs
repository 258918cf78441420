//! JSON run configuration. Unknown keys are rejected so typos surface as
//! config errors instead of silently falling back to defaults.

use std::path::Path;

use lll_core::C64;
use serde::Deserialize;

use crate::error::CliError;

/// `[re, im]`.
pub type Complex = [f64; 2];

pub fn complex(c: Complex) -> C64 {
    C64::new(c[0], c[1])
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system: Option<SystemConfig>,
    pub initial_data: Option<InitialData>,
    pub integrator: Option<IntegratorConfig>,
    #[serde(default)]
    pub observables: ObservablesConfig,
    #[serde(default)]
    pub output: OutputConfig,
    pub asymptotics: Option<AsymptoticsConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    #[serde(alias = "gradient_consistent")]
    Gradient,
    #[serde(alias = "paper_literal")]
    Paper,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    Fock {
        n: usize,
    },
    Limit {
        lambda: f64,
        rays: usize,
        j_min: i32,
        j_max: i32,
        #[serde(default)]
        mode: Mode,
    },
    Shell {
        lambda: f64,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        j_min: i32,
        j_max: i32,
        #[serde(default)]
        mode: Mode,
    },
}

fn default_epsilon() -> f64 {
    lll_core::shell::DEFAULT_EPSILON
}

impl SystemConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            SystemConfig::Fock { .. } => "fock",
            SystemConfig::Limit { .. } => "limit",
            SystemConfig::Shell { .. } => "shell",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub level: i32,
    #[serde(default)]
    pub ray: usize,
    pub amplitude: Complex,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `g` lists the non-condensate coordinates in system order.
    Literal {
        a: Complex,
        g: Vec<Complex>,
    },
    /// `g(s) = amplitude · exp(-((s - center)/width)²)`; Fock states use the
    /// Ansatz `c_n = g(n/λ)/√λ` with `ansatz_lambda`.
    Gaussian {
        a: Complex,
        amplitude: Complex,
        center: f64,
        width: f64,
        #[serde(default)]
        ansatz_lambda: Option<usize>,
    },
    SingleShell {
        a: Complex,
        level: i32,
        #[serde(default)]
        ray: usize,
        amplitude: Complex,
    },
    TwoMode {
        a: Complex,
        modes: [ModeSpec; 2],
    },
    /// Independent uniform draws in the square of half-width `amplitude`,
    /// seeded by `--seed`.
    Random {
        a: Complex,
        amplitude: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Rk4,
    ImplicitMidpoint,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub scheme: SchemeName,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_tol() -> f64 {
    lll_core::integrate::DEFAULT_TOL
}

fn default_max_iter() -> usize {
    lll_core::integrate::DEFAULT_MAX_ITER
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservablesConfig {
    #[serde(default = "one")]
    pub every: usize,
    #[serde(default = "one_f")]
    pub alpha: f64,
}

fn one() -> usize {
    1
}

fn one_f() -> f64 {
    1.0
}

impl Default for ObservablesConfig {
    fn default() -> Self {
        Self {
            every: 1,
            alpha: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_prefix")]
    pub prefix: String,
}

fn default_dir() -> String {
    "out".into()
}

fn default_prefix() -> String {
    "run".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            prefix: default_prefix(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsConfig {
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<usize>,
    #[serde(default = "unit")]
    pub a: Complex,
    pub profile: ProfileConfig,
}

fn default_lambdas() -> Vec<usize> {
    vec![16, 32, 64]
}

fn unit() -> Complex {
    [1.0, 0.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    /// `amplitude · exp(-1/((x-lo)(hi-x)))` on `(lo, hi)`.
    Bump {
        lo: f64,
        hi: f64,
        amplitude: Complex,
    },
}

pub fn load(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
