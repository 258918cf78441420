use std::path::PathBuf;

use lll_core::asymptotics::{breakdown, Profile};
use lll_core::integrate::{
    evolve, flow_consistency_check, EvolveOptions, Trajectory, DEFAULT_FD_STEP,
};
use lll_core::limit::RhsMode;
use lll_core::LabError;
use serde::Serialize;

use crate::config::{complex, Config, Mode, ProfileConfig, SystemConfig};
use crate::error::CliError;
use crate::output::{csv_bytes, output_path, sidecar_json, trajectory_csv, write_atomic, RunMeta};
use crate::setup::{build_system, initial_state, scheme, System};

/// Options shared by every subcommand.
pub struct Common {
    pub out: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub seed: u64,
    pub quiet: bool,
}

impl Common {
    fn say(&self, text: &str) {
        if !self.quiet {
            println!("{text}");
        }
    }

    fn dir(&self, cfg: &Config) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from(&cfg.output.dir))
    }
}

fn require<'a, T>(v: &'a Option<T>, section: &str) -> Result<&'a T, CliError> {
    v.as_ref()
        .ok_or_else(|| CliError::Config(format!("missing section `{section}`")))
}

fn system_of_kind(cfg: &Config, kind: &str, common: &Common) -> Result<System, CliError> {
    let sys = require(&cfg.system, "system")?;
    if sys.kind() != kind {
        return Err(CliError::Config(format!(
            "simulate-{kind} needs system.kind = \"{kind}\", got \"{}\"",
            sys.kind()
        )));
    }
    build_system(sys, common.mode)
}

pub fn simulate(cfg: &Config, kind: &str, common: &Common) -> Result<(), CliError> {
    let system = system_of_kind(cfg, kind, common)?;
    let z0 = initial_state(
        &system,
        require(&cfg.initial_data, "initial_data")?,
        common.seed,
    )?;
    let integ = require(&cfg.integrator, "integrator")?;
    let opts = EvolveOptions {
        t_end: integ.t_end,
        dt: integ.dt,
        scheme: scheme(integ),
        observe_every: cfg.observables.every,
        alpha: cfg.observables.alpha,
    };
    let sys = system.as_dyn();
    let (traj, failure): (Trajectory, Option<CliError>) = match evolve(sys, &z0, &opts) {
        Ok(t) => (t, None),
        Err(LabError::BlowUp { t, partial }) => (
            partial.map(|p| *p).unwrap_or_default(),
            Some(CliError::Numerical(format!("blow-up at t = {t}"))),
        ),
        Err(e) => return Err(e.into()),
    };
    let dir = common.dir(cfg);
    let csv_path = output_path(&dir, &cfg.output.prefix, ".csv");
    let json_path = output_path(&dir, &cfg.output.prefix, ".json");
    write_atomic(&csv_path, &trajectory_csv(&traj)?)?;
    let meta = RunMeta {
        command: match kind {
            "fock" => "simulate-fock",
            "limit" => "simulate-limit",
            _ => "simulate-shell",
        },
        system: sys.describe(),
        scheme: opts.scheme.name(),
        dt: opts.dt,
        t_end: opts.t_end,
        complete: failure.is_none(),
    };
    write_atomic(&json_path, &sidecar_json(meta, &traj)?)?;
    if let Some(last) = traj.observables.last() {
        let first = &traj.observables[0];
        common.say(&format!(
            "{} rows -> {}\nt = {}: M = {:.12e} (drift {:.2e}), E = {:.12e} (drift {:.2e}), H = {:.12e} (drift {:.2e})",
            traj.len(),
            csv_path.display(),
            last.t,
            last.mass,
            last.mass - first.mass,
            last.energy,
            last.energy - first.energy,
            last.hamiltonian,
            last.hamiltonian - first.hamiltonian
        ));
    }
    failure.map_or(Ok(()), Err)
}

#[derive(Serialize)]
struct AsymptoticsRow {
    lambda: usize,
    #[serde(rename = "H0")]
    h0_exact: f64,
    #[serde(rename = "H1")]
    h1_exact: f64,
    #[serde(rename = "H2")]
    h2_exact: f64,
    h2: f64,
    ratio2: f64,
    #[serde(rename = "H3")]
    h3_exact: f64,
    h3: f64,
    ratio3: f64,
    #[serde(rename = "H4")]
    h4_exact: f64,
    h4: f64,
    ratio4: f64,
}

pub fn verify_asymptotics(cfg: &Config, common: &Common) -> Result<(), CliError> {
    let asym = require(&cfg.asymptotics, "asymptotics")?;
    if asym.lambdas.is_empty() || asym.lambdas.contains(&0) {
        return Err(CliError::Config(
            "asymptotics.lambdas must be a non-empty list of positive integers".into(),
        ));
    }
    let profile = match asym.profile {
        ProfileConfig::Bump { lo, hi, amplitude } => Profile::bump(lo, hi, complex(amplitude))?,
    };
    let a = complex(asym.a);
    let mut rows = Vec::new();
    for &lambda in &asym.lambdas {
        let b = breakdown(a, &profile, lambda)?;
        let r = b.ratios();
        rows.push(AsymptoticsRow {
            lambda,
            h0_exact: b.exact.terms[0].re,
            h1_exact: b.exact.terms[1].norm(),
            h2_exact: b.exact.terms[2].re,
            h2: b.limit.h2,
            ratio2: r[0],
            h3_exact: b.exact.terms[3].re,
            h3: b.limit.h3,
            ratio3: r[1],
            h4_exact: b.exact.terms[4].re,
            h4: b.limit.h4,
            ratio4: r[2],
        });
    }
    let mut table = format!(
        "{:>7} {:>14} {:>14} {:>14} {:>11}\n",
        "lambda", "H2/h2", "H3/h3", "H4/h4", "|H1|"
    );
    for r in &rows {
        table.push_str(&format!(
            "{:>7} {:>14.10} {:>14.10} {:>14.10} {:>11.3e}\n",
            r.lambda, r.ratio2, r.ratio3, r.ratio4, r.h1_exact
        ));
    }
    let decreasing = |f: fn(&AsymptoticsRow) -> f64| {
        rows.windows(2)
            .all(|w| (f(&w[1]) - 1.0).abs() < (f(&w[0]) - 1.0).abs())
    };
    table.push_str(&format!(
        "|ratio-1| decreasing: H2 {}, H3 {}, H4 {}",
        decreasing(|r| r.ratio2),
        decreasing(|r| r.ratio3),
        decreasing(|r| r.ratio4)
    ));
    let path = output_path(&common.dir(cfg), &cfg.output.prefix, "_asymptotics.csv");
    write_atomic(&path, &csv_bytes(&rows)?)?;
    common.say(&table);
    common.say(&format!("table -> {}", path.display()));
    Ok(())
}

#[derive(Serialize)]
struct GradientRow {
    k: usize,
    re_rhs: f64,
    im_rhs: f64,
    re_reference: f64,
    im_reference: f64,
    rel_err: f64,
}

pub fn check_gradients(cfg: &Config, common: &Common) -> Result<(), CliError> {
    let system = build_system(require(&cfg.system, "system")?, common.mode)?;
    let z = initial_state(
        &system,
        require(&cfg.initial_data, "initial_data")?,
        common.seed,
    )?;
    let report = flow_consistency_check(system.as_dyn(), &z, DEFAULT_FD_STEP)?;
    let rows = (0..z.len()).map(|k| GradientRow {
        k,
        re_rhs: report.rhs[k].re,
        im_rhs: report.rhs[k].im,
        re_reference: report.reference[k].re,
        im_reference: report.reference[k].im,
        rel_err: report.relative_errors[k],
    });
    let path = output_path(&common.dir(cfg), &cfg.output.prefix, "_gradients.csv");
    write_atomic(&path, &csv_bytes(rows)?)?;
    let mut text =
        format!(
        "max relative error of rhs against the finite-difference symplectic gradient: {:.3e} ({})",
        report.max_relative_error,
        if report.max_relative_error < 1e-6 { "consistent" } else { "INCONSISTENT" }
    );
    if let Some(lim) = system
        .as_limit()
        .filter(|l| l.mode() == RhsMode::PaperLiteral)
    {
        match lim.third_term_attribution(&z, &report.reference) {
            Ok(att) => text.push_str(&format!(
                "\npaper mode: gradient/literal third-term coefficient ratio {:.8}, unexplained residual {:.3e}, condensate mismatch {:.3e}",
                att.coefficient_ratio, att.residual, att.a_mismatch
            )),
            Err(LabError::InvalidParameter(_)) => text.push_str(
                "\npaper mode: the third g-term vanishes for this state, so the two variants coincide here",
            ),
            Err(e) => return Err(e.into()),
        }
    }
    common.say(&text);
    common.say(&format!("per-coordinate report -> {}", path.display()));
    Ok(())
}

/// Defaults used by `describe` without a config.
pub fn default_system(kind: &str) -> SystemConfig {
    match kind {
        "fock" => SystemConfig::Fock { n: 64 },
        "limit" => SystemConfig::Limit {
            lambda: 4.0,
            rays: 4,
            j_min: -4,
            j_max: 6,
            mode: Mode::Gradient,
        },
        _ => SystemConfig::Shell {
            lambda: 1.0,
            epsilon: lll_core::shell::DEFAULT_EPSILON,
            j_min: -2,
            j_max: 10,
            mode: Mode::Gradient,
        },
    }
}

pub fn describe(cfg: Option<&Config>, kind: Option<&str>, common: &Common) -> Result<(), CliError> {
    let configs: Vec<SystemConfig> = match (cfg.and_then(|c| c.system.clone()), kind) {
        (Some(sys), None) => vec![sys],
        (Some(sys), Some(k)) if sys.kind() == k => vec![sys],
        (Some(sys), Some(k)) => {
            return Err(CliError::Config(format!(
                "config describes a {} system, not {k}",
                sys.kind()
            )))
        }
        (None, Some(k)) => vec![default_system(k)],
        (None, None) => ["fock", "limit", "shell"]
            .iter()
            .map(|k| default_system(k))
            .collect(),
    };
    let texts: Result<Vec<String>, CliError> = configs
        .iter()
        .map(|c| Ok(build_system(c, common.mode)?.as_dyn().describe()))
        .collect();
    // describe is the one command that always prints
    println!("{}", texts?.join("\n\n"));
    Ok(())
}
