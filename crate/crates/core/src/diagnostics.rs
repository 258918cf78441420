//! Post-processing: conservation drift, spectral fronts, symmetry orbits and
//! the existence-time probe.

use crate::error::{LabError, Result};
use crate::integrate::{advance, step, ObservableRow, Scheme, Trajectory};
use crate::model::C64;
use crate::system::{HamiltonianSystem, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Drift {
    pub max_abs: f64,
    /// Relative to `|initial|`; equals `max_abs` when the initial value is 0.
    pub max_rel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftReport {
    pub mass: Drift,
    pub energy: Drift,
    pub hamiltonian: Drift,
    pub xalpha: Drift,
}

fn drift_of<F: Fn(&ObservableRow) -> f64>(rows: &[ObservableRow], get: F) -> Drift {
    let v0 = get(&rows[0]);
    let max_abs = rows.iter().map(|r| (get(r) - v0).abs()).fold(0.0, f64::max);
    let max_rel = if v0 != 0.0 {
        max_abs / v0.abs()
    } else {
        max_abs
    };
    Drift { max_abs, max_rel }
}

/// Drift of every observable against its `t = 0` value.
pub fn drift_report(traj: &Trajectory) -> Result<DriftReport> {
    let rows = &traj.observables;
    if rows.len() < 2 {
        return Err(LabError::InvalidParameter(
            "drift needs at least two snapshots".into(),
        ));
    }
    Ok(DriftReport {
        mass: drift_of(rows, |r| r.mass),
        energy: drift_of(rows, |r| r.energy),
        hamiltonian: drift_of(rows, |r| r.hamiltonian),
        xalpha: drift_of(rows, |r| r.xalpha),
    })
}

/// Smallest frequency `s*` whose cumulative mass `Σ_{s ≤ s*}` reaches
/// `p · total`. Equal frequencies are accumulated together.
pub fn spectral_front(spectrum: &Spectrum, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(LabError::Domain(format!(
            "front fraction must be in (0,1), got {p}"
        )));
    }
    let total: f64 = crate::numerics::sum_f64(spectrum.masses.iter().copied());
    if !(total > 0.0) {
        return Err(LabError::ZeroMass);
    }
    let mut order: Vec<usize> = (0..spectrum.frequencies.len()).collect();
    order.sort_by(|&a, &b| spectrum.frequencies[a].total_cmp(&spectrum.frequencies[b]));
    let target = p * total;
    let mut acc = crate::numerics::CompensatedSum::<f64>::default();
    for (pos, &i) in order.iter().enumerate() {
        acc.add(spectrum.masses[i]);
        let s = spectrum.frequencies[i];
        let tie_next = order
            .get(pos + 1)
            .is_some_and(|&n| spectrum.frequencies[n] == s);
        if !tie_next && acc.value() >= target {
            return Ok(s);
        }
    }
    // only reachable through rounding in the cumulative sum
    Ok(spectrum.frequencies[*order.last().expect("non-empty when total > 0")])
}

/// `s*(t)` for every snapshot of a trajectory (`None` where the g-mass is zero).
pub fn front_series<S: HamiltonianSystem + ?Sized>(
    system: &S,
    traj: &Trajectory,
    p: f64,
) -> Vec<(f64, Option<f64>)> {
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(t, z)| (*t, spectral_front(&system.spectrum(z), p).ok()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symmetry {
    /// `z ↦ e^{iθ} z`.
    Rotation(f64),
    /// `z_k ↦ e^{iθ ν_k} z_k` with the system's modulation frequencies.
    Modulation(f64),
    /// `z(t) ↦ μ z(μ² t)`.
    Scaling(f64),
}

fn transform<S: HamiltonianSystem + ?Sized>(system: &S, z: &[C64], sym: Symmetry) -> Vec<C64> {
    match sym {
        Symmetry::Rotation(theta) => {
            let r = C64::from_polar(1.0, theta);
            z.iter().map(|v| v * r).collect()
        }
        Symmetry::Modulation(theta) => system
            .modulation_frequencies()
            .iter()
            .zip(z)
            .map(|(nu, v)| v * C64::from_polar(1.0, theta * nu))
            .collect(),
        Symmetry::Scaling(mu) => z.iter().map(|v| v * mu).collect(),
    }
}

/// Max coordinate-wise deviation between the two sides of a symmetry orbit
/// after `n = ⌊t/dt⌋` steps.
///
/// Rotation and modulation compare `T(evolve(z))` with `evolve(T z)`.
/// Scaling compares `evolve(μz)` over `n` steps of `dt` with
/// `μ · evolve(z)` over `n` steps of `μ² dt`, i.e. at time `μ² t`.
pub fn symmetry_orbit_check<S: HamiltonianSystem + ?Sized>(
    system: &S,
    z: &[C64],
    symmetry: Symmetry,
    t: f64,
    dt: f64,
    scheme: Scheme,
) -> Result<f64> {
    let n = crate::integrate::step_count(t, dt);
    let (lhs, rhs) = match symmetry {
        Symmetry::Scaling(mu) => {
            if !(mu > 0.0) {
                return Err(LabError::InvalidParameter(format!(
                    "scaling mu must be > 0, got {mu}"
                )));
            }
            let scaled = advance(system, &transform(system, z, symmetry), dt, n, scheme)?;
            let slow = advance(system, z, mu * mu * dt, n, scheme)?;
            (scaled, transform(system, &slow, symmetry))
        }
        _ => {
            let moved = advance(system, &transform(system, z, symmetry), dt, n, scheme)?;
            let plain = advance(system, z, dt, n, scheme)?;
            (moved, transform(system, &plain, symmetry))
        }
    };
    Ok(lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExistenceProbe {
    /// Time at which the `X_α` norm first exceeded the threshold, or `t_max`.
    pub t_observed: f64,
    pub exceeded: bool,
    pub initial_norm: f64,
    /// `c / ‖(a₀, g₀)‖²_α`.
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub alpha: f64,
    pub blowup_factor: f64,
    pub t_max: f64,
    pub dt: f64,
    pub scheme: Scheme,
    /// Constant in the reference bound `c ‖·‖_α^{-2}`.
    pub bound_constant: f64,
}

/// Integrates until the `X_α` norm exceeds `blowup_factor` times its
/// initial value or `t_max` is reached. Reports both the observed time and
/// the reference bound; no inequality between them is asserted.
pub fn existence_time_probe<S: HamiltonianSystem + ?Sized>(
    system: &S,
    z0: &[C64],
    opts: &ProbeOptions,
) -> Result<ExistenceProbe> {
    if !(opts.alpha >= 0.25) {
        return Err(LabError::InvalidParameter(format!(
            "existence probe needs alpha >= 1/4, got {}",
            opts.alpha
        )));
    }
    if !(opts.blowup_factor > 1.0) {
        return Err(LabError::InvalidParameter(
            "blowup_factor must exceed 1".into(),
        ));
    }
    let norm = |z: &[C64]| system.invariants(z, opts.alpha).xalpha;
    let initial_norm = norm(z0);
    let threshold = opts.blowup_factor * initial_norm;
    let bound = opts.bound_constant / (initial_norm * initial_norm);
    let n = crate::integrate::step_count(opts.t_max, opts.dt);
    let mut z = z0.to_vec();
    for i in 0..n {
        let t = i as f64 * opts.dt;
        z = match step(system, &z, opts.dt, opts.scheme, t) {
            Ok(z) => z,
            Err(LabError::BlowUp { t, .. }) if i > 0 => {
                return Ok(ExistenceProbe {
                    t_observed: t,
                    exceeded: true,
                    initial_norm,
                    bound,
                })
            }
            Err(e) => return Err(e),
        };
        if norm(&z) > threshold {
            if i == 0 {
                return Err(LabError::BlowUp {
                    t: opts.dt,
                    partial: None,
                });
            }
            return Ok(ExistenceProbe {
                t_observed: (i + 1) as f64 * opts.dt,
                exceeded: true,
                initial_norm,
                bound,
            });
        }
    }
    Ok(ExistenceProbe {
        t_observed: n as f64 * opts.dt,
        exceeded: false,
        initial_norm,
        bound,
    })
}
