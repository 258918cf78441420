//! Fixed-step time integration and the flow/Hamiltonian consistency check.

use crate::diagnostics::spectral_front;
use crate::error::{LabError, Result};
use crate::model::C64;
use crate::system::HamiltonianSystem;
use crate::wirtinger::wirtinger_gradient;

const MINUS_I: C64 = C64::new(0.0, -1.0);

pub const DEFAULT_TOL: f64 = 1e-13;
pub const DEFAULT_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Rk4,
    /// Fixed-point iteration on the midpoint equation; conserves every
    /// quadratic invariant of the flow up to `tol`.
    ImplicitMidpoint {
        tol: f64,
        max_iter: usize,
    },
}

impl Scheme {
    pub fn midpoint() -> Self {
        Scheme::ImplicitMidpoint {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Rk4 => "rk4",
            Scheme::ImplicitMidpoint { .. } => "implicit_midpoint",
        }
    }
}

/// One row of monitored quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRow {
    pub t: f64,
    pub a: C64,
    pub mass: f64,
    pub energy: f64,
    pub hamiltonian: f64,
    pub xalpha: f64,
    /// `None` when the non-condensate mass is zero.
    pub front_p50: Option<f64>,
    pub front_p90: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    pub observables: Vec<ObservableRow>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&[C64]> {
        self.states.last().map(Vec::as_slice)
    }

    fn push<S: HamiltonianSystem + ?Sized>(&mut self, system: &S, t: f64, z: &[C64], alpha: f64) {
        self.times.push(t);
        self.states.push(z.to_vec());
        self.observables.push(observe(system, t, z, alpha));
    }
}

/// Observables of one snapshot.
pub fn observe<S: HamiltonianSystem + ?Sized>(
    system: &S,
    t: f64,
    z: &[C64],
    alpha: f64,
) -> ObservableRow {
    let inv = system.invariants(z, alpha);
    let spectrum = system.spectrum(z);
    ObservableRow {
        t,
        a: z[0],
        mass: inv.mass,
        energy: inv.energy,
        hamiltonian: inv.hamiltonian,
        xalpha: inv.xalpha,
        front_p50: spectral_front(&spectrum, 0.5).ok(),
        front_p90: spectral_front(&spectrum, 0.9).ok(),
    }
}

fn all_finite(z: &[C64]) -> bool {
    z.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

fn axpy(y: &[C64], h: f64, k: &[C64]) -> Vec<C64> {
    y.iter().zip(k).map(|(y, k)| y + k * h).collect()
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(LabError::InvalidParameter(format!(
            "dt must be > 0, got {dt}"
        )));
    }
    Ok(())
}

/// Classical four-stage Runge–Kutta step. `t` is only used to label a
/// blow-up.
pub fn rk4_step<S: HamiltonianSystem + ?Sized>(
    system: &S,
    z: &[C64],
    dt: f64,
    t: f64,
) -> Result<Vec<C64>> {
    check_dt(dt)?;
    let k1 = system.rhs_vec(z)?;
    let k2 = system.rhs_vec(&axpy(z, 0.5 * dt, &k1))?;
    let k3 = system.rhs_vec(&axpy(z, 0.5 * dt, &k2))?;
    let k4 = system.rhs_vec(&axpy(z, dt, &k3))?;
    let out: Vec<C64> = (0..z.len())
        .map(|i| z[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0))
        .collect();
    if !all_finite(&out) {
        return Err(LabError::BlowUp {
            t: t + dt,
            partial: None,
        });
    }
    Ok(out)
}

/// Implicit midpoint `y₁ = y₀ + dt f((y₀ + y₁)/2)` by fixed-point iteration,
/// stopping when successive iterates differ by less than
/// `tol · max(1, ‖y‖∞)`.
pub fn implicit_midpoint_step<S: HamiltonianSystem + ?Sized>(
    system: &S,
    z: &[C64],
    dt: f64,
    tol: f64,
    max_iter: usize,
    t: f64,
) -> Result<Vec<C64>> {
    check_dt(dt)?;
    if !(tol > 0.0) {
        return Err(LabError::InvalidParameter(format!(
            "tol must be > 0, got {tol}"
        )));
    }
    let f0 = system.rhs_vec(z)?;
    let mut next = axpy(z, dt, &f0);
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let mid: Vec<C64> = z.iter().zip(&next).map(|(a, b)| (a + b) * 0.5).collect();
        let f = system.rhs_vec(&mid)?;
        let candidate = axpy(z, dt, &f);
        if !all_finite(&candidate) {
            return Err(LabError::BlowUp {
                t: t + dt,
                partial: None,
            });
        }
        let scale = candidate.iter().map(|v| v.norm()).fold(1.0, f64::max);
        residual = candidate
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / scale;
        next = candidate;
        if residual < tol {
            return Ok(next);
        }
    }
    Err(LabError::NoConvergence { max_iter, residual })
}

pub fn step<S: HamiltonianSystem + ?Sized>(
    system: &S,
    z: &[C64],
    dt: f64,
    scheme: Scheme,
    t: f64,
) -> Result<Vec<C64>> {
    match scheme {
        Scheme::Rk4 => rk4_step(system, z, dt, t),
        Scheme::ImplicitMidpoint { tol, max_iter } => {
            implicit_midpoint_step(system, z, dt, tol, max_iter, t)
        }
    }
}

/// Number of whole steps of size `dt` in `[0, t_end]`.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    (t_end / dt * (1.0 + 1e-12)).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub t_end: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub observe_every: usize,
    /// Exponent of the `X_α` norm column.
    pub alpha: f64,
}

/// Fixed-step march from `t = 0`, snapshotting every `observe_every` steps
/// (and at `t = 0`). Times are `step·dt`, never accumulated.
///
/// On blow-up (non-finite state or overflowing interaction sums) the error
/// carries the trajectory up to the last finite snapshot.
pub fn evolve<S: HamiltonianSystem + ?Sized>(
    system: &S,
    z0: &[C64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if !(opts.t_end.is_finite() && opts.t_end > 0.0) {
        return Err(LabError::InvalidParameter(format!(
            "t_end must be > 0, got {}",
            opts.t_end
        )));
    }
    check_dt(opts.dt)?;
    if opts.observe_every == 0 {
        return Err(LabError::InvalidParameter(
            "observe_every must be >= 1".into(),
        ));
    }
    if z0.len() != system.dim() {
        return Err(LabError::InvalidParameter(format!(
            "initial state has {} coordinates, system expects {}",
            z0.len(),
            system.dim()
        )));
    }
    let n = step_count(opts.t_end, opts.dt);
    let mut traj = Trajectory::default();
    traj.push(system, 0.0, z0, opts.alpha);
    let mut z = z0.to_vec();
    for i in 0..n {
        let t = i as f64 * opts.dt;
        z = match step(system, &z, opts.dt, opts.scheme, t) {
            Ok(z) => z,
            Err(LabError::BlowUp { t, .. }) => {
                return Err(LabError::BlowUp {
                    t,
                    partial: Some(Box::new(traj)),
                })
            }
            // overflowing interaction sums are the same event seen earlier
            Err(LabError::BlockOverflow { .. } | LabError::HamiltonianOverflow) => {
                return Err(LabError::BlowUp {
                    t,
                    partial: Some(Box::new(traj)),
                })
            }
            Err(e) => return Err(e),
        };
        if (i + 1) % opts.observe_every == 0 {
            traj.push(system, (i + 1) as f64 * opts.dt, &z, opts.alpha);
        }
    }
    Ok(traj)
}

/// Advances `n` steps without recording anything.
pub fn advance<S: HamiltonianSystem + ?Sized>(
    system: &S,
    z0: &[C64],
    dt: f64,
    n: usize,
    scheme: Scheme,
) -> Result<Vec<C64>> {
    let mut z = z0.to_vec();
    for i in 0..n {
        z = step(system, &z, dt, scheme, i as f64 * dt)?;
    }
    Ok(z)
}

/// Comparison of a system's right-hand side with
/// `-i w_k^{-1} ∂H/∂z̄_k` from central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    /// Finite-difference symplectic gradient.
    pub reference: Vec<C64>,
    pub rhs: Vec<C64>,
    /// `|rhs_k - reference_k| / max_j |reference_j|`.
    pub relative_errors: Vec<f64>,
    pub max_relative_error: f64,
}

pub const DEFAULT_FD_STEP: f64 = 1e-5;

pub fn flow_consistency_check<S: HamiltonianSystem + ?Sized>(
    system: &S,
    z: &[C64],
    fd_step: f64,
) -> Result<FlowReport> {
    let grad = wirtinger_gradient(|p| system.hamiltonian(p), z, fd_step)?;
    let weights = system.symplectic_weights();
    let reference: Vec<C64> = grad
        .iter()
        .zip(&weights)
        .map(|(g, w)| MINUS_I * g / *w)
        .collect();
    let rhs = system.rhs_vec(z)?;
    let scale = reference.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let relative_errors: Vec<f64> = rhs
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).norm() / scale)
        .collect();
    let max_relative_error = relative_errors.iter().cloned().fold(0.0, f64::max);
    Ok(FlowReport {
        reference,
        rhs,
        relative_errors,
        max_relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{Invariants, Spectrum};

    /// `ẏ = -y` on one coordinate.
    struct Decay;

    impl HamiltonianSystem for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, z: &[C64], out: &mut [C64]) -> Result<()> {
            out[0] = -z[0];
            Ok(())
        }
        fn hamiltonian(&self, _: &[C64]) -> f64 {
            0.0
        }
        fn symplectic_weights(&self) -> Vec<f64> {
            vec![1.0]
        }
        fn modulation_frequencies(&self) -> Vec<f64> {
            vec![0.0]
        }
        fn invariants(&self, z: &[C64], _: f64) -> Invariants {
            Invariants {
                mass: z[0].norm_sqr(),
                energy: 0.0,
                hamiltonian: 0.0,
                xalpha: z[0].norm(),
            }
        }
        fn spectrum(&self, _: &[C64]) -> Spectrum {
            Spectrum {
                frequencies: vec![],
                masses: vec![],
            }
        }
        fn describe(&self) -> String {
            "decay".into()
        }
    }

    /// `i ȧ = 2|a|²a`, the condensate-only system.
    struct Condensate;

    impl HamiltonianSystem for Condensate {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, z: &[C64], out: &mut [C64]) -> Result<()> {
            out[0] = MINUS_I * 2.0 * z[0].norm_sqr() * z[0];
            Ok(())
        }
        fn hamiltonian(&self, z: &[C64]) -> f64 {
            z[0].norm_sqr().powi(2)
        }
        fn symplectic_weights(&self) -> Vec<f64> {
            vec![1.0]
        }
        fn modulation_frequencies(&self) -> Vec<f64> {
            vec![0.0]
        }
        fn invariants(&self, z: &[C64], _: f64) -> Invariants {
            Invariants {
                mass: z[0].norm_sqr(),
                energy: 0.0,
                hamiltonian: self.hamiltonian(z),
                xalpha: z[0].norm(),
            }
        }
        fn spectrum(&self, _: &[C64]) -> Spectrum {
            Spectrum {
                frequencies: vec![],
                masses: vec![],
            }
        }
        fn describe(&self) -> String {
            "condensate".into()
        }
    }

    #[test]
    fn rk4_decay_is_fourth_order() {
        let err = |dt: f64| {
            let n = step_count(1.0, dt);
            let y = advance(&Decay, &[C64::new(1.0, 0.0)], dt, n, Scheme::Rk4).unwrap();
            (y[0].re - (-1f64).exp()).abs()
        };
        let r = err(0.1) / err(0.05);
        assert!((r - 16.0).abs() < 1.0, "ratio {r}");
    }

    #[test]
    fn rk4_condensate_closed_form() {
        let y = advance(&Condensate, &[C64::new(1.0, 0.0)], 1e-3, 1000, Scheme::Rk4).unwrap();
        let exact = C64::from_polar(1.0, -2.0);
        assert!((y[0] - exact).norm() < 1e-10);
    }

    #[test]
    fn zero_stays_zero() {
        let zero = [C64::new(0.0, 0.0)];
        assert_eq!(rk4_step(&Condensate, &zero, 0.1, 0.0).unwrap()[0], zero[0]);
        assert_eq!(
            implicit_midpoint_step(&Condensate, &zero, 0.1, 1e-13, 50, 0.0).unwrap()[0],
            zero[0]
        );
    }

    #[test]
    fn midpoint_conserves_modulus_at_large_dt() {
        let a0 = C64::new(0.6, 0.3);
        let y = advance(&Condensate, &[a0], 0.05, 200, Scheme::midpoint()).unwrap();
        assert!((y[0].norm_sqr() - a0.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn midpoint_is_second_order() {
        let err = |dt: f64| {
            let y = advance(
                &Condensate,
                &[C64::new(1.0, 0.0)],
                dt,
                step_count(1.0, dt),
                Scheme::midpoint(),
            )
            .unwrap();
            (y[0] - C64::from_polar(1.0, -2.0)).norm()
        };
        let r = err(0.02) / err(0.01);
        assert!((r - 4.0).abs() < 0.2, "ratio {r}");
    }

    #[test]
    fn midpoint_reports_nonconvergence() {
        let r = implicit_midpoint_step(&Condensate, &[C64::new(3.0, 0.0)], 1.0, 1e-13, 50, 0.0);
        assert!(matches!(
            r,
            Err(LabError::NoConvergence { .. }) | Err(LabError::BlowUp { .. })
        ));
    }

    #[test]
    fn evolve_row_count_and_rejections() {
        let opts = EvolveOptions {
            t_end: 1.0,
            dt: 0.01,
            scheme: Scheme::Rk4,
            observe_every: 7,
            alpha: 0.5,
        };
        let tr = evolve(&Condensate, &[C64::new(1.0, 0.0)], &opts).unwrap();
        assert_eq!(
            tr.observables.len(),
            (1.0f64 / (0.01 * 7.0)).floor() as usize + 1
        );
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        for row in &tr.observables {
            let phase = C64::from_polar(1.0, -2.0 * row.t);
            assert!((row.a - phase).norm() < 1e-7);
        }
        assert!(evolve(
            &Condensate,
            &[C64::new(1.0, 0.0)],
            &EvolveOptions { t_end: 0.0, ..opts }
        )
        .is_err());
        assert!(evolve(
            &Condensate,
            &[C64::new(1.0, 0.0)],
            &EvolveOptions { dt: -1.0, ..opts }
        )
        .is_err());
    }

    #[test]
    fn blow_up_keeps_partial_trajectory() {
        // unit explicit steps on |a| = 2 overshoot until the iterates overflow
        let opts = EvolveOptions {
            t_end: 50.0,
            dt: 1.0,
            scheme: Scheme::Rk4,
            observe_every: 1,
            alpha: 0.0,
        };
        match evolve(&Condensate, &[C64::new(2.0, 0.0)], &opts) {
            Err(LabError::BlowUp {
                t,
                partial: Some(p),
            }) => {
                assert!(t > 0.0);
                assert!(!p.is_empty());
                assert!(p.states.iter().all(|s| all_finite(s)));
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn flow_check_on_condensate() {
        let rep =
            flow_consistency_check(&Condensate, &[C64::new(0.4, -0.9)], DEFAULT_FD_STEP).unwrap();
        assert!(rep.max_relative_error < 1e-8);
    }
}
