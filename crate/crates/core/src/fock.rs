//! The LLL equation in Fock coefficients.
//!
//! With `S = k + ℓ = m + n` the interaction weight factorizes as
//! `w(k,ℓ,m,n) = b(S,k)·b(S,m)` where
//! `b(S,k) = sqrt(C(S,k) / 2^S) ∈ (0, 1]`. Every `b` is built from
//! `ln(n!)` in log-space, so no factorial is ever formed explicitly and
//! truncations far beyond `n = 170` stay finite.
//!
//! The high-frequency Ansatz `u = aφ_0 + λ^{-1/2} Σ_n g(n/λ) φ_n` needs a
//! truncation `N ≥ λ·k_max` to hold the whole profile; choosing `N` is left
//! to the caller.

use std::f64::consts::LN_2;

use crate::error::{LabError, Result};
use crate::model::{ensure_finite, FockState, C64};
use crate::numerics::{log_factorials, sum_c64, sum_f64, CompensatedSum};
use crate::system::{HamiltonianSystem, Invariants, Spectrum};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Log-factorials up to `2N` and the half-weights `b(S,k)` for `S ≤ 2N`.
#[derive(Debug, Clone)]
pub struct WeightTable {
    log_factorials: Vec<f64>,
    truncation: usize,
    // half[S][k - k_lo(S)] for k in k_lo(S)..=k_hi(S)
    half: Vec<Vec<f64>>,
}

impl WeightTable {
    pub fn new(truncation: usize) -> Self {
        let log_factorials = log_factorials(2 * truncation);
        let half = (0..=2 * truncation)
            .map(|s| {
                let (lo, hi) = k_range(s, truncation);
                (lo..=hi)
                    .map(|k| half_weight_log(&log_factorials, s, k).exp())
                    .collect()
            })
            .collect();
        Self {
            log_factorials,
            truncation,
            half,
        }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn log_factorials(&self) -> &[f64] {
        &self.log_factorials
    }

    /// `(k+ℓ)! / (2^{k+ℓ} sqrt(k! ℓ! m! n!))`, evaluated in log-space.
    pub fn interaction_weight(&self, k: usize, l: usize, m: usize, n: usize) -> Result<f64> {
        if k + l != m + n {
            return Err(LabError::MomentumMismatch { k, l, m, n });
        }
        let max = self.log_factorials.len() - 1;
        if k + l > max {
            return Err(LabError::IndexOutOfRange { index: k + l, max });
        }
        let lf = &self.log_factorials;
        let s = k + l;
        let log_w = lf[s] - s as f64 * LN_2 - 0.5 * (lf[k] + lf[l] + lf[m] + lf[n]);
        Ok(log_w.exp())
    }

    /// `b(S,k)` for indices inside the truncated range.
    #[inline]
    fn half(&self, s: usize, k: usize) -> f64 {
        let (lo, _) = k_range(s, self.truncation);
        self.half[s][k - lo]
    }
}

fn half_weight_log(lf: &[f64], s: usize, k: usize) -> f64 {
    0.5 * (lf[s] - lf[k] - lf[s - k] - s as f64 * LN_2)
}

/// Admissible `k` with `k ≤ N` and `S - k ≤ N`.
#[inline]
fn k_range(s: usize, n: usize) -> (usize, usize) {
    (s.saturating_sub(n), s.min(n))
}

fn check_truncation(table: &WeightTable, len: usize) -> Result<()> {
    if len != table.truncation + 1 {
        return Err(LabError::TruncationMismatch(len - 1, table.truncation));
    }
    Ok(())
}

/// Pair sums `D_S(e, f) = Σ_{k+ℓ=S} b(S,k) e_k f_ℓ` for `S = 0..=2N`.
fn pair_sums(table: &WeightTable, e: &[C64], f: &[C64]) -> Vec<C64> {
    let n = table.truncation;
    (0..=2 * n)
        .map(|s| {
            let (lo, hi) = k_range(s, n);
            let mut acc = CompensatedSum::<C64>::default();
            for (i, k) in (lo..=hi).enumerate() {
                acc.add(e[k] * f[s - k] * table.half[s][i]);
            }
            acc.value()
        })
        .collect()
}

/// The multilinear form `ℋ(e,f,g,h) = Σ_{k+ℓ=m+n} w e_k f_ℓ ḡ_m h̄_n`.
pub fn multilinear_h(
    table: &WeightTable,
    e: &FockState,
    f: &FockState,
    g: &FockState,
    h: &FockState,
) -> Result<C64> {
    for st in [e, f, g, h] {
        check_truncation(table, st.coeffs().len())?;
    }
    let left = pair_sums(table, e.coeffs(), f.coeffs());
    let right = pair_sums(table, g.coeffs(), h.coeffs());
    let value = sum_c64(left.iter().zip(&right).map(|(l, r)| l * r.conj()));
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(LabError::HamiltonianOverflow);
    }
    Ok(value)
}

/// Reference right-hand side: the triple sum over admissible `(k, ℓ, m)` for
/// each `n`, `O(N³)`.
pub fn lll_rhs_direct(table: &WeightTable, c: &FockState) -> Result<FockState> {
    let cs = c.coeffs();
    check_truncation(table, cs.len())?;
    let n_max = table.truncation;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut acc = CompensatedSum::<C64>::default();
        for k in 0..=n_max {
            for l in 0..=n_max {
                if k + l < n || k + l - n > n_max {
                    continue;
                }
                let m = k + l - n;
                let w = table.interaction_weight(k, l, m, n)?;
                acc.add(cs[k] * cs[l] * cs[m].conj() * w);
            }
        }
        out.push(C64::new(0.0, -2.0) * acc.value());
    }
    ensure_finite(&out, "rhs").map_err(|_| LabError::HamiltonianOverflow)?;
    Ok(FockState::new(out).expect("finite by construction"))
}

/// `ċ_n = -2i Σ_S b(S,n) c̄_{S-n} D_S` with `D_S = Σ_{k+ℓ=S} b(S,k) c_k c_ℓ`.
///
/// `O(N²)`; each `(S, n)` block multiplies factors that are already bounded
/// by one, so intermediate quantities never leave the double range unless
/// the state itself does.
pub fn lll_rhs_fast(table: &WeightTable, c: &FockState) -> Result<FockState> {
    let cs = c.coeffs();
    check_truncation(table, cs.len())?;
    let mut out = vec![ZERO; cs.len()];
    rhs_fast_into(table, cs, &mut out)?;
    Ok(FockState::new(out).expect("finite by construction"))
}

fn rhs_fast_into(table: &WeightTable, cs: &[C64], out: &mut [C64]) -> Result<()> {
    let n_max = table.truncation;
    let d = pair_sums(table, cs, cs);
    if let Some(s) = d
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(LabError::BlockOverflow { s });
    }
    for (n, slot) in out.iter_mut().enumerate() {
        let mut acc = CompensatedSum::<C64>::default();
        for s in n..=n + n_max {
            acc.add(d[s] * cs[s - n].conj() * table.half(s, n));
        }
        let v = acc.value();
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(LabError::BlockOverflow { s: n });
        }
        *slot = C64::new(0.0, -2.0) * v;
    }
    Ok(())
}

/// `c_0 = a`, `c_n = g(n/λ)/√λ` for `1 ≤ n ≤ N`.
///
/// `samples[n]` holds `g(n/λ)`; samples beyond `N` are dropped and missing
/// ones are zero. `samples[0]` must vanish.
pub fn ansatz_coefficients(
    a: C64,
    samples: &[C64],
    lambda: usize,
    truncation: usize,
) -> Result<FockState> {
    let (cond, mut tail) = ansatz_parts(a, samples, lambda, truncation)?;
    tail[0] = cond[0];
    FockState::new(tail)
}

/// The Ansatz split into its condensate part `aφ_0` and its tail `v_λ`.
pub fn ansatz_parts(
    a: C64,
    samples: &[C64],
    lambda: usize,
    truncation: usize,
) -> Result<(Vec<C64>, Vec<C64>)> {
    if lambda < 1 {
        return Err(LabError::InvalidAnsatz("lambda must be >= 1".into()));
    }
    if samples.first().is_some_and(|g0| *g0 != ZERO) {
        return Err(LabError::InvalidAnsatz(
            "profile must vanish at zero frequency, g(0) != 0".into(),
        ));
    }
    ensure_finite(samples, "profile samples")?;
    ensure_finite(&[a], "condensate amplitude")?;
    let scale = 1.0 / (lambda as f64).sqrt();
    let mut cond = vec![ZERO; truncation + 1];
    cond[0] = a;
    let mut tail = vec![ZERO; truncation + 1];
    for (n, g) in samples.iter().enumerate().skip(1).take(truncation) {
        tail[n] = g * scale;
    }
    Ok((cond, tail))
}

/// Samples `g(n/λ)` of a profile for `n = 0..=N`.
pub fn sample_profile<F: Fn(f64) -> C64>(profile: F, lambda: usize, truncation: usize) -> Vec<C64> {
    (0..=truncation)
        .map(|n| profile(n as f64 / lambda as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockInvariants {
    pub mass: f64,
    pub angular_momentum: f64,
    pub hamiltonian: f64,
}

pub fn fock_invariants(table: &WeightTable, c: &FockState) -> Result<FockInvariants> {
    let cs = c.coeffs();
    Ok(FockInvariants {
        mass: sum_f64(cs.iter().map(|z| z.norm_sqr())),
        angular_momentum: sum_f64(cs.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr())),
        hamiltonian: multilinear_h(table, c, c, c, c)?.re,
    })
}

/// The truncated LLL flow as a [`HamiltonianSystem`] (unit symplectic weights).
#[derive(Debug, Clone)]
pub struct FockSystem {
    table: WeightTable,
}

impl FockSystem {
    pub fn new(truncation: usize) -> Self {
        Self {
            table: WeightTable::new(truncation),
        }
    }

    pub fn table(&self) -> &WeightTable {
        &self.table
    }

    fn state(&self, z: &[C64]) -> FockState {
        FockState::new(z.to_vec()).unwrap_or_else(|_| FockState::zeros(self.table.truncation))
    }
}

impl HamiltonianSystem for FockSystem {
    fn dim(&self) -> usize {
        self.table.truncation + 1
    }

    fn rhs(&self, z: &[C64], out: &mut [C64]) -> Result<()> {
        check_truncation(&self.table, z.len())?;
        rhs_fast_into(&self.table, z, out)
    }

    fn hamiltonian(&self, z: &[C64]) -> f64 {
        let pairs = pair_sums(&self.table, z, z);
        sum_f64(pairs.iter().map(|d| d.norm_sqr()))
    }

    fn symplectic_weights(&self) -> Vec<f64> {
        vec![1.0; self.dim()]
    }

    fn modulation_frequencies(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| n as f64).collect()
    }

    fn invariants(&self, z: &[C64], alpha: f64) -> Invariants {
        let inv = fock_invariants(&self.table, &self.state(z)).unwrap_or(FockInvariants {
            mass: f64::NAN,
            angular_momentum: f64::NAN,
            hamiltonian: f64::NAN,
        });
        let sup = z
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| (1.0 + (n * n) as f64).powf(0.5 * alpha) * c.norm())
            .fold(0.0, f64::max);
        Invariants {
            mass: inv.mass,
            energy: inv.angular_momentum,
            hamiltonian: inv.hamiltonian,
            xalpha: z[0].norm() + sup,
        }
    }

    fn spectrum(&self, z: &[C64]) -> Spectrum {
        Spectrum {
            frequencies: (1..z.len()).map(|n| n as f64).collect(),
            masses: z.iter().skip(1).map(|c| c.norm_sqr()).collect(),
        }
    }

    fn describe(&self) -> String {
        format!(
            "fock system: i dc_n/dt = 2 sum_{{k+l=m+n}} (k+l)!/(2^(k+l) sqrt(k! l! m! n!)) c_k c_l conj(c_m)\n\
             truncation N = {}\n\
             hamiltonian H(c) = sum w c_k c_l conj(c_m c_n); unit symplectic weights",
            self.table.truncation
        )
    }
}
