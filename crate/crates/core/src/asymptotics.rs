//! Exact Hamiltonian pieces of the high-frequency Ansatz against their
//! limiting integrals, plus the `ψ` function and the Laplace collapse it
//! drives.
//!
//! Splitting `u = aφ_0 + v_λ` in the quartic form gives
//!
//! ```text
//! ℋ₀ = ℋ(A,A,A,A)
//! ℋ₁ = 2[ℋ(V,A,A,A) + ℋ(A,A,V,A)]
//! ℋ₂ = ℋ(V,V,A,A) + ℋ(A,A,V,V) + 4ℋ(V,A,V,A)
//! ℋ₃ = 2[ℋ(V,V,V,A) + ℋ(A,V,V,V)]
//! ℋ₄ = ℋ(V,V,V,V)
//! ```
//!
//! with limits `𝔥₀ = |a|⁴`, `𝔥₂ = 4|a|² ∫ 2^{-λx}|g|²`,
//! `𝔥₃ = 2^{9/4}π^{1/4}λ^{-1/4} Re a ∫ x^{1/4} 2^{-λx/2} ḡ(x/2)² g(x)` and
//! `𝔥₄ = sqrt(2π/λ) ∫ sqrt(s) |g(s/2)|⁴`.
//!
//! Normalization note: the `|a|⁴` prefactor of the leading term is taken as
//! `ℋ(φ_0) = 1`, matching the Fock-coefficient form of the equation. An
//! alternative `π/8` constant for the `O(1)` truncation is not modelled.

use std::f64::consts::{LN_2, PI};

use crate::error::{LabError, Result};
use crate::fock::{ansatz_parts, multilinear_h, WeightTable};
use crate::model::{interaction_constant, FockState, C64};
use crate::numerics::CompositeGauss;

/// Relative tolerance of the limit-term quadratures.
pub const QUAD_TOL: f64 = 1e-8;

/// `ψ(θ) = θ^{-θ} (1-θ)^{-(1-θ)}`, evaluated as the exponential of the
/// binary entropy in nats.
pub fn psi(theta: f64) -> Result<f64> {
    Ok(log_psi(theta)?.exp())
}

pub fn log_psi(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(LabError::Domain(format!(
            "psi needs 0 < theta < 1, got {theta}"
        )));
    }
    let rest = 1.0 - theta;
    Ok(-(theta * theta.ln()) - rest * rest.ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceComparison {
    /// `∫₀¹ ψ^{αλ} F` (may be `inf` for huge `αλ`; see the log fields).
    pub integral: f64,
    /// `F(½) 2^{αλ} sqrt(π) / sqrt(2αλ)`.
    pub asymptote: f64,
    pub ratio: f64,
    pub log_integral: f64,
    pub log_asymptote: f64,
}

/// Compares `∫₀¹ ψ(θ)^{αλ} F(θ) dθ` with its Laplace asymptote. Both sides
/// are computed relative to the peak value `2^{αλ}`.
pub fn laplace_ratio<F: Fn(f64) -> f64>(
    f: F,
    alpha: f64,
    lambda: f64,
) -> Result<LaplaceComparison> {
    let n = alpha * lambda;
    if !(alpha > 0.0) || !(n >= 4.0) {
        return Err(LabError::InvalidParameter(format!(
            "need alpha > 0 and alpha*lambda >= 4, got alpha = {alpha}, lambda = {lambda}"
        )));
    }
    let center = f(0.5);
    let sign_change = (1..64).map(|i| f(i as f64 / 64.0)).any(|v| v > 0.0);
    if center == 0.0 || (center < 0.0 && sign_change) {
        return Err(LabError::AsymptoteNotApplicable(format!(
            "F(1/2) = {center} with a sign-changing F"
        )));
    }
    let quad = CompositeGauss::new(8);
    let scaled = quad.integrate(
        |theta| {
            let lp = log_psi(theta).expect("gauss nodes are interior");
            (n * (lp - LN_2)).exp() * f(theta)
        },
        0.0,
        1.0,
        1e-12,
    )?;
    let asym_scaled = center * PI.sqrt() / (2.0 * n).sqrt();
    let log_integral = n * LN_2 + scaled.abs().ln();
    let log_asymptote = n * LN_2 + asym_scaled.abs().ln();
    Ok(LaplaceComparison {
        integral: scaled.signum() * log_integral.exp(),
        asymptote: asym_scaled.signum() * log_asymptote.exp(),
        ratio: scaled / asym_scaled,
        log_integral,
        log_asymptote,
    })
}

/// A profile `g(s)` with a declared essential support `[lo, hi]`.
pub struct Profile {
    f: Box<dyn Fn(f64) -> C64 + Send + Sync>,
    lo: f64,
    hi: f64,
}

impl Profile {
    pub fn new<F>(f: F, lo: f64, hi: f64) -> Result<Self>
    where
        F: Fn(f64) -> C64 + Send + Sync + 'static,
    {
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(LabError::InvalidParameter(format!(
                "profile support [{lo}, {hi}] must satisfy 0 <= lo < hi < inf"
            )));
        }
        Ok(Self {
            f: Box::new(f),
            lo,
            hi,
        })
    }

    /// `amplitude · exp(-1/((x-lo)(hi-x)))` on `(lo, hi)`, zero elsewhere.
    pub fn bump(lo: f64, hi: f64, amplitude: C64) -> Result<Self> {
        Self::new(
            move |x| {
                if x > lo && x < hi {
                    amplitude * (-1.0 / ((x - lo) * (hi - x))).exp()
                } else {
                    C64::new(0.0, 0.0)
                }
            },
            lo,
            hi,
        )
    }

    pub fn eval(&self, x: f64) -> C64 {
        if x < self.lo || x > self.hi {
            C64::new(0.0, 0.0)
        } else {
            (self.f)(x)
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// `g(n/λ)` for `n = 0..=N`.
    pub fn samples(&self, lambda: usize, truncation: usize) -> Vec<C64> {
        (0..=truncation)
            .map(|n| self.eval(n as f64 / lambda as f64))
            .collect()
    }

    fn sup_norm(&self) -> f64 {
        let n = 2048;
        (0..=n)
            .map(|i| {
                self.eval(self.lo + (self.hi - self.lo) * i as f64 / n as f64)
                    .norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Exact values `ℋ₀ … ℋ₄` from the Fock multilinear form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactTerms {
    pub terms: [C64; 5],
    /// `ℋ(c)` of the combined Ansatz state.
    pub full: f64,
}

impl ExactTerms {
    pub fn sum(&self) -> C64 {
        self.terms.iter().sum()
    }
}

/// Splits the Ansatz state for `(a, g)` and evaluates the five groupings.
pub fn exact_h_terms(
    table: &WeightTable,
    a: C64,
    samples: &[C64],
    lambda: usize,
) -> Result<ExactTerms> {
    let n = table.truncation();
    let (cond, tail) = ansatz_parts(a, samples, lambda, n)?;
    let whole: Vec<C64> = cond.iter().zip(&tail).map(|(x, y)| x + y).collect();
    let a_st = FockState::new(cond)?;
    let v_st = FockState::new(tail)?;
    let whole = FockState::new(whole)?;
    let h = |e: &FockState, f: &FockState, g: &FockState, k: &FockState| {
        multilinear_h(table, e, f, g, k)
    };
    let (ap, vp) = (&a_st, &v_st);
    let terms = [
        h(ap, ap, ap, ap)?,
        (h(vp, ap, ap, ap)? + h(ap, ap, vp, ap)?) * 2.0,
        h(vp, vp, ap, ap)? + h(ap, ap, vp, vp)? + h(vp, ap, vp, ap)? * 4.0,
        (h(vp, vp, vp, ap)? + h(ap, vp, vp, vp)?) * 2.0,
        h(vp, vp, vp, vp)?,
    ];
    Ok(ExactTerms {
        terms,
        full: h(&whole, &whole, &whole, &whole)?.re,
    })
}

/// Limiting equivalents `𝔥₀, 𝔥₂, 𝔥₃, 𝔥₄` and the combined form
/// `|a|⁴ + 4∫|a g(s) 2^{-λs/2} + K (s/λ)^{1/4} g(s/2)²|² ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitTerms {
    pub h0: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
    pub combined: f64,
}

impl LimitTerms {
    pub fn sum(&self) -> f64 {
        self.h0 + self.h2 + self.h3 + self.h4
    }
}

/// `∫_lo^hi f` in pieces of width `~4/decay`, stopping once the remaining
/// damped tail (bounded by `envelope · e^{-decay x} / decay`) is below
/// `1e-12` of the running value.
fn damped_integral<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    decay: f64,
    envelope: f64,
) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let quad = CompositeGauss::new(2);
    let piece = if decay > 0.0 {
        (4.0 / decay).min(hi - lo)
    } else {
        (hi - lo) / 8.0
    };
    let mut running = crate::numerics::CompensatedSum::<f64>::default();
    let mut x = lo;
    while x < hi {
        let next = (x + piece).min(hi);
        running.add(quad.integrate(&f, x, next, 0.01 * QUAD_TOL)?);
        x = next;
        if decay > 0.0 && running.value() != 0.0 {
            let tail = envelope * (-decay * x).exp() / decay;
            if tail < 1e-12 * running.value().abs() {
                break;
            }
        }
    }
    Ok(running.value())
}

pub fn limit_h_terms(a: C64, g: &Profile, lambda: f64) -> Result<LimitTerms> {
    if !(lambda >= 1.0) {
        return Err(LabError::InvalidParameter(format!(
            "lambda must be >= 1, got {lambda}"
        )));
    }
    let (lo, hi) = g.support();
    let k = interaction_constant();
    let sup = g.sup_norm();
    let a2 = a.norm_sqr();

    let h2_int = damped_integral(
        |x| 2f64.powf(-lambda * x) * g.eval(x).norm_sqr(),
        lo,
        hi,
        lambda * LN_2,
        sup * sup,
    )?;
    let h2 = 4.0 * a2 * h2_int;

    // g(x/2) needs x in [2lo, 2hi], g(x) needs x in [lo, hi]
    let (lo3, hi3) = ((2.0 * lo).max(lo), hi.min(2.0 * hi));
    let h3_re = damped_integral(
        |x| {
            (a * x.powf(0.25)
                * 2f64.powf(-0.5 * lambda * x)
                * g.eval(0.5 * x).conj().powi(2)
                * g.eval(x))
            .re
        },
        lo3,
        hi3,
        0.5 * lambda * LN_2,
        a.norm() * hi3.max(1.0).powf(0.25) * sup.powi(3),
    )?;
    let h3 = 2f64.powf(2.25) * PI.powf(0.25) * lambda.powf(-0.25) * h3_re;

    let h4_int = damped_integral(
        |s| s.sqrt() * g.eval(0.5 * s).norm_sqr().powi(2),
        2.0 * lo,
        2.0 * hi,
        0.0,
        0.0,
    )?;
    let h4 = (2.0 * PI / lambda).sqrt() * h4_int;

    let combined_int = damped_integral(
        |s| {
            let gs = g.eval(s);
            let half = g.eval(0.5 * s);
            (a * gs * 2f64.powf(-0.5 * lambda * s) + k * (s / lambda).powf(0.25) * half * half)
                .norm_sqr()
        },
        lo,
        2.0 * hi,
        0.0,
        0.0,
    )?;
    let out = LimitTerms {
        h0: a2 * a2,
        h2,
        h3,
        h4,
        combined: a2 * a2 + 4.0 * combined_int,
    };
    let gap = (out.combined - out.sum()).abs();
    if gap > 10.0 * QUAD_TOL * out.combined.abs().max(f64::MIN_POSITIVE) {
        return Err(LabError::QuadratureNonConvergent {
            achieved: gap / out.combined.abs(),
        });
    }
    Ok(out)
}

/// Exact and limiting pieces at one `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianBreakdown {
    pub lambda: usize,
    pub exact: ExactTerms,
    pub limit: LimitTerms,
}

impl HamiltonianBreakdown {
    /// `ℋ_k / 𝔥_k` for `k = 2, 3, 4` (real parts of the exact terms).
    pub fn ratios(&self) -> [f64; 3] {
        [
            self.exact.terms[2].re / self.limit.h2,
            self.exact.terms[3].re / self.limit.h3,
            self.exact.terms[4].re / self.limit.h4,
        ]
    }
}

/// Both sides at integer `λ` with the smallest truncation holding the
/// profile, `N = ⌈λ·hi⌉`.
pub fn breakdown(a: C64, g: &Profile, lambda: usize) -> Result<HamiltonianBreakdown> {
    let truncation = (lambda as f64 * g.support().1).ceil() as usize;
    let table = WeightTable::new(truncation);
    let exact = exact_h_terms(&table, a, &g.samples(lambda, truncation), lambda)?;
    let limit = limit_h_terms(a, g, lambda as f64)?;
    Ok(HamiltonianBreakdown {
        lambda,
        exact,
        limit,
    })
}
