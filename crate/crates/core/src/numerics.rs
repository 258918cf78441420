//! Small numerical building blocks: compensated summation, log-factorials
//! and composite Gauss–Legendre quadrature.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{LabError, Result};
use crate::model::C64;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl CompensatedSum<f64> {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl CompensatedSum<C64> {
    pub fn add(&mut self, x: C64) {
        let mut re = CompensatedSum {
            sum: self.sum.re,
            carry: self.carry.re,
        };
        let mut im = CompensatedSum {
            sum: self.sum.im,
            carry: self.carry.im,
        };
        re.add(x.re);
        im.add(x.im);
        self.sum = C64::new(re.sum, im.sum);
        self.carry = C64::new(re.carry, im.carry);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.carry
    }
}

/// Compensated sum of a real sequence in iteration order.
pub fn sum_f64<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::<f64>::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Compensated sum of a complex sequence in iteration order.
pub fn sum_c64<I: IntoIterator<Item = C64>>(values: I) -> C64 {
    let mut acc = CompensatedSum::<C64>::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// `ln(n!)` for `n = 0..=max`, accumulated as `Σ ln k`.
pub fn log_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = CompensatedSum::<f64>::default();
    out.push(0.0);
    for k in 1..=max {
        acc.add((k as f64).ln());
        out.push(acc.value());
    }
    out
}

const GL_DEGREE: usize = 16;
const MAX_REFINEMENTS: usize = 14;

/// Composite Gauss–Legendre rule on `[lo, hi]` with dyadic panel refinement.
///
/// Panels double until two successive estimates agree to `rel_tol`
/// (relative to the finer estimate).
pub struct CompositeGauss {
    rule: GaussLegendre,
    initial_panels: usize,
}

impl Default for CompositeGauss {
    fn default() -> Self {
        Self::new(4)
    }
}

impl CompositeGauss {
    pub fn new(initial_panels: usize) -> Self {
        Self {
            rule: GaussLegendre::new(NonZeroUsize::new(GL_DEGREE).unwrap()),
            initial_panels: initial_panels.max(1),
        }
    }

    fn panels<F: FnMut(f64) -> C64>(&self, f: &mut F, lo: f64, hi: f64, n: usize) -> C64 {
        let width = (hi - lo) / n as f64;
        let half = 0.5 * width;
        let mut acc = CompensatedSum::<C64>::default();
        for p in 0..n {
            let mid = lo + (p as f64 + 0.5) * width;
            for &(x, w) in self.rule.as_node_weight_pairs() {
                acc.add(f(mid + half * x) * (w * half));
            }
        }
        acc.value()
    }

    /// Complex-valued integral.
    pub fn integrate_complex<F: FnMut(f64) -> C64>(
        &self,
        mut f: F,
        lo: f64,
        hi: f64,
        rel_tol: f64,
    ) -> Result<C64> {
        if hi <= lo {
            return Ok(C64::new(0.0, 0.0));
        }
        let mut n = self.initial_panels;
        let mut prev = self.panels(&mut f, lo, hi, n);
        let mut achieved = f64::INFINITY;
        for _ in 0..MAX_REFINEMENTS {
            n *= 2;
            let next = self.panels(&mut f, lo, hi, n);
            if !(next.re.is_finite() && next.im.is_finite()) {
                return Err(LabError::QuadratureNonConvergent {
                    achieved: f64::INFINITY,
                });
            }
            let diff = (next - prev).norm();
            let scale = next.norm();
            if diff == 0.0 || diff <= rel_tol * scale {
                return Ok(next);
            }
            achieved = diff / scale;
            prev = next;
        }
        Err(LabError::QuadratureNonConvergent { achieved })
    }

    pub fn integrate<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        lo: f64,
        hi: f64,
        rel_tol: f64,
    ) -> Result<f64> {
        self.integrate_complex(|x| C64::new(f(x), 0.0), lo, hi, rel_tol)
            .map(|z| z.re)
    }
}
