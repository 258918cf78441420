//! Dyadic-ray frequency grids.
//!
//! Points are `s_{r,j} = σ_r 2^j` with ray bases `σ_r = 2^{(r+½)/R}`, so the
//! union of all rays is a geometric sequence of ratio `2^{1/R}` and doubling
//! a frequency moves exactly one level up its own ray. The default weights
//! `w = s ln2 / R` make `Σ w F(s)` the midpoint rule in `ln s`.

use std::f64::consts::LN_2;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum WeightRule {
    /// `w = s ln2 / R`.
    LogMidpoint,
    /// `w = ε s`; the shell-model weights on a single ray with `σ = 1`.
    Shell { epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicGrid {
    sigma: Vec<f64>,
    j_min: i32,
    j_max: i32,
    points: Vec<f64>,
    weights: Vec<f64>,
    rule: WeightRule,
}

impl DyadicGrid {
    pub fn new(rays: usize, j_min: i32, j_max: i32) -> Result<Self> {
        if rays == 0 {
            return Err(LabError::InvalidGrid("ray count must be >= 1".into()));
        }
        let sigma: Vec<f64> = (0..rays)
            .map(|r| 2f64.powf((r as f64 + 0.5) / rays as f64))
            .collect();
        Self::build(sigma, j_min, j_max, WeightRule::LogMidpoint)
    }

    /// Single ray `s_j = 2^j` with weights `ε 2^j`.
    pub fn shell(j_min: i32, j_max: i32, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(LabError::InvalidParameter(format!(
                "epsilon must be > 0, got {epsilon}"
            )));
        }
        Self::build(vec![1.0], j_min, j_max, WeightRule::Shell { epsilon })
    }

    fn build(sigma: Vec<f64>, j_min: i32, j_max: i32, rule: WeightRule) -> Result<Self> {
        if j_min > j_max {
            return Err(LabError::InvalidGrid(format!(
                "j_min = {j_min} exceeds j_max = {j_max}"
            )));
        }
        let rays = sigma.len() as f64;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for &sig in &sigma {
            for j in j_min..=j_max {
                let s = sig * 2f64.powi(j);
                points.push(s);
                weights.push(match rule {
                    WeightRule::LogMidpoint => s * LN_2 / rays,
                    WeightRule::Shell { epsilon } => epsilon * s,
                });
            }
        }
        Ok(Self {
            sigma,
            j_min,
            j_max,
            points,
            weights,
            rule,
        })
    }

    pub fn rays(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn levels(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rule(&self) -> &WeightRule {
        &self.rule
    }

    /// Flat index of `(r, j)`.
    pub fn index(&self, ray: usize, j: i32) -> Option<usize> {
        (ray < self.rays() && (self.j_min..=self.j_max).contains(&j))
            .then(|| ray * self.levels() + (j - self.j_min) as usize)
    }

    /// `(r, j)` of a flat index.
    pub fn ray_level(&self, k: usize) -> (usize, i32) {
        let l = self.levels();
        (k / l, self.j_min + (k % l) as i32)
    }

    /// Index of `2s` on the same ray, if inside the grid.
    #[inline]
    pub fn up(&self, k: usize) -> Option<usize> {
        ((k % self.levels()) + 1 < self.levels()).then_some(k + 1)
    }

    /// Index of `s/2` on the same ray, if inside the grid.
    #[inline]
    pub fn down(&self, k: usize) -> Option<usize> {
        (!k.is_multiple_of(self.levels())).then(|| k - 1)
    }

    /// `Σ w F(s)` over the grid.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        crate::numerics::sum_f64(
            self.points
                .iter()
                .zip(&self.weights)
                .map(|(s, w)| w * f(*s)),
        )
    }

    pub fn describe(&self) -> String {
        let rule = match self.rule {
            WeightRule::LogMidpoint => format!("w = s ln2 / R (R = {})", self.rays()),
            WeightRule::Shell { epsilon } => format!("w = eps 2^j (eps = {epsilon})"),
        };
        format!(
            "grid: R = {} rays, j in [{}, {}], {} points, s in [{:.6e}, {:.6e}], weights {}",
            self.rays(),
            self.j_min,
            self.j_max,
            self.len(),
            self.points.iter().cloned().fold(f64::INFINITY, f64::min),
            self.points.iter().cloned().fold(0.0, f64::max),
            rule
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_ray_points() {
        let g = DyadicGrid::new(1, 0, 2).unwrap();
        let r2 = 2f64.sqrt();
        for (s, e) in g.points().iter().zip([r2, 2.0 * r2, 4.0 * r2]) {
            assert!((s - e).abs() < 1e-15);
        }
        for (w, s) in g.weights().iter().zip(g.points()) {
            assert!((w - s * LN_2).abs() < 1e-15);
        }
    }

    #[test]
    fn two_rays_interleave_geometrically() {
        let g = DyadicGrid::new(2, -2, 3).unwrap();
        let mut pts = g.points().to_vec();
        pts.sort_by(f64::total_cmp);
        for w in pts.windows(2) {
            assert!((w[1] / w[0] - 2f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn doubling_stays_on_ray() {
        let g = DyadicGrid::new(3, -1, 4).unwrap();
        for k in 0..g.len() {
            if let Some(u) = g.up(k) {
                assert!((g.points()[u] - 2.0 * g.points()[k]).abs() < 1e-14);
                assert_eq!(g.down(u), Some(k));
            }
            let (r, j) = g.ray_level(k);
            assert_eq!(g.index(r, j), Some(k));
        }
        assert_eq!(g.up(g.index(0, 4).unwrap()), None);
        assert_eq!(g.down(g.index(2, -1).unwrap()), None);
    }

    #[test]
    fn quadrature_of_exponential_moment() {
        let g = DyadicGrid::new(64, -20, 10).unwrap();
        let v = g.integrate(|s| s * 2f64.powf(-s));
        let exact = 1.0 / (LN_2 * LN_2);
        assert!(((v - exact) / exact).abs() < 1e-3, "{v} vs {exact}");
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(DyadicGrid::new(1, 3, 2).is_err());
        assert!(DyadicGrid::new(0, 0, 2).is_err());
        assert!(DyadicGrid::shell(0, 2, -1.0).is_err());
    }

    #[test]
    fn shell_weights_match_log_midpoint_at_ln2() {
        let sh = DyadicGrid::shell(-3, 3, LN_2).unwrap();
        for (k, (s, w)) in sh.points().iter().zip(sh.weights()).enumerate() {
            assert_eq!(*s, 2f64.powi(-3 + k as i32));
            assert!((w - s * LN_2).abs() < 1e-15);
        }
    }
}
