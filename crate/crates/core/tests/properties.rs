use lll_core::asymptotics::psi;
use lll_core::diagnostics::spectral_front;
use lll_core::fock::{lll_rhs_direct, lll_rhs_fast, multilinear_h, WeightTable};
use lll_core::grid::DyadicGrid;
use lll_core::integrate::{flow_consistency_check, DEFAULT_FD_STEP};
use lll_core::limit::{LimitSystem, RhsMode};
use lll_core::shell::ShellSystem;
use lll_core::system::Spectrum;
use lll_core::{FockState, HamiltonianSystem, ModelConstants, C64};
use proptest::prelude::*;

fn complex(scale: f64) -> impl Strategy<Value = C64> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| C64::new(re, im))
}

fn fock_state(max_n: usize) -> impl Strategy<Value = Vec<C64>> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(complex(1.0), n + 1))
}

fn inf_dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn inf_norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_rhs_matches_direct(c in fock_state(40)) {
        let table = WeightTable::new(c.len() - 1);
        let st = FockState::new(c).unwrap();
        let fast = lll_rhs_fast(&table, &st).unwrap();
        let direct = lll_rhs_direct(&table, &st).unwrap();
        let scale = inf_norm(direct.coeffs()).max(f64::MIN_POSITIVE);
        prop_assert!(inf_dist(fast.coeffs(), direct.coeffs()) <= 1e-12 * scale);
    }

    #[test]
    fn weight_symmetric_and_bounded(k in 0usize..60, l in 0usize..60, m0 in 0usize..120) {
        let table = WeightTable::new(60);
        let s = k + l;
        let m = m0 % (s + 1);
        let n = s - m;
        prop_assume!(m <= 60 && n <= 60);
        let w = table.interaction_weight(k, l, m, n).unwrap();
        prop_assert!(w > 0.0 && w <= 1.0);
        let close = |v: f64| (v - w).abs() <= 1e-13 * w;
        prop_assert!(close(table.interaction_weight(l, k, m, n).unwrap()));
        prop_assert!(close(table.interaction_weight(k, l, n, m).unwrap()));
        prop_assert!(close(table.interaction_weight(m, n, k, l).unwrap()));
    }

    #[test]
    fn multilinear_form_is_hermitian(
        (e, f, g, h) in (1usize..20).prop_flat_map(|n| {
            let v = || prop::collection::vec(complex(1.0), n + 1);
            (v(), v(), v(), v())
        })
    ) {
        let table = WeightTable::new(e.len() - 1);
        let st = |v: Vec<C64>| FockState::new(v).unwrap();
        let (e, f, g, h) = (st(e), st(f), st(g), st(h));
        let lhs = multilinear_h(&table, &e, &f, &g, &h).unwrap();
        let rhs = multilinear_h(&table, &g, &h, &e, &f).unwrap().conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        let swapped = multilinear_h(&table, &f, &e, &g, &h).unwrap();
        prop_assert!((lhs - swapped).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn rhs_is_rotation_covariant(c in fock_state(24), theta in -3.0f64..3.0) {
        let table = WeightTable::new(c.len() - 1);
        let r = C64::from_polar(1.0, theta);
        let base = lll_rhs_fast(&table, &FockState::new(c.clone()).unwrap()).unwrap();
        let turned = lll_rhs_fast(&table, &FockState::new(c.iter().map(|v| v * r).collect()).unwrap()).unwrap();
        let expect: Vec<C64> = base.coeffs().iter().map(|v| v * r).collect();
        prop_assert!(inf_dist(turned.coeffs(), &expect) <= 1e-12 * (1.0 + inf_norm(&expect)));
    }

    #[test]
    fn psi_symmetric_and_peaked(theta in 1e-6f64..0.999999) {
        let v = psi(theta).unwrap();
        prop_assert!((v - psi(1.0 - theta).unwrap()).abs() <= 1e-14);
        prop_assert!((1.0..=2.0).contains(&v));
    }

    #[test]
    fn front_monotone_in_fraction(
        masses in prop::collection::vec(0.0f64..1.0, 1..30),
        p in 0.01f64..0.99,
        q in 0.01f64..0.99,
    ) {
        prop_assume!(masses.iter().sum::<f64>() > 0.0);
        let spectrum = Spectrum {
            frequencies: (0..masses.len()).map(|i| 2f64.powi(i as i32 - 3)).collect(),
            masses,
        };
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let a = spectral_front(&spectrum, lo).unwrap();
        let b = spectral_front(&spectrum, hi).unwrap();
        prop_assert!(a <= b);
        prop_assert!(spectrum.frequencies.contains(&a));
    }

    #[test]
    fn limit_flow_is_symplectic_gradient(
        a in complex(1.0),
        g in prop::collection::vec(complex(1.0), 12),
        lambda in 1.0f64..4.0,
    ) {
        let sys = LimitSystem::new(
            DyadicGrid::new(2, -2, 3).unwrap(),
            ModelConstants::new(lambda).unwrap(),
            RhsMode::GradientConsistent,
        );
        let mut z = vec![a];
        z.extend(g);
        let report = flow_consistency_check(&sys, &z, DEFAULT_FD_STEP).unwrap();
        prop_assert!(report.max_relative_error < 1e-6, "{}", report.max_relative_error);
    }

    #[test]
    fn shell_hamiltonian_bounded_below_by_condensate(
        a in complex(2.0),
        g in prop::collection::vec(complex(2.0), 6),
        eps in 0.1f64..2.0,
    ) {
        let sys = ShellSystem::new(-1, 4, eps, ModelConstants::new(1.5).unwrap(), RhsMode::GradientConsistent).unwrap();
        let mut z = vec![a];
        z.extend(g);
        prop_assert!(sys.hamiltonian(&z) >= a.norm_sqr().powi(2) * (1.0 - 1e-14));
    }

    #[test]
    fn grid_doubling_round_trips(rays in 1usize..6, j_min in -5i32..0, span in 1i32..8) {
        let grid = DyadicGrid::new(rays, j_min, j_min + span).unwrap();
        for k in 0..grid.len() {
            if let Some(u) = grid.up(k) {
                prop_assert_eq!(grid.down(u), Some(k));
                prop_assert!((grid.points()[u] - 2.0 * grid.points()[k]).abs() <= 1e-12 * grid.points()[u]);
            }
        }
    }
}
