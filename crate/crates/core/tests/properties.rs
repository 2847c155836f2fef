//! Property tests for the profile and transversal invariants.

use proptest::prelude::*;
use robin_spectra::{
    quadrature, transversal_eigenvalues, CouplingProfile, TransversalParams,
};

fn arb_profile() -> impl Strategy<Value = CouplingProfile> {
    let alpha0 = -3.0..3.0f64;
    prop_oneof![
        alpha0.clone().prop_map(CouplingProfile::constant),
        (alpha0.clone(), -2.0..2.0f64, 0.2..3.0f64)
            .prop_map(|(a, b, w)| CouplingProfile::gaussian_bump(a, b, w).unwrap()),
        (alpha0.clone(), -2.0..2.0f64, 0.5..4.0f64)
            .prop_map(|(a, b, r)| CouplingProfile::compact_bump(a, b, r).unwrap()),
        (alpha0.clone(), -2.0..2.0f64, -2.0..2.0f64, 0.1..3.0f64).prop_map(|(a, v1, v2, w)| {
            CouplingProfile::piecewise_constant(a, vec![-2.0 * w, 0.0, w], vec![v1, v2]).unwrap()
        }),
        (alpha0, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, v1, v2)| {
            CouplingProfile::tabulated(a, vec![-1.5, -0.5, 0.5, 1.5], vec![a, v1, v2, a]).unwrap()
        }),
    ]
}

proptest! {
    #[test]
    fn evaluate_bounded_by_sup_norm(profile in arb_profile(), xs in prop::collection::vec(-50.0..50.0f64, 32)) {
        let sup = profile.sup_norm();
        for x in xs {
            let v = profile.evaluate(x).abs();
            prop_assert!(v <= sup + 1e-12, "α({x}) = {v} exceeds sup {sup}");
        }
    }

    #[test]
    fn truncation_agrees_inside_and_clamps_outside(
        profile in arb_profile(),
        m in 0.5..6.0f64,
        xs in prop::collection::vec(-20.0..20.0f64, 32),
    ) {
        let t = profile.truncate(m).unwrap();
        for x in xs {
            if x.abs() < m {
                prop_assert_eq!(t.evaluate(x), profile.evaluate(x));
            } else {
                prop_assert_eq!(t.evaluate(x), profile.alpha0());
            }
        }
    }

    #[test]
    fn truncation_sup_distance_matches_tail(profile in arb_profile(), m in 0.5..6.0f64) {
        // sup distance between the excess and its truncation = tail sup
        let t = profile.truncate(m).unwrap();
        let tail = profile.tail_sup(m);
        let mut observed = 0.0f64;
        for i in 0..4000 {
            let x = -40.0 + 80.0 * i as f64 / 3999.0;
            observed = observed.max((profile.evaluate(x) - t.evaluate(x)).abs());
        }
        prop_assert!(observed <= tail + 1e-12, "observed {observed} > tail bound {tail}");
    }

    #[test]
    fn transversal_form_bounded_below(
        alpha in prop::sample::select(vec![-2.0, -0.5, 0.7, 1.0, 3.0]),
        coeffs in prop::collection::vec(-1.0..1.0f64, 6),
    ) {
        // b_α(φ) = ∫|φ'|² + α(|φ(ε)|² - |φ(0)|²) ≥ -α²‖φ‖² for polynomial φ
        let eps = 1.0;
        let poly = |y: f64| -> f64 {
            coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
        };
        let dpoly = |y: f64| -> f64 {
            coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * y + k as f64 * c)
        };
        let grad = quadrature::integrate_gl(|y| dpoly(y) * dpoly(y), 0.0, eps, 16);
        let norm = quadrature::integrate_gl(|y| poly(y) * poly(y), 0.0, eps, 16);
        let form = grad + alpha * (poly(eps).powi(2) - poly(0.0).powi(2));
        prop_assert!(
            form >= -alpha * alpha * norm - 1e-10,
            "b({alpha}) = {form} < {}", -alpha * alpha * norm
        );
    }

    #[test]
    fn robin_eigenvalues_solve_determinant(alpha in 0.2..3.0f64, eps in 0.4..2.5f64) {
        let p = TransversalParams::new(alpha, eps).unwrap();
        let vals = transversal_eigenvalues(&p, 12).unwrap();
        prop_assert!((vals[0] + alpha * alpha).abs() < 1e-12);
        for lam in &vals[1..] {
            let det = (alpha * alpha + lam) * (lam.sqrt() * eps).sin();
            prop_assert!(det.abs() < 1e-9, "det = {det:e} at λ = {lam}");
        }
    }
}
