use proptest::prelude::*;

use slm_core::estimator::{adjust, estimate_with_constants, forward_map, in_region, solve, Case};
use slm_core::model::{density_eval, SpectralModel};
use slm_core::simulate::{CoefficientPanel, PanelLevel, Provenance};
use slm_core::specfun::{integrate, lambert_w0, QuadratureSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn solve_inverts_forward(s0 in 1.01f64..10.0, alpha in 0.01f64..0.49) {
        let (y1, y2) = forward_map(s0, alpha).unwrap();
        prop_assert!(in_region(y1, y2));
        let p = adjust(y1, y2);
        prop_assert_eq!(p.case_applied, Case::None);
        let (s, a) = solve(&p).unwrap();
        prop_assert!(((s - s0) / s0).abs() < 1e-8);
        prop_assert!(((a - alpha) / alpha).abs() < 1e-8);
    }

    #[test]
    fn forward_inverts_solve(y1 in 0.01f64..0.99, t in 0.01f64..0.99) {
        let y2 = t * 0.5 * y1 * y1;
        let (s0, alpha) = solve(&adjust(y1, y2)).unwrap();
        prop_assert!(s0 > 1.0 && alpha > 0.0 && alpha < 0.5);
        let (z1, z2) = forward_map(s0, alpha).unwrap();
        prop_assert!(((z1 - y1) / y1).abs() < 1e-8);
        prop_assert!(((z2 - y2) / y2).abs() < 1e-8);
    }

    #[test]
    fn adjust_is_total_and_idempotent(y1 in -10f64..10.0, y2 in -10f64..10.0) {
        let p = adjust(y1, y2);
        prop_assert!(in_region(p.y1, p.y2));
        let q = adjust(p.y1, p.y2);
        prop_assert_eq!((q.y1, q.y2), (p.y1, p.y2));
        prop_assert!(!q.adjusted);
        prop_assert!(solve(&p).is_ok());
    }

    #[test]
    fn adjust_is_identity_inside(y1 in 1e-6f64..0.999999, t in 1e-6f64..0.999999) {
        let y2 = t * 0.5 * y1 * y1;
        prop_assume!(in_region(y1, y2));
        let p = adjust(y1, y2);
        prop_assert_eq!((p.y1, p.y2, p.adjusted), (y1, y2, false));
    }

    #[test]
    fn lambert_is_monotone(x in -0.3678f64..1e6, dx in 0f64..1e3) {
        prop_assert!(lambert_w0(x).unwrap() <= lambert_w0(x + dx).unwrap());
    }

    #[test]
    fn quadrature_is_linear(a in -5f64..5.0, b in -5f64..5.0, k in 0.1f64..4.0) {
        let spec = QuadratureSpec::new(1e-12, 1e-12);
        let f = |x: f64| (k * x).cos();
        let g = |x: f64| (-x * x).exp() * x;
        let lhs = integrate(|x| a * f(x) + b * g(x), -1.0, 2.0, &spec).unwrap();
        let rhs = a * integrate(f, -1.0, 2.0, &spec).unwrap() + b * integrate(g, -1.0, 2.0, &spec).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn density_is_even(s0 in 1.01f64..3.0, alpha in 0.01f64..0.49, l in 0f64..4.0) {
        let m = SpectralModel::indicator(s0, alpha, 3.5).unwrap();
        prop_assume!((l - s0).abs() > 1e-9);
        prop_assert_eq!(density_eval(&m, l).unwrap(), density_eval(&m, -l).unwrap());
    }

    #[test]
    fn power_increment_bound(alpha in 0.0f64..0.5, x in 0.0f64..0.5) {
        let g = (1.0 - x).powf(-2.0 * alpha) - 1.0;
        prop_assert!(g >= 0.0 && g <= 4.0 * x);
    }

    #[test]
    fn estimate_is_scale_equivariant(
        coeffs in prop::collection::vec(-3f64..3.0, 2..20),
        tail in prop::collection::vec(-3f64..3.0, 1..20),
        kappa in 0.1f64..10.0,
    ) {
        let panel = |scale: f64| {
            let level = |j, a, c: &[f64]| PanelLevel {
                j,
                a,
                shifts: (1..=c.len()).map(|k| k as f64).collect(),
                coeffs: c.iter().map(|x| x * scale.sqrt()).collect(),
            };
            CoefficientPanel::new(
                vec![level(1, 4.0, &coeffs), level(2, 8.0, &tail)],
                Provenance::ExactGaussian,
                0,
            )
            .unwrap()
        };
        let base = estimate_with_constants(&panel(1.0), 6.0, 40.0).unwrap();
        let scaled = estimate_with_constants(&panel(kappa), 6.0 * kappa, 40.0 * kappa).unwrap();
        prop_assume!(!base.rows.is_empty());
        let (a, b) = (base.rows[0], scaled.rows[0]);
        prop_assert!((a.s0_hat - b.s0_hat).abs() <= 1e-9 * a.s0_hat.abs());
        prop_assert!((a.alpha_hat - b.alpha_hat).abs() <= 1e-9 * a.alpha_hat.abs().max(1e-12));
    }
}
