use std::f64::consts::{PI, TAU};

use bpl_core::dicke::{self, Axis};
use bpl_core::estimator::{self, GradientSpec, RngStream};
use bpl_core::scaling::{classify_bpl, fit_exp_n, fit_power_l};
use bpl_core::{AngleDomain, AngleSample, CorrelationScheme, CostFamily, FamilyTag};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn power_points() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec(0.5f64..2.0, 4..12)
        .prop_map(|noise| noise.iter().enumerate().map(|(i, e)| (4.0 * (i + 1) as f64, e * (4.0 * (i + 1) as f64).powi(3))).collect())
}

fn decay_points() -> impl Strategy<Value = Vec<(f64, f64)>> {
    (0.1f64..3.0, prop::collection::vec(0.8f64..1.25, 6..14)).prop_map(|(r, noise)| {
        noise.iter().enumerate().map(|(i, e)| ((2 * i + 4) as f64, e * (-r * (2 * i + 4) as f64).exp2())).collect()
    })
}

proptest! {
    #[test]
    fn power_fit_scale_equivariant(points in power_points(), scale in 1e-6f64..1e6) {
        let a = fit_power_l(&points, 1.0).unwrap();
        let scaled: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x, y * scale)).collect();
        let b = fit_power_l(&scaled, 1.0).unwrap();
        prop_assert!((a.exponent - b.exponent).abs() < 1e-12);
        prop_assert!((b.prefactor / a.prefactor / scale - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exp_fit_scale_equivariant(points in decay_points(), scale in 1e-6f64..1e6) {
        let a = fit_exp_n(&points, 0.0).unwrap();
        let scaled: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x, y * scale)).collect();
        let b = fit_exp_n(&scaled, 0.0).unwrap();
        prop_assert!((a.exponent - b.exponent).abs() < 1e-12);
    }

    #[test]
    fn fits_ignore_point_order(points in decay_points(), seed in any::<u64>()) {
        let mut shuffled = points.clone();
        let mut rng = RngStream::new(seed, 0).rng();
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut rng);
        prop_assert_eq!(fit_exp_n(&points, 0.0).unwrap(), fit_exp_n(&shuffled, 0.0).unwrap());
        prop_assert_eq!(classify_bpl(&points).unwrap(), classify_bpl(&shuffled).unwrap());
    }

    #[test]
    fn verdict_invariant_under_rescaling(points in decay_points(), scale in 1e-3f64..1e3) {
        let scaled: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x, y * scale)).collect();
        prop_assert_eq!(classify_bpl(&points).unwrap().verdict, classify_bpl(&scaled).unwrap().verdict);
    }

    #[test]
    fn rotations_preserve_norm(n in 1usize..40, angle in -10.0f64..10.0, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let psi = dicke::coherent_state(C64::new(re, im), n).unwrap();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let out = dicke::rotate(&psi, axis, angle).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grover_cost_in_unit_interval(half_n in 1usize..15, layers in 0usize..40, alpha in 0.0f64..TAU, gamma in 0.0f64..TAU) {
        let c = dicke::GroverEvaluator::new(2 * half_n).unwrap().cost(alpha, gamma, layers);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c));
    }

    #[test]
    fn expansion_respects_groups(values in prop::collection::vec(-3.0f64..3.0, 3)) {
        let scheme = CorrelationScheme::layer_correlated(vec![vec![4, 0], vec![1, 3], vec![2]], 5).unwrap();
        let s = AngleSample::new(values.clone(), scheme, AngleDomain::SYMMETRIC_LOWER_CLOSED).unwrap();
        prop_assert_eq!(s.expand(), vec![values[0], values[1], values[2], values[1], values[0]]);
    }

    #[test]
    fn slow_grover_analytic_gradient_matches_fd(theta in 0.0f64..TAU, half_n in 1usize..8, quarter in 1usize..4) {
        let (n, layers) = (2 * half_n, 4 * quarter);
        let f = CostFamily::new(FamilyTag::GroverSlowCorrelated, n, layers).with_gamma(0.01);
        prop_assume!(bpl_core::analytic::grover_slow_singular_distance(theta, n) > 1e-3);
        let s = AngleSample::new(vec![theta], CorrelationScheme::uncorrelated(1), AngleDomain::FULL_TURN).unwrap();
        let a = estimator::gradient(&f, &s, &GradientSpec::analytic(0)).unwrap().value;
        let d = estimator::gradient(&f, &s, &GradientSpec::central_fd(0)).unwrap().value;
        prop_assert!((a - d).abs() < 1e-6, "{} vs {}", a, d);
    }

    #[test]
    fn ring_global_analytic_gradient_matches_fd(beta in -PI..PI, layers in 1usize..20) {
        let f = CostFamily::new(FamilyTag::RodGlobal, 8, layers).with_gamma(0.1);
        let s = AngleSample::new(vec![beta], CorrelationScheme::uncorrelated(1), AngleDomain::SYMMETRIC_LOWER_CLOSED).unwrap();
        prop_assume!(bpl_core::analytic::rod_global_singular_distance(beta) > 1e-3);
        let a = estimator::gradient(&f, &s, &GradientSpec::analytic(0)).unwrap().value;
        let d = estimator::gradient(&f, &s, &GradientSpec::central_fd(0)).unwrap().value;
        prop_assert!((a - d).abs() < 1e-6);
    }
}
