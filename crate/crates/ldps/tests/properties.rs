//! Property tests over randomized parameters: the structural invariants
//! that must hold for any admissible model, not just the presets.

use proptest::prelude::*;

use ldps::deviation::{closed_form_rate, scaled_cgf, RateModel};
use ldps::distribution::{CoefficientSpec, DeltaTrajectory, PowerSeriesSpec};
use ldps::family::{FamilyModelSpec, GrowthSpec};
use ldps::special::{prabhakar_eval, prabhakar_reduce_integer_gamma, prabhakar_series, PrabhakarParams};

fn alpha_strategy() -> impl Strategy<Value = f64> {
    (0.3f64..=1.0).prop_map(|a| (a * 100.0).round() / 100.0)
}

fn lambda_strategy() -> impl Strategy<Value = f64> {
    (0.3f64..=3.0).prop_map(|l| (l * 100.0).round() / 100.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn legendre_matches_closed_form(
        alpha in alpha_strategy(),
        lambda in lambda_strategy(),
        x in 0.05f64..10.0,
    ) {
        let rm = RateModel::new(GrowthSpec::power(alpha, lambda).unwrap()).unwrap();
        let num = rm.legendre_transform(x, 1e-12).unwrap();
        let cf = closed_form_rate(alpha, lambda, x);
        prop_assert!((num - cf).abs() <= 1e-8, "num {num} vs cf {cf}");
        prop_assert!(num >= -1e-14);
    }

    #[test]
    fn rate_model_shape_invariants(
        alpha in alpha_strategy(),
        lambda in lambda_strategy(),
        theta in -3.0f64..3.0,
    ) {
        let rm = RateModel::new(GrowthSpec::power(alpha, lambda).unwrap()).unwrap();
        prop_assert_eq!(rm.lambda_of_theta(0.0), 0.0);
        prop_assert!(rm.d2().unwrap() >= 0.0);
        // Λ is increasing (Δ increasing through e^θ)
        let h = 1e-4;
        prop_assert!(rm.lambda_of_theta(theta + h) > rm.lambda_of_theta(theta - h));
    }

    #[test]
    fn prabhakar_eval_is_monotone_in_u(
        alpha in alpha_strategy(),
        beta in 0.5f64..3.0,
        gamma in 0.5f64..4.0,
        u in 0.0f64..60.0,
        step in 0.1f64..5.0,
    ) {
        let p = PrabhakarParams::new(alpha, beta, gamma, 1.0).unwrap();
        let lo = prabhakar_eval(&p, u, 1e-11).unwrap().log_value;
        let hi = prabhakar_eval(&p, u + step, 1e-11).unwrap().log_value;
        prop_assert!(hi > lo, "E not increasing: {lo} -> {hi} at u={u}, step={step}");
    }

    #[test]
    fn reduction_agrees_with_series_for_small_integer_gamma(
        alpha in alpha_strategy(),
        beta in 0.5f64..2.5,
        u in 0.5f64..8.0,
    ) {
        let p = PrabhakarParams::new(alpha, beta, 2.0, 1.0).unwrap();
        let s = prabhakar_series(&p, u, 1e-13).unwrap().log_value;
        let r = prabhakar_reduce_integer_gamma(&p, u).unwrap().log_value;
        prop_assert!((s - r).abs() <= 1e-8, "series {s} vs reduction {r}");
    }

    #[test]
    fn poisson_scaled_cgf_identity(
        lambda in lambda_strategy(),
        t in 1.0f64..200.0,
        theta in -1.5f64..1.5,
    ) {
        let p = PrabhakarParams::new(1.0, 1.0, 1.0, lambda).unwrap();
        let tail = PowerSeriesSpec::new(
            CoefficientSpec::Prabhakar(p),
            DeltaTrajectory::identity(),
        )
        .unwrap();
        let fam = FamilyModelSpec::new(Vec::new(), tail).unwrap();
        let rm = RateModel::new(GrowthSpec::power(1.0, lambda).unwrap()).unwrap();
        let got = scaled_cgf(&fam, &rm, theta, t).unwrap();
        let expect = lambda * (theta.exp() - 1.0);
        prop_assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn family_pmf_normalizes_for_random_laws(
        // ranges keep the support desk-scale so the independent k-by-k
        // scan below stays an honest (and fast) oracle; 1/α ≤ 2 bounds
        // the mean by (λ t^ã)^{1/α}/α ≲ 10⁴ here
        alpha in (0.5f64..=1.0).prop_map(|a| (a * 100.0).round() / 100.0),
        lambda in (0.3f64..=2.0).prop_map(|l| (l * 100.0).round() / 100.0),
        a_tilde in 0.3f64..=1.0,
        t in 1.0f64..30.0,
    ) {
        let p = PrabhakarParams::new(alpha, 1.0, 1.0, lambda).unwrap();
        let tail = PowerSeriesSpec::new(
            CoefficientSpec::Prabhakar(p),
            DeltaTrajectory::power(a_tilde).unwrap(),
        )
        .unwrap();
        let fam = FamilyModelSpec::new(Vec::new(), tail).unwrap();
        // adaptive support captures all the mass
        let mut total = 0.0f64;
        let mut k = 0u64;
        let mut last = f64::NEG_INFINITY;
        loop {
            let l = fam.family_log_pmf(t, k).unwrap();
            total += l.exp();
            if l < -80.0 && l < last && total > 0.5 {
                break;
            }
            last = l;
            k += 1;
            prop_assert!(k < 2_000_000, "runaway support scan");
        }
        prop_assert!((total - 1.0).abs() < 1e-9, "Σ pmf = {total}");
    }
}
