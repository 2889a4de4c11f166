use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use locspec::process::{
    simulate_stream, tv_covariance, tv_spectral_density, validate_model, CurveSpec, ModelSpec, TvArmaModel,
};
use locspec::Error;
use proptest::prelude::*;

fn tv_ar1(a0: f64, a1: f64) -> ModelSpec {
    ModelSpec { alpha: vec![CurveSpec::Polynomial { coefficients: vec![a0, a1] }], ..ModelSpec::white_noise(1.0) }
}

/// Riemann sum of `f(u, .) e^{i k lambda}` on a fine grid, independent of the library quadrature.
fn covariance_from_density(m: &TvArmaModel, u: f64, k: i64) -> f64 {
    let steps = 20_000;
    let h = 2.0 * PI / steps as f64;
    (0..steps)
        .map(|i| {
            let l = -PI + (i as f64 + 0.5) * h;
            tv_spectral_density(m, u, l) * (k as f64 * l).cos() * h
        })
        .sum()
}

#[test]
fn stationary_ar1_covariance_closed_form() {
    let m = TvArmaModel::from_spec(&ModelSpec::ar1(0.6, 2.0)).unwrap();
    for k in 0..6 {
        let want = 4.0 * 0.6f64.powi(k as i32) / (1.0 - 0.36);
        assert_abs_diff_eq!(tv_covariance(&m, 0.3, k), want, epsilon = 1e-10);
    }
}

#[test]
fn unstable_model_is_rejected() {
    let err = TvArmaModel::from_spec(&tv_ar1(-0.5, -0.6)).unwrap_err();
    assert!(matches!(err, Error::InvalidModel(_)));
}

#[test]
fn stability_profile_reports_every_grid_point() {
    let m = TvArmaModel::from_spec(&tv_ar1(-0.2, -0.5)).unwrap();
    let prof = validate_model(&m, 11).unwrap();
    assert!(prof.len() >= 11);
    assert!(prof.iter().all(|p| p.min_root_modulus > 1.0));
}

#[test]
fn simulation_is_keyed_by_seed_and_stream() {
    let m = TvArmaModel::from_spec(&tv_ar1(-0.2, -0.5)).unwrap();
    let a = simulate_stream(&m, 300, 11, 4, None).unwrap();
    let b = simulate_stream(&m, 300, 11, 4, None).unwrap();
    let c = simulate_stream(&m, 300, 11, 5, None).unwrap();
    assert_eq!(a.values(), b.values());
    assert_ne!(a.values(), c.values());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn covariance_is_even_in_lag(a0 in -0.6f64..0.6, a1 in -0.3f64..0.3, u in 0.0f64..1.0, k in 0i64..8) {
        let m = TvArmaModel::from_spec(&tv_ar1(a0, a1)).unwrap();
        prop_assert!((tv_covariance(&m, u, k) - tv_covariance(&m, u, -k)).abs() < 1e-12);
    }

    #[test]
    fn covariance_matches_density_integral(a0 in -0.6f64..0.6, a1 in -0.3f64..0.3, u in 0.0f64..1.0, k in 0i64..4) {
        let m = TvArmaModel::from_spec(&tv_ar1(a0, a1)).unwrap();
        let direct = tv_covariance(&m, u, k);
        prop_assert!((direct - covariance_from_density(&m, u, k)).abs() < 1e-6);
    }

    #[test]
    fn density_is_positive_and_even(a0 in -0.6f64..0.6, u in 0.0f64..1.0, l in 0.0f64..PI) {
        let m = TvArmaModel::from_spec(&tv_ar1(a0, 0.2)).unwrap();
        let f = tv_spectral_density(&m, u, l);
        prop_assert!(f > 0.0);
        prop_assert!((f - tv_spectral_density(&m, u, -l)).abs() < 1e-12 * f);
    }
}
