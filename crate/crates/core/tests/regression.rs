mod common;

use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use common::{close, raw_moment_fit, rng, scaled_sample, t_tail_by_quadrature};
use verdoorn::regress::{mark_significance, ols_fit, t_two_sided_p, SignificanceMark};

#[test]
fn reference_t_statistics_get_expected_stars() {
    // 40 observations, two parameters
    let p = t_two_sided_p(12.527, 38);
    assert!(p < 1e-14, "{p}");
    assert_eq!(mark_significance(p), SignificanceMark::FivePercent);

    let p = t_two_sided_p(1.750, 38);
    assert!((p - 0.0882).abs() < 5e-5, "{p}");
    assert_eq!(mark_significance(p), SignificanceMark::TenPercent);

    let p = t_two_sided_p(1.160, 38);
    assert_eq!(mark_significance(p), SignificanceMark::None);

    // negative t is marked the same way
    assert_eq!(
        mark_significance(t_two_sided_p(-1.904, 38)),
        SignificanceMark::TenPercent
    );
}

#[test]
fn p_values_match_quadrature_oracle() {
    for df in [1, 2, 3, 5, 10, 23, 38, 110, 178, 342] {
        for t in [0.05, 0.5, 1.0, 1.7, 2.0, 2.5, 4.0, 8.0] {
            let p = t_two_sided_p(t, df);
            let oracle = t_tail_by_quadrature(t, df);
            assert!((p - oracle).abs() <= 1e-8, "t={t} df={df}: {p} vs {oracle}");
        }
    }
}

#[test]
fn white_noise_durbin_watson_near_two() {
    let mut r = rng(7);
    let mut inside = 0;
    for _ in 0..100 {
        let x: Vec<f64> = (0..1000).map(|_| r.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..1000).map(|_| StandardNormal.sample(&mut r)).collect();
        let dw = ols_fit(&x, &y).unwrap().durbin_watson;
        if (1.8..=2.2).contains(&dw) {
            inside += 1;
        }
    }
    assert!(inside >= 99, "{inside}/100");
}

#[test]
fn two_computation_paths_agree() {
    for seed in 0..2000 {
        let n = 3 + (seed as usize % 60);
        let (x, y, sx, sy) = scaled_sample(seed, n);
        let fit = ols_fit(&x, &y).unwrap();
        let raw = raw_moment_fit(&x, &y);
        let tol = 1e-9;
        assert!(close(fit.slope, raw.slope, tol, sy / sx), "seed {seed} slope");
        assert!(close(fit.intercept, raw.intercept, tol, sy), "seed {seed} intercept");
        assert!(close(fit.se_slope, raw.se_slope, tol, sy / sx), "seed {seed} se_slope");
        assert!(
            close(fit.se_intercept, raw.se_intercept, tol, sy),
            "seed {seed} se_intercept"
        );
        assert!(close(fit.t_slope, raw.t_slope, tol, 1.0), "seed {seed} t_slope");
        assert!(
            close(fit.t_intercept, raw.t_intercept, tol, 1.0),
            "seed {seed} t_intercept"
        );
        assert!(close(fit.r_squared, raw.r_squared, tol, 1.0), "seed {seed} r2");
        assert!(close(fit.durbin_watson, raw.durbin_watson, tol, 1.0), "seed {seed} dw");
        assert!(close(fit.p_slope, t_two_sided_p(raw.t_slope, raw.df), tol, 1.0));
        assert_eq!(fit.df, raw.df);
        for (u, v) in fit.residuals.iter().zip(&raw.residuals) {
            assert!(close(*u, *v, tol, sy), "seed {seed} residual");
        }
    }
}

#[test]
fn p_value_strictly_decreasing_in_t() {
    for df in [1, 4, 38, 342] {
        let mut prev = t_two_sided_p(0.0, df);
        for i in 1..=600 {
            let p = t_two_sided_p(i as f64 * 0.01, df);
            assert!(p < prev, "df {df} at t {}", i as f64 * 0.01);
            prev = p;
        }
    }
}

fn xy_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-100.0f64..100.0, n),
            prop::collection::vec(-100.0f64..100.0, n),
        )
    })
}

proptest! {
    #[test]
    fn normal_equations_hold((x, y) in xy_strategy()) {
        let Ok(fit) = ols_fit(&x, &y) else { return Ok(()); };
        let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs())) * x.len() as f64;
        let sum_u: f64 = fit.residuals.iter().sum();
        let sum_ux: f64 = fit.residuals.iter().zip(&x).map(|(u, xi)| u * xi).sum();
        let x_scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(sum_u.abs() <= 1e-9 * scale);
        prop_assert!(sum_ux.abs() <= 1e-9 * scale * x_scale);
        prop_assert_eq!(fit.df, x.len() - 2);
        prop_assert!((0.0..=1.0).contains(&fit.r_squared));
        prop_assert!((0.0..=4.0).contains(&fit.durbin_watson));
        prop_assert!((0.0..=1.0).contains(&fit.p_slope) && (0.0..=1.0).contains(&fit.p_intercept));
        prop_assert!(fit.se_slope >= 0.0 && fit.se_intercept >= 0.0);
    }

    #[test]
    fn joint_permutation_leaves_fit_unchanged((x, y) in xy_strategy(), seed in any::<u64>()) {
        let Ok(fit) = ols_fit(&x, &y) else { return Ok(()); };
        let mut idx: Vec<usize> = (0..x.len()).collect();
        let mut r = rng(seed);
        for i in (1..idx.len()).rev() {
            idx.swap(i, r.random_range(0..=i));
        }
        let xp: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
        let yp: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        let g = ols_fit(&xp, &yp).unwrap();
        let tol = 1e-9;
        prop_assert!(close(fit.slope, g.slope, tol, 1e-6));
        prop_assert!(close(fit.intercept, g.intercept, tol, 1.0));
        prop_assert!(close(fit.se_slope, g.se_slope, tol, 1e-6));
        prop_assert!(close(fit.t_slope, g.t_slope, tol, 1.0));
        prop_assert!(close(fit.r_squared, g.r_squared, tol, 1.0));
        prop_assert!(close(fit.p_slope, g.p_slope, tol, 1.0));
    }

    #[test]
    fn affine_response((x, y) in xy_strategy(), alpha in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], beta in -100.0f64..100.0) {
        let Ok(fit) = ols_fit(&x, &y) else { return Ok(()); };
        if fit.degenerate { return Ok(()); }
        let ys: Vec<f64> = y.iter().map(|v| alpha * v + beta).collect();
        let g = ols_fit(&x, &ys).unwrap();
        let tol = 1e-9;
        let y_scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(close(g.slope, alpha * fit.slope, tol, alpha.abs() * y_scale / 100.0));
        prop_assert!(close(g.intercept, alpha * fit.intercept + beta, tol, alpha.abs() * y_scale + beta.abs()));
        prop_assert!(close(g.r_squared, fit.r_squared, tol, 1.0));
        prop_assert!(close(g.p_slope, fit.p_slope, tol, 1.0));
        prop_assert!(close(g.durbin_watson, fit.durbin_watson, tol, 1.0));
    }
}
