use confounded_ridge::model::{
    build_isotropic_model, derive_statistical, sample_interventional, sample_observational, summarize,
    CausalModelParams,
};
use confounded_ridge::rng;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn random_model(d: usize, l: usize, seed: u64) -> CausalModelParams {
    let mut r = rng::from_seed(seed);
    let m = DMatrix::from_fn(d, l, |_, _| r.sample::<f64, _>(StandardNormal));
    let alpha = DVector::from_fn(l, |_, _| 0.5 * r.sample::<f64, _>(StandardNormal));
    let beta = DVector::from_fn(d, |_, _| r.sample::<f64, _>(StandardNormal));
    CausalModelParams::new(m, alpha, beta, 0.3).unwrap()
}

#[test]
fn sample_covariance_concentrates_on_identity() {
    let (n, d) = (100_000, 5);
    let p = CausalModelParams::new(DMatrix::identity(d, d), DVector::zeros(d), DVector::zeros(d), 1.0).unwrap();
    let data = sample_observational(&p, n, 17).unwrap();
    let cov = data.x.tr_mul(&data.x) / n as f64;
    let tol = 3.0 * (2.0 / n as f64).sqrt();
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((cov[(i, j)] - target).abs() < tol, "({i},{j}): {}", cov[(i, j)]);
        }
    }
}

#[test]
fn interventional_residual_has_confounder_plus_noise_variance() {
    let p = random_model(3, 5, 1);
    let n = 100_000;
    let data = sample_interventional(&p, n, 23).unwrap();
    let resid = &data.y - &data.x * p.beta();
    let mean = resid.mean();
    let var = resid.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let expected = p.interventional_noise_var();
    // Gaussian: Var(sample variance) = 2 v^2 / (n - 1)
    let se = expected * (2.0 / (n - 1) as f64).sqrt();
    assert!((var - expected).abs() < 3.0 * se, "{var} vs {expected}");

    // x is independent of the residual under do(x)
    for j in 0..3 {
        let xj = data.x.column(j);
        let cov = xj.dot(&resid) / n as f64;
        let sd = (xj.map(|v| v * v).mean() * expected).sqrt();
        assert!(cov.abs() < 3.0 * sd / (n as f64).sqrt(), "column {j}: {cov}");
    }
}

#[test]
fn observational_regression_recovers_statistical_parameters() {
    let p = random_model(3, 6, 2);
    let derived = derive_statistical(&p).unwrap();
    let n = 100_000;
    let data = sample_observational(&p, n, 29).unwrap();
    let gram = data.x.tr_mul(&data.x);
    let gram_inv = gram.clone().try_inverse().unwrap();
    let beta_ols = &gram_inv * data.x.tr_mul(&data.y);
    for j in 0..3 {
        let se = (derived.sigma_stat_sq * gram_inv[(j, j)]).sqrt();
        assert!((beta_ols[j] - derived.beta_stat[j]).abs() < 3.0 * se, "coef {j}");
    }
    let resid = &data.y - &data.x * &beta_ols;
    let s2 = resid.norm_squared() / (n - 3) as f64;
    let se = derived.sigma_stat_sq * (2.0 / (n - 3) as f64).sqrt();
    assert!((s2 - derived.sigma_stat_sq).abs() < 3.0 * se, "{s2} vs {}", derived.sigma_stat_sq);
    // with the confounder the observational residual is strictly less noisy
    assert!(derived.sigma_stat_sq < p.interventional_noise_var());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn family_round_trip(
        dir in prop::collection::vec(-2.0f64..2.0, 4),
        sigma in 0.1f64..5.0,
        zeta in -2.0f64..2.0,
        slack in 0.0f64..1.0,
        sign in prop::bool::ANY,
    ) {
        let beta_stat = DVector::from_vec(dir);
        let s_sq = beta_stat.norm_squared();
        prop_assume!(s_sq > 1e-3);
        // any omega^2 in [zeta^2 s^2, zeta^2 s^2 + 1] is feasible in d = 4
        let omega_sq = zeta * zeta * s_sq + slack * if sign { 1.0 } else { 0.5 };
        let eta = zeta * s_sq - omega_sq;
        let p = build_isotropic_model(&beta_stat, sigma, zeta, eta).unwrap();
        let derived = derive_statistical(&p).unwrap();
        let s = summarize(&derived, p.beta()).unwrap();
        let scale = 1.0 + s_sq;
        prop_assert!((&derived.beta_stat - &beta_stat).norm() <= 1e-10 * scale);
        prop_assert!((s.zeta - zeta).abs() <= 1e-10 * scale);
        prop_assert!((s.eta - eta).abs() <= 1e-10 * scale);
        prop_assert!((s.sigma_stat_sq - sigma).abs() <= 1e-10 * sigma);
        prop_assert!((s.s_sq - (s.r_sq + s.omega_sq + 2.0 * s.eta)).abs() <= 1e-10 * scale);
        prop_assert!((s.snr_caus - (1.0 - s.zeta) * s.snr_stat).abs() <= 1e-10 * (1.0 + s.snr_stat));
        prop_assert!(s.eta * s.eta <= s.r_sq * s.omega_sq + 1e-10 * scale * scale);
    }

    #[test]
    fn statistical_noise_dominates_causal_noise(
        d in 1usize..5,
        extra in 0usize..4,
        seed in any::<u64>(),
    ) {
        let p = random_model(d, d + extra, seed);
        let derived = derive_statistical(&p).unwrap();
        prop_assert!(derived.sigma_stat_sq >= p.sigma_sq());
        prop_assert_eq!(&derived.beta_stat, &(p.beta() + &derived.gamma));
        // footnote identity: |alpha|^2 - |Gamma|_Sigma^2 >= 0 and equals the kernel part
        let gap = p.alpha().norm_squared() - derived.gamma_sq_sigma();
        prop_assert!((derived.sigma_stat_sq - p.sigma_sq() - gap).abs() < 1e-9 * (1.0 + p.alpha().norm_squared()));
    }
}
