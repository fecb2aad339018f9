use confounded_ridge::asymptotics::{discriminant, limiting_ridge, LimitSpec};
use confounded_ridge::model::ScalarSummaries;
use confounded_ridge::optimal_reg::{
    compare_regularization, confounding_threshold, optimal_lambda_caus, optimal_lambda_stat, rho_threshold,
    risk_derivative, LambdaRegime,
};
use confounded_ridge::Target;
use proptest::prelude::*;

const GAMMAS: [f64; 9] = [0.1, 0.3, 0.5, 0.9, 1.1, 1.5, 2.0, 3.0, 10.0];
const LAMBDAS: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 5.0, 50.0];

/// Gamma parallel to beta_stat: feasible for every zeta.
fn spec(gamma: f64, zeta: f64, s_sq: f64, sigma: f64) -> LimitSpec {
    let s = ScalarSummaries::from_moments(
        (1.0 - zeta).powi(2) * s_sq,
        zeta * zeta * s_sq,
        zeta * (1.0 - zeta) * s_sq,
        sigma,
    )
    .unwrap();
    LimitSpec::new(gamma, s).unwrap()
}

fn total(spec: &LimitSpec, lambda: f64, target: Target) -> f64 {
    limiting_ridge(spec, lambda, target).unwrap().total
}

/// Log-grid scan followed by golden-section refinement in log(lambda).
fn numeric_argmin(f: impl Fn(f64) -> f64) -> f64 {
    let grid: Vec<f64> = (0..=400).map(|i| -8.0 + i as f64 * 0.04).collect();
    let k = (0..grid.len()).min_by(|&a, &b| f(grid[a].exp()).total_cmp(&f(grid[b].exp()))).unwrap();
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(grid.len() - 1)]);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-9 {
        let c = b - ratio * (b - a);
        let d = a + ratio * (b - a);
        if f(c.exp()) < f(d.exp()) {
            b = d;
        } else {
            a = c;
        }
    }
    (0.5 * (a + b)).exp()
}

#[test]
fn statistical_penalty_minimises_statistical_risk() {
    for gamma in GAMMAS {
        for (snr_sq, sigma) in [(1.0, 1.0), (2.0, 0.5), (0.5, 2.0)] {
            let spec = spec(gamma, 0.3, snr_sq, sigma);
            let found = numeric_argmin(|l| total(&spec, l, Target::Statistical));
            let closed = optimal_lambda_stat(gamma, spec.summaries.snr_stat).unwrap();
            assert!((found - closed).abs() <= 1e-4 * closed.max(1.0), "gamma={gamma}: {found} vs {closed}");
        }
    }
}

#[test]
fn causal_penalty_minimises_causal_risk() {
    for gamma in [0.3, 0.5, 1.5, 3.0] {
        for zeta in [-0.25, 0.0, 0.25, 0.5, 0.75] {
            let spec = spec(gamma, zeta, 1.0, 1.0);
            let opt = optimal_lambda_caus(&spec).unwrap();
            if opt.regime != LambdaRegime::Interior {
                continue;
            }
            let found = numeric_argmin(|l| total(&spec, l, Target::Causal));
            assert!((found - opt.value).abs() <= 1e-4 * opt.value.max(1.0), "{gamma} {zeta}");
        }
    }
}

#[test]
fn risk_derivative_matches_finite_differences() {
    let h = 1e-5;
    for gamma in GAMMAS {
        for lambda in LAMBDAS {
            for zeta in [-0.5, 0.0, 0.4, 1.2] {
                let spec = spec(gamma, zeta, 1.5, 0.8);
                let fd =
                    (total(&spec, lambda + h, Target::Causal) - total(&spec, lambda - h, Target::Causal)) / (2.0 * h);
                let analytic = risk_derivative(lambda, &spec).unwrap();
                // an absolute floor covers derivatives that vanish on the grid
                let tol = 1e-5 * analytic.abs().max(1e-3);
                assert!((fd - analytic).abs() <= tol, "gamma={gamma} lambda={lambda} zeta={zeta}: {fd} vs {analytic}");
            }
        }
    }
}

#[test]
fn threshold_function_properties() {
    for gamma in [0.1, 0.3, 0.5, 0.9, 1.1, 1.5, 2.0, 3.0, 10.0] {
        for snr in [0.5, 1.0, 4.0] {
            let f = |l: f64| confounding_threshold(l, gamma, snr);
            let grid: Vec<f64> = (0..=140).map(|i| 10f64.powf(-8.0 + i as f64 * 0.1)).collect();
            assert!(grid.windows(2).all(|w| f(w[1]) - f(w[0]) >= -1e-10), "gamma={gamma}");
            assert!((f(1e6) - 1.0).abs() < 1e-3);
            let at_zero = if gamma < 1.0 {
                -gamma / (snr * (gamma - 1.0).powi(2))
            } else {
                -gamma * gamma / (snr * (gamma - 1.0).powi(2))
            };
            assert!((f(1e-8) - at_zero).abs() < 1e-3 * at_zero.abs().max(1.0));
            assert!((rho_threshold(gamma, snr).unwrap() - at_zero).abs() <= 1e-12 * at_zero.abs());
        }
    }
}

#[test]
fn vanishing_ratio_limit() {
    for zeta in [0.25, 0.5, 0.75] {
        for s_sq in [0.5, 1.0, 3.0] {
            let opt = optimal_lambda_caus(&spec(1e-8, zeta, s_sq, 1.0)).unwrap();
            assert_eq!(opt.regime, LambdaRegime::Interior);
            assert!((opt.value - zeta / (1.0 - zeta)).abs() < 1e-3, "{zeta}: {}", opt.value);
        }
    }
}

#[test]
fn penalty_increases_with_confounding() {
    let zetas = [-0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 0.9];
    for gamma in [0.3, 0.5, 1.5, 3.0] {
        let values: Vec<f64> = zetas
            .iter()
            .map(|&z| optimal_lambda_caus(&spec(gamma, z, 1.0, 1.0)).unwrap())
            .filter(|o| o.regime == LambdaRegime::Interior)
            .map(|o| o.value)
            .collect();
        assert!(values.len() >= 4, "gamma={gamma}");
        assert!(values.windows(2).all(|w| w[1] > w[0]), "gamma={gamma}: {values:?}");
    }
}

#[test]
fn phase_transition_on_grid() {
    let mut interior = 0;
    for gamma in GAMMAS.into_iter().chain([1.0]) {
        for zeta in [-0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5, 0.75, 0.9] {
            let spec = spec(gamma, zeta, 1.0, 1.0);
            if optimal_lambda_caus(&spec).unwrap().regime != LambdaRegime::Interior {
                continue;
            }
            interior += 1;
            let sign = compare_regularization(&spec).unwrap().sign();
            let expected = if zeta > 0.0 {
                1
            } else if zeta < 0.0 {
                -1
            } else {
                0
            };
            assert_eq!(sign, expected, "gamma={gamma} zeta={zeta}");
        }
    }
    assert!(interior >= 28, "{interior}");
}

#[test]
fn benign_overfitting_boundary() {
    for gamma in [0.3, 0.5, 0.8, 1.2, 2.0, 4.0] {
        for snr in [0.5, 1.0, 2.0] {
            let rho = rho_threshold(gamma, snr).unwrap();
            let bound = gamma * gamma.max(1.0) / (1.0 - gamma).powi(2);
            for delta in [-0.1, -1e-2, -1e-3, 1e-3, 1e-2, 0.1] {
                let zeta = rho * (1.0 + delta);
                let spec = spec(gamma, zeta, snr, 1.0);
                let s = &spec.summaries;
                let opt = optimal_lambda_caus(&spec).unwrap();
                let benign = s.snr_caus - s.snr_stat >= bound;
                assert_eq!(opt.regime == LambdaRegime::Zero, benign, "gamma={gamma} snr={snr} delta={delta}");
                if opt.regime == LambdaRegime::Zero && delta > 0.0 {
                    assert!(opt.derivative_positive_at_zero);
                }
            }
        }
    }
}

#[test]
fn regularisation_beats_interpolation_under_positive_confounding() {
    for gamma in GAMMAS {
        for zeta in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let spec = spec(gamma, zeta, 1.0, 1.0);
            let opt = optimal_lambda_caus(&spec).unwrap();
            assert_eq!(opt.regime, LambdaRegime::Interior);
            let gap = total(&spec, 1e-6, Target::Causal) - total(&spec, opt.value, Target::Causal);
            assert!(gap > 1e-6, "gamma={gamma} zeta={zeta}: {gap}");
        }
    }
}

#[test]
fn interior_residual_is_small() {
    for gamma in GAMMAS.into_iter().chain([1.0, 1e-8, 100.0]) {
        for zeta in [-0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 0.9, 0.99] {
            let spec = spec(gamma, zeta, 1.0, 1.0);
            let opt = optimal_lambda_caus(&spec).unwrap();
            if opt.regime != LambdaRegime::Interior {
                continue;
            }
            let scale = 2.0 * spec.summaries.s_sq / discriminant(opt.value, gamma).powf(1.5);
            let d = risk_derivative(opt.value, &spec).unwrap();
            assert!(d.abs() <= 1e-8 * scale, "gamma={gamma} zeta={zeta}: {d}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn regimes_follow_the_thresholds(
        gamma in prop_oneof![0.01f64..0.99, 1.01f64..20.0],
        zeta in -5.0f64..3.0,
        snr in 0.1f64..10.0,
    ) {
        let spec = spec(gamma, zeta, snr, 1.0);
        let opt = optimal_lambda_caus(&spec).unwrap();
        let rho = rho_threshold(gamma, spec.summaries.snr_stat).unwrap();
        let z = spec.summaries.zeta;
        prop_assert_eq!(opt.regime == LambdaRegime::Infinite, z >= 1.0);
        prop_assert_eq!(opt.regime == LambdaRegime::Zero, z <= rho);
        match opt.regime {
            LambdaRegime::Zero => {
                prop_assert_eq!(opt.value, 0.0);
                for l in LAMBDAS {
                    prop_assert!(risk_derivative(l, &spec).unwrap() >= -1e-10);
                }
            }
            LambdaRegime::Infinite => {
                prop_assert_eq!(opt.value, f64::INFINITY);
                for l in LAMBDAS {
                    prop_assert!(risk_derivative(l, &spec).unwrap() <= 1e-10);
                }
            }
            LambdaRegime::Interior => {
                prop_assert!(opt.value > 0.0 && opt.value.is_finite());
                prop_assert!(opt.residual.is_some());
            }
        }
    }
}
