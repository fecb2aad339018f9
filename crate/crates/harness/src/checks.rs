//! The invariant check suite behind `check`.
//!
//! Every check is deterministic given the seed. Numerical kernels go through
//! [`Kernels`] so a perturbation shows up as a named failure.

use std::time::Instant;

use confounded_ridge::asymptotics::{discriminant, limiting_min_norm, mp_fixed_point_residual, null_risk, LimitSpec};
use confounded_ridge::confounding::{confounding_strength, min_norm_regime, MinNormRegime};
use confounded_ridge::estimators::{conditional_bias_variance, exact_risk, min_norm_fit, ridge_fit, DesignSpectrum};
use confounded_ridge::linalg::sample_covariance_spectrum;
use confounded_ridge::model::{
    build_isotropic_model, derive_statistical, sample_interventional, sample_isotropic_design, sample_observational,
    sample_response_given_design, summarize, BetaStatSpec, CausalModelParams, Dataset, Direction, ModelSpec,
    ScalarSummaries, Source,
};
use confounded_ridge::optimal_reg::{
    compare_regularization, confounding_threshold, optimal_lambda_caus, optimal_lambda_stat, rho_threshold,
    LambdaRegime,
};
use confounded_ridge::rng::{self, substream_seed};
use confounded_ridge::{format_float, Target};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::{build_model, finite_at_optimum, limiting_at_optimum, risk_curve_table};
use crate::config::{sample_size, ExperimentConfig, STANDARD_GAMMAS, STANDARD_LAMBDAS};
use crate::family;
use crate::kernels::{Kernels, Perturbation};
use crate::output::mean_stderr;

#[derive(Debug, Clone, Copy)]
pub struct CheckContext {
    pub seed: u64,
    pub quick: bool,
    pub kernels: Kernels,
}

impl CheckContext {
    pub fn new(seed: u64, quick: bool, perturbation: Option<Perturbation>) -> Self {
        Self { seed, quick, kernels: Kernels { perturbation } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub seed: u64,
    pub quick: bool,
    pub perturbation: Option<Perturbation>,
    pub checks: Vec<CheckOutcome>,
    pub summary: CheckSummary,
    pub all_passed: bool,
}

impl CheckReport {
    pub fn failed_names(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

type CheckFn = fn(&CheckContext) -> Result<Tally, String>;

/// Every check, in report order.
pub const CHECKS: &[(&str, CheckFn)] = &[
    ("model.round_trip", model_round_trip),
    ("model.noise_nonnegativity", model_noise_nonnegativity),
    ("model.observational_conditional", model_observational_conditional),
    ("model.interventional_conditional", model_interventional_conditional),
    ("estimators.ridgeless_consistency", estimators_ridgeless_consistency),
    ("estimators.interpolation", estimators_interpolation),
    ("estimators.decomposition_oracle", estimators_decomposition_oracle),
    ("estimators.variance_target_independence", estimators_variance_target_independence),
    ("asymptotics.mp_fixed_point", asymptotics_mp_fixed_point),
    ("asymptotics.m_prime_finite_difference", asymptotics_m_prime_finite_difference),
    ("asymptotics.stieltjes_resolvent_trace", asymptotics_stieltjes_resolvent_trace),
    ("asymptotics.variance_target_independence", asymptotics_variance_target_independence),
    ("asymptotics.double_descent", asymptotics_double_descent),
    ("asymptotics.statistical_reduction", asymptotics_statistical_reduction),
    ("asymptotics.ridgeless_limit", asymptotics_ridgeless_limit),
    ("asymptotics.confounding_ordering", asymptotics_confounding_ordering),
    ("asymptotics.finite_sample_agreement", asymptotics_finite_sample_agreement),
    ("confounding.zeta_partition", confounding_zeta_partition),
    ("confounding.snr_identities", confounding_snr_identities),
    ("confounding.never_beats_null", confounding_never_beats_null),
    ("optimal_reg.lambda_s_recovery", optimal_reg_lambda_s_recovery),
    ("optimal_reg.risk_derivative_finite_difference", optimal_reg_risk_derivative_finite_difference),
    ("optimal_reg.regime_consistency", optimal_reg_regime_consistency),
    ("optimal_reg.interior_residual", optimal_reg_interior_residual),
    ("optimal_reg.vanishing_gamma_limit", optimal_reg_vanishing_gamma_limit),
    ("optimal_reg.threshold_function", optimal_reg_threshold_function),
    ("optimal_reg.benign_boundary", optimal_reg_benign_boundary),
    ("optimal_reg.monotonicity", optimal_reg_monotonicity),
    ("optimal_reg.phase_transition", optimal_reg_phase_transition),
    ("optimal_reg.nonvanishing_benefit", optimal_reg_nonvanishing_benefit),
    ("harness.csv_format", harness_csv_format),
];

pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|(name, _)| *name)
}

/// Runs one check by name.
pub fn run_check(name: &str, ctx: &CheckContext) -> Option<CheckOutcome> {
    let (name, check) = CHECKS.iter().find(|(n, _)| *n == name)?;
    Some(outcome(name, check(ctx)))
}

fn outcome(name: &str, result: Result<Tally, String>) -> CheckOutcome {
    match result {
        Ok(t) => CheckOutcome { name: name.to_owned(), passed: t.passed(), detail: t.detail() },
        Err(e) => CheckOutcome { name: name.to_owned(), passed: false, detail: format!("error: {e}") },
    }
}

pub fn run_all(ctx: &CheckContext) -> CheckReport {
    run_all_timed(ctx, |_, _| {})
}

/// Like [`run_all`], also returning per-check wall times for progress output.
pub fn run_all_timed(ctx: &CheckContext, mut progress: impl FnMut(&CheckOutcome, f64)) -> CheckReport {
    let mut checks = Vec::new();
    for (name, check) in CHECKS {
        let start = Instant::now();
        let o = outcome(name, check(ctx));
        progress(&o, start.elapsed().as_secs_f64());
        checks.push(o);
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let total = checks.len();
    CheckReport {
        seed: ctx.seed,
        quick: ctx.quick,
        perturbation: ctx.kernels.perturbation,
        summary: CheckSummary { total, passed, failed: total - passed },
        all_passed: passed == total,
        checks,
    }
}

/// Comparison counter that remembers the worst metric and the first violation.
#[derive(Debug, Clone)]
pub struct Tally {
    metric: &'static str,
    count: usize,
    violations: usize,
    worst: f64,
    first_violation: Option<String>,
    notes: Vec<String>,
}

impl Tally {
    fn new(metric: &'static str) -> Self {
        Self { metric, count: 0, violations: 0, worst: 0.0, first_violation: None, notes: Vec::new() }
    }

    fn record(&mut self, value: f64, ok: bool, context: impl FnOnce() -> String) {
        self.count += 1;
        if value.is_nan() || value > self.worst {
            self.worst = value;
        }
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(context());
            }
        }
    }

    fn expect(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.record(0.0, ok, context);
    }

    fn note(&mut self, note: String) {
        self.notes.push(note);
    }

    fn passed(&self) -> bool {
        self.violations == 0 && self.count > 0
    }

    fn detail(&self) -> String {
        let mut s = format!("{} comparisons, {} violations", self.count, self.violations);
        if !self.metric.is_empty() {
            s.push_str(&format!(", worst {} = {}", self.metric, format_float(self.worst)));
        }
        for n in &self.notes {
            s.push_str("; ");
            s.push_str(n);
        }
        if let Some(v) = &self.first_violation {
            s.push_str("; first violation: ");
            s.push_str(v);
        }
        s
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// Seed cells, one per randomised check.
const CELL_ROUND_TRIP: u64 = 1;
const CELL_NOISE: u64 = 2;
const CELL_OBSERVATIONAL: u64 = 3;
const CELL_INTERVENTIONAL: u64 = 4;
const CELL_RIDGELESS: u64 = 5;
const CELL_INTERPOLATION: u64 = 6;
const CELL_DECOMPOSITION: u64 = 7;
const CELL_VARIANCE: u64 = 8;
const CELL_RESOLVENT: u64 = 9;
const CELL_FINITE: u64 = 10;
const CELL_PARTITION: u64 = 11;

fn gaussian_vector(r: &mut rng::Rng, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| scale * r.sample::<f64, _>(StandardNormal)).collect()
}

fn random_model(seed: u64, d: usize, l: usize) -> Result<CausalModelParams, String> {
    let mut r = rng::from_seed(seed);
    let m = DMatrix::from_vec(d, l, gaussian_vector(&mut r, d * l, 1.0));
    let alpha = DVector::from_vec(gaussian_vector(&mut r, l, 0.7));
    let beta = DVector::from_vec(gaussian_vector(&mut r, d, 1.0));
    let sigma = 0.1 + r.random::<f64>();
    CausalModelParams::new(m, alpha, beta, sigma).map_err(err)
}

/// Gamma parallel to beta_stat: feasible for every zeta.
fn parallel_spec(gamma: f64, zeta: f64, s_sq: f64, sigma: f64) -> Result<LimitSpec, String> {
    let s = family::parallel(s_sq, sigma, zeta).map_err(err)?;
    LimitSpec::new(gamma, s).map_err(err)
}

// ---------------------------------------------------------------- model

fn model_round_trip(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("abs error");
    let d = 5;
    let mut r = rng::from_seed(substream_seed(ctx.seed, CELL_ROUND_TRIP, 0));
    for (k, zeta) in [-2.0, -0.5, 0.0, 0.25, 0.5, 0.9, 1.0, 1.5].into_iter().enumerate() {
        for slack in [0.0, 0.3, 1.0] {
            let beta_stat = DVector::from_vec(gaussian_vector(&mut r, d, 1.0));
            let s_sq = beta_stat.norm_squared();
            let omega_sq = zeta * zeta * s_sq + slack;
            let eta = zeta * s_sq - omega_sq;
            let sigma = 0.2 + k as f64 * 0.3;
            let p = build_isotropic_model(&beta_stat, sigma, zeta, eta).map_err(err)?;
            let s = summarize(&derive_statistical(&p).map_err(err)?, p.beta()).map_err(err)?;
            let scale = 1.0 + s_sq;
            for (what, got, want) in [
                ("zeta", s.zeta, zeta),
                ("eta", s.eta, eta),
                ("sigma_stat_sq", s.sigma_stat_sq, sigma),
                ("s_sq", s.s_sq, s_sq),
            ] {
                let e = (got - want).abs() / scale;
                t.record(e, e <= 1e-10, || format!("{what}: {got} vs {want} at zeta={zeta}"));
            }
        }
    }
    Ok(t)
}

fn model_noise_nonnegativity(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("sigma^2 - sigma_stat^2");
    for i in 0..60u64 {
        let d = 1 + (i % 4) as usize;
        let p = random_model(substream_seed(ctx.seed, CELL_NOISE, i), d, d + (i % 3) as usize)?;
        let derived = derive_statistical(&p).map_err(err)?;
        let gap = p.sigma_sq() - derived.sigma_stat_sq;
        t.record(gap.max(0.0), gap <= 0.0, || {
            format!("model {i}: sigma_stat^2 {} < sigma^2 {}", derived.sigma_stat_sq, p.sigma_sq())
        });
    }
    Ok(t)
}

fn model_observational_conditional(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("|error| / stderr");
    let n = if ctx.quick { 20_000 } else { 100_000 };
    let p = random_model(substream_seed(ctx.seed, CELL_OBSERVATIONAL, 0), 3, 5)?;
    let derived = derive_statistical(&p).map_err(err)?;
    let data = sample_observational(&p, n, substream_seed(ctx.seed, CELL_OBSERVATIONAL, 1)).map_err(err)?;
    let gram_inv = data.x.tr_mul(&data.x).try_inverse().ok_or("singular design")?;
    let beta_ols = &gram_inv * data.x.tr_mul(&data.y);
    for j in 0..3 {
        let se = (derived.sigma_stat_sq * gram_inv[(j, j)]).sqrt();
        let z = (beta_ols[j] - derived.beta_stat[j]).abs() / se;
        t.record(z, z < 3.0, || format!("coefficient {j}: {} vs {}", beta_ols[j], derived.beta_stat[j]));
    }
    let resid = &data.y - &data.x * &beta_ols;
    let dof = (n - 3) as f64;
    let s2 = resid.norm_squared() / dof;
    let z = (s2 - derived.sigma_stat_sq).abs() / (derived.sigma_stat_sq * (2.0 / dof).sqrt());
    t.record(z, z < 3.0, || format!("residual variance {s2} vs {}", derived.sigma_stat_sq));
    Ok(t)
}

fn model_interventional_conditional(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("|error| / stderr");
    let n = if ctx.quick { 20_000 } else { 100_000 };
    let p = random_model(substream_seed(ctx.seed, CELL_INTERVENTIONAL, 0), 3, 5)?;
    let data = sample_interventional(&p, n, substream_seed(ctx.seed, CELL_INTERVENTIONAL, 1)).map_err(err)?;
    let resid = &data.y - &data.x * p.beta();
    let expected = p.interventional_noise_var();
    let mean = resid.mean();
    let z = mean.abs() / (expected / n as f64).sqrt();
    t.record(z, z < 3.0, || format!("residual mean {mean}"));
    let var = resid.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let z = (var - expected).abs() / (expected * (2.0 / (n - 1) as f64).sqrt());
    t.record(z, z < 3.0, || format!("residual variance {var} vs {expected}"));
    for j in 0..3 {
        let xj = data.x.column(j);
        let cov = xj.dot(&resid) / n as f64;
        let se = (xj.norm_squared() / n as f64 * expected / n as f64).sqrt();
        let z = cov.abs() / se;
        t.record(z, z < 3.0, || format!("Cov(x_{j}, residual) = {cov}"));
    }
    Ok(t)
}

// ---------------------------------------------------------------- estimators

fn estimators_ridgeless_consistency(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("relative distance");
    for (i, (n, d)) in [(20, 5), (5, 20), (50, 30), (30, 50), (12, 3)].into_iter().enumerate() {
        let seed = substream_seed(ctx.seed, CELL_RIDGELESS, i as u64);
        let x = sample_isotropic_design(n, d, seed);
        let sv = x.clone().singular_values();
        let cond = sv.max() / sv.min();
        if !(cond < 1e6) {
            t.note(format!("design {n}x{d} skipped (condition {cond:e})"));
            continue;
        }
        let y = sample_isotropic_design(n, 1, seed ^ 1).column(0).into_owned();
        let data = Dataset::new(x, y, Source::Observational, seed).map_err(err)?;
        let ridge = ridge_fit(&data, 1e-8).map_err(err)?;
        let mn = min_norm_fit(&data).map_err(err)?;
        let e = (&ridge - &mn).norm() / (1.0 + mn.norm());
        t.record(e, e <= 1e-5, || format!("{n}x{d}: {e:e}"));
    }
    Ok(t)
}

fn estimators_interpolation(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("relative residual");
    for (i, (n, d)) in [(5, 20), (30, 50), (10, 11), (1, 4)].into_iter().enumerate() {
        let seed = substream_seed(ctx.seed, CELL_INTERPOLATION, i as u64);
        let x = sample_isotropic_design(n, d, seed);
        let y = sample_isotropic_design(n, 1, seed ^ 1).column(0).into_owned();
        let data = Dataset::new(x.clone(), y.clone(), Source::Observational, seed).map_err(err)?;
        let b = min_norm_fit(&data).map_err(err)?;
        let e = (&x * &b - &y).norm() / y.norm();
        t.record(e, e <= 1e-8, || format!("{n}x{d}: {e:e}"));
    }
    Ok(t)
}

/// Model used by the finite-design estimator checks.
fn estimator_model(d: usize) -> Result<CausalModelParams, String> {
    let mut beta_stat = DVector::zeros(d);
    beta_stat[0] = 1.0;
    beta_stat[1] = -0.5;
    build_isotropic_model(&beta_stat, 0.8, 0.35, -0.05).map_err(err)
}

fn estimators_decomposition_oracle(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("|MC - exact| / stderr");
    let designs: &[(usize, usize)] =
        if ctx.quick { &[(10, 6), (6, 10)] } else { &[(10, 6), (6, 10), (30, 20), (20, 30), (15, 15)] };
    let redraws = if ctx.quick { 500 } else { 2000 };
    for (i, &(n, d)) in designs.iter().enumerate() {
        let p = estimator_model(d)?;
        let derived = derive_statistical(&p).map_err(err)?;
        let x = sample_isotropic_design(n, d, substream_seed(ctx.seed, CELL_DECOMPOSITION, 1000 + i as u64));
        for (j, lambda) in [0.1, 1.0].into_iter().enumerate() {
            let cell = CELL_DECOMPOSITION << 8 | (i * 2 + j) as u64;
            let excess: Vec<[f64; 2]> = (0..redraws as u64)
                .into_par_iter()
                .map(|r| -> Result<[f64; 2], String> {
                    let y =
                        sample_response_given_design(&x, &derived, substream_seed(ctx.seed, cell, r)).map_err(err)?;
                    let data = Dataset::new(x.clone(), y, Source::Observational, r).map_err(err)?;
                    let b = ridge_fit(&data, lambda).map_err(err)?;
                    let c = exact_risk(&b, &derived, p.beta(), Target::Causal).map_err(err)?.excess();
                    let s = exact_risk(&b, &derived, p.beta(), Target::Statistical).map_err(err)?.excess();
                    Ok([c, s])
                })
                .collect::<Result<_, _>>()?;
            for (k, target) in Target::BOTH.into_iter().enumerate() {
                let bv = conditional_bias_variance(&x, &derived, p.beta(), lambda, target).map_err(err)?;
                let (mean, se) = mean_stderr(&excess.iter().map(|e| e[k]).collect::<Vec<_>>());
                let z = (mean - bv.bias - bv.variance).abs() / se;
                t.record(z, z <= 3.0, || {
                    format!("{n}x{d} lambda={lambda} {target:?}: MC {mean} +- {se} vs {}", bv.bias + bv.variance)
                });
            }
        }
    }
    Ok(t)
}

fn estimators_variance_target_independence(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("|V_causal - V_statistical|");
    for (i, (n, d)) in [(40, 10), (10, 40), (25, 25)].into_iter().enumerate() {
        let p = estimator_model(d)?;
        let derived = derive_statistical(&p).map_err(err)?;
        let x = sample_isotropic_design(n, d, substream_seed(ctx.seed, CELL_VARIANCE, i as u64));
        let spectrum = DesignSpectrum::new(&x).map_err(err)?;
        for lambda in [0.0, 0.01, 0.5, 5.0] {
            let c = spectrum.bias_variance(&derived, p.beta(), lambda, Target::Causal).map_err(err)?;
            let s = spectrum.bias_variance(&derived, p.beta(), lambda, Target::Statistical).map_err(err)?;
            let e = (c.variance - s.variance).abs();
            t.record(e, c.variance == s.variance, || {
                format!("{n}x{d} lambda={lambda}: {} vs {}", c.variance, s.variance)
            });
        }
    }
    Ok(t)
}

// ---------------------------------------------------------------- asymptotics

fn asymptotics_mp_fixed_point(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("|residual|");
    for gamma in STANDARD_GAMMAS.into_iter().chain([1.0]) {
        for lambda in STANDARD_LAMBDAS {
            let m = ctx.kernels.m(lambda, gamma);
            let e = mp_fixed_point_residual(lambda, gamma, m).abs();
            t.record(e, e <= 1e-10 && m > 0.0, || format!("gamma={gamma} lambda={lambda}: m={m}"));
        }
    }
    Ok(t)
}

fn asymptotics_m_prime_finite_difference(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("relative error");
    let h = 1e-5;
    for gamma in [0.3, 1.0, 3.0] {
        for lambda in [0.1, 1.0, 10.0] {
            // m'(-lambda) = -d/dlambda m(-lambda)
            let fd = -(ctx.kernels.m(lambda + h, gamma) - ctx.kernels.m(lambda - h, gamma)) / (2.0 * h);
            let analytic = ctx.kernels.m_prime(lambda, gamma);
            let e = rel_err(fd, analytic);
            t.record(e, e <= 1e-6, || format!("gamma={gamma} lambda={lambda}: {fd} vs {analytic}"));
        }
    }
    Ok(t)
}

fn asymptotics_stieltjes_resolvent_trace(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("abs error");
    let (d, gammas): (usize, &[f64]) = if ctx.quick { (1000, &[0.5, 2.0]) } else { (2000, &STANDARD_GAMMAS) };
    t.note(format!("d = {d}"));
    for (i, &gamma) in gammas.iter().enumerate() {
        let n = sample_size(d, gamma);
        let x = sample_isotropic_design(n, d, substream_seed(ctx.seed, CELL_RESOLVENT, i as u64));
        let eigs = sample_covariance_spectrum(&x);
        // compare at the realised ratio: rounding n moves the zero-eigenvalue mass
        let ratio = d as f64 / n as f64;
        for lambda in STANDARD_LAMBDAS {
            let trace = eigs.iter().map(|e| 1.0 / (e + lambda)).sum::<f64>() / d as f64;
            let m = ctx.kernels.m(lambda, ratio);
            let e = (trace - m).abs();
            t.record(e, e <= 0.01, || format!("gamma={gamma} lambda={lambda}: trace {trace} vs m {m}"));
        }
    }
    Ok(t)
}

fn confounded_summaries() -> ScalarSummaries {
    ScalarSummaries::from_moments(0.5, 0.2, 0.1, 0.7).expect("feasible moments")
}

fn asymptotics_variance_target_independence(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("|V_causal - V_statistical|");
    for gamma in STANDARD_GAMMAS {
        let spec = LimitSpec::new(gamma, confounded_summaries()).map_err(err)?;
        for lambda in STANDARD_LAMBDAS {
            let c = ctx.kernels.limiting_ridge(&spec, lambda, Target::Causal).variance;
            let s = ctx.kernels.limiting_ridge(&spec, lambda, Target::Statistical).variance;
            let e = (c.unwrap_or(f64::NAN) - s.unwrap_or(f64::NAN)).abs();
            t.record(e, c == s, || format!("gamma={gamma} lambda={lambda}: {c:?} vs {s:?}"));
        }
        let c = limiting_min_norm(&spec, Target::Causal).map_err(err)?.variance;
        let s = limiting_min_norm(&spec, Target::Statistical).map_err(err)?.variance;
        t.record(0.0, c == s, || format!("min-norm gamma={gamma}: {c:?} vs {s:?}"));
    }
    Ok(t)
}

fn asymptotics_double_descent(_ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("");
    let s = ScalarSummaries::from_moments(1.0, 0.0, 0.0, 1.0).map_err(err)?;
    let variance = |g: f64| -> Result<f64, String> {
        let spec = LimitSpec::new(g, s).map_err(err)?;
        Ok(limiting_min_norm(&spec, Target::Causal).map_err(err)?.variance.unwrap_or(f64::NAN))
    };
    let below: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    let above: Vec<f64> = (101..1001).map(|i| i as f64 / 100.0).collect();
    for w in below.windows(2) {
        let (a, b) = (variance(w[0])?, variance(w[1])?);
        t.expect(b > a, || format!("V not increasing on ({}, {})", w[0], w[1]));
    }
    for w in above.windows(2) {
        let (a, b) = (variance(w[0])?, variance(w[1])?);
        t.expect(b < a, || format!("V not decreasing on ({}, {})", w[0], w[1]));
    }
    let base = variance(0.5)?;
    for g in [0.99, 1.01] {
        let v = variance(g)?;
        t.expect(v > 10.0 * base, || format!("V({g}) = {v} not above 10 V(0.5) = {}", 10.0 * base));
    }
    Ok(t)
}

fn asymptotics_statistical_reduction(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("abs difference");
    let s = ScalarSummaries::from_moments(1.3, 0.0, 0.0, 0.7).map_err(err)?;
    for gamma in STANDARD_GAMMAS {
        let spec = LimitSpec::new(gamma, s).map_err(err)?;
        for lambda in STANDARD_LAMBDAS {
            let c = ctx.kernels.limiting_ridge(&spec, lambda, Target::Causal);
            let st = ctx.kernels.limiting_ridge(&spec, lambda, Target::Statistical);
            let (cb, sb) = (c.bias.unwrap_or(f64::NAN), st.bias.unwrap_or(f64::NAN));
            let e = (cb - sb).abs();
            t.record(e, e <= 1e-14 * (1.0 + sb.abs()) && c.variance == st.variance, || {
                format!("gamma={gamma} lambda={lambda}: bias {cb} vs {sb}")
            });
        }
    }
    Ok(t)
}

fn asymptotics_ridgeless_limit(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("relative error");
    for s in [confounded_summaries(), ScalarSummaries::from_moments(1.0, 0.25, 0.0, 1.0).map_err(err)?] {
        for gamma in [0.5, 2.0] {
            let spec = LimitSpec::new(gamma, s).map_err(err)?;
            for target in Target::BOTH {
                let ridge = ctx.kernels.limiting_ridge(&spec, 1e-6, target);
                let mn = limiting_min_norm(&spec, target).map_err(err)?;
                for (what, a, b) in [
                    ("total", ridge.total, mn.total),
                    ("bias", ridge.bias.unwrap_or(f64::NAN), mn.bias.unwrap_or(f64::NAN)),
                    ("variance", ridge.variance.unwrap_or(f64::NAN), mn.variance.unwrap_or(f64::NAN)),
                ] {
                    // bias can vanish in the limit; measure it against the total
                    let e = (a - b).abs() / if what == "bias" { mn.total } else { b.abs() };
                    t.record(e, e <= 1e-3, || format!("gamma={gamma} {target:?} {what}: {a} vs {b}"));
                }
            }
        }
    }
    Ok(t)
}

fn asymptotics_confounding_ordering(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("");
    let zetas = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0];
    let beta_stat = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    let mut summaries = Vec::new();
    for &z in &zetas {
        let p = build_isotropic_model(&beta_stat, 1.0, z, 0.0).map_err(err)?;
        summaries.push(summarize(&derive_statistical(&p).map_err(err)?, p.beta()).map_err(err)?);
    }
    for gamma in STANDARD_GAMMAS {
        for lambda in STANDARD_LAMBDAS {
            let totals = summaries
                .iter()
                .map(|&s| {
                    Ok(ctx
                        .kernels
                        .limiting_ridge(&LimitSpec::new(gamma, s).map_err(err)?, lambda, Target::Causal)
                        .total)
                })
                .collect::<Result<Vec<f64>, String>>()?;
            for (i, w) in totals.windows(2).enumerate() {
                t.expect(w[1] > w[0], || {
                    format!(
                        "gamma={gamma} lambda={lambda}: R(zeta={}) = {} <= R(zeta={}) = {}",
                        zetas[i + 1],
                        w[1],
                        zetas[i],
                        w[0]
                    )
                });
            }
        }
    }
    Ok(t)
}

fn asymptotics_finite_sample_agreement(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("|finite - limit| / tolerance");
    let (d, replicates) = if ctx.quick { (150, 6) } else { (300, 20) };
    t.note(format!("d = {d}, {replicates} replicates"));
    // (r^2, omega^2, eta, sigma_stat^2) = (1, 0.25, 0, 1)
    let spec = ModelSpec {
        d,
        beta_stat: BetaStatSpec::Norm { norm_sq: 1.25, direction: Direction::E1 },
        sigma_stat_sq: 1.0,
        zeta: 0.2,
        eta: 0.0,
    };
    let model = build_model(&spec).map_err(err)?;
    let summaries = spec.summaries().map_err(err)?;
    for (cell, gamma) in [0.3, 0.7, 1.5, 3.0].into_iter().enumerate() {
        let n = sample_size(d, gamma);
        let limit_spec = LimitSpec::new(gamma, summaries).map_err(err)?;
        let opt = optimal_lambda_caus(&limit_spec).map_err(err)?;
        let draws = (0..replicates as u64)
            .into_par_iter()
            .map(|r| -> Result<Vec<[f64; 2]>, String> {
                let x = sample_isotropic_design(n, d, substream_seed(ctx.seed, CELL_FINITE << 8 | cell as u64, r));
                let spectrum = DesignSpectrum::new(&x).map_err(err)?;
                let mut out = Vec::new();
                for target in Target::BOTH {
                    let mn = spectrum.bias_variance(&model.derived, model.params.beta(), 0.0, target).map_err(err)?;
                    let ridge = finite_at_optimum(&spectrum, &model, &opt, target).map_err(err)?;
                    out.push([mn.bias, mn.variance]);
                    out.push([ridge.bias, ridge.variance]);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>, String>>()?;
        let mut k = 0;
        for target in Target::BOTH {
            let limits = [
                ("min-norm", limiting_min_norm(&limit_spec, target).map_err(err)?),
                ("ridge", ridge_limit(ctx, &limit_spec, &opt, target)?),
            ];
            for (label, limit) in limits {
                let constant = limit.constant;
                let col = |j: usize| mean_stderr(&draws.iter().map(|v| v[k][j]).collect::<Vec<_>>());
                let (bias, bias_se) = col(0);
                let (var, var_se) = col(1);
                for (what, got, se, want) in [
                    ("bias", bias, bias_se, limit.bias.unwrap_or(f64::NAN)),
                    ("variance", var, var_se, limit.variance.unwrap_or(f64::NAN)),
                ] {
                    // the floor only absorbs rounding where both sides vanish
                    let tol = (0.1 * want.abs()).max(3.0 * se).max(1e-12);
                    let e = (got - want).abs() / tol;
                    t.record(e, e <= 1.0, || {
                        format!("gamma={gamma} {label} {target:?} {what}: {got} +- {se} vs {want}")
                    });
                }
                let total = bias + var + constant;
                let e = rel_err(total, limit.total) / 0.05;
                t.record(e, e <= 1.0, || format!("gamma={gamma} {label} {target:?} total: {total} vs {}", limit.total));
                k += 1;
            }
        }
    }
    Ok(t)
}

fn ridge_limit(
    ctx: &CheckContext,
    spec: &LimitSpec,
    opt: &confounded_ridge::optimal_reg::OptimalLambda,
    target: Target,
) -> Result<confounded_ridge::estimators::RiskReport, String> {
    if opt.regime == LambdaRegime::Interior {
        Ok(ctx.kernels.limiting_ridge(spec, opt.value, target))
    } else {
        limiting_at_optimum(spec, opt, target).map_err(err)
    }
}

// ---------------------------------------------------------------- confounding

fn confounding_zeta_partition(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("");
    for i in 0..200u64 {
        let d = 1 + (i % 3) as usize;
        let p = random_model(substream_seed(ctx.seed, CELL_PARTITION, i), d, d + (i % 2) as usize)?;
        let derived = derive_statistical(&p).map_err(err)?;
        let s_sq = derived.beta_stat.norm_squared();
        if s_sq < 1e-6 {
            continue;
        }
        let s = summarize(&derived, p.beta()).map_err(err)?;
        let zeta = confounding_strength(&s).map_err(err)?;
        let signal = p.beta().dot(&derived.beta_stat);
        let slack = 1e-9 * (1.0 + s_sq);
        // zeta = 1 - <beta, beta_stat> / s^2, so both sides must agree away from rounding
        if (zeta - 1.0).abs() > 1e-9 && signal.abs() > slack {
            t.expect((zeta >= 1.0) == (signal <= 0.0), || {
                format!("model {i}: zeta={zeta}, <beta, beta_stat>={signal}")
            });
        }
        if zeta.abs() > 1e-9 && (signal - s_sq).abs() > slack {
            t.expect((zeta <= 0.0) == (signal >= s_sq), || {
                format!("model {i}: zeta={zeta}, <beta, beta_stat>={signal}, s^2={s_sq}")
            });
        }
    }
    Ok(t)
}

fn confounding_snr_identities(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("abs error");
    for i in 0..100u64 {
        let d = 1 + (i % 4) as usize;
        let p = random_model(substream_seed(ctx.seed, CELL_PARTITION, 1000 + i), d, d + 1)?;
        let derived = derive_statistical(&p).map_err(err)?;
        if derived.beta_stat.norm_squared() < 1e-6 {
            continue;
        }
        let s = summarize(&derived, p.beta()).map_err(err)?;
        let scale = 1.0 + s.snr_stat.abs();
        let e1 = (s.s_min_norm - (1.0 - 2.0 * s.zeta) * s.snr_stat).abs() / scale;
        let e2 = (s.snr_caus - (1.0 - s.zeta) * s.snr_stat).abs() / scale;
        t.record(e1, e1 <= 1e-12, || {
            format!("model {i}: S = {} vs {}", s.s_min_norm, (1.0 - 2.0 * s.zeta) * s.snr_stat)
        });
        t.record(e2, e2 <= 1e-12, || format!("model {i}: SNR_caus = {}", s.snr_caus));
    }
    Ok(t)
}

fn confounding_never_beats_null(_ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("");
    for (zeta, s_sq) in [(0.6, 1.0), (0.8, 2.0), (0.75, 1.0), (1.2, 0.5), (2.0, 1.0)] {
        let s = family::summaries(s_sq, 1.0, zeta, 0.0).map_err(err)?;
        t.expect(min_norm_regime(&s) == MinNormRegime::NeverBeatsNull, || {
            format!("zeta={zeta}: regime {:?}", min_norm_regime(&s))
        });
        for gamma in STANDARD_GAMMAS.into_iter().filter(|&g| g != 1.0) {
            let spec = LimitSpec::new(gamma, s).map_err(err)?;
            let mn = limiting_min_norm(&spec, Target::Causal).map_err(err)?.total;
            let null = null_risk(&spec, Target::Causal).total;
            t.expect(mn > null, || format!("zeta={zeta} gamma={gamma}: min-norm {mn} <= null {null}"));
        }
    }
    Ok(t)
}

// ---------------------------------------------------------------- optimal_reg

/// Log-grid scan then golden-section refinement in `log(lambda)`.
pub fn numeric_argmin(f: impl Fn(f64) -> f64) -> f64 {
    let grid: Vec<f64> = (0..=400).map(|i| -8.0 + i as f64 * 0.04).collect();
    let values: Vec<f64> = grid.iter().map(|&x| f(x.exp())).collect();
    let k = (0..grid.len()).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("nonempty grid");
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(grid.len() - 1)]);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-10 {
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

fn optimal_reg_lambda_s_recovery(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("abs error");
    for gamma in STANDARD_GAMMAS {
        for (s_sq, sigma) in [(1.0, 1.0), (2.0, 0.5), (0.5, 2.0)] {
            let spec = parallel_spec(gamma, 0.3, s_sq, sigma)?;
            let found = numeric_argmin(|l| ctx.kernels.limiting_ridge(&spec, l, Target::Statistical).total);
            let closed = optimal_lambda_stat(gamma, spec.summaries.snr_stat).map_err(err)?;
            let e = (found - closed).abs();
            t.record(e, e <= 1e-4, || format!("gamma={gamma} snr={}: {found} vs {closed}", spec.summaries.snr_stat));
        }
    }
    Ok(t)
}

fn optimal_reg_risk_derivative_finite_difference(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("relative error");
    let h = 1e-5;
    for gamma in STANDARD_GAMMAS {
        for lambda in STANDARD_LAMBDAS {
            for zeta in [-0.5, 0.0, 0.4, 1.2] {
                let spec = parallel_spec(gamma, zeta, 1.5, 0.8)?;
                let total = |l: f64| ctx.kernels.limiting_ridge(&spec, l, Target::Causal).total;
                let fd = (total(lambda + h) - total(lambda - h)) / (2.0 * h);
                let analytic = ctx.kernels.risk_derivative(lambda, &spec).map_err(err)?;
                // the absolute floor (1e-8) keeps rounding in the difference quotient
                // from dominating where the derivative itself is tiny
                let e = (fd - analytic).abs() / analytic.abs().max(1e-3);
                t.record(e, e <= 1e-5, || format!("gamma={gamma} lambda={lambda} zeta={zeta}: {fd} vs {analytic}"));
            }
        }
    }
    Ok(t)
}

const REGIME_ZETAS: [f64; 14] = [-20.0, -5.0, -3.0, -1.0, -0.5, -0.25, -0.1, 0.0, 0.25, 0.5, 0.9, 1.0, 1.5, 3.0];

fn optimal_reg_regime_consistency(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("");
    for gamma in STANDARD_GAMMAS.into_iter().chain([1.0]) {
        for snr in [0.5, 1.0, 2.0] {
            let rho = rho_threshold(gamma, snr).map_err(err)?;
            for zeta in REGIME_ZETAS {
                let spec = parallel_spec(gamma, zeta, snr, 1.0)?;
                let z = spec.summaries.zeta;
                let opt = optimal_lambda_caus(&spec).map_err(err)?;
                let cell = || format!("gamma={gamma} snr={snr} zeta={zeta}");
                t.expect((opt.regime == LambdaRegime::Zero) == (z <= rho), || {
                    format!("{}: regime {:?}, rho={rho}", cell(), opt.regime)
                });
                t.expect((opt.regime == LambdaRegime::Infinite) == (z >= 1.0), || {
                    format!("{}: regime {:?}", cell(), opt.regime)
                });
                let derivs = STANDARD_LAMBDAS
                    .iter()
                    .map(|&l| ctx.kernels.risk_derivative(l, &spec).map_err(err))
                    .collect::<Result<Vec<_>, _>>()?;
                match opt.regime {
                    LambdaRegime::Zero => {
                        t.expect(derivs.iter().all(|&g| g >= -1e-10), || {
                            format!("{}: negative derivative in Zero regime", cell())
                        });
                    }
                    LambdaRegime::Infinite => {
                        t.expect(derivs.iter().all(|&g| g <= 1e-10), || {
                            format!("{}: positive derivative in Infinite regime", cell())
                        });
                    }
                    LambdaRegime::Interior => {
                        let lo = ctx.kernels.risk_derivative(1e-9, &spec).map_err(err)?;
                        let hi = ctx.kernels.risk_derivative(1e6, &spec).map_err(err)?;
                        t.expect(lo < 0.0 && hi > 0.0, || format!("{}: no sign change ({lo}, {hi})", cell()));
                    }
                }
            }
        }
    }
    Ok(t)
}

fn optimal_reg_interior_residual(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("|dR/dlambda| / scale");
    for gamma in STANDARD_GAMMAS.into_iter().chain([1.0, 1e-8, 100.0]) {
        for snr in [0.5, 1.0, 4.0] {
            for zeta in [-0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 0.9, 0.99] {
                let spec = parallel_spec(gamma, zeta, snr, 1.0)?;
                let opt = optimal_lambda_caus(&spec).map_err(err)?;
                if opt.regime != LambdaRegime::Interior {
                    continue;
                }
                let scale = 2.0 * spec.summaries.s_sq / discriminant(opt.value, gamma).powf(1.5);
                let e = ctx.kernels.risk_derivative(opt.value, &spec).map_err(err)?.abs() / scale;
                t.record(e, e <= 1e-8, || format!("gamma={gamma} snr={snr} zeta={zeta}: lambda_C={}", opt.value));
            }
        }
    }
    Ok(t)
}

fn optimal_reg_vanishing_gamma_limit(_ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("abs error");
    for zeta in [0.25, 0.5, 0.75] {
        for snr in [0.5, 1.0, 3.0] {
            let opt = optimal_lambda_caus(&parallel_spec(1e-8, zeta, snr, 1.0)?).map_err(err)?;
            let want = zeta / (1.0 - zeta);
            let e = (opt.value - want).abs();
            t.record(e, opt.regime == LambdaRegime::Interior && e <= 1e-3, || {
                format!("zeta={zeta} snr={snr}: {} vs {want}", opt.value)
            });
        }
    }
    Ok(t)
}

fn optimal_reg_threshold_function(_ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("abs error");
    let grid: Vec<f64> = (0..=140).map(|i| 10f64.powf(-8.0 + i as f64 * 0.1)).collect();
    for gamma in STANDARD_GAMMAS {
        for snr in [0.5, 1.0, 4.0] {
            let f = |l: f64| confounding_threshold(l, gamma, snr);
            for w in grid.windows(2) {
                let step = f(w[1]) - f(w[0]);
                t.expect(step >= -1e-10, || format!("gamma={gamma} snr={snr}: f decreases on ({}, {})", w[0], w[1]));
            }
            let e = (f(1e6) - 1.0).abs();
            t.record(e, e < 1e-3, || format!("gamma={gamma} snr={snr}: f(1e6) = {}", f(1e6)));
            let at_zero = -gamma * gamma.max(1.0) / (snr * (gamma - 1.0).powi(2));
            let e = (f(1e-8) - at_zero).abs();
            t.record(e, e < 1e-3 * at_zero.abs().max(1.0), || {
                format!("gamma={gamma} snr={snr}: f(1e-8) = {} vs {at_zero}", f(1e-8))
            });
        }
    }
    Ok(t)
}

fn optimal_reg_benign_boundary(_ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("");
    for gamma in [0.3, 0.5, 0.8, 1.2, 2.0, 4.0] {
        for snr in [0.5, 1.0, 2.0] {
            let rho = rho_threshold(gamma, snr).map_err(err)?;
            let bound = gamma * gamma.max(1.0) / (1.0 - gamma).powi(2);
            for delta in [-0.1, -1e-2, -1e-3, 1e-3, 1e-2, 0.1] {
                let spec = parallel_spec(gamma, rho * (1.0 + delta), snr, 1.0)?;
                let s = &spec.summaries;
                let opt = optimal_lambda_caus(&spec).map_err(err)?;
                let benign = s.snr_caus - s.snr_stat >= bound;
                let cell = || format!("gamma={gamma} snr={snr} zeta={}", s.zeta);
                t.expect((opt.regime == LambdaRegime::Zero) == benign, || {
                    format!("{}: regime {:?}", cell(), opt.regime)
                });
                t.expect(opt.derivative_positive_at_zero == (delta > 0.0), || {
                    format!("{}: derivative sign at 0+", cell())
                });
            }
        }
    }
    Ok(t)
}

pub const MONOTONICITY_ZETAS: [f64; 7] = [-0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 0.9];

fn optimal_reg_monotonicity(_ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("");
    for gamma in [0.3, 0.5, 1.5, 3.0] {
        for snr in [0.5, 1.0, 4.0] {
            let mut values = Vec::new();
            for zeta in MONOTONICITY_ZETAS {
                let opt = optimal_lambda_caus(&parallel_spec(gamma, zeta, snr, 1.0)?).map_err(err)?;
                if opt.regime == LambdaRegime::Interior {
                    values.push((zeta, opt.value));
                }
            }
            t.expect(values.len() >= 2, || format!("gamma={gamma} snr={snr}: fewer than two interior cells"));
            for w in values.windows(2) {
                t.expect(w[1].1 > w[0].1, || {
                    format!(
                        "gamma={gamma} snr={snr}: lambda_C({}) = {} <= lambda_C({}) = {}",
                        w[1].0, w[1].1, w[0].0, w[0].1
                    )
                });
            }
        }
    }
    Ok(t)
}

pub const PHASE_ZETAS: [f64; 9] = [-0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5, 0.75, 0.9];

fn optimal_reg_phase_transition(_ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("");
    let mut interior = 0;
    for gamma in STANDARD_GAMMAS.into_iter().chain([1.0]) {
        for zeta in PHASE_ZETAS {
            let spec = parallel_spec(gamma, zeta, 1.0, 1.0)?;
            if optimal_lambda_caus(&spec).map_err(err)?.regime != LambdaRegime::Interior {
                continue;
            }
            interior += 1;
            let sign = compare_regularization(&spec).map_err(err)?.sign();
            let expected = if zeta > 0.0 {
                1
            } else if zeta < 0.0 {
                -1
            } else {
                0
            };
            t.expect(sign == expected, || format!("gamma={gamma} zeta={zeta}: sign {sign}"));
        }
    }
    t.note(format!("{interior} interior cells"));
    t.expect(interior >= 28, || format!("only {interior} interior cells"));
    Ok(t)
}

fn optimal_reg_nonvanishing_benefit(ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("");
    for gamma in STANDARD_GAMMAS {
        for zeta in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let spec = parallel_spec(gamma, zeta, 1.0, 1.0)?;
            let opt = optimal_lambda_caus(&spec).map_err(err)?;
            if opt.regime != LambdaRegime::Interior {
                t.expect(false, || format!("gamma={gamma} zeta={zeta}: regime {:?}", opt.regime));
                continue;
            }
            let gap = ctx.kernels.limiting_ridge(&spec, 1e-6, Target::Causal).total
                - ctx.kernels.limiting_ridge(&spec, opt.value, Target::Causal).total;
            t.expect(gap > 1e-6, || format!("gamma={gamma} zeta={zeta}: gain {gap}"));
        }
    }
    Ok(t)
}

// ---------------------------------------------------------------- harness

fn harness_csv_format(_ctx: &CheckContext) -> Result<Tally, String> {
    let mut t = Tally::new("");
    let config = ExperimentConfig::default();
    let a = risk_curve_table(&config).map_err(err)?.to_bytes();
    let b = risk_curve_table(&config).map_err(err)?.to_bytes();
    t.expect(a == b, || "risk curve bytes differ between runs".into());
    let text = String::from_utf8(a).map_err(err)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    t.expect(header.starts_with("gamma,"), || format!("header {header:?}"));
    for line in lines {
        for field in line.split(',') {
            if let Some(mantissa) = field.split('e').next().filter(|_| field.parse::<f64>().is_ok()) {
                let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
                t.expect(digits == 17, || format!("field {field:?} has {digits} significant digits"));
            }
        }
    }
    Ok(t)
}
