//! Artifact-producing subcommands. Each has a pure builder returning the
//! artifact and a `run_*` wrapper that writes it.

use std::path::{Path, PathBuf};

use confounded_ridge::asymptotics::{limiting_min_norm, limiting_ridge, null_risk, LimitSpec};
use confounded_ridge::confounding::{min_norm_regime, regime_for_signal, structural_confounding};
use confounded_ridge::estimators::{exact_risk, BiasVariance, DesignSpectrum};
use confounded_ridge::model::{
    derive_statistical, sample_interventional, sample_isotropic_design, sample_observational, summarize,
    CausalModelParams, DerivedStatistical, ModelSpec, ScalarSummaries,
};
use confounded_ridge::optimal_reg::{
    compare_regularization, optimal_lambda_caus, optimal_lambda_stat, rho_threshold, LambdaRegime, OptimalLambda,
    RegularizationComparison,
};
use confounded_ridge::rng::substream_seed;
use confounded_ridge::{estimators::RiskReport, Target};
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{sample_size, ExperimentConfig};
use crate::error::Result;
use crate::family;
use crate::output::{f, json_bytes, mean_stderr, write_artifact, Table};

/// Half-width of the band around `gamma = 1` excluded from finite-vs-limit comparisons.
pub const THRESHOLD_BAND: f64 = 0.1;

/// `|gamma - 1| < THRESHOLD_BAND`, with the band edges 0.9 and 1.1 both outside
/// despite their binary representations.
pub fn near_threshold(gamma: f64) -> bool {
    (gamma - 1.0).abs() < THRESHOLD_BAND - 1e-12
}

pub struct BuiltModel {
    pub params: CausalModelParams,
    pub derived: DerivedStatistical,
    pub summaries: ScalarSummaries,
}

pub fn build_model(spec: &ModelSpec) -> Result<BuiltModel> {
    let params = spec.build()?;
    let derived = derive_statistical(&params)?;
    let summaries = summarize(&derived, params.beta())?;
    Ok(BuiltModel { params, derived, summaries })
}

/// Exact scalar summaries of a spec, after checking that the model can be built.
pub fn spec_summaries(spec: &ModelSpec) -> Result<ScalarSummaries> {
    spec.build()?;
    Ok(spec.summaries()?)
}

pub fn derive_report(config: &ExperimentConfig) -> Result<Value> {
    let m = build_model(&config.model)?;
    let s = &config.model.summaries()?;
    Ok(json!({
        "model": config.model,
        "derived": {
            "d": m.derived.dim(),
            "sigma_sq": m.params.sigma_sq(),
            "sigma_stat_sq": m.derived.sigma_stat_sq,
            "interventional_noise_var": m.params.interventional_noise_var(),
            "beta_norm_sq": m.params.beta().norm_squared(),
            "beta_stat_norm_sq": m.derived.beta_stat.norm_squared(),
            "gamma_norm_sq": m.derived.gamma.norm_squared(),
            "gamma_sq_sigma": m.derived.gamma_sq_sigma(),
        },
        "summaries": s,
        "structural_confounding": structural_confounding(s)?,
        "min_norm_regime": min_norm_regime(s).label(),
    }))
}

pub fn run_simulate(config: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let spec = config.model_at_d()?;
    let params = spec.build()?;
    let n = config.simulate_n();
    let obs = sample_observational(&params, n, substream_seed(config.seed, 0, 0))?;
    let int = sample_interventional(&params, n, substream_seed(config.seed, 1, 0))?;
    let mut paths = Vec::new();
    for (name, data) in [("observational.csv", obs), ("interventional.csv", int)] {
        let mut bytes = Vec::new();
        data.write_csv(&mut bytes)?;
        paths.push(write_artifact(out, name, &bytes)?);
    }
    Ok(paths)
}

pub fn risk_curve_table(config: &ExperimentConfig) -> Result<Table> {
    let s = spec_summaries(&config.model)?;
    let regime = min_norm_regime(&s).label();
    let mut table = Table::new(vec![
        "gamma",
        "excess_min_norm_causal",
        "excess_min_norm_statistical",
        "null_excess_causal",
        "omega_sq_baseline",
        "regime_S",
        "bias_min_norm_causal",
        "bias_min_norm_statistical",
        "variance_min_norm",
    ]);
    for &gamma in config.gamma_grid.iter().filter(|&&g| g != 1.0) {
        let spec = LimitSpec::new(gamma, s)?;
        let c = limiting_min_norm(&spec, Target::Causal)?;
        let st = limiting_min_norm(&spec, Target::Statistical)?;
        table.push(vec![
            f(gamma),
            f(c.excess()),
            f(st.excess()),
            f(null_risk(&spec, Target::Causal).excess()),
            f(s.omega_sq),
            regime.to_owned(),
            f(c.bias.unwrap_or(f64::NAN)),
            f(st.bias.unwrap_or(f64::NAN)),
            f(c.variance.unwrap_or(f64::NAN)),
        ]);
    }
    Ok(table)
}

pub fn run_risk_curve(config: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    write_artifact(out, "risk_curve.csv", &risk_curve_table(config)?.to_bytes())
}

/// Limiting min-norm causal risk for one model per entry of `figure2_zetas`,
/// all sharing `s^2` and `sigma_stat^2` with the configured model.
pub fn figure2_table(config: &ExperimentConfig) -> Result<Table> {
    let base = spec_summaries(&config.model)?;
    let mut table = Table::new(vec![
        "zeta",
        "eta",
        "s_min_norm",
        "regime_S",
        "gamma",
        "excess_min_norm_causal",
        "null_excess_causal",
        "omega_sq_baseline",
    ]);
    for &zeta in &config.figure2_zetas {
        let s = family::summaries(base.s_sq, base.sigma_stat_sq, zeta, config.model.eta)?;
        for &gamma in config.gamma_grid.iter().filter(|&&g| g != 1.0) {
            let spec = LimitSpec::new(gamma, s)?;
            table.push(vec![
                f(zeta),
                f(s.eta),
                f(s.s_min_norm),
                regime_for_signal(s.s_min_norm).label().to_owned(),
                f(gamma),
                f(limiting_min_norm(&spec, Target::Causal)?.excess()),
                f(null_risk(&spec, Target::Causal).excess()),
                f(s.omega_sq),
            ]);
        }
    }
    Ok(table)
}

pub fn run_figure2(config: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    write_artifact(out, "figure2.csv", &figure2_table(config)?.to_bytes())
}

/// Limiting risk at the optimal causal penalty, whatever its regime.
pub fn limiting_at_optimum(spec: &LimitSpec, opt: &OptimalLambda, target: Target) -> Result<RiskReport> {
    Ok(match opt.regime {
        LambdaRegime::Zero => limiting_min_norm(spec, target)?,
        LambdaRegime::Interior => limiting_ridge(spec, opt.value, target)?,
        LambdaRegime::Infinite => null_risk(spec, target),
    })
}

/// Conditional bias and variance of the fit at the optimal causal penalty.
pub fn finite_at_optimum(
    spectrum: &DesignSpectrum,
    model: &BuiltModel,
    opt: &OptimalLambda,
    target: Target,
) -> Result<BiasVariance> {
    let beta = model.params.beta();
    Ok(match opt.regime {
        LambdaRegime::Zero => spectrum.bias_variance(&model.derived, beta, 0.0, target)?,
        LambdaRegime::Interior => spectrum.bias_variance(&model.derived, beta, opt.value, target)?,
        LambdaRegime::Infinite => {
            let zero = DVector::zeros(model.derived.dim());
            BiasVariance { bias: exact_risk(&zero, &model.derived, beta, target)?.excess(), variance: 0.0 }
        }
    })
}

/// Per-replicate values: causal bias, causal variance, statistical variance.
struct Draw {
    min_norm: [f64; 3],
    ridge: [f64; 3],
}

pub fn figure3_table(config: &ExperimentConfig) -> Result<Table> {
    let model_spec = config.model_at_d()?;
    let model = build_model(&model_spec)?;
    let limit = model_spec.summaries()?;
    let d = config.d;
    let mut table = Table::new(vec![
        "gamma",
        "n",
        "near_threshold",
        "lambda_c",
        "lambda_c_regime",
        "limit_bias_min_norm",
        "limit_variance_min_norm",
        "limit_excess_min_norm",
        "limit_bias_ridge",
        "limit_variance_ridge",
        "limit_excess_ridge",
        "finite_bias_min_norm",
        "finite_bias_min_norm_stderr",
        "finite_variance_min_norm",
        "finite_variance_min_norm_stderr",
        "finite_variance_min_norm_statistical",
        "finite_excess_min_norm",
        "finite_excess_min_norm_stderr",
        "finite_bias_ridge",
        "finite_bias_ridge_stderr",
        "finite_variance_ridge",
        "finite_variance_ridge_stderr",
        "finite_variance_ridge_statistical",
        "finite_excess_ridge",
        "finite_excess_ridge_stderr",
    ]);
    for (cell, &gamma) in config.gamma_grid.iter().enumerate() {
        let n = sample_size(d, gamma);
        if gamma == 1.0 || n == d {
            continue;
        }
        let spec = LimitSpec::new(gamma, limit)?;
        let opt = optimal_lambda_caus(&spec)?;
        let mn = limiting_min_norm(&spec, Target::Causal)?;
        let ridge = limiting_at_optimum(&spec, &opt, Target::Causal)?;

        let draws = (0..config.replicates as u64)
            .into_par_iter()
            .map(|r| -> Result<Draw> {
                let x = sample_isotropic_design(n, d, substream_seed(config.seed, cell as u64, r));
                let spectrum = DesignSpectrum::new(&x)?;
                let beta = model.params.beta();
                let mn_c = spectrum.bias_variance(&model.derived, beta, 0.0, Target::Causal)?;
                let mn_s = spectrum.bias_variance(&model.derived, beta, 0.0, Target::Statistical)?;
                let r_c = finite_at_optimum(&spectrum, &model, &opt, Target::Causal)?;
                let r_s = finite_at_optimum(&spectrum, &model, &opt, Target::Statistical)?;
                Ok(Draw {
                    min_norm: [mn_c.bias, mn_c.variance, mn_s.variance],
                    ridge: [r_c.bias, r_c.variance, r_s.variance],
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let column = |pick: &dyn Fn(&Draw) -> f64| mean_stderr(&draws.iter().map(pick).collect::<Vec<_>>());
        let mut row = vec![
            f(gamma),
            n.to_string(),
            u8::from(near_threshold(gamma)).to_string(),
            f(opt.value),
            format!("{:?}", opt.regime),
            f(mn.bias.unwrap_or(f64::NAN)),
            f(mn.variance.unwrap_or(f64::NAN)),
            f(mn.excess()),
            f(ridge.bias.unwrap_or(f64::NAN)),
            f(ridge.variance.unwrap_or(f64::NAN)),
            f(ridge.excess()),
        ];
        let picks: [fn(&Draw) -> [f64; 3]; 2] = [|d| d.min_norm, |d| d.ridge];
        for get in picks {
            let (bias, bias_se) = column(&|d| get(d)[0]);
            let (var, var_se) = column(&|d| get(d)[1]);
            let (var_stat, _) = column(&|d| get(d)[2]);
            let (excess, excess_se) = column(&|d| get(d)[0] + get(d)[1]);
            row.extend([bias, bias_se, var, var_se, var_stat, excess, excess_se].map(f));
        }
        table.push(row);
    }
    Ok(table)
}

pub fn run_figure3(config: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    write_artifact(out, "figure3.csv", &figure3_table(config)?.to_bytes())
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalLambdaCell {
    pub gamma: f64,
    pub zeta: f64,
    pub eta: f64,
    pub lambda_s: f64,
    pub lambda_c: OptimalLambda,
    /// Number, or `"-inf"` at `gamma = 1`.
    pub rho: Value,
    pub comparison: RegularizationComparison,
    pub sign_lambda_c_minus_lambda_s: i8,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalLambdaTable {
    pub s_sq: f64,
    pub sigma_stat_sq: f64,
    pub snr_stat: f64,
    pub cells: Vec<OptimalLambdaCell>,
}

fn extended(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::String(confounded_ridge::format_float(v))
    }
}

pub fn optimal_lambda_table(config: &ExperimentConfig) -> Result<OptimalLambdaTable> {
    let base = spec_summaries(&config.model)?;
    let grid: Vec<(f64, f64)> =
        config.zeta_grid.iter().flat_map(|&z| config.gamma_grid.iter().map(move |&g| (z, g))).collect();
    let cells = grid
        .par_iter()
        .map(|&(zeta, gamma)| -> Result<OptimalLambdaCell> {
            let s = family::summaries(base.s_sq, base.sigma_stat_sq, zeta, config.model.eta)?;
            let spec = LimitSpec::new(gamma, s)?;
            let comparison = compare_regularization(&spec)?;
            Ok(OptimalLambdaCell {
                gamma,
                zeta,
                eta: s.eta,
                lambda_s: optimal_lambda_stat(gamma, s.snr_stat)?,
                lambda_c: optimal_lambda_caus(&spec)?,
                rho: extended(rho_threshold(gamma, s.snr_stat)?),
                comparison,
                sign_lambda_c_minus_lambda_s: comparison.sign(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OptimalLambdaTable { s_sq: base.s_sq, sigma_stat_sq: base.sigma_stat_sq, snr_stat: base.snr_stat, cells })
}

pub fn run_optimal_lambda(config: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    write_artifact(out, "optimal_lambda.json", &json_bytes(&optimal_lambda_table(config)?))
}
