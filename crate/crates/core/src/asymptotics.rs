//! Proportional-limit (`d/n -> gamma`) risks of ridge and min-norm regression
//! under isotropic covariates.
//!
//! Everything is expressed through the Stieltjes transform `m` of the
//! Marchenko-Pastur law evaluated left of the spectrum, at `z = -lambda`.

use serde::{Deserialize, Serialize};

use crate::estimators::{Provenance, RiskReport};
use crate::model::ScalarSummaries;
use crate::{Error, Result, Target};

/// Overparameterisation ratio together with the model's scalar summaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitSpec {
    pub gamma: f64,
    pub summaries: ScalarSummaries,
}

impl LimitSpec {
    pub fn new(gamma: f64, summaries: ScalarSummaries) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::invalid("gamma", format!("must be positive and finite, got {gamma}")));
        }
        if !(summaries.sigma_stat_sq > 0.0) {
            return Err(Error::invalid("sigma_stat_sq", "must be positive"));
        }
        Ok(Self { gamma, summaries })
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(gamma, self.summaries)
    }
}

/// `phi(lambda) = (1 + lambda + gamma)^2 - 4 gamma`, the discriminant of the
/// Marchenko-Pastur fixed-point equation at `z = -lambda`.
pub fn discriminant(lambda: f64, gamma: f64) -> f64 {
    // (1 - gamma + lambda)^2 + 4 gamma lambda: both terms are nonnegative
    let a = 1.0 - gamma + lambda;
    a * a + 4.0 * gamma * lambda
}

/// Stieltjes transform `m(-lambda)` of the Marchenko-Pastur law with ratio
/// `gamma`, i.e. the limit of `(1/d) Tr[(Sigma_hat + lambda I)^{-1}]`.
///
/// Computed as `(sqrt(phi) - (1 - gamma + lambda)) / (2 gamma lambda)`, with the
/// numerator rationalised to `4 gamma lambda / (sqrt(phi) + 1 - gamma + lambda)`
/// whenever `1 - gamma + lambda > 0` to avoid cancellation.
pub fn mp_m(lambda: f64, gamma: f64) -> f64 {
    let a = 1.0 - gamma + lambda;
    let root = discriminant(lambda, gamma).sqrt();
    if a > 0.0 {
        2.0 / (root + a)
    } else {
        (root - a) / (2.0 * gamma * lambda)
    }
}

/// Derivative `m'(-lambda)`, i.e. `-d/dlambda [m(-lambda)]`.
///
/// Differentiating the fixed point `gamma lambda m^2 + (1 - gamma + lambda) m = 1`
/// gives `m'(-lambda) = m (1 + gamma m) / sqrt(phi)`.
pub fn mp_m_prime(lambda: f64, gamma: f64) -> f64 {
    let m = mp_m(lambda, gamma);
    m * (1.0 + gamma * m) / discriminant(lambda, gamma).sqrt()
}

/// Residual of the Marchenko-Pastur fixed point
/// `gamma lambda m^2 + (1 - gamma + lambda) m - 1` at `m = m(-lambda)`.
pub fn mp_fixed_point_residual(lambda: f64, gamma: f64, m: f64) -> f64 {
    gamma * lambda * m * m + (1.0 - gamma + lambda) * m - 1.0
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("lambda", format!("must be positive and finite, got {lambda}")))
    }
}

/// Limiting bias and variance of ridge at penalty `lambda`, computed from
/// precomputed transform values. Shared by [`limiting_ridge`] and the
/// perturbation hooks of the check suite.
pub fn ridge_terms_from_transform(spec: &LimitSpec, lambda: f64, m: f64, m_prime: f64, target: Target) -> RiskReport {
    let s = &spec.summaries;
    let variance = s.sigma_stat_sq * spec.gamma * (m - lambda * m_prime);
    let signal = s.s_sq * lambda * lambda * m_prime;
    let (bias, constant) = match target {
        Target::Causal => (s.omega_sq + signal - 2.0 * (s.omega_sq + s.eta) * lambda * m, s.sigma_stat_sq + s.omega_sq),
        Target::Statistical => (signal, s.sigma_stat_sq),
    };
    RiskReport::decomposed(bias, variance, constant, Provenance::Limiting)
}

/// Limiting bias / variance / risk of the ridge estimator.
///
/// Causal: `B = omega^2 + s^2 lambda^2 m'(-lambda) - 2 (omega^2 + eta) lambda m(-lambda)`.
/// Statistical: the same with `omega^2 = eta = 0`.
/// Both: `V = sigma_stat^2 gamma (m(-lambda) - lambda m'(-lambda))`.
pub fn limiting_ridge(spec: &LimitSpec, lambda: f64, target: Target) -> Result<RiskReport> {
    check_lambda(lambda)?;
    let m = mp_m(lambda, spec.gamma);
    let m_prime = mp_m_prime(lambda, spec.gamma);
    Ok(ridge_terms_from_transform(spec, lambda, m, m_prime, target))
}

/// Limiting risk of the min-norm interpolator, the `lambda -> 0+` limit of
/// [`limiting_ridge`].
pub fn limiting_min_norm(spec: &LimitSpec, target: Target) -> Result<RiskReport> {
    let g = spec.gamma;
    if g == 1.0 {
        return Err(Error::InterpolationThreshold);
    }
    let s = &spec.summaries;
    let variance = if g < 1.0 { s.sigma_stat_sq * g / (1.0 - g) } else { s.sigma_stat_sq / (g - 1.0) };
    let unexplained = if g < 1.0 { 0.0 } else { 1.0 - 1.0 / g };
    let (bias, constant) = match target {
        Target::Causal => (s.omega_sq + (s.r_sq - s.omega_sq) * unexplained, s.sigma_stat_sq + s.omega_sq),
        Target::Statistical => (s.s_sq * unexplained, s.sigma_stat_sq),
    };
    Ok(RiskReport::decomposed(bias, variance, constant, Provenance::Limiting))
}

/// Risk of the null predictor `beta_hat = 0`: causal excess `r^2`,
/// statistical excess `s^2`.
pub fn null_risk(spec: &LimitSpec, target: Target) -> RiskReport {
    let s = &spec.summaries;
    let (excess, constant) = match target {
        Target::Causal => (s.r_sq, s.sigma_stat_sq + s.omega_sq),
        Target::Statistical => (s.s_sq, s.sigma_stat_sq),
    };
    RiskReport::decomposed(excess, 0.0, constant, Provenance::Limiting)
}
