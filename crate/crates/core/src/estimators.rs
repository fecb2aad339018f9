//! Finite-sample ridge and min-norm regression and their causal / statistical
//! risks.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::{quad_form, RankRevealingSvd};
use crate::model::{self, CausalModelParams, Dataset, DerivedStatistical};
use crate::{Error, Result, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    Limiting,
    MonteCarlo,
}

/// Risk of a predictor split as `total = bias + variance + constant`.
///
/// `constant` is the irreducible part: `sigma_stat^2 + |Gamma|_Sigma^2` for
/// the causal target and `sigma_stat^2` for the statistical one. Monte Carlo
/// reports carry only the empirical `total` and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub bias: Option<f64>,
    pub variance: Option<f64>,
    pub constant: f64,
    pub total: f64,
    pub stderr: Option<f64>,
    pub provenance: Provenance,
}

impl RiskReport {
    pub(crate) fn decomposed(bias: f64, variance: f64, constant: f64, provenance: Provenance) -> Self {
        Self {
            bias: Some(bias),
            variance: Some(variance),
            constant,
            total: bias + variance + constant,
            stderr: None,
            provenance,
        }
    }

    /// `total - constant`.
    pub fn excess(&self) -> f64 {
        self.total - self.constant
    }
}

fn check_lambda(lambda: f64, allow_zero: bool) -> Result<()> {
    let ok = lambda.is_finite() && (lambda > 0.0 || (allow_zero && lambda == 0.0));
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(
            "lambda",
            format!("must be {}, got {lambda}", if allow_zero { "nonnegative" } else { "positive" }),
        ))
    }
}

/// Ridge estimator `(X^T X + n lambda I)^{-1} X^T Y`.
///
/// Note the penalty is scaled by the sample size.
pub fn ridge_fit(data: &Dataset, lambda: f64) -> Result<DVector<f64>> {
    check_lambda(lambda, false)?;
    let n = data.n() as f64;
    let mut gram = data.x.tr_mul(&data.x);
    for i in 0..data.dim() {
        gram[(i, i)] += n * lambda;
    }
    let rhs = data.x.tr_mul(&data.y);
    let chol = gram.cholesky().ok_or(Error::NonFinite("ridge normal equations (not positive definite)"))?;
    Ok(chol.solve(&rhs))
}

/// Minimum-norm least-squares solution `X^+ Y`.
pub fn min_norm_fit(data: &Dataset) -> Result<DVector<f64>> {
    Ok(RankRevealingSvd::new(&data.x)?.solve(&data.y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasVariance {
    pub bias: f64,
    pub variance: f64,
}

/// Spectral data of a fixed design, reusable across `lambda` and targets.
///
/// With `Sigma_hat = X^T X / n = V diag(e) V^T`, the ridge mean map is
/// `(Sigma_hat + lambda I)^{-1} Sigma_hat = V diag(e / (e + lambda)) V^T` and
/// the shrinkage projector is `Pi_lambda = I - V diag(e / (e + lambda)) V^T`.
/// At `lambda = 0` the ratio is one on the numerical range of `X`, which turns
/// `Pi_0` into the projector onto the null space of `X`.
#[derive(Debug, Clone)]
pub struct DesignSpectrum {
    n: usize,
    /// Nonzero eigenvalues of `Sigma_hat`.
    eigenvalues: DVector<f64>,
    /// `d x r` matching eigenvectors.
    v: DMatrix<f64>,
}

impl DesignSpectrum {
    pub fn new(x: &DMatrix<f64>) -> Result<Self> {
        let svd = RankRevealingSvd::new(x)?;
        let n = x.nrows();
        let eigenvalues = svd.singular_values.map(|s| s * s / n as f64);
        Ok(Self { n, eigenvalues, v: svd.v })
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    fn keep_weights(&self, lambda: f64) -> DVector<f64> {
        if lambda == 0.0 {
            DVector::from_element(self.eigenvalues.len(), 1.0)
        } else {
            self.eigenvalues.map(|e| e / (e + lambda))
        }
    }

    /// `Pi_lambda v`.
    fn shrink(&self, weights: &DVector<f64>, vec: &DVector<f64>) -> DVector<f64> {
        let coeffs = self.v.tr_mul(vec).component_mul(weights);
        vec - &self.v * coeffs
    }

    /// Exact `E_{Y|X}` bias and variance of the ridge estimator (min-norm at
    /// `lambda = 0`).
    ///
    /// Causal bias is `|Pi beta - (I - Pi) Gamma|_Sigma^2`; the statistical
    /// target is the same expression with `Gamma = 0, beta = beta_stat`.
    /// Variance is `(sigma_stat^2 / n) Tr[Sigma_hat (Sigma_hat + lambda I)^{-2} Sigma]`
    /// for both targets.
    pub fn bias_variance(
        &self,
        derived: &DerivedStatistical,
        beta: &DVector<f64>,
        lambda: f64,
        target: Target,
    ) -> Result<BiasVariance> {
        check_lambda(lambda, true)?;
        if derived.dim() != self.dim() || beta.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "design has d = {} but model has d = {} and beta length {}",
                self.dim(),
                derived.dim(),
                beta.len()
            )));
        }
        let weights = self.keep_weights(lambda);
        let bias_vec = match target {
            // Pi beta - (I - Pi) Gamma = Pi beta_stat - Gamma
            Target::Causal => self.shrink(&weights, &derived.beta_stat) - &derived.gamma,
            Target::Statistical => self.shrink(&weights, &derived.beta_stat),
        };
        let bias = quad_form(&bias_vec, &derived.sigma);

        let sigma_v = &derived.sigma * &self.v;
        let mut trace = 0.0;
        for (k, &e) in self.eigenvalues.iter().enumerate() {
            let factor = if lambda == 0.0 { 1.0 / e } else { e / ((e + lambda) * (e + lambda)) };
            trace += factor * self.v.column(k).dot(&sigma_v.column(k));
        }
        let variance = derived.sigma_stat_sq / self.n as f64 * trace;
        Ok(BiasVariance { bias, variance })
    }
}

/// One-shot form of [`DesignSpectrum::bias_variance`].
pub fn conditional_bias_variance(
    x: &DMatrix<f64>,
    derived: &DerivedStatistical,
    beta: &DVector<f64>,
    lambda: f64,
    target: Target,
) -> Result<BiasVariance> {
    DesignSpectrum::new(x)?.bias_variance(derived, beta, lambda, target)
}

/// Irreducible risk of the target distribution.
pub fn risk_constant(derived: &DerivedStatistical, target: Target) -> f64 {
    match target {
        Target::Causal => derived.sigma_stat_sq + derived.gamma_sq_sigma(),
        Target::Statistical => derived.sigma_stat_sq,
    }
}

/// Closed-form causal or statistical risk of a fixed linear predictor.
///
/// A fixed predictor has no variance, so the whole excess `|beta_hat - b|_Sigma^2`
/// is reported as bias, with `b = beta` (causal) or `b = beta_stat`.
pub fn exact_risk(
    beta_hat: &DVector<f64>,
    derived: &DerivedStatistical,
    beta: &DVector<f64>,
    target: Target,
) -> Result<RiskReport> {
    if beta_hat.len() != derived.dim() || beta.len() != derived.dim() {
        return Err(Error::DimensionMismatch(format!(
            "predictor length {} / beta length {} vs model d = {}",
            beta_hat.len(),
            beta.len(),
            derived.dim()
        )));
    }
    let reference = match target {
        Target::Causal => beta,
        Target::Statistical => &derived.beta_stat,
    };
    let excess = quad_form(&(beta_hat - reference), &derived.sigma);
    Ok(RiskReport::decomposed(excess, 0.0, risk_constant(derived, target), Provenance::Exact))
}

/// Empirical mean squared prediction error of `beta_hat` over `m` fresh draws
/// from the target distribution.
pub fn monte_carlo_risk(
    beta_hat: &DVector<f64>,
    params: &CausalModelParams,
    target: Target,
    m: usize,
    seed: u64,
) -> Result<RiskReport> {
    if m < 2 {
        return Err(Error::invalid("m", "at least two draws are needed for a standard error"));
    }
    if beta_hat.len() != params.dim() {
        return Err(Error::DimensionMismatch(format!(
            "predictor length {} vs model d = {}",
            beta_hat.len(),
            params.dim()
        )));
    }
    let data = match target {
        Target::Causal => model::sample_interventional(params, m, seed)?,
        Target::Statistical => model::sample_observational(params, m, seed)?,
    };
    let losses = (&data.x * beta_hat - &data.y).map(|r| r * r);
    let mean = losses.mean();
    let var = losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    let derived = model::derive_statistical(params)?;
    Ok(RiskReport {
        bias: None,
        variance: None,
        constant: risk_constant(&derived, target),
        total: mean,
        stderr: Some((var / m as f64).sqrt()),
        provenance: Provenance::MonteCarlo,
    })
}
