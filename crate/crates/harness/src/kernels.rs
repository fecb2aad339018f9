//! Numerical kernels routed through one place so the check suite can inject
//! a relative perturbation into any of them and confirm that some check
//! notices.

use std::fmt;
use std::str::FromStr;

use confounded_ridge::asymptotics::{mp_m, mp_m_prime, ridge_terms_from_transform, LimitSpec};
use confounded_ridge::estimators::RiskReport;
use confounded_ridge::optimal_reg;
use confounded_ridge::{Result, Target};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelName {
    M,
    MPrime,
    RiskDerivative,
}

impl KernelName {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelName::M => "m",
            KernelName::MPrime => "m_prime",
            KernelName::RiskDerivative => "risk_derivative",
        }
    }
}

impl fmt::Display for KernelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "m" => Ok(KernelName::M),
            "m_prime" => Ok(KernelName::MPrime),
            "risk_derivative" => Ok(KernelName::RiskDerivative),
            other => Err(format!("unknown kernel {other:?}; expected m, m_prime or risk_derivative")),
        }
    }
}

/// Multiplies one kernel's output by `1 + eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub kernel: KernelName,
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Kernels {
    pub perturbation: Option<Perturbation>,
}

impl Kernels {
    pub fn perturbed(perturbation: Perturbation) -> Self {
        Self { perturbation: Some(perturbation) }
    }

    fn scale(&self, kernel: KernelName) -> f64 {
        match self.perturbation {
            Some(p) if p.kernel == kernel => 1.0 + p.eps,
            _ => 1.0,
        }
    }

    pub fn m(&self, lambda: f64, gamma: f64) -> f64 {
        mp_m(lambda, gamma) * self.scale(KernelName::M)
    }

    pub fn m_prime(&self, lambda: f64, gamma: f64) -> f64 {
        mp_m_prime(lambda, gamma) * self.scale(KernelName::MPrime)
    }

    pub fn risk_derivative(&self, lambda: f64, spec: &LimitSpec) -> Result<f64> {
        Ok(optimal_reg::risk_derivative(lambda, spec)? * self.scale(KernelName::RiskDerivative))
    }

    /// Limiting ridge risk built from the (possibly perturbed) transform.
    pub fn limiting_ridge(&self, spec: &LimitSpec, lambda: f64, target: Target) -> RiskReport {
        let m = self.m(lambda, spec.gamma);
        let m_prime = self.m_prime(lambda, spec.gamma);
        ridge_terms_from_transform(spec, lambda, m, m_prime, target)
    }
}
