//! Linear regression under hidden linear confounding.
//!
//! The crate models a linear structural causal model in which a latent
//! Gaussian vector drives both the covariates and the response, and studies
//! how ridge and min-norm regressors fitted on observational data generalise
//! to the interventional distribution. It provides:
//!
//! * [`model`]: the structural model, its entailed observational quantities,
//!   a constructor for models with prescribed confounding strength, and
//!   samplers for both distributions.
//! * [`estimators`]: finite-sample ridge / min-norm fits, their exact
//!   conditional bias-variance decomposition and exact or Monte Carlo risks.
//! * [`asymptotics`]: closed-form proportional-limit risks built on the
//!   Marchenko-Pastur Stieltjes transform.
//! * [`confounding`]: confounding-strength measures and min-norm regimes.
//! * [`optimal_reg`]: optimal statistical and causal regularisation.

// `!(x > 0.0)` guards are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod confounding;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod model;
pub mod optimal_reg;
pub mod rng;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Which conditional distribution a risk is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `y | do(x)`: the interventional conditional.
    Causal,
    /// `y | x`: the observational conditional.
    Statistical,
}

impl Target {
    pub const BOTH: [Target; 2] = [Target::Causal, Target::Statistical];
}

/// Formats a float with 17 significant digits, the precision used in every
/// CSV and report this crate writes.
pub fn format_float(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else if value.is_nan() {
        "nan".to_owned()
    } else if value > 0.0 {
        "inf".to_owned()
    } else {
        "-inf".to_owned()
    }
}
