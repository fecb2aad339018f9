//! Optimal statistical and causal ridge regularisation in the proportional
//! limit.
//!
//! The optimal statistical penalty has the closed form `gamma / snr_stat`. The
//! optimal causal penalty is located through the sign of the risk derivative
//!
//! ```text
//! d/dlambda R_C(lambda) = 2 s^2 / phi^{3/2} * g(lambda)
//! g(lambda) = lambda - gamma / snr - (zeta / 2 gamma) (1 + lambda + gamma - sqrt(phi)) phi
//! ```
//!
//! with `phi = (1 + lambda + gamma)^2 - 4 gamma`. The minimiser is `0` when
//! `zeta <= rho(gamma, snr)`, infinite when `zeta >= 1`, and otherwise the
//! unique interior root of `g`, found by bisection.

use std::cmp::Ordering;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::asymptotics::{discriminant, LimitSpec};
use crate::{Error, Result};

/// Lower end of the initial bisection bracket.
pub const LAMBDA_FLOOR: f64 = 1e-12;
/// Required `|g|` at the returned interior root.
pub const ROOT_TOL: f64 = 1e-10;

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive and finite, got {v}")))
    }
}

/// `lambda_S = gamma / snr_stat`.
pub fn optimal_lambda_stat(gamma: f64, snr_stat: f64) -> Result<f64> {
    check_positive("gamma", gamma)?;
    check_positive("snr_stat", snr_stat)?;
    Ok(gamma / snr_stat)
}

/// `(1 + lambda + gamma - sqrt(phi)) phi / (2 gamma)`, rationalised as
/// `2 phi / (1 + lambda + gamma + sqrt(phi))`. Strictly positive for `gamma != 1`
/// or `lambda > 0`.
fn confounding_weight(lambda: f64, gamma: f64) -> f64 {
    let phi = discriminant(lambda, gamma);
    2.0 * phi / (1.0 + lambda + gamma + phi.sqrt())
}

/// The bracketed term `g(lambda)` whose sign is the sign of the causal risk
/// derivative. Also defined at `lambda = 0`.
pub fn critical_point_function(lambda: f64, gamma: f64, snr_stat: f64, zeta: f64) -> f64 {
    lambda - gamma / snr_stat - zeta * confounding_weight(lambda, gamma)
}

/// `f(lambda, gamma, S) = 2 gamma (lambda - gamma / S) / ((1 + lambda + gamma - sqrt(phi)) phi)`:
/// the risk derivative at `lambda` is nonnegative iff `zeta <= f`.
pub fn confounding_threshold(lambda: f64, gamma: f64, snr_stat: f64) -> f64 {
    (lambda - gamma / snr_stat) / confounding_weight(lambda, gamma)
}

/// Derivative of the limiting causal risk with respect to `lambda`.
pub fn risk_derivative(lambda: f64, spec: &LimitSpec) -> Result<f64> {
    check_positive("lambda", lambda)?;
    let s = &spec.summaries;
    let phi = discriminant(lambda, spec.gamma);
    let g = critical_point_function(lambda, spec.gamma, s.snr_stat, s.zeta);
    Ok(2.0 * s.s_sq / phi.powf(1.5) * g)
}

/// `rho(gamma, snr) = -gamma max(1, gamma) / (snr (1 - gamma)^2)`, the infimum
/// of [`confounding_threshold`] over `lambda > 0`; `-inf` at `gamma = 1`.
pub fn rho_threshold(gamma: f64, snr_stat: f64) -> Result<f64> {
    check_positive("gamma", gamma)?;
    check_positive("snr_stat", snr_stat)?;
    if gamma == 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(-gamma * gamma.max(1.0) / (snr_stat * (1.0 - gamma).powi(2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LambdaRegime {
    /// Risk nondecreasing in `lambda`: the min-norm interpolator is optimal.
    Zero,
    Interior,
    /// Risk nonincreasing in `lambda`: the null predictor is optimal.
    Infinite,
}

/// Optimal causal penalty with its regime.
///
/// Serialises as `{"value": float | "inf", "regime": ..., "residual": float | null,
/// "derivative_positive_at_zero": bool}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalLambda {
    #[serde(serialize_with = "ser_extended", deserialize_with = "de_extended")]
    pub value: f64,
    pub regime: LambdaRegime,
    /// `|d/dlambda R_C|` at `value`; interior regime only.
    pub residual: Option<f64>,
    /// The risk derivative at `0+` is positive, so an unconstrained optimum
    /// would lie at a negative penalty.
    pub derivative_positive_at_zero: bool,
}

fn ser_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if *v == f64::INFINITY {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_extended<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Extended {
        Finite(f64),
        Marker(String),
    }
    match Extended::deserialize(d)? {
        Extended::Finite(v) if v >= 0.0 => Ok(v),
        Extended::Finite(v) => Err(serde::de::Error::custom(format!("negative penalty {v}"))),
        Extended::Marker(m) if m == "inf" => Ok(f64::INFINITY),
        Extended::Marker(m) => Err(serde::de::Error::custom(format!("unknown marker `{m}`"))),
    }
}

struct Solution {
    optimum: OptimalLambda,
    /// Final bisection bracket of an interior root.
    bracket: Option<(f64, f64)>,
}

fn solve(spec: &LimitSpec) -> Result<Solution> {
    let s = &spec.summaries;
    let (gamma, snr, zeta) = (spec.gamma, s.snr_stat, s.zeta);
    check_positive("snr_stat", snr)?;
    if !zeta.is_finite() {
        return Err(Error::NonFinite("zeta"));
    }
    let g = |lambda: f64| critical_point_function(lambda, gamma, snr, zeta);
    let positive_at_zero = g(0.0) > 0.0;

    if zeta >= 1.0 {
        return Ok(Solution {
            optimum: OptimalLambda {
                value: f64::INFINITY,
                regime: LambdaRegime::Infinite,
                residual: None,
                derivative_positive_at_zero: positive_at_zero,
            },
            bracket: None,
        });
    }
    let zero = Solution {
        optimum: OptimalLambda {
            value: 0.0,
            regime: LambdaRegime::Zero,
            residual: None,
            derivative_positive_at_zero: positive_at_zero,
        },
        bracket: None,
    };
    if zeta <= rho_threshold(gamma, snr)? {
        return Ok(zero);
    }

    let interior = |lambda: f64, bracket| -> Result<Solution> {
        Ok(Solution {
            optimum: OptimalLambda {
                value: lambda,
                regime: LambdaRegime::Interior,
                residual: Some(risk_derivative(lambda, spec)?.abs()),
                derivative_positive_at_zero: positive_at_zero,
            },
            bracket,
        })
    };

    // g is affine when there is no confounding
    if zeta == 0.0 {
        let lambda = gamma / snr;
        return interior(lambda, Some((lambda, lambda)));
    }

    let mut lo = LAMBDA_FLOOR;
    if g(lo) >= 0.0 {
        if g(0.0) >= 0.0 {
            // zeta sits on the rho boundary up to rounding
            return Ok(zero);
        }
        lo = 0.0;
    }
    let start = (gamma / snr).max(1.0);
    let limit = 1e3 * (start + 1.0 + gamma) / (1.0 - zeta);
    let mut hi = start;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if hi > limit {
            return Err(Error::RootFinding(format!(
                "no sign change of the risk derivative below lambda = {limit:e} \
                 (gamma = {gamma}, snr = {snr}, zeta = {zeta}); regime misclassified"
            )));
        }
    }

    let mut mid = 0.5 * (lo + hi);
    for _ in 0..400 {
        mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * (1.0 + mid) && gm.abs() < ROOT_TOL {
            break;
        }
    }
    if g(mid).abs() >= ROOT_TOL {
        return Err(Error::RootFinding(format!("bisection stalled at lambda = {mid} with |g| = {:e}", g(mid).abs())));
    }
    interior(mid, Some((lo, hi)))
}

/// Optimal causal penalty `argmin_{lambda in [0, inf]} R_C(lambda)`.
pub fn optimal_lambda_caus(spec: &LimitSpec) -> Result<OptimalLambda> {
    Ok(solve(spec)?.optimum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegularizationComparison {
    CausalLess,
    Equal,
    CausalMore,
}

impl RegularizationComparison {
    /// `sign(lambda_C - lambda_S)`.
    pub fn sign(self) -> i8 {
        match self {
            RegularizationComparison::CausalLess => -1,
            RegularizationComparison::Equal => 0,
            RegularizationComparison::CausalMore => 1,
        }
    }
}

/// Orders `lambda_C` against `lambda_S`.
///
/// When `lambda_S` falls inside the final bisection bracket the two penalties
/// are closer than the solver resolution, and the order is read off the sign
/// of `g(lambda_S)` instead: `g` crosses zero upwards at `lambda_C`.
pub fn compare_regularization(spec: &LimitSpec) -> Result<RegularizationComparison> {
    let s = &spec.summaries;
    let lambda_s = optimal_lambda_stat(spec.gamma, s.snr_stat)?;
    let solution = solve(spec)?;
    Ok(match solution.optimum.regime {
        LambdaRegime::Infinite => RegularizationComparison::CausalMore,
        LambdaRegime::Zero => RegularizationComparison::CausalLess,
        LambdaRegime::Interior => {
            let (lo, hi) = solution.bracket.expect("interior roots carry a bracket");
            if lambda_s < lo {
                RegularizationComparison::CausalMore
            } else if lambda_s > hi {
                RegularizationComparison::CausalLess
            } else {
                let g = critical_point_function(lambda_s, spec.gamma, s.snr_stat, s.zeta);
                match g.partial_cmp(&0.0) {
                    Some(Ordering::Less) => RegularizationComparison::CausalMore,
                    Some(Ordering::Greater) => RegularizationComparison::CausalLess,
                    _ => RegularizationComparison::Equal,
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::limiting_ridge;
    use crate::model::ScalarSummaries;
    use crate::Target;

    /// `|beta_stat|^2 = 1`, `sigma_stat^2 = 1 / snr`, confounding `zeta` with
    /// `Gamma` parallel to `beta_stat`.
    fn spec(gamma: f64, snr: f64, zeta: f64) -> LimitSpec {
        let c = 1.0 - zeta;
        let s = ScalarSummaries::from_moments(c * c, zeta * zeta, c * zeta, 1.0 / snr).unwrap();
        LimitSpec::new(gamma, s).unwrap()
    }

    #[test]
    fn statistical_closed_form() {
        assert!((optimal_lambda_stat(1.0, 5.0).unwrap() - 0.2).abs() < 1e-16);
        assert!(optimal_lambda_stat(1e-12, 1.0).unwrap() < 1e-11);
        assert!(optimal_lambda_stat(0.0, 1.0).is_err());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let h = 1e-5;
        for gamma in [0.1, 0.5, 0.9, 1.1, 2.0, 10.0] {
            for lambda in [0.1, 0.5, 1.0, 5.0] {
                let sp = spec(gamma, 1.5, 0.3);
                let r = |l: f64| limiting_ridge(&sp, l, Target::Causal).unwrap().total;
                let fd = (r(lambda + h) - r(lambda - h)) / (2.0 * h);
                let an = risk_derivative(lambda, &sp).unwrap();
                assert!((an - fd).abs() <= 1e-5 * an.abs().max(1e-6), "{gamma} {lambda}: {an} vs {fd}");
            }
        }
    }

    #[test]
    fn unconfounded_derivative_changes_sign_at_lambda_s() {
        let sp = spec(2.0, 4.0, 0.0);
        let lambda_s = 0.5;
        assert!(risk_derivative(lambda_s * 0.999, &sp).unwrap() < 0.0);
        assert!(risk_derivative(lambda_s * 1.001, &sp).unwrap() > 0.0);
        assert_eq!(critical_point_function(lambda_s, 2.0, 4.0, 0.0), 0.0);
    }

    #[test]
    fn fully_confounded_risk_never_increases() {
        for zeta in [1.0, 1.5] {
            let sp = spec(0.5, 1.0, zeta);
            for lambda in [0.01, 0.1, 0.5, 1.0, 5.0, 50.0] {
                assert!(risk_derivative(lambda, &sp).unwrap() <= 0.0);
            }
        }
    }

    #[test]
    fn rho_values() {
        assert!((rho_threshold(0.5, 1.0).unwrap() + 2.0).abs() < 1e-15);
        assert!((rho_threshold(2.0, 1.0).unwrap() + 4.0).abs() < 1e-15);
        assert_eq!(rho_threshold(1.0, 1.0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn unconfounded_optimum_is_lambda_s() {
        let sp = spec(1.5, 2.0, 0.0);
        let opt = optimal_lambda_caus(&sp).unwrap();
        assert_eq!(opt.regime, LambdaRegime::Interior);
        assert_eq!(opt.value, 0.75);
        assert_eq!(compare_regularization(&sp).unwrap(), RegularizationComparison::Equal);
    }

    #[test]
    fn vanishing_gamma_limit() {
        for snr in [0.5, 1.0, 10.0] {
            let opt = optimal_lambda_caus(&spec(1e-8, snr, 0.5)).unwrap();
            assert!((opt.value - 1.0).abs() < 1e-3, "{}", opt.value);
        }
    }

    #[test]
    fn strongly_negative_confounding_is_benign() {
        let sp = spec(0.5, 1.0, -3.0);
        assert!(sp.summaries.snr_caus - sp.summaries.snr_stat >= 2.0);
        let opt = optimal_lambda_caus(&sp).unwrap();
        assert_eq!(opt.regime, LambdaRegime::Zero);
        assert_eq!(opt.value, 0.0);
        assert!(opt.derivative_positive_at_zero);
        assert_eq!(compare_regularization(&sp).unwrap(), RegularizationComparison::CausalLess);
    }

    #[test]
    fn comparison_follows_the_sign_of_zeta() {
        assert_eq!(compare_regularization(&spec(0.5, 1.0, 0.3)).unwrap(), RegularizationComparison::CausalMore);
        assert_eq!(compare_regularization(&spec(1.0, 1.0, -0.3)).unwrap(), RegularizationComparison::CausalLess);
        assert_eq!(compare_regularization(&spec(2.0, 1.0, 1.2)).unwrap(), RegularizationComparison::CausalMore);
    }

    #[test]
    fn interior_residual_is_small() {
        for gamma in [0.3, 0.9, 1.0, 1.1, 3.0] {
            for zeta in [-0.25, 0.25, 0.9, 0.99] {
                let sp = spec(gamma, 1.0, zeta);
                let opt = optimal_lambda_caus(&sp).unwrap();
                if opt.regime == LambdaRegime::Interior {
                    let phi = discriminant(opt.value, gamma);
                    let scale = 2.0 * sp.summaries.s_sq / phi.powf(1.5);
                    assert!(opt.residual.unwrap() <= 1e-8 * scale);
                }
            }
        }
    }

    #[test]
    fn serialises_infinite_marker() {
        let opt = optimal_lambda_caus(&spec(0.5, 1.0, 1.0)).unwrap();
        let json = serde_json::to_string(&opt).unwrap();
        assert_eq!(json, r#"{"value":"inf","regime":"Infinite","residual":null,"derivative_positive_at_zero":false}"#);
        let back: OptimalLambda = serde_json::from_str(&json).unwrap();
        assert_eq!(back, opt);
        assert!(serde_json::from_str::<OptimalLambda>(
            r#"{"value":"nan","regime":"Zero","residual":null,"derivative_positive_at_zero":false}"#
        )
        .is_err());
    }
}
