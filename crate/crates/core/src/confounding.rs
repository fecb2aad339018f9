//! Confounding-strength measures and the regimes of the min-norm interpolator.

use serde::{Deserialize, Serialize};

use crate::model::{ScalarSummaries, SIGNAL_TOL};
use crate::{Error, Result};

/// `zeta = <Gamma, beta_stat> / |beta_stat|^2 = (omega^2 + eta) / s^2`.
///
/// `zeta >= 1` means the causal signal `<beta, beta_stat>` is non-positive,
/// `zeta <= 0` means it dominates the statistical signal.
pub fn confounding_strength(s: &ScalarSummaries) -> Result<f64> {
    if !(s.s_sq > SIGNAL_TOL) {
        return Err(Error::ZeroSignal(s.s_sq));
    }
    Ok((s.omega_sq + s.eta) / s.s_sq)
}

/// Length-based measure `|Gamma|^2 / (|Gamma|^2 + |beta|^2)`, in `[0, 1]`.
pub fn structural_confounding(s: &ScalarSummaries) -> Result<f64> {
    let total = s.r_sq + s.omega_sq;
    if !(total > 0.0) {
        return Err(Error::DegenerateModel);
    }
    Ok(s.omega_sq / total)
}

/// Whether the min-norm interpolator can beat the null predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinNormRegime {
    /// `S > 1`: beats the null risk for some gamma on both sides of 1.
    BeatsNullBothRegimes,
    /// `0 <= S <= 1`: only underparameterised fits can beat the null risk.
    BeatsNullUnderOnly,
    /// `S < 0`: the interpolator fits the confounding and never wins.
    NeverBeatsNull,
}

impl MinNormRegime {
    pub fn label(self) -> &'static str {
        match self {
            MinNormRegime::BeatsNullBothRegimes => "beats_null_both_regimes",
            MinNormRegime::BeatsNullUnderOnly => "beats_null_under_only",
            MinNormRegime::NeverBeatsNull => "never_beats_null",
        }
    }
}

/// Classifies by `S = (1 - 2 zeta) snr_stat`; both boundaries `S = 0` and
/// `S = 1` belong to the middle regime.
pub fn min_norm_regime(s: &ScalarSummaries) -> MinNormRegime {
    regime_for_signal(s.s_min_norm)
}

pub fn regime_for_signal(s_min_norm: f64) -> MinNormRegime {
    if s_min_norm > 1.0 {
        MinNormRegime::BeatsNullBothRegimes
    } else if s_min_norm >= 0.0 {
        MinNormRegime::BeatsNullUnderOnly
    } else {
        MinNormRegime::NeverBeatsNull
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Summaries of `beta = c beta_stat` (so `Gamma = (1 - c) beta_stat`) with `|beta_stat| = 1`.
    fn scaled(c: f64, sigma: f64) -> ScalarSummaries {
        let g = 1.0 - c;
        ScalarSummaries::from_moments(c * c, g * g, c * g, sigma).unwrap()
    }

    #[test]
    fn strength_examples() {
        assert_eq!(confounding_strength(&scaled(1.0, 1.0)).unwrap(), 0.0);
        assert!((confounding_strength(&scaled(0.5, 1.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!((confounding_strength(&scaled(2.0, 1.0)).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn structural_examples() {
        assert_eq!(structural_confounding(&scaled(1.0, 1.0)).unwrap(), 0.0);
        assert_eq!(structural_confounding(&scaled(0.0, 1.0)).unwrap(), 1.0);
        let s = ScalarSummaries::from_moments(0.7, 0.3, 0.0, 1.0).unwrap();
        assert!((structural_confounding(&s).unwrap() - confounding_strength(&s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn regime_examples() {
        let with = |zeta: f64, snr: f64| {
            // r^2 + omega^2 = s^2 = snr at eta = 0 with sigma = 1
            ScalarSummaries::from_moments((1.0 - zeta) * snr, zeta * snr, 0.0, 1.0).unwrap()
        };
        assert_eq!(min_norm_regime(&with(0.0, 2.0)), MinNormRegime::BeatsNullBothRegimes);
        assert_eq!(min_norm_regime(&with(0.4, 1.0)), MinNormRegime::BeatsNullUnderOnly);
        assert_eq!(min_norm_regime(&with(0.6, 1.0)), MinNormRegime::NeverBeatsNull);
    }

    #[test]
    fn regime_boundaries_are_closed_in_the_middle() {
        assert_eq!(regime_for_signal(1.0), MinNormRegime::BeatsNullUnderOnly);
        assert_eq!(regime_for_signal(0.0), MinNormRegime::BeatsNullUnderOnly);
        assert_eq!(regime_for_signal(1.0 + 1e-12), MinNormRegime::BeatsNullBothRegimes);
        assert_eq!(regime_for_signal(-1e-12), MinNormRegime::NeverBeatsNull);
    }

    #[test]
    fn degenerate_inputs() {
        let s = ScalarSummaries {
            r_sq: 0.0,
            omega_sq: 0.0,
            eta: 0.0,
            s_sq: 0.0,
            sigma_stat_sq: 1.0,
            zeta: 0.0,
            snr_stat: 0.0,
            snr_caus: 0.0,
            s_min_norm: 0.0,
        };
        assert!(confounding_strength(&s).is_err());
        assert!(structural_confounding(&s).is_err());
    }
}
