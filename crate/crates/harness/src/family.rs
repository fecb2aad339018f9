//! Scalar summaries for the isotropic family at a requested confounding strength.

use confounded_ridge::model::ScalarSummaries;
use confounded_ridge::Result;

/// Summaries with `|beta_stat|^2 = s_sq` and strength `zeta`, using
/// `preferred_eta` when that is feasible and otherwise falling back to
/// [`parallel`], which is feasible for every `zeta`.
pub fn summaries(s_sq: f64, sigma_stat_sq: f64, zeta: f64, preferred_eta: f64) -> Result<ScalarSummaries> {
    let at = |eta: f64| {
        let omega_sq = zeta * s_sq - eta;
        ScalarSummaries::from_moments(s_sq - omega_sq - 2.0 * eta, omega_sq, eta, sigma_stat_sq)
    };
    // the isotropic construction needs omega^2 >= zeta^2 s^2 on top of Cauchy-Schwarz
    let omega_sq = zeta * s_sq - preferred_eta;
    if omega_sq >= zeta * zeta * s_sq {
        if let Ok(s) = at(preferred_eta) {
            return Ok(s);
        }
    }
    parallel(s_sq, sigma_stat_sq, zeta)
}

/// `Gamma = zeta beta_stat`.
pub fn parallel(s_sq: f64, sigma_stat_sq: f64, zeta: f64) -> Result<ScalarSummaries> {
    ScalarSummaries::from_moments(
        (1.0 - zeta).powi(2) * s_sq,
        zeta * zeta * s_sq,
        zeta * (1.0 - zeta) * s_sq,
        sigma_stat_sq,
    )
}
