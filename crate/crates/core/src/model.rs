//! The linearly confounded structural causal model.
//!
//! A latent `z ~ N(0, I_l)` generates the covariates through a mixing map and
//! also enters the response directly:
//!
//! ```text
//! x = M z,        y = x^T beta + z^T alpha + eps,        eps ~ N(0, sigma^2)
//! ```
//!
//! Observationally `y | x ~ N(x^T beta_stat, sigma_stat^2)` with
//! `beta_stat = beta + Gamma`, `Gamma = Sigma^+ M alpha` and
//! `sigma_stat^2 = sigma^2 + |alpha|^2 - |Gamma|_Sigma^2`. Under the
//! intervention `do(x)` the arrow `z -> x` is cut and
//! `y | do(x) ~ N(x^T beta, |alpha|^2 + sigma^2)`.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{quad_form, RankRevealingSvd};
use crate::rng::{self, Rng};
use crate::{format_float, Error, Result};

/// Absolute floor below which the statistical signal counts as zero.
pub const SIGNAL_TOL: f64 = 1e-14;

/// Structural parameters `(M, alpha, beta, sigma^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalModelParams {
    mixing: DMatrix<f64>,
    alpha: DVector<f64>,
    beta: DVector<f64>,
    sigma_sq: f64,
}

impl CausalModelParams {
    pub fn new(mixing: DMatrix<f64>, alpha: DVector<f64>, beta: DVector<f64>, sigma_sq: f64) -> Result<Self> {
        let (d, l) = mixing.shape();
        if d == 0 {
            return Err(Error::invalid("mixing", "covariate dimension must be positive"));
        }
        if l < d {
            return Err(Error::invalid("mixing", format!("latent dimension l = {l} must be at least d = {d}")));
        }
        if alpha.len() != l {
            return Err(Error::DimensionMismatch(format!("alpha has length {} but M has {l} columns", alpha.len())));
        }
        if beta.len() != d {
            return Err(Error::DimensionMismatch(format!("beta has length {} but M has {d} rows", beta.len())));
        }
        if !(sigma_sq > 0.0 && sigma_sq.is_finite()) {
            return Err(Error::invalid("sigma_sq", format!("must be positive and finite, got {sigma_sq}")));
        }
        let all_finite = mixing.iter().chain(alpha.iter()).chain(beta.iter()).all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(Self { mixing, alpha, beta, sigma_sq })
    }

    pub fn mixing(&self) -> &DMatrix<f64> {
        &self.mixing
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    /// Covariate dimension `d`.
    pub fn dim(&self) -> usize {
        self.mixing.nrows()
    }

    /// Latent dimension `l`.
    pub fn latent_dim(&self) -> usize {
        self.mixing.ncols()
    }

    /// Variance of `y - x^T beta` under `do(x)`: `|alpha|^2 + sigma^2`.
    pub fn interventional_noise_var(&self) -> f64 {
        self.alpha.norm_squared() + self.sigma_sq
    }
}

/// Observational quantities entailed by a [`CausalModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedStatistical {
    /// `Cov x = M M^T`.
    pub sigma: DMatrix<f64>,
    /// Confounding parameter `Sigma^+ M alpha`.
    pub gamma: DVector<f64>,
    /// `beta + gamma`.
    pub beta_stat: DVector<f64>,
    pub sigma_stat_sq: f64,
}

impl DerivedStatistical {
    pub fn dim(&self) -> usize {
        self.beta_stat.len()
    }

    /// `|Gamma|_Sigma^2`.
    pub fn gamma_sq_sigma(&self) -> f64 {
        quad_form(&self.gamma, &self.sigma)
    }
}

pub fn derive_statistical(params: &CausalModelParams) -> Result<DerivedStatistical> {
    let m = &params.mixing;
    let sigma = m * m.transpose();
    let m_alpha = m * &params.alpha;
    let gamma = RankRevealingSvd::new(&sigma)?.solve(&m_alpha);
    let beta_stat = &params.beta + &gamma;

    // |alpha|^2 - |Gamma|_Sigma^2 = |(I - M^+ M) alpha|^2, evaluated as a
    // squared norm so it can never go negative through cancellation.
    let row_space_part = RankRevealingSvd::new(m)?.solve(&m_alpha);
    let sigma_stat_sq = params.sigma_sq + (&params.alpha - row_space_part).norm_squared();

    let finite = sigma_stat_sq.is_finite() && gamma.iter().chain(beta_stat.iter()).all(|v| v.is_finite());
    if !finite {
        return Err(Error::NonFinite("derived statistical parameters"));
    }
    Ok(DerivedStatistical { sigma, gamma, beta_stat, sigma_stat_sq })
}

/// Scalar sufficient statistics of the proportional-limit risk formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarSummaries {
    /// `|beta|^2`
    pub r_sq: f64,
    /// `|Gamma|^2`
    pub omega_sq: f64,
    /// `<Gamma, beta>`
    pub eta: f64,
    /// `|beta_stat|^2`
    pub s_sq: f64,
    pub sigma_stat_sq: f64,
    /// Confounding strength `<Gamma, beta_stat> / |beta_stat|^2`.
    pub zeta: f64,
    pub snr_stat: f64,
    pub snr_caus: f64,
    /// `(1 - 2 zeta) snr_stat`, the quantity that decides the min-norm regime.
    pub s_min_norm: f64,
}

impl ScalarSummaries {
    /// Builds the summaries from the four free moments `(r^2, omega^2, eta, sigma_stat^2)`.
    pub fn from_moments(r_sq: f64, omega_sq: f64, eta: f64, sigma_stat_sq: f64) -> Result<Self> {
        for (name, v) in [("r_sq", r_sq), ("omega_sq", omega_sq), ("eta", eta), ("sigma_stat_sq", sigma_stat_sq)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if r_sq < 0.0 || omega_sq < 0.0 {
            return Err(Error::invalid("r_sq/omega_sq", "squared norms must be nonnegative"));
        }
        if !(sigma_stat_sq > 0.0) {
            return Err(Error::invalid("sigma_stat_sq", "must be positive"));
        }
        if eta * eta > r_sq * omega_sq * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::Infeasible(format!(
                "eta^2 = {} exceeds r^2 omega^2 = {} (Cauchy-Schwarz)",
                eta * eta,
                r_sq * omega_sq
            )));
        }
        let s_sq = r_sq + omega_sq + 2.0 * eta;
        if s_sq <= SIGNAL_TOL {
            return Err(Error::ZeroSignal(s_sq));
        }
        let zeta = (omega_sq + eta) / s_sq;
        let snr_stat = s_sq / sigma_stat_sq;
        Ok(Self {
            r_sq,
            omega_sq,
            eta,
            s_sq,
            sigma_stat_sq,
            zeta,
            snr_stat,
            snr_caus: (r_sq + eta) / sigma_stat_sq,
            s_min_norm: (1.0 - 2.0 * zeta) * snr_stat,
        })
    }
}

/// Scalar summaries of a model given its derived quantities and causal `beta`.
pub fn summarize(derived: &DerivedStatistical, beta: &DVector<f64>) -> Result<ScalarSummaries> {
    if beta.len() != derived.dim() {
        return Err(Error::DimensionMismatch(format!(
            "beta has length {} but the model has d = {}",
            beta.len(),
            derived.dim()
        )));
    }
    let s_sq = derived.beta_stat.norm_squared();
    if s_sq <= SIGNAL_TOL {
        return Err(Error::ZeroSignal(s_sq));
    }
    let sigma_stat_sq = derived.sigma_stat_sq;
    if !(sigma_stat_sq > 0.0) {
        return Err(Error::invalid("sigma_stat_sq", "must be positive"));
    }
    let zeta = derived.gamma.dot(&derived.beta_stat) / s_sq;
    let snr_stat = s_sq / sigma_stat_sq;
    Ok(ScalarSummaries {
        r_sq: beta.norm_squared(),
        omega_sq: derived.gamma.norm_squared(),
        eta: derived.gamma.dot(beta),
        s_sq,
        sigma_stat_sq,
        zeta,
        snr_stat,
        snr_caus: beta.dot(&derived.beta_stat) / sigma_stat_sq,
        s_min_norm: (1.0 - 2.0 * zeta) * snr_stat,
    })
}

/// Unit vector orthogonal to `v`: Gram-Schmidt of the first standard basis
/// vector that is not parallel to `v`.
fn orthogonal_direction(v: &DVector<f64>) -> Option<DVector<f64>> {
    let v_hat = v.normalize();
    (0..v.len()).find_map(|k| {
        let mut r = -v_hat[k] * &v_hat;
        r[k] += 1.0;
        // second pass keeps orthogonality at machine precision
        let proj = r.dot(&v_hat);
        r -= proj * &v_hat;
        let norm = r.norm();
        (norm > 1e-6).then(|| r / norm)
    })
}

/// Builds an isotropic (`Sigma = I_d`) model that entails the requested
/// observational distribution `(beta_stat, sigma_stat^2)` and has confounding
/// strength `zeta` and alignment `eta = <Gamma, beta>`.
///
/// The confounding parameter is `Gamma = zeta beta_stat + b u` with `u` a
/// fixed unit vector orthogonal to `beta_stat` and
/// `b = sqrt(omega^2 - zeta^2 s^2)`, `omega^2 = zeta s^2 - eta`. The model is
/// realised with `M = I_d`, `alpha = Gamma` and `sigma^2 = sigma_stat^2`.
pub fn build_isotropic_model(
    beta_stat: &DVector<f64>,
    sigma_stat_sq: f64,
    zeta: f64,
    eta: f64,
) -> Result<CausalModelParams> {
    let d = beta_stat.len();
    if d == 0 {
        return Err(Error::invalid("beta_stat", "dimension must be positive"));
    }
    if !zeta.is_finite() || !eta.is_finite() || beta_stat.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("model construction inputs"));
    }
    let s_sq = beta_stat.norm_squared();
    if s_sq <= SIGNAL_TOL {
        return Err(Error::ZeroSignal(s_sq));
    }
    let omega_sq = zeta * s_sq - eta;
    let parallel_sq = zeta * zeta * s_sq;
    let tol = 1e-12 * s_sq.max(omega_sq.abs()).max(parallel_sq).max(1.0);
    if omega_sq < -tol {
        return Err(Error::Infeasible(format!("omega^2 = zeta s^2 - eta = {omega_sq} is negative")));
    }
    let excess = omega_sq - parallel_sq;
    if excess < -tol {
        return Err(Error::Infeasible(format!(
            "omega^2 = zeta s^2 - eta = {omega_sq} < zeta^2 s^2 = {parallel_sq} (Cauchy-Schwarz)"
        )));
    }

    let mut gamma = zeta * beta_stat;
    if excess > tol {
        let u = orthogonal_direction(beta_stat).ok_or_else(|| {
            Error::Infeasible(format!(
                "omega^2 - zeta^2 s^2 = {excess} > 0 needs a direction orthogonal to beta_stat, \
                 which requires d >= 2"
            ))
        })?;
        gamma += excess.sqrt() * u;
    }
    let beta = beta_stat - &gamma;
    CausalModelParams::new(DMatrix::identity(d, d), gamma, beta, sigma_stat_sq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Observational,
    Interventional,
}

/// `n` samples in the rows of `x` with responses `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub source: Source,
    pub seed: u64,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>, source: Source, seed: u64) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch(format!("X has {} rows but Y has {} entries", x.nrows(), y.len())));
        }
        Ok(Self { x, y, source, seed })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    /// Writes the header `x_1,...,x_d,y` followed by one row per sample.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..=self.dim()).map(|j| format!("x_{j}")).collect();
        header.push("y".into());
        w.write_record(&header)?;
        for i in 0..self.n() {
            let mut row: Vec<String> = self.x.row(i).iter().map(|&v| format_float(v)).collect();
            row.push(format_float(self.y[i]));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses the format written by [`Dataset::write_csv`].
    pub fn read_csv<R: Read>(reader: R, source: Source, seed: u64) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = r.headers()?.clone();
        let cols = header.len();
        if cols < 2 {
            return Err(Error::DimensionMismatch("dataset needs at least one covariate and y".into()));
        }
        let d = cols - 1;
        for (j, name) in header.iter().enumerate() {
            let expected = if j == d { "y".to_owned() } else { format!("x_{}", j + 1) };
            if name != expected {
                return Err(Error::invalid("header", format!("column {j} is `{name}`, expected `{expected}`")));
            }
        }
        let mut values = Vec::new();
        for record in r.records() {
            let record = record?;
            if record.len() != cols {
                return Err(Error::DimensionMismatch(format!("row has {} fields, header has {cols}", record.len())));
            }
            for field in record.iter() {
                let v: f64 =
                    field.trim().parse().map_err(|_| Error::invalid("value", format!("`{field}` is not a number")))?;
                if !v.is_finite() {
                    return Err(Error::NonFinite("dataset entry"));
                }
                values.push(v);
            }
        }
        let n = values.len() / cols;
        let all = DMatrix::from_row_slice(n, cols, &values);
        let x = all.columns(0, d).into_owned();
        let y = all.column(d).into_owned();
        Dataset::new(x, y, source, seed)
    }
}

fn standard_normal_vec(rng: &mut Rng, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

fn sample(params: &CausalModelParams, n: usize, seed: u64, source: Source) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("n", "at least one sample is required"));
    }
    let d = params.dim();
    let l = params.latent_dim();
    let noise_sd = params.sigma_sq.sqrt();
    let mut rng = rng::from_seed(seed);
    let mut x = DMatrix::zeros(n, d);
    let mut y = DVector::zeros(n);
    for i in 0..n {
        let z = standard_normal_vec(&mut rng, l);
        let xi = &params.mixing * &z;
        let confounder = match source {
            Source::Observational => z.dot(&params.alpha),
            Source::Interventional => standard_normal_vec(&mut rng, l).dot(&params.alpha),
        };
        let eps: f64 = rng.sample(StandardNormal);
        y[i] = xi.dot(&params.beta) + confounder + noise_sd * eps;
        x.set_row(i, &xi.transpose());
    }
    Dataset::new(x, y, source, seed)
}

/// `n` i.i.d. draws from the observational joint distribution.
pub fn sample_observational(params: &CausalModelParams, n: usize, seed: u64) -> Result<Dataset> {
    sample(params, n, seed, Source::Observational)
}

/// `n` i.i.d. draws from the interventional joint `p(x) p(y | do(x))`: the
/// covariates follow their observational marginal but the latent entering
/// the response is an independent copy.
pub fn sample_interventional(params: &CausalModelParams, n: usize, seed: u64) -> Result<Dataset> {
    sample(params, n, seed, Source::Interventional)
}

/// Redraws the responses for a fixed design from `Y | X ~ N(X beta_stat, sigma_stat^2 I)`.
pub fn sample_response_given_design(x: &DMatrix<f64>, derived: &DerivedStatistical, seed: u64) -> Result<DVector<f64>> {
    if x.ncols() != derived.dim() {
        return Err(Error::DimensionMismatch(format!(
            "design has {} columns but the model has d = {}",
            x.ncols(),
            derived.dim()
        )));
    }
    let mut rng = rng::from_seed(seed);
    let sd = derived.sigma_stat_sq.sqrt();
    let mean = x * &derived.beta_stat;
    Ok(mean.map(|m| m + sd * rng.sample::<f64, _>(StandardNormal)))
}

/// Isotropic Gaussian design with i.i.d. `N(0, 1)` entries.
pub fn sample_isotropic_design(n: usize, d: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng::from_seed(seed);
    DMatrix::from_fn(n, d, |_, _| rng.sample(StandardNormal))
}

/// Direction of `beta_stat` when only its squared norm is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "e1")]
    E1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaStatSpec {
    Explicit(Vec<f64>),
    Norm { norm_sq: f64, direction: Direction },
}

/// JSON description of an isotropic model with prescribed confounding.
///
/// ```json
/// {"d": 300, "beta_stat": {"norm_sq": 1.0, "direction": "e1"},
///  "sigma_stat_sq": 1.0, "zeta": 0.25, "eta": 0.0}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub d: usize,
    pub beta_stat: BetaStatSpec,
    pub sigma_stat_sq: f64,
    pub zeta: f64,
    pub eta: f64,
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::invalid("d", "must be positive"));
        }
        match &self.beta_stat {
            BetaStatSpec::Explicit(v) => {
                if v.len() != self.d {
                    return Err(Error::DimensionMismatch(format!(
                        "beta_stat has {} entries but d = {}",
                        v.len(),
                        self.d
                    )));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite("beta_stat"));
                }
            }
            BetaStatSpec::Norm { norm_sq, .. } => {
                if !(norm_sq.is_finite() && *norm_sq > 0.0) {
                    return Err(Error::invalid("beta_stat.norm_sq", "must be positive and finite"));
                }
            }
        }
        if !(self.sigma_stat_sq.is_finite() && self.sigma_stat_sq > 0.0) {
            return Err(Error::invalid("sigma_stat_sq", "must be positive and finite"));
        }
        if !self.zeta.is_finite() || !self.eta.is_finite() {
            return Err(Error::NonFinite("zeta/eta"));
        }
        Ok(())
    }

    pub fn beta_stat_vector(&self) -> DVector<f64> {
        match &self.beta_stat {
            BetaStatSpec::Explicit(v) => DVector::from_column_slice(v),
            BetaStatSpec::Norm { norm_sq, direction: Direction::E1 } => {
                let mut v = DVector::zeros(self.d);
                v[0] = norm_sq.sqrt();
                v
            }
        }
    }

    /// Same model at another covariate dimension. Only norm-specified
    /// `beta_stat` can be resized.
    pub fn at_dimension(&self, d: usize) -> Result<Self> {
        if d == self.d {
            return Ok(self.clone());
        }
        match self.beta_stat {
            BetaStatSpec::Explicit(_) => Err(Error::DimensionMismatch(format!(
                "explicit beta_stat has dimension {} and cannot be resized to {d}",
                self.d
            ))),
            BetaStatSpec::Norm { .. } => {
                let spec = Self { d, ..self.clone() };
                spec.validate()?;
                Ok(spec)
            }
        }
    }

    /// Summaries implied by the spec's scalars, free of the rounding the
    /// realised model picks up. Feasibility is checked only through the
    /// moments; [`ModelSpec::build`] gives the more specific error.
    pub fn summaries(&self) -> Result<ScalarSummaries> {
        self.validate()?;
        let s_sq = match &self.beta_stat {
            BetaStatSpec::Norm { norm_sq, .. } => *norm_sq,
            BetaStatSpec::Explicit(v) => v.iter().map(|x| x * x).sum(),
        };
        let omega_sq = self.zeta * s_sq - self.eta;
        ScalarSummaries::from_moments(s_sq - omega_sq - 2.0 * self.eta, omega_sq, self.eta, self.sigma_stat_sq)
    }

    pub fn build(&self) -> Result<CausalModelParams> {
        self.validate()?;
        build_isotropic_model(&self.beta_stat_vector(), self.sigma_stat_sq, self.zeta, self.eta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn spec_summaries_agree_with_the_realised_model() {
        let spec = ModelSpec::from_json(
            r#"{"d": 7, "beta_stat": {"norm_sq": 2.0, "direction": "e1"}, "sigma_stat_sq": 0.5, "zeta": 0.3, "eta": -0.1}"#,
        )
        .unwrap();
        let exact = spec.summaries().unwrap();
        let p = spec.build().unwrap();
        let realised = summarize(&derive_statistical(&p).unwrap(), p.beta()).unwrap();
        for (a, b) in [
            (exact.r_sq, realised.r_sq),
            (exact.omega_sq, realised.omega_sq),
            (exact.eta, realised.eta),
            (exact.zeta, realised.zeta),
            (exact.snr_caus, realised.snr_caus),
        ] {
            assert!((a - b).abs() < 1e-14);
        }
        let half = ModelSpec { zeta: 0.5, eta: 0.0, ..spec };
        assert_eq!(half.summaries().unwrap().omega_sq, 1.0);
    }

    #[test]
    fn unconfounded_identity_mixing() {
        let beta = dvector![1.0, -2.0, 0.5];
        let p = CausalModelParams::new(DMatrix::identity(3, 3), DVector::zeros(3), beta.clone(), 1.0).unwrap();
        let d = derive_statistical(&p).unwrap();
        assert!(d.gamma.norm() < 1e-15);
        assert!((&d.beta_stat - &beta).norm() < 1e-15);
        assert!((d.sigma_stat_sq - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_mixing_moves_alpha_into_gamma() {
        let a = dvector![0.3, 0.1, -0.7];
        let beta = dvector![1.0, 0.0, 2.0];
        let p = CausalModelParams::new(DMatrix::identity(3, 3), a.clone(), beta.clone(), 1.0).unwrap();
        let d = derive_statistical(&p).unwrap();
        assert!((&d.gamma - &a).norm() < 1e-14);
        assert!((&d.beta_stat - (&beta + &a)).norm() < 1e-14);
        assert!((d.sigma_stat_sq - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hand_evaluated_one_dimensional_model() {
        let p = CausalModelParams::new(dmatrix![1.0, 0.0], dvector![0.6, 0.8], dvector![1.0], 0.5).unwrap();
        let d = derive_statistical(&p).unwrap();
        assert!((d.sigma[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((d.gamma[0] - 0.6).abs() < 1e-14);
        assert!((d.beta_stat[0] - 1.6).abs() < 1e-14);
        assert!((d.sigma_stat_sq - 1.14).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_params() {
        let m = DMatrix::identity(2, 2);
        assert!(CausalModelParams::new(m.clone(), DVector::zeros(2), DVector::zeros(2), 0.0).is_err());
        assert!(CausalModelParams::new(dmatrix![1.0; 1.0], DVector::zeros(1), DVector::zeros(2), 1.0).is_err());
        assert!(CausalModelParams::new(m, dvector![f64::NAN, 0.0], DVector::zeros(2), 1.0).is_err());
    }

    #[test]
    fn summarize_unconfounded_and_pure_confounding() {
        let bs = dvector![1.0, 1.0];
        let p = build_isotropic_model(&bs, 2.0, 0.0, 0.0).unwrap();
        let s = summarize(&derive_statistical(&p).unwrap(), p.beta()).unwrap();
        assert_eq!(s.zeta, 0.0);
        assert!((s.snr_caus - s.snr_stat).abs() < 1e-15);
        assert!((s.s_min_norm - s.snr_stat).abs() < 1e-15);

        let p = build_isotropic_model(&bs, 2.0, 1.0, 0.0).unwrap();
        assert!(p.beta().norm() < 1e-15);
        let s = summarize(&derive_statistical(&p).unwrap(), p.beta()).unwrap();
        assert!((s.zeta - 1.0).abs() < 1e-15);
        assert!(s.snr_caus.abs() < 1e-15);
    }

    #[test]
    fn summarize_direct_zeta() {
        // s^2 = 1 and <Gamma, beta_stat> = 0.4
        let derived = DerivedStatistical {
            sigma: DMatrix::identity(2, 2),
            gamma: dvector![0.4, 0.3],
            beta_stat: dvector![1.0, 0.0],
            sigma_stat_sq: 1.0,
        };
        let beta = &derived.beta_stat - &derived.gamma;
        let s = summarize(&derived, &beta).unwrap();
        assert!((s.zeta - 0.4).abs() < 1e-15);
    }

    #[test]
    fn summarize_rejects_zero_signal() {
        let derived = DerivedStatistical {
            sigma: DMatrix::identity(2, 2),
            gamma: dvector![1.0, 0.0],
            beta_stat: DVector::zeros(2),
            sigma_stat_sq: 1.0,
        };
        assert!(matches!(summarize(&derived, &dvector![-1.0, 0.0]), Err(Error::ZeroSignal(_))));
    }

    #[test]
    fn family_members() {
        let bs = dvector![1.0, 0.0, 0.0];
        let p = build_isotropic_model(&bs, 1.5, 0.0, 0.0).unwrap();
        assert_eq!(p.alpha().norm(), 0.0);
        assert_eq!(p.beta(), &bs);
        assert_eq!(p.sigma_sq(), 1.5);

        let p = build_isotropic_model(&bs, 1.0, 1.0, 0.0).unwrap();
        assert!((p.alpha() - &bs).norm() < 1e-15);
        assert!(p.beta().norm() < 1e-15);
    }

    #[test]
    fn family_round_trip_half_confounded() {
        let bs = dvector![1.0, 0.0];
        let p = build_isotropic_model(&bs, 1.0, 0.5, 0.0).unwrap();
        // omega^2 = 0.5 and b = 0.5
        let gamma = p.alpha();
        assert!((gamma.norm_squared() - 0.5).abs() < 1e-12);
        assert!((gamma[1].abs() - 0.5).abs() < 1e-12);
        let s = summarize(&derive_statistical(&p).unwrap(), p.beta()).unwrap();
        assert!((s.zeta - 0.5).abs() < 1e-12);
        assert!(s.eta.abs() < 1e-12);
    }

    #[test]
    fn family_rejects_infeasible_pairs() {
        let bs = dvector![1.0, 0.0];
        let err = build_isotropic_model(&bs, 1.0, 0.9, 0.85).unwrap_err();
        assert!(err.to_string().contains("Cauchy-Schwarz"), "{err}");
        let err = build_isotropic_model(&bs, 1.0, -0.5, 0.0).unwrap_err();
        assert!(err.to_string().contains("negative"), "{err}");
        // orthogonal component requested in one dimension
        assert!(build_isotropic_model(&dvector![1.0], 1.0, 0.5, 0.0).is_err());
        // but the parallel member exists in one dimension
        assert!(build_isotropic_model(&dvector![1.0], 1.0, 0.5, 0.25).is_ok());
    }

    #[test]
    fn orthogonal_direction_skips_parallel_basis_vectors() {
        let u = orthogonal_direction(&dvector![3.0, 0.0, 0.0]).unwrap();
        assert_eq!(u, dvector![0.0, 1.0, 0.0]);
        let u = orthogonal_direction(&dvector![1.0, 1.0]).unwrap();
        assert!(u.dot(&dvector![1.0, 1.0]).abs() < 1e-15);
        assert!((u.norm() - 1.0).abs() < 1e-15);
        assert!(orthogonal_direction(&dvector![2.0]).is_none());
    }

    #[test]
    fn zero_samples_rejected() {
        let p = build_isotropic_model(&dvector![1.0, 0.0], 1.0, 0.0, 0.0).unwrap();
        assert!(sample_observational(&p, 0, 1).is_err());
        assert!(sample_interventional(&p, 0, 1).is_err());
    }

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let p = build_isotropic_model(&dvector![1.0, 0.5], 1.0, 0.3, 0.0).unwrap();
        let a = sample_observational(&p, 20, 7).unwrap();
        let b = sample_observational(&p, 20, 7).unwrap();
        let c = sample_observational(&p, 20, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.y, c.y);
    }

    #[test]
    fn noiseless_unconfounded_samples_follow_the_regression() {
        let beta = dvector![1.0, -1.0, 2.0];
        let p = CausalModelParams::new(DMatrix::identity(3, 3), DVector::zeros(3), beta.clone(), 1e-12).unwrap();
        let data = sample_observational(&p, 50, 3).unwrap();
        let fitted = &data.x * &beta;
        for (y, f) in data.y.iter().zip(fitted.iter()) {
            assert!((y - f).abs() < 1e-4);
        }
    }

    #[test]
    fn without_confounding_both_samplers_share_the_covariate_law() {
        let beta = dvector![1.0, 2.0];
        let p = CausalModelParams::new(DMatrix::identity(2, 2), DVector::zeros(2), beta, 1.0).unwrap();
        let obs = sample_observational(&p, 10, 5).unwrap();
        let int = sample_interventional(&p, 10, 5).unwrap();
        // the interventional stream interleaves an extra latent draw, so only
        // the first row's covariates coincide
        assert_eq!(obs.x.row(0), int.x.row(0));
    }

    #[test]
    fn csv_round_trip() {
        let p = build_isotropic_model(&dvector![1.0, 0.5], 1.0, 0.3, 0.0).unwrap();
        let data = sample_observational(&p, 5, 11).unwrap();
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x_1,x_2,y\n"));
        let back = Dataset::read_csv(buf.as_slice(), Source::Observational, 11).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn csv_rejects_bad_header() {
        let text = "a,b\n1,2\n";
        assert!(Dataset::read_csv(text.as_bytes(), Source::Observational, 0).is_err());
    }

    #[test]
    fn model_spec_variants() {
        let spec = ModelSpec::from_json(
            r#"{"d": 3, "beta_stat": {"norm_sq": 4.0, "direction": "e1"}, "sigma_stat_sq": 1.0, "zeta": 0.5, "eta": 0.0}"#,
        )
        .unwrap();
        assert_eq!(spec.beta_stat_vector(), dvector![2.0, 0.0, 0.0]);
        let spec =
            ModelSpec::from_json(r#"{"d": 2, "beta_stat": [1.0, 1.0], "sigma_stat_sq": 1.0, "zeta": 0.0, "eta": 0.0}"#)
                .unwrap();
        assert_eq!(spec.beta_stat_vector(), dvector![1.0, 1.0]);
        assert!(spec.at_dimension(5).is_err());

        let bad = [
            r#"{"d": 2, "beta_stat": [1.0], "sigma_stat_sq": 1.0, "zeta": 0.0, "eta": 0.0}"#,
            r#"{"d": 2, "beta_stat": [1.0, 0.0], "sigma_stat_sq": 0.0, "zeta": 0.0, "eta": 0.0}"#,
            r#"{"d": 2, "beta_stat": {"norm_sq": 1.0, "direction": "e2"}, "sigma_stat_sq": 1.0, "zeta": 0.0, "eta": 0.0}"#,
            r#"{"d": 2, "beta_stat": [1.0, 0.0], "sigma_stat_sq": 1.0, "zeta": 0.0, "eta": 0.0, "extra": 1}"#,
            r#"{"d": 0, "beta_stat": [], "sigma_stat_sq": 1.0, "zeta": 0.0, "eta": 0.0}"#,
        ];
        for text in bad {
            assert!(ModelSpec::from_json(text).is_err(), "{text}");
        }
    }
}
