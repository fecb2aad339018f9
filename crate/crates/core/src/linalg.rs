//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Singular values below `PINV_RTOL * sigma_max` are treated as zero by every
/// pseudo-inverse and projector in the crate.
pub const PINV_RTOL: f64 = 1e-10;

/// Thin singular value decomposition `A = U diag(s) V^T` truncated to the
/// numerical rank.
#[derive(Debug, Clone)]
pub struct RankRevealingSvd {
    /// `n x r` left singular vectors.
    pub u: DMatrix<f64>,
    /// Retained singular values, descending.
    pub singular_values: DVector<f64>,
    /// `d x r` right singular vectors.
    pub v: DMatrix<f64>,
}

impl RankRevealingSvd {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("SVD input"));
        }
        let svd = a.clone().svd(true, true);
        let u = svd.u.expect("u requested");
        let v_t = svd.v_t.expect("v_t requested");
        let s = svd.singular_values;

        let s_max = s.iter().cloned().fold(0.0_f64, f64::max);
        let cutoff = PINV_RTOL * s_max;
        let mut keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > cutoff && s[i] > 0.0).collect();
        keep.sort_by(|&i, &j| s[j].total_cmp(&s[i]));

        let r = keep.len();
        let mut u_r = DMatrix::zeros(a.nrows(), r);
        let mut v_r = DMatrix::zeros(a.ncols(), r);
        let mut s_r = DVector::zeros(r);
        for (k, &i) in keep.iter().enumerate() {
            u_r.set_column(k, &u.column(i));
            v_r.set_column(k, &v_t.row(i).transpose());
            s_r[k] = s[i];
        }
        Ok(Self { u: u_r, singular_values: s_r, v: v_r })
    }

    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// `A^+ b`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut coeffs = self.u.tr_mul(b);
        for (c, s) in coeffs.iter_mut().zip(self.singular_values.iter()) {
            *c /= s;
        }
        &self.v * coeffs
    }

    /// The Moore-Penrose pseudo-inverse `A^+` (`d x n`).
    pub fn pseudo_inverse(&self) -> DMatrix<f64> {
        let mut v_scaled = self.v.clone();
        for (k, s) in self.singular_values.iter().enumerate() {
            v_scaled.column_mut(k).scale_mut(1.0 / s);
        }
        v_scaled * self.u.transpose()
    }
}

/// Moore-Penrose pseudo-inverse with the crate-wide relative cutoff.
pub fn pinv(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(RankRevealingSvd::new(a)?.pseudo_inverse())
}

/// `v^T S v`.
pub fn quad_form(v: &DVector<f64>, s: &DMatrix<f64>) -> f64 {
    (s * v).dot(v)
}

/// Eigenvalues of the sample covariance `X^T X / n`, all `d` of them in
/// ascending order.
///
/// Works on the smaller of the two Gram matrices, so that wide designs only
/// cost an `n x n` eigenproblem; the remaining `d - n` eigenvalues are zero.
pub fn sample_covariance_spectrum(x: &DMatrix<f64>) -> Vec<f64> {
    let (n, d) = x.shape();
    // explicit transposes route both products through the blocked GEMM kernel
    let gram = if n >= d { x.transpose() * x } else { x * x.transpose() };
    let mut eig: Vec<f64> = gram.symmetric_eigenvalues().iter().map(|e| (e / n as f64).max(0.0)).collect();
    eig.resize(d, 0.0);
    eig.sort_by(f64::total_cmp);
    eig
}
