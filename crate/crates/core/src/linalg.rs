//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;

/// Cholesky factorization of a Hermitian positive-definite matrix.
///
/// If the plain factorization fails, a diagonal jitter of `1e-12 * trace / n`
/// is added once before giving up.
pub fn cholesky(m: CMatrix) -> Result<Cholesky<Complex64, Dyn>> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix to factor".into()));
    }
    let n = m.nrows();
    let trace: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    match Cholesky::new(m.clone()) {
        Some(c) => Ok(c),
        None => {
            let jitter = 1e-12 * trace.abs().max(f64::MIN_POSITIVE) / n.max(1) as f64;
            let mut m = m;
            for i in 0..n {
                m[(i, i)] += Complex64::new(jitter, 0.0);
            }
            Cholesky::new(m).ok_or_else(|| {
                Error::NonFinite("Cholesky factorization of a non-positive-definite matrix".into())
            })
        }
    }
}

/// Natural-log determinant from a Cholesky factor.
pub fn ln_det(chol: &Cholesky<Complex64, Dyn>) -> f64 {
    let l = chol.l_dirty();
    2.0 * (0..l.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>()
}

/// `Â D² Âᴴ + n0 I` for the diagonal weights `c` (so `D = diag(c)`).
pub fn masked_covariance(hhat: &CMatrix, c: &[f64], n0: f64) -> CMatrix {
    let b = hhat.nrows();
    let mut g = hhat.clone();
    for (mut col, &w) in g.column_iter_mut().zip(c) {
        col *= Complex64::new(w, 0.0);
    }
    let mut cov = &g * g.adjoint();
    for i in 0..b {
        cov[(i, i)] += Complex64::new(n0, 0.0);
    }
    cov
}

/// Scales column `u` of `m` by `c[u]`.
pub fn scale_columns(m: &CMatrix, c: &[f64]) -> CMatrix {
    let mut out = m.clone();
    for (mut col, &w) in out.column_iter_mut().zip(c) {
        col *= Complex64::new(w, 0.0);
    }
    out
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
