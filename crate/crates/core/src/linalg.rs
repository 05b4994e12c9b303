//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.min()
}

/// `(min, max)` singular values.
pub fn singular_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    let sv = m.clone().svd(false, false).singular_values;
    (sv.min(), sv.max())
}

/// Inverse, refusing matrices whose smallest singular value is below
/// `rel_tol * ||m||`.
pub fn checked_inverse(m: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    let (lo, hi) = singular_extremes(m);
    if !(lo > rel_tol * hi) {
        return Err(Error::SingularSystem { min_sv: lo });
    }
    m.clone().lu().try_inverse().ok_or(Error::SingularSystem { min_sv: lo })
}

/// Inverse via LU without a conditioning check (for hot loops after a
/// membership test has been done).
pub fn lu_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone().lu().try_inverse().ok_or(Error::SingularSystem { min_sv: 0.0 })
}

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

/// Right singular vector of the smallest singular value.
pub fn null_vector(m: &DMatrix<f64>) -> (f64, nalgebra::DVector<f64>) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let (imin, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc });
    (smin, v_t.row(imin).transpose())
}
