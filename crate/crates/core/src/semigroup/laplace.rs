//! `C_q(A)^{.k} x = 1/(k-1)! int_0^inf T(t) (t^{k-1} e^{-tq} x) dt`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::contour::weighted_sum;
use crate::algebra::{phi, Multivector, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::operator::{RealEmbedding, RightLinearOperator};
use crate::quad::GaussLegendre;

/// Growth data `||T(t)|| <= M e^{wt}` and quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LaplaceSpec {
    pub omega: f64,
    pub m_bound: f64,
    pub tol: f64,
    pub order: usize,
    pub max_levels: u32,
}

impl Default for LaplaceSpec {
    fn default() -> Self {
        Self { omega: 0.0, m_bound: 1.0, tol: 1e-10, order: 16, max_levels: 6 }
    }
}

/// `int_T^inf t^{k-1} e^{-ct} / (k-1)! dt = e^{-cT} sum_{i<k} T^i / (i! c^{k-i})`.
fn gamma_tail(c: f64, k: u32, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0 / libm::pow(c, k as f64);
    for i in 0..k {
        if i > 0 {
            term *= t * c / i as f64;
        }
        sum += term;
    }
    libm::exp(-c * t) * sum
}

/// Quadrature of `t -> T(t) o L_{t^{k-1} e^{-tq} / (k-1)!}` on `[0, T_max]`.
///
/// The scalar `e^{-tq}` multiplies the argument before `T(t)` is applied.
/// The integral is truncated where the tail bound
/// `M int_T^inf t^{k-1} e^{(w - Re q)t} dt / (k-1)!` drops below
/// `tol / 10` of the bound `M / (Re q - w)^k` on the result.
pub fn laplace_transform<T>(
    a: &RightLinearOperator,
    q: &Multivector,
    k: u32,
    mut t_provider: T,
    spec: &LaplaceSpec,
) -> Result<RealEmbedding>
where
    T: FnMut(f64) -> Result<RealEmbedding>,
{
    if k == 0 {
        return Err(Error::InvalidParameter("power k must be at least 1".into()));
    }
    if q.n() != a.n() {
        return Err(Error::SignatureMismatch { left: a.n(), right: q.n() });
    }
    let d = q.cone_decompose(DEFAULT_TOL)?;
    let c = d.r - spec.omega;
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "Re q = {} must exceed the growth bound {}",
            d.r,
            spec.omega
        )));
    }
    let target = 0.1 * spec.tol / libm::pow(c, k as f64);
    let mut t_end = 1.0 / c;
    while gamma_tail(c, k, t_end) > target {
        t_end *= 1.25;
    }
    let t_max = libm::pow(2.0, libm::ceil(libm::log2(t_end)));
    let nu = q.euclid_norm() + a.norm_upper();
    let h = libm::pow(2.0, libm::floor(libm::log2((0.25 * t_max).min(2.0 * PI / nu))));
    let panels = libm::round(t_max / h) as usize;

    let gl = GaussLegendre::new(spec.order);
    let (n, m) = (a.n(), a.m());
    let mut fact = 1.0;
    for i in 1..k {
        fact *= i as f64;
    }
    let weight = |t: f64| -> Multivector {
        let s = libm::pow(t, (k - 1) as f64) / fact;
        match &d.axis {
            Some(j) => phi(j, (Complex64::new(-d.r, -d.s) * t).exp()).scale(s),
            None => Multivector::scalar(n, s * libm::exp(-d.r * t)),
        }
    };
    let mut prev: Option<RealEmbedding> = None;
    let mut est = f64::INFINITY;
    for level in 0..=spec.max_levels {
        let nodes = gl.composite(0.0, t_max, panels << level);
        let mut fs = Vec::with_capacity(nodes.len());
        let mut cs = Vec::with_capacity(nodes.len());
        for (t, w) in nodes {
            fs.push(t_provider(t)?);
            cs.push(weight(t).scale(w));
        }
        let cur = weighted_sum(&fs, &cs, n, m);
        if let Some(p) = &prev {
            est = cur.sub(p).frobenius();
            let scale = cur.frobenius().max(1e-3 * spec.m_bound / libm::pow(c, k as f64));
            if est <= spec.tol * scale {
                return Ok(cur);
            }
        }
        prev = Some(cur);
    }
    Err(Error::Quadrature { tol: spec.tol, estimate: est })
}
