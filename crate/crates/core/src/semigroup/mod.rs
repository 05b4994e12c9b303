//! Semigroups generated by bounded right-linear operators: the exponential
//! series, Yosida approximants, contour integrals over `w + Gamma(j; r; eta)`,
//! the Laplace transform and the slice-regular semigroup law.

mod checks;
mod contour;
mod laplace;
mod report;

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::algebra::Multivector;
use crate::error::{Error, Result};
use crate::operator::{spherical_spectrum, ModuleVector, RealEmbedding, RightLinearOperator, SphericalCalculus};
use crate::quad::neville_at_zero;
use crate::slice::{exp_stem, slice_power, Domain, Stem, Value};

pub use checks::{
    converse_sectoriality_check, growth_bound_check, laplace_norm_bound_check, semigroup_law_check, ConverseGrid,
    GrowthGrid,
};
pub use contour::{
    contour_semigroup, contour_semigroup_slice, line_integral, Contour, ContourResult, ContourSemigroup, ContourSpec,
    LineQuad, Segment,
};
pub use laplace::{laplace_transform, LaplaceSpec};
pub use report::{CheckKind, CheckRecord, SemigroupReport};

fn op_value(v: Value) -> Result<RealEmbedding> {
    match v {
        Value::Op(t) => Ok(t),
        Value::Alg(_) => Err(Error::CodomainMismatch("expected an operator value")),
    }
}

/// Stem `(T1, T2)` of `q -> exp^A(q) = sum A^n q^n / n!`.
pub fn semigroup_stems(a: &RightLinearOperator, tol: f64) -> Result<Stem> {
    exp_stem(Value::Op(a.embed()), &Multivector::zero(a.n()), tol)
}

/// `T(q) = sum A^n q^n / n!`; `T(0) = Id`.
pub fn exp_semigroup(a: &RightLinearOperator, q: &Multivector, tol: f64) -> Result<RealEmbedding> {
    exp_semigroup_embedding(&a.embed(), q, tol)
}

pub fn exp_semigroup_embedding(a: &RealEmbedding, q: &Multivector, tol: f64) -> Result<RealEmbedding> {
    if q.n() != a.n() {
        return Err(Error::SignatureMismatch { left: a.n(), right: q.n() });
    }
    if q.max_abs() == 0.0 {
        return Ok(RealEmbedding::identity(a.n(), a.m()));
    }
    op_value(exp_stem(Value::Op(a.clone()), &Multivector::zero(a.n()), tol)?.induce(q)?)
}

/// Memoised `t -> e^{tA}` for quadrature loops that revisit nodes.
pub fn memo_exp_provider(a: &RightLinearOperator, tol: f64) -> impl FnMut(f64) -> Result<RealEmbedding> {
    let e = a.embed();
    let n = a.n();
    let mut memo: BTreeMap<u64, RealEmbedding> = BTreeMap::new();
    move |t| {
        if let Some(v) = memo.get(&t.to_bits()) {
            return Ok(v.clone());
        }
        let v = exp_semigroup_embedding(&e, &Multivector::scalar(n, t), tol)?;
        memo.insert(t.to_bits(), v.clone());
        Ok(v)
    }
}

/// Stem of `q -> C_q(A)` on `region`; errors if the region contains a
/// point of the spherical spectrum.
pub fn resolvent_stem(a: &RightLinearOperator, region: Domain) -> Result<Stem> {
    for (r, s) in spherical_spectrum(a)? {
        let z = num_complex::Complex64::new(r, s);
        if region.contains(z) || region.contains(z.conj()) {
            return Err(Error::SingularDelta { min_sv: 0.0 });
        }
    }
    Ok(Stem::resolvent(Arc::new(SphericalCalculus::new(a)), region))
}

/// `C_q(A)^{.k}`: the `k`-fold slice power of the resolvent stem at `q`.
pub fn resolvent_slice_power(a: &RightLinearOperator, q: &Multivector, k: u32) -> Result<RealEmbedding> {
    if k == 0 {
        return Err(Error::InvalidParameter("power k must be at least 1".into()));
    }
    let stem = Stem::resolvent(Arc::new(SphericalCalculus::new(a)), Domain::Whole);
    op_value(slice_power(&stem, k).induce(q)?)
}

/// `A_k = k A C_k(A)`.
pub fn yosida_approximant(a: &RightLinearOperator, k: f64) -> Result<RightLinearOperator> {
    if !k.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("k = {k}")));
    }
    let calc = SphericalCalculus::new(a);
    let c = calc.spherical_c(&Multivector::scalar(a.n(), k))?;
    Ok(calc.embedding().compose(&c).scale(k).to_operator())
}

/// `lim_{h -> 0} (T(h) x - x) / h` by polynomial extrapolation over a
/// decreasing grid of step sizes.
pub fn generator_estimate<T>(mut t: T, x: &ModuleVector, h_grid: &[f64]) -> Result<ModuleVector>
where
    T: FnMut(f64) -> Result<RealEmbedding>,
{
    if h_grid.len() < 2 {
        return Err(Error::BadGrid("need at least two step sizes"));
    }
    if h_grid.windows(2).any(|w| !(w[1] < w[0])) || h_grid.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::BadGrid("step sizes must be positive and decreasing"));
    }
    let mut ys: Vec<Vec<f64>> = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let d = t(h)?.apply(x).sub(x);
        ys.push(d.flatten().iter().map(|v| v / h).collect());
    }
    let (lim, est) = neville_at_zero(h_grid, &ys)?;
    let size = lim.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if !(est <= 1e-3 * size) {
        return Err(Error::Quadrature { tol: 1e-3, estimate: est / size });
    }
    Ok(ModuleVector::unflatten(x.n(), &nalgebra::DVector::from_vec(lim)))
}

/// `||pq - qp|| <= 1e-12 |p||q|`.
pub(crate) fn commute(p: &Multivector, q: &Multivector) -> Result<()> {
    let c = p.commutator(q).euclid_norm();
    if c > 1e-12 * p.euclid_norm() * q.euclid_norm() {
        return Err(Error::NotCommuting(c));
    }
    Ok(())
}
