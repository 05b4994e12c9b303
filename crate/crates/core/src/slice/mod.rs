//! Stem functions and the right slice functions they induce.
//!
//! A stem `F = (F1, F2)` maps `z = r + si` to a pair of values with
//! `F1(conj z) = F1(z)` and `F2(conj z) = -F2(z)`; it induces
//! `f(r + s j) = F1(z) + F2(z) j` on the quadratic cone. For operator values
//! "`T j`" is `T o L_j`.

mod check;
mod domain;
mod exp;
mod value;

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::algebra::{Multivector, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::operator::SphericalCalculus;
use crate::quad::GaussLegendre;

pub use check::{
    cr_residual, cr_richardson_ratio, is_right_slice, representation_extend, SliceVerdict, SliceWitness,
};
pub use domain::Domain;
pub use exp::{exp_defect_limit, exp_series_eval, growth_constant, DEFAULT_DEFECT_GRID};
pub use value::{Codomain, Value};

/// `(F1(z), F2(z))`.
pub type StemPair = (Value, Value);

type StemFn = dyn Fn(Complex64) -> Result<StemPair> + Send + Sync;

/// Panelled Gauss–Legendre settings for [`integral_stem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub order: usize,
    pub panels: usize,
    pub max_doublings: u32,
    pub tol: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self { order: 16, panels: 2, max_doublings: 10, tol: 1e-11 }
    }
}

/// The closed forms a stem can take.
#[derive(Clone)]
pub enum StemForm {
    Constant(Value),
    /// `sum c_n z^n`, left coefficients.
    PowerSeries { coeffs: Vec<Value>, radius: f64 },
    /// `(p + z)^n` with `z` the central stem unit.
    ShiftedPower { p: Multivector, degree: u32 },
    /// `sum x^n / n! (p + z)^n`.
    Exponential { x: Value, p: Multivector, tol: f64 },
    /// `(Q Re z - A Q, -Q Im z)`, `Q = Delta_{phi(z)}(A)^{-1}`.
    Resolvent(Arc<SphericalCalculus>),
    /// Pointwise stem product, left to right.
    Product(Vec<Stem>),
    Integral {
        family: Arc<dyn Fn(f64) -> Result<Stem> + Send + Sync>,
        weight: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        interval: (f64, f64),
        quad: QuadSpec,
    },
    Custom(Arc<StemFn>),
}

impl fmt::Debug for StemForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StemForm::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            StemForm::PowerSeries { coeffs, radius } => f
                .debug_struct("PowerSeries")
                .field("len", &coeffs.len())
                .field("radius", radius)
                .finish(),
            StemForm::ShiftedPower { p, degree } => {
                f.debug_struct("ShiftedPower").field("p", p).field("degree", degree).finish()
            }
            StemForm::Exponential { p, tol, .. } => {
                f.debug_struct("Exponential").field("p", p).field("tol", tol).finish()
            }
            StemForm::Resolvent(_) => f.write_str("Resolvent"),
            StemForm::Product(v) => f.debug_tuple("Product").field(v).finish(),
            StemForm::Integral { interval, .. } => f.debug_struct("Integral").field("interval", interval).finish(),
            StemForm::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// A stem function with its codomain and domain.
#[derive(Debug, Clone)]
pub struct Stem {
    form: StemForm,
    codomain: Codomain,
    domain: Domain,
}

/// `(F1 G1 - F2 G2, F1 G2 + F2 G1)`.
pub fn stem_mul(f: &StemPair, g: &StemPair) -> Result<StemPair> {
    let a = f.0.mul(&g.0)?.sub(&f.1.mul(&g.1)?)?;
    let b = f.0.mul(&g.1)?.add(&f.1.mul(&g.0)?)?;
    Ok((a, b))
}

/// `Re(z^k), Im(z^k)` for `k = 0..=n`.
pub(crate) fn complex_powers(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut w = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        out.push(w);
        w *= z;
    }
    out
}

impl Stem {
    pub fn constant(v: Value) -> Self {
        let codomain = v.codomain();
        Self { form: StemForm::Constant(v), codomain, domain: Domain::Whole }
    }

    pub fn power_series(coeffs: Vec<Value>, radius: f64) -> Result<Self> {
        let codomain = coeffs.first().map(|c| c.codomain()).ok_or(Error::CodomainMismatch("empty series"))?;
        if coeffs.iter().any(|c| c.codomain() != codomain) {
            return Err(Error::CodomainMismatch("series coefficients differ"));
        }
        let domain = if radius.is_finite() { Domain::Disc { center: 0.0, radius } } else { Domain::Whole };
        Ok(Self { form: StemForm::PowerSeries { coeffs, radius }, codomain, domain })
    }

    pub fn resolvent(calc: Arc<SphericalCalculus>, domain: Domain) -> Self {
        let codomain = Codomain::Operator { n: calc.n(), m: calc.m() };
        Self { form: StemForm::Resolvent(calc), codomain, domain }
    }

    /// A stem given by a closure; the caller vouches for its symmetry.
    pub fn custom(
        codomain: Codomain,
        domain: Domain,
        f: impl Fn(Complex64) -> Result<StemPair> + Send + Sync + 'static,
    ) -> Self {
        Self { form: StemForm::Custom(Arc::new(f)), codomain, domain }
    }

    pub fn form(&self) -> &StemForm {
        &self.form
    }

    pub fn codomain(&self) -> Codomain {
        self.codomain
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    /// `(F1(z), F2(z))`.
    pub fn eval(&self, z: Complex64) -> Result<StemPair> {
        if !self.domain.contains(z) {
            return Err(Error::OutsideDomain { re: z.re, im: z.im });
        }
        self.eval_unchecked(z)
    }

    fn eval_unchecked(&self, z: Complex64) -> Result<StemPair> {
        let c = self.codomain;
        match &self.form {
            StemForm::Constant(v) => Ok((v.clone(), Value::zero(c))),
            StemForm::PowerSeries { coeffs, .. } => {
                let pw = complex_powers(z, coeffs.len());
                let (mut f1, mut f2) = (Value::zero(c), Value::zero(c));
                for (k, a) in coeffs.iter().enumerate() {
                    f1.axpy(pw[k].re, a)?;
                    f2.axpy(pw[k].im, a)?;
                }
                Ok((f1, f2))
            }
            StemForm::ShiftedPower { p, degree } => {
                let (f1, f2) = shifted_power_pair(p, *degree, z);
                Ok((Value::Alg(f1), Value::Alg(f2)))
            }
            StemForm::Exponential { x, p, tol } => exp::exp_eval(x, p, z, *tol),
            StemForm::Resolvent(calc) => {
                let q = calc.q_rs(z.re, z.norm_sqr())?;
                let e = calc.embedding();
                let qm = crate::operator::RealEmbedding::from_matrix(e.n(), e.m(), q)?;
                let f1 = qm.scale(z.re).sub(&e.compose(&qm));
                let f2 = qm.scale(-z.im);
                Ok((Value::Op(f1), Value::Op(f2)))
            }
            StemForm::Product(fs) => {
                let mut acc = (Value::one(c), Value::zero(c));
                for f in fs {
                    acc = stem_mul(&acc, &f.eval_unchecked(z)?)?;
                }
                Ok(acc)
            }
            StemForm::Integral { family, weight, interval, quad } => {
                integrate_stem(family.as_ref(), weight.as_ref(), *interval, quad, c, z)
            }
            StemForm::Custom(f) => f(z),
        }
    }

    /// `f(q) = F1(z) + F2(z) j` for `q = r + s j`, `z = r + s i`.
    pub fn induce(&self, q: &Multivector) -> Result<Value> {
        if q.n() != self.codomain.n() {
            return Err(Error::SignatureMismatch { left: self.codomain.n(), right: q.n() });
        }
        let d = q.cone_decompose(DEFAULT_TOL)?;
        let (f1, f2) = self.eval(d.z())?;
        match &d.axis {
            Some(j) => f1.add(&f2.right_scalar(j)),
            None => Ok(f1),
        }
    }

    /// Values at `r + s j` for a complex point and an explicit axis.
    pub fn induce_at(&self, z: Complex64, j: &Multivector) -> Result<Value> {
        let (f1, f2) = self.eval(z)?;
        f1.add(&f2.right_scalar(j))
    }
}

/// Pointwise product `(F G)`; in operator codomain this is slice composition.
pub fn slice_product(f: &Stem, g: &Stem) -> Result<Stem> {
    if f.codomain != g.codomain {
        return Err(Error::CodomainMismatch("slice product of different codomains"));
    }
    let mut factors = Vec::new();
    for s in [f, g] {
        match &s.form {
            StemForm::Product(v) => factors.extend(v.iter().cloned()),
            _ => factors.push(s.clone()),
        }
    }
    Ok(Stem { form: StemForm::Product(factors), codomain: f.codomain, domain: f.domain.intersect(&g.domain) })
}

/// `k`-fold slice power.
pub fn slice_power(f: &Stem, k: u32) -> Stem {
    Stem {
        form: StemForm::Product((0..k).map(|_| f.clone()).collect()),
        codomain: f.codomain,
        domain: f.domain.clone(),
    }
}

/// Stem of `q -> (p + q)^{.n}`.
pub fn shifted_slice_power(p: &Multivector, n: u32) -> Stem {
    Stem {
        form: StemForm::ShiftedPower { p: p.clone(), degree: n },
        codomain: Codomain::Algebra { n: p.n() },
        domain: Domain::Whole,
    }
}

/// `(p + z)^n` in `A (x) C` by repeated left multiplication.
pub(crate) fn shifted_power_pair(p: &Multivector, n: u32, z: Complex64) -> (Multivector, Multivector) {
    let mut f1 = Multivector::one(p.n());
    let mut f2 = Multivector::zero(p.n());
    for _ in 0..n {
        let (pf1, pf2) = (p * &f1, p * &f2);
        let mut g1 = pf1;
        g1.axpy(z.re, &f1);
        g1.axpy(-z.im, &f2);
        let mut g2 = pf2;
        g2.axpy(z.re, &f2);
        g2.axpy(z.im, &f1);
        f1 = g1;
        f2 = g2;
    }
    (f1, f2)
}

/// Stem of `exp_p^x(q) = sum x^n / n! (p + q)^{.n}`.
pub fn exp_stem(x: Value, p: &Multivector, tol: f64) -> Result<Stem> {
    let codomain = x.codomain();
    if codomain.n() != p.n() {
        return Err(Error::SignatureMismatch { left: codomain.n(), right: p.n() });
    }
    if !p.in_quadratic_cone(DEFAULT_TOL) {
        return Err(Error::NotInCone { defect: p.cone_defect() });
    }
    Ok(Stem { form: StemForm::Exponential { x, p: p.clone(), tol }, codomain, domain: Domain::Whole })
}

/// `H(z) = int w(t) F_t(z) dt` over `interval`.
pub fn integral_stem(
    family: impl Fn(f64) -> Result<Stem> + Send + Sync + 'static,
    weight: impl Fn(f64) -> f64 + Send + Sync + 'static,
    interval: (f64, f64),
    quad: QuadSpec,
) -> Result<Stem> {
    let probe = family(interval.0)?;
    Ok(Stem {
        codomain: probe.codomain,
        domain: probe.domain.clone(),
        form: StemForm::Integral { family: Arc::new(family), weight: Arc::new(weight), interval, quad },
    })
}

fn integrate_stem(
    family: &(dyn Fn(f64) -> Result<Stem> + Send + Sync),
    weight: &(dyn Fn(f64) -> f64 + Send + Sync),
    (a, b): (f64, f64),
    quad: &QuadSpec,
    c: Codomain,
    z: Complex64,
) -> Result<StemPair> {
    let gl = GaussLegendre::new(quad.order);
    let rule = |panels: usize| -> Result<StemPair> {
        let (mut h1, mut h2) = (Value::zero(c), Value::zero(c));
        for (t, w) in gl.composite(a, b, panels) {
            let (f1, f2) = family(t)?.eval(z)?;
            let wt = w * weight(t);
            h1.axpy(wt, &f1)?;
            h2.axpy(wt, &f2)?;
        }
        Ok((h1, h2))
    };
    let mut panels = quad.panels.max(1);
    let mut prev = rule(panels)?;
    let mut est = f64::INFINITY;
    for _ in 0..quad.max_doublings {
        panels *= 2;
        let next = rule(panels)?;
        let diff = next.0.sub(&prev.0)?.frobenius() + next.1.sub(&prev.1)?.frobenius();
        let size = next.0.frobenius() + next.1.frobenius();
        est = diff;
        prev = next;
        if diff <= quad.tol * size.max(1e-300) {
            return Ok(prev);
        }
    }
    Err(Error::Quadrature { tol: quad.tol, estimate: est })
}

/// `q -> f(q)` as a boxed closure.
pub type Sampler<'a> = Box<dyn Fn(&Multivector) -> Result<Value> + 'a>;

/// Convenience: boxed sampler from a stem.
pub fn induced_sampler(stem: &Stem) -> Sampler<'_> {
    Box::new(move |q| stem.induce(q))
}

#[cfg(test)]
mod tests;
