//! Right-linear operators on `X = A^m` and their real embeddings.
//!
//! An operator is an `m x m` matrix of algebra elements acting by left
//! multiplication, `(Ax)_u = sum_v a_uv x_v`, so `A(xq) = (Ax)q` holds by
//! construction. The real embedding acts on the flattened coefficient vector
//! with index `u * 2^n + K`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{phi, sample_imaginary_sphere, Multivector, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg;

/// Relative threshold on `sigma_min(Delta_q) / ||Delta_q||` for resolvent-set membership.
pub const RESOLVENT_REL_TOL: f64 = 1e-8;

/// An element of `A^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    n: u8,
    comps: Vec<Multivector>,
}

impl ModuleVector {
    pub fn new(comps: Vec<Multivector>) -> Result<Self> {
        let n = comps.first().map(|c| c.n()).ok_or(Error::DimensionMismatch { expected: 1, got: 0 })?;
        if let Some(bad) = comps.iter().find(|c| c.n() != n) {
            return Err(Error::SignatureMismatch { left: n, right: bad.n() });
        }
        Ok(Self { n, comps })
    }

    pub fn zero(n: u8, m: usize) -> Self {
        Self { n, comps: vec![Multivector::zero(n); m] }
    }

    pub fn random<R: Rng + ?Sized>(n: u8, m: usize, rng: &mut R) -> Self {
        Self { n, comps: (0..m).map(|_| Multivector::random(n, rng)).collect() }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[Multivector] {
        &self.comps
    }

    pub fn flatten(&self) -> DVector<f64> {
        let d = 1usize << self.n;
        let mut v = DVector::zeros(d * self.m());
        for (u, c) in self.comps.iter().enumerate() {
            v.rows_mut(u * d, d).copy_from_slice(c.coeffs());
        }
        v
    }

    pub fn unflatten(n: u8, v: &DVector<f64>) -> Self {
        let d = 1usize << n;
        let comps = (0..v.len() / d)
            .map(|u| Multivector::from_coeffs(n, v.rows(u * d, d).iter().copied().collect()).expect("sized"))
            .collect();
        Self { n, comps }
    }

    /// `x q`, componentwise.
    pub fn right_mul(&self, q: &Multivector) -> Self {
        Self { n: self.n, comps: self.comps.iter().map(|c| c * q).collect() }
    }

    /// `q x`, componentwise.
    pub fn left_mul(&self, q: &Multivector) -> Self {
        Self { n: self.n, comps: self.comps.iter().map(|c| q * c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { n: self.n, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { n: self.n, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() }
    }

    /// Max over components of the Clifford operator norm.
    pub fn norm(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.clifford_norm()))
    }
}

/// `m x m` matrix over `R_n` acting by left multiplication.
#[derive(Debug, Clone, PartialEq)]
pub struct RightLinearOperator {
    n: u8,
    m: usize,
    entries: Vec<Multivector>,
}

impl RightLinearOperator {
    pub fn from_rows(rows: Vec<Vec<Multivector>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        let n = rows[0].first().map(|e| e.n()).ok_or(Error::DimensionMismatch { expected: m, got: 0 })?;
        let mut entries = Vec::with_capacity(m * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: row.len() });
            }
            for e in row {
                if e.n() != n {
                    return Err(Error::SignatureMismatch { left: n, right: e.n() });
                }
                entries.push(e);
            }
        }
        Ok(Self { n, m, entries })
    }

    pub fn zero(n: u8, m: usize) -> Self {
        Self { n, m, entries: vec![Multivector::zero(n); m * m] }
    }

    pub fn identity(n: u8, m: usize) -> Self {
        Self::scalar(n, m, &Multivector::one(n))
    }

    /// `q Id`: diagonal with every entry `q`.
    pub fn scalar(n: u8, m: usize, q: &Multivector) -> Self {
        let mut a = Self::zero(n, m);
        for u in 0..m {
            a.entries[u * m + u] = q.clone();
        }
        a
    }

    pub fn diag(d: Vec<Multivector>) -> Result<Self> {
        let m = d.len();
        let n = d.first().map(|e| e.n()).ok_or(Error::DimensionMismatch { expected: 1, got: 0 })?;
        let mut a = Self::zero(n, m);
        for (u, e) in d.into_iter().enumerate() {
            if e.n() != n {
                return Err(Error::SignatureMismatch { left: n, right: e.n() });
            }
            a.entries[u * m + u] = e;
        }
        Ok(a)
    }

    /// Gaussian coefficients with standard deviation `scale`.
    pub fn random<R: Rng + ?Sized>(n: u8, m: usize, scale: f64, rng: &mut R) -> Self {
        let entries = (0..m * m).map(|_| Multivector::random(n, rng).scale(scale)).collect();
        Self { n, m, entries }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entry(&self, u: usize, v: usize) -> &Multivector {
        &self.entries[u * self.m + v]
    }

    pub fn rows(&self) -> Vec<Vec<Multivector>> {
        self.entries.chunks(self.m).map(|r| r.to_vec()).collect()
    }

    pub fn apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        if x.m() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: x.m() });
        }
        if x.n() != self.n {
            return Err(Error::SignatureMismatch { left: self.n, right: x.n() });
        }
        let comps = (0..self.m)
            .map(|u| {
                let mut acc = Multivector::zero(self.n);
                for v in 0..self.m {
                    acc += &(self.entry(u, v) * &x.comps[v]);
                }
                acc
            })
            .collect();
        Ok(ModuleVector { n: self.n, comps })
    }

    /// `(qA)(x) = q A(x)`.
    pub fn left_scalar(&self, q: &Multivector) -> Self {
        Self { n: self.n, m: self.m, entries: self.entries.iter().map(|a| q * a).collect() }
    }

    /// `(Aq)(x) = A(q x)` -- not `A(x) q`.
    pub fn right_scalar(&self, q: &Multivector) -> Self {
        Self { n: self.n, m: self.m, entries: self.entries.iter().map(|a| a * q).collect() }
    }

    /// `A - omega Id`.
    pub fn shift(&self, omega: f64) -> Self {
        let mut a = self.clone();
        for u in 0..self.m {
            let e = &mut a.entries[u * self.m + u];
            *e = e.add_scalar(-omega);
        }
        a
    }

    pub fn scale(&self, r: f64) -> Self {
        Self { n: self.n, m: self.m, entries: self.entries.iter().map(|a| a.scale(r)).collect() }
    }

    pub fn compose(&self, other: &Self) -> Self {
        let m = self.m;
        let mut entries = Vec::with_capacity(m * m);
        for u in 0..m {
            for v in 0..m {
                let mut acc = Multivector::zero(self.n);
                for w in 0..m {
                    acc += &(self.entry(u, w) * other.entry(w, v));
                }
                entries.push(acc);
            }
        }
        Self { n: self.n, m, entries }
    }

    pub fn embed(&self) -> RealEmbedding {
        let d = 1usize << self.n;
        let mut mat = DMatrix::zeros(d * self.m, d * self.m);
        for u in 0..self.m {
            for v in 0..self.m {
                let l = self.entry(u, v).left_matrix();
                mat.view_mut((u * d, v * d), (d, d)).copy_from(&l);
            }
        }
        RealEmbedding { n: self.n, m: self.m, mat }
    }

    /// `max_u sum_v |a_uv|_Cl`: an upper bound on the operator norm.
    pub fn norm_upper(&self) -> f64 {
        (0..self.m)
            .map(|u| (0..self.m).map(|v| self.entry(u, v).clifford_norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Real matrix of a right-linear operator on the flattened coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RealEmbedding {
    n: u8,
    m: usize,
    mat: DMatrix<f64>,
}

impl RealEmbedding {
    pub fn from_matrix(n: u8, m: usize, mat: DMatrix<f64>) -> Result<Self> {
        let d = (1usize << n) * m;
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: mat.nrows() });
        }
        Ok(Self { n, m, mat })
    }

    pub fn identity(n: u8, m: usize) -> Self {
        let d = (1usize << n) * m;
        Self { n, m, mat: DMatrix::identity(d, d) }
    }

    pub fn zero(n: u8, m: usize) -> Self {
        let d = (1usize << n) * m;
        Self { n, m, mat: DMatrix::zeros(d, d) }
    }

    /// Block-diagonal `x -> q x`.
    pub fn left_mult(q: &Multivector, m: usize) -> Self {
        Self::block_diag(q.n(), m, &q.left_matrix())
    }

    /// Block-diagonal `x -> x q`; for `q` in the sphere this is the complex
    /// structure `J_q` of `X_q`.
    pub fn right_mult(q: &Multivector, m: usize) -> Self {
        Self::block_diag(q.n(), m, &q.right_matrix())
    }

    fn block_diag(n: u8, m: usize, b: &DMatrix<f64>) -> Self {
        let d = 1usize << n;
        let mut mat = DMatrix::zeros(d * m, d * m);
        for u in 0..m {
            mat.view_mut((u * d, u * d), (d, d)).copy_from(b);
        }
        Self { n, m, mat }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    fn like(&self, mat: DMatrix<f64>) -> Self {
        Self { n: self.n, m: self.m, mat }
    }

    pub fn compose(&self, other: &Self) -> Self {
        self.like(&self.mat * &other.mat)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.like(&self.mat + &other.mat)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.like(&self.mat - &other.mat)
    }

    pub fn scale(&self, r: f64) -> Self {
        self.like(&self.mat * r)
    }

    /// `self += r * other`.
    pub fn axpy(&mut self, r: f64, other: &Self) {
        self.mat.zip_apply(&other.mat, |a, b| *a += r * b);
    }

    /// `T o L_q`: `x -> T(q x)`.
    pub fn right_scalar(&self, q: &Multivector) -> Self {
        let d = 1usize << self.n;
        let l = q.left_matrix();
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for v in 0..self.m {
            let cols = self.mat.columns(v * d, d);
            out.columns_mut(v * d, d).copy_from(&(cols * &l));
        }
        self.like(out)
    }

    /// `L_q o T`: `x -> q T(x)`.
    pub fn left_scalar(&self, q: &Multivector) -> Self {
        let d = 1usize << self.n;
        let l = q.left_matrix();
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for u in 0..self.m {
            let rows = self.mat.rows(u * d, d);
            out.rows_mut(u * d, d).copy_from(&(&l * rows));
        }
        self.like(out)
    }

    pub fn apply(&self, x: &ModuleVector) -> ModuleVector {
        ModuleVector::unflatten(self.n, &(&self.mat * x.flatten()))
    }

    /// Read the algebra entries back (column 0 of each block).
    pub fn to_operator(&self) -> RightLinearOperator {
        let d = 1usize << self.n;
        let mut entries = Vec::with_capacity(self.m * self.m);
        for u in 0..self.m {
            for v in 0..self.m {
                let col: Vec<f64> = (0..d).map(|k| self.mat[(u * d + k, v * d)]).collect();
                entries.push(Multivector::from_coeffs(self.n, col).expect("sized"));
            }
        }
        RightLinearOperator { n: self.n, m: self.m, entries }
    }

    /// Largest deviation from commuting with right multiplication by the
    /// generators (zero for a right-linear operator).
    pub fn right_linearity_defect(&self) -> f64 {
        (1..=self.n)
            .map(|g| {
                let r = Self::right_mult(&Multivector::generator(self.n, g), self.m);
                (&self.mat * &r.mat - &r.mat * &self.mat).amax()
            })
            .fold(0.0, f64::max)
    }

    /// Certified upper bound on the `A`-operator norm.
    pub fn norm_upper(&self) -> f64 {
        self.to_operator().norm_upper()
    }

    /// Spectral norm of the real matrix (not the `A`-norm).
    pub fn spectral_norm(&self) -> f64 {
        linalg::spectral_norm(&self.mat)
    }

    pub fn frobenius(&self) -> f64 {
        self.mat.norm()
    }
}

/// Lower/upper bracket of the operator norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
}

impl NormBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

fn norm_ratio(e: &RealEmbedding, x: &ModuleVector) -> f64 {
    let nx = x.norm();
    if nx == 0.0 {
        0.0
    } else {
        e.apply(x).norm() / nx
    }
}

/// Bracket `sup ||Ax|| / ||x||`: upper bound from row sums, lower bound from
/// random restarts plus coordinate hill climbing.
pub fn op_norm(a: &RightLinearOperator, seed: u64) -> NormBracket {
    let upper = a.norm_upper();
    let e = a.embed();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, m) = (a.n(), a.m());
    let mut best = 0.0f64;
    let mut best_x = ModuleVector::zero(n, m);
    // Unit vectors supported on one coordinate hit the exact value for
    // row-sum-attaining shapes such as nilpotent shifts.
    for v in 0..m {
        let mut x = ModuleVector::zero(n, m);
        x.comps[v] = Multivector::one(n);
        let r = norm_ratio(&e, &x);
        if r > best {
            best = r;
            best_x = x;
        }
    }
    for _ in 0..32 {
        let x = ModuleVector::random(n, m, &mut rng);
        let r = norm_ratio(&e, &x);
        if r > best {
            best = r;
            best_x = x;
        }
    }
    let mut step = 0.5;
    for _ in 0..300 {
        let mut trial = best_x.clone();
        let u = rng.random_range(0..m);
        let pert = Multivector::random(n, &mut rng).scale(step * trial.norm().max(1e-300));
        trial.comps[u] = &trial.comps[u] + &pert;
        let r = norm_ratio(&e, &trial);
        if r > best {
            best = r;
            best_x = trial;
        } else {
            step *= 0.97;
        }
    }
    NormBracket { lower: best.min(upper), upper }
}

/// `A^2 - 2 Re(q) A + |q|^2 Id` on the real embedding, with `A^2` cached.
#[derive(Debug, Clone)]
pub struct SphericalCalculus {
    a: RealEmbedding,
    a2: DMatrix<f64>,
}

impl SphericalCalculus {
    pub fn new(op: &RightLinearOperator) -> Self {
        Self::from_embedding(op.embed())
    }

    pub fn from_embedding(a: RealEmbedding) -> Self {
        let a2 = &a.mat * &a.mat;
        Self { a, a2 }
    }

    pub fn embedding(&self) -> &RealEmbedding {
        &self.a
    }

    pub fn n(&self) -> u8 {
        self.a.n
    }

    pub fn m(&self) -> usize {
        self.a.m
    }

    /// `Delta` from the two numbers it depends on.
    pub fn delta_rs(&self, re: f64, abs2: f64) -> DMatrix<f64> {
        let mut d = self.a2.clone();
        d.zip_apply(&self.a.mat, |a, b| *a -= 2.0 * re * b);
        for i in 0..d.nrows() {
            d[(i, i)] += abs2;
        }
        d
    }

    pub fn delta(&self, q: &Multivector) -> Result<RealEmbedding> {
        let (re, abs2) = cone_re_abs2(q)?;
        Ok(self.a.like(self.delta_rs(re, abs2)))
    }

    /// `sigma_min(Delta) / ||Delta||`.
    pub fn delta_conditioning(&self, re: f64, abs2: f64) -> (f64, f64) {
        let (lo, hi) = linalg::singular_extremes(&self.delta_rs(re, abs2));
        (lo, hi)
    }

    /// `Delta^{-1}` at `(Re q, |q|^2)`; errors inside the spherical spectrum.
    pub fn q_rs(&self, re: f64, abs2: f64) -> Result<DMatrix<f64>> {
        let d = self.delta_rs(re, abs2);
        let (lo, hi) = linalg::singular_extremes(&d);
        if !(lo > RESOLVENT_REL_TOL * hi) {
            return Err(Error::SingularDelta { min_sv: lo });
        }
        linalg::lu_inverse(&d)
    }

    /// Like [`Self::q_rs`] but with only an LU-based sanity check; for
    /// quadrature nodes already known to lie in the resolvent set.
    pub fn q_rs_fast(&self, re: f64, abs2: f64) -> Result<DMatrix<f64>> {
        let d = self.delta_rs(re, abs2);
        let inv = linalg::lu_inverse(&d)?;
        // Cheap condition estimate in the Frobenius norm.
        let cond = d.norm() * inv.norm() / d.nrows() as f64;
        if !(cond < 1.0 / RESOLVENT_REL_TOL) {
            return Err(Error::SingularDelta { min_sv: 1.0 / inv.norm() });
        }
        Ok(inv)
    }

    pub fn spherical_q(&self, q: &Multivector) -> Result<RealEmbedding> {
        let (re, abs2) = cone_re_abs2(q)?;
        Ok(self.a.like(self.q_rs(re, abs2)?))
    }

    /// `C_q = Q L_{q^c} - A Q`.
    pub fn spherical_c(&self, q: &Multivector) -> Result<RealEmbedding> {
        let (re, abs2) = cone_re_abs2(q)?;
        let qm = self.a.like(self.q_rs(re, abs2)?);
        Ok(self.c_from_q(&qm, q))
    }

    pub fn c_from_q(&self, qm: &RealEmbedding, q: &Multivector) -> RealEmbedding {
        let left = qm.right_scalar(&q.conj());
        left.sub(&self.a.compose(qm))
    }

    /// Fast path of [`Self::spherical_c`] for quadrature loops.
    pub fn spherical_c_fast(&self, q: &Multivector) -> Result<RealEmbedding> {
        let re = q.scalar_part();
        let abs2 = q.norm_sqr();
        let qm = self.a.like(self.q_rs_fast(re, abs2)?);
        Ok(self.c_from_q(&qm, q))
    }

    pub fn in_resolvent_set(&self, q: &Multivector) -> Result<bool> {
        let (re, abs2) = cone_re_abs2(q)?;
        let (lo, hi) = self.delta_conditioning(re, abs2);
        Ok(lo > RESOLVENT_REL_TOL * hi)
    }

    /// `R_lambda(A_j) = (lambda - A)^{-1}` on `X_j`, where `lambda y := y phi_j(lambda)`.
    pub fn complex_resolvent(&self, j: &Multivector, lambda: Complex64) -> Result<RealEmbedding> {
        if !j.in_imaginary_sphere(1e-10) {
            return Err(Error::NotInSphere);
        }
        let r = RealEmbedding::right_mult(&phi(j, lambda), self.a.m);
        let sys = &r.mat - &self.a.mat;
        Ok(self.a.like(linalg::checked_inverse(&sys, RESOLVENT_REL_TOL)?))
    }

    /// `sigma_min(R_{phi_j(lambda)} - A) / ||.||`.
    pub fn complex_conditioning(&self, j: &Multivector, lambda: Complex64) -> f64 {
        let r = RealEmbedding::right_mult(&phi(j, lambda), self.a.m);
        let (lo, hi) = linalg::singular_extremes(&(&r.mat - &self.a.mat));
        lo / hi
    }

    /// `sigma_min(L_lambda - A)`: the system `lambda x - A x`, with `lambda`
    /// multiplying on the left.
    pub fn left_system_min_sv(&self, lambda: &Multivector) -> f64 {
        let l = RealEmbedding::left_mult(lambda, self.a.m);
        linalg::min_singular_value(&(&l.mat - &self.a.mat))
    }
}

/// `(Re q, |q|^2)` of a cone element.
fn cone_re_abs2(q: &Multivector) -> Result<(f64, f64)> {
    if !q.in_quadratic_cone(DEFAULT_TOL) {
        return Err(Error::NotInCone { defect: q.cone_defect() });
    }
    Ok((q.scalar_part(), q.norm_sqr()))
}

pub fn delta(a: &RightLinearOperator, q: &Multivector) -> Result<RealEmbedding> {
    SphericalCalculus::new(a).delta(q)
}

pub fn spherical_q(a: &RightLinearOperator, q: &Multivector) -> Result<RealEmbedding> {
    SphericalCalculus::new(a).spherical_q(q)
}

pub fn spherical_c(a: &RightLinearOperator, q: &Multivector) -> Result<RealEmbedding> {
    SphericalCalculus::new(a).spherical_c(q)
}

pub fn complex_resolvent(a: &RightLinearOperator, j: &Multivector, lambda: Complex64) -> Result<RealEmbedding> {
    SphericalCalculus::new(a).complex_resolvent(j, lambda)
}

/// Relative residual of `Q_{phi_j(lambda)} = R_{conj lambda} R_lambda`.
pub fn verify_qrr(a: &RightLinearOperator, j: &Multivector, lambda: Complex64) -> Result<f64> {
    let sc = SphericalCalculus::new(a);
    let q = sc.spherical_q(&phi(j, lambda))?;
    let r1 = sc.complex_resolvent(j, lambda)?;
    let r2 = sc.complex_resolvent(j, lambda.conj())?;
    let rr = r2.compose(&r1);
    Ok(q.sub(&rr).norm_upper() / q.norm_upper().max(rr.norm_upper()))
}

/// Residual of `Delta_q(A - w) = Delta_{q+w}(A)` and `C_q(A - w) = C_{q+w}(A)`
/// (max of the two, relative).
pub fn vertex_shift_check(a: &RightLinearOperator, omega: f64, q: &Multivector) -> Result<f64> {
    let shifted = SphericalCalculus::new(&a.shift(omega));
    let plain = SphericalCalculus::new(a);
    let qw = q.add_scalar(omega);
    let d1 = shifted.delta(q)?;
    let d2 = plain.delta(&qw)?;
    let rd = d1.sub(&d2).norm_upper() / d1.norm_upper().max(d2.norm_upper()).max(f64::MIN_POSITIVE);
    let c1 = shifted.spherical_c(q)?;
    let c2 = plain.spherical_c(&qw)?;
    let rc = c1.sub(&c2).norm_upper() / c1.norm_upper().max(c2.norm_upper()).max(f64::MIN_POSITIVE);
    Ok(rd.max(rc))
}

/// Relative residual of `Q_p = (C_{p^c} - C_p) (2 Im p)^{-1}` for nonreal `p`.
pub fn q_from_c_residual(a: &RightLinearOperator, p: &Multivector) -> Result<f64> {
    let sc = SphericalCalculus::new(a);
    let q = sc.spherical_q(p)?;
    let diff = sc.spherical_c(&p.conj())?.sub(&sc.spherical_c(p)?);
    let two_im = p.im().scale(2.0);
    let rhs = diff.right_scalar(&two_im.cone_inverse()?);
    Ok(q.sub(&rhs).norm_upper() / q.norm_upper().max(rhs.norm_upper()))
}

/// Circular components `r + s S` of the spherical spectrum, `s >= 0`, sorted.
pub fn spherical_spectrum(a: &RightLinearOperator) -> Result<Vec<(f64, f64)>> {
    spectrum_of_embedding(&a.embed())
}

pub fn spectrum_of_embedding(e: &RealEmbedding) -> Result<Vec<(f64, f64)>> {
    let eig = e.mat.clone().complex_eigenvalues();
    if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen);
    }
    let scale = eig.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let tol = 1e-6 * scale;
    let mut pts: Vec<(f64, f64)> = eig.iter().map(|z| (z.re, z.im.abs())).collect();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut clusters: Vec<(f64, f64, usize)> = Vec::new();
    for (r, s) in pts {
        match clusters
            .iter_mut()
            .find(|(cr, cs, k)| libm::hypot(cr / *k as f64 - r, cs / *k as f64 - s) <= tol)
        {
            Some(c) => {
                c.0 += r;
                c.1 += s;
                c.2 += 1;
            }
            None => clusters.push((r, s, 1)),
        }
    }
    let mut out: Vec<(f64, f64)> = clusters.into_iter().map(|(r, s, k)| (r / k as f64, s / k as f64)).collect();
    out.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    Ok(out)
}

/// A right eigenpair `A x = x lambda` with `lambda = r +- s j` on the sphere
/// component `(r, s)`; returns `(x, lambda, relative residual)`.
pub fn right_eigenpair(
    a: &RightLinearOperator,
    r: f64,
    s: f64,
    j: &Multivector,
) -> Result<(ModuleVector, Multivector, f64)> {
    let e = a.embed();
    let mut best: Option<(ModuleVector, Multivector, f64)> = None;
    for sign in [1.0, -1.0] {
        let lam = Multivector::from_slice(r, sign * s, j);
        let sys = &e.mat - &RealEmbedding::right_mult(&lam, a.m()).mat;
        let (_, v) = linalg::null_vector(&sys);
        let x = ModuleVector::unflatten(a.n(), &v);
        let res = e.apply(&x).sub(&x.right_mul(&lam)).norm() / x.norm().max(f64::MIN_POSITIVE);
        if best.as_ref().is_none_or(|b| res < b.2) {
            best = Some((x, lam, res));
        }
    }
    best.ok_or(Error::Eigen)
}

/// Sample grid for [`sectorial_probe`].
#[derive(Debug, Clone)]
pub struct ProbeGrid {
    pub radii: Vec<f64>,
    pub axes: Vec<Multivector>,
    /// Margin `eps` subtracted from the boundary angle `pi/2 + delta`.
    pub angle_margin: f64,
    /// Extra interior angles per ray family.
    pub interior_angles: usize,
}

impl ProbeGrid {
    /// Log-spaced radii in `[1e-2, 1e3]` and sphere samples.
    pub fn standard(n: u8, seed: u64) -> Result<Self> {
        let radii = (0..=25).map(|i| libm::pow(10.0, -2.0 + 5.0 * i as f64 / 25.0)).collect();
        Ok(Self { radii, axes: sample_imaginary_sphere(n, seed, 4)?, angle_margin: 1e-3, interior_angles: 3 })
    }
}

/// Outcome of a sector probe.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorialProbe {
    pub in_resolvent: bool,
    pub k_estimate: f64,
    pub probes: usize,
    /// Worst point (Re q, s) found, by `||C_q|| |q - w|`.
    pub worst: (f64, f64),
}

/// Probe `w + Omega_{pi/2 + delta}` for spectrum and the bound `||C_q|| <= K / |q - w|`.
pub fn sectorial_probe(a: &RightLinearOperator, omega: f64, delta: f64, grid: &ProbeGrid) -> Result<SectorialProbe> {
    if !(delta > 0.0 && delta <= FRAC_PI_2) {
        return Err(Error::InvalidParameter(alloc::format!("delta = {delta} not in (0, pi/2]")));
    }
    let sc = SphericalCalculus::new(a);
    let top = FRAC_PI_2 + delta - grid.angle_margin;
    let mut angles = vec![0.0, top];
    for i in 1..=grid.interior_angles {
        angles.push(top * i as f64 / (grid.interior_angles + 1) as f64);
    }
    let mut out = SectorialProbe { in_resolvent: true, k_estimate: 0.0, probes: 0, worst: (omega, 0.0) };
    for &rho in &grid.radii {
        for &th in &angles {
            for j in &grid.axes {
                // The sector is symmetric; theta and -theta are q and q^c.
                for sgn in [1.0, -1.0] {
                    let z = Complex64::from_polar(rho, sgn * th);
                    let q = phi(j, z).add_scalar(omega);
                    out.probes += 1;
                    match sc.spherical_c(&q) {
                        Ok(c) => {
                            let k = c.norm_upper() * rho;
                            if k > out.k_estimate {
                                out.k_estimate = k;
                                out.worst = (q.scalar_part(), rho * libm::sin(th));
                            }
                        }
                        Err(Error::SingularDelta { .. }) => {
                            out.in_resolvent = false;
                            out.k_estimate = f64::INFINITY;
                            out.worst = (q.scalar_part(), rho * libm::sin(th));
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The operator `[[0, i], [j, 0]]` on `H^2`.
pub fn two_by_two_example() -> RightLinearOperator {
    let z = Multivector::zero(2);
    let i = Multivector::quaternion(0.0, 1.0, 0.0, 0.0);
    let j = Multivector::quaternion(0.0, 0.0, 1.0, 0.0);
    RightLinearOperator::from_rows(vec![vec![z.clone(), i], vec![j, z]]).expect("well formed")
}
