//! Clifford algebras `R_n` of signature `(0, n)`.
//!
//! Elements are dense: coefficient `k` multiplies the basis blade `e_K`
//! whose generator set `K` is the bit pattern of `k` (bit `i` <-> `e_{i+1}`).
//! `R_1` is the complex numbers, `R_2` the quaternions (`e1 = i`, `e2 = j`,
//! `e12 = k`).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Largest supported number of generators.
pub const MAX_N: u8 = 6;

/// Default tolerance for cone / sphere membership on unit-scale inputs.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Sign of `e_a * e_b` in signature `(0, n)`; the product blade is `a ^ b`.
#[inline]
pub fn blade_sign(a: usize, b: usize) -> f64 {
    // Pairs (i in a, k in b) with i > k need one transposition each.
    let mut swaps = 0u32;
    let mut x = a >> 1;
    while x != 0 {
        swaps += (x & b).count_ones();
        x >>= 1;
    }
    // Each shared generator squares to -1.
    swaps += (a & b).count_ones();
    if swaps & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Clifford conjugation sign of a blade with `grade` generators.
#[inline]
pub fn conj_sign(grade: u32) -> f64 {
    match grade % 4 {
        0 | 3 => 1.0,
        _ => -1.0,
    }
}

/// Sign of `e_K^2`; equals the conjugation sign.
#[inline]
pub fn square_sign(grade: u32) -> f64 {
    conj_sign(grade)
}

/// The algebra `R_n` together with its product table.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    n: u8,
    table: Vec<f64>,
}

impl Signature {
    pub fn new(n: u8) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::UnsupportedDimension(n));
        }
        let d = 1usize << n;
        let mut table = vec![0.0; d * d];
        for a in 0..d {
            for b in 0..d {
                table[a * d + b] = blade_sign(a, b);
            }
        }
        Ok(Self { n, table })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Basis blades in index order.
    pub fn basis(&self) -> impl Iterator<Item = usize> {
        0..self.dim()
    }

    /// `e_a e_b = sign * e_{a xor b}`.
    pub fn product(&self, a: usize, b: usize) -> (f64, usize) {
        (self.table[a * self.dim() + b], a ^ b)
    }

    pub fn conj_sign(&self, k: usize) -> f64 {
        conj_sign(k.count_ones())
    }
}

/// Human-readable blade label: `""` for the scalar, `"12"` for `e_{12}`.
pub fn blade_label(k: usize) -> alloc::string::String {
    let mut s = alloc::string::String::new();
    let mut i = 0;
    let mut x = k;
    while x != 0 {
        if x & 1 == 1 {
            s.push(char::from_digit(i + 1, 10).unwrap_or('?'));
        }
        x >>= 1;
        i += 1;
    }
    s
}

/// Inverse of [`blade_label`]; digits must be strictly increasing.
pub fn parse_blade_label(s: &str, n: u8) -> Option<usize> {
    let mut k = 0usize;
    let mut last = 0u32;
    for c in s.chars() {
        let d = c.to_digit(10)?;
        if d == 0 || d > n as u32 || d <= last {
            return None;
        }
        last = d;
        k |= 1 << (d - 1);
    }
    Some(k)
}

/// An element of `R_n`.
#[derive(Clone, PartialEq)]
pub struct Multivector {
    n: u8,
    coeff: Vec<f64>,
}

impl fmt::Display for Multivector {
    /// `1 + 2e12 - 0.5e3`-style sum of nonzero terms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeff.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}e{}", blade_label(k))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector[n={}]({self})", self.n)
    }
}

impl Multivector {
    fn check_n(n: u8) {
        assert!(n <= MAX_N, "algebra dimension {n} exceeds {MAX_N}");
    }

    pub fn zero(n: u8) -> Self {
        Self::check_n(n);
        Self { n, coeff: vec![0.0; 1 << n] }
    }

    pub fn one(n: u8) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn scalar(n: u8, r: f64) -> Self {
        let mut z = Self::zero(n);
        z.coeff[0] = r;
        z
    }

    /// The basis blade `e_K`, `K` given as a bitmask.
    pub fn blade(n: u8, k: usize) -> Self {
        let mut z = Self::zero(n);
        z.coeff[k] = 1.0;
        z
    }

    /// The generator `e_i`, `1 <= i <= n`.
    pub fn generator(n: u8, i: u8) -> Self {
        assert!(i >= 1 && i <= n, "generator index out of range");
        Self::blade(n, 1 << (i - 1))
    }

    pub fn from_coeffs(n: u8, coeff: Vec<f64>) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::UnsupportedDimension(n));
        }
        if coeff.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: coeff.len() });
        }
        Ok(Self { n, coeff })
    }

    /// Quaternion `a + b i + c j + d k` in `R_2`.
    pub fn quaternion(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { n: 2, coeff: vec![a, b, c, d] }
    }

    /// `r + s j` for an axis `j`.
    pub fn from_slice(r: f64, s: f64, j: &Multivector) -> Self {
        let mut q = j.scale(s);
        q.coeff[0] += r;
        q
    }

    pub fn random<R: Rng + ?Sized>(n: u8, rng: &mut R) -> Self {
        let d = 1usize << n;
        let coeff = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        Self { n, coeff }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.coeff.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeff
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeff
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeff
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeff[k]
    }

    pub fn set_coeff(&mut self, k: usize, v: f64) {
        self.coeff[k] = v;
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeff[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.iter().all(|c| *c == 0.0)
    }

    fn same_sig(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::SignatureMismatch { left: self.n, right: other.n })
        } else {
            Ok(())
        }
    }

    /// Product with a signature check.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_sig(other)?;
        let d = self.dim();
        let mut out = vec![0.0; d];
        for (a, &x) in self.coeff.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (b, &y) in other.coeff.iter().enumerate() {
                if y == 0.0 {
                    continue;
                }
                out[a ^ b] += blade_sign(a, b) * x * y;
            }
        }
        Ok(Self { n: self.n, coeff: out })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_sig(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_sig(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let coeff = self.coeff.iter().zip(&other.coeff).map(|(a, b)| f(*a, *b)).collect();
        Self { n: self.n, coeff }
    }

    pub fn scale(&self, r: f64) -> Self {
        Self { n: self.n, coeff: self.coeff.iter().map(|c| c * r).collect() }
    }

    pub fn add_scalar(&self, r: f64) -> Self {
        let mut z = self.clone();
        z.coeff[0] += r;
        z
    }

    /// `self += r * other`.
    pub fn axpy(&mut self, r: f64, other: &Self) {
        assert_eq!(self.n, other.n, "signature mismatch");
        for (a, b) in self.coeff.iter_mut().zip(&other.coeff) {
            *a += r * b;
        }
    }

    /// Clifford conjugation `q^c`.
    pub fn conj(&self) -> Self {
        let coeff = self
            .coeff
            .iter()
            .enumerate()
            .map(|(k, c)| conj_sign(k.count_ones()) * c)
            .collect();
        Self { n: self.n, coeff }
    }

    /// `(q + q^c) / 2`: the blades fixed by conjugation.
    pub fn re(&self) -> Self {
        let coeff = self
            .coeff
            .iter()
            .enumerate()
            .map(|(k, c)| if conj_sign(k.count_ones()) > 0.0 { *c } else { 0.0 })
            .collect();
        Self { n: self.n, coeff }
    }

    /// `(q - q^c) / 2`.
    pub fn im(&self) -> Self {
        let coeff = self
            .coeff
            .iter()
            .enumerate()
            .map(|(k, c)| if conj_sign(k.count_ones()) < 0.0 { *c } else { 0.0 })
            .collect();
        Self { n: self.n, coeff }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeff.iter().map(|c| c * c).sum()
    }

    pub fn euclid_norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeff.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Real matrix of `x -> self * x` in the blade basis.
    pub fn left_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (a, &x) in self.coeff.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for h in 0..d {
                m[(a ^ h, h)] += blade_sign(a, h) * x;
            }
        }
        m
    }

    /// Real matrix of `x -> x * self` in the blade basis.
    pub fn right_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (b, &y) in self.coeff.iter().enumerate() {
            if y == 0.0 {
                continue;
            }
            for h in 0..d {
                m[(h ^ b, h)] += blade_sign(h, b) * y;
            }
        }
        m
    }

    /// `sup |x a| / |a|`: the largest singular value of left multiplication.
    ///
    /// For `n <= 2` every element lies in the cone, left multiplication is a
    /// scaled orthogonal map and the result is the Euclidean norm.
    pub fn clifford_norm(&self) -> f64 {
        if self.n <= 2 {
            return self.euclid_norm();
        }
        crate::linalg::spectral_norm(&self.left_matrix())
    }

    /// `pq - qp`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Non-scalar defect of `Re(q)` and of `q q^c`, relative to the size of `q`.
    pub fn cone_defect(&self) -> f64 {
        let scale = self.norm_sqr().max(1.0);
        let re = self.re();
        let re_defect = re.coeff[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let qqc = self * &self.conj();
        let n_defect = qqc.coeff[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
        (re_defect / libm::sqrt(scale)).max(n_defect / scale)
    }

    /// `Re(q)` and `q q^c` are both real (within `tol`).
    pub fn in_quadratic_cone(&self, tol: f64) -> bool {
        self.n <= 2 || self.cone_defect() <= tol
    }

    /// `q^c = -q` and `q^2 = -1` (within `tol`).
    pub fn in_imaginary_sphere(&self, tol: f64) -> bool {
        let a = (&self.conj() + self).max_abs();
        let b = (self * self).add_scalar(1.0).max_abs();
        a <= tol && b <= tol
    }

    /// Polar form `q = r + s j` with `s >= 0`.
    pub fn cone_decompose(&self, tol: f64) -> Result<ConeDecomposition> {
        if !self.in_quadratic_cone(tol) {
            return Err(Error::NotInCone { defect: self.cone_defect() });
        }
        let r = self.coeff[0];
        let im = self.im();
        let s = im.euclid_norm();
        let scale = self.euclid_norm().max(1.0);
        // Below rounding level the axis would be noise.
        if s <= 1e-14 * scale {
            return Ok(ConeDecomposition { r, s: 0.0, axis: None });
        }
        Ok(ConeDecomposition { r, s, axis: Some(im.scale(1.0 / s)) })
    }

    /// `(q q^c)^{-1} q^c` for a cone element.
    pub fn cone_inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Zero);
        }
        if !self.in_quadratic_cone(DEFAULT_TOL) {
            return Err(Error::NotInCone { defect: self.cone_defect() });
        }
        let conj = self.conj();
        let nn = (self * &conj).scalar_part();
        if nn == 0.0 {
            return Err(Error::Zero);
        }
        Ok(conj.scale(1.0 / nn))
    }

    /// `theta` in `[0, pi]` with `q = |q| e^{theta j}`.
    pub fn arg(&self) -> Result<f64> {
        if self.is_zero() {
            return Err(Error::Zero);
        }
        let d = self.cone_decompose(DEFAULT_TOL)?;
        Ok(libm::atan2(d.s, d.r))
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

/// `q = r + s j`, `s >= 0`; `axis` is `None` for real `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeDecomposition {
    pub r: f64,
    pub s: f64,
    pub axis: Option<Multivector>,
}

impl ConeDecomposition {
    /// The complex point `r + s i`.
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.r, self.s)
    }

    pub fn reconstruct(&self, n: u8) -> Multivector {
        match &self.axis {
            Some(j) => Multivector::from_slice(self.r, self.s, j),
            None => Multivector::scalar(n, self.r),
        }
    }
}

/// `phi_j(z) = Re z + Im z * j`.
pub fn phi(j: &Multivector, z: Complex64) -> Multivector {
    Multivector::from_slice(z.re, z.im, j)
}

/// Elements of the imaginary sphere that are not unit 1-vectors, for `n >= 3`.
///
/// Blades `e_K` with `|K| = 1, 2 mod 4` and `|K| >= 2`, plus normalised sums of
/// two anticommuting bivectors.
pub fn sphere_roster(n: u8) -> Vec<Multivector> {
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    let d = 1usize << n;
    for k in 0..d {
        let g = k.count_ones();
        if g >= 2 && matches!(g % 4, 1 | 2) {
            out.push(Multivector::blade(n, k));
        }
    }
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let mut e12_e13 = Multivector::zero(n);
    e12_e13.coeff[0b011] = h;
    e12_e13.coeff[0b101] = h;
    out.push(e12_e13);
    out
}

/// Deterministic samples of the imaginary sphere of `R_n`.
///
/// Unit 1-vectors; for `n >= 3` every fourth sample is drawn (cyclically)
/// from [`sphere_roster`].
pub fn sample_imaginary_sphere(n: u8, seed: u64, count: usize) -> Result<Vec<Multivector>> {
    use rand::SeedableRng;
    if n == 0 || n > MAX_N {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let roster = sphere_roster(n);
    let mut out = Vec::with_capacity(count);
    let mut next_roster = 0;
    for i in 0..count {
        if !roster.is_empty() && i % 4 == 3 {
            out.push(roster[next_roster % roster.len()].clone());
            next_roster += 1;
            continue;
        }
        let mut v = Multivector::zero(n);
        loop {
            let mut nn = 0.0;
            for g in 0..n {
                let x: f64 = rng.sample(StandardNormal);
                v.coeff[1 << g] = x;
                nn += x * x;
            }
            if nn > 1e-12 {
                let inv = 1.0 / libm::sqrt(nn);
                for g in 0..n {
                    v.coeff[1 << g] *= inv;
                }
                break;
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// A random element of the quadratic cone: `r + s j` with random `j`.
pub fn random_cone_element<R: Rng + ?Sized>(n: u8, rng: &mut R) -> Multivector {
    let seed: u64 = rng.random();
    let j = sample_imaginary_sphere(n, seed, 4).expect("valid n")[(seed % 4) as usize].clone();
    let r: f64 = rng.sample(StandardNormal);
    let s: f64 = rng.sample(StandardNormal);
    Multivector::from_slice(r, s, &j)
}

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        self.checked_add(rhs).expect("signature mismatch")
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        self.checked_sub(rhs).expect("signature mismatch")
    }
}

/// Panics on signature mismatch; use [`Multivector::checked_mul`] to get an error.
impl Mul for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &Multivector) -> Multivector {
        self.checked_mul(rhs).expect("signature mismatch")
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Multivector {
            type Output = Multivector;
            fn $m(self, rhs: Multivector) -> Multivector {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl AddAssign<&Multivector> for Multivector {
    fn add_assign(&mut self, rhs: &Multivector) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&Multivector> for Multivector {
    fn sub_assign(&mut self, rhs: &Multivector) {
        self.axpy(-1.0, rhs);
    }
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;
    use alloc::collections::BTreeMap;
    use alloc::string::String;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        n: u8,
        coeff: BTreeMap<String, f64>,
    }

    impl Serialize for Multivector {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            let coeff = self
                .coeff
                .iter()
                .enumerate()
                .filter(|(_, c)| c.to_bits() != 0)
                .map(|(k, c)| (blade_label(k), *c))
                .collect();
            Repr { n: self.n, coeff }.serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for Multivector {
        fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            let r = Repr::deserialize(d)?;
            if r.n > MAX_N {
                return Err(D::Error::custom("algebra dimension too large"));
            }
            let mut m = Multivector::zero(r.n);
            for (label, c) in r.coeff {
                let k = parse_blade_label(&label, r.n)
                    .ok_or_else(|| D::Error::custom(alloc::format!("bad blade label {label:?}")))?;
                m.coeff[k] = c;
            }
            Ok(m)
        }
    }
}
