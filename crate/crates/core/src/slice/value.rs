use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::algebra::Multivector;
use crate::error::{Error, Result};
use crate::operator::RealEmbedding;

/// Where stem values live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Codomain {
    Algebra { n: u8 },
    Operator { n: u8, m: usize },
}

impl Codomain {
    pub fn n(&self) -> u8 {
        match self {
            Codomain::Algebra { n } | Codomain::Operator { n, .. } => *n,
        }
    }
}

/// A stem or slice-function value: an algebra element or an operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Alg(Multivector),
    Op(RealEmbedding),
}

impl From<Multivector> for Value {
    fn from(v: Multivector) -> Self {
        Value::Alg(v)
    }
}

impl From<RealEmbedding> for Value {
    fn from(v: RealEmbedding) -> Self {
        Value::Op(v)
    }
}

impl Value {
    pub fn codomain(&self) -> Codomain {
        match self {
            Value::Alg(a) => Codomain::Algebra { n: a.n() },
            Value::Op(t) => Codomain::Operator { n: t.n(), m: t.m() },
        }
    }

    pub fn zero(c: Codomain) -> Self {
        match c {
            Codomain::Algebra { n } => Value::Alg(Multivector::zero(n)),
            Codomain::Operator { n, m } => Value::Op(RealEmbedding::zero(n, m)),
        }
    }

    pub fn one(c: Codomain) -> Self {
        Self::lift(c, &Multivector::one(c.n()))
    }

    /// `a` itself, or the operator `a Id`.
    pub fn lift(c: Codomain, a: &Multivector) -> Self {
        match c {
            Codomain::Algebra { .. } => Value::Alg(a.clone()),
            Codomain::Operator { m, .. } => Value::Op(RealEmbedding::left_mult(a, m)),
        }
    }

    pub fn as_alg(&self) -> Option<&Multivector> {
        match self {
            Value::Alg(a) => Some(a),
            Value::Op(_) => None,
        }
    }

    pub fn as_op(&self) -> Option<&RealEmbedding> {
        match self {
            Value::Op(t) => Some(t),
            Value::Alg(_) => None,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.codomain() == other.codomain() {
            Ok(())
        } else {
            Err(Error::CodomainMismatch("values live in different spaces"))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(match (self, other) {
            (Value::Alg(a), Value::Alg(b)) => Value::Alg(a + b),
            (Value::Op(a), Value::Op(b)) => Value::Op(a.add(b)),
            _ => unreachable!(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(match (self, other) {
            (Value::Alg(a), Value::Alg(b)) => Value::Alg(a - b),
            (Value::Op(a), Value::Op(b)) => Value::Op(a.sub(b)),
            _ => unreachable!(),
        })
    }

    /// `self += r * other`.
    pub fn axpy(&mut self, r: f64, other: &Self) -> Result<()> {
        self.check(other)?;
        match (self, other) {
            (Value::Alg(a), Value::Alg(b)) => a.axpy(r, b),
            (Value::Op(a), Value::Op(b)) => a.axpy(r, b),
            _ => unreachable!(),
        }
        Ok(())
    }

    pub fn scale(&self, r: f64) -> Self {
        match self {
            Value::Alg(a) => Value::Alg(a.scale(r)),
            Value::Op(t) => Value::Op(t.scale(r)),
        }
    }

    /// Algebra product or operator composition `self o other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(match (self, other) {
            (Value::Alg(a), Value::Alg(b)) => Value::Alg(a * b),
            (Value::Op(a), Value::Op(b)) => Value::Op(a.compose(b)),
            _ => unreachable!(),
        })
    }

    /// `v q` for algebra values, `T o L_q` for operators.
    pub fn right_scalar(&self, q: &Multivector) -> Self {
        match self {
            Value::Alg(a) => Value::Alg(a * q),
            Value::Op(t) => Value::Op(t.right_scalar(q)),
        }
    }

    /// `q v` for algebra values, `L_q o T` for operators.
    pub fn left_scalar(&self, q: &Multivector) -> Self {
        match self {
            Value::Alg(a) => Value::Alg(q * a),
            Value::Op(t) => Value::Op(t.left_scalar(q)),
        }
    }

    /// Clifford operator norm, or the certified upper bound of the operator norm.
    pub fn norm(&self) -> f64 {
        match self {
            Value::Alg(a) => a.clifford_norm(),
            Value::Op(t) => t.norm_upper(),
        }
    }

    /// Cheap norm for convergence tests (Euclidean / Frobenius).
    pub fn frobenius(&self) -> f64 {
        match self {
            Value::Alg(a) => a.euclid_norm(),
            Value::Op(t) => t.frobenius(),
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        match self {
            Value::Alg(a) => a.coeffs().to_vec(),
            Value::Op(t) => t.matrix().as_slice().to_vec(),
        }
    }

    pub fn from_flat(c: Codomain, v: Vec<f64>) -> Result<Self> {
        Ok(match c {
            Codomain::Algebra { n } => Value::Alg(Multivector::from_coeffs(n, v)?),
            Codomain::Operator { n, m } => {
                let d = (1usize << n) * m;
                if v.len() != d * d {
                    return Err(Error::DimensionMismatch { expected: d * d, got: v.len() });
                }
                Value::Op(RealEmbedding::from_matrix(n, m, DMatrix::from_vec(d, d, v))?)
            }
        })
    }

    /// `sum_{n} self^n r^n / n!`-type power.
    pub fn powi(&self, e: u32) -> Self {
        let mut acc = Value::one(self.codomain());
        for _ in 0..e {
            acc = acc.mul(self).expect("same codomain");
        }
        acc
    }
}
