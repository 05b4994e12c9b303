//! Slice-regular operator calculus over the Clifford algebras `R_n`.
//!
//! `no_std` with `alloc`. The companion crate `sliceop` carries file formats,
//! reports and the command line front end.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
// `!(x > y)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod algebra;
pub mod error;
pub mod linalg;
pub mod operator;
pub mod quad;
pub mod semigroup;
pub mod slice;

pub use algebra::{ConeDecomposition, Multivector, Signature};
pub use error::{Error, Result};
pub use operator::{ModuleVector, RealEmbedding, RightLinearOperator};
pub use slice::{Stem, Value};
