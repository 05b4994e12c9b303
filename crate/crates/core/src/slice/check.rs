//! Representation formula and regularity diagnostics.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::domain::Domain;
use super::value::Value;
use super::Stem;
use crate::algebra::{sample_imaginary_sphere, Multivector};
use crate::error::{Error, Result};

/// `f(r + s k) = (f(q) + f(q^c))/2 - (f(q) - f(q^c)) j k / 2`, `q = r + s j`.
pub fn representation_extend(fq: &Value, fqc: &Value, j: &Multivector, k: &Multivector) -> Result<Value> {
    if !j.in_imaginary_sphere(1e-10) || !k.in_imaginary_sphere(1e-10) {
        return Err(Error::NotInSphere);
    }
    let jk = j * k;
    let even = fq.add(fqc)?.scale(0.5);
    let odd = fq.sub(fqc)?.right_scalar(&jk).scale(0.5);
    even.sub(&odd)
}

/// Where the representation formula failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceWitness {
    pub r: f64,
    pub s: f64,
    pub j: Multivector,
    pub k: Multivector,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceVerdict {
    pub is_slice: bool,
    pub max_defect: f64,
    pub samples: usize,
    /// The worst tuple, present when the check fails.
    pub witness: Option<SliceWitness>,
}

/// Number of `(r, s)` points and axis pairs sampled by [`is_right_slice`].
pub const SLICE_POINTS: usize = 64;
pub const SLICE_AXIS_PAIRS: usize = 4;

/// Test the representation formula for `f` at random `(r, s, j, k)` with
/// `r + s i` in `region` and `s > tol`.
pub fn is_right_slice<F>(f: F, n: u8, region: &Domain, tol: f64, seed: u64) -> Result<SliceVerdict>
where
    F: Fn(&Multivector) -> Result<Value>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axes = sample_imaginary_sphere(n, seed ^ 0x5eed, 2 * SLICE_AXIS_PAIRS)?;
    let mut pts: Vec<Complex64> = Vec::with_capacity(SLICE_POINTS);
    while pts.len() < SLICE_POINTS {
        let z = region.sample(&mut rng).ok_or_else(|| {
            Error::InvalidParameter(alloc::string::String::from("cannot sample the region"))
        })?;
        if z.im > tol.max(1e-8) {
            pts.push(z);
        }
    }
    let mut verdict = SliceVerdict { is_slice: true, max_defect: 0.0, samples: 0, witness: None };
    let mut worst: Option<SliceWitness> = None;
    for z in pts {
        for pair in axes.chunks(2) {
            let (j, k) = (&pair[0], &pair[1]);
            let fq = f(&Multivector::from_slice(z.re, z.im, j))?;
            let fqc = f(&Multivector::from_slice(z.re, -z.im, j))?;
            let target = f(&Multivector::from_slice(z.re, z.im, k))?;
            let ext = representation_extend(&fq, &fqc, j, k)?;
            let defect = target.sub(&ext)?.norm() / target.norm().max(1.0);
            verdict.samples += 1;
            if defect > verdict.max_defect {
                verdict.max_defect = defect;
                worst = Some(SliceWitness { r: z.re, s: z.im, j: j.clone(), k: k.clone(), defect });
            }
        }
    }
    verdict.is_slice = verdict.max_defect <= tol;
    if !verdict.is_slice {
        verdict.witness = worst;
    }
    Ok(verdict)
}

/// `max(|d_r F1 - d_s F2|, |d_s F1 + d_r F2|)` by centred differences.
pub fn cr_residual(stem: &Stem, z: Complex64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("step h = {h}")));
    }
    let dr = Complex64::new(h, 0.0);
    let ds = Complex64::new(0.0, h);
    let (rp1, rp2) = stem.eval(z + dr)?;
    let (rm1, rm2) = stem.eval(z - dr)?;
    let (sp1, sp2) = stem.eval(z + ds)?;
    let (sm1, sm2) = stem.eval(z - ds)?;
    let inv = 1.0 / (2.0 * h);
    let d_r1 = rp1.sub(&rm1)?.scale(inv);
    let d_r2 = rp2.sub(&rm2)?.scale(inv);
    let d_s1 = sp1.sub(&sm1)?.scale(inv);
    let d_s2 = sp2.sub(&sm2)?.scale(inv);
    let a = d_r1.sub(&d_s2)?.norm();
    let b = d_s1.add(&d_r2)?.norm();
    Ok(a.max(b))
}

/// `cr_residual(h) / cr_residual(h/2)`; close to 4 for holomorphic stems.
pub fn cr_richardson_ratio(stem: &Stem, z: Complex64, h: f64) -> Result<f64> {
    Ok(cr_residual(stem, z, h)? / cr_residual(stem, z, 0.5 * h)?)
}
