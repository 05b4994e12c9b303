//! Noncommutative exponentials `exp_p^x`.
//!
//! The stem is evaluated in closed form: with `p = p_r + p_s j`, the values at
//! `q = phi_j(z)` and `q^c` are `exp^x(p + q)` and `exp^x(p + q^c)` (both
//! arguments commute with `p`), and the stem is recovered from them. The
//! unshifted stem `exp(zeta x)` in `A (x) C` uses complex exponentials when
//! `x` is in the cone and scaling and squaring otherwise. The plain binomial
//! series is kept as [`exp_series_eval`] for cross-checks; it loses accuracy
//! to cancellation once `|x| (|p| + |q|)` is large.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::value::Value;
use super::{shifted_power_pair, stem_mul, StemPair};
use crate::algebra::{phi, Multivector, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::quad::neville_at_zero;

/// `t = 10^{-1}, 10^{-1.5}, ..., 10^{-3}`.
pub const DEFAULT_DEFECT_GRID: [f64; 5] = [1e-1, 0.031_622_776_601_683_79, 1e-2, 0.0031622776601683794, 1e-3];

const MAX_TERMS: usize = 400;

/// Upper bound on `|x|` cheap enough for step-size choices.
fn rough_norm(x: &Value) -> f64 {
    match x {
        Value::Alg(a) if a.n() <= 2 => a.euclid_norm(),
        Value::Alg(a) => a.coeffs().iter().map(|c| c.abs()).sum(),
        Value::Op(t) => t.frobenius(),
    }
}

pub(crate) fn exp_eval(x: &Value, p: &Multivector, z: Complex64, tol: f64) -> Result<StemPair> {
    let d = p.cone_decompose(DEFAULT_TOL)?;
    let j = match d.axis {
        None => return exp_unshifted(x, z + d.r, tol),
        Some(j) => j,
    };
    let plus = Complex64::new(d.r + z.re, d.s + z.im);
    let minus = Complex64::new(d.r + z.re, d.s - z.im);
    let (a1, a2) = exp_unshifted(x, plus, tol)?;
    let (b1, b2) = exp_unshifted(x, minus, tol)?;
    let fq = a1.add(&a2.right_scalar(&j))?;
    let fqc = b1.add(&b2.right_scalar(&j))?;
    let f1 = fq.add(&fqc)?.scale(0.5);
    let f2 = fq.sub(&fqc)?.right_scalar(&j).scale(-0.5);
    Ok((f1, f2))
}

/// Stem of `exp(zeta x)` in `A (x) C`.
fn exp_unshifted(x: &Value, zeta: Complex64, _tol: f64) -> Result<StemPair> {
    if let Value::Alg(a) = x {
        if a.in_quadratic_cone(1e-13) {
            return Ok(exp_cone(a, zeta));
        }
    }
    exp_scaling_squaring(x, zeta)
}

/// `x = a + b j_x` in the cone: both stem-space idempotent components are
/// ordinary complex exponentials in `C_{j_x}`.
fn exp_cone(x: &Multivector, zeta: Complex64) -> StemPair {
    let n = x.n();
    let d = x.cone_decompose(1e-13).expect("checked");
    match d.axis {
        None => {
            let e = (zeta * d.r).exp();
            (Value::Alg(Multivector::scalar(n, e.re)), Value::Alg(Multivector::scalar(n, e.im)))
        }
        Some(jx) => {
            let w = Complex64::new(d.r, d.s);
            let ep = phi(&jx, (w * zeta).exp());
            let em = phi(&jx, (w * zeta.conj()).exp());
            let f1 = (&ep + &em).scale(0.5);
            let f2 = &(&ep - &em) * &jx.scale(-0.5);
            (Value::Alg(f1), Value::Alg(f2))
        }
    }
}

fn exp_scaling_squaring(x: &Value, zeta: Complex64) -> Result<StemPair> {
    let c = x.codomain();
    let size = rough_norm(x) * zeta.norm();
    let mut s = 0u32;
    while size / libm::ldexp(1.0, s as i32) > 0.25 {
        s += 1;
    }
    let w = zeta / libm::ldexp(1.0, s as i32);
    let mut f1 = Value::one(c);
    let mut f2 = Value::zero(c);
    let mut xp = Value::one(c);
    let mut wk = Complex64::new(1.0, 0.0);
    let mut fact = 1.0;
    let nu = rough_norm(x) * w.norm();
    let mut bound = 1.0;
    for k in 1..60 {
        xp = xp.mul(x)?;
        wk *= w;
        fact *= k as f64;
        f1.axpy(wk.re / fact, &xp)?;
        f2.axpy(wk.im / fact, &xp)?;
        bound *= nu / k as f64;
        if bound < 1e-18 {
            break;
        }
    }
    let mut pair = (f1, f2);
    for _ in 0..s {
        pair = stem_mul(&pair, &pair)?;
    }
    Ok(pair)
}

/// Truncated binomial series `sum x^n / n! (p + z)^n`, stopping once
/// `10 C (|x| (|p| + |z|))^{n+1} / (n+1)!` drops below `tol` (relative), where
/// `C` is the running estimate of `|(p+z)^n| / (|p| + |z|)^n`.
///
/// Returns the stem pair and the number of terms used.
pub fn exp_series_eval(x: &Value, p: &Multivector, z: Complex64, tol: f64) -> Result<(StemPair, usize)> {
    let c = x.codomain();
    let nu = rough_norm(x);
    let base = p.euclid_norm() + z.norm();
    let mut sum = (Value::one(c), Value::zero(c));
    let mut xp = Value::one(c);
    let mut growth = 1.0f64;
    let mut fact = 1.0;
    let mut scale_pow = 1.0;
    // (p + z)^n pair, built incrementally.
    let (mut g1, mut g2) = (Multivector::one(p.n()), Multivector::zero(p.n()));
    for n in 1..MAX_TERMS {
        let (h1, h2) = shifted_power_pair(p, 1, z);
        // (p + z) (g1 + i g2), with (p + z) = h1 + i h2.
        let n1 = &(&h1 * &g1) - &(&h2 * &g2);
        let n2 = &(&h1 * &g2) + &(&h2 * &g1);
        g1 = n1;
        g2 = n2;
        xp = xp.mul(x)?;
        fact *= n as f64;
        scale_pow *= base;
        let t1 = xp.right_scalar(&g1).scale(1.0 / fact);
        let t2 = xp.right_scalar(&g2).scale(1.0 / fact);
        sum.0 = sum.0.add(&t1)?;
        sum.1 = sum.1.add(&t2)?;
        if scale_pow > 0.0 {
            growth = growth.max(libm::hypot(g1.euclid_norm(), g2.euclid_norm()) / scale_pow);
        }
        let next_bound = growth * libm::pow(nu * base, (n + 1) as f64) / (fact * (n + 1) as f64);
        let size = sum.0.frobenius().max(sum.1.frobenius()).max(1.0);
        if 10.0 * next_bound < tol * size {
            return Ok((sum, n + 1));
        }
    }
    Ok((sum, MAX_TERMS))
}

/// `max |(p + q)^{.n}| / (|p| + |q|)^n` over the samples and `n <= n_max`.
pub fn growth_constant(p: &Multivector, qs: &[Multivector], n_max: u32) -> Result<f64> {
    let mut c = 1.0f64;
    for q in qs {
        let d = q.cone_decompose(DEFAULT_TOL)?;
        let base = p.clifford_norm() + q.clifford_norm();
        if base == 0.0 {
            continue;
        }
        for n in 1..=n_max {
            let (f1, f2) = shifted_power_pair(p, n, d.z());
            let v = match &d.axis {
                Some(j) => &f1 + &(&f2 * j),
                None => f1,
            };
            c = c.max(v.clifford_norm() / libm::pow(base, n as f64));
        }
    }
    Ok(c)
}

fn binomials(n: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for k in 1..=n {
        let prev = row[k - 1];
        row.push(prev * (n + 1 - k) as f64 / k as f64);
    }
    row
}

/// Extrapolate `2 E(t) / t^2` to `t = 0`, where
/// `E(t) = exp_{tp}^x(tq) - exp^x(t(p+q))`.
///
/// `E(t) = sum_{n>=2} t^n x^n / n! (sum_k C(n,k) p^{n-k} q^k - (p+q)^n)` is
/// summed term by term (the `n = 1` terms cancel identically), which avoids
/// subtracting two nearly equal exponentials. The limit is `x^2 (pq - qp)`.
pub fn exp_defect_limit(x: &Value, p: &Multivector, q: &Multivector, t_grid: &[f64]) -> Result<Value> {
    if t_grid.len() < 3 {
        return Err(Error::BadGrid("need at least three points"));
    }
    if t_grid.iter().any(|t| !(*t > 0.0 && *t <= 0.5)) {
        return Err(Error::BadGrid("grid points must lie in (0, 0.5]"));
    }
    let c = x.codomain();
    if c.n() != p.n() || p.n() != q.n() {
        return Err(Error::SignatureMismatch { left: p.n(), right: q.n() });
    }
    let t_max = t_grid.iter().fold(0.0f64, |a, b| a.max(*b));
    let nu = rough_norm(x) * (p.euclid_norm() + q.euclid_norm());
    let pq = p + q;
    let mut terms: Vec<Value> = Vec::new();
    let (mut pp, mut qp) = (vec![Multivector::one(p.n())], vec![Multivector::one(p.n())]);
    let mut xp = Value::one(c);
    let mut sum_pow = Multivector::one(p.n());
    let mut fact = 1.0;
    let mut bound = 1.0;
    for n in 1..MAX_TERMS {
        pp.push(&pp[n - 1] * p);
        qp.push(&qp[n - 1] * q);
        sum_pow = &sum_pow * &pq;
        xp = xp.mul(x)?;
        fact *= n as f64;
        if n == 1 {
            continue;
        }
        let bin = binomials(n);
        let mut b = Multivector::zero(p.n());
        for k in 0..=n {
            b.axpy(bin[k], &(&pp[n - k] * &qp[k]));
        }
        let dn = &b - &sum_pow;
        terms.push(xp.right_scalar(&dn).scale(2.0 / fact));
        bound *= if n == 2 { nu * nu / 2.0 } else { nu * t_max / n as f64 };
        if n > 4 && bound * (1u64 << n.min(60)) as f64 <= 1e-18 * (1.0 + nu * nu) {
            break;
        }
    }
    let ys: Vec<Vec<f64>> = t_grid
        .iter()
        .map(|&t| {
            let mut acc = Value::zero(c);
            let mut tp = 1.0;
            for v in &terms {
                acc.axpy(tp, v).expect("same codomain");
                tp *= t;
            }
            acc.to_flat()
        })
        .collect();
    let (lim, _) = neville_at_zero(t_grid, &ys)?;
    Value::from_flat(c, lim)
}
