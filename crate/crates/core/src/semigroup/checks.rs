//! Report-producing checks of semigroup identities and estimates.

use alloc::format;
use alloc::vec::Vec;

use super::contour::{ContourSemigroup, ContourSpec};
use super::report::{CheckRecord, SemigroupReport};
use super::{commute, exp_semigroup_embedding, resolvent_slice_power, semigroup_stems};
use crate::algebra::{phi, Multivector, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::operator::{q_from_c_residual, sectorial_probe, ProbeGrid, RealEmbedding, RightLinearOperator, SphericalCalculus};
use crate::slice::{stem_mul, Value};

fn rel(a: &RealEmbedding, b: &RealEmbedding) -> f64 {
    let s = a.norm_upper().max(b.norm_upper());
    if s == 0.0 {
        0.0
    } else {
        a.sub(b).norm_upper() / s
    }
}

fn as_op(v: Value) -> Result<RealEmbedding> {
    match v {
        Value::Op(t) => Ok(t),
        Value::Alg(_) => Err(Error::CodomainMismatch("expected an operator value")),
    }
}

/// `T(p+q)` against `(T . T(q))(p)`, where `T(q)` enters as a constant stem,
/// plus the pointwise defect `T(p+q) - T(p) T(q)` as a diagnostic.
pub fn semigroup_law_check(a: &RightLinearOperator, p: &Multivector, q: &Multivector, tol: f64) -> Result<SemigroupReport> {
    commute(p, q)?;
    let pq = p + q;
    for x in [p, q, &pq] {
        if !x.in_quadratic_cone(DEFAULT_TOL) {
            return Err(Error::NotInCone { defect: x.cone_defect() });
        }
    }
    let stem = semigroup_stems(a, 1e-15)?;
    let lhs = as_op(stem.induce(&pq)?)?;
    let tq = as_op(stem.induce(q)?)?;
    let tp = as_op(stem.induce(p)?)?;
    let d = p.cone_decompose(DEFAULT_TOL)?;
    let pair = stem_mul(&stem.eval(d.z())?, &(Value::Op(tq.clone()), Value::zero(stem.codomain())))?;
    let rhs = match &d.axis {
        Some(j) => as_op(pair.0.add(&pair.1.right_scalar(j))?)?,
        None => as_op(pair.0)?,
    };
    let operands = format!("p = {p}; q = {q}");
    let mut rep = SemigroupReport::new();
    rep.push(CheckRecord::check("law.slice", "T(p+q) = T(p) (.)_p T(q)", operands.clone(), rel(&lhs, &rhs), tol));
    rep.push(CheckRecord::diagnostic(
        "law.pointwise_defect",
        "T(p+q) - T(p) T(q)",
        operands,
        rel(&lhs, &tp.compose(&tq)),
    ));
    Ok(rep)
}

/// `sup_t ||T(t)|| e^{-wt}` over a grid.
fn growth_constant_on(a: &RightLinearOperator, omega: f64, t_grid: &[f64]) -> Result<f64> {
    let e = a.embed();
    let mut m = 0.0f64;
    for &t in t_grid {
        let tt = exp_semigroup_embedding(&e, &Multivector::scalar(a.n(), t), 1e-15)?;
        m = m.max(tt.norm_upper() * libm::exp(-omega * t));
    }
    Ok(m)
}

/// `||C_q(A)^{.k}|| <= M / (Re q - w)^k` on samples, after checking
/// `||T(t)|| <= M e^{wt}` for `t` in `[0, 5]`. Norms are the certified
/// upper bounds.
pub fn laplace_norm_bound_check(
    a: &RightLinearOperator,
    omega: f64,
    m: f64,
    samples: &[Multivector],
    k_max: u32,
) -> Result<SemigroupReport> {
    let mut rep = SemigroupReport::new();
    let t_grid: Vec<f64> = (0..=50).map(|i| 0.1 * i as f64).collect();
    let mg = growth_constant_on(a, omega, &t_grid)?;
    rep.push(CheckRecord::check(
        "laplace_bound.growth",
        "||T(t)|| <= M e^{wt}",
        format!("w = {omega}; M = {m}; t in [0, 5]"),
        mg / m,
        1.0 + 1e-9,
    ));
    for k in 1..=k_max {
        let mut worst = 0.0f64;
        let mut used = 0;
        for q in samples {
            let c = q.scalar_part() - omega;
            if !(c > 0.0) {
                continue;
            }
            let ck = resolvent_slice_power(a, q, k)?;
            worst = worst.max(ck.norm_upper() * libm::pow(c, k as f64) / m);
            used += 1;
        }
        rep.push(CheckRecord::check(
            &format!("laplace_bound.k{k}"),
            "||C_q(A)^{.k}|| <= M / (Re q - w)^k",
            format!("w = {omega}; M = {m}; {used} samples"),
            worst,
            1.0 + 1e-9,
        ));
    }
    Ok(rep)
}

/// Sample set for [`growth_bound_check`].
#[derive(Debug, Clone)]
pub struct GrowthGrid {
    pub radii: Vec<f64>,
    pub axes: Vec<Multivector>,
    /// Angles per ray family, evenly spaced in `[0, delta']`.
    pub angles: usize,
    /// Flag values of `M` above this.
    pub m_cap: f64,
}

/// `M_{delta'} = sup ||T(q)|| e^{-w Re q}` over `q = rho e^{theta k}`,
/// `|theta| <= delta'`, with `T(q)` from the contour integral; also checks
/// that the estimate does not decrease as `delta'` grows.
pub fn growth_bound_check(
    a: &RightLinearOperator,
    spec: &ContourSpec,
    delta_prime: f64,
    omega: f64,
    grid: &GrowthGrid,
) -> Result<SemigroupReport> {
    if !(delta_prime >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta' = {delta_prime}")));
    }
    let mut engine = ContourSemigroup::new(a, spec.clone())?;
    let na = grid.angles.max(1);
    let mut per_angle = alloc::vec![0.0f64; na + 1];
    for &rho in &grid.radii {
        for (i, slot) in per_angle.iter_mut().enumerate() {
            let th = delta_prime * i as f64 / na as f64;
            for k in &grid.axes {
                let q = phi(k, num_complex::Complex64::from_polar(rho, th));
                let t = engine.slice(&Multivector::zero(a.n()), &q)?.value;
                *slot = slot.max(t.norm_upper() * libm::exp(-omega * q.scalar_part()));
            }
        }
    }
    // Running sup over angles <= theta_i.
    let mut running = Vec::with_capacity(per_angle.len());
    let mut acc = 0.0f64;
    for v in &per_angle {
        acc = acc.max(*v);
        running.push(acc);
    }
    let m_full = *running.last().unwrap_or(&0.0);
    let m_half = running[na / 2];
    let operands = format!("w = {omega}; delta' = {delta_prime}; {} radii", grid.radii.len());
    let mut rep = SemigroupReport::new();
    rep.push(CheckRecord::check(
        "growth.m_delta",
        "||T(q)|| <= M_{delta'} e^{w Re q}",
        operands.clone(),
        m_full,
        grid.m_cap,
    ));
    rep.push(CheckRecord::check(
        "growth.monotone",
        "M_{delta'/2} <= M_{delta'}",
        operands,
        (m_half - m_full).max(0.0),
        1e-12 * m_full.max(1.0),
    ));
    Ok(rep)
}

/// Sample set for [`converse_sectoriality_check`].
#[derive(Debug, Clone)]
pub struct ConverseGrid {
    pub delta: f64,
    pub probe: ProbeGrid,
    /// Cone samples; nonreal ones feed the Q-from-C identity and those with
    /// `Re q > w` the half-plane estimate.
    pub q_samples: Vec<Multivector>,
    pub t_grid: Vec<f64>,
    pub k_cap: f64,
}

/// Sectoriality of a generator: the identity `Q_p = (C_{p^c} - C_p)(2 Im p)^{-1}`,
/// the bound `||C_q|| <= K / |q - w|` on `w + Omega_{pi/2 + delta}`, and the
/// half-plane estimate `||C_q|| <= M / (Re q - w)`.
pub fn converse_sectoriality_check(a: &RightLinearOperator, omega: f64, grid: &ConverseGrid) -> Result<SemigroupReport> {
    let mut rep = SemigroupReport::new();
    let mut worst = 0.0f64;
    let mut used = 0;
    for p in grid.q_samples.iter().filter(|p| p.im().euclid_norm() > 1e-8) {
        worst = worst.max(q_from_c_residual(a, p)?);
        used += 1;
    }
    rep.push(CheckRecord::check(
        "converse.q_from_c",
        "Q_p(A) = (C_{p^c}(A) - C_p(A)) (2 Im p)^{-1}",
        format!("{used} nonreal samples"),
        worst,
        1e-10,
    ));

    let probe = sectorial_probe(a, omega, grid.delta, &grid.probe)?;
    let k = if probe.in_resolvent { probe.k_estimate } else { f64::INFINITY };
    rep.push(CheckRecord::check(
        "converse.sector_k",
        "||C_q(A)|| <= K / |q - w|",
        format!("w = {omega}; delta = {}; {} probes", grid.delta, probe.probes),
        k,
        grid.k_cap,
    ));

    let m = growth_constant_on(a, omega, &grid.t_grid)?;
    rep.push(CheckRecord::diagnostic("converse.growth_m", "sup_t ||T(t)|| e^{-wt}", format!("w = {omega}"), m));
    let calc = SphericalCalculus::new(a);
    let mut ratio = 0.0f64;
    let mut used = 0;
    for q in &grid.q_samples {
        let c = q.scalar_part() - omega;
        if c > 0.0 {
            ratio = ratio.max(calc.spherical_c(q)?.norm_upper() * c / m);
            used += 1;
        }
    }
    rep.push(CheckRecord::check(
        "converse.half_plane",
        "||C_q(A)|| <= M / (Re q - w)",
        format!("w = {omega}; M = {m}; {used} samples"),
        ratio,
        1.0 + 1e-9,
    ));
    Ok(rep)
}

