//! Named verification tasks.
//!
//! Parameters are parsed (and unknown names rejected) by [`TaskPlan::parse`]
//! before anything is computed.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value as Json;

use sliceop_core::algebra::{phi, sample_imaginary_sphere};
use sliceop_core::operator::{
    q_from_c_residual, right_eigenpair, sectorial_probe, spherical_spectrum, verify_qrr, ProbeGrid, SphericalCalculus,
    RESOLVENT_REL_TOL,
};
use sliceop_core::semigroup::{
    exp_semigroup, generator_estimate, laplace_norm_bound_check, laplace_transform, memo_exp_provider,
    resolvent_slice_power, semigroup_law_check, semigroup_stems, yosida_approximant, CheckRecord,
    ContourSemigroup, ContourSpec, LaplaceSpec, SemigroupReport,
};
use sliceop_core::slice::{
    cr_richardson_ratio, exp_defect_limit, exp_stem, is_right_slice, shifted_slice_power, slice_product, Domain, Stem,
    Value,
};
use sliceop_core::{ModuleVector, Multivector, RealEmbedding, RightLinearOperator};

use crate::error::CliError;
use crate::fixtures;
use crate::formats::{fmt_f64, Table};
use crate::scan::{scan_rows, scan_table, ScanGrid};

/// Every task name accepted in job files and on the command line.
pub const TASK_NAMES: &[&str] = &[
    "algebra", "slice", "remark58", "spectrum", "resolvent", "probe", "scan", "semigroup", "contour", "laplace", "law",
    "yosida", "defect", "suite",
];

/// Shared run settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskCtx {
    pub seed: u64,
    /// Overrides the default tolerance of tasks that have one.
    pub tol: Option<f64>,
}

/// Output of one task: checks plus named CSV tables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TaskOutput {
    pub report: SemigroupReport,
    pub tables: Vec<(String, Table)>,
}

impl TaskOutput {
    fn merge(&mut self, other: TaskOutput) {
        self.report.extend(other.report);
        self.tables.extend(other.tables);
    }
}

fn params<T: DeserializeOwned + Default>(name: &str, p: &Json) -> Result<T, CliError> {
    if p.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(p.clone()).map_err(|e| CliError::input(format!("task {name}: {e}")))
}

fn max_rel(a: &RealEmbedding, b: &RealEmbedding) -> f64 {
    let s = a.norm_upper().max(b.norm_upper());
    if s == 0.0 {
        0.0
    } else {
        a.sub(b).norm_upper() / s
    }
}

fn check(id: &str, anchor: &str, operands: impl Into<String>, residual: f64, tol: f64) -> CheckRecord {
    CheckRecord::check(id, anchor, operands.into(), residual, tol)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResolventParams {
    pub samples: usize,
    pub tol: f64,
}

impl Default for ResolventParams {
    fn default() -> Self {
        Self { samples: 20, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeParams {
    pub omega: f64,
    pub delta: f64,
    pub k_cap: f64,
}

impl Default for ProbeParams {
    fn default() -> Self {
        Self { omega: 0.0, delta: 0.4, k_cap: 1e6 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanParams {
    pub omega: f64,
    pub delta: f64,
    pub radii: Vec<f64>,
    pub angles: usize,
    pub axes: usize,
}

impl Default for ScanParams {
    fn default() -> Self {
        let radii = (0..=8).map(|i| 10f64.powf(-2.0 + 0.5 * i as f64)).collect();
        Self { omega: 0.0, delta: 0.4, radii, angles: 8, axes: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemigroupParams {
    pub t: Vec<f64>,
    pub omega: f64,
    pub radii: Vec<f64>,
    /// Contour angles as multiples of pi.
    pub eta_over_pi: Vec<f64>,
    pub axes: usize,
    /// Quadrature tolerance.
    pub tol: f64,
    /// Contour against exponential series, relative.
    pub oracle_tol: f64,
}

impl Default for SemigroupParams {
    fn default() -> Self {
        Self {
            t: vec![0.1, 0.5, 1.0, 2.0],
            omega: 0.0,
            radii: vec![0.5, 2.0],
            eta_over_pi: vec![0.55, 0.6],
            axes: 3,
            tol: 1e-10,
            oracle_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaplaceParams {
    pub k_max: u32,
    pub samples: usize,
    /// Growth bound; spectral abscissa + 0.25 when absent.
    pub omega: Option<f64>,
    pub tol: f64,
    pub rel_tol: f64,
}

impl Default for LaplaceParams {
    fn default() -> Self {
        Self { k_max: 3, samples: 5, omega: None, tol: 1e-10, rel_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LawParams {
    pub cases: usize,
    pub tol: f64,
}

impl Default for LawParams {
    fn default() -> Self {
        Self { cases: 20, tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct YosidaParams {
    pub ks: Vec<f64>,
    pub t_max: f64,
    pub t_steps: usize,
    pub target: f64,
    /// Rescale the operator to this certified norm first.
    pub norm: Option<f64>,
}

impl Default for YosidaParams {
    fn default() -> Self {
        Self { ks: vec![4.0, 16.0, 64.0, 256.0], t_max: 2.0, t_steps: 20, target: 1e-5, norm: None }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DefectParams {
    pub samples: usize,
    pub rel_tol: f64,
}

impl Default for DefectParams {
    fn default() -> Self {
        Self { samples: 10, rel_tol: 1e-4 }
    }
}

/// A validated task.
#[derive(Debug, Clone, PartialEq)]
pub enum TaskPlan {
    Algebra,
    Slice,
    Remark58,
    Spectrum,
    Resolvent(ResolventParams),
    Probe(ProbeParams),
    Scan(ScanParams),
    Semigroup(SemigroupParams),
    Laplace(LaplaceParams),
    Law(LawParams),
    Yosida(YosidaParams),
    Defect(DefectParams),
    Suite,
}

impl TaskPlan {
    pub fn parse(name: &str, p: &Json) -> Result<Self, CliError> {
        let no_params = |plan: TaskPlan| {
            if p.is_null() || p.as_object().is_some_and(|o| o.is_empty()) {
                Ok(plan)
            } else {
                Err(CliError::input(format!("task {name} takes no parameters")))
            }
        };
        match name {
            "algebra" => no_params(TaskPlan::Algebra),
            "slice" => no_params(TaskPlan::Slice),
            "remark58" => no_params(TaskPlan::Remark58),
            "spectrum" => no_params(TaskPlan::Spectrum),
            "suite" => no_params(TaskPlan::Suite),
            "resolvent" => Ok(TaskPlan::Resolvent(params(name, p)?)),
            "probe" => Ok(TaskPlan::Probe(params(name, p)?)),
            "scan" => Ok(TaskPlan::Scan(params(name, p)?)),
            "semigroup" | "contour" => Ok(TaskPlan::Semigroup(params(name, p)?)),
            "laplace" => Ok(TaskPlan::Laplace(params(name, p)?)),
            "law" => Ok(TaskPlan::Law(params(name, p)?)),
            "yosida" => Ok(TaskPlan::Yosida(params(name, p)?)),
            "defect" => Ok(TaskPlan::Defect(params(name, p)?)),
            _ => Err(CliError::input(format!("unknown task {name:?}; expected one of {}", TASK_NAMES.join(", ")))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TaskPlan::Algebra => "algebra",
            TaskPlan::Slice => "slice",
            TaskPlan::Remark58 => "remark58",
            TaskPlan::Spectrum => "spectrum",
            TaskPlan::Resolvent(_) => "resolvent",
            TaskPlan::Probe(_) => "probe",
            TaskPlan::Scan(_) => "scan",
            TaskPlan::Semigroup(_) => "semigroup",
            TaskPlan::Laplace(_) => "laplace",
            TaskPlan::Law(_) => "law",
            TaskPlan::Yosida(_) => "yosida",
            TaskPlan::Defect(_) => "defect",
            TaskPlan::Suite => "suite",
        }
    }

    pub fn needs_operator(&self) -> bool {
        !matches!(self, TaskPlan::Algebra | TaskPlan::Slice | TaskPlan::Remark58 | TaskPlan::Suite)
    }

    /// Run against `op` (required iff [`Self::needs_operator`]).
    pub fn run(&self, op: Option<&RightLinearOperator>, ctx: &TaskCtx) -> Result<TaskOutput, CliError> {
        let need = || op.ok_or_else(|| CliError::input(format!("task {} needs an operator", self.name())));
        let tol = |d: f64| ctx.tol.unwrap_or(d);
        match self {
            TaskPlan::Algebra => algebra_task(ctx.seed),
            TaskPlan::Slice => slice_task(ctx.seed),
            TaskPlan::Remark58 => remark58_task(),
            TaskPlan::Spectrum => spectrum_task(need()?),
            TaskPlan::Resolvent(p) => resolvent_task(need()?, &ResolventParams { tol: tol(p.tol), ..p.clone() }, ctx.seed),
            TaskPlan::Probe(p) => probe_task(need()?, p, ctx.seed),
            TaskPlan::Scan(p) => scan_task(need()?, p, ctx.seed),
            TaskPlan::Semigroup(p) => semigroup_task(need()?, &SemigroupParams { tol: tol(p.tol), ..p.clone() }, ctx.seed),
            TaskPlan::Laplace(p) => laplace_task(need()?, &LaplaceParams { tol: tol(p.tol), ..p.clone() }, ctx.seed),
            TaskPlan::Law(p) => law_task(need()?, &LawParams { tol: tol(p.tol), ..p.clone() }, ctx.seed),
            TaskPlan::Yosida(p) => yosida_task(need()?, p, ctx.seed),
            TaskPlan::Defect(p) => defect_task(need()?, p, ctx.seed),
            TaskPlan::Suite => suite_task(ctx.seed),
        }
    }
}

fn algebra_task(seed: u64) -> Result<TaskOutput, CliError> {
    let mut rep = SemigroupReport::new();
    let e123 = Multivector::blade(3, 0b111);
    let one = Multivector::one(3);
    let a = &one + &e123;
    let b = &one - &e123;
    rep.push(check("algebra.zero_divisor", "(1 + e123)(1 - e123) = 0", "R_3", (&a * &b).max_abs(), 1e-15));
    let sq = &a * &a;
    rep.push(check("algebra.sqrt8", "|(1 + e123)^2| = sqrt 8", "R_3", (sq.euclid_norm() - 8f64.sqrt()).abs(), 1e-14));
    rep.push(check("algebra.clifford_norm_1_plus_e123", "|1 + e123|_Cl = 2", "R_3", (a.clifford_norm() - 2.0).abs(), 1e-12));

    let mut mismatches = 0;
    let mut g = fixtures::rng(seed);
    for _ in 0..20 {
        if !Multivector::random(2, &mut g).in_quadratic_cone(1e-10) {
            mismatches += 1;
        }
    }
    let x = &Multivector::generator(3, 3) + &Multivector::blade(3, 0b011);
    mismatches += usize::from(x.in_quadratic_cone(1e-10));
    mismatches += usize::from(!Multivector::scalar(3, 3.5).in_quadratic_cone(1e-10));
    let e1 = Multivector::generator(3, 1);
    mismatches += usize::from(e1.conj() != -&e1);
    mismatches += usize::from(e123.conj() != e123);
    rep.push(check(
        "algebra.cone_verdicts",
        "H in the cone; e3 + e12 not in the cone; conjugation signs",
        "R_2, R_3",
        mismatches as f64,
        0.0,
    ));

    let mut worst = 0.0f64;
    for q in fixtures::cone_samples(3, 100, (-2.0, 2.0), (0.0, 2.0), seed) {
        worst = worst.max((q.clifford_norm() - q.euclid_norm()).abs());
    }
    rep.push(check("algebra.clifford_vs_euclid", "|q|_Cl = |q| on the cone", "100 samples in R_3", worst, 1e-10));
    Ok(TaskOutput { report: rep, tables: vec![] })
}

fn slice_task(seed: u64) -> Result<TaskOutput, CliError> {
    let mut rep = SemigroupReport::new();
    let i = Multivector::quaternion(0.0, 1.0, 0.0, 0.0);
    let j = Multivector::quaternion(0.0, 0.0, 1.0, 0.0);
    let disc = Domain::Disc { center: 0.0, radius: 2.0 };
    let iqj = |q: &Multivector| Ok(Value::Alg(&(&i * q) * &j));
    let v = is_right_slice(iqj, 2, &disc, 1e-8, seed)?;
    let rejected = !v.is_slice && v.witness.is_some();
    rep.push(check("slice.iqj_rejected", "q -> iqj is not right slice", "H", if rejected { 0.0 } else { 1.0 }, 0.0));

    let mut g = fixtures::rng(seed);
    let a = Multivector::random(2, &mut g).scale(0.5);
    let b = Multivector::random(2, &mut g).scale(0.5);
    let p = Multivector::quaternion(0.2, 0.1, -0.3, 0.2);
    let series = |cs: &[Multivector]| Stem::power_series(cs.iter().cloned().map(Value::Alg).collect(), f64::INFINITY);
    let sa = series(&[Multivector::one(2), a.clone(), b.clone()])?;
    let sb = series(&[b.clone(), Multivector::zero(2), a.clone(), Multivector::one(2)])?;
    let stems = [
        exp_stem(Value::Alg(a.clone()), &p, 1e-15)?,
        sa.clone(),
        shifted_slice_power(&p, 3),
        slice_product(&sa, &sb)?,
    ];
    let mut defect = 0.0f64;
    for (k, s) in stems.iter().enumerate() {
        let v = is_right_slice(|q: &Multivector| s.induce(q), 2, &disc, 1e-9, seed + k as u64)?;
        defect = defect.max(v.max_defect);
    }
    rep.push(check("slice.stems_accepted", "f(r + sk) from f(q), f(q^c)", "4 constructed stems", defect, 1e-9));

    let z = Complex64::new(0.3, 0.2);
    let mut worst = 0.0f64;
    // Centred differences are exact on quadratics, so those are skipped.
    for s in [&stems[0], &stems[2], &stems[3]] {
        worst = worst.max((cr_richardson_ratio(s, z, 1e-2)? - 4.0).abs());
    }
    rep.push(check("slice.cr_ratio", "d_r F1 = d_s F2, d_s F1 = -d_r F2 at O(h^2)", "exp, shifted cube, product stems at z = 0.3 + 0.2i", worst, 0.5));

    // Cauchy product of the coefficient lists.
    let (ca, cb) = (vec![Multivector::one(2), a.clone(), b.clone()], vec![b.clone(), Multivector::zero(2), a, Multivector::one(2)]);
    let mut conv = vec![Multivector::zero(2); ca.len() + cb.len() - 1];
    for (k, x) in ca.iter().enumerate() {
        for (h, y) in cb.iter().enumerate() {
            conv[k + h] = &conv[k + h] + &(x * y);
        }
    }
    let sc = series(&conv)?;
    let prod = slice_product(&sa, &sb)?;
    let mut d = 0.0f64;
    for z in [Complex64::new(0.3, 0.4), Complex64::new(-0.7, 0.1), Complex64::new(0.0, 1.1)] {
        let (x1, x2) = prod.eval(z)?;
        let (y1, y2) = sc.eval(z)?;
        d = d.max(x1.sub(&y1)?.norm()).max(x2.sub(&y2)?.norm());
    }
    rep.push(check("slice.convolution", "(f * g) coefficients = sum_{k+h=n} a_k b_h", "degree 2 x degree 3", d, 1e-12));
    Ok(TaskOutput { report: rep, tables: vec![] })
}

fn spectrum_table(a: &RightLinearOperator) -> Result<(Vec<(f64, f64)>, Table), CliError> {
    let spec = spherical_spectrum(a)?;
    let calc = SphericalCalculus::new(a);
    let mut t = Table::new(&["r", "s", "min_singular_value", "resolvent_norm"]);
    for &(r, s) in &spec {
        let (lo, _) = calc.delta_conditioning(r, r * r + s * s);
        t.push(vec![fmt_f64(r), fmt_f64(s), fmt_f64(lo), "inf".into()]);
    }
    Ok((spec, t))
}

fn remark58_task() -> Result<TaskOutput, CliError> {
    let a = fixtures::remark58();
    let (spec, table) = spectrum_table(&a)?;
    let target = [(-FRAC_1_SQRT_2, FRAC_1_SQRT_2), (FRAC_1_SQRT_2, FRAC_1_SQRT_2)];
    let err = if spec.len() == 2 {
        spec.iter().zip(&target).map(|(x, y)| (x.0 - y.0).abs().max((x.1 - y.1).abs())).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let mut rep = SemigroupReport::new();
    rep.push(check(
        "remark58.components",
        "sigma_S = (-1/sqrt2 + S/sqrt2) u (1/sqrt2 + S/sqrt2)",
        "A = [[0, i], [j, 0]]",
        err,
        1e-10,
    ));
    let calc = SphericalCalculus::new(&a);
    let mu = Multivector::quaternion(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0);
    let lambda = Multivector::quaternion(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0);
    let d_mu = calc.delta_conditioning(0.0, 1.0).0;
    let d_la = calc.delta_conditioning(FRAC_1_SQRT_2, 1.0).0;
    rep.push(check("remark58.delta_regular_at_mu", "1/sigma_min(Delta_mu(A)) < 10^3", "mu = (i + j)/sqrt2", 1.0 / d_mu, 1e3));
    rep.push(check(
        "remark58.left_singular_at_mu",
        "sigma_min(mu Id - A) = 0",
        "mu = (i + j)/sqrt2",
        calc.left_system_min_sv(&mu),
        1e-10,
    ));
    rep.push(check("remark58.delta_singular_at_lambda", "sigma_min(Delta_lambda(A)) = 0", "lambda = (1 + i)/sqrt2", d_la, 1e-10));
    rep.push(check(
        "remark58.left_regular_at_lambda",
        "1/sigma_min(lambda Id - A) < 10^3",
        "lambda = (1 + i)/sqrt2",
        1.0 / calc.left_system_min_sv(&lambda),
        1e3,
    ));
    Ok(TaskOutput { report: rep, tables: vec![("spectrum.csv".into(), table)] })
}

fn spectrum_task(a: &RightLinearOperator) -> Result<TaskOutput, CliError> {
    let (spec, table) = spectrum_table(a)?;
    let calc = SphericalCalculus::new(a);
    let mut rep = SemigroupReport::new();
    rep.push(CheckRecord::diagnostic("spectrum.components", "number of circles r + s S", format!("n = {}, m = {}", a.n(), a.m()), spec.len() as f64));
    // Relative to the size of the terms of Delta: it may vanish outright.
    let na = a.embed().spectral_norm();
    let mut worst = 0.0f64;
    for &(r, s) in &spec {
        let (lo, _) = calc.delta_conditioning(r, r * r + s * s);
        worst = worst.max(lo / (na + r.hypot(s)).powi(2));
    }
    rep.push(check("spectrum.delta_singular", "sigma_min(Delta_q(A)) / (||A|| + |q|)^2 = 0 on sigma_S", "each component", worst, 1e-8));
    if a.n() == 2 {
        let j = Multivector::quaternion(0.0, 1.0, 0.0, 0.0);
        let mut res = 0.0f64;
        for &(r, s) in &spec {
            let (_, _, e) = right_eigenpair(a, r, s, &j)?;
            res = res.max(e);
        }
        rep.push(check("spectrum.right_eigenpairs", "A x = x lambda, lambda in each component", "quaternionic", res, 1e-8));
    }
    Ok(TaskOutput { report: rep, tables: vec![("spectrum.csv".into(), table)] })
}

fn resolvent_task(a: &RightLinearOperator, p: &ResolventParams, seed: u64) -> Result<TaskOutput, CliError> {
    const BAND: f64 = 1e-6;
    let n = a.n();
    let calc = SphericalCalculus::new(a);
    let axes = sample_imaginary_sphere(n, seed, p.samples.max(1))?;
    let mut g = fixtures::rng(seed);
    let mut pts: Vec<(Multivector, Complex64)> = (0..p.samples)
        .map(|k| (axes[k].clone(), Complex64::new(g.random_range(-3.0..3.0), g.random_range(0.05..3.0))))
        .collect();
    // Spectral points exercise the singular side of the equivalence.
    for (k, &(r, s)) in spherical_spectrum(a)?.iter().enumerate() {
        pts.push((axes[k % axes.len()].clone(), Complex64::new(r, s)));
    }
    let mut t = Table::new(&["r", "s", "min_singular_value", "resolvent_norm"]);
    let (mut qrr, mut qfc, mut stem_err) = (0.0f64, 0.0f64, 0.0f64);
    let (mut disagree, mut banded) = (0usize, 0usize);
    let stem = sliceop_core::Stem::resolvent(std::sync::Arc::new(calc.clone()), Domain::Whole);
    for (j, lam) in &pts {
        let q = phi(j, *lam);
        let (lo, hi) = calc.delta_conditioning(lam.re, lam.norm_sqr());
        let d = lo / hi;
        let c = calc.complex_conditioning(j, *lam).min(calc.complex_conditioning(j, lam.conj()));
        let in_band = |x: f64| x > RESOLVENT_REL_TOL * 1e-2 && x < BAND;
        if in_band(d) || in_band(c) {
            banded += 1;
        } else if (d >= BAND) != (c >= BAND) {
            disagree += 1;
        }
        if d >= BAND && c >= BAND {
            qrr = qrr.max(verify_qrr(a, j, *lam)?);
            qfc = qfc.max(q_from_c_residual(a, &q)?);
            let want = calc.spherical_c(&q)?;
            stem_err = stem_err.max(max_rel(stem.induce(&q)?.as_op().expect("operator"), &want));
            t.push(vec![fmt_f64(lam.re), fmt_f64(lam.im), fmt_f64(lo), fmt_f64(want.norm_upper())]);
        } else {
            t.push(vec![fmt_f64(lam.re), fmt_f64(lam.im), fmt_f64(lo), "inf".into()]);
        }
    }
    let ops = format!("{} points, {} in the singular-value band", pts.len(), banded);
    let mut rep = SemigroupReport::new();
    rep.push(check("resolvent.qrr", "Q_{phi_j(l)}(A) = R_{conj l}(A_j) R_l(A_j)", ops.clone(), qrr, p.tol));
    rep.push(check("resolvent.membership", "q in rho_S(A) iff l, conj l in rho(A_j)", ops.clone(), disagree as f64, 0.0));
    rep.push(check("resolvent.q_from_c", "Q_p(A) = (C_{p^c}(A) - C_p(A)) (2 Im p)^{-1}", ops.clone(), qfc, 1e-10));
    rep.push(check("resolvent.stem", "F1(z) + F2(z) j = C_{phi_j(z)}(A)", ops, stem_err, 1e-10));
    Ok(TaskOutput { report: rep, tables: vec![("resolvent.csv".into(), t)] })
}

fn probe_task(a: &RightLinearOperator, p: &ProbeParams, seed: u64) -> Result<TaskOutput, CliError> {
    let grid = ProbeGrid::standard(a.n(), seed)?;
    let probe = sectorial_probe(a, p.omega, p.delta, &grid)?;
    let k = if probe.in_resolvent { probe.k_estimate } else { f64::INFINITY };
    let mut rep = SemigroupReport::new();
    rep.push(check(
        "probe.sector_k",
        "||C_q(A)|| <= K / |q - w| on w + Omega_{pi/2 + delta}",
        format!("w = {}; delta = {}; {} probes", p.omega, p.delta, probe.probes),
        k,
        p.k_cap,
    ));
    let calc = SphericalCalculus::new(a);
    let mut t = Table::new(&["r", "s", "min_singular_value", "resolvent_norm"]);
    let top = std::f64::consts::FRAC_PI_2 + p.delta - grid.angle_margin;
    for &rho in &grid.radii {
        for i in 0..=grid.interior_angles + 1 {
            let z = Complex64::from_polar(rho, top * i as f64 / (grid.interior_angles + 1) as f64);
            let (r, s) = (p.omega + z.re, z.im);
            let (lo, hi) = calc.delta_conditioning(r, r * r + s * s);
            let norm = if lo > RESOLVENT_REL_TOL * hi {
                let mut nm = 0.0f64;
                for j in &grid.axes {
                    nm = nm.max(calc.spherical_c(&phi(j, Complex64::new(r, s)))?.norm_upper());
                }
                fmt_f64(nm)
            } else {
                "inf".into()
            };
            t.push(vec![fmt_f64(r), fmt_f64(s), fmt_f64(lo), norm]);
        }
    }
    Ok(TaskOutput { report: rep, tables: vec![("probe.csv".into(), t)] })
}

fn scan_task(a: &RightLinearOperator, p: &ScanParams, seed: u64) -> Result<TaskOutput, CliError> {
    let grid = ScanGrid {
        radii: p.radii.clone(),
        angles: p.angles,
        delta: p.delta,
        axes: sample_imaginary_sphere(a.n(), seed, p.axes.max(1))?,
    };
    let rows = scan_rows(a, p.omega, &grid)?;
    let singular = rows.iter().filter(|r| r.norm.is_none()).count();
    let mut rep = SemigroupReport::new();
    rep.push(CheckRecord::diagnostic("scan.singular_points", "points of sigma_S on the grid", format!("{} rows", rows.len()), singular as f64));
    Ok(TaskOutput { report: rep, tables: vec![("scan.csv".into(), scan_table(&rows))] })
}

fn semigroup_task(a: &RightLinearOperator, p: &SemigroupParams, seed: u64) -> Result<TaskOutput, CliError> {
    if p.t.iter().any(|t| !(*t > 0.0)) {
        return Err(CliError::input("semigroup: times must be positive"));
    }
    let axes = sample_imaginary_sphere(a.n(), seed, p.axes.max(1))?;
    let oracle: Vec<RealEmbedding> =
        p.t.iter().map(|&t| exp_semigroup(a, &Multivector::scalar(a.n(), t), 1e-15)).collect::<Result<_, _>>()?;
    let mut t = Table::new(&["t", "axis", "r", "eta_over_pi", "rel_err", "error_estimate", "nodes"]);
    let mut per_t: Vec<Vec<RealEmbedding>> = vec![Vec::new(); p.t.len()];
    let (mut worst, mut est) = (0.0f64, 0.0f64);
    for (ai, j) in axes.iter().enumerate() {
        for &r in &p.radii {
            for &eo in &p.eta_over_pi {
                let mut spec = ContourSpec::new(j.clone(), r, eo * PI, p.omega, p.tol)?;
                spec.max_levels = 7;
                let mut engine = ContourSemigroup::new(a, spec)?;
                for (ti, &tt) in p.t.iter().enumerate() {
                    let res = engine.at(tt)?;
                    let e = max_rel(&res.value, &oracle[ti]);
                    worst = worst.max(e);
                    let scale = res.value.norm_upper().max(1e-300);
                    est = est.max(res.error_estimate / scale);
                    t.push(vec![fmt_f64(tt), ai.to_string(), fmt_f64(r), fmt_f64(eo), fmt_f64(e), fmt_f64(res.error_estimate), res.nodes.to_string()]);
                    per_t[ti].push(res.value);
                }
            }
        }
    }
    let mut spread = 0.0f64;
    for vals in &per_t {
        for x in vals {
            for y in vals {
                spread = spread.max(max_rel(x, y));
            }
        }
    }
    let ops = format!("t = {:?}; {} axes x r = {:?} x eta/pi = {:?}", p.t, axes.len(), p.radii, p.eta_over_pi);
    let mut rep = SemigroupReport::new();
    rep.push(check("semigroup.contour_vs_exp", "(1/2pi) int C_a(A) j^{-1} e^{ta} da = e^{tA}", ops.clone(), worst, p.oracle_tol));
    rep.push(check("semigroup.invariance", "T(t) independent of (j, r, eta)", ops.clone(), spread, 2.0 * p.tol));
    rep.push(CheckRecord::diagnostic("semigroup.quadrature_error", "contour error estimate, relative", ops, est));

    let stem = semigroup_stems(a, 1e-15)?;
    let mut t2 = 0.0f64;
    for &tt in &p.t {
        t2 = t2.max(stem.eval(Complex64::new(tt, 0.0))?.1.norm());
    }
    rep.push(check("semigroup.restriction", "T2(t) = 0 for real t", format!("t = {:?}", p.t), t2, 1e-12));
    let x = ModuleVector::random(a.n(), a.m(), &mut fixtures::rng(seed));
    let ax = a.apply(&x)?;
    let g = generator_estimate(memo_exp_provider(a, 1e-15), &x, &[1e-2, 5e-3, 2.5e-3, 1.25e-3])?;
    rep.push(check("semigroup.generator", "lim (T(h) x - x)/h = A x", "random x", g.sub(&ax).norm() / ax.norm().max(1.0), 1e-7));
    Ok(TaskOutput { report: rep, tables: vec![("semigroup.csv".into(), t)] })
}

/// `sup_{t <= 40} ||T(t)|| e^{-wt}`.
fn growth_m(a: &RightLinearOperator, omega: f64) -> Result<f64, CliError> {
    let mut m = 0.0f64;
    for i in 0..=400 {
        let t = 0.1 * i as f64;
        let tt = exp_semigroup(a, &Multivector::scalar(a.n(), t), 1e-15)?;
        m = m.max(tt.norm_upper() * (-omega * t).exp());
    }
    Ok(m)
}

fn laplace_task(a: &RightLinearOperator, p: &LaplaceParams, seed: u64) -> Result<TaskOutput, CliError> {
    let omega = match p.omega {
        Some(w) => w,
        None => fixtures::spectral_abscissa(a) + 0.25,
    };
    let m = growth_m(a, omega)? * (1.0 + 1e-6);
    let qs = fixtures::cone_samples(a.n(), p.samples, (omega + 0.5, omega + 2.0), (0.0, 2.0), seed);
    let spec = LaplaceSpec { omega, m_bound: m, tol: p.tol, ..Default::default() };
    let mut provider = memo_exp_provider(a, 1e-15);
    let mut worst = 0.0f64;
    let mut t = Table::new(&["sample", "k", "rel_err"]);
    for (i, q) in qs.iter().enumerate() {
        for k in 1..=p.k_max {
            let got = laplace_transform(a, q, k, &mut provider, &spec)?;
            let want = resolvent_slice_power(a, q, k)?;
            let e = max_rel(&got, &want);
            worst = worst.max(e);
            t.push(vec![i.to_string(), k.to_string(), fmt_f64(e)]);
        }
    }
    let mut rep = SemigroupReport::new();
    rep.push(check(
        "laplace.identity",
        "C_q(A)^{.k} = 1/(k-1)! int_0^inf T(t) t^{k-1} e^{-tq} dt",
        format!("w = {omega}; {} samples; k <= {}", qs.len(), p.k_max),
        worst,
        p.rel_tol,
    ));
    rep.extend(laplace_norm_bound_check(a, omega, m, &qs, p.k_max)?);
    Ok(TaskOutput { report: rep, tables: vec![("laplace.csv".into(), t)] })
}

/// Random commuting `p, q` in a common slice, arguments below `0.3 pi`.
pub fn law_cases(n: u8, count: usize, seed: u64) -> Vec<(Multivector, Multivector)> {
    let axes = sample_imaginary_sphere(n, seed, count.max(1)).expect("valid n");
    let mut g = fixtures::rng(seed ^ 0x1a3);
    (0..count)
        .map(|i| {
            let mut z = || Complex64::from_polar(g.random_range(0.1..1.0), g.random_range(-0.3 * PI..0.3 * PI));
            (phi(&axes[i], z()), phi(&axes[i], z()))
        })
        .collect()
}

fn law_task(a: &RightLinearOperator, p: &LawParams, seed: u64) -> Result<TaskOutput, CliError> {
    let cases = law_cases(a.n(), p.cases, seed);
    let (mut worst, mut min_ratio, mut generic) = (0.0f64, f64::INFINITY, 0usize);
    let mut t = Table::new(&["case", "law_residual", "pointwise_defect"]);
    for (i, (pp, qq)) in cases.iter().enumerate() {
        let rep = semigroup_law_check(a, pp, qq, p.tol)?;
        let law = rep.get("law.slice").expect("recorded").residual;
        let def = rep.get("law.pointwise_defect").expect("recorded").residual;
        worst = worst.max(law);
        let ratio = def / law.max(f64::MIN_POSITIVE);
        min_ratio = min_ratio.min(ratio);
        generic += usize::from(def >= 1e3 * law);
        t.push(vec![i.to_string(), fmt_f64(law), fmt_f64(def)]);
    }
    let ops = format!("{} commuting pairs", cases.len());
    let mut rep = SemigroupReport::new();
    rep.push(check("law.slice", "T(p+q) = T(p) (.)_p T(q)", ops.clone(), worst, p.tol));
    rep.push(CheckRecord::diagnostic("law.defect_ratio", "min ||T(p+q) - T(p)T(q)|| / law residual", ops.clone(), min_ratio));
    rep.push(CheckRecord::diagnostic(
        "law.generic_fraction",
        "fraction with pointwise defect >= 10^3 x law residual",
        ops,
        generic as f64 / cases.len().max(1) as f64,
    ));
    Ok(TaskOutput { report: rep, tables: vec![("law.csv".into(), t)] })
}

/// `max_t ||e^{t A_k} x - T(t) x||` for each `k`.
pub fn yosida_errors(a: &RightLinearOperator, ks: &[f64], t_max: f64, t_steps: usize, x: &ModuleVector) -> Result<Vec<f64>, CliError> {
    let ts: Vec<f64> = (0..=t_steps).map(|i| t_max * i as f64 / t_steps.max(1) as f64).collect();
    let exact: Vec<ModuleVector> =
        ts.iter().map(|&t| Ok(exp_semigroup(a, &Multivector::scalar(a.n(), t), 1e-15)?.apply(x))).collect::<Result<_, CliError>>()?;
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        let ak = yosida_approximant(a, k)?;
        let mut e = 0.0f64;
        for (t, ex) in ts.iter().zip(&exact) {
            let v = exp_semigroup(&ak, &Multivector::scalar(a.n(), *t), 1e-15)?.apply(x);
            e = e.max(v.sub(ex).norm());
        }
        out.push(e);
    }
    Ok(out)
}

fn yosida_task(a: &RightLinearOperator, p: &YosidaParams, seed: u64) -> Result<TaskOutput, CliError> {
    if p.ks.is_empty() {
        return Err(CliError::input("yosida: ks must not be empty"));
    }
    let a = match p.norm {
        Some(nm) => a.scale(nm / a.norm_upper()),
        None => a.clone(),
    };
    let x = ModuleVector::random(a.n(), a.m(), &mut fixtures::rng(seed));
    let x = x.right_mul(&Multivector::scalar(a.n(), 1.0 / x.norm()));
    let errs = yosida_errors(&a, &p.ks, p.t_max, p.t_steps, &x)?;
    let increase = errs.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, f64::max);
    let last = *errs.last().expect("nonempty");
    let mut t = Table::new(&["k", "max_error"]);
    for (k, e) in p.ks.iter().zip(&errs) {
        t.push(vec![fmt_f64(*k), fmt_f64(*e)]);
    }
    let ops = format!("||A|| <= {}; k = {:?}; t in [0, {}]", a.norm_upper(), p.ks, p.t_max);
    let mut rep = SemigroupReport::new();
    rep.push(check("yosida.monotone", "max_t ||e^{tA_k} x - T(t) x|| nonincreasing in k", ops.clone(), increase, 1e-15));
    rep.push(check("yosida.final", "e^{tA_k} x -> T(t) x", ops.clone(), last, p.target));
    if errs.len() >= 2 {
        let ratio = errs[errs.len() - 2] / last.max(f64::MIN_POSITIVE);
        rep.push(CheckRecord::diagnostic("yosida.rate", "error ratio between the last two k", ops, ratio));
    }
    Ok(TaskOutput { report: rep, tables: vec![("yosida.csv".into(), t)] })
}

fn defect_task(a: &RightLinearOperator, p: &DefectParams, seed: u64) -> Result<TaskOutput, CliError> {
    let n = a.n();
    let grid = sliceop_core::slice::DEFAULT_DEFECT_GRID;
    let mut g = fixtures::rng(seed);
    let x = Value::Op(a.embed());
    let x2 = x.mul(&x)?;
    let mut worst = 0.0f64;
    for _ in 0..p.samples {
        let pp = sliceop_core::algebra::random_cone_element(n, &mut g).scale(0.5);
        let qq = sliceop_core::algebra::random_cone_element(n, &mut g).scale(0.5);
        let got = exp_defect_limit(&x, &pp, &qq, &grid)?;
        let want = x2.right_scalar(&pp.commutator(&qq));
        worst = worst.max(got.sub(&want)?.norm() / want.norm().max(f64::MIN_POSITIVE));
    }
    let mut rep = SemigroupReport::new();
    rep.push(check("defect.limit", "lim 2 E(t) / t^2 = x^2 (pq - qp)", format!("x = A; {} samples", p.samples), worst, p.rel_tol));
    let j = &sample_imaginary_sphere(n, seed, 1)?[0];
    let (pp, qq) = (phi(j, Complex64::new(0.3, 0.4)), phi(j, Complex64::new(-0.2, 0.7)));
    let comm = exp_defect_limit(&x, &pp, &qq, &grid)?.norm();
    rep.push(check("defect.commuting", "pq = qp implies limit 0", "x = A", comm, 1e-12));
    let z = Multivector::zero(n);
    let nil = RightLinearOperator::from_rows(vec![vec![z.clone(), Multivector::one(n)], vec![z.clone(), z]])?;
    let pn = Multivector::generator(n, 1);
    let qn = if n >= 2 { Multivector::generator(n, 2) } else { Multivector::scalar(n, 1.0) };
    let nv = exp_defect_limit(&Value::Op(nil.embed()), &pn, &qn, &grid)?.norm();
    rep.push(check("defect.nilpotent", "x^2 = 0 implies limit 0", "x = [[0, 1], [0, 0]]", nv, 1e-12));
    Ok(TaskOutput { report: rep, tables: vec![] })
}

fn suite_task(seed: u64) -> Result<TaskOutput, CliError> {
    let mut out = TaskOutput::default();
    out.merge(algebra_task(seed)?);
    out.merge(slice_task(seed)?);
    out.merge(remark58_task()?);
    let general = fixtures::random_operator(2, 3, 1.0, seed);
    out.merge(spectrum_task(&general)?);
    out.merge(resolvent_task(&general, &ResolventParams::default(), seed)?);
    out.merge(defect_task(&general.scale(0.5), &DefectParams { samples: 5, ..Default::default() }, seed)?);
    let neg = fixtures::builtin_operator("neg_identity").expect("built in");
    out.merge(probe_task(&neg, &ProbeParams { k_cap: 2.0, ..Default::default() }, seed)?);
    let sect = fixtures::sectorial_operator(seed);
    let sg = SemigroupParams { t: vec![0.5, 1.0], axes: 2, ..Default::default() };
    out.merge(semigroup_task(&sect, &sg, seed)?);
    out.merge(law_task(&sect, &LawParams { cases: 10, ..Default::default() }, seed)?);
    out.merge(yosida_task(&sect, &YosidaParams { norm: Some(0.02), ..Default::default() }, seed)?);
    out.merge(laplace_task(&fixtures::stable_operator(seed), &LaplaceParams { samples: 2, ..Default::default() }, seed)?);
    // Tables from the sub-tasks keep their own names; drop duplicates.
    out.tables.sort_by(|a, b| a.0.cmp(&b.0));
    out.tables.dedup_by(|a, b| a.0 == b.0);
    Ok(out)
}

