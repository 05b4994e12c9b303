//! Acceptance criteria 1-9: one PASS/FAIL line each, with runtime limits.
//!
//! Runs without the libtest harness so the lines always reach the output.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use serde_json::Value as Json;

use sliceop::fixtures::{random_operator, remark58, rng, sectorial_operator, stable_operator};
use sliceop::tasks::{law_cases, yosida_errors, LaplaceParams, ResolventParams, SemigroupParams, TaskOutput};
use sliceop::{TaskCtx, TaskPlan};
use sliceop_core::algebra::{phi, random_cone_element, sample_imaginary_sphere};
use sliceop_core::operator::{spherical_spectrum, SphericalCalculus};
use sliceop_core::semigroup::semigroup_law_check;
use sliceop_core::slice::{exp_defect_limit, DEFAULT_DEFECT_GRID};
use sliceop_core::{ModuleVector, Multivector, RightLinearOperator, Value};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, f64, fn() -> Outcome);

fn task(plan: TaskPlan, op: Option<&RightLinearOperator>, seed: u64) -> Result<TaskOutput, String> {
    plan.run(op, &TaskCtx { seed, tol: None }).map_err(|e| e.to_string())
}

fn residual(out: &TaskOutput, id: &str) -> Result<(f64, bool), String> {
    out.report.get(id).map(|r| (r.residual, r.pass)).ok_or_else(|| format!("{id} not reported"))
}

fn c1() -> Outcome {
    let a = remark58();
    let spec = spherical_spectrum(&a).map_err(|e| e.to_string())?;
    let h = FRAC_1_SQRT_2;
    let comp_err = if spec.len() == 2 {
        spec.iter().zip([(-h, h), (h, h)]).map(|(x, y)| (x.0 - y.0).abs().max((x.1 - y.1).abs())).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let calc = SphericalCalculus::new(&a);
    let mu = Multivector::quaternion(0.0, h, h, 0.0);
    let la = Multivector::quaternion(h, h, 0.0, 0.0);
    let d_mu = calc.delta_conditioning(0.0, 1.0).0;
    let l_mu = calc.left_system_min_sv(&mu);
    let d_la = calc.delta_conditioning(h, 1.0).0;
    let l_la = calc.left_system_min_sv(&la);
    let ok = comp_err <= 1e-10 && d_mu > 1e-3 && l_mu < 1e-10 && d_la < 1e-10 && l_la > 1e-3;
    Ok((
        ok,
        format!(
            "{} components, max err {comp_err:.1e}; mu: sv(Delta) {d_mu:.3}, sv(left) {l_mu:.1e}; lambda: sv(Delta) {d_la:.1e}, sv(left) {l_la:.3}",
            spec.len()
        ),
    ))
}

fn c2() -> Outcome {
    let (mut qrr, mut disagree, mut ok) = (0.0f64, 0.0f64, true);
    for seed in 0..20 {
        let a = random_operator(2, 3, 1.0, 1000 + seed);
        let out = task(TaskPlan::Resolvent(ResolventParams { samples: 20, tol: 1e-9 }), Some(&a), seed)?;
        let (q, p1) = residual(&out, "resolvent.qrr")?;
        let (m, p2) = residual(&out, "resolvent.membership")?;
        qrr = qrr.max(q);
        disagree = disagree.max(m);
        ok &= p1 && p2;
    }
    Ok((ok, format!("20 operators x 20 points: max QRR residual {qrr:.1e} (tol 1e-9), membership disagreements {disagree}")))
}

fn c3() -> Outcome {
    let (mut worst, mut ok) = (0.0f64, true);
    for seed in 0..5 {
        let a = stable_operator(2000 + seed);
        let p = LaplaceParams { samples: 5, omega: Some(-0.25), ..Default::default() };
        let out = task(TaskPlan::Laplace(p), Some(&a), seed)?;
        let (e, pass) = residual(&out, "laplace.identity")?;
        worst = worst.max(e);
        ok &= pass;
    }
    Ok((ok, format!("5 operators, k = 1..3, 5 samples with Re q in [0.25, 1.75]: max rel err {worst:.1e} (tol 1e-6)")))
}

fn c4() -> Outcome {
    let p = SemigroupParams::default();
    let (mut oracle, mut spread, mut ok) = (0.0f64, 0.0f64, true);
    for seed in 0..2 {
        let a = sectorial_operator(3000 + seed);
        let out = task(TaskPlan::Semigroup(p.clone()), Some(&a), seed)?;
        let (o, p1) = residual(&out, "semigroup.contour_vs_exp")?;
        let (s, p2) = residual(&out, "semigroup.invariance")?;
        oracle = oracle.max(o);
        spread = spread.max(s);
        ok &= p1 && p2;
    }
    Ok((
        ok,
        format!(
            "2 operators, t = {:?}: max rel err vs exp {oracle:.1e} (tol 1e-6); spread over 3 axes x r x eta {spread:.1e} (tol {:.0e})",
            p.t,
            2.0 * p.tol
        ),
    ))
}

fn c5() -> Outcome {
    let (mut worst, mut generic) = (0.0f64, 0usize);
    for i in 0..20u64 {
        let a = sectorial_operator(4000 + i);
        let (p, q) = law_cases(2, 1, i).pop().expect("one case");
        let rep = semigroup_law_check(&a, &p, &q, 1e-8).map_err(|e| e.to_string())?;
        let law = rep.get("law.slice").expect("recorded").residual;
        let def = rep.get("law.pointwise_defect").expect("recorded").residual;
        worst = worst.max(law);
        generic += usize::from(def >= 1e3 * law);
    }
    Ok((worst <= 1e-8 && generic >= 15, format!("20 cases: max law residual {worst:.1e} (tol 1e-8); defect >= 1e3 x residual in {generic}/20 (need 15)")))
}

fn c6() -> Outcome {
    let mut g = rng(5000);
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let x = Value::Op(random_operator(2, 2, 0.5, 5000 + seed).embed());
        let p = random_cone_element(2, &mut g).scale(0.5);
        let q = random_cone_element(2, &mut g).scale(0.5);
        let got = exp_defect_limit(&x, &p, &q, &DEFAULT_DEFECT_GRID).map_err(|e| e.to_string())?;
        let want = x.mul(&x).map_err(|e| e.to_string())?.right_scalar(&p.commutator(&q));
        worst = worst.max(got.sub(&want).map_err(|e| e.to_string())?.norm() / want.norm());
    }
    let x = Value::Op(random_operator(2, 2, 0.5, 5100).embed());
    let j = &sample_imaginary_sphere(2, 1, 1).map_err(|e| e.to_string())?[0];
    let (p, q) = (phi(j, Complex64::new(0.3, 0.4)), phi(j, Complex64::new(-0.2, 0.7)));
    let comm = exp_defect_limit(&x, &p, &q, &DEFAULT_DEFECT_GRID).map_err(|e| e.to_string())?.norm();
    let z = Multivector::zero(2);
    let nil = RightLinearOperator::from_rows(vec![vec![z.clone(), Multivector::one(2)], vec![z.clone(), z]]).map_err(|e| e.to_string())?;
    let (e1, e2) = (Multivector::generator(2, 1), Multivector::generator(2, 2));
    let nv = exp_defect_limit(&Value::Op(nil.embed()), &e1, &e2, &DEFAULT_DEFECT_GRID).map_err(|e| e.to_string())?.norm();
    Ok((
        worst <= 1e-4 && comm <= 1e-12 && nv <= 1e-12,
        format!("10 samples: max rel err {worst:.1e} (tol 1e-4); commuting {comm:.1e}, nilpotent {nv:.1e} (tol 1e-12)"),
    ))
}

fn c7() -> Outcome {
    const KS: [f64; 4] = [4.0, 16.0, 64.0, 256.0];
    const NORM: f64 = 0.02;
    let (mut ok, mut last, mut unit_last) = (true, 0.0f64, 0.0f64);
    for seed in 0..5 {
        let a = sectorial_operator(6000 + seed);
        let x = ModuleVector::random(2, 3, &mut rng(6000 + seed));
        let x = x.right_mul(&Multivector::scalar(2, 1.0 / x.norm()));
        let small = a.scale(NORM / a.norm_upper());
        let errs = yosida_errors(&small, &KS, 2.0, 20, &x).map_err(|e| e.to_string())?;
        ok &= errs.windows(2).all(|w| w[1] <= w[0]) && errs[3] < 1e-5;
        last = last.max(errs[3]);
        let unit = yosida_errors(&a, &KS, 2.0, 20, &x).map_err(|e| e.to_string())?;
        unit_last = unit_last.max(unit[3]);
    }
    Ok((
        ok,
        format!(
            "5 operators scaled to ||A|| <= {NORM}: monotone in k, max error at k = 256 {last:.1e} (tol 1e-5); unscaled (||A|| ~ 2) reaches {unit_last:.1e}"
        ),
    ))
}

fn c8() -> Outcome {
    let out = task(TaskPlan::parse("slice", &Json::Null).map_err(|e| e.to_string())?, None, 7)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for id in ["slice.iqj_rejected", "slice.stems_accepted", "slice.cr_ratio", "slice.convolution"] {
        let (r, p) = residual(&out, id)?;
        ok &= p;
        parts.push(format!("{} {r:.1e}", id.trim_start_matches("slice.")));
    }
    Ok((ok, format!("{} (cr_ratio is |ratio - 4|, tol 0.5)", parts.join(", "))))
}

fn c9() -> Outcome {
    let out = task(TaskPlan::parse("algebra", &Json::Null).map_err(|e| e.to_string())?, None, 9)?;
    let failed: Vec<&str> = out.report.records.iter().filter(|r| !r.pass).map(|r| r.id.as_str()).collect();
    Ok((failed.is_empty(), format!("{} algebra checks, failing: {failed:?}", out.report.records.len())))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("two-circle spectrum of [[0, i], [j, 0]]", 1.0, c1),
        ("QRR identity and resolvent membership", 10.0, c2),
        ("Laplace transform of the semigroup", 60.0, c3),
        ("contour semigroup vs exponential", 60.0, c4),
        ("noncommutative semigroup law", 30.0, c5),
        ("exponential defect limit", 10.0, c6),
        ("Yosida approximation", 30.0, c7),
        ("slice machinery", 10.0, c8),
        ("algebra fixtures", 1.0, c9),
    ];
    let mut all = true;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let dt = start.elapsed().as_secs_f64();
        let (pass, detail) = match res {
            Ok((p, d)) => (p && dt < *limit, d),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        println!(
            "criterion {}: {} {name}: {detail}; {dt:.2} s (limit {limit} s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
