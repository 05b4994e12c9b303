use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::algebra::{phi, random_cone_element, sample_imaginary_sphere};
use crate::operator::{RealEmbedding, RightLinearOperator};

fn quat(a: f64, b: f64, c: f64, d: f64) -> Multivector {
    Multivector::quaternion(a, b, c, d)
}

fn alg(v: &Value) -> &Multivector {
    v.as_alg().unwrap()
}

fn close(a: &Value, b: &Value, tol: f64) -> bool {
    a.sub(b).unwrap().norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

#[test]
fn constant_and_linear_series_induce() {
    let c = quat(0.5, -1.0, 2.0, 0.3);
    let k = Stem::constant(Value::Alg(c.clone()));
    let q = quat(0.2, 0.3, -0.4, 1.0);
    assert_eq!(alg(&k.induce(&q).unwrap()), &c);
    let lin = Stem::power_series(vec![Value::Alg(Multivector::zero(2)), Value::Alg(c.clone())], f64::INFINITY)
        .unwrap();
    assert!((alg(&lin.induce(&q).unwrap()) - &(&c * &q)).max_abs() < 1e-14);
    // (z, j) -> (conj z, -j) gives the same value.
    let d = q.cone_decompose(1e-12).unwrap();
    let j = d.axis.clone().unwrap();
    let a = lin.induce_at(d.z(), &j).unwrap();
    let b = lin.induce_at(d.z().conj(), &(-&j)).unwrap();
    assert!(close(&a, &b, 1e-15));
}

#[test]
fn induce_rejects_out_of_domain_and_off_cone() {
    let s = Stem::power_series(vec![Value::Alg(Multivector::one(3))], 1.0).unwrap();
    assert!(matches!(s.induce(&Multivector::scalar(3, 2.0)), Err(Error::OutsideDomain { .. })));
    let bad = &Multivector::blade(3, 4) + &Multivector::blade(3, 3);
    assert!(matches!(s.induce(&bad), Err(Error::NotInCone { .. })));
}

#[test]
fn representation_formula_cases() {
    let i = quat(0.0, 1.0, 0.0, 0.0);
    let jj = quat(0.0, 0.0, 1.0, 0.0);
    let f = |q: &Multivector| q * q;
    let (r, s) = (0.4, 1.3);
    let q = Multivector::from_slice(r, s, &i);
    let fq = Value::Alg(f(&q));
    let fqc = Value::Alg(f(&q.conj()));
    assert_eq!(representation_extend(&fq, &fqc, &i, &i).unwrap(), fq);
    assert!(close(&representation_extend(&fq, &fqc, &i, &(-&i)).unwrap(), &fqc, 1e-15));
    let ext = representation_extend(&fq, &fqc, &i, &jj).unwrap();
    let direct = f(&Multivector::from_slice(r, s, &jj));
    assert!((alg(&ext) - &direct).max_abs() < 1e-14);
    assert!(representation_extend(&fq, &fqc, &Multivector::one(2), &jj).is_err());
}

#[test]
fn sliceness_classifier() {
    let c = quat(0.1, 0.7, -0.2, 0.5);
    let good = is_right_slice(|q| Ok(Value::Alg(&c * q)), 2, &Domain::Whole, 1e-10, 1).unwrap();
    assert!(good.is_slice && good.witness.is_none());
    let i = quat(0.0, 1.0, 0.0, 0.0);
    let j = quat(0.0, 0.0, 1.0, 0.0);
    let bad = is_right_slice(|q| Ok(Value::Alg(&(&i * q) * &j)), 2, &Domain::Whole, 1e-10, 1).unwrap();
    assert!(!bad.is_slice);
    let w = bad.witness.unwrap();
    assert!(w.defect > 1e-3 && w.s > 0.0);
}

#[test]
fn pointwise_product_is_not_slice_but_slice_product_is() {
    let a = quat(0.3, 1.0, -0.5, 0.2);
    let b = quat(-0.7, 0.1, 0.9, 1.1);
    let f = Stem::power_series(vec![Value::Alg(Multivector::one(2)), Value::Alg(a)], f64::INFINITY).unwrap();
    let g = Stem::power_series(vec![Value::Alg(b), Value::Alg(Multivector::one(2))], f64::INFINITY).unwrap();
    let pointwise = is_right_slice(
        |q| f.induce(q)?.mul(&g.induce(q)?),
        2,
        &Domain::Disc { center: 0.0, radius: 2.0 },
        1e-10,
        3,
    )
    .unwrap();
    assert!(!pointwise.is_slice && pointwise.witness.is_some());
    let fg = slice_product(&f, &g).unwrap();
    let ok = is_right_slice(|q| fg.induce(q), 2, &Domain::Disc { center: 0.0, radius: 2.0 }, 1e-10, 3).unwrap();
    assert!(ok.is_slice, "{ok:?}");
}

#[test]
fn slice_product_examples() {
    let i = quat(0.0, 1.0, 0.0, 0.0);
    let j = quat(0.0, 0.0, 1.0, 0.0);
    let k = quat(0.0, 0.0, 0.0, 1.0);
    let f = Stem::power_series(vec![Value::Alg(Multivector::zero(2)), Value::Alg(i.clone())], f64::INFINITY).unwrap();
    let g = Stem::constant(Value::Alg(j.clone()));
    let fg = slice_product(&f, &g).unwrap();
    // (f . g)(q) = (ij) q = k q; at q = i this is k i = j.
    assert!((alg(&fg.induce(&i).unwrap()) - &j).max_abs() < 1e-15);
    let q = quat(0.3, -0.2, 0.8, 0.1);
    assert!((alg(&fg.induce(&q).unwrap()) - &(&k * &q)).max_abs() < 1e-15);
    let unit = slice_product(&f, &Stem::constant(Value::Alg(Multivector::one(2)))).unwrap();
    assert!(close(&unit.induce(&q).unwrap(), &f.induce(&q).unwrap(), 1e-15));
    let op = Stem::constant(Value::Op(RealEmbedding::identity(2, 1)));
    assert!(slice_product(&f, &op).is_err());
}

#[test]
fn slice_product_is_cauchy_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a: Vec<Multivector> = (0..4).map(|_| Multivector::random(2, &mut rng)).collect();
    let b: Vec<Multivector> = (0..3).map(|_| Multivector::random(2, &mut rng)).collect();
    let mut conv = vec![Multivector::zero(2); 6];
    for (ka, x) in a.iter().enumerate() {
        for (kb, y) in b.iter().enumerate() {
            conv[ka + kb] += &(x * y);
        }
    }
    let wrap = |v: &[Multivector]| Stem::power_series(v.iter().cloned().map(Value::Alg).collect(), f64::INFINITY).unwrap();
    let prod = slice_product(&wrap(&a), &wrap(&b)).unwrap();
    let direct = wrap(&conv);
    for _ in 0..20 {
        let q = random_cone_element(2, &mut rng).scale(0.7);
        assert!(close(&prod.induce(&q).unwrap(), &direct.induce(&q).unwrap(), 1e-12));
    }
}

#[test]
fn shifted_power_matches_binomial_and_iterated_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [2u8, 3] {
        let p = random_cone_element(n, &mut rng);
        let lin = Stem::power_series(vec![Value::Alg(p.clone()), Value::Alg(Multivector::one(n))], f64::INFINITY)
            .unwrap();
        for deg in 0..=6u32 {
            let sp = shifted_slice_power(&p, deg);
            let it = slice_power(&lin, deg);
            for _ in 0..5 {
                let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let (a1, a2) = sp.eval(z).unwrap();
                let (b1, b2) = it.eval(z).unwrap();
                assert!(close(&a1, &b1, 1e-12) && close(&a2, &b2, 1e-12));
                // Binomial form.
                let mut c1 = Multivector::zero(n);
                let mut c2 = Multivector::zero(n);
                let mut binom = 1.0;
                for k in 0..=deg {
                    let zk = z.powu(k);
                    let pk = p.powi(deg - k);
                    c1.axpy(binom * zk.re, &pk);
                    c2.axpy(binom * zk.im, &pk);
                    binom = binom * (deg - k) as f64 / (k + 1) as f64;
                }
                assert!((alg(&a1) - &c1).max_abs() < 1e-12 * c1.max_abs().max(1.0));
                assert!((alg(&a2) - &c2).max_abs() < 1e-12 * c2.max_abs().max(1.0));
            }
        }
        let one = shifted_slice_power(&p, 0).induce(&Multivector::scalar(n, 0.3)).unwrap();
        assert_eq!(alg(&one), &Multivector::one(n));
    }
}

#[test]
fn shifted_square_at_commuting_point() {
    let p = quat(0.2, 0.5, 0.0, 0.0);
    let q = quat(-0.3, 1.5, 0.0, 0.0);
    let v = shifted_slice_power(&p, 2).induce(&q).unwrap();
    let s = &p + &q;
    assert!((alg(&v) - &(&s * &s)).max_abs() < 1e-14);
    // Noncommuting p, q: p^2 + 2 p q + q^2 with q's powers on the right.
    let p = quat(0.0, 1.0, 0.0, 0.0);
    let q = quat(0.0, 0.0, 1.0, 0.0);
    let v = shifted_slice_power(&p, 2).induce(&q).unwrap();
    let expect = &(&(&p * &p) + &(&p * &q).scale(2.0)) + &(&q * &q);
    assert!((alg(&v) - &expect).max_abs() < 1e-14);
}

#[test]
fn exponential_special_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    // Real argument: the ordinary exponential.
    let x = quat(0.3, -0.7, 0.4, 0.9);
    let e = exp_stem(Value::Alg(x.clone()), &Multivector::zero(2), 1e-14).unwrap();
    let at1 = e.induce(&Multivector::one(2)).unwrap();
    let d = x.cone_decompose(1e-12).unwrap();
    let ex = phi(d.axis.as_ref().unwrap(), d.z().exp());
    assert!((alg(&at1) - &ex).max_abs() < 1e-14);
    // x commuting with q: e^{xq}.
    let q = Multivector::from_slice(0.4, -1.2, d.axis.as_ref().unwrap());
    let v = e.induce(&q).unwrap();
    let xq = (&x * &q).cone_decompose(1e-12).unwrap();
    let exq = phi(xq.axis.as_ref().unwrap(), xq.z().exp());
    assert!((alg(&v) - &exq).max_abs() < 1e-13);
    // p, q commuting: exp_p^x(q) = exp^x(p + q).
    for n in [2u8, 3] {
        let x = Multivector::random(n, &mut rng).scale(0.8);
        let j = sample_imaginary_sphere(n, 4, 4).unwrap()[3].clone();
        let p = Multivector::from_slice(0.3, 0.7, &j);
        let q = Multivector::from_slice(-0.2, 0.4, &j);
        let lhs = exp_stem(Value::Alg(x.clone()), &p, 1e-14).unwrap().induce(&q).unwrap();
        let rhs = exp_stem(Value::Alg(x), &Multivector::zero(n), 1e-14).unwrap().induce(&(&p + &q)).unwrap();
        assert!(close(&lhs, &rhs, 1e-12));
    }
}

#[test]
fn closed_form_matches_binomial_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in [2u8, 3] {
        for _ in 0..10 {
            let x = Multivector::random(n, &mut rng).scale(0.6);
            let p = random_cone_element(n, &mut rng).scale(0.5);
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let stem = exp_stem(Value::Alg(x.clone()), &p, 1e-15).unwrap();
            let (a1, a2) = stem.eval(z).unwrap();
            let ((b1, b2), terms) = exp_series_eval(&Value::Alg(x), &p, z, 1e-15).unwrap();
            assert!(terms < 400);
            assert!(close(&a1, &b1, 1e-12) && close(&a2, &b2, 1e-12), "n={n}");
        }
    }
    // Operator-valued x.
    let a = RightLinearOperator::random(2, 2, 0.5, &mut rng);
    let x = Value::Op(a.embed());
    let p = quat(0.1, 0.2, -0.3, 0.4);
    let z = Complex64::new(0.5, -0.3);
    let (a1, a2) = exp_stem(x.clone(), &p, 1e-15).unwrap().eval(z).unwrap();
    let ((b1, b2), _) = exp_series_eval(&x, &p, z, 1e-15).unwrap();
    assert!(close(&a1, &b1, 1e-11) && close(&a2, &b2, 1e-11));
}

#[test]
fn operator_exponential_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let a = RightLinearOperator::random(2, 3, 1.0, &mut rng);
    let e = exp_stem(Value::Op(a.embed()), &Multivector::zero(2), 1e-14).unwrap();
    for t in [0.1, 1.0, 3.0] {
        let v = e.induce(&Multivector::scalar(2, t)).unwrap();
        let oracle = (a.embed().matrix() * t).exp();
        let got = v.as_op().unwrap().matrix();
        assert!((got - &oracle).norm() <= 1e-11 * oracle.norm(), "t = {t}");
    }
}

#[test]
fn stem_symmetry_and_real_axis() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let x = Multivector::random(3, &mut rng);
    let p = random_cone_element(3, &mut rng).scale(0.4);
    let stems = [
        exp_stem(Value::Alg(x.clone()), &p, 1e-14).unwrap(),
        shifted_slice_power(&p, 4),
        Stem::power_series((0..5).map(|_| Value::Alg(Multivector::random(3, &mut rng))).collect(), 3.0).unwrap(),
    ];
    for s in &stems {
        for _ in 0..5 {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let (a1, a2) = s.eval(z).unwrap();
            let (b1, b2) = s.eval(z.conj()).unwrap();
            assert!(close(&a1, &b1, 1e-12));
            assert!(close(&a2, &b2.scale(-1.0), 1e-12));
            let (_, r2) = s.eval(Complex64::new(z.re, 0.0)).unwrap();
            assert!(r2.norm() < 1e-12);
        }
    }
}

#[test]
fn cauchy_riemann_diagnostics() {
    let x = Value::Alg(quat(0.4, -0.3, 0.8, 0.1));
    let e = exp_stem(x, &quat(0.1, 0.0, 0.3, 0.0), 1e-14).unwrap();
    let z = Complex64::new(0.3, 0.2);
    assert!(cr_residual(&e, z, 1e-4).unwrap() <= 1e-6);
    let ratio = cr_richardson_ratio(&e, z, 1e-2).unwrap();
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let ps = Stem::power_series((0..6).map(|_| Value::Alg(Multivector::random(2, &mut rng))).collect(), 2.0)
        .unwrap();
    let ratio = cr_richardson_ratio(&ps, Complex64::new(0.2, 0.3), 1e-2).unwrap();
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    // z -> conj z is not holomorphic.
    let anti = Stem::custom(Codomain::Algebra { n: 2 }, Domain::Whole, |z: Complex64| {
        Ok((Value::Alg(Multivector::scalar(2, z.re)), Value::Alg(Multivector::scalar(2, -z.im))))
    });
    assert!((cr_residual(&anti, z, 1e-5).unwrap() - 2.0).abs() < 1e-8);
    let small = Stem::power_series(vec![Value::Alg(Multivector::one(2))], 0.35).unwrap();
    assert!(matches!(cr_residual(&small, z, 0.1), Err(Error::OutsideDomain { .. })));
}

#[test]
fn defect_limit_examples() {
    let i = quat(0.0, 1.0, 0.0, 0.0);
    let j = quat(0.0, 0.0, 1.0, 0.0);
    let x = Value::Alg(Multivector::scalar(2, 1.3));
    let lim = exp_defect_limit(&x, &i, &j, &DEFAULT_DEFECT_GRID).unwrap();
    let expect = i.commutator(&j).scale(1.3 * 1.3);
    assert!((alg(&lim) - &expect).max_abs() <= 1e-6 * expect.max_abs());
    // Commuting p, q.
    let lim = exp_defect_limit(&x, &i, &i.scale(2.0), &DEFAULT_DEFECT_GRID).unwrap();
    assert!(lim.norm() <= 1e-12);
    // Nilpotent operator x.
    let (z, o) = (Multivector::zero(2), Multivector::one(2));
    let nil = RightLinearOperator::from_rows(vec![vec![z.clone(), o], vec![z.clone(), z]]).unwrap();
    let lim = exp_defect_limit(&Value::Op(nil.embed()), &i, &j, &DEFAULT_DEFECT_GRID).unwrap();
    assert!(lim.norm() <= 1e-12);
    assert!(exp_defect_limit(&x, &i, &j, &[0.1, 0.01]).is_err());
    assert!(exp_defect_limit(&x, &i, &j, &[2.0, 0.1, 0.01]).is_err());
}

#[test]
fn semigroup_law_on_commuting_scalars() {
    let j = quat(0.0, 0.6, 0.8, 0.0);
    let x = Multivector::from_slice(0.5, -0.4, &j);
    let p = Multivector::from_slice(0.3, 0.2, &j);
    let q = Multivector::from_slice(0.1, 0.5, &j);
    let e = exp_stem(Value::Alg(x.clone()), &Multivector::zero(2), 1e-14).unwrap();
    let lhs = e.induce(&(&p + &q)).unwrap();
    let rhs = e.induce(&p).unwrap().mul(&e.induce(&q).unwrap()).unwrap();
    assert!(close(&lhs, &rhs, 1e-10));
    let y = quat(0.5, 0.3, -0.9, 0.7);
    let p = quat(0.2, 0.9, 0.0, 0.0);
    let q = quat(0.1, 0.0, 0.0, 1.1);
    let e = exp_stem(Value::Alg(y), &Multivector::zero(2), 1e-14).unwrap();
    let lhs = e.induce(&(&p + &q)).unwrap();
    let rhs = e.induce(&p).unwrap().mul(&e.induce(&q).unwrap()).unwrap();
    assert!(lhs.sub(&rhs).unwrap().norm() >= 1e-3);
}

#[test]
fn integral_stem_examples() {
    let c = Value::Alg(quat(0.1, 0.2, 0.3, 0.4));
    let cc = c.clone();
    let h = integral_stem(move |_| Ok(Stem::constant(cc.clone())), |_| 1.0, (0.0, 1.0), QuadSpec::default()).unwrap();
    let q = quat(0.3, 0.1, -0.2, 0.5);
    assert!(close(&h.induce(&q).unwrap(), &c, 1e-14));
    // int_0^1 e^{-t q} dt = (1 - e^{-q}) q^{-1} for q in one slice.
    let h = integral_stem(
        |t| exp_stem(Value::Alg(Multivector::scalar(2, -t)), &Multivector::zero(2), 1e-14),
        |_| 1.0,
        (0.0, 1.0),
        QuadSpec::default(),
    )
    .unwrap();
    let d = q.cone_decompose(1e-12).unwrap();
    let zc = d.z();
    let closed = (Complex64::new(1.0, 0.0) - (-zc).exp()) / zc;
    let expect = phi(d.axis.as_ref().unwrap(), closed);
    assert!((alg(&h.induce(&q).unwrap()) - &expect).max_abs() < 1e-8);
    let z = Complex64::new(0.4, 0.7);
    let (a1, a2) = h.eval(z).unwrap();
    let (b1, b2) = h.eval(z.conj()).unwrap();
    assert!(close(&a1, &b1, 1e-13) && close(&a2, &b2.scale(-1.0), 1e-13));
}

#[test]
fn growth_constant_is_at_least_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let p = random_cone_element(3, &mut rng);
    let qs: Vec<Multivector> = (0..8).map(|_| random_cone_element(3, &mut rng)).collect();
    let c = growth_constant(&p, &qs, 8).unwrap();
    assert!(c >= 1.0 && c.is_finite());
}

#[test]
fn extension_from_real_axis_data() {
    // A stem is determined by its real-axis values: rebuild exp^x from a
    // polynomial fit on [-1, 1] and compare off the axis.
    let x = quat(0.3, -0.5, 0.2, 0.4);
    let e = exp_stem(Value::Alg(x.clone()), &Multivector::zero(2), 1e-15).unwrap();
    let deg = 14;
    let ts: Vec<f64> = (0..50).map(|k| libm::cos(core::f64::consts::PI * (k as f64 + 0.5) / 50.0)).collect();
    // Least squares on each coefficient via nalgebra.
    let vand = nalgebra::DMatrix::from_fn(ts.len(), deg + 1, |r, c| libm::pow(ts[r], c as f64));
    let rhs = nalgebra::DMatrix::from_fn(ts.len(), 4, |r, c| {
        e.induce(&Multivector::scalar(2, ts[r])).unwrap().as_alg().unwrap().coeff(c)
    });
    let sol = vand.clone().svd(true, true).solve(&rhs, 1e-14).unwrap();
    let coeffs: Vec<Value> = (0..=deg)
        .map(|r| Value::Alg(Multivector::from_coeffs(2, (0..4).map(|c| sol[(r, c)]).collect()).unwrap()))
        .collect();
    let fit = Stem::power_series(coeffs, f64::INFINITY).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..10 {
        let q = random_cone_element(2, &mut rng).scale(0.5);
        assert!(close(&fit.induce(&q).unwrap(), &e.induce(&q).unwrap(), 1e-8));
    }
}
