//! Randomised invariants of the algebra, operator and slice layers.

use num_complex::Complex64;
use proptest::prelude::*;
use sliceop_core::algebra::{phi, sample_imaginary_sphere};
use sliceop_core::operator::{spherical_c, SphericalCalculus};
use sliceop_core::slice::{exp_stem, Domain, Stem, Value};
use sliceop_core::{ModuleVector, Multivector, RightLinearOperator};
use std::sync::Arc;

fn element(n: u8) -> impl Strategy<Value = Multivector> {
    prop::collection::vec(-2.0f64..2.0, 1usize << n).prop_map(move |c| Multivector::from_coeffs(n, c).unwrap())
}

/// `r + s j` with `j` drawn from the sphere sampler.
fn cone_element(n: u8) -> impl Strategy<Value = Multivector> {
    (-2.0f64..2.0, 0.0f64..2.0, 0u64..1000).prop_map(move |(r, s, seed)| {
        let j = &sample_imaginary_sphere(n, seed, 1).unwrap()[0];
        Multivector::from_slice(r, s, j)
    })
}

fn operator(n: u8, m: usize) -> impl Strategy<Value = RightLinearOperator> {
    prop::collection::vec(element(n), m * m).prop_map(move |es| {
        let rows = es.chunks(m).map(|r| r.to_vec()).collect();
        RightLinearOperator::from_rows(rows).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(a in element(3), b in element(3), c in element(3)) {
        let d = &(&(&a * &b) * &c) - &(&a * &(&b * &c));
        prop_assert!(d.max_abs() < 1e-12);
    }

    #[test]
    fn conj_is_an_anti_homomorphism(a in element(3), b in element(3)) {
        let d = &(&a * &b).conj() - &(&b.conj() * &a.conj());
        prop_assert!(d.max_abs() < 1e-12);
        prop_assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn clifford_norm_is_submultiplicative(a in element(3), b in element(3)) {
        prop_assert!((&a * &b).clifford_norm() <= a.clifford_norm() * b.clifford_norm() + 1e-10);
    }

    #[test]
    fn cone_norm_identities(q in cone_element(3)) {
        let d = q.cone_decompose(1e-10).unwrap();
        let qqc = &q * &q.conj();
        let r2s2 = d.r * d.r + d.s * d.s;
        prop_assert!((&qqc - &Multivector::scalar(3, r2s2)).max_abs() < 1e-12);
        prop_assert!((&q.conj() * &q).add_scalar(-r2s2).max_abs() < 1e-12);
        prop_assert!((q.clifford_norm() - q.euclid_norm()).abs() < 1e-10);
        prop_assert!((&d.reconstruct(3) - &q).max_abs() < 1e-12);
    }

    #[test]
    fn norm_is_multiplicative_within_a_slice(r1 in -2.0f64..2.0, s1 in -2.0f64..2.0, r2 in -2.0f64..2.0, s2 in -2.0f64..2.0, seed in 0u64..100) {
        let j = &sample_imaginary_sphere(3, seed, 1).unwrap()[0];
        let p = Multivector::from_slice(r1, s1, j);
        let q = Multivector::from_slice(r2, s2, j);
        let lhs = (&p * &q).clifford_norm();
        prop_assert!((lhs - p.clifford_norm() * q.clifford_norm()).abs() < 1e-10 * (1.0 + lhs));
    }

    #[test]
    fn cone_is_closed_under_powers(q in cone_element(3)) {
        let q = q.scale(0.5);
        for k in 1..=8 {
            prop_assert!(q.powi(k).in_quadratic_cone(1e-10), "power {}", k);
        }
    }

    #[test]
    fn operators_are_right_linear(a in operator(2, 3), x in prop::collection::vec(element(2), 3), q in element(2)) {
        let x = ModuleVector::new(x).unwrap();
        let lhs = a.apply(&x.right_mul(&q)).unwrap();
        let rhs = a.apply(&x).unwrap().right_mul(&q);
        prop_assert!(lhs.sub(&rhs).norm() < 1e-11);
        prop_assert!(a.embed().right_linearity_defect() < 1e-12);
    }

    #[test]
    fn induce_is_well_defined(r in -1.0f64..1.0, s in 0.01f64..1.0, seed in 0u64..100, x in element(2)) {
        let j = &sample_imaginary_sphere(2, seed, 1).unwrap()[0];
        let stem = exp_stem(Value::Alg(x), &Multivector::zero(2), 1e-15).unwrap();
        let a = stem.induce_at(Complex64::new(r, s), j).unwrap();
        let b = stem.induce_at(Complex64::new(r, -s), &j.scale(-1.0)).unwrap();
        prop_assert!(a.sub(&b).unwrap().norm() < 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn exp_stems_are_conjugation_symmetric(x in element(2), p in cone_element(2), re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let stem = exp_stem(Value::Alg(x.scale(0.5)), &p.scale(0.5), 1e-15).unwrap();
        let z = Complex64::new(re, im);
        let (a1, a2) = stem.eval(z).unwrap();
        let (b1, b2) = stem.eval(z.conj()).unwrap();
        prop_assert!(a1.sub(&b1).unwrap().norm() < 1e-10 * (1.0 + a1.norm()));
        prop_assert!(a2.add(&b2).unwrap().norm() < 1e-10 * (1.0 + a2.norm()));
    }

    #[test]
    fn resolvent_stem_induces_spherical_resolvent(a in operator(2, 2), r in 3.0f64..5.0, s in -2.0f64..2.0, seed in 0u64..100) {
        // After scaling ||A|| < 1.6, so Re q >= 3 stays in the resolvent set.
        let a = a.scale(0.1);
        let j = &sample_imaginary_sphere(2, seed, 1).unwrap()[0];
        let q = Multivector::from_slice(r, s, j);
        let stem = Stem::resolvent(Arc::new(SphericalCalculus::new(&a)), Domain::Whole);
        let got = stem.induce(&q).unwrap();
        let want = spherical_c(&a, &q).unwrap();
        let d = got.as_op().unwrap().sub(&want).norm_upper() / want.norm_upper();
        prop_assert!(d < 1e-10);
    }

    #[test]
    fn phi_is_a_homomorphism(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0, seed in 0u64..100) {
        let j = &sample_imaginary_sphere(3, seed, 1).unwrap()[0];
        let (z, w) = (Complex64::new(a, b), Complex64::new(c, d));
        let lhs = phi(j, z * w);
        let rhs = &phi(j, z) * &phi(j, w);
        prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
    }
}
