//! Built-in operators and samplers.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sliceop_core::algebra::{phi, sample_imaginary_sphere};
use sliceop_core::operator::{spherical_spectrum, two_by_two_example};
use sliceop_core::{Multivector, RightLinearOperator};

/// `[[0, i], [j, 0]]` on `H^2`.
pub fn remark58() -> RightLinearOperator {
    two_by_two_example()
}

pub fn builtin_operator(name: &str) -> Option<RightLinearOperator> {
    match name {
        "remark58" => Some(remark58()),
        "neg_identity" => Some(RightLinearOperator::identity(2, 1).scale(-1.0)),
        "sectorial" => Some(sectorial_operator(0)),
        "stable" => Some(stable_operator(0)),
        _ => None,
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with standard normal coefficients times `scale`.
pub fn random_operator(n: u8, m: usize, scale: f64, seed: u64) -> RightLinearOperator {
    RightLinearOperator::random(n, m, scale, &mut rng(seed))
}

/// `max Re` over the spherical spectrum.
pub fn spectral_abscissa(a: &RightLinearOperator) -> f64 {
    spherical_spectrum(a).expect("eigenvalues converge").iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest argument over the spectrum (radians).
pub fn min_spectral_arg(a: &RightLinearOperator) -> f64 {
    spherical_spectrum(a)
        .expect("eigenvalues converge")
        .iter()
        .map(|&(r, s)| s.atan2(r))
        .fold(f64::INFINITY, f64::min)
}

/// Random quaternionic 3x3 with entries of size 0.3, shifted by -2: the
/// spectrum sits in `|arg| > 0.7 pi`.
pub fn sectorial_operator(seed: u64) -> RightLinearOperator {
    random_operator(2, 3, 0.3, seed).shift(2.0)
}

/// Random quaternionic 3x3 shifted so that the spectral abscissa is -0.5.
pub fn stable_operator(seed: u64) -> RightLinearOperator {
    let a = random_operator(2, 3, 1.0, seed);
    let w = spectral_abscissa(&a);
    a.shift(w + 0.5)
}

/// Uniform `Re` in `re`, `|Im|` in `im`, axis from the sphere sampler.
pub fn cone_samples(n: u8, count: usize, re: (f64, f64), im: (f64, f64), seed: u64) -> Vec<Multivector> {
    let mut g = rng(seed);
    let axes = sample_imaginary_sphere(n, seed ^ 0xa5a5, count.max(1)).expect("valid n");
    (0..count)
        .map(|i| {
            let r = g.random_range(re.0..re.1);
            let s = g.random_range(im.0..im.1);
            phi(&axes[i], Complex64::new(r, s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sectorial_fixture_is_well_inside_the_sector() {
        for seed in 0..10 {
            assert!(min_spectral_arg(&sectorial_operator(seed)) > 0.7 * PI, "seed {seed}");
        }
    }

    #[test]
    fn stable_fixture_abscissa() {
        assert!((spectral_abscissa(&stable_operator(3)) + 0.5).abs() < 1e-9);
    }
}
