use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

/// A conjugation-invariant region of the complex plane.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "params", rename_all = "snake_case"))]
pub enum Domain {
    Whole,
    /// `|z - center| < radius`, real center.
    Disc { center: f64, radius: f64 },
    /// `z = vertex` or `|arg(z - vertex)| < half_angle`.
    Sector { vertex: f64, half_angle: f64 },
    /// `Re z > re_min`.
    HalfPlane { re_min: f64 },
    /// `inner < |z - center| < outer`.
    Annulus { center: f64, inner: f64, outer: f64 },
    /// The plane minus the given points and their conjugates.
    Punctured { points: Vec<(f64, f64)> },
    Intersection(Vec<Domain>),
}

impl Domain {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Domain::Whole => true,
            Domain::Disc { center, radius } => (z - center).norm() < *radius,
            Domain::Sector { vertex, half_angle } => {
                let w = z - vertex;
                w.norm() == 0.0 || w.arg().abs() < *half_angle
            }
            Domain::HalfPlane { re_min } => z.re > *re_min,
            Domain::Annulus { center, inner, outer } => {
                let r = (z - center).norm();
                r > *inner && r < *outer
            }
            Domain::Punctured { points } => points.iter().all(|&(r, s)| {
                let scale = libm::hypot(r, s).max(1.0);
                let tol = 1e-12 * scale;
                (z - Complex64::new(r, s)).norm() > tol && (z - Complex64::new(r, -s)).norm() > tol
            }),
            Domain::Intersection(ds) => ds.iter().all(|d| d.contains(z)),
        }
    }

    pub fn intersect(&self, other: &Domain) -> Domain {
        match (self, other) {
            (Domain::Whole, d) | (d, Domain::Whole) => d.clone(),
            (Domain::Intersection(a), Domain::Intersection(b)) => {
                Domain::Intersection(a.iter().chain(b).cloned().collect())
            }
            (Domain::Intersection(a), d) | (d, Domain::Intersection(a)) => {
                let mut v = a.clone();
                v.push(d.clone());
                Domain::Intersection(v)
            }
            (a, b) => Domain::Intersection(alloc::vec![a.clone(), b.clone()]),
        }
    }

    /// Bounding box `(re_lo, re_hi, s_hi)` of the closed upper half, used for
    /// sampling. Unbounded regions are clipped to a unit-scale window.
    fn window(&self) -> (f64, f64, f64) {
        match self {
            Domain::Whole | Domain::Punctured { .. } => (-2.0, 2.0, 2.0),
            Domain::Disc { center, radius } => (center - radius, center + radius, *radius),
            Domain::Sector { vertex, half_angle } => {
                let reach = 3.0;
                let lo = if *half_angle > PI / 2.0 { vertex - reach } else { *vertex };
                (lo, vertex + reach, reach)
            }
            Domain::HalfPlane { re_min } => (*re_min, re_min + 3.0, 3.0),
            Domain::Annulus { center, outer, .. } => (center - outer, center + outer, *outer),
            Domain::Intersection(ds) => ds.iter().map(|d| d.window()).fold(
                (f64::NEG_INFINITY, f64::INFINITY, f64::INFINITY),
                |(a, b, c), (x, y, z)| (a.max(x), b.min(y), c.min(z)),
            ),
        }
    }

    /// A point with `Im z >= 0` drawn by rejection from the sampling window.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Complex64> {
        let (lo, hi, s_hi) = self.window();
        if !(lo < hi) || !(s_hi > 0.0) {
            return None;
        }
        for _ in 0..10_000 {
            let z = Complex64::new(rng.random_range(lo..hi), rng.random_range(0.0..s_hi));
            if self.contains(z) {
                return Some(z);
            }
        }
        None
    }
}
