//! Gauss–Legendre rules and polynomial extrapolation.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the `k`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "need at least one node");
        let mut nodes = vec![0.0; k];
        let mut weights = vec![0.0; k];
        for i in 0..k.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_k.
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (k as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(k, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(k, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[k - 1 - i] = x;
            weights[i] = w;
            weights[k - 1 - i] = w;
        }
        if k % 2 == 1 {
            nodes[k / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (c + h * x, h * w))
    }

    /// Composite rule over `panels` equal subintervals of `[a, b]`.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * self.nodes.len());
        for p in 0..panels {
            let lo = a + h * p as f64;
            out.extend(self.on(lo, lo + h));
        }
        out
    }
}

/// `(P_k(x), P_k'(x))` by the three-term recurrence.
fn legendre(k: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=k {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    if k == 0 {
        return (1.0, 0.0);
    }
    let d = k as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Neville evaluation at 0 of the interpolating polynomial through
/// `(x_i, y_i)`, over any vector type given as `Vec<f64>` slices.
///
/// Returns the extrapolated value and the difference between the last two
/// diagonal entries as an error estimate.
pub fn neville_at_zero(xs: &[f64], ys: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return Err(Error::BadGrid("need at least two points"));
    }
    for (i, x) in xs.iter().enumerate() {
        if !(*x > 0.0) || !x.is_finite() {
            return Err(Error::BadGrid("abscissae must be positive"));
        }
        if xs[..i].iter().any(|y| (y - x).abs() <= 1e-14 * x.abs()) {
            return Err(Error::BadGrid("duplicate abscissae"));
        }
    }
    let k = xs.len();
    let mut t: Vec<Vec<f64>> = ys.to_vec();
    let mut prev_top = t[0].clone();
    for level in 1..k {
        for i in 0..k - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            let den = xi - xj;
            let next: Vec<f64> = t[i]
                .iter()
                .zip(&t[i + 1])
                .map(|(a, b)| (xi * b - xj * a) / den)
                .collect();
            t[i] = next;
        }
        if level < k - 1 {
            prev_top = t[0].clone();
        }
    }
    let est = t[0].iter().zip(&prev_top).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok((t.swap_remove(0), est))
}
