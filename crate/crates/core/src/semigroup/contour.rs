//! Contour integrals `int F(a) a' g(a) dt` over `w + Gamma(j; r; eta)`.
//!
//! The path runs in along `w + rho e^{-eta j}`, around the arc
//! `w + r e^{tj}`, `t in [-eta, eta]`, and out along `w + rho e^{eta j}`;
//! it winds positively around `{|a - w| < r} u {|arg(a - w)| > eta}`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::algebra::{phi, Multivector, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::operator::{RealEmbedding, RightLinearOperator, SphericalCalculus};
use crate::quad::GaussLegendre;
use crate::slice::{exp_stem, Value};

/// Geometry and quadrature settings of `w + Gamma(j; r; eta)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContourSpec {
    pub j: Multivector,
    pub r: f64,
    pub eta: f64,
    pub omega: f64,
    /// Ray truncation length; chosen from the tail bound when absent.
    pub length: Option<f64>,
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Minimum panel count on the arc.
    pub arc_panels: usize,
    /// Maximum number of panel doublings.
    pub max_levels: u32,
    pub tol: f64,
}

impl ContourSpec {
    pub fn new(j: Multivector, r: f64, eta: f64, omega: f64, tol: f64) -> Result<Self> {
        let s = Self { j, r, eta, omega, length: None, order: 16, arc_panels: 4, max_levels: 6, tol };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.j.in_imaginary_sphere(1e-10) {
            return Err(Error::NotInSphere);
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("arc radius r = {}", self.r)));
        }
        if !(self.eta > FRAC_PI_2 && self.eta < PI) {
            return Err(Error::InvalidParameter(alloc::format!("angle eta = {} not in (pi/2, pi)", self.eta)));
        }
        if !(self.tol > 0.0) || self.order == 0 || self.arc_panels == 0 {
            return Err(Error::InvalidParameter("tol, order and arc_panels must be positive".into()));
        }
        if let Some(l) = self.length {
            if !(l > self.r) {
                return Err(Error::InvalidParameter(alloc::format!("length {l} must exceed r")));
            }
        }
        Ok(())
    }
}

/// One piece of a path in `C_j`, parametrised over panel breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    /// `center + rho e^{theta i}` for `rho` over `breaks`; `inward` reverses
    /// the orientation.
    Ray { center: f64, theta: f64, breaks: Vec<f64>, inward: bool },
    /// `center + radius e^{t i}` for `t` over `breaks`.
    Arc { center: f64, radius: f64, breaks: Vec<f64> },
}

impl Segment {
    /// Position and derivative at parameter `u`.
    fn point(&self, u: f64) -> (Complex64, Complex64) {
        match self {
            Segment::Ray { center, theta, inward, .. } => {
                let e = Complex64::from_polar(1.0, *theta);
                let d = if *inward { -e } else { e };
                (*center + e * u, d)
            }
            Segment::Arc { center, radius, .. } => {
                let e = Complex64::from_polar(*radius, u);
                (*center + e, Complex64::i() * e)
            }
        }
    }

    fn breaks(&self) -> &[f64] {
        match self {
            Segment::Ray { breaks, .. } | Segment::Arc { breaks, .. } => breaks,
        }
    }
}

/// A path in the slice `C_j`, stored in complex coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub j: Multivector,
    pub segments: Vec<Segment>,
}

/// A quadrature node: `a = phi_j(zeta)` and `weight * a'` as complex numbers.
#[derive(Debug, Clone, Copy)]
struct Node {
    zeta: Complex64,
    dz: Complex64,
}

impl Contour {
    /// Full circle `center + radius e^{tj}`, `t in [0, 2 pi]`.
    pub fn circle(j: Multivector, center: f64, radius: f64, panels: usize) -> Self {
        let p = panels.max(1);
        let breaks = (0..=p).map(|i| 2.0 * PI * i as f64 / p as f64).collect();
        Self { j, segments: vec![Segment::Arc { center, radius, breaks }] }
    }

    /// `omega + Gamma(j; r; eta)` truncated at `length`. Ray panels grow
    /// geometrically from `r` up to `width`, then stay at `width`.
    pub fn sector(spec: &ContourSpec, length: f64, width: f64) -> Self {
        let mut rb = vec![spec.r];
        let mut x = spec.r;
        while x < length {
            x = (2.0 * x).min(x + width).min(length);
            rb.push(x);
        }
        let arc_n = spec.arc_panels.max(libm::ceil(2.0 * spec.eta * spec.r / width) as usize);
        let ab = (0..=arc_n).map(|i| -spec.eta + 2.0 * spec.eta * i as f64 / arc_n as f64).collect();
        Self {
            j: spec.j.clone(),
            segments: vec![
                Segment::Ray { center: spec.omega, theta: -spec.eta, breaks: rb.clone(), inward: true },
                Segment::Arc { center: spec.omega, radius: spec.r, breaks: ab },
                Segment::Ray { center: spec.omega, theta: spec.eta, breaks: rb, inward: false },
            ],
        }
    }

    fn nodes(&self, gl: &GaussLegendre, level: u32) -> Vec<Node> {
        let split = 1usize << level;
        let mut out = Vec::new();
        for seg in &self.segments {
            for w in seg.breaks().windows(2) {
                let h = (w[1] - w[0]) / split as f64;
                for p in 0..split {
                    let a = w[0] + h * p as f64;
                    for (u, wt) in gl.on(a, a + h) {
                        let (zeta, d) = seg.point(u);
                        out.push(Node { zeta, dz: d * wt });
                    }
                }
            }
        }
        out
    }
}

/// Line-integral settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineQuad {
    pub order: usize,
    pub max_levels: u32,
    pub tol: f64,
    /// Absolute scale below which differences count as converged.
    pub scale: f64,
}

impl Default for LineQuad {
    fn default() -> Self {
        Self { order: 16, max_levels: 6, tol: 1e-12, scale: 0.0 }
    }
}

/// Outcome of a contour quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourResult {
    pub value: RealEmbedding,
    /// Difference between the last two levels plus the truncation bound.
    pub error_estimate: f64,
    pub tail_bound: f64,
    pub nodes: usize,
    pub levels: u32,
}

/// `sum_i F_i o L_{a_i}`, accumulated per basis blade.
pub(crate) fn weighted_sum(fs: &[RealEmbedding], coeffs: &[Multivector], n: u8, m: usize) -> RealEmbedding {
    let dim = 1usize << n;
    let mut acc: Vec<Option<RealEmbedding>> = vec![None; dim];
    for (f, a) in fs.iter().zip(coeffs) {
        for (k, &c) in a.coeffs().iter().enumerate() {
            if c != 0.0 {
                acc[k].get_or_insert_with(|| RealEmbedding::zero(n, m)).axpy(c, f);
            }
        }
    }
    let mut out = RealEmbedding::zero(n, m);
    for (k, s) in acc.into_iter().enumerate() {
        if let Some(s) = s {
            out = out.add(&if k == 0 { s } else { s.right_scalar(&Multivector::blade(n, k)) });
        }
    }
    out
}

/// Iterate levels until two successive sums agree.
fn refine<E>(contour: &Contour, quad: &LineQuad, tail: f64, mut eval_level: E) -> Result<ContourResult>
where
    E: FnMut(&[Node], u32) -> Result<RealEmbedding>,
{
    let gl = GaussLegendre::new(quad.order);
    let mut prev: Option<RealEmbedding> = None;
    let mut est = f64::INFINITY;
    for level in 0..=quad.max_levels {
        let nodes = contour.nodes(&gl, level);
        let cur = eval_level(&nodes, level)?;
        if let Some(p) = &prev {
            est = cur.sub(p).frobenius();
            let size = cur.frobenius().max(quad.scale);
            if est <= quad.tol * size {
                return Ok(ContourResult {
                    value: cur,
                    error_estimate: est + tail,
                    tail_bound: tail,
                    nodes: nodes.len(),
                    levels: level,
                });
            }
        }
        prev = Some(cur);
    }
    Err(Error::Quadrature { tol: quad.tol, estimate: est })
}

/// `int F(a(t)) a'(t) g(a(t)) dt` along `contour`, i.e. the sum of
/// `F(a) o L_{a' g(a)}` over the nodes.
pub fn line_integral<F, G>(
    mut f: F,
    mut g: G,
    contour: &Contour,
    quad: &LineQuad,
    n: u8,
    m: usize,
) -> Result<ContourResult>
where
    F: FnMut(&Multivector) -> Result<RealEmbedding>,
    G: FnMut(&Multivector) -> Result<Multivector>,
{
    let j = contour.j.clone();
    refine(contour, quad, 0.0, |nodes, _| {
        let mut fs = Vec::with_capacity(nodes.len());
        let mut cs = Vec::with_capacity(nodes.len());
        for nd in nodes {
            let a = phi(&j, nd.zeta);
            fs.push(f(&a)?);
            cs.push(&phi(&j, nd.dz) * &g(&a)?);
        }
        Ok(weighted_sum(&fs, &cs, n, m))
    })
}

/// Decay data of an integrand on the rays: `|g| <= prefactor e^{-decay rho}`
/// with phase speed at most `freq`.
#[derive(Debug, Clone, Copy)]
struct Profile {
    decay: f64,
    prefactor: f64,
    freq: f64,
}

/// Contour semigroup evaluator with the resolvents `C_a(A)` cached at the
/// nodes of the most recently used path.
#[derive(Debug, Clone)]
pub struct ContourSemigroup {
    calc: SphericalCalculus,
    spec: ContourSpec,
    k_bound: f64,
    cache_path: Option<Contour>,
    cache: Vec<Vec<RealEmbedding>>,
}

impl ContourSemigroup {
    /// Errors if the path meets the spherical spectrum.
    pub fn new(a: &RightLinearOperator, spec: ContourSpec) -> Result<Self> {
        spec.validate()?;
        if spec.j.n() != a.n() {
            return Err(Error::SignatureMismatch { left: a.n(), right: spec.j.n() });
        }
        let calc = SphericalCalculus::new(a);
        // K ~ sup ||C_a|| |a - w| from samples on the path, doubled.
        let mut k = 0.0f64;
        let mut probe = |z: Complex64| -> Result<()> {
            let alpha = phi(&spec.j, z + spec.omega);
            let c = calc.spherical_c(&alpha)?;
            k = k.max(c.norm_upper() * z.norm());
            Ok(())
        };
        for f in [1.0, 2.0, 8.0, 64.0, 1e3, 1e5] {
            probe(Complex64::from_polar(spec.r * f, spec.eta))?;
        }
        for i in 0..=8 {
            probe(Complex64::from_polar(spec.r, spec.eta * (i as f64 / 4.0 - 1.0)))?;
        }
        Ok(Self { calc, spec, k_bound: 2.0 * k, cache_path: None, cache: Vec::new() })
    }

    pub fn spec(&self) -> &ContourSpec {
        &self.spec
    }

    /// Estimated `K` in `||C_a|| <= K / |a - w|` on the path.
    pub fn k_bound(&self) -> f64 {
        self.k_bound
    }

    /// `T(t) = (1/2pi) int C_a(A) j^{-1} e^{ta} da`; `T(0) = Id`.
    pub fn at(&mut self, t: f64) -> Result<ContourResult> {
        if t == 0.0 {
            return Ok(self.identity_result());
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("t = {t}")));
        }
        let prof = Profile {
            decay: -t * libm::cos(self.spec.eta),
            prefactor: libm::exp(t * self.spec.omega),
            freq: t,
        };
        let j = self.spec.j.clone();
        self.integrate(prof, move |zeta| Ok(phi(&j, (zeta * t).exp())))
    }

    /// `T_p(q) = (1/2pi) int C_a(A) j^{-1} da exp_p^a(q)`.
    pub fn slice(&mut self, p: &Multivector, q: &Multivector) -> Result<ContourResult> {
        let n = self.calc.n();
        if p.n() != n || q.n() != n {
            return Err(Error::SignatureMismatch { left: n, right: if p.n() != n { p.n() } else { q.n() } });
        }
        let dp = p.cone_decompose(DEFAULT_TOL)?;
        let dq = q.cone_decompose(DEFAULT_TOL)?;
        if dp.s == 0.0 && dq.s == 0.0 && dp.r + dq.r == 0.0 {
            return Ok(self.identity_result());
        }
        // The stem of exp_p^a at q is assembled from exp(a zeta) and
        // exp(a conj zeta) for zeta = p_z + z_q and p_z + conj z_q; on the
        // rays these decay iff |arg zeta| < eta - pi/2.
        let zp = dp.z();
        let mut decay = f64::INFINITY;
        let mut freq = 0.0f64;
        for zeta in [zp + dq.z(), zp + dq.z().conj()] {
            decay = decay.min(-zeta.norm() * libm::cos(self.spec.eta - zeta.arg().abs()));
            freq = freq.max(zeta.norm());
        }
        if !(decay > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "contour angle eta = {} too small for p = {p}, q = {q}",
                self.spec.eta
            )));
        }
        let prof = Profile { decay, prefactor: 4.0 * libm::exp(self.spec.omega * (dp.r + dq.r)), freq };
        let (p, q) = (p.clone(), q.clone());
        let j = self.spec.j.clone();
        self.integrate(prof, move |zeta| {
            let stem = exp_stem(Value::Alg(phi(&j, zeta)), &p, 1e-15)?;
            match stem.induce(&q)? {
                Value::Alg(v) => Ok(v),
                Value::Op(_) => Err(Error::CodomainMismatch("expected an algebra value")),
            }
        })
    }

    fn identity_result(&self) -> ContourResult {
        let e = self.calc.embedding();
        ContourResult {
            value: RealEmbedding::identity(e.n(), e.m()),
            error_estimate: 0.0,
            tail_bound: 0.0,
            nodes: 0,
            levels: 0,
        }
    }

    /// Tail of both rays beyond `L` after the `1/2pi` factor:
    /// `2 K P e^{-cL} / (c L) / (2 pi)`.
    fn tail(&self, prof: &Profile, l: f64) -> f64 {
        self.k_bound * prof.prefactor * libm::exp(-prof.decay * l) / (prof.decay * l) / PI
    }

    fn length(&self, prof: &Profile) -> f64 {
        if let Some(l) = self.spec.length {
            return l;
        }
        let target = 0.1 * self.spec.tol * prof.prefactor;
        let mut l = 2.0 * self.spec.r;
        for _ in 0..400 {
            if self.tail(prof, l) <= target {
                break;
            }
            l *= 1.1;
        }
        // A coarse grid of lengths lets repeated queries share paths.
        libm::pow(2.0, libm::ceil(libm::log2(l) * 4.0) / 4.0)
    }

    fn integrate<G>(&mut self, prof: Profile, mut g: G) -> Result<ContourResult>
    where
        G: FnMut(Complex64) -> Result<Multivector>,
    {
        let l = self.length(&prof);
        let width = libm::pow(2.0, libm::floor(libm::log2(2.0 * PI / prof.freq)));
        let path = Contour::sector(&self.spec, l, width);
        if self.cache_path.as_ref() != Some(&path) {
            self.cache_path = Some(path.clone());
            self.cache.clear();
        }
        let tail = self.tail(&prof, l);
        let quad = LineQuad {
            order: self.spec.order,
            max_levels: self.spec.max_levels,
            tol: self.spec.tol,
            // Converged once level differences drop below tol * P / 10^3 * 2 pi.
            scale: 2.0 * PI * prof.prefactor * 1e-3,
        };
        let j = self.spec.j.clone();
        let j_inv = j.scale(-1.0);
        let (n, m) = (self.calc.n(), self.calc.m());
        let calc = &self.calc;
        let cache = &mut self.cache;
        let mut res = refine(&path, &quad, 0.0, |nodes, level| {
            let level = level as usize;
            while cache.len() <= level {
                cache.push(Vec::new());
            }
            if cache[level].is_empty() {
                let mut cs = Vec::with_capacity(nodes.len());
                for nd in nodes {
                    cs.push(calc.spherical_c_fast(&phi(&j, nd.zeta))?);
                }
                cache[level] = cs;
            }
            let mut coeffs = Vec::with_capacity(nodes.len());
            for nd in nodes {
                let gv = g(nd.zeta)?;
                coeffs.push(&(&j_inv * &phi(&j, nd.dz)) * &gv);
            }
            Ok(weighted_sum(&cache[level], &coeffs, n, m))
        })?;
        res.value = res.value.scale(0.5 / PI);
        res.error_estimate = res.error_estimate * 0.5 / PI + tail;
        res.tail_bound = tail;
        Ok(res)
    }
}

/// `T(t)` by the contour integral over `spec`.
pub fn contour_semigroup(a: &RightLinearOperator, spec: &ContourSpec, t: f64) -> Result<RealEmbedding> {
    Ok(ContourSemigroup::new(a, spec.clone())?.at(t)?.value)
}

/// `T_p(q)` by the contour integral over `spec`.
pub fn contour_semigroup_slice(
    a: &RightLinearOperator,
    spec: &ContourSpec,
    p: &Multivector,
    q: &Multivector,
) -> Result<RealEmbedding> {
    Ok(ContourSemigroup::new(a, spec.clone())?.slice(p, q)?.value)
}
