//! Line integrals relative to an algebra, the frame fields `Eᵢ = eᵢF`, the
//! conservative fields `Gᵢ`, the antiderivative `H = ∫ e/F dξ`, potentials
//! and first integrals.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[allow(unused_imports)] // inherent f64 methods shadow this when std is linked
use num_traits::Float;

use crate::algebra::{AlgebraSpec, Element, Family};
use crate::error::{Error, Result};
use crate::field::{fd_step, ProductField, VectorField};
use crate::linalg::{Matrix, Vector};
use crate::quadrature::{self, Tolerance};

type Curve<'a> = Box<dyn Fn(f64) -> Result<Vector> + 'a>;

/// An oriented, piecewise-differentiable integration contour.
pub enum PathSpec<'a> {
    Polyline(Vec<Vector>),
    /// `γ: [0, t_max] → ℝⁿ`; the velocity is differenced numerically when
    /// not supplied.
    Parametric {
        curve: Curve<'a>,
        velocity: Option<Curve<'a>>,
        t_max: f64,
    },
}

impl fmt::Debug for PathSpec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathSpec::Polyline(p) => f.debug_tuple("Polyline").field(p).finish(),
            PathSpec::Parametric { t_max, velocity, .. } => f
                .debug_struct("Parametric")
                .field("t_max", t_max)
                .field("analytic_velocity", &velocity.is_some())
                .finish(),
        }
    }
}

impl<'a> PathSpec<'a> {
    pub fn polyline(points: Vec<Vector>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidArgument("a polyline needs at least two points".into()));
        }
        let dim = points[0].len();
        for (i, pair) in points.windows(2).enumerate() {
            pair[1].check_len(dim)?;
            if pair[0] == pair[1] {
                return Err(Error::InvalidArgument(format!(
                    "polyline points {} and {} coincide",
                    i,
                    i + 1
                )));
            }
        }
        Ok(PathSpec::Polyline(points))
    }

    pub fn segment(from: Vector, to: Vector) -> Result<Self> {
        PathSpec::polyline(vec![from, to])
    }

    /// Closed polygon through `points`, returning to the first.
    pub fn closed(mut points: Vec<Vector>) -> Result<Self> {
        if let Some(first) = points.first().copied() {
            points.push(first);
        }
        PathSpec::polyline(points)
    }

    pub fn parametric(
        curve: impl Fn(f64) -> Result<Vector> + 'a,
        velocity: Option<Box<dyn Fn(f64) -> Result<Vector> + 'a>>,
        t_max: f64,
    ) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "parametric domain [0, {t_max}] is degenerate"
            )));
        }
        Ok(PathSpec::Parametric {
            curve: Box::new(curve),
            velocity,
            t_max,
        })
    }

    pub fn start(&self) -> Result<Vector> {
        match self {
            PathSpec::Polyline(p) => Ok(p[0]),
            PathSpec::Parametric { curve, .. } => curve(0.0),
        }
    }

    pub fn end(&self) -> Result<Vector> {
        match self {
            PathSpec::Polyline(p) => Ok(p[p.len() - 1]),
            PathSpec::Parametric { curve, t_max, .. } => curve(*t_max),
        }
    }

    /// `∫ integrand(γ(t), γ̇(t)) dt` over the whole path.
    fn integrate<I>(&self, dim: usize, tol: &Tolerance, mut integrand: I) -> Result<Vector>
    where
        I: FnMut(&Vector, &Vector) -> Result<Vector>,
    {
        let mut total = Vector::zeros(dim);
        match self {
            PathSpec::Polyline(points) => {
                for pair in points.windows(2) {
                    let (a, b) = (pair[0], pair[1]);
                    let d = b - a;
                    let q = quadrature::integrate_vector(
                        |t| integrand(&a.axpy(t, &d), &d),
                        0.0,
                        1.0,
                        dim,
                        tol,
                    )?;
                    total += q.value;
                }
            }
            PathSpec::Parametric {
                curve,
                velocity,
                t_max,
            } => {
                let q = quadrature::integrate_vector(
                    |t| {
                        let x = curve(t)?;
                        let v = match velocity {
                            Some(v) => v(t)?,
                            None => {
                                let h = fd_step(t);
                                let (lo, hi) = ((t - h).max(0.0), (t + h).min(*t_max));
                                (curve(hi)? - curve(lo)?).scale(1.0 / (hi - lo))
                            }
                        };
                        integrand(&x, &v)
                    },
                    0.0,
                    *t_max,
                    dim,
                    tol,
                )?;
                total = q.value;
            }
        }
        Ok(total)
    }
}

/// `∫_γ G dξ = ∫ G(γ(t)) γ̇(t) dt`, the product taken in `algebra`.
pub fn line_integral_algebra<G: VectorField + ?Sized>(
    g: &G,
    path: &PathSpec<'_>,
    algebra: &AlgebraSpec,
    tol: &Tolerance,
) -> Result<Element> {
    let n = algebra.dim();
    path.integrate(n, tol, |x, v| {
        let gx = g.eval(x)?;
        algebra.check(&gx)?;
        algebra.check(v)?;
        Ok(algebra.mul(&gx, v))
    })
}

/// `∫_γ G · ds` for a vector field `G`.
pub fn line_integral<G: VectorField + ?Sized>(g: &G, path: &PathSpec<'_>, tol: &Tolerance) -> Result<f64> {
    path.integrate(1, tol, |x, v| Ok(Vector::from_slice(&[g.eval(x)?.dot(v)])))
        .map(|s| s[0])
}

/// `Eᵢ = eᵢF` for every basis element.
pub fn frame_fields<'a, F: VectorField + ?Sized>(field: &'a F, algebra: &'a AlgebraSpec) -> Vec<ProductField<'a, &'a F>> {
    (0..algebra.dim())
        .map(|i| ProductField {
            factor: algebra.basis(i),
            field,
            algebra,
        })
        .collect()
}

/// `R(e/F(w))`, whose rows are `G₁(w), …, Gₙ(w)`.
pub fn g_matrix<F: VectorField + ?Sized>(field: &F, algebra: &AlgebraSpec, w: &Vector) -> Result<Matrix> {
    let f = field.eval(w)?;
    algebra.check(&f)?;
    Ok(algebra.rep(&algebra.inv(&f)?))
}

/// `G_k = Σⱼ Σᵢ c_ijk gᵢ eⱼ` with `(g₁, …, gₙ) = e/F`.
#[derive(Debug, Clone, Copy)]
pub struct GField<'a, F: ?Sized> {
    pub field: &'a F,
    pub algebra: &'a AlgebraSpec,
    pub index: usize,
}

impl<F: VectorField + ?Sized> VectorField for GField<'_, F> {
    fn dim(&self) -> usize {
        self.algebra.dim()
    }
    fn eval(&self, w: &Vector) -> Result<Vector> {
        let f = self.field.eval(w)?;
        self.algebra.check(&f)?;
        let g = self.algebra.inv(&f)?;
        let n = self.algebra.dim();
        let mut out = Vector::zeros(n);
        for j in 0..n {
            out[j] = (0..n).map(|i| self.algebra.constant(i, j, self.index) * g[i]).sum();
        }
        Ok(out)
    }
}

pub fn g_fields<'a, F: VectorField + ?Sized>(field: &'a F, algebra: &'a AlgebraSpec) -> Vec<GField<'a, F>> {
    (0..algebra.dim())
        .map(|index| GField { field, algebra, index })
        .collect()
}

/// Number of samples per segment when testing a path for regularity.
const PATH_SAMPLES: usize = 64;
/// Random waypoints tried after the straight segment fails.
const WAYPOINT_ATTEMPTS: usize = 8;

/// `H(w) = H(w₀) + ∫_γ (e/F) dξ` along a path from `w₀` to `w` that avoids
/// the singular set.
#[derive(Debug, Clone)]
pub struct Antiderivative<F> {
    field: F,
    algebra: AlgebraSpec,
    base: Vector,
    base_value: Element,
    tol: Tolerance,
}

pub fn antiderivative<F: VectorField>(field: F, algebra: &AlgebraSpec, base: Vector, base_value: Element) -> Result<Antiderivative<F>> {
    Antiderivative::new(field, algebra, base, base_value)
}

impl<F: VectorField> Antiderivative<F> {
    pub fn new(field: F, algebra: &AlgebraSpec, base: Vector, base_value: Element) -> Result<Self> {
        let n = algebra.dim();
        if field.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                found: field.dim(),
            });
        }
        base.check_len(n)?;
        base_value.check_len(n)?;
        let f = field.eval(&base)?;
        algebra.inv(&f)?;
        Ok(Antiderivative {
            field,
            algebra: algebra.clone(),
            base,
            base_value,
            tol: Tolerance::default(),
        })
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        &self.algebra
    }

    pub fn base(&self) -> Vector {
        self.base
    }

    pub fn base_value(&self) -> Element {
        self.base_value
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    /// `e/F(w)`
    pub fn integrand(&self, w: &Vector) -> Result<Element> {
        let f = self.field.eval(w)?;
        self.algebra.check(&f)?;
        self.algebra.inv(&f)
    }

    /// `JH(w) = R(e/F(w))`
    pub fn jacobian(&self, w: &Vector) -> Result<Matrix> {
        Ok(self.algebra.rep(&self.integrand(w)?))
    }

    /// `det R(F(w))`, or `None` outside the regular domain.
    fn regular_det(&self, w: &Vector) -> Option<f64> {
        let f = self.field.eval(w).ok()?;
        self.algebra.is_regular(&f).then(|| self.algebra.rep(&f).det())
    }

    /// First sample of the segment `a → b` outside the regular domain, or
    /// where `det R(F)` has changed sign since the previous sample.
    fn first_block(&self, a: &Vector, b: &Vector) -> Option<Vector> {
        let d = *b - *a;
        let mut prev: Option<f64> = None;
        for i in 0..=PATH_SAMPLES {
            let p = a.axpy(i as f64 / PATH_SAMPLES as f64, &d);
            match self.regular_det(&p) {
                None => return Some(p),
                Some(det) if prev.is_some_and(|q| q.signum() != det.signum()) => return Some(p),
                Some(det) => prev = Some(det),
            }
        }
        None
    }

    /// The integration path from the base point to `w`: the straight
    /// segment if it stays regular, otherwise a detour through a random
    /// waypoint.
    pub fn path_to(&self, w: &Vector) -> Result<Vec<Vector>> {
        w.check_len(self.algebra.dim())?;
        let f = self.field.eval(w)?;
        self.algebra.check(&f)?;
        self.algebra.inv(&f)?;
        let w0 = self.base;
        if *w == w0 {
            return Ok(vec![w0]);
        }
        let blocking = match self.first_block(&w0, w) {
            None => return Ok(vec![w0, *w]),
            Some(p) => p,
        };
        let n = w0.len();
        let margin = 0.5 * (*w - w0).norm();
        let mut lo = Vector::zeros(n);
        let mut hi = Vector::zeros(n);
        for i in 0..n {
            lo[i] = w0[i].min(w[i]) - margin;
            hi[i] = w0[i].max(w[i]) + margin;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(path_seed(&w0, w));
        for _ in 0..WAYPOINT_ATTEMPTS {
            let mut p = Vector::zeros(n);
            for i in 0..n {
                p[i] = lo[i] + unit_f64(&mut rng) * (hi[i] - lo[i]);
            }
            if self.first_block(&w0, &p).is_none() && self.first_block(&p, w).is_none() {
                return Ok(vec![w0, p, *w]);
            }
        }
        Err(Error::PathThroughSingularSet { blocking })
    }

    /// `H(w)`
    pub fn eval(&self, w: &Vector) -> Result<Element> {
        let points = self.path_to(w)?;
        if points.len() == 1 {
            return Ok(self.base_value);
        }
        self.eval_along(&PathSpec::Polyline(points))
    }

    /// `H` at the end of a caller-supplied path starting at the base point.
    /// Different non-homotopic paths may give different values.
    pub fn eval_along(&self, path: &PathSpec<'_>) -> Result<Element> {
        let start = path.start()?;
        if (start - self.base).max_abs() > 1e-12 * (1.0 + self.base.max_abs()) {
            return Err(Error::InvalidArgument(format!(
                "path starts at {start:?}, not at the base point {:?}",
                self.base
            )));
        }
        let recip = crate::field::Reciprocal {
            field: &self.field,
            algebra: &self.algebra,
        };
        Ok(self.base_value + line_integral_algebra(&recip, path, &self.algebra, &self.tol)?)
    }
}

impl<F: VectorField> VectorField for Antiderivative<F> {
    fn dim(&self) -> usize {
        self.algebra.dim()
    }
    fn eval(&self, w: &Vector) -> Result<Vector> {
        Antiderivative::eval(self, w)
    }
}

fn path_seed(a: &Vector, b: &Vector) -> u64 {
    // FNV-1a over the coordinate bits
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for x in a.iter().chain(b.iter()) {
        for byte in x.to_bits().to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialMode {
    /// `∫ G · ds` along the straight segment.
    LineIntegral,
    /// Iterated integrals along the coordinate directions, each correcting
    /// the previous ones by a differenced inner integral.
    Iterated,
}

/// Panels of the fixed-node rule used for the nested integrals in
/// [`PotentialMode::Iterated`]; fixed nodes keep the inner integrals smooth in
/// their parameters so they can be differenced.
const ITERATED_PANELS: u32 = 4;

fn fixed_rule(mut f: impl FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
    let h = (b - a) / ITERATED_PANELS as f64;
    let mut total = 0.0;
    for p in 0..ITERATED_PANELS {
        let lo = a + h * p as f64;
        total += quadrature::gauss_legendre_panel(&mut f, lo, lo + h)?;
    }
    Ok(total)
}

/// `h(w) − h(w₀)` for a conservative field `G`.
pub fn potential<G: VectorField + ?Sized>(g: &G, w0: &Vector, w: &Vector, mode: PotentialMode, tol: &Tolerance) -> Result<f64> {
    let n = g.dim();
    w0.check_len(n)?;
    w.check_len(n)?;
    if w0 == w {
        return Ok(0.0);
    }
    match mode {
        PotentialMode::LineIntegral => line_integral(g, &PathSpec::segment(*w0, *w)?, tol),
        PotentialMode::Iterated => iterated(g, w0, w),
    }
}

fn iterated<G: VectorField + ?Sized>(g: &G, w0: &Vector, w: &Vector) -> Result<f64> {
    let n = g.dim();
    let at = |base: &Vector, axis: usize, value: f64| {
        let mut p = *base;
        p[axis] = value;
        p
    };
    let comp = |p: &Vector, i: usize| -> Result<f64> { Ok(g.eval(p)?[i]) };
    // A(p) = ∫_{a₁}^{p₁} G₁(ξ, p₂, p₃) dξ
    let first = |p: &Vector| fixed_rule(|s| comp(&at(p, 0, s), 0), w0[0], p[0]);
    let diff = |f: &dyn Fn(&Vector) -> Result<f64>, p: &Vector, axis: usize| -> Result<f64> {
        let h = fd_step(p[axis]);
        let (lo, hi) = (at(p, axis, p[axis] - h), at(p, axis, p[axis] + h));
        Ok((f(&hi)? - f(&lo)?) / (hi[axis] - lo[axis]))
    };
    // B(p) = ∫_{a₂}^{p₂} (G₂ − ∂₂A)(p₁, η, p₃) dη
    let second = |p: &Vector| {
        fixed_rule(
            |s| {
                let q = at(p, 1, s);
                Ok(comp(&q, 1)? - diff(&first, &q, 1)?)
            },
            w0[1],
            p[1],
        )
    };
    let mut h = first(w)? + second(w)?;
    if n == 3 {
        // C(p) = ∫_{a₃}^{p₃} (G₃ − ∂₃(A + B))(p₁, p₂, ζ) dζ
        let both = |p: &Vector| Ok(first(p)? + second(p)?);
        h += fixed_rule(
            |s| {
                let q = at(w, 2, s);
                Ok(comp(&q, 2)? - diff(&both, &q, 2)?)
            },
            w0[2],
            w[2],
        )?;
    }
    Ok(h)
}

/// Two first integrals `hₐ = cₐ · H`, `h_b = c_b · H` of `F`.
#[derive(Debug, Clone)]
pub struct FirstIntegralPair<'h, F> {
    pub antiderivative: &'h Antiderivative<F>,
    pub coeffs: [Vector; 2],
    pub names: [String; 2],
}

/// Minimum angle, in degrees, between the gradients of a transversal pair.
pub const TRANSVERSALITY_DEG: f64 = 1.0;

pub fn first_integral_pair<F: VectorField>(h: &Antiderivative<F>) -> Result<FirstIntegralPair<'_, F>> {
    let algebra = h.algebra();
    if algebra.dim() != 3 {
        return Err(Error::InvalidArgument(
            "first-integral pairs are defined for three-dimensional fields".into(),
        ));
    }
    let roles = algebra.roles();
    let e = |i: usize| Vector::basis(3, i);
    let name = |i: usize| format!("h{}", i + 1);
    let (r, s, t) = (roles.r, roles.s, roles.t);
    let (coeffs, names) = match algebra.family() {
        Family::A3_r => ([e(s), e(t)], [name(s), name(t)]),
        Family::A3_rs => (
            [e(r) - e(s), e(r) - e(s) + e(t)],
            [
                format!("{}-{}", name(r), name(s)),
                format!("{}-{}+{}", name(r), name(s), name(t)),
            ],
        ),
        Family::A3_123 => (
            [e(r) - e(t), e(r) - e(s)],
            [format!("{}-{}", name(r), name(t)), format!("{}-{}", name(r), name(s))],
        ),
        f => return Err(Error::UnsupportedAlgebra(String::from(f.name()))),
    };
    Ok(FirstIntegralPair {
        antiderivative: h,
        coeffs,
        names,
    })
}

impl<F: VectorField> FirstIntegralPair<'_, F> {
    pub fn values(&self, w: &Vector) -> Result<[f64; 2]> {
        let hv = self.antiderivative.eval(w)?;
        Ok([self.coeffs[0].dot(&hv), self.coeffs[1].dot(&hv)])
    }

    /// Exact gradients `cₐᵀ R(e/F(w))`, combinations of the `Gᵢ`.
    pub fn gradients(&self, w: &Vector) -> Result<[Vector; 2]> {
        let jt = self.antiderivative.jacobian(w)?.transpose();
        Ok([jt.mul_vec(&self.coeffs[0]), jt.mul_vec(&self.coeffs[1])])
    }

    /// `⟨∇h, F⟩` for both integrals.
    pub fn flow_residuals(&self, w: &Vector) -> Result<[f64; 2]> {
        let f = self.antiderivative.field().eval(w)?;
        let [ga, gb] = self.gradients(w)?;
        Ok([ga.dot(&f), gb.dot(&f)])
    }

    /// Angle between the two gradients, in degrees.
    pub fn transversality_angle(&self, w: &Vector) -> Result<f64> {
        let [ga, gb] = self.gradients(w)?;
        Ok(angle_deg(&ga, &gb))
    }
}

/// Angle in `[0°, 90°]` between the lines spanned by `a` and `b`.
pub fn angle_deg(a: &Vector, b: &Vector) -> f64 {
    let cos = (a.dot(b) / (a.norm() * b.norm())).abs().min(1.0);
    cos.acos().to_degrees()
}
