//! The metric `g` under which `F` is geodesible, the distance `d_F`,
//! geodesics through the inverse of `H`, the commuting family `F_{θ,φ}` and
//! Lie brackets.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow this when std is linked
use num_traits::Float;

use crate::algebra::{AlgebraSpec, Element};
use crate::calculus::Antiderivative;
use crate::error::{Error, Result};
use crate::field::{ProductField, VectorField};
use crate::linalg::{lu_solve_in_place, Matrix, Vector};

/// Condition estimates above this flag the frame solve as ill-conditioned.
pub const ILL_CONDITIONED: f64 = 1e12;

/// The flat metric `λᵢⱼ = δᵢⱼ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NaturalMetric {
    pub dim: usize,
}

impl NaturalMetric {
    pub fn matrix(&self) -> Matrix {
        Matrix::identity(self.dim)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    pub point: Vector,
    /// Solution of `Eᵢ g Eⱼᵀ = δᵢⱼ`.
    pub matrix: Matrix,
    /// Independent entries `a₁, a₂, …`: the upper triangle, row by row.
    pub entries: Vec<f64>,
    /// `max |Eᵢ g Eⱼᵀ − δᵢⱼ|`
    pub frame_residual: f64,
    /// `(1/‖e‖²) Jᴴᵀ Jᴴ` with `Jᴴ = R(e/F(w))`.
    pub pullback: Matrix,
    /// Max entrywise difference between `matrix` and `pullback`.
    pub discrepancy: f64,
    /// Max entrywise difference between `matrix` and `Jᴴᵀ Jᴴ`.
    pub unnormalized_discrepancy: f64,
    /// 1-norm condition estimate of the linear system.
    pub condition: f64,
    pub ill_conditioned: bool,
    pub positive_definite: bool,
}

fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in i..n {
            v.push((i, j));
        }
    }
    v
}

fn one_norm(a: &[f64], n: usize) -> f64 {
    (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `(1/‖e‖²) R(e/F)ᵀ R(e/F)`
pub fn pullback_metric<F: VectorField + ?Sized>(field: &F, algebra: &AlgebraSpec, w: &Vector) -> Result<Matrix> {
    let jh = crate::calculus::g_matrix(field, algebra, w)?;
    Ok(jh.transpose().matmul(&jh).scale(1.0 / algebra.unit_norm_sq()))
}

/// Solves the frame system at `w` and cross-checks it against the
/// pullback form.
pub fn metric_at<F: VectorField + ?Sized>(field: &F, algebra: &AlgebraSpec, w: &Vector) -> Result<MetricTensor> {
    let n = algebra.dim();
    let f = field.eval(w)?;
    algebra.check(&f)?;
    let jh = algebra.rep(&algebra.inv(&f)?);
    // Eᵢ = eᵢF is column i of R(F)
    let rf = algebra.rep(&f);
    let frame: Vec<Vector> = (0..n).map(|i| rf.column(i)).collect();

    let unknowns = upper_pairs(n);
    let m = unknowns.len();
    let equations = upper_pairs(n);
    let mut a = alloc::vec![0.0; m * m];
    let mut b = alloc::vec![0.0; m];
    for (row, &(i, j)) in equations.iter().enumerate() {
        // Eᵢ g Eⱼᵀ = Σ_{p ≤ q} a_pq (Eᵢ_p Eⱼ_q + Eᵢ_q Eⱼ_p) (once on the diagonal)
        for (col, &(p, q)) in unknowns.iter().enumerate() {
            a[row * m + col] = if p == q {
                frame[i][p] * frame[j][p]
            } else {
                frame[i][p] * frame[j][q] + frame[i][q] * frame[j][p]
            };
        }
        b[row] = if i == j { 1.0 } else { 0.0 };
    }
    let norm_a = one_norm(&a, m);
    let mut lu = a.clone();
    let mut x = b.clone();
    if !lu_solve_in_place(&mut lu, m, &mut x) {
        return Err(Error::SingularElement { det: rf.det() });
    }
    // ‖A⁻¹‖₁ column by column
    let mut inv_norm = 0.0f64;
    for c in 0..m {
        let mut lu = a.clone();
        let mut col = alloc::vec![0.0; m];
        col[c] = 1.0;
        lu_solve_in_place(&mut lu, m, &mut col);
        inv_norm = inv_norm.max(col.iter().map(|v| v.abs()).sum());
    }
    let condition = norm_a * inv_norm;

    let mut g = Matrix::zeros(n);
    for (&(p, q), v) in unknowns.iter().zip(&x) {
        g[(p, q)] = *v;
        g[(q, p)] = *v;
    }
    let mut frame_residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = frame[i].dot(&g.mul_vec(&frame[j]));
            let want = if i == j { 1.0 } else { 0.0 };
            frame_residual = frame_residual.max((v - want).abs());
        }
    }
    let raw = jh.transpose().matmul(&jh);
    let pullback = raw.scale(1.0 / algebra.unit_norm_sq());
    Ok(MetricTensor {
        point: *w,
        matrix: g,
        entries: x,
        frame_residual,
        discrepancy: g.axpy(-1.0, &pullback).max_abs(),
        unnormalized_discrepancy: g.axpy(-1.0, &raw).max_abs(),
        pullback,
        condition,
        ill_conditioned: !(condition <= ILL_CONDITIONED),
        positive_definite: g.cholesky().is_some(),
    })
}

/// `d_F(w, w′) = ‖H(w) − H(w′)‖`
pub fn distance<F: VectorField>(h: &Antiderivative<F>, w: &Vector, w2: &Vector) -> Result<f64> {
    if w == w2 {
        return Ok(0.0);
    }
    Ok((h.eval(w)? - h.eval(w2)?).norm())
}

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_MAX_HALVINGS: usize = 40;

/// Outcome of inverting `H` by Newton's method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub point: Vector,
    pub iterations: usize,
    /// `‖H(point) − target‖`
    pub residual: f64,
}

/// Solves `H(x) = target` by damped Newton from `start`, using
/// `JH(x)⁻¹ = R(F(x))`.
pub fn invert<F: VectorField>(h: &Antiderivative<F>, target: &Element, start: &Vector) -> Result<Inversion> {
    let algebra = h.algebra();
    let tol = 1e-10 * (1.0 + target.norm());
    let mut x = *start;
    let mut r = *target - h.eval(&x)?;
    let mut rn = r.norm();
    for iter in 0..NEWTON_MAX_ITER {
        if rn <= tol {
            return Ok(Inversion {
                point: x,
                iterations: iter,
                residual: rn,
            });
        }
        let f = h.field().eval(&x)?;
        let step = algebra.rep(&f).mul_vec(&r);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..NEWTON_MAX_HALVINGS {
            let trial = x.axpy(lambda, &step);
            if let Ok(v) = h.eval(&trial) {
                let tr = *target - v;
                if tr.norm() < rn {
                    accepted = Some((trial, tr));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((nx, nr)) => {
                x = nx;
                r = nr;
                rn = r.norm();
            }
            None => {
                return Err(Error::NewtonDivergence {
                    iterate: x,
                    residual: rn,
                })
            }
        }
    }
    if rn <= tol {
        return Ok(Inversion {
            point: x,
            iterations: NEWTON_MAX_ITER,
            residual: rn,
        });
    }
    Err(Error::NewtonDivergence {
        iterate: x,
        residual: rn,
    })
}

/// `H⁻¹(H(w₀) + t ‖e‖ v/‖v‖)`, the unit-speed geodesic of `g` through `w₀`.
pub fn geodesic<F: VectorField>(h: &Antiderivative<F>, w0: &Vector, v: &Vector, t: f64) -> Result<Vector> {
    let n = h.algebra().dim();
    w0.check_len(n)?;
    v.check_len(n)?;
    let vn = v.norm();
    if !(vn > 0.0) {
        return Err(Error::InvalidArgument("geodesic direction must be non-zero".into()));
    }
    if t == 0.0 {
        return Ok(*w0);
    }
    let scale = t * h.algebra().unit_norm_sq().sqrt() / vn;
    let target = h.eval(w0)?.axpy(scale, v);
    Ok(invert(h, &target, w0)?.point)
}

/// `Φ_t(w) = H⁻¹(H(w) + t e)`: the flow of `F` read off the rectification.
pub fn rectified_flow<F: VectorField>(h: &Antiderivative<F>, w: &Vector, t: f64) -> Result<Vector> {
    if t == 0.0 {
        return Ok(*w);
    }
    let target = h.eval(w)?.axpy(t, &h.algebra().unit());
    Ok(invert(h, &target, w)?.point)
}

/// Speed of the geodesic at parameter `t` measured with the pullback metric,
/// by central differences in `t`.
pub fn geodesic_speed<F: VectorField>(h: &Antiderivative<F>, w0: &Vector, v: &Vector, t: f64) -> Result<f64> {
    let dt = 1e-4;
    let a = geodesic(h, w0, v, t - dt)?;
    let b = geodesic(h, w0, v, t + dt)?;
    let vel = (b - a).scale(1.0 / (2.0 * dt));
    let p = geodesic(h, w0, v, t)?;
    let g = pullback_metric(h.field(), h.algebra(), &p)?;
    Ok(vel.dot(&g.mul_vec(&vel)).sqrt())
}

/// `u_{θ,φ} = (cos θ sin φ, sin θ sin φ, cos φ)`
pub fn unit_direction(theta: f64, phi: f64) -> Vector {
    Vector::new3(theta.cos() * phi.sin(), theta.sin() * phi.sin(), phi.cos())
}

/// `F_{θ,φ}(w) = u_{θ,φ} F(w)`
pub fn family_field<'a, F: VectorField + ?Sized>(
    field: &'a F,
    algebra: &'a AlgebraSpec,
    theta: f64,
    phi: f64,
) -> Result<ProductField<'a, &'a F>> {
    if algebra.dim() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            found: algebra.dim(),
        });
    }
    Ok(ProductField {
        factor: unit_direction(theta, phi),
        field,
        algebra,
    })
}

/// `[K₁, K₂](w) = dK₂(w) K₁(w) − dK₁(w) K₂(w)`
pub fn lie_bracket<A: VectorField + ?Sized, B: VectorField + ?Sized>(k1: &A, k2: &B, w: &Vector) -> Result<Vector> {
    let d1 = k1.jacobian(w)?.matrix;
    let d2 = k2.jacobian(w)?.matrix;
    Ok(d2.mul_vec(&k1.eval(w)?) - d1.mul_vec(&k2.eval(w)?))
}

/// `H_*K(w) = R(e/F(w)) K(w)`
pub fn push_forward<F: VectorField, K: VectorField + ?Sized>(h: &Antiderivative<F>, k: &K, w: &Vector) -> Result<Vector> {
    Ok(h.jacobian(w)?.mul_vec(&k.eval(w)?))
}

/// Largest component of the Riemann tensor of the pullback metric at `w`,
/// by nested central differences with step `step`. Zero up to
/// discretisation error, since `g` is the pullback of a flat metric.
pub fn curvature_proxy<F: VectorField + ?Sized>(field: &F, algebra: &AlgebraSpec, w: &Vector, step: f64) -> Result<f64> {
    let n = algebra.dim();
    let metric = |p: &Vector| pullback_metric(field, algebra, p);
    let shifted = |p: &Vector, axis: usize, d: f64| {
        let mut q = *p;
        q[axis] += d;
        q
    };
    // Γ^a_{bc} at p
    let christoffel = |p: &Vector| -> Result<Vec<f64>> {
        let g = metric(p)?;
        let ginv_cols: Vec<Vector> = (0..n)
            .map(|i| g.solve(&Vector::basis(n, i)).ok_or(Error::SingularElement { det: g.det() }))
            .collect::<Result<_>>()?;
        let mut dg = Vec::with_capacity(n);
        for c in 0..n {
            let gp = metric(&shifted(p, c, step))?;
            let gm = metric(&shifted(p, c, -step))?;
            dg.push(gp.axpy(-1.0, &gm).scale(0.5 / step));
        }
        let mut gamma = alloc::vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = 0.0;
                    for d in 0..n {
                        let ginv_ad = ginv_cols[d][a];
                        s += ginv_ad * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]);
                    }
                    gamma[(a * n + b) * n + c] = 0.5 * s;
                }
            }
        }
        Ok(gamma)
    };
    let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let g0 = christoffel(w)?;
    let mut dgamma = Vec::with_capacity(n);
    for c in 0..n {
        let gp = christoffel(&shifted(w, c, step))?;
        let gm = christoffel(&shifted(w, c, -step))?;
        dgamma.push(gp.iter().zip(&gm).map(|(p, m)| (p - m) * (0.5 / step)).collect::<Vec<_>>());
    }
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut r = dgamma[c][idx(a, b, d)] - dgamma[d][idx(a, b, c)];
                    for e in 0..n {
                        r += g0[idx(a, c, e)] * g0[idx(e, b, d)] - g0[idx(a, d, e)] * g0[idx(e, b, c)];
                    }
                    worst = worst.max(r.abs());
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Family;
    use crate::field::FieldDef;

    fn a31_zero() -> AlgebraSpec {
        AlgebraSpec::standard(Family::A3_r, &[0.0; 6]).unwrap()
    }

    #[test]
    fn identity_field_metric_at_unit() {
        let m = metric_at(&FieldDef::identity(3), &a31_zero(), &Vector::new3(1.0, 0.0, 0.0)).unwrap();
        assert!(m.matrix.axpy(-1.0, &Matrix::identity(3)).max_abs() < 1e-14);
        assert!(m.frame_residual < 1e-14 && m.positive_definite && !m.ill_conditioned);
    }

    #[test]
    fn frame_metric_brute_force_example() {
        // F takes the value (1, 1, 0) at w
        let f = FieldDef::constant(&Vector::new3(1.0, 1.0, 0.0));
        let m = metric_at(&f, &a31_zero(), &Vector::new3(0.3, 0.4, 0.5)).unwrap();
        let want = [2.0, -1.0, 0.0, 1.0, 0.0, 1.0];
        for (got, want) in m.entries.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{:?}", m.entries);
        }
        // (f₁² + f₂² + f₃²)/f₁⁴ at f = (1, 1, 0)
        assert!((m.matrix[(0, 0)] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn split_algebra_metric_is_diagonal() {
        let a = AlgebraSpec::standard(Family::A3_123, &[]).unwrap();
        let f = FieldDef::parse("f1 = x1 + 3; f2 = x2^2 + 0.5; f3 = exp(x3)", 3).unwrap();
        let w = Vector::new3(0.2, -1.1, 0.4);
        let fw = f.eval(&w).unwrap();
        let m = metric_at(&f, &a, &w).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 / (fw[i] * fw[i]) } else { 0.0 };
                assert!((m.matrix[(i, j)] - want).abs() < 1e-12);
            }
        }
        // ‖e‖² = 3: the frame metric equals the unnormalised pullback
        assert!(m.unnormalized_discrepancy < 1e-12);
        assert!((m.discrepancy - (2.0 / 3.0) * m.matrix.max_abs()).abs() < 1e-9);
    }

    #[test]
    fn planar_metric() {
        let a = AlgebraSpec::standard(Family::A2_r, &[-1.0, 0.0]).unwrap();
        let f = FieldDef::parse("f1 = x1^2 - x2^2; f2 = 2*x1*x2", 2).unwrap();
        let m = metric_at(&f, &a, &Vector::new2(1.0, 0.5)).unwrap();
        assert_eq!(m.entries.len(), 3);
        assert!(m.frame_residual < 1e-12 && m.discrepancy < 1e-12);
    }

    #[test]
    fn singular_point_is_an_error() {
        assert!(matches!(
            metric_at(&FieldDef::identity(3), &a31_zero(), &Vector::new3(0.0, 1.0, 1.0)),
            Err(Error::SingularElement { .. })
        ));
    }

    fn square_h(base: Vector) -> (AlgebraSpec, FieldDef, Vector) {
        let a = a31_zero();
        let f = FieldDef::power(&a, 2);
        let hb = Vector::new3(-1.0 / base[0], base[1] / (base[0] * base[0]), base[2] / (base[0] * base[0]));
        (a, f, hb)
    }

    #[test]
    fn distance_example() {
        let base = Vector::new3(1.0, 0.0, 0.0);
        let (a, f, hb) = square_h(base);
        let h = Antiderivative::new(&f, &a, base, hb).unwrap();
        let d = distance(&h, &base, &Vector::new3(2.0, 0.0, 0.0)).unwrap();
        assert!((d - 0.5).abs() < 1e-10);
        assert_eq!(distance(&h, &base, &base).unwrap(), 0.0);
    }

    #[test]
    fn geodesic_lies_on_parabola_and_has_unit_speed() {
        let (a0, b0, c0) = (1.0, 0.5, -0.25);
        let base = Vector::new3(a0, b0, c0);
        let (a, f, hb) = square_h(base);
        let h = Antiderivative::new(&f, &a, base, hb).unwrap();
        // the trajectory of F through w₀ is the geodesic in direction e
        let v = a.unit();
        assert_eq!(geodesic(&h, &base, &v, 0.0).unwrap(), base);
        for t in [0.1, 0.3, -0.2] {
            let p = geodesic(&h, &base, &v, t).unwrap();
            assert!((p[1] - b0 / (a0 * a0) * p[0] * p[0]).abs() < 1e-9);
            assert!((p[2] - c0 / (a0 * a0) * p[0] * p[0]).abs() < 1e-9);
            assert!((distance(&h, &base, &p).unwrap() - t.abs()).abs() < 1e-9);
        }
        let s = geodesic_speed(&h, &base, &Vector::new3(0.3, -1.0, 2.0), 0.2).unwrap();
        assert!((s - 1.0).abs() < 1e-6, "{s}");
    }

    #[test]
    fn commuting_family() {
        let a = a31_zero();
        let f = FieldDef::power(&a, 2);
        let w = Vector::new3(1.0, 1.0, 1.0);
        let e1 = family_field(&f, &a, 0.0, core::f64::consts::FRAC_PI_2).unwrap();
        let e2 = family_field(&f, &a, core::f64::consts::FRAC_PI_2, core::f64::consts::FRAC_PI_2).unwrap();
        let e3 = family_field(&f, &a, 0.0, 0.0).unwrap();
        let frame = crate::calculus::frame_fields(&f, &a);
        for (k, e) in [e1, e2, e3].iter().zip(&frame) {
            assert!((k.eval(&w).unwrap() - e.eval(&w).unwrap()).max_abs() < 1e-15);
        }
        assert!(lie_bracket(&e1, &e2, &w).unwrap().max_abs() < 1e-4);
        assert!(lie_bracket(&f, &f, &w).unwrap().max_abs() == 0.0);
        let h = Antiderivative::new(&f, &a, w, Vector::zeros(3)).unwrap();
        let u = unit_direction(0.7, 1.1);
        let k = family_field(&f, &a, 0.7, 1.1).unwrap();
        assert!((push_forward(&h, &k, &Vector::new3(1.2, -0.3, 0.4)).unwrap() - u).max_abs() < 1e-12);
    }

    #[test]
    fn non_commuting_bracket_is_detected() {
        let x = FieldDef::parse("f1 = 1; f2 = 0; f3 = 0", 3).unwrap();
        let y = FieldDef::parse("f1 = 0; f2 = x1; f3 = 0", 3).unwrap();
        let b = lie_bracket(&x, &y, &Vector::new3(0.0, 0.0, 0.0)).unwrap();
        assert!((b - Vector::new3(0.0, 1.0, 0.0)).max_abs() < 1e-9);
    }

    #[test]
    fn pullback_metric_is_flat() {
        let a = a31_zero();
        let f = FieldDef::power(&a, 2);
        let k = curvature_proxy(&f, &a, &Vector::new3(1.2, 0.3, -0.4), 1e-3).unwrap();
        assert!(k < 1e-2, "{k}");
    }
}
