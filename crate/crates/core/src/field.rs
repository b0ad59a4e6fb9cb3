//! Vector fields: parsed component expressions, algebra polynomials, and the
//! [`VectorField`] abstraction shared by the analysis modules.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow this when std is linked
use num_traits::Float;

use crate::algebra::{AlgebraSpec, Element};
use crate::error::{Error, Result};
use crate::expr::{self, Binding, Expr};
use crate::linalg::{Matrix, Vector};

/// A map `ℝⁿ → ℝⁿ` that may be undefined at some points.
pub trait VectorField {
    fn dim(&self) -> usize;

    fn eval(&self, w: &Vector) -> Result<Vector>;

    /// Jacobian `[J]_{ij} = ∂fᵢ/∂xⱼ`; central differences unless overridden.
    fn jacobian(&self, w: &Vector) -> Result<JacobianMatrix> {
        fd_jacobian(self, w)
    }
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, w: &Vector) -> Result<Vector> {
        (**self).eval(w)
    }
    fn jacobian(&self, w: &Vector) -> Result<JacobianMatrix> {
        (**self).jacobian(w)
    }
}

/// Jacobian at a point together with the finite-difference steps used
/// (all zero for exact Jacobians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianMatrix {
    pub matrix: Matrix,
    pub steps: Vector,
}

impl JacobianMatrix {
    pub fn exact(matrix: Matrix) -> Self {
        JacobianMatrix {
            matrix,
            steps: Vector::zeros(matrix.dim()),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.steps.iter().all(|&h| h == 0.0)
    }
}

/// Central-difference step for coordinate value `x`.
pub fn fd_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * x.abs().max(1.0)
}

/// Central-difference Jacobian with `h = ∛ε · max(1, |wⱼ|)`.
pub fn fd_jacobian<F: VectorField + ?Sized>(field: &F, w: &Vector) -> Result<JacobianMatrix> {
    let n = field.dim();
    w.check_len(n)?;
    let mut m = Matrix::zeros(n);
    let mut steps = Vector::zeros(n);
    for j in 0..n {
        let h = fd_step(w[j]);
        let mut plus = *w;
        let mut minus = *w;
        plus[j] += h;
        minus[j] -= h;
        // the realised step, after rounding of w ± h
        let span = plus[j] - minus[j];
        let d = field.eval(&plus)? - field.eval(&minus)?;
        for i in 0..n {
            m[(i, j)] = d[i] / span;
        }
        steps[j] = h;
    }
    Ok(JacobianMatrix { matrix: m, steps })
}

/// Central-difference gradient of a scalar function with step
/// `h = step_scale · max(1, |wⱼ|)`.
pub fn fd_gradient(
    f: impl Fn(&Vector) -> Result<f64>,
    w: &Vector,
    step_scale: f64,
) -> Result<Vector> {
    let mut g = Vector::zeros(w.len());
    for j in 0..w.len() {
        let h = step_scale * w[j].abs().max(1.0);
        let mut plus = *w;
        let mut minus = *w;
        plus[j] += h;
        minus[j] -= h;
        g[j] = (f(&plus)? - f(&minus)?) / (plus[j] - minus[j]);
    }
    Ok(g)
}

/// `F(w) = Σₖ aₖ w^{lowest+k}` in an algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraPolynomial {
    pub algebra: AlgebraSpec,
    pub lowest: i32,
    pub coeffs: Vec<Element>,
}

impl AlgebraPolynomial {
    pub fn eval(&self, w: &Vector) -> Result<Vector> {
        let a = &self.algebra;
        a.check(w)?;
        // Horner on the non-negative part, then multiply by w^lowest
        let mut acc = a.zero();
        for c in self.coeffs.iter().rev() {
            acc = a.mul(&acc, w) + *c;
        }
        if self.lowest != 0 {
            let shift = a.pow(w, self.lowest).map_err(|_| Error::Domain {
                expr: format!("w^{}", self.lowest),
            })?;
            acc = a.mul(&acc, &shift);
        }
        Ok(acc)
    }

    /// `F′(w) = Σ (lowest+k) aₖ w^{lowest+k−1}`
    pub fn derivative(&self, w: &Vector) -> Result<Element> {
        let a = &self.algebra;
        a.check(w)?;
        let mut out = a.zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            let p = self.lowest + k as i32;
            if p == 0 {
                continue;
            }
            let wp = a.pow(w, p - 1).map_err(|_| Error::Domain {
                expr: format!("w^{}", p - 1),
            })?;
            out += a.mul(c, &wp).scale(p as f64);
        }
        Ok(out)
    }

    /// Expands the polynomial into coordinate expressions, term by term.
    /// Only defined for non-negative powers.
    pub fn expand(&self) -> Result<Vec<Expr>> {
        use alloc::boxed::Box;
        if self.lowest < 0 {
            return Err(Error::InvalidArgument(
                "negative powers cannot be expanded into polynomials".into(),
            ));
        }
        let a = &self.algebra;
        let n = a.dim();
        // coordinates of w^p as expressions, built by repeated multiplication
        let unit: Vec<Expr> = (0..n).map(|k| Expr::Const(a.unit()[k])).collect();
        let w: Vec<Expr> = (0..n).map(Expr::Var).collect();
        let times_w = |lhs: &[Expr]| -> Vec<Expr> {
            (0..n)
                .map(|k| {
                    let mut terms = Vec::new();
                    for i in 0..n {
                        for j in 0..n {
                            let c = a.constant(i, j, k);
                            if c != 0.0 {
                                terms.push(Expr::Mul(
                                    Box::new(Expr::Mul(Box::new(Expr::Const(c)), Box::new(lhs[i].clone()))),
                                    Box::new(w[j].clone()),
                                ));
                            }
                        }
                    }
                    sum(terms)
                })
                .collect()
        };
        let mut power = unit;
        for _ in 0..self.lowest {
            power = times_w(&power);
        }
        let mut out: Vec<Vec<Expr>> = (0..n).map(|_| Vec::new()).collect();
        for (idx, c) in self.coeffs.iter().enumerate() {
            if idx > 0 {
                power = times_w(&power);
            }
            // c · power
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let s = c[i] * a.constant(i, j, k);
                        if s != 0.0 {
                            out[k].push(Expr::Mul(Box::new(Expr::Const(s)), Box::new(power[j].clone())));
                        }
                    }
                }
            }
        }
        Ok(out.into_iter().map(sum).collect())
    }
}

fn sum(terms: Vec<Expr>) -> Expr {
    use alloc::boxed::Box;
    terms
        .into_iter()
        .reduce(|acc, t| Expr::Add(Box::new(acc), Box::new(t)))
        .unwrap_or(Expr::Const(0.0))
}

/// A vector field `F = (f₁, …, fₙ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldDef {
    Components(Vec<Expr>),
    Polynomial(AlgebraPolynomial),
}

impl FieldDef {
    /// Parses component bindings `f1 = …` for a `dim`-dimensional field.
    pub fn parse(src: &str, dim: usize) -> Result<FieldDef> {
        FieldDef::from_bindings(expr::parse_program(src, dim)?, dim, None)
    }

    /// Parses either component bindings or a `poly = […]` binding, the
    /// latter interpreted in `algebra`.
    pub fn parse_in(src: &str, algebra: &AlgebraSpec) -> Result<FieldDef> {
        let dim = algebra.dim();
        FieldDef::from_bindings(expr::parse_program(src, dim)?, dim, Some(algebra))
    }

    fn from_bindings(bindings: Vec<Binding>, dim: usize, algebra: Option<&AlgebraSpec>) -> Result<FieldDef> {
        let mut comps: Vec<Option<Expr>> = alloc::vec![None; dim];
        let mut poly = None;
        for b in bindings {
            match b {
                Binding::Component { index, expr } => {
                    if comps[index].replace(expr).is_some() {
                        return Err(Error::Arity(format!("f{} defined twice", index + 1)));
                    }
                }
                Binding::Poly { lowest, coeffs } => {
                    if poly.is_some() {
                        return Err(Error::Arity("poly defined twice".into()));
                    }
                    poly = Some((lowest, coeffs));
                }
            }
        }
        match poly {
            Some((lowest, coeffs)) => {
                if comps.iter().any(Option::is_some) {
                    return Err(Error::Arity("poly cannot be mixed with component bindings".into()));
                }
                let algebra = algebra.ok_or_else(|| {
                    Error::InvalidArgument("a `poly` field needs an algebra".into())
                })?;
                let coeffs = coeffs
                    .iter()
                    .map(|c| {
                        if c.len() == dim {
                            Ok(Vector::from_slice(c))
                        } else {
                            Err(Error::Arity(format!(
                                "coefficient ({}) has {} coordinates, expected {dim}",
                                c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "),
                                c.len()
                            )))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(FieldDef::Polynomial(AlgebraPolynomial {
                    algebra: algebra.clone(),
                    lowest,
                    coeffs,
                }))
            }
            None => {
                let found = comps.iter().filter(|c| c.is_some()).count();
                if found != dim {
                    let missing: Vec<_> = (0..dim)
                        .filter(|&i| comps[i].is_none())
                        .map(|i| format!("f{}", i + 1))
                        .collect();
                    return Err(Error::Arity(format!(
                        "expected {dim} components, found {found} (missing {})",
                        missing.join(", ")
                    )));
                }
                Ok(FieldDef::Components(comps.into_iter().map(Option::unwrap).collect()))
            }
        }
    }

    pub fn polynomial(algebra: &AlgebraSpec, lowest: i32, coeffs: Vec<Element>) -> Result<FieldDef> {
        for c in &coeffs {
            algebra.check(c)?;
        }
        Ok(FieldDef::Polynomial(AlgebraPolynomial {
            algebra: algebra.clone(),
            lowest,
            coeffs,
        }))
    }

    /// `F(w) = wⁿ` in `algebra`.
    pub fn power(algebra: &AlgebraSpec, n: i32) -> FieldDef {
        FieldDef::Polynomial(AlgebraPolynomial {
            algebra: algebra.clone(),
            lowest: n,
            coeffs: alloc::vec![algebra.unit()],
        })
    }

    /// `F(w) = w`
    pub fn identity(dim: usize) -> FieldDef {
        FieldDef::Components((0..dim).map(Expr::Var).collect())
    }

    pub fn constant(value: &Vector) -> FieldDef {
        FieldDef::Components(value.iter().map(|&c| Expr::Const(c)).collect())
    }

    /// Coordinate-expression form; polynomials with non-negative powers are
    /// expanded.
    pub fn to_components(&self) -> Result<FieldDef> {
        match self {
            FieldDef::Components(_) => Ok(self.clone()),
            FieldDef::Polynomial(p) => Ok(FieldDef::Components(p.expand()?)),
        }
    }

    /// Source text that parses back to this field.
    pub fn to_source(&self) -> alloc::string::String {
        match self {
            FieldDef::Components(cs) => cs
                .iter()
                .enumerate()
                .map(|(i, e)| format!("f{} = {e}", i + 1))
                .collect::<Vec<_>>()
                .join("\n"),
            FieldDef::Polynomial(p) => {
                let body = p
                    .coeffs
                    .iter()
                    .map(|c| c.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", "))
                    .collect::<Vec<_>>()
                    .join("; ");
                if p.lowest == 0 {
                    format!("poly = [{body}]")
                } else {
                    format!("poly({}) = [{body}]", p.lowest)
                }
            }
        }
    }
}

impl VectorField for FieldDef {
    fn dim(&self) -> usize {
        match self {
            FieldDef::Components(cs) => cs.len(),
            FieldDef::Polynomial(p) => p.algebra.dim(),
        }
    }

    fn eval(&self, w: &Vector) -> Result<Vector> {
        match self {
            FieldDef::Components(cs) => {
                w.check_len(cs.len())?;
                let mut out = Vector::zeros(cs.len());
                for (i, e) in cs.iter().enumerate() {
                    out[i] = e.eval(w.as_slice())?;
                }
                Ok(out)
            }
            FieldDef::Polynomial(p) => p.eval(w),
        }
    }

    /// Exact `R(F′(w))` for algebra polynomials, central differences
    /// otherwise.
    fn jacobian(&self, w: &Vector) -> Result<JacobianMatrix> {
        match self {
            FieldDef::Polynomial(p) => Ok(JacobianMatrix::exact(p.algebra.rep(&p.derivative(w)?))),
            FieldDef::Components(_) => fd_jacobian(self, w),
        }
    }
}

/// Forces finite-difference Jacobians on a field that has an exact one.
#[derive(Debug, Clone, Copy)]
pub struct FiniteDifference<F>(pub F);

impl<F: VectorField> VectorField for FiniteDifference<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, w: &Vector) -> Result<Vector> {
        self.0.eval(w)
    }
    fn jacobian(&self, w: &Vector) -> Result<JacobianMatrix> {
        fd_jacobian(&self.0, w)
    }
}

/// `w ↦ u·F(w)` for a fixed algebra element `u`.
#[derive(Debug, Clone, Copy)]
pub struct ProductField<'a, F> {
    pub factor: Element,
    pub field: F,
    pub algebra: &'a AlgebraSpec,
}

impl<F: VectorField> VectorField for ProductField<'_, F> {
    fn dim(&self) -> usize {
        self.algebra.dim()
    }
    fn eval(&self, w: &Vector) -> Result<Vector> {
        let f = self.field.eval(w)?;
        self.algebra.check(&f)?;
        Ok(self.algebra.mul(&self.factor, &f))
    }
}

/// `w ↦ e/F(w)`
#[derive(Debug, Clone, Copy)]
pub struct Reciprocal<'a, F> {
    pub field: F,
    pub algebra: &'a AlgebraSpec,
}

impl<F: VectorField> VectorField for Reciprocal<'_, F> {
    fn dim(&self) -> usize {
        self.algebra.dim()
    }
    fn eval(&self, w: &Vector) -> Result<Vector> {
        let f = self.field.eval(w)?;
        self.algebra.check(&f)?;
        self.algebra.inv(&f)
    }
}

/// `w ↦ −F(w)`, for integrating flows backwards in time.
#[derive(Debug, Clone, Copy)]
pub struct Reversed<F>(pub F);

impl<F: VectorField> VectorField for Reversed<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, w: &Vector) -> Result<Vector> {
        Ok(-self.0.eval(w)?)
    }
}

/// A field given by a closure.
pub struct FnField<G> {
    dim: usize,
    f: G,
}

impl<G: Fn(&Vector) -> Result<Vector>> FnField<G> {
    pub fn new(dim: usize, f: G) -> Self {
        FnField { dim, f }
    }
}

impl<G: Fn(&Vector) -> Result<Vector>> VectorField for FnField<G> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, w: &Vector) -> Result<Vector> {
        (self.f)(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Family;

    fn a31_zero() -> AlgebraSpec {
        AlgebraSpec::standard(Family::A3_r, &[0.0; 6]).unwrap()
    }

    #[test]
    fn parse_examples() {
        let sq = FieldDef::parse("f1 = x1^2; f2 = 2*x1*x2; f3 = 2*x1*x3", 3).unwrap();
        assert_eq!(sq.dim(), 3);
        let w = Vector::new3(1.0, 2.0, 3.0);
        assert_eq!(sq.eval(&w).unwrap(), Vector::new3(1.0, 4.0, 6.0));
        let id = FieldDef::parse("f1 = x1; f2 = x2; f3 = x3", 3).unwrap();
        assert_eq!(id, FieldDef::identity(3));
        let z2 = FieldDef::parse("f1 = x1^2 - x2^2; f2 = 2*x1*x2", 2).unwrap();
        assert_eq!(z2.eval(&Vector::new2(1.0, 1.0)).unwrap(), Vector::new2(0.0, 2.0));
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(FieldDef::parse("f1 = x1; f2 = x2", 3), Err(Error::Arity(_))));
        assert!(matches!(FieldDef::parse("f1 = x1; f1 = 2*x1", 1), Err(Error::Arity(_))));
        let a = a31_zero();
        assert!(matches!(FieldDef::parse_in("poly = [1, 0]", &a), Err(Error::Arity(_))));
        assert!(matches!(FieldDef::parse_in("poly = [1,0,0]\nf1 = x1", &a), Err(Error::Arity(_))));
        assert!(matches!(FieldDef::parse("poly = [1, 0, 0]", 3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn eval_examples() {
        let id = FieldDef::identity(3);
        let w = Vector::new3(2.0, 1.0, 1.0);
        assert_eq!(id.eval(&w).unwrap(), w);
        let a = a31_zero();
        let sq = FieldDef::parse_in("poly = [0,0,0; 0,0,0; 1,0,0]", &a).unwrap();
        assert_eq!(sq.eval(&Vector::new3(1.0, 2.0, 3.0)).unwrap(), Vector::new3(1.0, 4.0, 6.0));
        let recip = FieldDef::parse("f1 = 1/x1", 1).unwrap();
        assert!(matches!(recip.eval(&Vector::from_slice(&[0.0])), Err(Error::Domain { .. })));
    }

    #[test]
    fn jacobian_examples() {
        let id = FieldDef::identity(3);
        let j = id.jacobian(&Vector::new3(0.3, -7.0, 2.0)).unwrap();
        assert!(j.matrix.axpy(-1.0, &Matrix::identity(3)).max_abs() < 1e-10);
        assert!(!j.is_exact());

        let sq = FieldDef::parse("f1 = x1^2; f2 = 2*x1*x2; f3 = 2*x1*x3", 3).unwrap();
        let j = sq.jacobian(&Vector::new3(1.0, 0.0, 0.0)).unwrap();
        assert!(j.matrix.axpy(-2.0, &Matrix::identity(3)).max_abs() < 1e-9);

        let z2 = FieldDef::parse("f1 = x1^2 - x2^2; f2 = 2*x1*x2", 2).unwrap();
        let j = z2.jacobian(&Vector::new2(1.0, 1.0)).unwrap();
        let expect = Matrix::from_rows(&[&[2.0, -2.0], &[2.0, 2.0]]);
        assert!(j.matrix.axpy(-1.0, &expect).max_abs() < 1e-9);

        let poly = FieldDef::power(&a31_zero(), 2);
        let j = poly.jacobian(&Vector::new3(1.0, 0.0, 0.0)).unwrap();
        assert!(j.is_exact());
        assert_eq!(j.matrix, Matrix::identity(3).scale(2.0));
    }

    #[test]
    fn stencil_outside_domain_is_reported() {
        let f = FieldDef::parse("f1 = sqrt(x1)", 1).unwrap();
        assert!(matches!(f.jacobian(&Vector::from_slice(&[0.0])), Err(Error::Domain { .. })));
    }

    #[test]
    fn laurent_power_and_derivative() {
        let a = a31_zero();
        let f = FieldDef::power(&a, -1);
        let w = Vector::new3(2.0, 0.0, 0.0);
        assert_eq!(f.eval(&w).unwrap(), Vector::new3(0.5, 0.0, 0.0));
        if let FieldDef::Polynomial(p) = &f {
            // d/dw w^{-1} = -w^{-2}
            assert_eq!(p.derivative(&w).unwrap(), Vector::new3(-0.25, 0.0, 0.0));
        }
        assert!(matches!(f.eval(&Vector::new3(0.0, 1.0, 1.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn source_round_trip() {
        let a = a31_zero();
        let f = FieldDef::parse_in("poly(-2) = [1, 0.5, 0; 0, 0, -3]", &a).unwrap();
        assert_eq!(FieldDef::parse_in(&f.to_source(), &a).unwrap(), f);
        let g = FieldDef::parse("f1 = x1*x2 - 1; f2 = -x2^3; f3 = sin(x3)/2", 3).unwrap();
        assert_eq!(FieldDef::parse(&g.to_source(), 3).unwrap(), g);
    }
}
