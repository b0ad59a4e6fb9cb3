//! Algebrizability: generalized Cauchy–Riemann residuals, membership of the
//! Jacobian in `R(𝔸)`, the 𝔸-derivative, and inference of the algebra from
//! sampled Jacobians.
//!
//! All residuals are computed from a Jacobian matrix; the `*_from_jacobian`
//! variants take the matrix directly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::algebra::{family_table, family_unit, AlgebraSpec, Constants, Element, Family, Roles};
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::linalg::{least_squares, Matrix, Vector};

/// Default tolerance for finite-difference Jacobians.
pub const FD_TOL: f64 = 1e-5;
/// Default tolerance for exact Jacobians.
pub const EXACT_TOL: f64 = 1e-9;

/// Relative cut-off for singular values in the least-squares solves.
const RCOND: f64 = 1e-10;

/// One generic equation `Σᵢ c_ijk ∂fᵢ/∂x_m − Σᵢ c_imk ∂fᵢ/∂x_j` (zero-based
/// indices, `j < m`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericResidual {
    pub j: usize,
    pub m: usize,
    pub k: usize,
    pub residual: f64,
}

/// One equation of a family's published GCRE system, `lhs − rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledResidual {
    /// Name of the family whose system the equation belongs to.
    pub label: &'static str,
    pub equation: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcreResiduals {
    pub generic: Vec<GenericResidual>,
    pub labeled: Vec<LabeledResidual>,
}

impl GcreResiduals {
    pub fn max_generic(&self) -> f64 {
        self.generic.iter().map(|r| r.residual.abs()).fold(0.0, f64::max)
    }

    pub fn max_labeled(&self) -> f64 {
        self.labeled.iter().map(|r| r.residual.abs()).fold(0.0, f64::max)
    }
}

pub(crate) fn rep_from_table(c: &Constants, n: usize, a: &Vector) -> Matrix {
    let mut m = Matrix::zeros(n);
    for j in 0..n {
        for k in 0..n {
            m[(j, k)] = (0..n).map(|i| a[i] * c[i][k][j]).sum();
        }
    }
    m
}

/// Generic residuals of every equation, from the structure constants.
pub fn generic_gcre(jac: &Matrix, algebra: &AlgebraSpec) -> Result<Vec<GenericResidual>> {
    let n = algebra.dim();
    if jac.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            found: jac.dim(),
        });
    }
    let mut out = Vec::with_capacity(n * n * (n - 1) / 2);
    for j in 0..n {
        for m in j + 1..n {
            for k in 0..n {
                let mut v = 0.0;
                for i in 0..n {
                    v += algebra.constant(i, j, k) * jac[(i, m)] - algebra.constant(i, m, k) * jac[(i, j)];
                }
                out.push(GenericResidual { j, m, k, residual: v });
            }
        }
    }
    Ok(out)
}

struct Labeler<'a> {
    label: &'static str,
    jac: &'a Matrix,
    out: Vec<LabeledResidual>,
}

impl Labeler<'_> {
    fn d(&self, i: usize, j: usize) -> f64 {
        self.jac[(i, j)]
    }

    /// `∂f_i/∂x_j = Σ coeff · ∂f_a/∂x_b`
    fn eq(&mut self, i: usize, j: usize, rhs: &[(&str, f64, usize, usize)]) {
        let mut text = format!("df{}/dx{} =", i + 1, j + 1);
        let mut value = self.d(i, j);
        if rhs.is_empty() {
            text.push_str(" 0");
        }
        for (n, (name, coeff, a, b)) in rhs.iter().enumerate() {
            if n > 0 {
                text.push_str(" +");
            }
            if name.is_empty() {
                text.push_str(&format!(" df{}/dx{}", a + 1, b + 1));
            } else {
                text.push_str(&format!(" {name}*df{}/dx{}", a + 1, b + 1));
            }
            value -= coeff * self.d(*a, *b);
        }
        self.out.push(LabeledResidual {
            label: self.label,
            equation: text,
            residual: value,
        });
    }
}

/// The family's published GCRE system, one entry per equation.
pub fn family_gcre(jac: &Matrix, algebra: &AlgebraSpec) -> Result<Vec<LabeledResidual>> {
    let n = algebra.dim();
    if jac.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            found: jac.dim(),
        });
    }
    let Roles { r, s, t } = algebra.roles();
    let p = |i: usize| -> f64 {
        if i <= algebra.params().len() {
            algebra.params()[i - 1]
        } else {
            algebra.derived_params()[i - 1 - algebra.params().len()]
        }
    };
    let family = algebra.family();
    let label = match family {
        Family::A2_r => "A2_r",
        Family::A2_12 => "A2_12",
        Family::A3_r => "A3_r",
        Family::A3_rs => "A3_rs",
        Family::A3_123 => "A3_123",
    };
    let mut l = Labeler {
        label,
        jac,
        out: Vec::new(),
    };
    match family {
        Family::A2_r => {
            l.eq(r, s, &[("p1", p(1), s, r)]);
            l.eq(s, s, &[("", 1.0, r, r), ("p2", p(2), s, r)]);
        }
        Family::A2_12 => {
            l.eq(0, 1, &[]);
            l.eq(1, 0, &[]);
        }
        Family::A3_r => {
            l.eq(r, s, &[("p7", p(7), s, r), ("p8", p(8), t, r)]);
            l.eq(r, t, &[("p8", p(8), s, r), ("p9", p(9), t, r)]);
            l.eq(s, s, &[("", 1.0, r, r), ("p1", p(1), s, r), ("p3", p(3), t, r)]);
            l.eq(s, t, &[("p3", p(3), s, r), ("p5", p(5), t, r)]);
            l.eq(t, s, &[("p2", p(2), s, r), ("p4", p(4), t, r)]);
            l.eq(t, t, &[("", 1.0, r, r), ("p4", p(4), s, r), ("p6", p(6), t, r)]);
        }
        Family::A3_rs => {
            l.eq(r, s, &[]);
            l.eq(r, t, &[]);
            l.eq(s, r, &[]);
            l.eq(t, r, &[]);
            l.eq(s, t, &[("p1", p(1), t, s)]);
            l.eq(t, t, &[("", 1.0, s, s), ("p2", p(2), t, s)]);
        }
        Family::A3_123 => {
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        l.eq(i, j, &[]);
                    }
                }
            }
        }
    }
    Ok(l.out)
}

/// Generic and labeled residuals for a Jacobian matrix.
pub fn gcre_from_jacobian(jac: &Matrix, algebra: &AlgebraSpec) -> Result<GcreResiduals> {
    Ok(GcreResiduals {
        generic: generic_gcre(jac, algebra)?,
        labeled: family_gcre(jac, algebra)?,
    })
}

/// GCRE residuals of `field` at `w`.
pub fn gcre_residuals<F: VectorField + ?Sized>(field: &F, algebra: &AlgebraSpec, w: &Vector) -> Result<GcreResiduals> {
    check_dims(field, algebra)?;
    let jac = field.jacobian(w)?;
    gcre_from_jacobian(&jac.matrix, algebra)
}

fn check_dims<F: VectorField + ?Sized>(field: &F, algebra: &AlgebraSpec) -> Result<()> {
    if field.dim() != algebra.dim() {
        return Err(Error::Dimension {
            expected: algebra.dim(),
            found: field.dim(),
        });
    }
    Ok(())
}

/// Least-squares projection of a Jacobian onto `span{R(eᵢ)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    /// Coordinates of the closest `R(a)`.
    pub element: Element,
    /// `‖R(a) − J‖_F / (‖J‖_F + 1)`
    pub residual: f64,
}

pub fn membership(jac: &Matrix, algebra: &AlgebraSpec) -> Result<Membership> {
    let n = algebra.dim();
    if jac.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            found: jac.dim(),
        });
    }
    let basis: Vec<Matrix> = (0..n).map(|i| algebra.basis_representation(i)).collect();
    let mut a = Vec::with_capacity(n * n * n);
    let mut b = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            for m in &basis {
                a.push(m[(row, col)]);
            }
            b.push(jac[(row, col)]);
        }
    }
    let ls = least_squares(&a, n * n, n, &b, RCOND);
    Ok(Membership {
        element: Vector::from_slice(&ls.solution),
        residual: ls.residual / (jac.frobenius() + 1.0),
    })
}

/// Per-sample outcome of [`check_algebrizable`].
#[derive(Debug, Clone, PartialEq)]
pub enum SampleCheck {
    Evaluated {
        point: Vector,
        /// Normalised distance of `JF(w)` to `R(𝔸)`.
        membership: f64,
        gcre: GcreResiduals,
        /// `max |generic residual| / (‖JF‖_F + 1)`
        gcre_scaled: f64,
        exact_jacobian: bool,
    },
    /// The field or its stencil was undefined at the sample.
    Skipped { point: Vector, error: Error },
}

impl SampleCheck {
    pub fn passes(&self, tol: f64) -> bool {
        match self {
            SampleCheck::Evaluated {
                membership,
                gcre_scaled,
                ..
            } => *membership <= tol && *gcre_scaled <= tol,
            SampleCheck::Skipped { .. } => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcreReport {
    pub samples: Vec<SampleCheck>,
    pub tolerance: f64,
    /// True iff at least one sample was evaluated and every evaluated sample
    /// passed both tests.
    pub verdict: bool,
    pub max_membership: f64,
    pub max_gcre: f64,
    pub skipped: usize,
}

/// Tolerance matched to how `field` differentiates: tighter when its
/// Jacobian is exact.
pub fn default_tolerance<F: VectorField + ?Sized>(field: &F, at: &Vector) -> f64 {
    match field.jacobian(at) {
        Ok(j) if j.is_exact() => EXACT_TOL,
        _ => FD_TOL,
    }
}

pub fn check_algebrizable<F: VectorField + ?Sized>(
    field: &F,
    algebra: &AlgebraSpec,
    samples: &[Vector],
    tol: f64,
) -> Result<GcreReport> {
    check_dims(field, algebra)?;
    if samples.is_empty() {
        return Err(Error::InvalidArgument("at least one sample point is required".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut out = Vec::with_capacity(samples.len());
    let (mut max_membership, mut max_gcre, mut skipped) = (0.0f64, 0.0f64, 0usize);
    for w in samples {
        w.check_len(algebra.dim())?;
        match field.jacobian(w) {
            Ok(jac) => {
                let m = membership(&jac.matrix, algebra)?;
                let gcre = gcre_from_jacobian(&jac.matrix, algebra)?;
                let scaled = gcre.max_generic() / (jac.matrix.frobenius() + 1.0);
                max_membership = max_membership.max(m.residual);
                max_gcre = max_gcre.max(scaled);
                out.push(SampleCheck::Evaluated {
                    point: *w,
                    membership: m.residual,
                    gcre,
                    gcre_scaled: scaled,
                    exact_jacobian: jac.is_exact(),
                });
            }
            Err(e @ Error::Domain { .. }) => {
                skipped += 1;
                out.push(SampleCheck::Skipped { point: *w, error: e });
            }
            Err(e) => return Err(e),
        }
    }
    let evaluated = samples.len() - skipped;
    let verdict = evaluated > 0 && out.iter().all(|s| matches!(s, SampleCheck::Skipped { .. }) || s.passes(tol));
    Ok(GcreReport {
        samples: out,
        tolerance: tol,
        verdict,
        max_membership,
        max_gcre,
        skipped,
    })
}

/// `F′(w)`: the element whose representation is closest to `JF(w)`.
pub fn a_derivative<F: VectorField + ?Sized>(field: &F, algebra: &AlgebraSpec, w: &Vector, tol: f64) -> Result<Element> {
    check_dims(field, algebra)?;
    let jac = field.jacobian(w)?;
    let m = membership(&jac.matrix, algebra)?;
    if m.residual > tol {
        return Err(Error::NotAlgebrizable { residual: m.residual });
    }
    Ok(m.element)
}

/// One candidate algebra fitted to sampled Jacobians.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    pub family: Family,
    pub roles: Roles,
    /// Free parameters (`p₁..p₆` for `A3_r`).
    pub params: Vec<f64>,
    /// Fitted `p₇..p₉` (`A3_r` only).
    pub fitted_derived: Option<[f64; 3]>,
    /// `p₇..p₉` recomputed from the fitted `p₁..p₆` (`A3_r` only).
    pub derived: Option<[f64; 3]>,
    /// Max over samples of `‖R(u; p) − J‖_F / (‖J‖_F + 1)` for the free fit.
    pub fit_residual: f64,
    /// Max deviation of fitted from recomputed `p₇..p₉`.
    pub commutativity_residual: Option<f64>,
    /// Max membership residual with the constructed algebra.
    pub residual: f64,
    pub verdict: bool,
    /// The least-squares system had rank below the parameter count.
    pub degenerate: bool,
    pub rank: usize,
    pub samples: usize,
}

impl InferenceResult {
    pub fn algebra(&self) -> Result<AlgebraSpec> {
        AlgebraSpec::new(self.family, self.roles, &self.params)
    }
}

/// Number of parameters fitted independently.
fn fitted_count(family: Family) -> usize {
    match family {
        Family::A3_r => 9,
        f => f.param_count(),
    }
}

fn fit_candidate(family: Family, roles: Roles, jacs: &[Matrix], tol: f64) -> Result<InferenceResult> {
    let n = family.dim();
    let q = fitted_count(family);
    let zeros = [0.0; 9];
    let base = family_table(family, roles, &zeros[..q]);
    // the table is affine in the parameters
    let dirs: Vec<Constants> = (0..q)
        .map(|idx| {
            let mut p = [0.0; 9];
            p[idx] = 1.0;
            let mut c = family_table(family, roles, &p[..q]);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        c[i][j][k] -= base[i][j][k];
                    }
                }
            }
            c
        })
        .collect();
    let unit = family_unit(family, roles);

    let rows = jacs.len() * n * n;
    let mut a = Vec::with_capacity(rows * q);
    let mut b = Vec::with_capacity(rows);
    for (jac, scale) in jacs.iter().map(|j| (j, 1.0 / (j.frobenius() + 1.0))) {
        let u = jac.mul_vec(&unit);
        let r0 = rep_from_table(&base, n, &u);
        let rq: Vec<Matrix> = dirs.iter().map(|c| rep_from_table(c, n, &u)).collect();
        for row in 0..n {
            for col in 0..n {
                for m in &rq {
                    a.push(m[(row, col)] * scale);
                }
                b.push((jac[(row, col)] - r0[(row, col)]) * scale);
            }
        }
    }
    let ls = least_squares(&a, rows, q, &b, RCOND);
    let theta = ls.solution;

    let fit_residual = jacs
        .iter()
        .map(|jac| {
            let u = jac.mul_vec(&unit);
            let mut m = rep_from_table(&base, n, &u);
            for (c, th) in dirs.iter().zip(&theta) {
                m = m.axpy(*th, &rep_from_table(c, n, &u));
            }
            m.axpy(-1.0, jac).frobenius() / (jac.frobenius() + 1.0)
        })
        .fold(0.0, f64::max);

    let free = family.param_count();
    let params = theta[..free].to_vec();
    let algebra = AlgebraSpec::new(family, roles, &params)?;
    let (fitted_derived, derived, commutativity_residual) = if family == Family::A3_r {
        let fitted = [theta[6], theta[7], theta[8]];
        let d = [
            algebra.derived_params()[0],
            algebra.derived_params()[1],
            algebra.derived_params()[2],
        ];
        let dev = (0..3).map(|i| (fitted[i] - d[i]).abs()).fold(0.0, f64::max);
        (Some(fitted), Some(d), Some(dev))
    } else {
        (None, None, None)
    };
    let mut residual = 0.0f64;
    for jac in jacs {
        residual = residual.max(membership(jac, &algebra)?.residual);
    }
    Ok(InferenceResult {
        family,
        roles,
        params,
        fitted_derived,
        derived,
        fit_residual,
        commutativity_residual,
        residual,
        verdict: residual <= tol,
        degenerate: ls.rank < q,
        rank: ls.rank,
        samples: jacs.len(),
    })
}

fn role_key(r: &Roles) -> [usize; 3] {
    [r.r, r.s, r.t]
}

/// Passing candidates first; among them the most constrained family, then
/// role order (residuals below tolerance are treated as ties). Failing
/// candidates follow by increasing residual.
fn order(a: &InferenceResult, b: &InferenceResult) -> Ordering {
    match (a.verdict, b.verdict) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => a
            .family
            .constraint_rank()
            .cmp(&b.family.constraint_rank())
            .then_with(|| role_key(&a.roles).cmp(&role_key(&b.roles)))
            .then_with(|| a.residual.total_cmp(&b.residual)),
        (false, false) => a
            .residual
            .total_cmp(&b.residual)
            .then_with(|| a.family.constraint_rank().cmp(&b.family.constraint_rank()))
            .then_with(|| role_key(&a.roles).cmp(&role_key(&b.roles))),
    }
}

/// Fits every family of the field's dimension under every role assignment
/// and returns all candidates, best first. Samples where the Jacobian is
/// undefined are skipped.
pub fn infer_candidates<F: VectorField + ?Sized>(field: &F, samples: &[Vector], tol: f64) -> Result<Vec<InferenceResult>> {
    let n = field.dim();
    if n != 2 && n != 3 {
        return Err(Error::Dimension { expected: 3, found: n });
    }
    let mut jacs = Vec::with_capacity(samples.len());
    for w in samples {
        w.check_len(n)?;
        match field.jacobian(w) {
            Ok(j) => jacs.push(j.matrix),
            Err(Error::Domain { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if jacs.is_empty() {
        return Err(Error::InvalidArgument("no sample point where the Jacobian is defined".into()));
    }
    let mut out = Vec::new();
    for family in Family::families_of_dim(n) {
        for roles in Roles::candidates(family) {
            out.push(fit_candidate(family, roles, &jacs, tol)?);
        }
    }
    out.sort_by(order);
    Ok(out)
}

/// Like [`infer_candidates`], but fails with `NoAlgebraFound` when no
/// candidate passes.
pub fn infer_algebra<F: VectorField + ?Sized>(field: &F, samples: &[Vector], tol: f64) -> Result<Vec<InferenceResult>> {
    let all = infer_candidates(field, samples, tol)?;
    if !all.first().is_some_and(|c| c.verdict) {
        let best_residual = all.iter().map(|c| c.residual).fold(f64::INFINITY, f64::min);
        return Err(Error::NoAlgebraFound { best_residual });
    }
    Ok(all)
}
