//! Commutative, associative, unital algebras on ℝ² and ℝ³ given by
//! structure constants `eᵢeⱼ = Σₖ c[i][j][k] eₖ`.
//!
//! Five families are supported. `r`, `s`, `t` name the basis roles, an
//! arbitrary assignment of the standard basis vectors:
//!
//! | family  | unit          | products                                              |
//! |---------|---------------|-------------------------------------------------------|
//! | `A2_r`  | `e_r`         | `e_s e_s = p₁e_r + p₂e_s`                              |
//! | `A2_12` | `e₁ + e₂`     | `eᵢeᵢ = eᵢ`, `e₁e₂ = 0`                                 |
//! | `A3_r`  | `e_r`         | `e_s e_s = p₇e_r + p₁e_s + p₂e_t`, `e_s e_t = p₈e_r + p₃e_s + p₄e_t`, `e_t e_t = p₉e_r + p₅e_s + p₆e_t` |
//! | `A3_rs` | `e_r + e_s`   | `e_r e_r = e_r`, `e_s e_s = e_s`, `e_s e_t = e_t`, `e_t e_t = p₁e_s + p₂e_t` |
//! | `A3_123`| `e₁ + e₂ + e₃`| `eᵢeᵢ = eᵢ`, `eᵢeⱼ = 0`                                 |
//!
//! For `A3_r` the constants `p₇, p₈, p₉` are always derived from `p₁..p₆`
//! through the commutativity equations, see [`derived_a3r_params`].

use core::fmt;
use core::str::FromStr;

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow this when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::MAX_DIM;

/// Algebra elements share the coordinate representation of points.
pub type Element = Vector;

pub(crate) type Constants = [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM];

/// `|det R(a)| ≤ REGULARITY_TOL · (1 + ‖a‖)ⁿ` counts as singular.
pub const REGULARITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(non_camel_case_types)]
pub enum Family {
    /// `𝔸³₁,₂,₃`
    A3_123,
    /// `𝔸³_{r,s}(p₁, p₂)`
    A3_rs,
    /// `𝔸³_r(p₁, …, p₆)`
    A3_r,
    /// `𝔸²₁,₂`
    A2_12,
    /// `𝔸²_r(p₁, p₂)`
    A2_r,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::A2_r,
        Family::A2_12,
        Family::A3_r,
        Family::A3_rs,
        Family::A3_123,
    ];

    pub fn dim(self) -> usize {
        match self {
            Family::A2_r | Family::A2_12 => 2,
            _ => 3,
        }
    }

    /// Number of user-supplied parameters.
    pub fn param_count(self) -> usize {
        match self {
            Family::A2_r | Family::A3_rs => 2,
            Family::A3_r => 6,
            Family::A2_12 | Family::A3_123 => 0,
        }
    }

    /// Rank used to order candidates: smaller means more constrained.
    pub fn constraint_rank(self) -> u8 {
        match self {
            Family::A3_123 | Family::A2_12 => 0,
            Family::A3_rs => 1,
            Family::A3_r | Family::A2_r => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::A2_r => "A2_r",
            Family::A2_12 => "A2_12",
            Family::A3_r => "A3_r",
            Family::A3_rs => "A3_rs",
            Family::A3_123 => "A3_123",
        }
    }

    pub fn families_of_dim(dim: usize) -> impl Iterator<Item = Family> {
        Family::ALL.into_iter().filter(move |f| f.dim() == dim)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnsupportedAlgebra(format!("unknown family `{}`", s.trim())))
    }
}

/// Assignment of the roles `r, s, t` to basis indices (zero-based).
/// In dimension two `t` is unused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Roles {
    pub r: usize,
    pub s: usize,
    pub t: usize,
}

impl Roles {
    pub fn identity(dim: usize) -> Self {
        Roles {
            r: 0,
            s: 1,
            t: if dim == 3 { 2 } else { 0 },
        }
    }

    /// Builds roles from a one-based permutation such as `[2, 1, 3]`.
    pub fn from_one_based(perm: &[usize]) -> Result<Self> {
        let zero: Vec<usize> = perm
            .iter()
            .map(|&i| i.checked_sub(1).ok_or(Error::InvalidRoles))
            .collect::<Result<_>>()?;
        Roles::from_permutation(&zero)
    }

    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        if !(2..=3).contains(&n) {
            return Err(Error::InvalidRoles);
        }
        let mut seen = [false; MAX_DIM];
        for &i in perm {
            if i >= n || seen[i] {
                return Err(Error::InvalidRoles);
            }
            seen[i] = true;
        }
        Ok(Roles {
            r: perm[0],
            s: perm[1],
            t: if n == 3 { perm[2] } else { 0 },
        })
    }

    pub fn as_vec(&self, dim: usize) -> Vec<usize> {
        if dim == 3 {
            alloc::vec![self.r, self.s, self.t]
        } else {
            alloc::vec![self.r, self.s]
        }
    }

    /// All role assignments worth trying for `family`: the unit role `r` for
    /// `A2_r`/`A3_r` (with `s < t`), ordered `(r, s)` for `A3_rs`, identity
    /// otherwise.
    pub fn candidates(family: Family) -> Vec<Roles> {
        match family {
            Family::A2_r => alloc::vec![Roles { r: 0, s: 1, t: 0 }, Roles { r: 1, s: 0, t: 0 }],
            Family::A3_r => (0..3)
                .map(|r| {
                    let mut rest = (0..3).filter(|&i| i != r);
                    let s = rest.next().unwrap();
                    let t = rest.next().unwrap();
                    Roles { r, s, t }
                })
                .collect(),
            Family::A3_rs => {
                let mut out = Vec::new();
                for r in 0..3 {
                    for s in 0..3 {
                        if s != r {
                            out.push(Roles { r, s, t: 3 - r - s });
                        }
                    }
                }
                out
            }
            Family::A2_12 => alloc::vec![Roles::identity(2)],
            Family::A3_123 => alloc::vec![Roles::identity(3)],
        }
    }
}

/// `(p₇, p₈, p₉)` from `p₁..p₆` via the commutativity equations.
///
/// These are the unique values for which `R(e_s)` and `R(e_t)` commute and
/// close under multiplication, i.e. the table is associative. The printed
/// form of the equations carries the opposite overall sign.
pub fn derived_a3r_params(p: &[f64]) -> [f64; 3] {
    let (p1, p2, p3, p4, p5, p6) = (p[0], p[1], p[2], p[3], p[4], p[5]);
    [
        p4 * p4 + p2 * p3 - p1 * p4 - p2 * p6,
        p2 * p5 - p3 * p4,
        p3 * p3 + p4 * p5 - p1 * p5 - p3 * p6,
    ]
}

/// The commutativity equations exactly as printed; they make the table
/// non-associative unless `p₇ = p₈ = p₉ = 0`. Kept for the errata report.
pub fn printed_a3r_params(p: &[f64]) -> [f64; 3] {
    let [p7, p8, p9] = derived_a3r_params(p);
    [-p7, -p8, -p9]
}

/// Product table of `family` with roles `roles`. For `A3_r`, `p` holds all
/// nine parameters `p₁..p₉`.
pub(crate) fn family_table(family: Family, roles: Roles, p: &[f64]) -> Constants {
    let mut c: Constants = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    let Roles { r, s, t } = roles;
    let mut set = |i: usize, j: usize, k: usize, v: f64| {
        c[i][j][k] = v;
        c[j][i][k] = v;
    };
    match family {
        Family::A2_r => {
            set(r, r, r, 1.0);
            set(r, s, s, 1.0);
            set(s, s, r, p[0]);
            set(s, s, s, p[1]);
        }
        Family::A2_12 => {
            set(0, 0, 0, 1.0);
            set(1, 1, 1, 1.0);
        }
        Family::A3_r => {
            let (p1, p2, p3, p4, p5, p6, p7, p8, p9) =
                (p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], p[8]);
            for i in [r, s, t] {
                set(r, i, i, 1.0);
            }
            set(s, s, r, p7);
            set(s, s, s, p1);
            set(s, s, t, p2);
            set(s, t, r, p8);
            set(s, t, s, p3);
            set(s, t, t, p4);
            set(t, t, r, p9);
            set(t, t, s, p5);
            set(t, t, t, p6);
        }
        Family::A3_rs => {
            set(r, r, r, 1.0);
            set(s, s, s, 1.0);
            set(s, t, t, 1.0);
            set(t, t, s, p[0]);
            set(t, t, t, p[1]);
        }
        Family::A3_123 => {
            for i in 0..3 {
                set(i, i, i, 1.0);
            }
        }
    }
    c
}

pub(crate) fn family_unit(family: Family, roles: Roles) -> Vector {
    let dim = family.dim();
    match family {
        Family::A2_r | Family::A3_r => Vector::basis(dim, roles.r),
        Family::A3_rs => Vector::basis(3, roles.r) + Vector::basis(3, roles.s),
        Family::A2_12 | Family::A3_123 => {
            let mut e = Vector::zeros(dim);
            e.as_mut_slice().fill(1.0);
            e
        }
    }
}

/// A commutative unital algebra on ℝⁿ, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraSpec {
    dim: usize,
    constants: Constants,
    unit: Vector,
    family: Family,
    params: Vec<f64>,
    derived: Vec<f64>,
    roles: Roles,
}

impl AlgebraSpec {
    /// Builds the algebra of `family` with basis roles `roles` and the
    /// family's free parameters.
    pub fn new(family: Family, roles: Roles, params: &[f64]) -> Result<Self> {
        let dim = family.dim();
        if params.len() != family.param_count() {
            return Err(Error::ParamCount {
                family: family.name(),
                expected: family.param_count(),
                found: params.len(),
            });
        }
        Roles::from_permutation(&roles.as_vec(dim))?;
        let (table, derived) = if family == Family::A3_r {
            let d = derived_a3r_params(params);
            let mut all = params.to_vec();
            all.extend_from_slice(&d);
            (family_table(family, roles, &all), d.to_vec())
        } else {
            (family_table(family, roles, params), Vec::new())
        };
        Ok(AlgebraSpec {
            dim,
            constants: table,
            unit: family_unit(family, roles),
            family,
            params: params.to_vec(),
            derived,
            roles,
        })
    }

    /// Shorthand for the family with identity roles.
    pub fn standard(family: Family, params: &[f64]) -> Result<Self> {
        AlgebraSpec::new(family, Roles::identity(family.dim()), params)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn roles(&self) -> Roles {
        self.roles
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// `p₇, p₈, p₉` for `A3_r`, empty otherwise.
    pub fn derived_params(&self) -> &[f64] {
        &self.derived
    }

    /// Structure constant `c[i][j][k]` (zero-based).
    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.constants[i][j][k]
    }

    pub fn unit(&self) -> Element {
        self.unit
    }

    /// `‖e‖²`
    pub fn unit_norm_sq(&self) -> f64 {
        self.unit.dot(&self.unit)
    }

    pub fn basis(&self, i: usize) -> Element {
        Vector::basis(self.dim, i)
    }

    pub fn zero(&self) -> Element {
        Vector::zeros(self.dim)
    }

    pub fn element(&self, coords: &[f64]) -> Result<Element> {
        let v = Vector::try_from_slice(coords)?;
        v.check_len(self.dim)?;
        Ok(v)
    }

    pub(crate) fn check(&self, a: &Element) -> Result<()> {
        a.check_len(self.dim)
    }

    /// `(ab)_k = Σ_{i,j} aᵢ bⱼ c[i][j][k]`
    pub fn product(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Unchecked product for hot loops inside the crate. Summing over
    /// unordered pairs `i ≤ j` makes `ab` and `ba` bitwise equal.
    pub(crate) fn mul(&self, a: &Element, b: &Element) -> Element {
        let n = self.dim;
        let mut out = Vector::zeros(n);
        for i in 0..n {
            for j in i..n {
                let ab = if i == j { a[i] * b[i] } else { a[i] * b[j] + a[j] * b[i] };
                if ab == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += ab * self.constants[i][j][k];
                }
            }
        }
        out
    }

    /// `R(eᵢ)` with `[R(eᵢ)]_{jk} = c[i][k][j]`.
    pub fn basis_representation(&self, i: usize) -> Matrix {
        let n = self.dim;
        let mut m = Matrix::zeros(n);
        for j in 0..n {
            for k in 0..n {
                m[(j, k)] = self.constants[i][k][j];
            }
        }
        m
    }

    /// First fundamental representation `R(a) = Σ aᵢ R(eᵢ)`, so that
    /// `R(a)·b = ab`.
    pub fn representation(&self, a: &Element) -> Result<Matrix> {
        self.check(a)?;
        Ok(self.rep(a))
    }

    pub(crate) fn rep(&self, a: &Element) -> Matrix {
        let n = self.dim;
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            if a[i] != 0.0 {
                m = m.axpy(a[i], &self.basis_representation(i));
            }
        }
        m
    }

    pub fn det_representation(&self, a: &Element) -> Result<f64> {
        self.check(a)?;
        Ok(self.rep(a).det())
    }

    /// Scale-aware singularity threshold for `a`.
    pub fn regularity_threshold(&self, a: &Element) -> f64 {
        REGULARITY_TOL * (1.0 + a.norm()).powi(self.dim as i32)
    }

    pub fn is_regular(&self, a: &Element) -> bool {
        self.check(a).is_ok() && self.rep(a).det().abs() > self.regularity_threshold(a)
    }

    /// Multiplicative inverse `e/a`, solving `R(a)·x = e`.
    pub fn inverse(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        self.inv(a)
    }

    pub(crate) fn inv(&self, a: &Element) -> Result<Element> {
        let r = self.rep(a);
        let det = r.det();
        if !(det.abs() > self.regularity_threshold(a)) {
            return Err(Error::SingularElement { det });
        }
        r.solve(&self.unit).ok_or(Error::SingularElement { det })
    }

    /// `aᵏ`; negative powers are powers of the inverse.
    pub fn power(&self, a: &Element, k: i32) -> Result<Element> {
        self.check(a)?;
        self.pow(a, k)
    }

    pub(crate) fn pow(&self, a: &Element, k: i32) -> Result<Element> {
        let base = if k < 0 { self.inv(a)? } else { *a };
        let mut out = self.unit;
        for _ in 0..k.unsigned_abs() {
            out = self.mul(&out, &base);
        }
        Ok(out)
    }

    /// Closed-form determinant polynomial of `R(f)` in the role
    /// coordinates `(f_r, f_s, f_t)`, as tabulated for each family. Used as
    /// an independent cross-check of [`AlgebraSpec::det_representation`].
    pub fn family_det_polynomial(&self, f: &Element) -> Result<f64> {
        self.check(f)?;
        let Roles { r, s, t } = self.roles;
        let p = &self.params;
        Ok(match self.family {
            Family::A2_r => {
                let (fr, fs) = (f[r], f[s]);
                fr * fr + p[1] * fr * fs - p[0] * fs * fs
            }
            Family::A2_12 => f[0] * f[1],
            Family::A3_r => {
                let (fr, fs, ft) = (f[r], f[s], f[t]);
                let (p1, p2, p3, p4, p5, p6) = (p[0], p[1], p[2], p[3], p[4], p[5]);
                let (p7, p8, p9) = (self.derived[0], self.derived[1], self.derived[2]);
                fr.powi(3)
                    + (p1 + p4) * fr * fr * fs
                    + (p3 + p6) * fr * fr * ft
                    + (p1 * p4 - p2 * p3 - p7) * fr * fs * fs
                    + (p1 * p6 - p2 * p5 - 2.0 * p8) * fr * fs * ft
                    + (p3 * p6 - p4 * p5 - p9) * fr * ft * ft
                    + (p2 * p8 - p4 * p7) * fs.powi(3)
                    + (2.0 * p2 * p9 - p4 * p8 - p6 * p7) * fs * fs * ft
                    + (p5 * p7 - p6 * p8 - p1 * p9 + p4 * p9) * fs * ft * ft
                    + (p5 * p8 - p3 * p9) * ft.powi(3)
            }
            Family::A3_rs => {
                let (fr, fs, ft) = (f[r], f[s], f[t]);
                fr * fs * fs + p[1] * fr * fs * ft - p[0] * fr * ft * ft
            }
            Family::A3_123 => f[0] * f[1] * f[2],
        })
    }

    /// Max violation of commutativity, associativity and the unit law over
    /// basis elements.
    pub fn axiom_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let ei = self.basis(i);
            worst = worst.max((self.mul(&self.unit, &ei) - ei).max_abs());
            for j in 0..n {
                let ej = self.basis(j);
                worst = worst.max((self.mul(&ei, &ej) - self.mul(&ej, &ei)).max_abs());
                for k in 0..n {
                    let ek = self.basis(k);
                    let lhs = self.mul(&self.mul(&ei, &ej), &ek);
                    let rhs = self.mul(&ei, &self.mul(&ej, &ek));
                    worst = worst.max((lhs - rhs).max_abs());
                }
            }
        }
        worst
    }
}
