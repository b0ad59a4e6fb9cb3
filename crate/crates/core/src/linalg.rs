//! Small fixed-capacity vectors and square matrices (n ≤ 3), plus the dense
//! solvers the rest of the crate needs.

use core::fmt;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow this when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::MAX_DIM;

/// A point of ℝⁿ or an algebra element, `n ≤ 3`.
#[derive(Clone, Copy, PartialEq)]
pub struct Vector {
    len: usize,
    data: [f64; MAX_DIM],
}

impl Vector {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_DIM, "dimension {len} exceeds {MAX_DIM}");
        Vector {
            len,
            data: [0.0; MAX_DIM],
        }
    }

    pub fn from_slice(xs: &[f64]) -> Self {
        let mut v = Vector::zeros(xs.len());
        v.data[..xs.len()].copy_from_slice(xs);
        v
    }

    pub fn try_from_slice(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() || xs.len() > MAX_DIM {
            return Err(Error::Dimension {
                expected: MAX_DIM,
                found: xs.len(),
            });
        }
        Ok(Vector::from_slice(xs))
    }

    pub fn new2(x1: f64, x2: f64) -> Self {
        Vector::from_slice(&[x1, x2])
    }

    pub fn new3(x1: f64, x2: f64, x3: f64) -> Self {
        Vector::from_slice(&[x1, x2, x3])
    }

    /// The `i`-th standard basis vector of ℝⁿ.
    pub fn basis(len: usize, i: usize) -> Self {
        let mut v = Vector::zeros(len);
        v[i] = 1.0;
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data[..self.len]
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data[..self.len]
    }

    pub fn iter(&self) -> core::slice::Iter<'_, f64> {
        self.as_slice().iter()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.len, other.len);
        self.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, s: f64) -> Vector {
        let mut out = *self;
        out.as_mut_slice().iter_mut().for_each(|x| *x *= s);
        out
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &Vector) -> Vector {
        let mut out = *self;
        for (o, b) in out.as_mut_slice().iter_mut().zip(other.iter()) {
            *o += s * b;
        }
        out
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.len == expected {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected,
                found: self.len,
            })
        }
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.as_mut_slice()[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, rhs: Vector) -> Vector {
        self.axpy(1.0, &rhs)
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, rhs: Vector) -> Vector {
        self.axpy(-1.0, &rhs)
    }
}

impl AddAssign for Vector {
    fn add_assign(&mut self, rhs: Vector) {
        *self = *self + rhs;
    }
}

impl SubAssign for Vector {
    fn sub_assign(&mut self, rhs: Vector) {
        *self = *self - rhs;
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;
    fn mul(self, rhs: Vector) -> Vector {
        rhs.scale(self)
    }
}

/// Square matrix, `n ≤ 3`, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix {
    n: usize,
    data: [[f64; MAX_DIM]; MAX_DIM],
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_DIM, "dimension {n} exceeds {MAX_DIM}");
        Matrix {
            n,
            data: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let mut m = Matrix::zeros(rows.len());
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), rows.len(), "matrix must be square");
            m.data[i][..row.len()].copy_from_slice(row);
        }
        m
    }

    /// Matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: &[Vector]) -> Self {
        let n = cols.len();
        let mut m = Matrix::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector::from_slice(&self.data[i][..self.n])
    }

    pub fn column(&self, j: usize) -> Vector {
        let mut v = Vector::zeros(self.n);
        for i in 0..self.n {
            v[i] = self.data[i][j];
        }
        v
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        debug_assert_eq!(self.n, v.len());
        let mut out = Vector::zeros(self.n);
        for i in 0..self.n {
            out[i] = (0..self.n).map(|j| self[(i, j)] * v[j]).sum();
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        let mut out = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = (0..self.n).map(|k| self[(i, k)] * other[(k, j)]).sum();
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] *= s;
            }
        }
        out
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &Matrix) -> Matrix {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] += s * other[(i, j)];
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.entries().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).map(move |j| self.data[i][j]))
    }

    pub fn is_finite(&self) -> bool {
        self.entries().all(f64::is_finite)
    }

    /// Determinant by cofactor expansion (n ≤ 3).
    pub fn det(&self) -> f64 {
        let a = &self.data;
        match self.n {
            0 => 1.0,
            1 => a[0][0],
            2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
            _ => {
                a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                    - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
            }
        }
    }

    /// Solves `self · x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &Vector) -> Option<Vector> {
        let n = self.n;
        let mut a = [0.0; MAX_DIM * MAX_DIM];
        for i in 0..n {
            a[i * n..i * n + n].copy_from_slice(&self.data[i][..n]);
        }
        let mut x = *b;
        lu_solve_in_place(&mut a[..n * n], n, x.as_mut_slice()).then_some(x)
    }

    /// Lower Cholesky factor, if the matrix is symmetric positive definite.
    pub fn cholesky(&self) -> Option<Matrix> {
        let n = self.n;
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let d = self[(j, j)] - (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum::<f64>();
            if d.is_nan() || d <= 0.0 {
                return None;
            }
            l[(j, j)] = d.sqrt();
            for i in j + 1..n {
                let s = self[(i, j)] - (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum::<f64>();
                l[(i, j)] = s / l[(j, j)];
            }
        }
        Some(l)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.n).map(|i| &self.data[i][..self.n]))
            .finish()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.n && j < self.n);
        &self.data[i][j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.n && j < self.n);
        &mut self.data[i][j]
    }
}

/// Gaussian elimination with partial pivoting on a row-major `n×n` matrix.
/// Overwrites `a` with its LU factors and `b` with the solution. Returns
/// `false` if a zero pivot is met.
pub fn lu_solve_in_place(a: &mut [f64], n: usize, b: &mut [f64]) -> bool {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        if a[pivot * n + col] == 0.0 || !a[pivot * n + col].is_finite() {
            return false;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let p = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            a[row * n + col] = factor;
            for k in col + 1..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * b[k]).sum();
        b[row] = (b[row] - s) / a[row * n + row];
    }
    true
}

/// Result of a minimal-norm linear least-squares solve.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    pub rank: usize,
    /// Euclidean norm of `A x − b`.
    pub residual: f64,
}

/// Minimal-norm solution of `A x ≈ b` for a row-major `rows × cols` matrix,
/// via SVD. Singular values below `rcond · σ_max` count as zero.
pub fn least_squares(a: &[f64], rows: usize, cols: usize, b: &[f64], rcond: f64) -> LeastSquares {
    use nalgebra::{DMatrix, DVector};

    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(b.len(), rows);
    if cols == 0 {
        return LeastSquares {
            solution: Vec::new(),
            rank: 0,
            residual: b.iter().map(|x| x * x).sum::<f64>().sqrt(),
        };
    }
    let m = DMatrix::from_row_slice(rows, cols, a);
    let rhs = DVector::from_column_slice(b);
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = rcond * smax;
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let x = svd
        .solve(&rhs, eps.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| DVector::zeros(cols));
    let residual = (&m * &x - rhs).norm();
    LeastSquares {
        solution: x.iter().cloned().collect(),
        rank,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_pivoting_system() {
        let a = Matrix::from_rows(&[&[0.0, 2.0, 1.0], &[1.0, 1.0, 0.0], &[3.0, 0.0, 1.0]]);
        let x = Vector::new3(1.0, -2.0, 0.5);
        let b = a.mul_vec(&x);
        let got = a.solve(&b).unwrap();
        assert!((got - x).max_abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_has_no_solution() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(a.solve(&Vector::new2(1.0, 1.0)).is_none());
        assert_eq!(a.det(), 0.0);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let spd = Matrix::from_rows(&[&[4.0, 1.0], &[1.0, 3.0]]);
        let l = spd.cholesky().unwrap();
        assert!((l.matmul(&l.transpose()).axpy(-1.0, &spd)).max_abs() < 1e-14);
        let indefinite = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(indefinite.cholesky().is_none());
    }

    #[test]
    fn least_squares_reports_rank_and_min_norm() {
        // x + y = 2 twice: rank 1, minimal-norm solution (1, 1).
        let ls = least_squares(&[1.0, 1.0, 1.0, 1.0], 2, 2, &[2.0, 2.0], 1e-12);
        assert_eq!(ls.rank, 1);
        assert!((ls.solution[0] - 1.0).abs() < 1e-12);
        assert!((ls.solution[1] - 1.0).abs() < 1e-12);
        assert!(ls.residual < 1e-12);
    }
}
