//! Small dense real matrices and the handful of factorizations the rest of
//! the crate needs: LU (determinant, solve, inverse), cyclic Jacobi for
//! symmetric eigenproblems, one-sided Jacobi SVD and the matrix exponential.
//!
//! Everything here is sized for the dimensions the verification suites use
//! (n up to a few dozen). Jacobi methods are chosen for their accuracy on
//! small and clustered eigenvalues, not for speed.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)] // inherent f64 math is not in `core` on older toolchains
use num_traits::Float;

use crate::error::{Error, Result};

/// Row-major dense `rows x cols` matrix of `f64`.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:>12.6e} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        self.data[i * self.cols..(i + 1) * self.cols].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[f64]) {
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = *x;
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Matrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    /// `self * rhs * self^T`.
    pub fn conjugate(&self, rhs: &Matrix) -> Self {
        self.matmul(rhs).matmul(&self.transpose())
    }

    pub fn add(&self, rhs: &Matrix) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(*a, *b)).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Copy of the block starting at `(r0, c0)` with the given shape.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Sub-matrix keeping the listed rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// `max |M M^T - I|` entrywise.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.matmul(&self.transpose());
        g.sub(&Matrix::identity(self.rows)).max_abs()
    }

    pub fn determinant(&self) -> f64 {
        assert!(self.is_square());
        match Lu::factor(self) {
            Some(lu) => lu.determinant(),
            None => 0.0,
        }
    }

    pub fn inverse(&self) -> Option<Matrix> {
        Lu::factor(self).map(|lu| lu.inverse())
    }

    /// Numerical rank from singular values, relative to the largest one.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let sv = singular_values(self);
        let top = sv.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        sv.iter().filter(|s| **s > rel_tol * top).count()
    }
}

/// LU factorization with partial pivoting.
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    /// Returns `None` when a pivot is exactly zero.
    pub fn factor(a: &Matrix) -> Option<Self> {
        assert!(a.is_square());
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pmax) = (k..n).map(|i| (i, lu[(i, k)].abs())).fold((k, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
            if pmax == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        lu.data[i * n + j] -= f * lu.data[k * n + j];
                    }
                }
            }
        }
        Some(Self { lu, perm, sign })
    }

    pub fn determinant(&self) -> f64 {
        (0..self.lu.rows).fold(self.sign, |d, i| d * self.lu[(i, i)])
    }

    /// Smallest |pivot| relative to the largest, a cheap conditioning hint.
    pub fn pivot_ratio(&self) -> f64 {
        let n = self.lu.rows;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let p = self.lu[(i, i)].abs();
            lo = lo.min(p);
            hi = hi.max(p);
        }
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn solve_matrix(&self, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(b.rows, b.cols);
        for j in 0..b.cols {
            out.set_column(j, &self.solve(&b.column(j)));
        }
        out
    }

    pub fn inverse(&self) -> Matrix {
        self.solve_matrix(&Matrix::identity(self.lu.rows))
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues, nonascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: Matrix,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigen-solver. The input is symmetrized first.
pub fn symmetric_eigen(a: &Matrix) -> SymmetricEigen {
    assert!(a.is_square());
    let n = a.rows;
    let mut m = Matrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = Matrix::identity(n);
    let scale = m.frobenius_norm();
    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 =
                (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[(i, j)] * m[(i, j)]).sum();
            if off.sqrt() <= f64::EPSILON * 1e-2 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[(p, q)];
                    if apq.abs() <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    rotate_sym(&mut m, &mut v, p, q, c, s);
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    SymmetricEigen { values: order.iter().map(|&i| m[(i, i)]).collect(), vectors: Matrix::from_fn(n, n, |i, j| v[(i, order[j])]) }
}

fn rotate_sym(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = m.rows;
    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = c * akp - s * akq;
        m[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = c * apk - s * aqk;
        m[(q, k)] = s * apk + c * aqk;
    }
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Singular values (nonascending) by one-sided Jacobi.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let work = if a.rows >= a.cols { a.clone() } else { a.transpose() };
    let n = work.cols;
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| work.column(j)).collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (head, tail) = cols.split_at_mut(q);
                for (xp, xq) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    (*xp, *xq) = (c * *xp - s * *xq, s * *xp + c * *xq);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &Matrix) -> Matrix {
    assert!(a.is_square());
    let n = a.rows;
    let norm = a.frobenius_norm();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a.scale(1.0 / (1u64 << squarings) as f64);
    let mut result = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=20 {
        term = term.matmul(&scaled).scale(1.0 / k as f64);
        result = result.add(&term);
        if term.max_abs() < f64::EPSILON * 1e-3 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// Extends orthonormal columns to a full orthonormal basis of R^n by
/// pivoted Gram-Schmidt over the standard basis. Returns only the new columns.
pub fn orthonormal_complement(basis: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut have: Vec<Vec<f64>> = basis.to_vec();
    let mut extra = Vec::new();
    while have.len() < n {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for e in 0..n {
            let mut v = vec![0.0; n];
            v[e] = 1.0;
            // two passes keep the result orthogonal to working precision
            for _ in 0..2 {
                for b in &have {
                    let d: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= d * bi;
                    }
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(bn, _)| norm > *bn) {
                best = Some((norm, v));
            }
        }
        let (norm, mut v) = best.expect("n > 0");
        for x in &mut v {
            *x /= norm;
        }
        have.push(v.clone());
        extra.push(v);
    }
    extra
}

/// Modified Gram-Schmidt, applied twice, in place.
pub fn orthonormalize(vectors: &mut [Vec<f64>]) {
    for i in 0..vectors.len() {
        for _ in 0..2 {
            for j in 0..i {
                let d: f64 = vectors[j].iter().zip(&vectors[i]).map(|(x, y)| x * y).sum();
                let (head, tail) = vectors.split_at_mut(i);
                for (vi, bj) in tail[0].iter_mut().zip(&head[j]) {
                    *vi -= d * bj;
                }
            }
        }
        let norm = vectors[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in &mut vectors[i] {
                *x /= norm;
            }
        }
    }
}

/// Least-squares line fit `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn determinant_of_known_matrix() {
        let a = Matrix::from_row_major(3, 3, vec![2.0, 0.0, 1.0, 1.0, 3.0, 2.0, 1.0, 1.0, 1.0]).unwrap();
        // 2(3-2) - 0 + 1(1-3) = 0
        assert_relative_eq!(a.determinant(), 0.0, epsilon = 1e-14);
        let b = Matrix::from_row_major(2, 2, vec![0.0, 2.0, 3.0, 1.0]).unwrap();
        assert_relative_eq!(b.determinant(), -6.0, epsilon = 1e-14);
    }

    #[test]
    fn inverse_round_trip() {
        let a = Matrix::from_row_major(3, 3, vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]).unwrap();
        let inv = a.inverse().unwrap();
        assert!(a.matmul(&inv).sub(&Matrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn jacobi_eigen_reconstructs() {
        let a = Matrix::from_row_major(3, 3, vec![2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]).unwrap();
        let e = symmetric_eigen(&a);
        let s2 = core::f64::consts::SQRT_2;
        assert_relative_eq!(e.values[0], 2.0 + s2, epsilon = 1e-13);
        assert_relative_eq!(e.values[1], 2.0, epsilon = 1e-13);
        assert_relative_eq!(e.values[2], 2.0 - s2, epsilon = 1e-13);
        let rec = e.vectors.matmul(&Matrix::diagonal(&e.values)).matmul(&e.vectors.transpose());
        assert!(rec.sub(&a).max_abs() < 1e-13);
        assert!(e.vectors.orthogonality_defect() < 1e-14);
    }

    #[test]
    fn singular_values_of_rectangular() {
        let a = Matrix::from_row_major(3, 2, vec![3.0, 0.0, 0.0, -2.0, 0.0, 0.0]).unwrap();
        let sv = singular_values(&a);
        assert_relative_eq!(sv[0], 3.0, epsilon = 1e-15);
        assert_relative_eq!(sv[1], 2.0, epsilon = 1e-15);
        assert_eq!(singular_values(&a.transpose()), sv);
        assert_eq!(a.rank(1e-12), 2);
    }

    #[test]
    fn expm_of_rotation_generator() {
        let theta = 0.7f64;
        let g = Matrix::from_row_major(2, 2, vec![0.0, theta, -theta, 0.0]).unwrap();
        let r = expm(&g);
        assert_relative_eq!(r[(0, 0)], theta.cos(), epsilon = 1e-15);
        assert_relative_eq!(r[(0, 1)], theta.sin(), epsilon = 1e-15);
        let big = g.scale(20.0);
        assert!(expm(&big).orthogonality_defect() < 1e-12);
    }

    #[test]
    fn complement_completes_basis() {
        let s = 0.5f64.sqrt();
        let basis = vec![vec![s, s, 0.0]];
        let extra = orthonormal_complement(&basis, 3);
        assert_eq!(extra.len(), 2);
        let mut q = Matrix::zeros(3, 3);
        q.set_column(0, &basis[0]);
        q.set_column(1, &extra[0]);
        q.set_column(2, &extra[1]);
        assert!(q.orthogonality_defect() < 1e-15);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let (m, b) = linear_fit(&xs, &ys).unwrap();
        assert_relative_eq!(m, 2.0, epsilon = 1e-14);
        assert_relative_eq!(b, -1.0, epsilon = 1e-14);
        assert!(linear_fit(&[1.0], &[1.0]).is_none());
    }
}
