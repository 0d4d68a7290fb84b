//! Skew-symmetric matrices, Pfaffians, the orthogonal canonical form and
//! the skew singular value decomposition.
//!
//! The metric throughout is `|M|^2 = tr(M M^T) / 2`, under which the basis
//! matrices `X_ij` (`+1` at `(i, j)`, `-1` at `(j, i)`) are orthonormal and
//! the coordinate of `M` along `X_ij` is simply the entry `M[i][j]`.
//! All indices are 0-based.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math is not in `core` on older toolchains
use num_traits::Float;

use crate::dense::{orthonormal_complement, orthonormalize, Matrix};
use crate::error::{Error, Result};

/// Largest dimension accepted by [`pfaffian_expand`] (its memo table has
/// `2^n` entries).
pub const MAX_EXPAND_DIM: usize = 20;

/// Dense real skew-symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    m: Matrix,
}

impl SkewMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { m: Matrix::zeros(n, n) }
    }

    /// Accepts `m` if it is skew up to `1e-10` relative to its largest entry,
    /// then stores its exact skew part.
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
        }
        let n = m.rows();
        let tol = 1e-10 * (1.0 + m.max_abs());
        for i in 0..n {
            for j in i..n {
                let defect = (m[(i, j)] + m[(j, i)]).abs();
                if defect > tol {
                    return Err(Error::NotSkew { row: i, col: j, defect });
                }
            }
        }
        Ok(Self::skew_part(&m))
    }

    /// `(A - A^T) / 2`.
    pub fn skew_part(a: &Matrix) -> Self {
        assert!(a.is_square());
        let n = a.rows();
        Self { m: Matrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] - a[(j, i)])) }
    }

    /// Builds from the row-major strictly-upper triangle.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        let expected = n * n.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: upper.len() });
        }
        let mut m = Matrix::zeros(n, n);
        let mut it = upper.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = *it.next().expect("length checked");
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        Ok(Self { m })
    }

    /// Row-major strictly-upper triangle; inverse of [`SkewMatrix::from_upper`].
    pub fn upper(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.m[(i, j)]);
            }
        }
        out
    }

    /// The basis matrix `X_ij`; `i != j`, and `X_ji = -X_ij`.
    pub fn basis(n: usize, i: usize, j: usize) -> Self {
        assert!(i < n && j < n && i != j, "basis index out of range");
        let mut m = Matrix::zeros(n, n);
        m[(i, j)] = 1.0;
        m[(j, i)] = -1.0;
        Self { m }
    }

    /// `M(x) = sum_i x_i X_{2i, 2i+1}` (0-based) in dimension `n`.
    pub fn block_canonical(n: usize, pairs: &[f64]) -> Self {
        assert!(2 * pairs.len() <= n, "too many pairs for dimension");
        let mut m = Matrix::zeros(n, n);
        for (i, x) in pairs.iter().enumerate() {
            m[(2 * i, 2 * i + 1)] = *x;
            m[(2 * i + 1, 2 * i)] = -*x;
        }
        Self { m }
    }

    /// Block-diagonal `diag(upper_left, lower_right)`.
    pub fn block_diag(upper_left: &SkewMatrix, lower_right: &SkewMatrix) -> Self {
        let (a, b) = (upper_left.dim(), lower_right.dim());
        let mut m = Matrix::zeros(a + b, a + b);
        m.set_block(0, 0, &upper_left.m);
        m.set_block(a, a, &lower_right.m);
        Self { m }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    /// Sets entry `(i, j)` and its mirror.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i != j || v == 0.0, "diagonal of a skew matrix is zero");
        if i != j {
            self.m[(i, j)] = v;
            self.m[(j, i)] = -v;
        }
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }

    pub fn norm(&self) -> f64 {
        self.m.frobenius_norm() * core::f64::consts::FRAC_1_SQRT_2
    }

    /// `tr(A B^T) / 2`.
    pub fn inner(&self, other: &SkewMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim());
        0.5 * self.m.as_slice().iter().zip(other.m.as_slice()).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn add(&self, other: &SkewMatrix) -> Self {
        Self { m: self.m.add(&other.m) }
    }

    pub fn sub(&self, other: &SkewMatrix) -> Self {
        Self { m: self.m.sub(&other.m) }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m.scale(s) }
    }

    /// `Q M Q^T`, re-skewed to remove rounding asymmetry.
    pub fn conjugate(&self, q: &Matrix) -> Self {
        Self::skew_part(&q.conjugate(&self.m))
    }

    /// `Q^T M Q`.
    pub fn conjugate_transpose(&self, q: &Matrix) -> Self {
        Self::skew_part(&q.transpose().matmul(&self.m).matmul(q))
    }

    /// Principal sub-matrix on the listed indices.
    pub fn principal(&self, indices: &[usize]) -> Self {
        Self { m: self.m.select(indices, indices) }
    }

    /// Contiguous principal block `[start, start + len)`.
    pub fn principal_block(&self, start: usize, len: usize) -> Self {
        Self { m: self.m.block(start, start, len, len) }
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }
}

/// Pfaffian by recursive expansion along the first row, memoized on index
/// subsets. Exact up to floating-point summation; intended as the reference
/// oracle for small `n`.
pub fn pfaffian_expand(m: &SkewMatrix) -> Result<f64> {
    let n = m.dim();
    if n > MAX_EXPAND_DIM {
        return Err(Error::TooLarge(n));
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut memo = vec![f64::NAN; 1usize << n];
    Ok(expand_subset(m, full, &mut memo))
}

fn expand_subset(m: &SkewMatrix, mask: u32, memo: &mut [f64]) -> f64 {
    if mask == 0 {
        return 1.0;
    }
    let cached = memo[mask as usize];
    if !cached.is_nan() {
        return cached;
    }
    let i = mask.trailing_zeros() as usize;
    let rest = mask & !(1u32 << i);
    let mut total = 0.0;
    let mut position = 0usize;
    let mut bits = rest;
    while bits != 0 {
        let j = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        position += 1;
        let a = m.get(i, j);
        if a != 0.0 {
            let sub = expand_subset(m, rest & !(1u32 << j), memo);
            // (-1)^(position + 1) with position counted from 1 after i
            let sign = if position % 2 == 1 { 1.0 } else { -1.0 };
            total += sign * a * sub;
        }
    }
    memo[mask as usize] = total;
    total
}

/// Pfaffian in `O(n^3)` by Householder reduction to skew-tridiagonal form.
///
/// Each reflection `H` has `det H = -1`, and `Pf(H A H) = det(H) Pf(A)`;
/// the tridiagonal Pfaffian is the product of the entries `T[2i][2i+1]`.
pub fn pfaffian_fast(m: &SkewMatrix) -> f64 {
    let n = m.dim();
    if n % 2 == 1 {
        return 0.0;
    }
    if n == 0 {
        return 1.0;
    }
    let mut a = m.as_matrix().clone();
    let mut pf = 1.0;
    for i in 0..n.saturating_sub(2) {
        let len = n - i - 1;
        let x: Vec<f64> = (0..len).map(|k| a[(i + 1 + k, i)]).collect();
        let sigma: f64 = x[1..].iter().map(|v| v * v).sum();
        if sigma != 0.0 {
            let norm_x = (x[0] * x[0] + sigma).sqrt();
            let mut v = x.clone();
            let alpha = if x[0] <= 0.0 {
                v[0] -= norm_x;
                norm_x
            } else {
                v[0] += norm_x;
                -norm_x
            };
            let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            for t in &mut v {
                *t /= vnorm;
            }
            // trailing block update A22 <- H A22 H = A22 + 2 v w^T - 2 w v^T, w = A22 v
            let w: Vec<f64> = (0..len).map(|r| (0..len).map(|c| a[(i + 1 + r, i + 1 + c)] * v[c]).sum()).collect();
            for r in 0..len {
                for c in 0..len {
                    a[(i + 1 + r, i + 1 + c)] += 2.0 * (v[r] * w[c] - w[r] * v[c]);
                }
            }
            a[(i + 1, i)] = alpha;
            a[(i, i + 1)] = -alpha;
            for k in 1..len {
                a[(i + 1 + k, i)] = 0.0;
                a[(i, i + 1 + k)] = 0.0;
            }
            pf = -pf;
        }
        if i % 2 == 0 {
            pf *= a[(i, i + 1)];
        }
    }
    pf * a[(n - 2, n - 1)]
}

/// Pfaffian of the principal sub-matrix on strictly increasing `indices`.
pub fn principal_pfaffian(m: &SkewMatrix, indices: &[usize]) -> Result<f64> {
    if indices.len() % 2 == 1 {
        return Err(Error::InvalidArgument("principal Pfaffian needs an even number of indices"));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("indices must be strictly increasing"));
    }
    if indices.last().is_some_and(|&i| i >= m.dim()) {
        return Err(Error::InvalidArgument("index out of range"));
    }
    Ok(pfaffian_fast(&m.principal(indices)))
}

/// `M = q · M(pairs) · q^T` with `pairs` positive and nonascending.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub q: Matrix,
    pub pairs: Vec<f64>,
    pub n: usize,
    pub rank2k: usize,
}

impl CanonicalForm {
    pub fn reconstruct(&self) -> SkewMatrix {
        SkewMatrix::block_canonical(self.n, &self.pairs).conjugate(&self.q)
    }

    /// Number of retained pairs `k`.
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    /// Whether the pairs are a point of the open orbit space for half-rank
    /// `r`: exactly `r` pairs, strictly descending by more than `gap`.
    pub fn in_open_orbit_space(&self, r: usize, gap: f64) -> bool {
        self.pairs.len() == r && self.pairs.windows(2).all(|w| w[0] - w[1] > gap)
    }

    /// `det(q)`: `+1` whenever the matrix has a kernel. For full-rank even
    /// dimensions with negative Pfaffian no rotation exists and `q` is
    /// improper.
    pub fn orientation(&self) -> f64 {
        self.q.determinant().signum()
    }
}

/// Orthogonal canonical form by the eigen-route on the Hermitian matrix
/// `iM`.
///
/// For an eigenpair `iM z = x z` with `x > 0` and `z = a + ib`, the real
/// vectors satisfy `M a = x b` and `M b = -x a`, so the columns `(b, a)`
/// carry the block `x X_12`. Pairs at or below `tol * x_1` are treated as
/// zero.
pub fn canonical_decompose(m: &SkewMatrix, tol: f64) -> CanonicalForm {
    let n = m.dim();
    let scale = m.as_matrix().max_abs();
    if scale == 0.0 {
        return CanonicalForm { q: Matrix::identity(n), pairs: Vec::new(), n, rank2k: 0 };
    }
    let (values, vectors) = hermitian_eigen_of_skew(m);
    let top = values.iter().copied().fold(0.0, f64::max);
    let cutoff = (tol * top).max(f64::MIN_POSITIVE);

    let mut order: Vec<usize> = (0..n).filter(|&j| values[j] > cutoff).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    // A positive eigenvalue and its conjugate partner cannot both survive,
    // but guard the count anyway.
    order.truncate(n / 2);

    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &j in &order {
        cols.push((0..n).map(|i| vectors[i * n + j].im).collect());
        cols.push((0..n).map(|i| vectors[i * n + j].re).collect());
    }
    orthonormalize(&mut cols);
    let paired = cols.len();
    cols.extend(orthonormal_complement(&cols, n));

    let mut q = Matrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        q.set_column(j, c);
    }
    let rotated = m.conjugate_transpose(&q);
    let mut blocks: Vec<(f64, usize)> = (0..paired / 2).map(|i| (rotated.get(2 * i, 2 * i + 1), i)).collect();
    // Rayleigh values of a tight cluster may come out a few ulps out of order
    blocks.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut sorted_q = q.clone();
    for (slot, (_, src)) in blocks.iter().enumerate() {
        sorted_q.set_column(2 * slot, &q.column(2 * src));
        sorted_q.set_column(2 * slot + 1, &q.column(2 * src + 1));
    }
    let mut q = sorted_q;
    let pairs: Vec<f64> = blocks.iter().map(|b| b.0).collect();

    if paired < n && q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, n - 1)] = -q[(i, n - 1)];
        }
    }
    CanonicalForm { q, rank2k: 2 * pairs.len(), pairs, n }
}

/// Every positive pair of `m` (cutoff at the rounding floor).
pub fn all_pairs(m: &SkewMatrix) -> Vec<f64> {
    canonical_decompose(m, 4.0 * f64::EPSILON * m.dim() as f64).pairs
}

/// Eigen-decomposition of the Hermitian matrix `iM` by complex cyclic
/// Jacobi. Returns eigenvalues and row-major eigenvector columns.
fn hermitian_eigen_of_skew(m: &SkewMatrix) -> (Vec<f64>, Vec<Complex64>) {
    let n = m.dim();
    let mut h: Vec<Complex64> = (0..n * n).map(|k| Complex64::new(0.0, m.as_matrix().as_slice()[k])).collect();
    let mut v: Vec<Complex64> =
        (0..n * n).map(|k| if k / n == k % n { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).collect();
    let scale = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for _ in 0..100 {
        let off: f64 =
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| h[i * n + j].norm_sqr()).sum();
        if off.sqrt() <= 1e-2 * f64::EPSILON * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = h[p * n + q];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let theta = (h[q * n + q].re - h[p * n + p].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let conj_phase = phase.conj();
                // columns: A <- A U, U = diag(1, e^{-i phi}) * rotation
                for k in 0..n {
                    let (akp, akq) = (h[k * n + p], h[k * n + q]);
                    h[k * n + p] = akp * c - akq * conj_phase * s;
                    h[k * n + q] = akp * s + akq * conj_phase * c;
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = vkp * c - vkq * conj_phase * s;
                    v[k * n + q] = vkp * s + vkq * conj_phase * c;
                }
                // rows: A <- U^H A
                for k in 0..n {
                    let (apk, aqk) = (h[p * n + k], h[q * n + k]);
                    h[p * n + k] = apk * c - aqk * phase * s;
                    h[q * n + k] = apk * s + aqk * phase * c;
                }
                h[p * n + q] = Complex64::new(0.0, 0.0);
                h[q * n + p] = Complex64::new(0.0, 0.0);
            }
        }
    }
    ((0..n).map(|i| h[i * n + i].re).collect(), v)
}

/// `M = u · sigma · v^T` with `u = A P`, `v = A` for the canonical rotation
/// `A` and the block rotation `P = diag(J, ..., J, I)`, `J = [[0, 1], [-1, 0]]`.
#[derive(Debug, Clone)]
pub struct SkewSvd {
    pub u: Matrix,
    /// Diagonal `x_1, x_1, ..., x_k, x_k, 0, ..., 0`.
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl SkewSvd {
    pub fn reconstruct(&self) -> Matrix {
        self.u.matmul(&Matrix::diagonal(&self.sigma)).matmul(&self.v.transpose())
    }
}

pub fn skew_svd(m: &SkewMatrix) -> SkewSvd {
    let n = m.dim();
    let cf = canonical_decompose(m, 4.0 * f64::EPSILON * n as f64);
    let mut p = Matrix::identity(n);
    let mut sigma = vec![0.0; n];
    for (i, x) in cf.pairs.iter().enumerate() {
        p[(2 * i, 2 * i)] = 0.0;
        p[(2 * i + 1, 2 * i + 1)] = 0.0;
        p[(2 * i, 2 * i + 1)] = 1.0;
        p[(2 * i + 1, 2 * i)] = -1.0;
        sigma[2 * i] = *x;
        sigma[2 * i + 1] = *x;
    }
    SkewSvd { u: cf.q.matmul(&p), sigma, v: cf.q }
}

#[cfg(test)]
mod tests {
    extern crate std;
    use super::*;
    use crate::random::{random_skew, random_special_orthogonal};
    use approx::assert_relative_eq;

    fn four_by_four(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> SkewMatrix {
        SkewMatrix::from_upper(4, &[a, b, c, d, e, f]).unwrap()
    }

    #[test]
    fn basis_matrices_have_unit_norm() {
        for (i, j) in [(0, 1), (2, 5), (4, 1)] {
            assert_relative_eq!(SkewMatrix::basis(6, i, j).norm(), 1.0);
        }
        let m = SkewMatrix::block_canonical(4, &[3.0, 1.0]);
        assert_relative_eq!(m.norm(), 10f64.sqrt());
    }

    #[test]
    fn construction_rejects_non_skew() {
        let mut a = Matrix::zeros(3, 3);
        a[(0, 1)] = 1.0;
        a[(1, 0)] = 1.0;
        assert!(matches!(SkewMatrix::new(a), Err(Error::NotSkew { .. })));
        assert!(SkewMatrix::from_upper(4, &[1.0; 5]).is_err());
    }

    #[test]
    fn pfaffian_small_cases() {
        let m = SkewMatrix::block_canonical(2, &[2.5]);
        assert_eq!(pfaffian_expand(&m).unwrap(), 2.5);
        assert_relative_eq!(pfaffian_fast(&m), 2.5);

        for n in [3, 5] {
            let odd = random_skew(n, 7, 1.0);
            assert_eq!(pfaffian_expand(&odd).unwrap(), 0.0);
            assert_eq!(pfaffian_fast(&odd), 0.0);
        }

        let (a, b, c, d, e, f) = (1.3, -0.7, 2.1, 0.4, -1.9, 0.8);
        let m = four_by_four(a, b, c, d, e, f);
        let matchings = a * f - b * e + c * d;
        assert_relative_eq!(pfaffian_expand(&m).unwrap(), matchings, epsilon = 1e-14);
        assert_relative_eq!(pfaffian_fast(&m), matchings, epsilon = 1e-14);

        assert_eq!(pfaffian_expand(&SkewMatrix::zeros(0)).unwrap(), 1.0);
        assert_eq!(pfaffian_fast(&SkewMatrix::zeros(6)), 0.0);
        assert_eq!(pfaffian_expand(&SkewMatrix::zeros(6)).unwrap(), 0.0);
    }

    #[test]
    fn pfaffian_fast_handles_already_tridiagonal_and_sparse() {
        // no reflections needed: Pf = x1 x2 x3
        let m = SkewMatrix::block_canonical(6, &[2.0, 3.0, 5.0]);
        assert_relative_eq!(pfaffian_fast(&m), 30.0);
        let mut s = SkewMatrix::zeros(4);
        s.set(0, 3, 2.0);
        s.set(1, 2, 3.0);
        // a f - b e + c d with c = 2, d = 3
        assert_relative_eq!(pfaffian_fast(&s), 6.0);
        assert_relative_eq!(pfaffian_expand(&s).unwrap(), 6.0);
    }

    #[test]
    fn pfaffian_squares_to_determinant_at_ten() {
        let m = random_skew(10, 99, 1.0);
        let pf = pfaffian_fast(&m);
        let det = m.determinant();
        assert!(((pf * pf - det) / det).abs() < 1e-9);
    }

    #[test]
    fn expand_rejects_huge_dimension() {
        assert_eq!(pfaffian_expand(&SkewMatrix::zeros(22)), Err(Error::TooLarge(22)));
    }

    #[test]
    fn principal_pfaffian_selection() {
        let m = random_skew(6, 3, 1.0);
        assert_relative_eq!(principal_pfaffian(&m, &[0, 1]).unwrap(), m.get(0, 1), epsilon = 1e-15);
        let all: Vec<usize> = (0..6).collect();
        assert_relative_eq!(principal_pfaffian(&m, &all).unwrap(), pfaffian_expand(&m).unwrap(), max_relative = 1e-12);
        assert!(principal_pfaffian(&m, &[0, 1, 2]).is_err());
        assert!(principal_pfaffian(&m, &[1, 0]).is_err());
        assert!(principal_pfaffian(&m, &[4, 6]).is_err());
    }

    #[test]
    fn canonical_of_canonical_input() {
        let m = SkewMatrix::block_canonical(4, &[3.0, 1.0]);
        let cf = canonical_decompose(&m, 1e-9);
        assert_eq!(cf.rank2k, 4);
        assert_relative_eq!(cf.pairs[0], 3.0, epsilon = 1e-14);
        assert_relative_eq!(cf.pairs[1], 1.0, epsilon = 1e-14);
        assert!(cf.reconstruct().sub(&m).norm() < 1e-14);
        // q is identity up to a rotation inside each 2x2 block
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert!(cf.q[(i, j)].abs() < 1e-14 && cf.q[(j, i)].abs() < 1e-14);
        }
        assert!(cf.q.orthogonality_defect() < 1e-14);
    }

    #[test]
    fn canonical_round_trip_of_rotated_rank_two() {
        let q0 = random_special_orthogonal(5, 11);
        let m = SkewMatrix::block_canonical(5, &[2.0]).conjugate(&q0);
        let cf = canonical_decompose(&m, 1e-9);
        assert_eq!(cf.rank2k, 2);
        assert_relative_eq!(cf.pairs[0], 2.0, epsilon = 1e-12);
        assert!(cf.reconstruct().sub(&m).norm() < 1e-10);
        assert_relative_eq!(cf.q.determinant(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn canonical_of_zero() {
        let cf = canonical_decompose(&SkewMatrix::zeros(3), 1e-9);
        assert!(cf.pairs.is_empty());
        assert_eq!(cf.rank2k, 0);
        assert_eq!(cf.q, Matrix::identity(3));
    }

    #[test]
    fn canonical_with_repeated_pairs() {
        let q0 = random_special_orthogonal(6, 5);
        let m = SkewMatrix::block_canonical(6, &[1.0, 1.0, 1.0]).conjugate(&q0);
        let cf = canonical_decompose(&m, 1e-9);
        assert_eq!(cf.rank2k, 6);
        for x in &cf.pairs {
            assert_relative_eq!(*x, 1.0, epsilon = 1e-12);
        }
        assert!(cf.reconstruct().sub(&m).norm() < 1e-12);
    }

    #[test]
    fn full_rank_negative_pfaffian_is_improper() {
        let m = SkewMatrix::block_canonical(2, &[1.0]).scale(-1.0);
        let cf = canonical_decompose(&m, 1e-9);
        assert_relative_eq!(cf.pairs[0], 1.0);
        assert_eq!(cf.orientation(), -1.0);
        assert!(cf.reconstruct().sub(&m).norm() < 1e-15);
    }

    #[test]
    fn relative_rank_threshold() {
        let m = SkewMatrix::block_canonical(6, &[1.0, 1e-3, 1e-12]);
        assert_eq!(canonical_decompose(&m, 1e-9).rank2k, 4);
        assert_eq!(canonical_decompose(&m, 1e-2).rank2k, 2);
        assert_eq!(canonical_decompose(&m.scale(1e6), 1e-9).rank2k, 4);
    }

    #[test]
    fn svd_of_single_block() {
        let x = 1.7;
        let m = SkewMatrix::block_canonical(2, &[x]);
        let svd = skew_svd(&m);
        assert_eq!(svd.sigma, vec![x, x]);
        let uv = svd.u.matmul(&svd.v.transpose());
        let p = Matrix::from_row_major(2, 2, vec![0.0, 1.0, -1.0, 0.0]).unwrap();
        assert!(uv.sub(&p).max_abs() < 1e-14);
        assert!(svd.reconstruct().sub(m.as_matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn svd_of_zero() {
        let svd = skew_svd(&SkewMatrix::zeros(3));
        assert_eq!(svd.sigma, vec![0.0; 3]);
        assert_eq!(svd.u, Matrix::identity(3));
        assert_eq!(svd.v, Matrix::identity(3));
    }

    #[test]
    fn svd_matches_dense_singular_values() {
        let m = random_skew(6, 21, 1.0);
        let svd = skew_svd(&m);
        let dense = crate::dense::singular_values(m.as_matrix());
        for (a, b) in svd.sigma.iter().zip(&dense) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12);
        }
        assert!(svd.u.orthogonality_defect() < 1e-13);
        assert!(svd.reconstruct().sub(m.as_matrix()).max_abs() < 1e-13);
    }
}
