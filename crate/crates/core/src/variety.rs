//! Pfaffian varieties `C(n, 2r)`: skew matrices of rank at most `2r`.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math is not in `core` on older toolchains
use num_traits::Float;

use crate::error::{Error, Result};
use crate::skew::{all_pairs, canonical_decompose, pfaffian_fast, SkewMatrix};

/// The variety `C(n, 2r)`, `0 <= r <= floor(n/2) - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarietySpec {
    n: usize,
    r: usize,
}

impl VarietySpec {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if n < 2 || r + 1 > n / 2 {
            return Err(Error::InvalidSpec { n, r });
        }
        Ok(Self { n, r })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    /// `n(n-1)/2`.
    pub fn ambient_dimension(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// `r(2r-1) + 2r(n-2r)`: the slice directions, the in-block rotations
    /// and the rotations mixing the image with the kernel.
    pub fn dimension(&self) -> usize {
        let (n, r) = (self.n, self.r);
        r * (2 * r).saturating_sub(1) + 2 * r * (n - 2 * r)
    }

    /// `(n-2r)(n-2r-1)/2`, the dimension of the normal block.
    pub fn codimension(&self) -> usize {
        let c = self.n - 2 * self.r;
        c * (c - 1) / 2
    }

    /// `n - 2r`, the size of the normal block.
    pub fn normal_size(&self) -> usize {
        self.n - 2 * self.r
    }

    pub fn is_hypersurface(&self) -> bool {
        self.normal_size() == 2
    }

    fn check(&self, m: &SkewMatrix) -> Result<()> {
        if m.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: m.dim() });
        }
        Ok(())
    }
}

pub fn dimension(spec: VarietySpec) -> usize {
    spec.dimension()
}

pub fn codimension(spec: VarietySpec) -> usize {
    spec.codimension()
}

/// Even rank `2k` of `m`, pairs counted above `tol * x_1`.
pub fn stratum(m: &SkewMatrix, tol: f64) -> usize {
    canonical_decompose(m, tol).rank2k
}

/// Membership by numerical rank.
pub fn contains_rank(spec: VarietySpec, m: &SkewMatrix, tol: f64) -> Result<bool> {
    spec.check(m)?;
    Ok(stratum(m, tol) <= 2 * spec.r)
}

/// Membership by vanishing of every principal Pfaffian of order `2r + 2`.
///
/// Those Pfaffians are forms of degree `r + 1`, so the cutoff is
/// `tol * (|m| / sqrt(r + 1))^(r + 1)`.
pub fn contains_pfaffian(spec: VarietySpec, m: &SkewMatrix, tol: f64) -> Result<bool> {
    spec.check(m)?;
    let order = 2 * spec.r + 2;
    let norm = m.norm();
    if norm == 0.0 {
        return Ok(true);
    }
    let degree = (spec.r + 1) as i32;
    let threshold = tol * (norm / ((spec.r + 1) as f64).sqrt()).powi(degree);
    let mut indices: Vec<usize> = (0..order).collect();
    loop {
        if pfaffian_fast(&m.principal(&indices)).abs() > threshold {
            return Ok(false);
        }
        if !next_combination(&mut indices, spec.n) {
            return Ok(true);
        }
    }
}

/// Advances `idx` to the next increasing `k`-subset of `0..n`.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in (i + 1)..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Nearest point of the variety.
#[derive(Debug, Clone)]
pub struct Projection {
    pub matrix: SkewMatrix,
    /// `x_r == x_{r+1}` within tolerance: the minimizer is not unique and
    /// `matrix` is one of several nearest points.
    pub non_unique: bool,
}

/// Relative tie window for the non-uniqueness flag.
pub const TIE_TOL: f64 = 1e-9;

/// Truncation of the canonical form to its `r` largest pairs.
pub fn project(spec: VarietySpec, m: &SkewMatrix) -> Result<Projection> {
    spec.check(m)?;
    let cf = canonical_decompose(m, 4.0 * f64::EPSILON * spec.n as f64);
    let r = spec.r;
    let non_unique = cf.pairs.len() > r && r > 0 && {
        let top = cf.pairs[0];
        (cf.pairs[r - 1] - cf.pairs[r]).abs() <= TIE_TOL * top
    };
    let kept = &cf.pairs[..cf.pairs.len().min(r)];
    let matrix = SkewMatrix::block_canonical(spec.n, kept).conjugate(&cf.q);
    Ok(Projection { matrix, non_unique })
}

/// `sqrt(sum_{i > r} x_i^2)`.
pub fn distance(spec: VarietySpec, m: &SkewMatrix) -> Result<f64> {
    spec.check(m)?;
    let pairs = all_pairs(m);
    Ok(pairs.iter().skip(spec.r).map(|x| x * x).sum::<f64>().sqrt())
}
