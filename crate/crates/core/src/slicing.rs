//! Primary slice charts `Q (M(x) + N) Q^T`, the coincidence test between
//! rotated slicing sets, secondary levels `x_i^2 - t^2 = c_i^2` and the
//! composite weighting inequality.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math is not in `core` on older toolchains
use num_traits::Float;
use rand::Rng;

use crate::cone::{check_chamber, weight_primary_wedge, WedgePoint};
use crate::dense::Matrix;
use crate::error::{Error, Result};
use crate::random::{descending_pairs, gaussian_skew, rng_from_seed};
use crate::skew::{canonical_decompose, SkewMatrix};

/// `q diag(M(x), N) q^T` with `q` in SO(n), `x` in the open chamber and `|N| < x_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceChart {
    pub q: Matrix,
    pub x: Vec<f64>,
    pub normal: SkewMatrix,
}

impl SliceChart {
    pub fn n(&self) -> usize {
        self.q.rows()
    }

    pub fn r(&self) -> usize {
        self.x.len()
    }

    /// The chart's point in its own frame, `diag(M(x), N)`.
    pub fn local(&self) -> SkewMatrix {
        SkewMatrix::block_diag(&SkewMatrix::block_canonical(2 * self.r(), &self.x), &self.normal)
    }

    pub fn ambient(&self) -> SkewMatrix {
        self.local().conjugate(&self.q)
    }
}

/// Membership of a matrix (already in the chart frame) in `H`: block
/// diagonal, upper block exactly `M(x')` with `x'` in the open chamber, and
/// `|N'| < x'_r`. Entries are compared against `tol * (1 + |h|)`.
pub fn in_primary_set(h: &SkewMatrix, r: usize, tol: f64) -> bool {
    let n = h.dim();
    if 2 * r >= n {
        return false;
    }
    let eps = tol * (1.0 + h.norm());
    let k = 2 * r;
    for i in 0..k {
        for j in i + 1..n {
            let expected_nonzero = i % 2 == 0 && j == i + 1;
            if !expected_nonzero && h.get(i, j).abs() > eps {
                return false;
            }
        }
    }
    let x: Vec<f64> = (0..r).map(|i| h.get(2 * i, 2 * i + 1)).collect();
    let chamber = x.iter().all(|v| *v > eps) && x.windows(2).all(|w| w[0] - w[1] > eps);
    chamber && r > 0 && h.principal_block(k, n - k).norm() < x[r - 1] - eps
}

/// Chart through `m`, if `m` lies in some rotated copy of `H` with margin `tol`.
pub fn slice_decompose(m: &SkewMatrix, r: usize, tol: f64) -> Option<SliceChart> {
    let n = m.dim();
    if r == 0 || 2 * r >= n {
        return None;
    }
    let cf = canonical_decompose(m, 4.0 * f64::EPSILON * n as f64);
    if cf.pairs.len() < r {
        return None;
    }
    let x: Vec<f64> = cf.pairs[..r].to_vec();
    if x[r - 1] <= tol || x.windows(2).any(|w| w[0] - w[1] <= tol) {
        return None;
    }
    let mut q = cf.q;
    if q.determinant() < 0.0 {
        // only a full-rank even block with negative Pfaffian lands here; the
        // reflection stays inside the normal block
        for i in 0..n {
            q[(i, n - 1)] = -q[(i, n - 1)];
        }
    }
    let local = m.conjugate_transpose(&q);
    let normal = local.principal_block(2 * r, n - 2 * r);
    if normal.norm() >= x[r - 1] - tol {
        return None;
    }
    Some(SliceChart { q, x, normal })
}

/// Is `m` in the slicing set `chart.q H chart.q^T`?
pub fn slicing_set_contains(chart: &SliceChart, m: &SkewMatrix, tol: f64) -> bool {
    m.dim() == chart.n() && in_primary_set(&m.conjugate_transpose(&chart.q), chart.r(), tol)
}

/// Random interior point of `H`: pairs in `[0.5, 2]` with gaps of at least
/// `0.05` and `|N|` uniform in `[0, 0.95 x_r)`.
pub fn random_primary_point<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> SkewMatrix {
    let x = descending_pairs(r, 0.5, 2.0, 0.05, rng);
    let dir = gaussian_skew(n - 2 * r, 1.0, rng);
    let norm = dir.norm();
    let size = rng.random_range(0.0..0.95) * x[r - 1];
    let normal = if norm > 0.0 { dir.scale(size / norm) } else { dir };
    SkewMatrix::block_diag(&SkewMatrix::block_canonical(2 * r, &x), &normal)
}

/// Relative tolerance of the sampled coincidence test.
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// Do two charts span the same slicing set? Decided by conjugating `samples`
/// random points of `H` by `q2^T q1` and checking they stay in `H`.
pub fn same_slicing_set(a: &SliceChart, b: &SliceChart, samples: usize, seed: u64) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), found: b.n() });
    }
    if a.r() != b.r() {
        return Err(Error::DimensionMismatch { expected: a.r(), found: b.r() });
    }
    let p = b.q.transpose().matmul(&a.q);
    let mut rng = rng_from_seed(seed);
    for _ in 0..samples.max(1) {
        let h = random_primary_point(a.n(), a.r(), &mut rng);
        if !in_primary_set(&h.conjugate(&p), a.r(), COINCIDENCE_TOL) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distance of `p` from the isotropy group of `M(x)`: the size of the
/// off-diagonal blocks of `p` plus the failure of each diagonal `2 x 2`
/// block to be `+-R(theta)`.
pub fn isotropy_defect(p: &Matrix, r: usize) -> f64 {
    let n = p.rows();
    let mut d2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let bi = if i < 2 * r { i / 2 } else { r };
            let bj = if j < 2 * r { j / 2 } else { r };
            if bi != bj {
                d2 += p[(i, j)] * p[(i, j)];
            }
        }
    }
    for k in 0..r {
        let (a, b, c, d) = (p[(2 * k, 2 * k)], p[(2 * k, 2 * k + 1)], p[(2 * k + 1, 2 * k)], p[(2 * k + 1, 2 * k + 1)]);
        d2 += (a - d) * (a - d) + (b + c) * (b + c);
    }
    d2.sqrt()
}

/// Level labels `c_1 >= ... >= c_r >= 0` of a secondary slicing set; the
/// level values are `h_i = c_i^2 / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondaryLevel {
    pub c: Vec<f64>,
}

impl SecondaryLevel {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.iter().any(|v| !(*v >= 0.0)) || c.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("labels must be nonnegative and nonincreasing"));
        }
        Ok(Self { c })
    }

    pub fn h(&self) -> Vec<f64> {
        self.c.iter().map(|c| 0.5 * c * c).collect()
    }
}

/// `c_i = sqrt(x_i^2 - t^2)`.
pub fn secondary_level(x: &[f64], t: f64) -> Result<SecondaryLevel> {
    if x.iter().any(|v| !(*v > 0.0)) || x.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument("x must be positive and nonincreasing"));
    }
    let radius = x.last().copied().unwrap_or(f64::INFINITY);
    if !(t.abs() < radius) {
        return Err(Error::FocalRadius { t: t.abs(), radius });
    }
    let c = x.iter().map(|xi| ((xi - t) * (xi + t)).sqrt()).collect();
    Ok(SecondaryLevel { c })
}

/// Point of the level set at normal offset `t` in direction `b`: `x_i = sqrt(c_i^2 + t^2)`.
pub fn secondary_point(level: &SecondaryLevel, t: f64, b: &SkewMatrix) -> Result<WedgePoint> {
    if level.c.last().is_none_or(|c| *c <= 0.0) {
        return Err(Error::DegenerateLevel);
    }
    let x = level.c.iter().map(|c| c.hypot(t)).collect();
    WedgePoint::new(x, t, b.clone())
}

/// `1 / (prod x_i * sqrt(1 + t^2 sum 1/x_i^2))`.
pub fn weight_secondary(x: &[f64], t: f64) -> Result<f64> {
    if x.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("x must be positive"));
    }
    let radius = x.iter().copied().fold(f64::INFINITY, f64::min);
    if !(t.abs() < radius) {
        return Err(Error::FocalRadius { t: t.abs(), radius });
    }
    let prod: f64 = x.iter().product();
    let s: f64 = x.iter().map(|v| 1.0 / (v * v)).sum();
    Ok(1.0 / (prod * (t * t).mul_add(s, 1.0).sqrt()))
}

/// Both sides of
/// `prod (c_i^2 + t^2)^(2n-4r-4) >= prod c_i^(2(2n-4r-5)) * prod (c_i^2 + t^2) * (1 + t^2 sum 1/(c_i^2 + t^2))`
/// in logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeInequality {
    pub log_lhs: f64,
    pub log_rhs: f64,
    /// `lhs >= rhs (1 - 1e-10)`.
    pub ok: bool,
}

impl CompositeInequality {
    pub fn lhs(&self) -> f64 {
        self.log_lhs.exp()
    }

    pub fn rhs(&self) -> f64 {
        self.log_rhs.exp()
    }
}

pub fn composite_inequality(n: usize, r: usize, c: &[f64], t: f64) -> Result<CompositeInequality> {
    if c.len() != r {
        return Err(Error::DimensionMismatch { expected: r, found: c.len() });
    }
    if c.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("labels must be positive"));
    }
    let e = 2.0 * n as f64 - 4.0 * r as f64;
    let t2 = t * t;
    let sum_log_x2: f64 = c.iter().map(|ci| ci.mul_add(*ci, t2).ln()).sum();
    let sum_log_c2: f64 = c.iter().map(|ci| 2.0 * ci.ln()).sum();
    let recip: f64 = c.iter().map(|ci| 1.0 / ci.mul_add(*ci, t2)).sum();
    let log_lhs = (e - 4.0) * sum_log_x2;
    let log_rhs = (e - 5.0) * sum_log_c2 + sum_log_x2 + (t2 * recip).ln_1p();
    Ok(CompositeInequality { log_lhs, log_rhs, ok: log_lhs >= log_rhs + (-1e-10f64).ln_1p() })
}

/// Exact `w_1 w_2` at the point of `H_c` with offset `t` along `b`.
pub fn composite_weight(level: &SecondaryLevel, t: f64, b: &SkewMatrix) -> Result<f64> {
    let w = secondary_point(level, t, b)?;
    Ok(weight_primary_wedge(&w)?.exact * weight_secondary(&w.x, t)?)
}

/// `(t, w_1 w_2)` along `grid`, without any regime restriction.
pub fn composite_profile(level: &SecondaryLevel, b: &SkewMatrix, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_chamber(&level.c)?;
    grid.iter().map(|&t| Ok((t, composite_weight(level, t, b)?))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeMinimum {
    /// Grid point of the smallest value; ties within `1e-12` relative go to the smaller `|t|`.
    pub argmin_t: f64,
    pub min_value: f64,
    pub value_at_0: f64,
}

impl CompositeMinimum {
    /// No grid value undercuts the value at `t = 0` (up to `1e-12` relative).
    pub fn attained_at_zero(&self) -> bool {
        self.min_value >= self.value_at_0 * (1.0 - 1e-12)
    }
}

/// Minimum of `w_1 w_2` over `grid` on `H_c`, defined for `n - 2r >= 3`.
pub fn composite_min_check(level: &SecondaryLevel, b: &SkewMatrix, grid: &[f64]) -> Result<CompositeMinimum> {
    let m = b.dim();
    if m < 3 {
        return Err(Error::UnsupportedRegime(m));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("grid must be nonempty"));
    }
    let profile = composite_profile(level, b, grid)?;
    let value_at_0 = composite_weight(level, 0.0, b)?;
    let (mut argmin_t, mut min_value) = profile[0];
    for &(t, v) in &profile[1..] {
        let tie = (v - min_value).abs() <= 1e-12 * min_value;
        if (v < min_value && !tie) || (tie && t.abs() < argmin_t.abs()) {
            argmin_t = t;
            min_value = v;
        }
    }
    Ok(CompositeMinimum { argmin_t, min_value, value_at_0 })
}
