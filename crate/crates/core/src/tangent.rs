//! Tangent cones of `C(n, 2r)` at a point `M0` of rank `2k`.
//!
//! In the canonical frame of `M0` a direction splits as
//! `V = [[A, B], [-B^T, D]]` with `A` of size `2k`; `V` is tangent iff
//! `rank D <= 2r - 2k`.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math is not in `core` on older toolchains
use num_traits::Float;

use crate::dense::{linear_fit, singular_values, symmetric_eigen, Lu, Matrix};
use crate::error::{Error, Result};
use crate::skew::{all_pairs, canonical_decompose, CanonicalForm, SkewMatrix};
use crate::variety::{distance, VarietySpec};

/// Relative threshold used to read off the rank of the base point.
pub const BASE_RANK_TOL: f64 = 1e-9;

/// A base point on the variety, a direction, and the direction's blocks in
/// the base point's canonical frame.
#[derive(Debug, Clone)]
pub struct TangentQuery {
    pub spec: VarietySpec,
    pub base: SkewMatrix,
    pub canonical: CanonicalForm,
    pub direction: SkewMatrix,
    /// Upper-left `2k x 2k` block of `q^T M0 q`, `M(x_1, ..., x_k)`.
    pub m: SkewMatrix,
    pub a: SkewMatrix,
    /// `2k x (n - 2k)`.
    pub b: Matrix,
    pub d: SkewMatrix,
}

impl TangentQuery {
    pub fn new(spec: VarietySpec, base: SkewMatrix, direction: SkewMatrix) -> Result<Self> {
        let n = spec.n();
        for m in [&base, &direction] {
            if m.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
            }
        }
        let canonical = canonical_decompose(&base, BASE_RANK_TOL);
        if canonical.rank2k > 2 * spec.r() {
            return Err(Error::OffVariety { rank: canonical.rank2k, max_rank: 2 * spec.r() });
        }
        let k2 = canonical.rank2k;
        let local = direction.conjugate_transpose(&canonical.q);
        let m = SkewMatrix::block_canonical(k2, &canonical.pairs);
        let a = local.principal_block(0, k2);
        let b = local.as_matrix().block(0, k2, k2, n - k2);
        let d = local.principal_block(k2, n - k2);
        Ok(Self { spec, base, canonical, direction, m, a, b, d })
    }

    pub fn k(&self) -> usize {
        self.canonical.rank2k / 2
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    /// Pairs of `D`, descending.
    pub fn d_pairs(&self) -> Vec<f64> {
        all_pairs(&self.d)
    }
}

/// `rank D <= 2r - 2k`, with pairs of `D` counted above `tol * |V|`.
pub fn tangent_membership(q: &TangentQuery, tol: f64) -> bool {
    let cutoff = tol * q.direction.norm();
    let rank_pairs = q.d_pairs().iter().filter(|p| **p > cutoff).count();
    rank_pairs <= q.spec.r() - q.k()
}

/// `Tan(C(n, 2r), M0) = C(n - 2k, 2r - 2k) x R^euclidean_dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TangentFactorization {
    pub cross_section: VarietySpec,
    pub euclidean_dim: usize,
}

impl TangentFactorization {
    pub fn dimension(&self) -> usize {
        self.cross_section.dimension() + self.euclidean_dim
    }
}

pub fn factorize_tangent_cone(n: usize, r: usize, k: usize) -> Result<TangentFactorization> {
    VarietySpec::new(n, r)?;
    if k > r {
        return Err(Error::InvalidArgument("base rank 2k exceeds 2r"));
    }
    Ok(TangentFactorization { cross_section: VarietySpec::new(n - 2 * k, r - k)?, euclidean_dim: k * (2 * n - 2 * k - 1) })
}

fn factor_upper(q: &TangentQuery, t: f64) -> Result<(Matrix, Option<Lu>)> {
    let upper = q.m.add(&q.a.scale(t)).into_matrix();
    if upper.rows() == 0 {
        return Ok((upper, None));
    }
    match Lu::factor(&upper) {
        Some(lu) if lu.pivot_ratio() > 1e-12 => Ok((upper, Some(lu))),
        _ => Err(Error::SingularStep(t)),
    }
}

/// `q [[M + tA, tB], [-tB^T, tD - t^2 B^T (M + tA)^{-1} B]] q^T`: its Schur
/// complement is `tD`, so it stays on the variety whenever `V` is tangent.
pub fn approach_curve(q: &TangentQuery, t: f64) -> Result<SkewMatrix> {
    let n = q.n();
    let k2 = 2 * q.k();
    let (upper, lu) = factor_upper(q, t)?;
    let mut x = Matrix::zeros(n, n);
    x.set_block(0, 0, &upper);
    let tb = q.b.scale(t);
    x.set_block(0, k2, &tb);
    x.set_block(k2, 0, &tb.transpose().scale(-1.0));
    let mut lower = q.d.as_matrix().scale(t);
    if let Some(lu) = lu {
        let correction = q.b.transpose().matmul(&lu.solve_matrix(&q.b));
        lower = lower.sub(&correction.scale(t * t));
    }
    x.set_block(k2, k2, &lower);
    Ok(SkewMatrix::skew_part(&x).conjugate(&q.canonical.q))
}

/// Block normal form `N_t = diag(M + tA, tD)` (canonical frame), reached from
/// the approach curve by block elimination.
pub fn block_normal_form(q: &TangentQuery, t: f64) -> SkewMatrix {
    let upper = q.m.add(&q.a.scale(t));
    SkewMatrix::block_diag(&upper, &q.d.scale(t))
}

/// `|approach_curve(t) - M0 - tV|`.
pub fn approach_residual(q: &TangentQuery, t: f64) -> Result<f64> {
    let x = approach_curve(q, t)?;
    Ok(x.sub(&q.base).sub(&q.direction.scale(t)).norm())
}

/// `Dist(M0 + tV, C(n, 2r))`.
pub fn secant_distance(q: &TangentQuery, t: f64) -> f64 {
    distance(q.spec, &q.base.add(&q.direction.scale(t))).expect("dimensions checked")
}

/// Log-log fit of a distance-like quantity against `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    /// Tangent directions fit the approach-curve residual (slope near 2);
    /// other directions fit the secant distance (slope near 1).
    pub member: bool,
    pub slope: f64,
    /// `exp(intercept)`: the measured constant in `value ~ constant * t^slope`.
    pub constant: f64,
    pub points: usize,
}

/// Fits over `t_grid`; points with zero or non-finite values, or where
/// `M + tA` is singular, are skipped.
pub fn order_fit(q: &TangentQuery, t_grid: &[f64], tol: f64) -> Result<OrderFit> {
    let member = tangent_membership(q, tol);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &t in t_grid {
        if !(t > 0.0) {
            continue;
        }
        let value = if member { approach_residual(q, t).ok() } else { Some(secant_distance(q, t)) };
        if let Some(v) = value.filter(|v| v.is_finite() && *v > 0.0) {
            xs.push(t.ln());
            ys.push(v.ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::DegenerateFit(xs.len()));
    }
    let (slope, intercept) = linear_fit(&xs, &ys).ok_or(Error::DegenerateFit(xs.len()))?;
    Ok(OrderFit { member, slope, constant: intercept.exp(), points: xs.len() })
}

/// `t sqrt(sum_{i > r-k} lambda_i^2)` over the pairs `lambda` of `D`: the
/// distance of `N_t` from the variety once the spectra separate.
pub fn distance_lower_bound(q: &TangentQuery, t: f64) -> f64 {
    let skip = q.spec.r() - q.k();
    t * q.d_pairs().iter().skip(skip).map(|l| l * l).sum::<f64>().sqrt()
}

fn spectral_norm(a: &Matrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Largest `t0` such that `x_k^2 - t sigma_0 - t^2 (|AA^T| + lambda_1^2) > 0` on
/// `(0, t0)`; below it the top `2k` singular values of `N_t` exceed `t lambda_1`.
/// Infinite when `k = 0`.
pub fn separation_threshold(q: &TangentQuery) -> f64 {
    if q.k() == 0 {
        return f64::INFINITY;
    }
    let m = q.m.as_matrix();
    let a = q.a.as_matrix();
    let cross = a.matmul(&m.transpose()).add(&m.matmul(&a.transpose()));
    let sigma0 = spectral_norm(&cross);
    let lambda1 = q.d_pairs().first().copied().unwrap_or(0.0);
    let quad = spectral_norm(&a.matmul(&a.transpose())) + lambda1 * lambda1;
    let xk = q.canonical.pairs[q.k() - 1];
    let c = xk * xk;
    if quad == 0.0 {
        return if sigma0 == 0.0 { f64::INFINITY } else { c / sigma0 };
    }
    // stable positive root of quad t^2 + sigma0 t - c
    2.0 * c / (sigma0 + (sigma0 * sigma0 + 4.0 * quad * c).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylCheck {
    /// Largest singular value of `AM^T + MA^T + tAA^T`.
    pub sigma: f64,
    /// Eigenvalues of `(M + tA)(M + tA)^T`, descending.
    pub mu: Vec<f64>,
    /// Each pair `mu_{2i-1}, mu_{2i}` lies in `[x_i^2 - t sigma, x_i^2 + t sigma]`.
    pub intervals_hold: bool,
    /// `sqrt(mu_{2k}) > t lambda_1`.
    pub separated: bool,
}

pub fn weyl_bounds_check(q: &TangentQuery, t: f64) -> WeylCheck {
    let k = q.k();
    let m = q.m.as_matrix();
    let a = q.a.as_matrix();
    let aat = a.matmul(&a.transpose());
    let e = a.matmul(&m.transpose()).add(&m.matmul(&a.transpose())).add(&aat.scale(t));
    let sigma = spectral_norm(&e);
    let shifted = q.m.add(&q.a.scale(t));
    let u = shifted.as_matrix().matmul(&shifted.as_matrix().transpose());
    let mu = symmetric_eigen(&u).values;
    let x1 = q.canonical.pairs.first().copied().unwrap_or(0.0);
    let slack = 64.0 * f64::EPSILON * (x1 * x1 + t * sigma);
    let intervals_hold = (0..k).all(|i| {
        let x2 = q.canonical.pairs[i] * q.canonical.pairs[i];
        let radius = t * sigma + slack;
        (mu[2 * i] - x2).abs() <= radius && (mu[2 * i + 1] - x2).abs() <= radius
    });
    let lambda1 = q.d_pairs().first().copied().unwrap_or(0.0);
    let separated = k == 0 || mu[2 * k - 1].max(0.0).sqrt() > t * lambda1;
    WeylCheck { sigma, mu, intervals_hold, separated }
}

/// Rank classification of a point of `C(n, 2r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NearlyRegular {
    /// Rank exactly `2r - 2`.
    pub nearly_regular: bool,
    /// Nearly regular on a hypersurface (`n - 2r = 2`): the tangent cone is
    /// `C(4, 2) x R^m`, whose cross-section is not area-minimizing.
    pub non_minimizing_cone: bool,
    pub tangent: TangentFactorization,
}

pub fn nearly_regular_flag(m: &SkewMatrix, spec: VarietySpec, tol: f64) -> Result<NearlyRegular> {
    if m.dim() != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), found: m.dim() });
    }
    let rank = canonical_decompose(m, tol).rank2k;
    if rank > 2 * spec.r() {
        return Err(Error::OffVariety { rank, max_rank: 2 * spec.r() });
    }
    let nearly_regular = spec.r() >= 1 && rank == 2 * spec.r() - 2;
    Ok(NearlyRegular {
        nearly_regular,
        non_minimizing_cone: nearly_regular && spec.is_hypersurface(),
        tangent: factorize_tangent_cone(spec.n(), spec.r(), rank / 2)?,
    })
}
