//! Seeded generators: Haar rotations, Gaussian skew matrices and the
//! per-trial RNG derivation used by every Monte-Carlo sweep.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math is not in `core` on older toolchains
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dense::{orthonormalize, Matrix};
use crate::skew::SkewMatrix;

pub type TrialRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `index` under `seed`; results of a sweep do
/// not depend on the order trials are scheduled in.
pub fn trial_rng(seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Haar-distributed element of O(n): Gram-Schmidt on a Gaussian matrix
/// (equivalently QR with a positive diagonal in R).
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let mut cols: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| standard_normal(rng)).collect()).collect();
    orthonormalize(&mut cols);
    let mut q = Matrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        q.set_column(j, c);
    }
    q
}

/// Haar-distributed element of SO(n): a Haar O(n) sample with its first
/// column negated when the determinant is negative.
pub fn haar_special_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let mut q = haar_orthogonal(n, rng);
    if n > 0 && q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

pub fn random_special_orthogonal(n: usize, seed: u64) -> Matrix {
    haar_special_orthogonal(n, &mut rng_from_seed(seed))
}

/// Skew matrix whose strictly-upper entries are i.i.d. `N(0, scale^2)`.
pub fn gaussian_skew<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> SkewMatrix {
    let upper: Vec<f64> = (0..n * n.saturating_sub(1) / 2).map(|_| scale * standard_normal(rng)).collect();
    SkewMatrix::from_upper(n, &upper).expect("length matches")
}

pub fn random_skew(n: usize, seed: u64, scale: f64) -> SkewMatrix {
    gaussian_skew(n, scale, &mut rng_from_seed(seed))
}

/// Uniformly distributed unit-norm skew matrix (`|B|^2 = tr(B B^T)/2 = 1`).
pub fn unit_skew<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SkewMatrix {
    loop {
        let b = gaussian_skew(n, 1.0, rng);
        let norm = b.norm();
        if norm > 1e-8 {
            return b.scale(1.0 / norm);
        }
    }
}

/// Unit-norm skew matrix of rank exactly 2: a rotated `X_12`.
pub fn unit_rank_two_skew<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SkewMatrix {
    let q = haar_special_orthogonal(n, rng);
    SkewMatrix::basis(n, 0, 1).conjugate(&q)
}

/// `r` strictly descending values in `[lo, hi]` whose consecutive gaps are at
/// least `min_gap` (requires `(r - 1) * min_gap < hi - lo`).
pub fn descending_pairs<R: Rng + ?Sized>(r: usize, lo: f64, hi: f64, min_gap: f64, rng: &mut R) -> Vec<f64> {
    assert!(r == 0 || (r as f64 - 1.0) * min_gap < hi - lo, "range too narrow for gaps");
    loop {
        let mut x: Vec<f64> = (0..r).map(|_| rng.random_range(lo..=hi)).collect();
        x.sort_by(|a, b| b.total_cmp(a));
        if x.windows(2).all(|w| w[0] - w[1] >= min_gap) {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_matrices() {
        assert_eq!(random_special_orthogonal(5, 42), random_special_orthogonal(5, 42));
        assert_eq!(random_skew(5, 42, 2.0), random_skew(5, 42, 2.0));
        assert_ne!(random_skew(5, 42, 2.0), random_skew(5, 43, 2.0));
        let a: f64 = standard_normal(&mut trial_rng(1, 3));
        let b: f64 = standard_normal(&mut trial_rng(1, 3));
        let c: f64 = standard_normal(&mut trial_rng(1, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn one_dimensional_rotation_is_one() {
        let q = random_special_orthogonal(1, 0);
        assert_eq!(q, Matrix::identity(1));
    }

    #[test]
    fn special_orthogonal_is_proper() {
        for seed in 0..50 {
            let q = random_special_orthogonal(6, seed);
            assert!(q.orthogonality_defect() < 1e-12);
            assert!((q.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_invariance_statistic() {
        // Entries of Q X_12 Q^T have mean zero under Haar Q.
        let n = 4;
        let samples = 10_000;
        let mut rng = rng_from_seed(2024);
        let mut sums = [0.0f64; 6];
        let mut sq = [0.0f64; 6];
        for _ in 0..samples {
            let q = haar_special_orthogonal(n, &mut rng);
            let m = SkewMatrix::basis(n, 0, 1).conjugate(&q);
            for (k, v) in m.upper().iter().enumerate() {
                sums[k] += v;
                sq[k] += v * v;
            }
        }
        for k in 0..6 {
            let mean = sums[k] / samples as f64;
            let var = sq[k] / samples as f64 - mean * mean;
            let stderr = (var / samples as f64).sqrt();
            assert!(mean.abs() < 3.0 * stderr, "entry {k}: mean {mean} stderr {stderr}");
        }
    }

    #[test]
    fn descending_pairs_respect_gap() {
        let mut rng = rng_from_seed(5);
        for _ in 0..100 {
            let x = descending_pairs(4, 0.5, 2.0, 0.05, &mut rng);
            assert!(x.windows(2).all(|w| w[0] - w[1] >= 0.05));
            assert!(x.iter().all(|v| (0.5..=2.0).contains(v)));
        }
    }
}
