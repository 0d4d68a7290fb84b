//! Numerics for Pfaffian varieties `C(n, 2r)`, the cones of real `n x n`
//! skew-symmetric matrices of rank at most `2r`.
//!
//! The crate is `no_std` (it needs `alloc`) and covers:
//!
//! - [`skew`]: the skew matrix type, Pfaffians (exhaustive expansion and an
//!   `O(n^3)` Householder route), the orthogonal canonical form and skew SVD;
//! - [`variety`]: membership by rank and by principal Pfaffians, nearest-point
//!   projection, distance, dimension and rank strata;
//! - [`cone`]: weighting functions, shape operator, second fundamental form,
//!   normal-wedge determinants and the orientability action;
//! - [`slicing`]: primary slice charts, the coincidence test, secondary
//!   levels and the composite weighting inequality;
//! - [`tangent`]: tangent-cone membership, the approach curve, order fits and
//!   Weyl bounds;
//! - [`random`]: seeded Haar rotations and Gaussian skew ensembles.
//!
//! All matrix indices are 0-based: `X_{2i-1,2i}` in 1-based notation is
//! `SkewMatrix::basis(n, 2i - 2, 2i - 1)` here.

#![no_std]

extern crate alloc;

pub mod cone;
pub mod dense;
pub mod error;
pub mod random;
pub mod skew;
pub mod slicing;
pub mod tangent;
pub mod variety;

pub use error::{Error, Result};
pub use skew::{CanonicalForm, SkewMatrix, SkewSvd};
pub use variety::VarietySpec;
