//! Metric geometry of `C(n, 2r)` at regular points `M(x)`.
//!
//! The tangent space at `M(x) = sum x_i X_{2i,2i+1}` is spanned by three
//! groups of basis matrices, always in this order:
//!
//! 1. `X_{2i,2i+1}` for `i < r` (tangent to the slice through `M(x)`);
//! 2. `X_{a,b}` with `a < b < 2r`, not one of the pairs above, lexicographic;
//! 3. `X_{a,h}` with `a < 2r <= h`, lexicographic.
//!
//! The normal space is the lower-right `(n-2r)`-block.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math is not in `core` on older toolchains
use num_traits::Float;
use rand::Rng;

use crate::dense::{expm, singular_values, symmetric_eigen, Lu, Matrix};
use crate::error::{Error, Result};
use crate::random::{haar_orthogonal, haar_special_orthogonal};
use crate::skew::SkewMatrix;
use crate::variety::{project, VarietySpec};

/// Requires `x_1 > x_2 > ... > x_r > 0`, all finite.
pub fn check_chamber(x: &[f64]) -> Result<()> {
    let positive = x.iter().all(|v| v.is_finite() && *v > 0.0);
    if !positive || x.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::OutsideOrbitSpace);
    }
    Ok(())
}

/// `x` has length `r` and lies in the chamber; `2r <= n`.
fn check_len(n: usize, r: usize, x: &[f64]) -> Result<()> {
    if n < 2 || 2 * r > n {
        return Err(Error::InvalidSpec { n, r });
    }
    if x.len() != r {
        return Err(Error::DimensionMismatch { expected: r, found: x.len() });
    }
    check_chamber(x)
}

/// Ordered tangent basis at a regular point, as `(row, col)` labels of `X_{row,col}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentBasis {
    pub labels: Vec<(usize, usize)>,
    /// Sizes of the three groups: `r`, `4 C(r,2)`, `2r(n-2r)`.
    pub group_sizes: [usize; 3],
}

impl TangentBasis {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, label: (usize, usize)) -> Option<usize> {
        let label = if label.0 > label.1 { (label.1, label.0) } else { label };
        self.labels.iter().position(|&l| l == label)
    }
}

pub fn tangent_basis(n: usize, r: usize) -> TangentBasis {
    let mut labels: Vec<(usize, usize)> = (0..r).map(|i| (2 * i, 2 * i + 1)).collect();
    let first = labels.len();
    for a in 0..2 * r {
        for b in a + 1..2 * r {
            if !(a % 2 == 0 && b == a + 1) {
                labels.push((a, b));
            }
        }
    }
    let second = labels.len() - first;
    for a in 0..2 * r {
        for h in 2 * r..n {
            labels.push((a, h));
        }
    }
    let third = labels.len() - first - second;
    TangentBasis { labels, group_sizes: [first, second, third] }
}

/// Closed form `prod_{i<j} (x_i^2 - x_j^2)^2 * prod x_i^(2(n-2r))`.
///
/// Accepts `2r <= n`, so `r = floor(n/2)` (the whole space) is allowed.
pub fn weight_primary(n: usize, r: usize, x: &[f64]) -> Result<f64> {
    check_len(n, r, x)?;
    let e = 2 * (n - 2 * r) as i32;
    let mut w = 1.0;
    for (i, xi) in x.iter().enumerate() {
        for xj in &x[i + 1..] {
            let d = xi * xi - xj * xj;
            w *= d * d;
        }
        w *= xi.powi(e);
    }
    Ok(w)
}

/// Derivatives of `F(s, t) = P(s) M(x + t) P(s)^T`, `P(s) = exp(sum s_ab X_ab)`,
/// at `s = t = 0`, one per tangent-basis label (`t_i` for group 1, `s_ab`
/// otherwise), as matrices. Central differences with one Richardson step.
fn parametrization_derivatives(n: usize, r: usize, x: &[f64], step: f64) -> Result<Vec<SkewMatrix>> {
    check_len(n, r, x)?;
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("step must be positive"));
    }
    let h = step * x.first().copied().unwrap_or(1.0).max(1.0);
    let basis = tangent_basis(n, r);
    let f = |index: usize, label: (usize, usize), s: f64| -> SkewMatrix {
        if index < r {
            let mut y = x.to_vec();
            y[index] += s;
            SkewMatrix::block_canonical(n, &y)
        } else {
            let p = expm(SkewMatrix::basis(n, label.0, label.1).scale(s).as_matrix());
            SkewMatrix::block_canonical(n, x).conjugate(&p)
        }
    };
    let central =
        |index: usize, label: (usize, usize), s: f64| -> SkewMatrix { f(index, label, s).sub(&f(index, label, -s)).scale(0.5 / s) };
    Ok(basis
        .labels
        .iter()
        .enumerate()
        .map(|(index, &label)| {
            let coarse = central(index, label, h);
            let fine = central(index, label, 0.5 * h);
            fine.scale(4.0 / 3.0).sub(&coarse.scale(1.0 / 3.0))
        })
        .collect())
}

/// `DF` in tangent-basis coordinates: entry `(p, c)` is the coordinate along
/// basis label `c` of the derivative in parameter `p`.
pub fn parametrization_jacobian(n: usize, r: usize, x: &[f64], step: f64) -> Result<Matrix> {
    let derivs = parametrization_derivatives(n, r, x, step)?;
    let basis = tangent_basis(n, r);
    Ok(Matrix::from_fn(derivs.len(), basis.len(), |p, c| {
        let (i, j) = basis.labels[c];
        derivs[p].get(i, j)
    }))
}

fn gram_root(columns: &[Vec<f64>]) -> f64 {
    let g = Matrix::from_fn(columns.len(), columns.len(), |a, b| columns[a].iter().zip(&columns[b]).map(|(u, v)| u * v).sum());
    g.determinant().abs().sqrt()
}

/// Finite-difference value of the primary weighting function: the Gram
/// Jacobian of the full parametrization over that of its slice directions.
pub fn weight_primary_numeric(n: usize, r: usize, x: &[f64], step: f64) -> Result<f64> {
    let derivs = parametrization_derivatives(n, r, x, step)?;
    let columns: Vec<Vec<f64>> = derivs.iter().map(SkewMatrix::upper).collect();
    let full = gram_root(&columns);
    let slice = gram_root(&columns[..r]);
    Ok(full / slice)
}

/// Rank of the Jacobian of `(S, y) -> exp(S) Q M(y) Q^T exp(S)^T` over all
/// `n(n-1)/2` rotation generators and `r` slice parameters, at `y = x`.
pub fn orbit_jacobian_rank(spec: VarietySpec, x: &[f64], q: &Matrix, step: f64) -> Result<usize> {
    let n = spec.n();
    check_len(n, spec.r(), x)?;
    let base = SkewMatrix::block_canonical(n, x).conjugate(q);
    let mut columns = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let gen = SkewMatrix::basis(n, i, j);
            let plus = base.conjugate(&expm(gen.scale(step).as_matrix()));
            let minus = base.conjugate(&expm(gen.scale(-step).as_matrix()));
            columns.push(plus.sub(&minus).scale(0.5 / step).upper());
        }
    }
    for i in 0..spec.r() {
        let mut y = x.to_vec();
        y[i] += step;
        let plus = SkewMatrix::block_canonical(n, &y).conjugate(q);
        y[i] -= 2.0 * step;
        let minus = SkewMatrix::block_canonical(n, &y).conjugate(q);
        columns.push(plus.sub(&minus).scale(0.5 / step).upper());
    }
    let rows = spec.ambient_dimension();
    let jac = Matrix::from_fn(rows, columns.len(), |a, b| columns[b][a]);
    let sv = singular_values(&jac);
    let top = sv.first().copied().unwrap_or(0.0);
    Ok(sv.iter().filter(|s| **s > 1e-7 * top).count())
}

/// A point `M(x) + t v` of a primary slice, `v = diag(0, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgePoint {
    pub x: Vec<f64>,
    pub t: f64,
    pub b: SkewMatrix,
}

/// Allowed deviation of `|b|` from 1.
pub const UNIT_TOL: f64 = 1e-9;

impl WedgePoint {
    pub fn new(x: Vec<f64>, t: f64, b: SkewMatrix) -> Result<Self> {
        check_chamber(&x)?;
        if x.is_empty() {
            return Err(Error::InvalidArgument("a wedge point needs r >= 1"));
        }
        if b.dim() < 2 {
            return Err(Error::InvalidArgument("normal block must be at least 2 x 2"));
        }
        if (b.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument("normal block must have unit norm"));
        }
        let radius = x[x.len() - 1];
        if !(t.abs() < radius) {
            return Err(Error::FocalRadius { t: t.abs(), radius });
        }
        Ok(Self { x, t, b })
    }

    /// Random point: pairs in `[0.5, 2]` with gaps of at least `0.05`,
    /// `b` Gaussian unit, `|t| < x_r` uniform.
    pub fn random<R: Rng + ?Sized>(spec: VarietySpec, rng: &mut R) -> Self {
        let r = spec.r().max(1);
        let x = crate::random::descending_pairs(r, 0.5, 2.0, 0.05, rng);
        let b = crate::random::unit_skew(spec.n() - 2 * r, rng);
        let t = x[r - 1] * rng.random_range(-0.999..0.999);
        Self { x, t, b }
    }

    pub fn r(&self) -> usize {
        self.x.len()
    }

    pub fn n(&self) -> usize {
        2 * self.x.len() + self.b.dim()
    }

    pub fn spec(&self) -> VarietySpec {
        VarietySpec::new(self.n(), self.r()).expect("b has size at least 2")
    }

    pub fn ambient(&self) -> SkewMatrix {
        let upper = SkewMatrix::block_canonical(2 * self.r(), &self.x);
        SkewMatrix::block_diag(&upper, &self.b.scale(self.t))
    }
}

/// Shape operator `A_v` at `M(x)` in the direction `v = diag(0, b)`.
#[derive(Debug, Clone)]
pub struct ShapeOperator {
    pub basis: TangentBasis,
    pub matrix: Matrix,
}

impl ShapeOperator {
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// `det(I - t A_v)`.
    pub fn focal_determinant(&self, t: f64) -> f64 {
        Matrix::identity(self.matrix.rows()).sub(&self.matrix.scale(t)).determinant()
    }
}

/// Block form `diag(0, L_1, ..., L_r)`, `L_i = [[0, b^T/x_i], [b/x_i, 0]]` on the
/// group-3 vectors `X_{2i,*}`, `X_{2i+1,*}`.
pub fn shape_operator(x: &[f64], b: &SkewMatrix) -> Result<ShapeOperator> {
    check_chamber(x)?;
    let r = x.len();
    let m = b.dim();
    let basis = tangent_basis(2 * r + m, r);
    let dim = basis.len();
    let offset = basis.group_sizes[0] + basis.group_sizes[1];
    let mut a = Matrix::zeros(dim, dim);
    for (i, xi) in x.iter().enumerate() {
        let top = offset + 2 * i * m;
        let bottom = top + m;
        for h in 0..m {
            for l in 0..m {
                a[(top + h, bottom + l)] = b.get(l, h) / xi;
                a[(bottom + l, top + h)] = b.get(l, h) / xi;
            }
        }
    }
    Ok(ShapeOperator { basis, matrix: a })
}

/// Second fundamental form `B(X_u, X_w)` at `M(x)` by mixed central
/// differences of `(y1, y2) -> project(M(x) + y1 X_u + y2 X_w)`, as the
/// lower-right `(n-2r)` block.
///
/// Sign convention: `B = -(mixed derivative)^normal`, the one under which
/// `<B(u, w), v> = <A_v u, w>` for [`shape_operator`].
pub fn second_fundamental_numeric(x: &[f64], n: usize, u: (usize, usize), w: (usize, usize), step: f64) -> Result<SkewMatrix> {
    let spec = VarietySpec::new(n, x.len())?;
    check_len(n, spec.r(), x)?;
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("step must be positive"));
    }
    let basis = tangent_basis(n, spec.r());
    let (pu, pw) = match (basis.position(u), basis.position(w)) {
        (Some(a), Some(b)) => (basis.labels[a], basis.labels[b]),
        _ => return Err(Error::InvalidArgument("labels must belong to the tangent basis")),
    };
    let m0 = SkewMatrix::block_canonical(n, x);
    let xu = SkewMatrix::basis(n, pu.0, pu.1);
    let xw = SkewMatrix::basis(n, pw.0, pw.1);
    let f = |y1: f64, y2: f64| -> Result<SkewMatrix> {
        let p = m0.add(&xu.scale(y1)).add(&xw.scale(y2));
        Ok(project(spec, &p)?.matrix)
    };
    let mixed = |h: f64| -> Result<SkewMatrix> {
        let s = f(h, h)?.sub(&f(h, -h)?).sub(&f(-h, h)?).add(&f(-h, -h)?);
        Ok(s.scale(0.25 / (h * h)))
    };
    let h = step * x[0].max(1.0);
    let coarse = mixed(h)?;
    let fine = mixed(0.5 * h)?;
    let d2 = fine.scale(4.0 / 3.0).sub(&coarse.scale(1.0 / 3.0));
    let k = 2 * spec.r();
    Ok(d2.principal_block(k, n - k).scale(-1.0))
}

/// `prod_i det(I - (t/x_i)^2 b b^T)`, with no focal-radius check.
pub fn wedge_product(x: &[f64], t: f64, b: &SkewMatrix) -> f64 {
    let bbt = b.as_matrix().matmul(&b.as_matrix().transpose());
    let id = Matrix::identity(b.dim());
    x.iter().map(|xi| id.sub(&bbt.scale(t * t / (xi * xi))).determinant()).product()
}

/// `det(I - t A_v)` at a wedge point, through the product formula.
pub fn wedge_determinant(w: &WedgePoint) -> f64 {
    wedge_product(&w.x, w.t, &w.b)
}

/// Window for the equality-case classifiers.
pub const EQUALITY_WINDOW: f64 = 1e-6;

/// Spectrum (descending) within [`EQUALITY_WINDOW`] of `(1, 1, 0, ..., 0)`.
fn is_unit_pair_spectrum(values: &[f64]) -> bool {
    values.iter().enumerate().all(|(i, v)| {
        let target = if i < 2 { 1.0 } else { 0.0 };
        (v - target).abs() <= EQUALITY_WINDOW
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma47Outcome {
    /// `det(I - tau S)`.
    pub lhs: f64,
    /// `(1 - tau)^2`.
    pub rhs: f64,
    pub ok: bool,
    /// `tau` or the spectrum lies in the equality window.
    pub equality_case: bool,
}

impl Lemma47Outcome {
    pub fn defect(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// `det(I - tau S) >= (1 - tau)^2` for positive semidefinite `S` with trace 2
/// and paired eigenvalues (an odd size allows one extra zero), `0 <= tau <= 1/lambda_max`.
pub fn lemma47_check(s: &Matrix, tau: f64) -> Result<Lemma47Outcome> {
    if !s.is_square() || s.rows() < 2 {
        return Err(Error::InvalidArgument("matrix must be square of size at least 2"));
    }
    let scale = 1.0 + s.max_abs();
    if s.sub(&s.transpose()).max_abs() > 1e-12 * scale {
        return Err(Error::InvalidArgument("matrix must be symmetric"));
    }
    if (s.trace() - 2.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("trace must be 2"));
    }
    let values = symmetric_eigen(s).values;
    if values[values.len() - 1] < -1e-10 {
        return Err(Error::InvalidArgument("matrix must be positive semidefinite"));
    }
    let paired = values.chunks(2).all(|c| match c {
        [a, b] => (a - b).abs() <= 1e-8 * scale,
        [a] => a.abs() <= 1e-8 * scale,
        _ => unreachable!(),
    });
    if !paired {
        return Err(Error::InvalidArgument("eigenvalues must come in equal pairs"));
    }
    if !(tau >= 0.0) || tau * values[0] > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument("tau must lie in [0, 1/lambda_max]"));
    }
    let lhs = Matrix::identity(s.rows()).sub(&s.scale(tau)).determinant();
    let rhs = (1.0 - tau) * (1.0 - tau);
    Ok(Lemma47Outcome { lhs, rhs, ok: lhs >= rhs - 1e-12, equality_case: tau < EQUALITY_WINDOW || is_unit_pair_spectrum(&values) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeWeight {
    /// `w_1(x) det(I - t A_v)`.
    pub exact: f64,
    /// `prod_{i<j} (x_i^2 - x_j^2)^2 prod x_i^(2(n-2-2r)) prod (x_i^2 - t^2)^2`.
    pub lower_bound: f64,
    /// `t` or the singular values of `b` lie in the equality window.
    pub equality_case: bool,
}

/// Primary weighting function at a wedge point, with its lower bound.
pub fn weight_primary_wedge(w: &WedgePoint) -> Result<WedgeWeight> {
    let spec = w.spec();
    let exact = weight_primary(spec.n(), spec.r(), &w.x)? * wedge_determinant(w);
    let e = 2 * (spec.normal_size() as i32 - 2);
    let t2 = w.t * w.t;
    let mut lower = 1.0;
    for (i, xi) in w.x.iter().enumerate() {
        for xj in &w.x[i + 1..] {
            let d = xi * xi - xj * xj;
            lower *= d * d;
        }
        let f = xi * xi - t2;
        lower *= xi.powi(e) * f * f;
    }
    let bbt = w.b.as_matrix().matmul(&w.b.as_matrix().transpose());
    // singular values of b, so the window is not squared away on the zero block
    let values: Vec<f64> = symmetric_eigen(&bbt).values.iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok(WedgeWeight {
        exact,
        lower_bound: lower,
        equality_case: w.t.abs() < EQUALITY_WINDOW * w.x[w.r() - 1] || is_unit_pair_spectrum(&values),
    })
}

/// An element `diag(eps_1 R(theta_1), ..., eps_r R(theta_r), S)` of the
/// isotropy group of `M(x)`, with scalar signs `eps_i` and `S` orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Isotropy {
    pub theta: Vec<f64>,
    pub eps: Vec<f64>,
    pub s: Matrix,
}

impl Isotropy {
    /// Requires `eps_i = +-1`, `S` orthogonal and `prod eps_i * det S = 1`.
    pub fn new(theta: Vec<f64>, eps: Vec<f64>, s: Matrix) -> Result<Self> {
        if theta.len() != eps.len() {
            return Err(Error::DimensionMismatch { expected: theta.len(), found: eps.len() });
        }
        if eps.iter().any(|e| *e != 1.0 && *e != -1.0) {
            return Err(Error::NotIsotropy("signs must be +1 or -1"));
        }
        if !s.is_square() || s.orthogonality_defect() > 1e-9 {
            return Err(Error::NotIsotropy("normal factor must be orthogonal"));
        }
        let sign: f64 = eps.iter().product();
        if (sign * s.determinant() - 1.0).abs() > 1e-9 {
            return Err(Error::NotIsotropy("product of signs times det S must be 1"));
        }
        Ok(Self { theta, eps, s })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Self {
        let theta: Vec<f64> = (0..r).map(|_| rng.random_range(-core::f64::consts::PI..core::f64::consts::PI)).collect();
        let eps: Vec<f64> = (0..r).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let mut s = haar_orthogonal(n - 2 * r, rng);
        let sign: f64 = eps.iter().product();
        if s.determinant() * sign < 0.0 {
            for i in 0..s.rows() {
                s[(i, 0)] = -s[(i, 0)];
            }
        }
        Self { theta, eps, s }
    }

    /// Uniform element of the identity component (all `eps = 1`, `S` in SO).
    pub fn random_proper<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Self {
        let theta = (0..r).map(|_| rng.random_range(-core::f64::consts::PI..core::f64::consts::PI)).collect();
        Self { theta, eps: vec![1.0; r], s: haar_special_orthogonal(n - 2 * r, rng) }
    }

    pub fn n(&self) -> usize {
        2 * self.theta.len() + self.s.rows()
    }

    pub fn matrix(&self) -> Matrix {
        let n = self.n();
        let mut p = Matrix::zeros(n, n);
        for (i, (th, e)) in self.theta.iter().zip(&self.eps).enumerate() {
            let (s, c) = th.sin_cos();
            let k = 2 * i;
            p[(k, k)] = e * c;
            p[(k, k + 1)] = -e * s;
            p[(k + 1, k)] = e * s;
            p[(k + 1, k + 1)] = e * c;
        }
        p.set_block(2 * self.theta.len(), 2 * self.theta.len(), &self.s);
        p
    }
}

/// Determinant of `u -> P u P^T` on the ordered tangent basis at `M(x)`.
pub fn orientability_action(x: &[f64], iso: &Isotropy) -> Result<f64> {
    check_chamber(x)?;
    let iso = Isotropy::new(iso.theta.clone(), iso.eps.clone(), iso.s.clone())?;
    if iso.theta.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: iso.theta.len() });
    }
    let n = iso.n();
    let p = iso.matrix();
    let basis = tangent_basis(n, x.len());
    let images: Vec<SkewMatrix> = basis.labels.iter().map(|&(i, j)| SkewMatrix::basis(n, i, j).conjugate(&p)).collect();
    let action = Matrix::from_fn(basis.len(), basis.len(), |a, b| {
        let (i, j) = basis.labels[a];
        images[b].get(i, j)
    });
    Ok(Lu::factor(&action).map_or(0.0, |lu| lu.determinant()))
}
