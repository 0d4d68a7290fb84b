//! Property tests for the invariants of the core modules. Matrices are drawn
//! from seeded ensembles so failures shrink to a reproducible seed.

use pfaffian_core::cone::{
    lemma47_check, orientability_action, shape_operator, wedge_determinant, weight_primary, weight_primary_wedge, Isotropy, WedgePoint,
};
use pfaffian_core::dense::Matrix;
use pfaffian_core::random::{descending_pairs, gaussian_skew, haar_special_orthogonal, rng_from_seed, unit_skew};
use pfaffian_core::skew::{canonical_decompose, pfaffian_expand, pfaffian_fast};
use pfaffian_core::slicing::{
    composite_inequality, random_primary_point, secondary_level, secondary_point, slice_decompose, SecondaryLevel,
};
use pfaffian_core::tangent::{separation_threshold, weyl_bounds_check, TangentQuery};
use pfaffian_core::variety::{contains_pfaffian, contains_rank, distance, project};
use pfaffian_core::{SkewMatrix, VarietySpec};
use proptest::prelude::*;

fn grid_spec() -> impl Strategy<Value = VarietySpec> {
    prop::sample::select(vec![(4, 1), (5, 1), (6, 2), (7, 2), (8, 3), (9, 3), (10, 4), (7, 1), (8, 1)])
        .prop_map(|(n, r)| VarietySpec::new(n, r).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pfaffian_squares_to_determinant(n in 2usize..=12, seed in any::<u64>()) {
        let m = gaussian_skew(n, 1.0, &mut rng_from_seed(seed));
        let pf = pfaffian_fast(&m);
        let det = m.determinant();
        if n % 2 == 1 {
            // det vanishes only up to rounding; measure it against Hadamard's bound
            let hadamard: f64 = (0..n).map(|i| m.as_matrix().row_norm(i)).product();
            prop_assert_eq!(pf, 0.0);
            prop_assert!(det.abs() <= 1e-12 * hadamard);
        } else {
            prop_assert!((pf * pf - det).abs() <= 1e-8 * det.abs());
        }
    }

    #[test]
    fn pfaffian_routes_agree(n in 2usize..=10, seed in any::<u64>()) {
        let m = gaussian_skew(n, 1.0, &mut rng_from_seed(seed));
        let fast = pfaffian_fast(&m);
        let slow = pfaffian_expand(&m).unwrap();
        prop_assert!((fast - slow).abs() <= 1e-9 * (1.0 + slow.abs()));
    }

    #[test]
    fn pfaffian_transforms_by_determinant(n in 2usize..=10, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let m = gaussian_skew(n, 1.0, &mut rng);
        let p = Matrix::from_fn(n, n, |_, _| pfaffian_core::random::standard_normal(&mut rng));
        let lhs = pfaffian_fast(&m.conjugate(&p));
        let rhs = p.determinant() * pfaffian_fast(&m);
        prop_assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(rhs.abs()));
    }

    #[test]
    fn canonical_form_round_trips(n in 1usize..=11, seed in any::<u64>(), scale in 0.01f64..100.0) {
        let m = gaussian_skew(n, scale, &mut rng_from_seed(seed));
        let cf = canonical_decompose(&m, 1e-12);
        prop_assert!(cf.reconstruct().sub(&m).norm() <= 1e-10 * (1.0 + m.norm()));
        prop_assert!(cf.q.orthogonality_defect() < 1e-10);
        prop_assert!(cf.pairs.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(cf.pairs.iter().all(|x| *x > 0.0));
        let pairs_norm: f64 = cf.pairs.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((pairs_norm - m.norm()).abs() <= 1e-10 * m.norm());
    }

    #[test]
    fn projection_is_idempotent_equivariant_and_orthogonal(spec in grid_spec(), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let n = spec.n();
        let m = gaussian_skew(n, 1.0, &mut rng);
        let p = project(spec, &m).unwrap();
        prop_assume!(!p.non_unique);
        prop_assert!(contains_rank(spec, &p.matrix, 1e-9).unwrap());
        let again = project(spec, &p.matrix).unwrap().matrix;
        prop_assert!(again.sub(&p.matrix).norm() < 1e-8);
        let q = haar_special_orthogonal(n, &mut rng);
        let rotated = project(spec, &m.conjugate(&q)).unwrap().matrix;
        prop_assert!(rotated.sub(&p.matrix.conjugate(&q)).norm() < 1e-8);
        let d = distance(spec, &m).unwrap();
        let total = m.norm() * m.norm();
        prop_assert!((d * d + p.matrix.norm().powi(2) - total).abs() <= 1e-9 * total);
        prop_assert!((m.sub(&p.matrix).norm() - d).abs() <= 1e-9 * (1.0 + m.norm()));
    }

    #[test]
    fn membership_routes_agree(spec in grid_spec(), seed in any::<u64>(), member in any::<bool>()) {
        let m = gaussian_skew(spec.n(), 1.0, &mut rng_from_seed(seed));
        let m = if member { project(spec, &m).unwrap().matrix } else { m };
        let by_rank = contains_rank(spec, &m, 1e-9).unwrap();
        prop_assert_eq!(by_rank, contains_pfaffian(spec, &m, 1e-9).unwrap());
        prop_assert_eq!(by_rank, member);
    }

    #[test]
    fn shape_operator_is_traceless_and_matches_wedge(spec in grid_spec(), seed in any::<u64>()) {
        let w = WedgePoint::random(spec, &mut rng_from_seed(seed));
        let a = shape_operator(&w.x, &w.b).unwrap();
        prop_assert!(a.trace().abs() < 1e-12);
        prop_assert!((a.focal_determinant(w.t) - wedge_determinant(&w)).abs() < 1e-9);
        prop_assert!(wedge_determinant(&w) > 0.0);
        let ww = weight_primary_wedge(&w).unwrap();
        prop_assert!(ww.exact >= ww.lower_bound - 1e-12 * ww.lower_bound.max(1.0));
    }

    // tau <= 1 is the range met at wedge points (tau = t^2 / x_i^2)
    #[test]
    fn lemma47_holds_for_tau_up_to_one(m in 2usize..=8, seed in any::<u64>(), tau in 0.0f64..=1.0) {
        let mut rng = rng_from_seed(seed);
        let b = unit_skew(m, &mut rng);
        let s = b.as_matrix().matmul(&b.as_matrix().transpose());
        let o = lemma47_check(&s, tau).unwrap();
        prop_assert!(o.ok, "lhs {} rhs {}", o.lhs, o.rhs);
    }

    #[test]
    fn composite_inequality_holds_off_the_hypersurface(
        spec in grid_spec(), seed in any::<u64>(), t in -10.0f64..10.0
    ) {
        prop_assume!(spec.normal_size() >= 3);
        let c = descending_pairs(spec.r(), 0.05, 5.0, 0.0, &mut rng_from_seed(seed));
        prop_assert!(composite_inequality(spec.n(), spec.r(), &c, t).unwrap().ok);
    }

    #[test]
    fn secondary_level_is_constant_along_its_curve(seed in any::<u64>(), t in -20.0f64..20.0) {
        let mut rng = rng_from_seed(seed);
        let c = descending_pairs(3, 0.1, 3.0, 0.01, &mut rng);
        let level = SecondaryLevel::new(c.clone()).unwrap();
        let p = secondary_point(&level, t, &unit_skew(3, &mut rng)).unwrap();
        let back = secondary_level(&p.x, t).unwrap();
        for (u, v) in back.c.iter().zip(&c) {
            prop_assert!((u - v).abs() <= 1e-10 * (1.0 + t.abs()));
        }
    }

    #[test]
    fn charts_reconstruct(spec in grid_spec(), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let q = haar_special_orthogonal(spec.n(), &mut rng);
        let m = random_primary_point(spec.n(), spec.r(), &mut rng).conjugate(&q);
        let chart = slice_decompose(&m, spec.r(), 1e-9).unwrap();
        prop_assert!(chart.ambient().sub(&m).norm() <= 1e-9 * (1.0 + m.norm()));
        prop_assert!((chart.q.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn isotropy_preserves_orientation(spec in grid_spec(), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let x = descending_pairs(spec.r(), 0.5, 2.0, 0.05, &mut rng);
        let iso = Isotropy::random(spec.n(), spec.r(), &mut rng);
        prop_assert!((orientability_action(&x, &iso).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn weight_is_positive_in_the_chamber(spec in grid_spec(), seed in any::<u64>()) {
        let x = descending_pairs(spec.r(), 0.1, 3.0, 1e-3, &mut rng_from_seed(seed));
        prop_assert!(weight_primary(spec.n(), spec.r(), &x).unwrap() > 0.0);
    }

    #[test]
    fn weyl_intervals_hold_below_threshold(spec in grid_spec(), seed in any::<u64>(), frac in 0.0f64..1.0) {
        let mut rng = rng_from_seed(seed);
        let n = spec.n();
        let k = 1 + (seed as usize) % spec.r();
        let x = descending_pairs(k, 0.5, 2.0, 0.05, &mut rng);
        let base = SkewMatrix::block_canonical(n, &x).conjugate(&haar_special_orthogonal(n, &mut rng));
        let q = TangentQuery::new(spec, base, gaussian_skew(n, 1.0, &mut rng)).unwrap();
        let t = frac * separation_threshold(&q);
        let check = weyl_bounds_check(&q, t);
        prop_assert!(check.intervals_hold);
        prop_assert!(check.separated || t == 0.0);
    }
}
