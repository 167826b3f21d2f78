use proptest::prelude::*;

use relkit::harness::{
    gaussian, generic_relation, random_relation, random_subspace, run_suite, run_suite_sequential, trial_rng,
    GeneratorConfig, RelationClass,
};
use relkit::matrix::{self, c64};
use relkit::perturbation::projection_gap;
use relkit::relation_checks::{check_adjoint_involution, check_rank_nullity};
use relkit::schatten::trace_norm;
use relkit::Tolerances;

/// `(dim, mul_dim, domain_dim, seed)` with `mul_dim, domain_dim ≤ dim`.
fn shape() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (2usize..=7).prop_flat_map(|d| (Just(d), 0..=d, 0..=d, any::<u64>()))
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(32)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn rank_nullity_holds((d, m, k, seed) in shape()) {
        let t = generic_relation(d, k, m, &mut trial_rng(seed, 0)).unwrap();
        let tol = Tolerances::default();
        prop_assert!(check_rank_nullity(&t, &tol).passed());
        prop_assert_eq!(t.dim(), k + m);
    }

    #[test]
    fn adjoint_is_an_involution_commuting_with_inverse((d, m, k, seed) in shape()) {
        let t = generic_relation(d, k, m, &mut trial_rng(seed, 0)).unwrap();
        let tol = Tolerances::default();
        let r = check_adjoint_involution(&t, &tol);
        prop_assert!(r.passed(), "{:?}", r);
        // dim T* = dim X + dim Y − dim T.
        prop_assert_eq!(t.adjoint(&tol).dim(), 2 * d - t.dim());
    }

    #[test]
    fn gap_norm_is_at_most_one_and_matches_sup_distance((d, m, k, seed) in shape()) {
        let mut rng = trial_rng(seed, 0);
        let s = generic_relation(d, k, m, &mut rng).unwrap();
        let t = generic_relation(d, d - m, m, &mut rng).unwrap();
        let g = projection_gap(&s, &t).unwrap();
        prop_assert!(g.norm() <= 1.0 + 1e-12);
        prop_assert!(g.check_sup_distance(&Tolerances::default()).passed());
    }

    #[test]
    fn singular_values_are_unitarily_invariant(n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = gaussian(n, n, &mut rng);
        let u = random_subspace(n, n, &mut rng).unwrap().basis().clone();
        let v = random_subspace(n, n, &mut rng).unwrap().basis().clone();
        let before = matrix::singular_values(&a);
        let after = matrix::singular_values(&(&u * &a * v.adjoint()));
        let adj = matrix::singular_values(&a.adjoint());
        for ((x, y), z) in before.iter().zip(&after).zip(&adj) {
            prop_assert!((x - y).abs() <= 1e-10 * before[0].max(1.0));
            prop_assert!((x - z).abs() <= 1e-10 * before[0].max(1.0));
        }
    }

    #[test]
    fn trace_norm_is_a_norm(rows in 1usize..=5, cols in 1usize..=5, seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let mut rng = trial_rng(seed, 0);
        let a = gaussian(rows, cols, &mut rng);
        let b = gaussian(rows, cols, &mut rng);
        let (na, nb) = (trace_norm(&a), trace_norm(&b));
        prop_assert!(trace_norm(&(&a + &b)) <= na + nb + 1e-10);
        let alpha = c64(re, im);
        prop_assert!((trace_norm(&(&a * alpha)) - alpha.norm() * na).abs() <= 1e-10 * na.max(1.0));
        prop_assert!(trace_norm(&matrix::zeros(rows, cols)) == 0.0);
        prop_assert!(na > 0.0);
    }

    #[test]
    fn generated_instances_satisfy_their_class((d, m, _, seed) in shape()) {
        let tol = Tolerances::default();
        for class in [RelationClass::Generic, RelationClass::Hermitian, RelationClass::SelfAdjoint] {
            let cfg = GeneratorConfig { dim: d, mul_dim: m, class, ..GeneratorConfig::default() };
            let t = random_relation(&cfg, &mut trial_rng(seed, 0)).unwrap();
            prop_assert_eq!(t.mul_part_space(&tol).dim(), m);
            match class {
                RelationClass::Generic => prop_assert_eq!(t.dim(), d),
                RelationClass::Hermitian => prop_assert!(t.is_hermitian(&tol).unwrap()),
                _ => prop_assert!(t.is_self_adjoint(&tol).unwrap()),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn suite_is_deterministic_across_thread_counts(seed in any::<u64>()) {
        let cfg = GeneratorConfig { dim: 3, mul_dim: 1, seed, trials: 2, ..GeneratorConfig::default() };
        let tol = Tolerances::default();
        let a = run_suite_sequential(&cfg, &tol).unwrap().to_json().unwrap();
        let b = run_suite(&cfg, &tol).unwrap().to_json().unwrap();
        let c = run_suite(&cfg, &tol).unwrap().to_json().unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&b, &c);
    }
}
