use ancient_core::ancient_eval::{check_cm, default_cm_step, heat_residual, li_yau_quantity};
use ancient_core::caloric_poly::{caloric_extend, decompose, MultiPoly};
use ancient_core::field::FnField;
use ancient_core::parabolic_geometry::{dp, gram, sample_paraboloid, Paraboloid, QuadSpec};
use ancient_core::{AncientSolution, SpaceTimeField, SpectralMeasure};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point(n: usize) -> impl Strategy<Value = (Vec<f64>, f64)> {
    (prop::collection::vec(-5.0..5.0f64, n), -5.0..5.0f64)
}

fn solution(seed: u64, dim: usize, atoms: usize) -> AncientSolution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AncientSolution::new(SpectralMeasure::random(&mut rng, dim, atoms, 4.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parabolic_distance_is_a_metric(a in point(3), b in point(3), c in point(3), n in 1usize..4) {
        let (a, b, c) = ((&a.0[..n], a.1), (&b.0[..n], b.1), (&c.0[..n], c.1));
        let ab = dp(a.0, a.1, b.0, b.1);
        prop_assert_eq!(ab, dp(b.0, b.1, a.0, a.1));
        prop_assert_eq!(dp(a.0, a.1, a.0, a.1), 0.0);
        let via = dp(a.0, a.1, c.0, c.1) + dp(c.0, c.1, b.0, b.1);
        prop_assert!(ab <= via * (1.0 + 1e-12));
    }

    #[test]
    fn extend_then_decompose_is_identity(seed in any::<u64>(), dim in 1usize..4, deg in 0u32..9, terms in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u0 = MultiPoly::random_spatial(&mut rng, dim, deg, terms);
        let u = caloric_extend(&u0).unwrap();
        prop_assert!(u.polynomial().heat_op().is_zero());
        prop_assert!(u.chain_relations_hold());
        let d = decompose(u.polynomial()).unwrap();
        prop_assert_eq!(d.chain(), u.chain());
    }

    #[test]
    fn non_caloric_polynomial_is_rejected(dim in 1usize..4, i in 0usize..3) {
        let x = MultiPoly::var(dim, i % dim);
        let p = &MultiPoly::time(dim) + &(&x * &x);
        prop_assert!(decompose(&p).is_err());
    }

    #[test]
    fn synthesized_solutions_solve_the_heat_equation(seed in any::<u64>(), dim in 1usize..4, atoms in 1usize..12, (x, t) in point(3)) {
        let u = solution(seed, dim, atoms);
        let r = heat_residual(&u, &[(x[..dim].to_vec(), t.min(0.0))]).unwrap();
        prop_assert!(r.max_rel <= 1e-12, "residual {}", r.max_rel);
    }

    #[test]
    fn backward_profiles_are_completely_monotone(seed in any::<u64>(), dim in 1usize..4, atoms in 1usize..12, x in prop::collection::vec(-1.0..1.0f64, 3)) {
        let u = solution(seed, dim, atoms);
        let grid: Vec<f64> = (1..=10).map(|i| 0.5 * i as f64).collect();
        let rep = check_cm(|t| u.eval(&x[..dim], -t), &grid, 8, default_cm_step(&grid, 8)).unwrap();
        prop_assert!(rep.passed());
    }

    #[test]
    fn li_yau_quantity_is_nonpositive(seed in any::<u64>(), dim in 1usize..4, atoms in 1usize..12, (x, t) in point(3)) {
        let u = solution(seed, dim, atoms);
        let q = li_yau_quantity(&u, &x[..dim], t.min(0.0), 1.0).unwrap();
        prop_assert!(q <= 1e-10, "quantity {}", q);
    }

    #[test]
    fn measure_json_round_trip(seed in any::<u64>(), dim in 1usize..4, atoms in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = SpectralMeasure::random(&mut rng, dim, atoms, 4.0);
        prop_assert_eq!(SpectralMeasure::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn larger_paraboloids_contain_smaller(seed in any::<u64>(), n in 1usize..4, r in 0.1..3.0f64, eps in 0.0..1.0f64) {
        let p = Paraboloid::new(vec![0.3; n], -0.5, r).unwrap();
        let big = p.scaled(1.0 + eps);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let (y, s) = sample_paraboloid(&mut rng, &p);
            prop_assert!(p.contains(&y, s));
            prop_assert!(big.contains(&y, s));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gram_matrices_are_symmetric_positive_semidefinite(r in 0.2..3.0f64, a in -2.0..2.0f64) {
        let one = FnField::new(1, |_: &[f64], _: f64| 1.0);
        let lin = FnField::new(1, move |x: &[f64], _: f64| x[0] + a);
        let quad = FnField::new(1, |x: &[f64], t: f64| x[0] * x[0] + 2.0 * t);
        let basis: [&dyn SpaceTimeField; 3] = [&one, &lin, &quad];
        let g = gram(&basis, &Paraboloid::centred(1, r).unwrap(), QuadSpec::default()).unwrap();
        prop_assert!(g.is_symmetric());
        prop_assert!(g.min_eigenvalue() >= -1e-12 * g.max_eigenvalue());
        prop_assert!(g.trace() > 0.0);
    }
}
