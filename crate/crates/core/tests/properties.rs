mod common;

use common::{random_density, random_hermitian, random_operator, repeated_superop};
use proptest::prelude::*;
use qcollide::bath::{coherent_bath, product_bath};
use qcollide::collision::{
    choi_of_collision, collision_unitary, run_product, CollisionSpec, Coupling,
};
use qcollide::qcore::{
    c64, expm, hermitian_eigen, min_eigenvalue, partial_trace_op, pauli, Operator, C64,
};
use qcollide::scenarios::{discretize_input_output, FieldConfig, FieldKind, SystemConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tensor_mixed_product(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut r = rng(seed);
        let (a, c) = (random_operator(&mut r, da), random_operator(&mut r, da));
        let (b, d) = (random_operator(&mut r, db), random_operator(&mut r, db));
        let lhs = &a.tensor(&b) * &c.tensor(&d);
        let rhs = (&a * &c).tensor(&(&b * &d));
        prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
    }

    #[test]
    fn iterated_partial_trace_matches_one_shot(seed in any::<u64>(), d0 in 1usize..4, d1 in 1usize..4, d2 in 1usize..4) {
        let mut r = rng(seed);
        let op = random_operator(&mut r, d0 * d1 * d2).with_dims(vec![d0, d1, d2]).unwrap();
        let once = partial_trace_op(&op, &[0]).unwrap();
        let twice = partial_trace_op(&partial_trace_op(&op, &[0, 1]).unwrap(), &[0]).unwrap();
        prop_assert!((&once - &twice).max_abs() < 1e-12);
        prop_assert!((op.trace() - once.trace()).norm() < 1e-12);
    }

    #[test]
    fn expm_of_hermitian_is_unitary_and_matches_eigen(seed in any::<u64>(), d in 1usize..7, t in 0.0f64..5.0) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, d).scale_real(3.0);
        let u = expm(&h, c64(0.0, -t));
        let id = Operator::identity(&[d]);
        prop_assert!((&(&u * &u.dagger()) - &id).max_abs() < 1e-12);
        let (vals, vecs) = hermitian_eigen(&h);
        let phases = Operator::diagonal(&vals.iter().map(|&l| C64::from_polar(1.0, -l * t)).collect::<Vec<_>>());
        let v = Operator::from_matrix(vecs).unwrap();
        let oracle = &(&v * &phases) * &v.dagger();
        prop_assert!((&u - &oracle).max_abs() < 1e-10);
    }

    #[test]
    fn product_collision_choi_is_psd_and_trace_preserving(
        seed in any::<u64>(), d_s in 2usize..4, d_anc in 2usize..4, g in 0.0f64..4.0, dt in 0.01f64..2.0,
    ) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, d_s);
        let b = random_operator(&mut r, d_s);
        let spec = CollisionSpec::new(h, b, Coupling::RawG(g), dt, 1, d_anc).unwrap();
        let eta = random_density(&mut r, d_anc);
        let c = choi_of_collision(&spec, &eta).unwrap();
        prop_assert!(min_eigenvalue(&c) > -1e-9);
        let marginal = partial_trace_op(&c, &[1]).unwrap();
        prop_assert!((&marginal - &Operator::identity(&[d_s])).max_abs() < 1e-10);
    }

    #[test]
    fn homogeneous_runs_compose(seed in any::<u64>(), n in 2usize..30, frac in 0.0f64..1.0) {
        let m = 1 + ((n - 1) as f64 * frac) as usize;
        let mut r = rng(seed);
        let spec = CollisionSpec::new(random_hermitian(&mut r, 2), pauli::sigma_minus(), Coupling::Rate(1.3), 0.05, n, 2)
            .unwrap();
        let eta = random_density(&mut r, 2);
        let u = collision_unitary(&spec, 1);
        let whole = repeated_superop(&eta, &u, 2, n);
        let split = repeated_superop(&eta, &u, 2, n - m) * repeated_superop(&eta, &u, 2, m);
        prop_assert!((whole - split).camax() < 1e-12);
    }

    #[test]
    fn run_states_stay_physical(seed in any::<u64>(), d_anc in 2usize..4, n in 1usize..40) {
        let mut r = rng(seed);
        let spec = CollisionSpec::new(random_hermitian(&mut r, 2), random_operator(&mut r, 2), Coupling::Rate(0.8), 0.1, n, d_anc)
            .unwrap();
        let bath = product_bath(&random_density(&mut r, d_anc), n).unwrap();
        let traj = run_product(&spec, &bath, &random_density(&mut r, 2), &[]).unwrap();
        for s in &traj.states {
            prop_assert!((s.op().trace().re - 1.0).abs() < 1e-10);
            prop_assert!(s.op().hermiticity_defect() < 1e-12);
            prop_assert!(s.min_eigenvalue() > -1e-9);
        }
    }

    #[test]
    fn discretized_rate_is_gamma_bitwise(gamma in 1e-3f64..1e3, t in 1e-2f64..1e2, n in 1usize..100_000) {
        let cfg = FieldConfig::new(FieldKind::Vacuum, gamma, t, n, SystemConfig::two_level_excited(0.0)).unwrap();
        let (spec, _) = discretize_input_output(&cfg).unwrap();
        prop_assert_eq!(spec.rate().to_bits(), gamma.to_bits());
        prop_assert!((spec.g() * spec.g() * spec.dt() / gamma - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_xi_norm_independent_of_phase(re in -2.0f64..2.0, im in -2.0f64..2.0, omega in -10.0f64..10.0) {
        let dt = 0.01;
        let bath = coherent_bath(c64(re, im), omega, dt, 25, 8).unwrap();
        let expected = (re * re + im * im).sqrt() * (dt / (2.0 * std::f64::consts::PI)).sqrt();
        for xi in &bath.diagnostics().xis {
            prop_assert!((xi.norm() - expected).abs() < 1e-14);
        }
    }
}
