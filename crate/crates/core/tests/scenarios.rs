use qcollide::bath::product_bath;
use qcollide::collision::run_product;
use qcollide::qcore::{c64, DensityMatrix};
use qcollide::scenarios::{
    bloch_run, convergence_study, discretize_input_output, max_trace_distance, nm_witness,
    single_photon_run_with_pair, spontaneous_emission_run, CouplingScaling, Envelope, FieldConfig,
    FieldKind, SystemConfig, REVIVAL_EPS,
};

fn two_level(kind: FieldKind, t: f64, n: usize, rho0: DensityMatrix) -> FieldConfig {
    FieldConfig::new(kind, 1.0, t, n, SystemConfig::two_level(0.5, rho0)).unwrap()
}

fn excited() -> DensityMatrix {
    DensityMatrix::basis_state(2, 1).unwrap()
}

fn ground() -> DensityMatrix {
    DensityMatrix::basis_state(2, 0).unwrap()
}

#[test]
fn emission_reference_values() {
    let cfg = FieldConfig::new(
        FieldKind::Vacuum,
        1.0,
        1.0,
        1000,
        SystemConfig::two_level_excited(0.0),
    )
    .unwrap();
    let run = spontaneous_emission_run(&cfg).unwrap();
    let pop = run.collision.observable("rho_ee").unwrap();
    assert!((pop[1000] - (-1.0f64).exp()).abs() < 5e-3);
}

#[test]
fn emission_error_halves_with_doubled_n() {
    let err = |n| {
        spontaneous_emission_run(&two_level(FieldKind::Vacuum, 1.0, n, excited()))
            .unwrap()
            .max_trace_distance
    };
    for n in [100, 400] {
        let ratio = err(n) / err(2 * n);
        assert!((1.6..=2.4).contains(&ratio), "N={n}: ratio {ratio}");
    }
}

#[test]
fn ground_state_is_dark() {
    let run = spontaneous_emission_run(&two_level(FieldKind::Vacuum, 3.0, 50, ground())).unwrap();
    for s in &run.collision.states {
        assert!((s.op() - ground().op()).max_abs() < 1e-14);
    }
}

#[test]
fn zero_drive_reduces_to_emission() {
    let cfg = two_level(
        FieldKind::Coherent {
            z: c64(0.0, 0.0),
            omega: 1.0,
        },
        1.0,
        100,
        excited(),
    );
    let bloch = bloch_run(&cfg).unwrap();
    let vac = spontaneous_emission_run(&two_level(FieldKind::Vacuum, 1.0, 100, excited())).unwrap();
    assert!(max_trace_distance(&bloch.quantum, &vac.collision).unwrap() < 1e-12);
    assert!(max_trace_distance(&bloch.semiclassical, &vac.collision).unwrap() < 1e-12);
    assert!(max_trace_distance(&bloch.master, &vac.master).unwrap() < 1e-10);
}

#[test]
fn distance_to_master_equation_shrinks_along_doubling() {
    let kinds = [
        FieldKind::Vacuum,
        FieldKind::Coherent {
            z: c64(2.0, 1.0),
            omega: 1.5,
        },
    ];
    for kind in kinds {
        let cfg = two_level(kind.clone(), 2.0, 25, excited());
        let report = convergence_study(&cfg, &[25, 50, 100, 200], CouplingScaling::Rate).unwrap();
        for w in report.rows.windows(2) {
            assert!(
                w[1].max_state_error <= 1.1 * w[0].max_state_error,
                "{kind:?}: {:?}",
                report.rows
            );
        }
    }
}

#[test]
fn semiclassical_and_quantum_converge() {
    let mut prev = None;
    for n in [100, 200, 400] {
        let cfg = two_level(
            FieldKind::Coherent {
                z: c64(3.0, 0.0),
                omega: 0.8,
            },
            2.0,
            n,
            ground(),
        );
        let run = bloch_run(&cfg).unwrap();
        let d = max_trace_distance(&run.quantum, &run.semiclassical).unwrap();
        if let Some(p) = prev {
            assert!(d <= 0.7 * p, "N={n}: {d} vs {p}");
        }
        prev = Some(d);
    }
}

#[test]
fn witness_silent_for_product_scenarios() {
    let kinds = [
        FieldKind::Vacuum,
        FieldKind::Coherent {
            z: c64(3.0, 0.0),
            omega: 0.0,
        },
        FieldKind::Coherent {
            z: c64(1.0, -2.0),
            omega: 2.0,
        },
    ];
    for kind in kinds {
        let (spec, bath) =
            discretize_input_output(&two_level(kind.clone(), 3.0, 300, excited())).unwrap();
        let a = run_product(&spec, &bath, &excited(), &[]).unwrap();
        let b = run_product(&spec, &bath, &ground(), &[]).unwrap();
        let report = nm_witness(&a, &b, REVIVAL_EPS).unwrap();
        assert!(!report.fired(), "{kind:?}: {:?}", report.revivals);
    }
}

#[test]
fn identical_inputs_are_indistinguishable() {
    let cfg = FieldConfig::new(
        FieldKind::SinglePhoton(Envelope::Gaussian {
            center: 3.0,
            width: 1.0,
        }),
        1.0,
        6.0,
        8,
        SystemConfig::two_level_excited(0.0),
    )
    .unwrap();
    let mixed = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
    let run = single_photon_run_with_pair(&cfg, &mixed, &mixed).unwrap();
    assert!(run.witness.distances.iter().all(|&d| d == 0.0));
    assert!(!run.witness.fired());
}

#[test]
fn fixed_coupling_does_not_converge() {
    let cfg = two_level(FieldKind::Vacuum, 1.0, 100, excited());
    let report =
        convergence_study(&cfg, &[100, 200, 400, 800], CouplingScaling::FixedG(1.0)).unwrap();
    assert!(report.slope > -0.3, "slope {}", report.slope);
    let rate = convergence_study(&cfg, &[100, 200, 400, 800], CouplingScaling::Rate).unwrap();
    assert!((-1.3..=-0.7).contains(&rate.slope), "slope {}", rate.slope);
    assert!(rate.rows.windows(2).all(|w| w[0].n_steps < w[1].n_steps));
}

#[test]
fn vacuum_bath_matches_product_vacuum() {
    let (_, bath) =
        discretize_input_output(&two_level(FieldKind::Vacuum, 1.0, 7, excited())).unwrap();
    let expected = product_bath(&ground(), 7).unwrap();
    assert_eq!(bath.kind(), expected.kind());
}
