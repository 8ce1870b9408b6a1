//! Step maps of a collision run: CP for a product bath, not CP for a
//! correlated two-ancilla bath carrying one shared photon.

use std::f64::consts::PI;

use qcollide::bath::{product_bath, single_photon_bath};
use qcollide::collision::{reconstruct_step_map, CollisionSpec, Coupling};
use qcollide::qcore::{c64, pauli, DensityMatrix, Operator};

fn main() -> qcollide::Result<()> {
    let spec = CollisionSpec::new(
        Operator::zeros(&[2]),
        pauli::sigma_minus(),
        Coupling::RawG(PI / 3.0),
        1.0,
        2,
        2,
    )?;

    let product = product_bath(&DensityMatrix::diagonal(&[0.8, 0.2])?, 2)?;
    let correlated = single_photon_bath(|_| c64(1.0, 0.0), 2)?;
    for (name, bath) in [("product", &product), ("single photon", &correlated)] {
        for step in 1..=2 {
            let map = reconstruct_step_map(&spec, bath, step)?;
            println!(
                "{name:>14} step {step}: min Choi eigenvalue {:+.6}",
                map.min_choi_eigenvalue
            );
        }
    }
    Ok(())
}
