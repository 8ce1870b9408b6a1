//! Collision model against the master equation as dt -> 0, with g = sqrt(γ/dt)
//! and with g held fixed.

use qcollide::scenarios::{
    convergence_study, CouplingScaling, FieldConfig, FieldKind, SystemConfig,
};

fn main() -> qcollide::Result<()> {
    let cfg = FieldConfig::new(
        FieldKind::Vacuum,
        1.0,
        1.0,
        100,
        SystemConfig::two_level_excited(0.0),
    )?;
    let n_list = [100, 200, 400, 800];
    for scaling in [CouplingScaling::Rate, CouplingScaling::FixedG(1.0)] {
        let report = convergence_study(&cfg, &n_list, scaling)?;
        println!(
            "{scaling:?} (reference: {} RK4 substeps)",
            report.reference_substeps
        );
        println!(
            "{:>6} {:>10} {:>14} {:>14}",
            "N", "dt", "max D", "|d rho_ee(t)|"
        );
        for r in &report.rows {
            println!(
                "{:>6} {:>10.2e} {:>14.6e} {:>14.6e}",
                r.n_steps, r.dt, r.max_state_error, r.endpoint_error
            );
        }
        println!("fitted slope: {:.3}\n", report.slope);
    }
    Ok(())
}
