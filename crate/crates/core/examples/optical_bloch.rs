//! Resonant coherent drive: displaced-ancilla collision model, optical
//! Bloch equations and the semiclassical collision model side by side.

use qcollide::qcore::{c64, DensityMatrix};
use qcollide::scenarios::{bloch_run, max_trace_distance, FieldConfig, FieldKind, SystemConfig};

fn main() -> qcollide::Result<()> {
    let kind = FieldKind::Coherent {
        z: c64(3.0, 0.0),
        omega: 0.0,
    };
    let system = SystemConfig::two_level(0.0, DensityMatrix::basis_state(2, 0)?);
    let cfg = FieldConfig::new(kind, 1.0, 2.0, 2000, system)?.with_truncation(12)?;
    let run = bloch_run(&cfg)?;

    println!("drive g*xi_n = {:.6}", run.drive[0]);
    println!("truncation defect = {:.2e}", run.truncation_fidelity);
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "t", "rho_ee CM", "rho_ee ME", "rho_ee SC", "<sy> CM"
    );
    let ee = |t: &qcollide::collision::Trajectory| t.observable("rho_ee").unwrap().to_vec();
    let (q, m, s) = (ee(&run.quantum), ee(&run.master), ee(&run.semiclassical));
    let sy = run.quantum.observable("sigma_y").unwrap();
    for k in (0..run.quantum.len()).step_by(200) {
        println!(
            "{:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            run.quantum.times[k], q[k], m[k], s[k], sy[k]
        );
    }
    println!(
        "max D(CM, ME) = {:.3e}",
        max_trace_distance(&run.quantum, &run.master)?
    );
    println!(
        "max D(CM, SC) = {:.3e}",
        max_trace_distance(&run.quantum, &run.semiclassical)?
    );
    println!(
        "max D(ME, SC) = {:.3e}",
        max_trace_distance(&run.master, &run.semiclassical)?
    );
    Ok(())
}
