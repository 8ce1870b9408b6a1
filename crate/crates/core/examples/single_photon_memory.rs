//! A Gaussian single-photon wavepacket makes the ancillas entangled; the
//! trace distance between two emitter states is no longer monotone.

use qcollide::scenarios::{single_photon_run, Envelope, FieldConfig, FieldKind, SystemConfig};

fn main() -> qcollide::Result<()> {
    let envelope = Envelope::Gaussian {
        center: 6.0,
        width: 3.0,
    };
    let cfg = FieldConfig::new(
        FieldKind::SinglePhoton(envelope),
        1.0,
        12.0,
        12,
        SystemConfig::two_level_excited(0.0),
    )?;
    let run = single_photon_run(&cfg)?;

    println!(
        "quadrature error |1 - sum |phi_n|^2| = {:.3e}",
        run.quadrature_error
    );
    println!(
        "{:>4} {:>6} {:>12} {:>12} {:>12}",
        "n", "t", "rho_ee(e)", "rho_ee(g)", "D"
    );
    let a = run.first.observable("rho_ee").unwrap();
    let b = run.second.observable("rho_ee").unwrap();
    for (n, d) in run.witness.distances.iter().enumerate() {
        let mark = if run.witness.revivals.iter().any(|r| r.0 == n) {
            "  <- revival"
        } else {
            ""
        };
        println!(
            "{n:>4} {:>6.1} {:>12.6} {:>12.6} {d:>12.6}{mark}",
            run.first.times[n], a[n], b[n]
        );
    }
    println!(
        "witness fired: {} (max rise {:.3e})",
        run.witness.fired(),
        run.witness.max_revival()
    );
    Ok(())
}
