//! Vacuum-field decay of a two-level emitter: collision model against the
//! master equation and the closed form e^{-γt}.

use qcollide::scenarios::{spontaneous_emission_run, FieldConfig, FieldKind, SystemConfig};

fn main() -> qcollide::Result<()> {
    let (gamma, t_final, n) = (1.0, 1.0, 1000);
    let cfg = FieldConfig::new(
        FieldKind::Vacuum,
        gamma,
        t_final,
        n,
        SystemConfig::two_level_excited(0.0),
    )?;
    let run = spontaneous_emission_run(&cfg)?;

    let cm = run.collision.observable("rho_ee").unwrap();
    let me = run.master.observable("rho_ee").unwrap();
    println!(
        "{:>6} {:>14} {:>14} {:>14}",
        "t", "rho_ee (CM)", "rho_ee (ME)", "exp(-gt)"
    );
    for k in (0..=n).step_by(n / 10) {
        let t = run.collision.times[k];
        println!(
            "{t:>6.2} {:>14.8} {:>14.8} {:>14.8}",
            cm[k],
            me[k],
            (-gamma * t).exp()
        );
    }
    println!(
        "max trace distance CM vs ME: {:.3e}",
        run.max_trace_distance
    );
    println!(
        "|rho_ee(t) - exp(-gt)|:      {:.3e}",
        (cm[n] - (-gamma * t_final).exp()).abs()
    );
    Ok(())
}
