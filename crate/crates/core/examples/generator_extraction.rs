//! Lindblad generators read off a single collision for vacuum, thermal and
//! coherent ancillas.

use qcollide::bath::coherent_amplitude;
use qcollide::collision::{CollisionSpec, Coupling};
use qcollide::lindblad::{generator_from_collision, LindbladGenerator};
use qcollide::qcore::{c64, displacement, pauli, DensityMatrix, Operator};

fn fmt_op(op: &Operator) -> String {
    let rows: Vec<String> = op
        .matrix()
        .row_iter()
        .map(|r| {
            let cells: Vec<String> = r
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    rows.join(" ")
}

fn show(name: &str, gen: &LindbladGenerator) {
    println!("{name}");
    println!("  H_eff = {}", fmt_op(gen.h_eff()));
    let mut dropped = 0;
    for j in gen.jumps() {
        if j.op.max_abs() < 1e-6 {
            dropped += 1;
            continue;
        }
        println!("  L{:?} (rate {:.3}) = {}", j.label, j.rate, fmt_op(&j.op));
    }
    if dropped > 0 {
        println!("  ({dropped} jumps below 1e-6 not shown)");
    }
    for d in gen.diagnostics() {
        println!("  note: {d}");
    }
}

fn main() -> qcollide::Result<()> {
    let d = 12;
    let spec = CollisionSpec::new(
        Operator::zeros(&[2]),
        pauli::sigma_minus(),
        Coupling::Rate(1.0),
        0.01,
        1,
        d,
    )?;

    let vacuum = DensityMatrix::basis_state(d, 0)?;
    show("vacuum", &generator_from_collision(&spec, &vacuum)?);

    // geometric occupation with mean photon number close to 1
    let weights: Vec<f64> = (0..d).map(|k| 0.5f64.powi(k as i32 + 1)).collect();
    let total: f64 = weights.iter().sum();
    let thermal = DensityMatrix::diagonal(&weights.iter().map(|w| w / total).collect::<Vec<_>>())?;
    show("thermal", &generator_from_collision(&spec, &thermal)?);

    let xi = coherent_amplitude(c64(3.0, 0.0), 0.0, spec.dt(), 1);
    let column: Vec<_> = displacement(xi, d)?
        .matrix()
        .column(0)
        .iter()
        .copied()
        .collect();
    let coherent = DensityMatrix::new(Operator::outer(&column, &column, &[d])?)?;
    show(
        &format!("coherent, xi = {xi:.4}"),
        &generator_from_collision(&spec, &coherent)?,
    );
    Ok(())
}
