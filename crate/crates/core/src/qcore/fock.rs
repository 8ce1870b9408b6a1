use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qcore::{expm, Operator, C64};

fn check_truncation(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidInput(format!(
            "Fock truncation must be at least 2, got {d}"
        )));
    }
    Ok(())
}

/// Bosonic annihilation operator truncated to Fock levels 0..d.
pub fn annihilator(d: usize) -> Result<Operator> {
    check_truncation(d)?;
    let mut m = DMatrix::zeros(d, d);
    for k in 1..d {
        m[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    Operator::from_matrix(m)
}

pub fn creator(d: usize) -> Result<Operator> {
    Ok(annihilator(d)?.dagger())
}

pub fn number(d: usize) -> Result<Operator> {
    check_truncation(d)?;
    let entries: Vec<C64> = (0..d).map(|k| C64::new(k as f64, 0.0)).collect();
    Ok(Operator::diagonal(&entries))
}

/// |k><k| in a d-level truncation.
pub fn fock_projector(d: usize, k: usize) -> Result<Operator> {
    check_truncation(d)?;
    if k >= d {
        return Err(Error::InvalidInput(format!(
            "Fock level {k} outside truncation {d}"
        )));
    }
    let mut m = DMatrix::zeros(d, d);
    m[(k, k)] = C64::new(1.0, 0.0);
    Operator::from_matrix(m)
}

/// Truncated displacement operator exp(ξ a† − ξ* a).
pub fn displacement(xi: C64, d: usize) -> Result<Operator> {
    let a = annihilator(d)?;
    let gen = &a.dagger().scale(xi) - &a.scale(xi.conj());
    Ok(expm(&gen, C64::new(1.0, 0.0)))
}

/// |1 − ⟨ψ|ψ⟩_truncated| for the exact coherent state |ξ⟩ projected onto the
/// first `d` Fock levels.
pub fn coherent_truncation_fidelity(xi: C64, d: usize) -> f64 {
    let x = xi.norm_sqr();
    let mut term = 1.0;
    let mut kept = 0.0;
    for k in 0..d {
        if k > 0 {
            term *= x / k as f64;
        }
        kept += term;
    }
    (1.0 - (-x).exp() * kept).abs()
}
