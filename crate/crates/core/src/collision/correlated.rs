use nalgebra::DMatrix;

use super::{
    check_bath_len, check_run_state, check_system, collision_unitary, CollisionSpec, Observable,
    Trajectory,
};
use crate::bath::{BathKind, BathSpec};
use crate::error::{Error, Result};
use crate::qcore::{hermitian_eigen, DensityMatrix, Operator, C64};

/// Default cap on d_S · 2^N, enough for sixteen qubit ancillas on a qubit.
pub const DEFAULT_JOINT_DIM_CAP: usize = 1 << 17;

/// Eigencomponents of ρ_0 below this weight are dropped.
const COMPONENT_FLOOR: f64 = 1e-15;

/// Collision dynamics through an initially correlated (pure) bath.
pub fn run_correlated(
    spec: &CollisionSpec,
    bath: &BathSpec,
    rho0: &DensityMatrix,
    observables: &[Observable],
) -> Result<Trajectory> {
    run_correlated_with_cap(spec, bath, rho0, observables, DEFAULT_JOINT_DIM_CAP)
}

/// As [`run_correlated`] with an explicit cap on the joint dimension.
///
/// ρ_0 is purified through its eigendecomposition; each component is carried
/// as a joint state vector of the system and every ancilla. Collision `n`
/// acts only on the system and ancilla `n`, so ancillas that have already
/// collided are never touched again and tracing them out commutes with all
/// later steps. The reduced system state is contracted out after each step.
pub fn run_correlated_with_cap(
    spec: &CollisionSpec,
    bath: &BathSpec,
    rho0: &DensityMatrix,
    observables: &[Observable],
    joint_dim_cap: usize,
) -> Result<Trajectory> {
    check_system(spec, rho0)?;
    check_bath_len(spec, bath)?;
    let BathKind::CorrelatedPure { state, .. } = bath.kind() else {
        return Err(Error::InvalidInput(
            "run_correlated needs a correlated pure bath; use run_product for product baths".into(),
        ));
    };
    if spec.d_anc() != 2 {
        return Err(Error::InvalidInput(
            "correlated baths are restricted to qubit ancillas".into(),
        ));
    }
    let d_s = rho0.side();
    let n_anc = bath.n_steps();
    let bath_dim = state.amplitudes().len();
    let required = d_s.saturating_mul(bath_dim);
    if n_anc >= usize::BITS as usize - 1 || required > joint_dim_cap {
        return Err(Error::ResourceCap {
            required,
            cap: joint_dim_cap,
        });
    }

    let (weights, vectors) = hermitian_eigen(rho0.op());
    let mut components: Vec<(f64, Vec<C64>)> = Vec::new();
    for (k, &p) in weights.iter().enumerate() {
        if p <= COMPONENT_FLOOR {
            continue;
        }
        let mut psi = Vec::with_capacity(required);
        for s in 0..d_s {
            let u = vectors[(s, k)];
            psi.extend(state.amplitudes().iter().map(|&a| u * a));
        }
        components.push((p, psi));
    }

    let mut traj = Trajectory::start(rho0, observables, spec.n_steps() + 1);
    for step in 1..=spec.n_steps() {
        let u = collision_unitary(spec, step);
        let mask = 1usize << (n_anc - step);
        for (_, psi) in components.iter_mut() {
            apply_local(psi, &u, d_s, bath_dim, mask);
        }
        let reduced = reduce_to_system(&components, d_s, bath_dim, rho0.dims());
        let rho = check_run_state(reduced, step)?;
        traj.push(step as f64 * spec.dt(), rho, observables);
    }
    Ok(traj)
}

/// Applies `u` (on system ⊗ one ancilla, index s·2 + bit) to the joint
/// vector, where the ancilla's occupation is the bit `mask` of the bath
/// index.
fn apply_local(psi: &mut [C64], u: &Operator, d_s: usize, bath_dim: usize, mask: usize) {
    let m = u.matrix();
    let side = 2 * d_s;
    let mut v = vec![C64::new(0.0, 0.0); side];
    let mut w = vec![C64::new(0.0, 0.0); side];
    for a in (0..bath_dim).filter(|a| a & mask == 0) {
        for s in 0..d_s {
            v[2 * s] = psi[s * bath_dim + a];
            v[2 * s + 1] = psi[s * bath_dim + (a | mask)];
        }
        for (r, out) in w.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (c, x) in v.iter().enumerate() {
                acc += m[(r, c)] * x;
            }
            *out = acc;
        }
        for s in 0..d_s {
            psi[s * bath_dim + a] = w[2 * s];
            psi[s * bath_dim + (a | mask)] = w[2 * s + 1];
        }
    }
}

fn reduce_to_system(
    components: &[(f64, Vec<C64>)],
    d_s: usize,
    bath_dim: usize,
    dims: &[usize],
) -> Operator {
    let mut rho = DMatrix::<C64>::zeros(d_s, d_s);
    for (p, psi) in components {
        for r in 0..d_s {
            let row = &psi[r * bath_dim..(r + 1) * bath_dim];
            for c in 0..d_s {
                let col = &psi[c * bath_dim..(c + 1) * bath_dim];
                let overlap: C64 = row.iter().zip(col).map(|(x, y)| x * y.conj()).sum();
                rho[(r, c)] += overlap * *p;
            }
        }
    }
    Operator::new(rho, dims.to_vec()).expect("system dims")
}
