use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::{apply_collision_map, collision_unitary, run_correlated, run_product, CollisionSpec};
use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::qcore::{min_eigenvalue, DensityMatrix, Operator, C64};

/// Largest system dimension for which Choi matrices are built.
pub const MAX_CHOI_DIM: usize = 16;

fn matrix_unit(d: usize, j: usize, k: usize) -> Operator {
    let mut m = DMatrix::zeros(d, d);
    m[(j, k)] = C64::new(1.0, 0.0);
    Operator::from_matrix(m).expect("square")
}

/// C = Σ_jk ℰ(E_jk) ⊗ E_jk; the first factor is the channel output.
fn choi_of_map<F>(d: usize, mut map: F) -> Result<Operator>
where
    F: FnMut(&Operator) -> Result<Operator>,
{
    if d > MAX_CHOI_DIM {
        return Err(Error::InvalidInput(format!(
            "Choi matrix limited to system dimension {MAX_CHOI_DIM}, got {d}"
        )));
    }
    let mut choi = Operator::zeros(&[d, d]);
    for j in 0..d {
        for k in 0..d {
            let unit = matrix_unit(d, j, k);
            let image = map(&unit)?.with_dims(vec![d])?;
            choi = &choi + &image.tensor(&unit);
        }
    }
    Ok(choi)
}

/// Choi matrix of the single-collision map with ancilla state `eta`, using
/// the unitary of the first collision.
pub fn choi_of_collision(spec: &CollisionSpec, eta: &DensityMatrix) -> Result<Operator> {
    choi_of_collision_at(spec, eta, 1)
}

pub fn choi_of_collision_at(
    spec: &CollisionSpec,
    eta: &DensityMatrix,
    step: usize,
) -> Result<Operator> {
    let u = collision_unitary(spec, step);
    let dims = spec.system_dims().to_vec();
    let d: usize = dims.iter().product();
    choi_of_map(d, |x| {
        let x = x.clone().with_dims(dims.clone())?;
        apply_collision_map(&x, eta, &u)
    })
}

/// Choi matrix of a superoperator acting on row-major vec(ρ).
pub fn choi_from_superoperator(superop: &DMatrix<C64>, d: usize) -> Result<Operator> {
    if superop.nrows() != d * d || superop.ncols() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "superoperator is {}x{}, expected {}x{}",
            superop.nrows(),
            superop.ncols(),
            d * d,
            d * d
        )));
    }
    choi_of_map(d, |x| {
        let v = DMatrix::from_row_slice(d * d, 1, &vec_row_major(x));
        let image = superop * v;
        Operator::from_matrix(DMatrix::from_fn(d, d, |r, c| image[(r * d + c, 0)]))
    })
}

fn vec_row_major(op: &Operator) -> Vec<C64> {
    let d = op.side();
    (0..d * d).map(|i| op.get(i / d, i % d)).collect()
}

/// Map from the state after step n−1 to the state after step n,
/// reconstructed by process tomography.
#[derive(Clone, Debug)]
pub struct StepMap {
    pub step: usize,
    /// Superoperator on row-major vec(ρ).
    pub superop: DMatrix<C64>,
    pub choi: Operator,
    pub min_choi_eigenvalue: f64,
}

/// Tomographic input states: |j>, (|j>+|k>)/√2 and (|j>+i|k>)/√2.
fn tomography_inputs(d: usize) -> Vec<(usize, usize, u8, DensityMatrix)> {
    let s = 0.5f64.sqrt();
    let mut out = Vec::new();
    for j in 0..d {
        out.push((j, j, 0, DensityMatrix::basis_state(d, j).unwrap()));
        for k in (j + 1)..d {
            for (kind, phase) in [(1u8, C64::new(s, 0.0)), (2u8, C64::new(0.0, s))] {
                let mut v = vec![C64::new(0.0, 0.0); d];
                v[j] = C64::new(s, 0.0);
                v[k] = phase;
                let op = Operator::outer(&v, &v, &[d]).unwrap();
                out.push((j, k, kind, DensityMatrix::new(op).unwrap()));
            }
        }
    }
    out
}

/// Reconstructs the step-`step` map of a collision run by tomography: the
/// cumulative maps ρ_0 → ρ_{step−1} and ρ_0 → ρ_step are measured on a
/// spanning set of pure inputs, and the first is divided out of the second.
pub fn reconstruct_step_map(spec: &CollisionSpec, bath: &BathSpec, step: usize) -> Result<StepMap> {
    if step == 0 {
        return Err(Error::InvalidInput("steps are numbered from 1".into()));
    }
    let dims = spec.system_dims().to_vec();
    let d: usize = dims.iter().product();
    if d > MAX_CHOI_DIM {
        return Err(Error::InvalidInput(format!(
            "tomography limited to system dimension {MAX_CHOI_DIM}, got {d}"
        )));
    }
    let run_spec = spec.with_n_steps(step)?;

    // outputs[(j, k, kind)] = [ρ_{step−1}, ρ_step]
    let mut outputs = BTreeMap::new();
    for (j, k, kind, input) in tomography_inputs(d) {
        let input = DensityMatrix::new(input.into_op().with_dims(dims.clone())?)?;
        let traj = if bath.is_product() {
            run_product(&run_spec, bath, &input, &[])?
        } else {
            run_correlated(&run_spec, bath, &input, &[])?
        };
        outputs.insert(
            (j, k, kind),
            [
                traj.states[step - 1].op().clone(),
                traj.states[step].op().clone(),
            ],
        );
    }

    // By linearity E_jk = A + iB and E_kj = A − iB (j < k), with
    // A = P₊ − (E_jj + E_kk)/2 and B = P₊ᵢ − (E_jj + E_kk)/2.
    let image = |t: usize, j: usize, k: usize| -> Operator {
        if j == k {
            return outputs[&(j, j, 0)][t].clone();
        }
        let (lo, hi) = (j.min(k), j.max(k));
        let mid = (&outputs[&(lo, lo, 0)][t] + &outputs[&(hi, hi, 0)][t]).scale_real(0.5);
        let a = &outputs[&(lo, hi, 1)][t] - &mid;
        let b = (&outputs[&(lo, hi, 2)][t] - &mid).scale(C64::new(0.0, 1.0));
        if j < k {
            &a + &b
        } else {
            &a - &b
        }
    };
    let superop_at = |t: usize| {
        let mut s = DMatrix::<C64>::zeros(d * d, d * d);
        for j in 0..d {
            for k in 0..d {
                for (row, z) in vec_row_major(&image(t, j, k)).into_iter().enumerate() {
                    s[(row, j * d + k)] = z;
                }
            }
        }
        s
    };
    let before = superop_at(0);
    let after = superop_at(1);

    let inverse = before.try_inverse().ok_or_else(|| {
        Error::Invariant(format!(
            "cumulative map up to step {} is not invertible",
            step - 1
        ))
    })?;
    let superop = after * inverse;
    let choi = choi_from_superoperator(&superop, d)?;
    let min_choi_eigenvalue = min_eigenvalue(&choi);
    Ok(StepMap {
        step,
        superop,
        choi,
        min_choi_eigenvalue,
    })
}
