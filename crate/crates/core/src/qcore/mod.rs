//! Dense complex linear algebra for finite-dimensional quantum objects.
//!
//! Everything here is a pure function of its inputs. Operators carry a list
//! of subsystem dimensions; subsystem 0 is the most significant factor of the
//! row-major index, matching the Kronecker product.

mod expm;
mod fock;
mod operator;
mod state;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use expm::expm;
pub use fock::{
    annihilator, coherent_truncation_fidelity, creator, displacement, fock_projector, number,
};
pub use operator::Operator;
pub use state::{DensityMatrix, PureState, Tolerances};

pub type C64 = Complex64;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Two-level operators in the basis {|g> = |0>, |e> = |1>}.
pub mod pauli {
    use super::{c64, Operator};

    pub fn sigma_x() -> Operator {
        Operator::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn sigma_y() -> Operator {
        let z = c64(0.0, 0.0);
        Operator::from_rows(2, &[z, c64(0.0, -1.0), c64(0.0, 1.0), z]).unwrap()
    }

    pub fn sigma_z() -> Operator {
        Operator::from_real_rows(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    /// Lowering operator |g><e|.
    pub fn sigma_minus() -> Operator {
        Operator::from_real_rows(2, &[0.0, 1.0, 0.0, 0.0]).unwrap()
    }

    /// Raising operator |e><g|.
    pub fn sigma_plus() -> Operator {
        sigma_minus().dagger()
    }

    /// |e><e|
    pub fn excited_projector() -> Operator {
        Operator::from_real_rows(2, &[0.0, 0.0, 0.0, 1.0]).unwrap()
    }

    /// |g><g|
    pub fn ground_projector() -> Operator {
        Operator::from_real_rows(2, &[1.0, 0.0, 0.0, 0.0]).unwrap()
    }
}

fn validate_keep(dims: &[usize], keep: &[usize]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::InvalidInput(
            "partial trace must keep at least one subsystem".into(),
        ));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return Err(Error::InvalidInput(format!(
            "duplicate subsystem index in {keep:?}"
        )));
    }
    if let Some(&bad) = sorted.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidInput(format!(
            "subsystem index {bad} out of range for dims {dims:?}"
        )));
    }
    Ok(sorted)
}

/// Flat offsets of every multi-index over `subset`, embedded in the full
/// row-major layout of `dims`.
fn subset_offsets(dims: &[usize], subset: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let mut offsets = vec![0usize];
    for &k in subset {
        let mut next = Vec::with_capacity(offsets.len() * dims[k]);
        for &base in &offsets {
            for digit in 0..dims[k] {
                next.push(base + digit * strides[k]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems retain
/// their original relative order.
pub fn partial_trace_op(op: &Operator, keep: &[usize]) -> Result<Operator> {
    let dims = op.dims();
    let keep = validate_keep(dims, keep)?;
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let keep_off = subset_offsets(dims, &keep);
    let trace_off = subset_offsets(dims, &traced);
    let m = op.matrix();
    let n = keep_off.len();
    let out = DMatrix::from_fn(n, n, |r, c| {
        let (kr, kc) = (keep_off[r], keep_off[c]);
        trace_off
            .iter()
            .fold(C64::new(0.0, 0.0), |acc, &t| acc + m[(kr + t, kc + t)])
    });
    Operator::new(out, keep.iter().map(|&k| dims[k]).collect())
}

/// Traces out a single subsystem by index.
pub fn trace_out(op: &Operator, index: usize) -> Result<Operator> {
    let dims = op.dims();
    if index >= dims.len() {
        return Err(Error::InvalidInput(format!(
            "subsystem index {index} out of range for dims {dims:?}"
        )));
    }
    if dims.len() == 1 {
        return Err(Error::InvalidInput(
            "cannot trace out the only subsystem".into(),
        ));
    }
    let left: usize = dims[..index].iter().product();
    let mid = dims[index];
    let right: usize = dims[index + 1..].iter().product();
    let m = op.matrix();
    let n = left * right;
    let out = DMatrix::from_fn(n, n, |r, c| {
        let (lr, rr) = (r / right, r % right);
        let (lc, rc) = (c / right, c % right);
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..mid {
            acc += m[((lr * mid + k) * right + rr, (lc * mid + k) * right + rc)];
        }
        acc
    });
    let mut new_dims = dims.to_vec();
    new_dims.remove(index);
    Operator::new(out, new_dims)
}

/// Eigen-decomposition of the Hermitian part of `op`, eigenvalues ascending.
/// Column `k` of the returned matrix is the eigenvector for value `k`.
pub fn hermitian_eigen(op: &Operator) -> (Vec<f64>, DMatrix<C64>) {
    let h = op.hermitian_part().into_matrix();
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Smallest eigenvalue of the Hermitian part of `op`.
pub fn min_eigenvalue(op: &Operator) -> f64 {
    let h = op.hermitian_part().into_matrix();
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// ½‖a − b‖₁ for Hermitian operators of equal shape.
pub fn trace_distance(a: &Operator, b: &Operator) -> f64 {
    let diff = (a - b).hermitian_part().into_matrix();
    0.5 * SymmetricEigen::new(diff)
        .eigenvalues
        .iter()
        .map(|x| x.abs())
        .sum::<f64>()
}
