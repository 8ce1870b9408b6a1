use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qcore::{min_eigenvalue, partial_trace_op, Operator, C64};

/// Acceptance thresholds for density-matrix invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Max elementwise deviation from Hermiticity.
    pub hermiticity: f64,
    /// Max |Tr ρ − 1|.
    pub trace: f64,
    /// Minimum admissible eigenvalue (a small negative number).
    pub min_eigenvalue: f64,
}

impl Tolerances {
    /// Invariants of a freshly constructed state.
    pub const STRICT: Tolerances = Tolerances {
        hermiticity: 1e-10,
        trace: 1e-10,
        min_eigenvalue: -1e-9,
    };

    /// Looser positivity floor used while propagating long runs, so that
    /// round-off accumulation is told apart from genuine bugs.
    pub const RUN: Tolerances = Tolerances {
        hermiticity: 1e-10,
        trace: 1e-10,
        min_eigenvalue: -1e-7,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::STRICT
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        Self::with_tolerances(op, Tolerances::STRICT)
    }

    pub fn with_tolerances(op: Operator, tol: Tolerances) -> Result<Self> {
        let herm = op.hermiticity_defect();
        if herm > tol.hermiticity {
            return Err(Error::Invariant(format!(
                "density matrix not Hermitian (defect {herm:e})"
            )));
        }
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol.trace {
            return Err(Error::Invariant(format!(
                "density matrix trace {} + {}i differs from 1",
                tr.re, tr.im
            )));
        }
        let min = min_eigenvalue(&op);
        if min < tol.min_eigenvalue {
            return Err(Error::Invariant(format!(
                "density matrix not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(Self { op })
    }

    /// Symmetrizes `op` as (ρ + ρ†)/2 before validating; used on states that
    /// come out of numerical propagation.
    pub fn from_evolved(op: Operator, tol: Tolerances) -> Result<Self> {
        Self::with_tolerances(op.hermitian_part(), tol)
    }

    /// Wraps an operator already known to satisfy the invariants.
    pub(crate) fn trusted(op: Operator) -> Self {
        Self { op }
    }

    /// |k><k| on a single subsystem of dimension `d`.
    pub fn basis_state(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::InvalidInput(format!(
                "basis index {k} out of range for dimension {d}"
            )));
        }
        let mut m = DMatrix::zeros(d, d);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(Self {
            op: Operator::from_matrix(m)?,
        })
    }

    pub fn maximally_mixed(dims: &[usize]) -> Self {
        let side: usize = dims.iter().product();
        Self {
            op: Operator::identity(dims).scale_real(1.0 / side as f64),
        }
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let entries: Vec<C64> = probs.iter().map(|&p| C64::new(p, 0.0)).collect();
        Self::new(Operator::diagonal(&entries))
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn side(&self) -> usize {
        self.op.side()
    }

    /// Real part of Tr(O ρ).
    pub fn expect(&self, observable: &Operator) -> f64 {
        observable.expectation(&self.op).re
    }

    pub fn purity(&self) -> f64 {
        self.op.expectation(&self.op).re
    }

    pub fn population(&self, k: usize) -> f64 {
        self.op.get(k, k).re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            op: self.op.tensor(&other.op),
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        Ok(Self {
            op: partial_trace_op(&self.op, keep)?,
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.op)
    }
}

/// Normalized state vector over a list of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    dims: Vec<usize>,
}

impl PureState {
    pub const NORM_TOLERANCE: f64 = 1e-10;

    pub fn new(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidInput(format!(
                "subsystem dimensions must be non-empty and positive, got {dims:?}"
            )));
        }
        let side: usize = dims.iter().product();
        if side != amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} imply {side} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::Invariant(format!(
                "pure state squared norm {norm_sq} differs from 1"
            )));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Computational basis vector |index> on a single subsystem.
    pub fn basis(d: usize, index: usize) -> Result<Self> {
        if index >= d {
            return Err(Error::InvalidInput(format!(
                "basis index {index} out of range for dimension {d}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); d];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(amps, vec![d])
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn to_density(&self) -> DensityMatrix {
        let op = Operator::outer(&self.amplitudes, &self.amplitudes, &self.dims)
            .expect("pure state layout is consistent");
        DensityMatrix::trusted(op)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for &a in &self.amplitudes {
            for &b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState {
            amplitudes: amps,
            dims,
        }
    }
}
