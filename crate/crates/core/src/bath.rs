//! Ancilla streams: homogeneous product baths, step-dependent displaced
//! (coherent) product baths and single-excitation correlated baths.
//!
//! Steps are numbered from 1: collision `n` meets ancilla `n` at the end of
//! the window `[t_{n-1}, t_n]` with `t_n = n·dt`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qcore::{
    coherent_truncation_fidelity, displacement, hermitian_eigen, DensityMatrix, Operator,
    PureState, C64,
};

/// Largest number of ancillas a correlated pure state may span.
pub const MAX_CORRELATED_ANCILLAS: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub enum BathKind {
    /// Every ancilla starts in the same state.
    Product { eta: DensityMatrix },
    /// Ancilla `n` starts in `etas[n - 1]`.
    ProductStepDependent { etas: Vec<DensityMatrix> },
    /// Joint pure state of all ancillas (qubit truncation, ancilla 1 is the
    /// most significant factor) together with the single-excitation
    /// amplitudes it was built from.
    CorrelatedPure {
        state: PureState,
        amplitudes: Vec<C64>,
    },
}

/// Derived quantities recorded while building a bath.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BathDiagnostics {
    /// Per-step displacement amplitudes of a coherent bath.
    pub xis: Vec<C64>,
    /// Worst truncation defect of a displaced ancilla, |1 − ⟨ψ|ψ⟩_trunc|.
    pub truncation_fidelity: f64,
    /// Factor applied to a single-photon envelope to normalize it.
    pub normalization_factor: f64,
}

#[derive(Clone, Debug)]
pub struct BathSpec {
    d: usize,
    n_steps: usize,
    kind: BathKind,
    diagnostics: BathDiagnostics,
}

impl BathSpec {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn kind(&self) -> &BathKind {
        &self.kind
    }

    pub fn diagnostics(&self) -> &BathDiagnostics {
        &self.diagnostics
    }

    pub fn is_product(&self) -> bool {
        !matches!(self.kind, BathKind::CorrelatedPure { .. })
    }

    /// Initial marginal state of ancilla `step` (1-based).
    pub fn ancilla_state(&self, step: usize) -> Result<DensityMatrix> {
        if step == 0 || step > self.n_steps {
            return Err(Error::InvalidInput(format!(
                "ancilla {step} outside 1..={}",
                self.n_steps
            )));
        }
        match &self.kind {
            BathKind::Product { eta } => Ok(eta.clone()),
            BathKind::ProductStepDependent { etas } => Ok(etas[step - 1].clone()),
            BathKind::CorrelatedPure { state, .. } => Ok(qubit_marginal(state, step - 1)),
        }
    }

    /// Eigenprobabilities of the common ancilla state, in descending order.
    /// Only defined for homogeneous product baths.
    pub fn eigen_probabilities(&self) -> Option<Vec<f64>> {
        match &self.kind {
            BathKind::Product { eta } => {
                let (mut vals, _) = hermitian_eigen(eta.op());
                vals.reverse();
                Some(vals)
            }
            _ => None,
        }
    }
}

fn check_ancilla(eta: &DensityMatrix) -> Result<usize> {
    if eta.dims().len() != 1 || eta.side() < 2 {
        return Err(Error::DimensionMismatch(format!(
            "ancilla state must be a single subsystem of dimension >= 2, got dims {:?}",
            eta.dims()
        )));
    }
    Ok(eta.side())
}

/// Homogeneous product bath: `n` ancillas all prepared in `eta`.
pub fn product_bath(eta: &DensityMatrix, n: usize) -> Result<BathSpec> {
    let d = check_ancilla(eta)?;
    Ok(BathSpec {
        d,
        n_steps: n,
        kind: BathKind::Product { eta: eta.clone() },
        diagnostics: BathDiagnostics {
            normalization_factor: 1.0,
            ..Default::default()
        },
    })
}

/// Product bath with an individual initial state per ancilla.
pub fn product_bath_steps(etas: Vec<DensityMatrix>) -> Result<BathSpec> {
    let first = etas.first().ok_or_else(|| {
        Error::InvalidInput("step-dependent bath needs at least one state".into())
    })?;
    let d = check_ancilla(first)?;
    for (k, eta) in etas.iter().enumerate() {
        if check_ancilla(eta)? != d {
            return Err(Error::DimensionMismatch(format!(
                "ancilla {} has dimension {}, expected {d}",
                k + 1,
                eta.side()
            )));
        }
    }
    Ok(BathSpec {
        d,
        n_steps: etas.len(),
        kind: BathKind::ProductStepDependent { etas },
        diagnostics: BathDiagnostics {
            normalization_factor: 1.0,
            ..Default::default()
        },
    })
}

/// Displacement amplitude of the ancilla in window `step` for a coherent
/// drive of amplitude `z` at carrier frequency `omega`.
pub fn coherent_amplitude(z: C64, omega: f64, dt: f64, step: usize) -> C64 {
    let t = step as f64 * dt;
    z * C64::from_polar(1.0, omega * t) * (dt / (2.0 * PI)).sqrt()
}

/// Product of displaced vacua η_n = D(ξ_n)|0><0|D†(ξ_n), one per window.
pub fn coherent_bath(z: C64, omega: f64, dt: f64, n: usize, d: usize) -> Result<BathSpec> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidInput(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidInput(format!(
            "ancilla truncation must be at least 2, got {d}"
        )));
    }
    if z == C64::new(0.0, 0.0) {
        return product_bath(&DensityMatrix::basis_state(d, 0)?, n);
    }
    let xis: Vec<C64> = (1..=n)
        .map(|k| coherent_amplitude(z, omega, dt, k))
        .collect();
    let max_xi_sq = xis.iter().map(|x| x.norm_sqr()).fold(0.0, f64::max);
    if max_xi_sq >= d as f64 / 4.0 {
        return Err(Error::Truncation {
            max_xi_sq,
            required: 4.0 * max_xi_sq,
            d,
        });
    }
    let mut etas = Vec::with_capacity(n);
    let mut worst = 0.0_f64;
    for &xi in &xis {
        let dop = displacement(xi, d)?;
        let column: Vec<C64> = dop.matrix().column(0).iter().copied().collect();
        let eta = Operator::outer(&column, &column, &[d])?;
        etas.push(DensityMatrix::new(eta)?);
        worst = worst.max(coherent_truncation_fidelity(xi, d));
    }
    Ok(BathSpec {
        d,
        n_steps: n,
        kind: BathKind::ProductStepDependent { etas },
        diagnostics: BathDiagnostics {
            xis,
            truncation_fidelity: worst,
            normalization_factor: 1.0,
        },
    })
}

/// Single-excitation entangled bath Σ_n φ_n α†_n |0…0⟩ over `n` qubit
/// ancillas. `envelope(k)` supplies the unnormalized amplitude of step
/// `k` (1-based); the amplitudes are renormalized and the applied factor is
/// recorded in the diagnostics.
pub fn single_photon_bath<F>(envelope: F, n: usize) -> Result<BathSpec>
where
    F: Fn(usize) -> C64,
{
    if n == 0 {
        return Err(Error::InvalidInput(
            "single-photon bath needs at least one ancilla".into(),
        ));
    }
    if n > MAX_CORRELATED_ANCILLAS {
        return Err(Error::ResourceCap {
            required: 1 << n,
            cap: 1 << MAX_CORRELATED_ANCILLAS,
        });
    }
    let raw: Vec<C64> = (1..=n).map(envelope).collect();
    if raw.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::InvalidInput(
            "envelope amplitudes must be finite".into(),
        ));
    }
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidInput(
            "single-photon envelope is identically zero".into(),
        ));
    }
    let factor = 1.0 / norm;
    let amplitudes: Vec<C64> = raw.iter().map(|a| a * factor).collect();

    let mut joint = vec![C64::new(0.0, 0.0); 1 << n];
    for (k, &phi) in amplitudes.iter().enumerate() {
        joint[1 << (n - 1 - k)] = phi;
    }
    let state = PureState::new(joint, vec![2; n])?;
    Ok(BathSpec {
        d: 2,
        n_steps: n,
        kind: BathKind::CorrelatedPure { state, amplitudes },
        diagnostics: BathDiagnostics {
            normalization_factor: factor,
            ..Default::default()
        },
    })
}

/// Reduced state of qubit `index` (0-based, most significant first).
fn qubit_marginal(state: &PureState, index: usize) -> DensityMatrix {
    let n = state.dims().len();
    let amps = state.amplitudes();
    let bit = 1usize << (n - 1 - index);
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    for base in (0..amps.len()).filter(|i| i & bit == 0) {
        let pair = [amps[base], amps[base | bit]];
        for a in 0..2 {
            for b in 0..2 {
                rho[a][b] += pair[a] * pair[b].conj();
            }
        }
    }
    let op =
        Operator::from_rows(2, &[rho[0][0], rho[0][1], rho[1][0], rho[1][1]]).expect("2x2 layout");
    DensityMatrix::trusted(op)
}
