//! Quantum-optics scenarios built on a time-discretized input field: each
//! time bin of the field becomes one ancilla, coupled with g = √(γ/dt).
//!
//! Ancillas carry no free Hamiltonian (interaction picture with respect to
//! the free field).

mod convergence;
mod runs;
mod witness;

use std::f64::consts::PI;

use crate::bath::{coherent_bath, product_bath, single_photon_bath, BathSpec};
use crate::collision::{CollisionSpec, Coupling, Observable};
use crate::error::{Error, Result};
use crate::qcore::{hermitian_eigen, pauli, DensityMatrix, Operator, C64};

pub use convergence::{convergence_study, ConvergenceReport, ConvergenceRow, CouplingScaling};
pub use runs::{
    bloch_run, continuum_generator, max_trace_distance, single_photon_run,
    single_photon_run_with_pair, spontaneous_emission_run, BlochRun, EmissionRun, SinglePhotonRun,
    REFERENCE_REFINEMENT,
};
pub use witness::{nm_witness, NmReport, REVIVAL_EPS};

/// Time-domain description of a single-photon wavepacket.
#[derive(Clone, Debug, PartialEq)]
pub enum Envelope {
    /// Amplitude ∝ exp(−(t − center)² / 4 width²).
    Gaussian { center: f64, width: f64 },
    /// Spectral amplitudes ψ(ω) on the bins
    /// `[omega_start + k·d_omega, omega_start + (k+1)·d_omega)`, sampled at
    /// bin midpoints.
    Tabulated {
        omega_start: f64,
        d_omega: f64,
        values: Vec<C64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldKind {
    Vacuum,
    /// Single-mode coherent state of amplitude `z` at carrier `omega`.
    Coherent {
        z: C64,
        omega: f64,
    },
    SinglePhoton(Envelope),
}

/// System Hamiltonian, coupling operator b and initial state.
#[derive(Clone, Debug)]
pub struct SystemConfig {
    pub h_sys: Operator,
    pub b: Operator,
    pub rho0: DensityMatrix,
}

impl SystemConfig {
    /// Two-level emitter with H_S = ω0 |e><e| and b = σ₋.
    pub fn two_level(omega0: f64, rho0: DensityMatrix) -> Self {
        Self {
            h_sys: pauli::excited_projector().scale_real(omega0),
            b: pauli::sigma_minus(),
            rho0,
        }
    }

    pub fn two_level_excited(omega0: f64) -> Self {
        Self::two_level(omega0, DensityMatrix::basis_state(2, 1).unwrap())
    }
}

#[derive(Clone, Debug)]
pub struct FieldConfig {
    pub kind: FieldKind,
    pub gamma: f64,
    pub t_final: f64,
    pub n_steps: usize,
    pub system: SystemConfig,
    /// Ancilla Fock truncation.
    pub d_anc: usize,
}

/// Default truncation: qubit ancillas for vacuum and single-photon fields,
/// eight levels for coherent drives.
pub fn default_truncation(kind: &FieldKind) -> usize {
    match kind {
        FieldKind::Coherent { .. } => 8,
        _ => 2,
    }
}

impl FieldConfig {
    pub fn new(
        kind: FieldKind,
        gamma: f64,
        t_final: f64,
        n_steps: usize,
        system: SystemConfig,
    ) -> Result<Self> {
        let d_anc = default_truncation(&kind);
        let cfg = Self {
            kind,
            gamma,
            t_final,
            n_steps,
            system,
            d_anc,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_truncation(mut self, d_anc: usize) -> Result<Self> {
        self.d_anc = d_anc;
        self.validate()?;
        Ok(self)
    }

    pub fn with_n_steps(&self, n_steps: usize) -> Result<Self> {
        let mut out = self.clone();
        out.n_steps = n_steps;
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidInput("gamma must be positive".into()));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidInput("t_final must be positive".into()));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidInput("n_steps must be at least 1".into()));
        }
        if self.d_anc < 2 {
            return Err(Error::InvalidInput(
                "ancilla truncation must be at least 2".into(),
            ));
        }
        if matches!(self.kind, FieldKind::SinglePhoton(_)) && self.d_anc != 2 {
            return Err(Error::InvalidInput(
                "single-photon baths use qubit ancillas (d_anc = 2)".into(),
            ));
        }
        let s = &self.system;
        if s.h_sys.dims() != s.b.dims() || s.rho0.dims() != s.b.dims() {
            return Err(Error::DimensionMismatch(format!(
                "system parts disagree: H_S {:?}, b {:?}, rho0 {:?}",
                s.h_sys.dims(),
                s.b.dims(),
                s.rho0.dims()
            )));
        }
        match &self.kind {
            FieldKind::Coherent { z, omega } => {
                if !(z.re.is_finite() && z.im.is_finite() && omega.is_finite()) {
                    return Err(Error::InvalidInput(
                        "coherent amplitude must be finite".into(),
                    ));
                }
            }
            FieldKind::SinglePhoton(Envelope::Gaussian { center, width }) => {
                if !(width > &0.0 && width.is_finite() && center.is_finite()) {
                    return Err(Error::InvalidInput(
                        "Gaussian envelope width must be positive".into(),
                    ));
                }
            }
            FieldKind::SinglePhoton(Envelope::Tabulated {
                d_omega,
                values,
                omega_start,
            }) => {
                if !(d_omega > &0.0 && omega_start.is_finite()) || values.is_empty() {
                    return Err(Error::InvalidInput(
                        "tabulated spectrum needs positive bin width and at least one value".into(),
                    ));
                }
            }
            FieldKind::Vacuum => {}
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    /// Observables recorded by every scenario: b†b (the excited population
    /// ρ_ee of a two-level emitter), b + b† and i(b† − b).
    pub fn observables(&self) -> Vec<Observable> {
        let b = &self.system.b;
        let bd = b.dagger();
        vec![
            Observable::new("rho_ee", &bd * b),
            Observable::new("sigma_x", b + &bd),
            Observable::new("sigma_y", (&bd - b).scale(C64::new(0.0, 1.0))),
        ]
    }
}

/// Discretized single-photon amplitudes φ_n, n = 1..N (unnormalized).
pub fn photon_amplitudes(envelope: &Envelope, dt: f64, n: usize) -> Vec<C64> {
    let midpoint = |k: usize| (k as f64 - 0.5) * dt;
    match envelope {
        Envelope::Gaussian { center, width } => {
            let norm = (2.0 * PI * width * width).powf(-0.25);
            (1..=n)
                .map(|k| {
                    let x = midpoint(k) - center;
                    C64::new(
                        dt.sqrt() * norm * (-x * x / (4.0 * width * width)).exp(),
                        0.0,
                    )
                })
                .collect()
        }
        Envelope::Tabulated {
            omega_start,
            d_omega,
            values,
        } => (1..=n)
            .map(|k| {
                let t = midpoint(k);
                let sum: C64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, psi)| {
                        let w = omega_start + (j as f64 + 0.5) * d_omega;
                        psi * C64::from_polar(1.0, -w * t)
                    })
                    .sum();
                sum * (*d_omega * (dt / (2.0 * PI)).sqrt())
            })
            .collect(),
    }
}

/// Collision model of the discretized input field: dt = t/N,
/// V = √(γ/dt)(b α† + b† α), and one ancilla per time bin in the state the
/// field prescribes.
pub fn discretize_input_output(cfg: &FieldConfig) -> Result<(CollisionSpec, BathSpec)> {
    cfg.validate()?;
    let dt = cfg.dt();
    let n = cfg.n_steps;
    let spec = CollisionSpec::new(
        cfg.system.h_sys.clone(),
        cfg.system.b.clone(),
        Coupling::Rate(cfg.gamma),
        dt,
        n,
        cfg.d_anc,
    )?;
    let bath = match &cfg.kind {
        FieldKind::Vacuum => product_bath(&DensityMatrix::basis_state(cfg.d_anc, 0)?, n)?,
        FieldKind::Coherent { z, omega } => coherent_bath(*z, *omega, dt, n, cfg.d_anc)?,
        FieldKind::SinglePhoton(env) => {
            let phis = photon_amplitudes(env, dt, n);
            single_photon_bath(|k| phis[k - 1], n)?
        }
    };
    Ok((spec, bath))
}

/// |1 − Σ|φ_n|²| of the discretized photon before renormalization.
pub fn quadrature_error(bath: &BathSpec) -> f64 {
    let f = bath.diagnostics().normalization_factor;
    (1.0 - 1.0 / (f * f)).abs()
}

/// Orthogonal pair of eigenprojectors of b†b with the largest and smallest
/// eigenvalue.
pub fn extremal_pair(b: &Operator) -> (DensityMatrix, DensityMatrix) {
    let n = &b.dagger() * b;
    let (_, vecs) = hermitian_eigen(&n);
    let last = vecs.ncols() - 1;
    let proj = |k: usize| {
        let v: Vec<C64> = vecs.column(k).iter().copied().collect();
        DensityMatrix::new(Operator::outer(&v, &v, b.dims()).unwrap()).unwrap()
    };
    (proj(last), proj(0))
}
