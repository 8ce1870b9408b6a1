//! Collision dynamics: per-collision unitaries, reduced evolution through a
//! product bath, joint evolution through a correlated bath, and Choi-matrix
//! tests of complete positivity.

mod choi;
mod correlated;

use crate::bath::{BathKind, BathSpec};
use crate::error::{Error, Result};
use crate::qcore::{
    annihilator, expm, min_eigenvalue, trace_out, DensityMatrix, Operator, Tolerances, C64,
};

pub use choi::{
    choi_from_superoperator, choi_of_collision, choi_of_collision_at, reconstruct_step_map, StepMap,
};
pub use correlated::{run_correlated, run_correlated_with_cap, DEFAULT_JOINT_DIM_CAP};

/// How the system–ancilla coupling strength is specified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coupling {
    /// Fixed coupling frequency g, independent of the step.
    RawG(f64),
    /// Fixed decay rate γ; the coupling is g = √(γ/dt).
    Rate(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SystemHamiltonian {
    Constant(Operator),
    /// `ops[n - 1]` acts during collision `n`.
    Stepwise(Vec<Operator>),
}

/// Parameters of a collision model with interaction
/// V = g (b ⊗ α† + b† ⊗ α) between system and a truncated bosonic ancilla.
#[derive(Clone, Debug)]
pub struct CollisionSpec {
    h_sys: SystemHamiltonian,
    b: Operator,
    coupling: Coupling,
    dt: f64,
    n_steps: usize,
    d_anc: usize,
}

fn check_hermitian(op: &Operator, what: &str) -> Result<()> {
    let defect = op.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "{what} must be Hermitian (defect {defect:e})"
        )));
    }
    Ok(())
}

impl CollisionSpec {
    pub fn new(
        h_sys: Operator,
        b: Operator,
        coupling: Coupling,
        dt: f64,
        n_steps: usize,
        d_anc: usize,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if d_anc < 2 {
            return Err(Error::InvalidInput(format!(
                "ancilla dimension must be at least 2, got {d_anc}"
            )));
        }
        let strength = match coupling {
            Coupling::RawG(g) => g,
            Coupling::Rate(gamma) => gamma,
        };
        if !(strength >= 0.0 && strength.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "coupling must be finite and non-negative, got {strength}"
            )));
        }
        if h_sys.dims() != b.dims() {
            return Err(Error::DimensionMismatch(format!(
                "system Hamiltonian dims {:?} vs coupling operator dims {:?}",
                h_sys.dims(),
                b.dims()
            )));
        }
        check_hermitian(&h_sys, "system Hamiltonian")?;
        Ok(Self {
            h_sys: SystemHamiltonian::Constant(h_sys),
            b,
            coupling,
            dt,
            n_steps,
            d_anc,
        })
    }

    /// Replaces the system Hamiltonian by a per-step schedule.
    pub fn with_stepwise_hamiltonian(mut self, ops: Vec<Operator>) -> Result<Self> {
        if ops.len() < self.n_steps {
            return Err(Error::InvalidInput(format!(
                "Hamiltonian schedule covers {} steps, need {}",
                ops.len(),
                self.n_steps
            )));
        }
        for op in &ops {
            if op.dims() != self.b.dims() {
                return Err(Error::DimensionMismatch(format!(
                    "scheduled Hamiltonian dims {:?} vs system dims {:?}",
                    op.dims(),
                    self.b.dims()
                )));
            }
            check_hermitian(op, "scheduled Hamiltonian")?;
        }
        self.h_sys = SystemHamiltonian::Stepwise(ops);
        Ok(self)
    }

    pub fn with_n_steps(&self, n_steps: usize) -> Result<Self> {
        if let SystemHamiltonian::Stepwise(ops) = &self.h_sys {
            if ops.len() < n_steps {
                return Err(Error::InvalidInput(format!(
                    "Hamiltonian schedule covers {} steps, need {n_steps}",
                    ops.len()
                )));
            }
        }
        let mut out = self.clone();
        out.n_steps = n_steps;
        Ok(out)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn d_anc(&self) -> usize {
        self.d_anc
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn b(&self) -> &Operator {
        &self.b
    }

    pub fn system_dims(&self) -> &[usize] {
        self.b.dims()
    }

    pub fn system_hamiltonian(&self) -> &SystemHamiltonian {
        &self.h_sys
    }

    /// Coupling frequency g.
    pub fn g(&self) -> f64 {
        match self.coupling {
            Coupling::RawG(g) => g,
            Coupling::Rate(gamma) => (gamma / self.dt).sqrt(),
        }
    }

    /// Dissipation rate Γ = g²·dt, returned as γ itself in rate mode.
    pub fn rate(&self) -> f64 {
        match self.coupling {
            Coupling::RawG(g) => g * g * self.dt,
            Coupling::Rate(gamma) => gamma,
        }
    }

    /// System Hamiltonian active during collision `step` (1-based).
    pub fn h_sys(&self, step: usize) -> &Operator {
        match &self.h_sys {
            SystemHamiltonian::Constant(h) => h,
            SystemHamiltonian::Stepwise(ops) => &ops[step.clamp(1, ops.len()) - 1],
        }
    }

    /// Dimensionless interaction v = b ⊗ α† + b† ⊗ α on system ⊗ ancilla.
    pub fn dimensionless_interaction(&self) -> Operator {
        let a = annihilator(self.d_anc).expect("d_anc validated");
        &self.b.tensor(&a.dagger()) + &self.b.dagger().tensor(&a)
    }

    /// V = g·v.
    pub fn interaction(&self) -> Operator {
        self.dimensionless_interaction().scale_real(self.g())
    }
}

/// A named observable recorded along a trajectory.
#[derive(Clone, Debug)]
pub struct Observable {
    pub name: String,
    pub op: Operator,
}

impl Observable {
    pub fn new(name: impl Into<String>, op: Operator) -> Self {
        Self {
            name: name.into(),
            op,
        }
    }
}

/// System states sampled at t_0 = 0, t_1, …, t_N, with expectation values
/// Re Tr(O ρ_n) for each recorded observable.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub observables: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub(crate) fn start(rho0: &DensityMatrix, observables: &[Observable], capacity: usize) -> Self {
        let mut t = Self {
            times: Vec::with_capacity(capacity),
            states: Vec::with_capacity(capacity),
            observables: observables
                .iter()
                .map(|o| (o.name.clone(), Vec::with_capacity(capacity)))
                .collect(),
        };
        t.push(0.0, rho0.clone(), observables);
        t
    }

    pub(crate) fn push(&mut self, time: f64, rho: DensityMatrix, observables: &[Observable]) {
        for ((_, series), obs) in self.observables.iter_mut().zip(observables) {
            series.push(rho.expect(&obs.op));
        }
        self.times.push(time);
        self.states.push(rho);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

/// U_n = exp(−i (H_S ⊗ I + V) dt) on system ⊗ ancilla.
pub fn collision_unitary(spec: &CollisionSpec, step: usize) -> Operator {
    let h = &spec.h_sys(step).tensor(&Operator::identity(&[spec.d_anc])) + &spec.interaction();
    expm(&h, C64::new(0.0, -spec.dt))
}

/// Tr_anc{ U (x ⊗ η) U† } for an arbitrary system operator x.
pub fn apply_collision_map(x: &Operator, eta: &DensityMatrix, u: &Operator) -> Result<Operator> {
    let joint = x.tensor(eta.op());
    if joint.dims() != u.dims() {
        return Err(Error::DimensionMismatch(format!(
            "collision unitary dims {:?} vs system ⊗ ancilla dims {:?}",
            u.dims(),
            joint.dims()
        )));
    }
    let evolved = &(u * &joint) * &u.dagger();
    trace_out(&evolved, x.dims().len())
}

/// One collision of the system with a fresh ancilla.
pub fn collide_once(
    rho: &DensityMatrix,
    eta: &DensityMatrix,
    u: &Operator,
) -> Result<DensityMatrix> {
    let out = apply_collision_map(rho.op(), eta, u)?;
    DensityMatrix::from_evolved(out, Tolerances::RUN)
}

pub(crate) fn check_run_state(op: Operator, step: usize) -> Result<DensityMatrix> {
    let op = op.hermitian_part();
    DensityMatrix::with_tolerances(op.clone(), Tolerances::RUN).map_err(|e| {
        let min_eig = min_eigenvalue(&op);
        if min_eig < Tolerances::RUN.min_eigenvalue {
            Error::PsdBreach { step, min_eig }
        } else {
            Error::Invariant(format!("step {step}: {e}"))
        }
    })
}

fn check_system(spec: &CollisionSpec, rho0: &DensityMatrix) -> Result<()> {
    if rho0.dims() != spec.system_dims() {
        return Err(Error::DimensionMismatch(format!(
            "initial state dims {:?} vs system dims {:?}",
            rho0.dims(),
            spec.system_dims()
        )));
    }
    Ok(())
}

fn check_bath_len(spec: &CollisionSpec, bath: &BathSpec) -> Result<()> {
    if bath.d() != spec.d_anc() {
        return Err(Error::DimensionMismatch(format!(
            "bath ancilla dimension {} vs collision ancilla dimension {}",
            bath.d(),
            spec.d_anc()
        )));
    }
    if bath.n_steps() < spec.n_steps() {
        return Err(Error::InvalidInput(format!(
            "bath holds {} ancillas, run needs {}",
            bath.n_steps(),
            spec.n_steps()
        )));
    }
    Ok(())
}

/// ρ_n = ℰ_n ∘ … ∘ ℰ_1 [ρ_0] through a product bath.
pub fn run_product(
    spec: &CollisionSpec,
    bath: &BathSpec,
    rho0: &DensityMatrix,
    observables: &[Observable],
) -> Result<Trajectory> {
    check_system(spec, rho0)?;
    check_bath_len(spec, bath)?;
    let constant_u = match (spec.system_hamiltonian(), bath.kind()) {
        (SystemHamiltonian::Constant(_), _) => Some(collision_unitary(spec, 1)),
        _ => None,
    };
    let mut traj = Trajectory::start(rho0, observables, spec.n_steps() + 1);
    let mut rho = rho0.clone();
    for step in 1..=spec.n_steps() {
        let eta = match bath.kind() {
            BathKind::Product { eta } => eta,
            BathKind::ProductStepDependent { etas } => &etas[step - 1],
            BathKind::CorrelatedPure { .. } => {
                return Err(Error::InvalidInput(
                    "correlated baths must be run with run_correlated".into(),
                ))
            }
        };
        let stepped;
        let u = match &constant_u {
            Some(u) => u,
            None => {
                stepped = collision_unitary(spec, step);
                &stepped
            }
        };
        let out = apply_collision_map(rho.op(), eta, u)?;
        rho = check_run_state(out, step)?;
        traj.push(step as f64 * spec.dt(), rho.clone(), observables);
    }
    Ok(traj)
}
