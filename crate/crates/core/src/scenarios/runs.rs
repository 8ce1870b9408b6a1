use std::f64::consts::PI;

use super::{
    discretize_input_output, extremal_pair, nm_witness, quadrature_error, FieldConfig, FieldKind,
    NmReport, REVIVAL_EPS,
};
use crate::bath::product_bath;
use crate::collision::{run_correlated, run_product, CollisionSpec, Coupling, Trajectory};
use crate::error::{Error, Result};
use crate::lindblad::{
    generator_from_collision, integrate_me, GeneratorSchedule, Jump, LindbladGenerator,
};
use crate::qcore::{trace_distance, DensityMatrix, Operator, C64};

/// Master-equation substeps per collision step.
pub const REFERENCE_REFINEMENT: usize = 10;

/// Largest trace distance between two trajectories sampled on the same grid.
pub fn max_trace_distance(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "trajectories have {} and {} samples",
            a.len(),
            b.len()
        )));
    }
    Ok(a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| trace_distance(x.op(), y.op()))
        .fold(0.0, f64::max))
}

/// Keeps every `every`-th sample.
pub(crate) fn subsample(traj: &Trajectory, every: usize) -> Trajectory {
    let pick = |v: &[f64]| v.iter().step_by(every).copied().collect::<Vec<_>>();
    Trajectory {
        times: pick(&traj.times),
        states: traj.states.iter().step_by(every).cloned().collect(),
        observables: traj
            .observables
            .iter()
            .map(|(n, v)| (n.clone(), pick(v)))
            .collect(),
    }
}

/// H_S + √(γ/2π)(z* e^{−iωt} b + z e^{iωt} b†): the classical drive of a
/// coherent field.
fn driven_hamiltonian(cfg: &FieldConfig, z: C64, omega: f64, t: f64) -> Operator {
    let b = &cfg.system.b;
    let amp = z * C64::from_polar((cfg.gamma / (2.0 * PI)).sqrt(), omega * t);
    &cfg.system.h_sys + &(&b.scale(amp.conj()) + &b.dagger().scale(amp))
}

/// Continuum master equation of the field: jump (b, γ), plus the classical
/// drive for a coherent field, tabulated at the midpoints of `n_substeps`
/// windows. Single-photon fields have no generator.
pub fn continuum_generator(cfg: &FieldConfig, n_substeps: usize) -> Result<LindbladGenerator> {
    let jumps = vec![Jump::new(cfg.system.b.clone(), cfg.gamma)];
    match cfg.kind {
        FieldKind::Vacuum => LindbladGenerator::new(cfg.system.h_sys.clone(), jumps),
        FieldKind::Coherent { z, omega } => {
            let h = cfg.t_final / n_substeps.max(1) as f64;
            let entries = (0..n_substeps.max(1))
                .map(|k| {
                    let t = (k as f64 + 0.5) * h;
                    (driven_hamiltonian(cfg, z, omega, t), jumps.clone())
                })
                .collect();
            LindbladGenerator::from_schedule(GeneratorSchedule {
                t0: 0.0,
                step: h,
                entries,
            })
        }
        FieldKind::SinglePhoton(_) => Err(Error::InvalidInput(
            "a single-photon field has no Lindblad generator".into(),
        )),
    }
}

#[derive(Clone, Debug)]
pub struct EmissionRun {
    pub collision: Trajectory,
    /// Master-equation trajectory on the collision grid.
    pub master: Trajectory,
    pub max_trace_distance: f64,
    pub endpoint_error: f64,
    pub generator_diagnostics: Vec<String>,
}

/// Vacuum-field decay: the collision model against the master equation of
/// its own single-collision generator.
pub fn spontaneous_emission_run(cfg: &FieldConfig) -> Result<EmissionRun> {
    if cfg.kind != FieldKind::Vacuum {
        return Err(Error::InvalidInput(
            "spontaneous emission needs a vacuum field".into(),
        ));
    }
    let (spec, bath) = discretize_input_output(cfg)?;
    let obs = cfg.observables();
    let collision = run_product(&spec, &bath, &cfg.system.rho0, &obs)?;
    let gen = generator_from_collision(&spec, &DensityMatrix::basis_state(cfg.d_anc, 0)?)?;
    let fine = integrate_me(
        &gen,
        &cfg.system.rho0,
        cfg.t_final,
        REFERENCE_REFINEMENT * cfg.n_steps,
        &obs,
    )?;
    let master = subsample(&fine, REFERENCE_REFINEMENT);
    let max_trace_distance = max_trace_distance(&collision, &master)?;
    let endpoint_error = endpoint_error(&collision, &master);
    Ok(EmissionRun {
        collision,
        master,
        max_trace_distance,
        endpoint_error,
        generator_diagnostics: gen.diagnostics().to_vec(),
    })
}

/// |Δρ_ee| at the final time.
pub(crate) fn endpoint_error(a: &Trajectory, b: &Trajectory) -> f64 {
    match (a.observable("rho_ee"), b.observable("rho_ee")) {
        (Some(x), Some(y)) => (x[x.len() - 1] - y[y.len() - 1]).abs(),
        _ => trace_distance(a.final_state().op(), b.final_state().op()),
    }
}

#[derive(Clone, Debug)]
pub struct BlochRun {
    /// Collision model with displaced ancillas.
    pub quantum: Trajectory,
    /// Driven master equation on the collision grid.
    pub master: Trajectory,
    /// Collision model with vacuum ancillas and the drive in H_S.
    pub semiclassical: Trajectory,
    /// g·ξ_n, the drive amplitude seen at step n.
    pub drive: Vec<C64>,
    /// Worst Fock-truncation defect over the displaced ancillas.
    pub truncation_fidelity: f64,
}

impl BlochRun {
    /// Largest trace distance between any two of the three trajectories.
    pub fn max_pairwise_distance(&self) -> f64 {
        [
            (&self.quantum, &self.master),
            (&self.quantum, &self.semiclassical),
            (&self.master, &self.semiclassical),
        ]
        .iter()
        .map(|(a, b)| max_trace_distance(a, b).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
    }
}

/// Coherently driven emitter, three ways.
pub fn bloch_run(cfg: &FieldConfig) -> Result<BlochRun> {
    let FieldKind::Coherent { z, omega } = cfg.kind else {
        return Err(Error::InvalidInput(
            "Bloch dynamics need a coherent field".into(),
        ));
    };
    let (spec, bath) = discretize_input_output(cfg)?;
    let obs = cfg.observables();
    let rho0 = &cfg.system.rho0;
    let quantum = run_product(&spec, &bath, rho0, &obs)?;

    let m = REFERENCE_REFINEMENT * cfg.n_steps;
    let gen = continuum_generator(cfg, m)?;
    let master = subsample(
        &integrate_me(&gen, rho0, cfg.t_final, m, &obs)?,
        REFERENCE_REFINEMENT,
    );

    let dt = cfg.dt();
    let driven: Vec<Operator> = (1..=cfg.n_steps)
        .map(|n| driven_hamiltonian(cfg, z, omega, n as f64 * dt))
        .collect();
    let sc_spec = CollisionSpec::new(
        cfg.system.h_sys.clone(),
        cfg.system.b.clone(),
        Coupling::Rate(cfg.gamma),
        dt,
        cfg.n_steps,
        2,
    )?
    .with_stepwise_hamiltonian(driven)?;
    let vacuum = product_bath(&DensityMatrix::basis_state(2, 0)?, cfg.n_steps)?;
    let semiclassical = run_product(&sc_spec, &vacuum, rho0, &obs)?;

    let g = spec.g();
    Ok(BlochRun {
        quantum,
        master,
        semiclassical,
        drive: bath.diagnostics().xis.iter().map(|x| x * g).collect(),
        truncation_fidelity: bath.diagnostics().truncation_fidelity,
    })
}

#[derive(Clone, Debug)]
pub struct SinglePhotonRun {
    pub first: Trajectory,
    pub second: Trajectory,
    pub witness: NmReport,
    /// |1 − Σ|φ_n|²| before renormalization.
    pub quadrature_error: f64,
}

/// Single-photon wavepacket hitting the emitter, run from the extremal
/// eigenprojectors of b†b, with the trace-distance memory witness.
pub fn single_photon_run(cfg: &FieldConfig) -> Result<SinglePhotonRun> {
    let (a, b) = extremal_pair(&cfg.system.b);
    single_photon_run_with_pair(cfg, &a, &b)
}

pub fn single_photon_run_with_pair(
    cfg: &FieldConfig,
    a: &DensityMatrix,
    b: &DensityMatrix,
) -> Result<SinglePhotonRun> {
    if !matches!(cfg.kind, FieldKind::SinglePhoton(_)) {
        return Err(Error::InvalidInput("needs a single-photon field".into()));
    }
    let (spec, bath) = discretize_input_output(cfg)?;
    let obs = cfg.observables();
    let first = run_correlated(&spec, &bath, a, &obs)?;
    let second = run_correlated(&spec, &bath, b, &obs)?;
    let witness = nm_witness(&first, &second, REVIVAL_EPS)?;
    Ok(SinglePhotonRun {
        first,
        second,
        witness,
        quadrature_error: quadrature_error(&bath),
    })
}
