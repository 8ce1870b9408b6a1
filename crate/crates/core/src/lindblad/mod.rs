//! Emergent Lindblad generators of a collision model and a fixed-step
//! integrator for (possibly time-dependent) Lindblad master equations.

mod integrate;

use nalgebra::DMatrix;

use crate::bath::BathSpec;
use crate::collision::{CollisionSpec, Coupling};
use crate::error::{Error, Result};
use crate::qcore::{hermitian_eigen, partial_trace_op, DensityMatrix, Operator, C64};

pub use integrate::integrate_me;

/// Eigen-branches of the ancilla state with weight at or below this are
/// dropped before forming jump operators.
pub const P_FLOOR: f64 = 1e-12;

/// Jump operators whose entries are all below this are treated as zero.
const ZERO_JUMP: f64 = 1e-14;

/// A jump operator with its rate. `label = (i, j)` records the pair of
/// ancilla eigenvectors it was built from, ⟨i| v |j⟩.
#[derive(Clone, Debug)]
pub struct Jump {
    pub op: Operator,
    pub rate: f64,
    pub label: (usize, usize),
}

impl Jump {
    pub fn new(op: Operator, rate: f64) -> Self {
        Self {
            op,
            rate,
            label: (0, 0),
        }
    }
}

/// Piecewise-constant generator: entry `k` holds on
/// `[t0 + k·step, t0 + (k+1)·step)`; times outside clamp to the end entries.
#[derive(Clone, Debug)]
pub struct GeneratorSchedule {
    pub t0: f64,
    pub step: f64,
    pub entries: Vec<(Operator, Vec<Jump>)>,
}

impl GeneratorSchedule {
    fn index(&self, t: f64) -> usize {
        let k = ((t - self.t0) / self.step).floor();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.entries.len() - 1)
        }
    }
}

#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    h_eff: Operator,
    jumps: Vec<Jump>,
    schedule: Option<GeneratorSchedule>,
    diagnostics: Vec<String>,
}

fn validate_parts(h: &Operator, jumps: &[Jump]) -> Result<()> {
    let defect = h.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::Invariant(format!(
            "effective Hamiltonian not Hermitian (defect {defect:e})"
        )));
    }
    for j in jumps {
        if j.op.dims() != h.dims() {
            return Err(Error::DimensionMismatch(format!(
                "jump dims {:?} vs Hamiltonian dims {:?}",
                j.op.dims(),
                h.dims()
            )));
        }
        if !(j.rate >= 0.0 && j.rate.is_finite()) {
            return Err(Error::Invariant(format!(
                "jump rates must be finite and non-negative, got {}",
                j.rate
            )));
        }
    }
    Ok(())
}

impl LindbladGenerator {
    pub fn new(h_eff: Operator, jumps: Vec<Jump>) -> Result<Self> {
        validate_parts(&h_eff, &jumps)?;
        Ok(Self {
            h_eff,
            jumps,
            schedule: None,
            diagnostics: Vec::new(),
        })
    }

    /// Time-dependent generator from a piecewise-constant schedule.
    pub fn from_schedule(schedule: GeneratorSchedule) -> Result<Self> {
        let Some((h0, j0)) = schedule.entries.first().cloned() else {
            return Err(Error::InvalidInput("generator schedule is empty".into()));
        };
        if !(schedule.step > 0.0 && schedule.step.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "schedule step must be positive, got {}",
                schedule.step
            )));
        }
        for (h, jumps) in &schedule.entries {
            validate_parts(h, jumps)?;
            if h.dims() != h0.dims() {
                return Err(Error::DimensionMismatch(
                    "schedule entries act on different systems".into(),
                ));
            }
        }
        Ok(Self {
            h_eff: h0,
            jumps: j0,
            schedule: Some(schedule),
            diagnostics: Vec::new(),
        })
    }

    pub fn zero(dims: &[usize]) -> Self {
        Self {
            h_eff: Operator::zeros(dims),
            jumps: Vec::new(),
            schedule: None,
            diagnostics: Vec::new(),
        }
    }

    pub fn h_eff(&self) -> &Operator {
        &self.h_eff
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn schedule(&self) -> Option<&GeneratorSchedule> {
        self.schedule.as_ref()
    }

    pub fn is_time_dependent(&self) -> bool {
        self.schedule.is_some()
    }

    pub fn dims(&self) -> &[usize] {
        self.h_eff.dims()
    }

    /// Warnings raised while the generator was derived.
    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    /// Hamiltonian and jumps in force at time `t`.
    pub fn at(&self, t: f64) -> (&Operator, &[Jump]) {
        match &self.schedule {
            Some(s) => {
                let (h, j) = &s.entries[s.index(t)];
                (h, j)
            }
            None => (&self.h_eff, &self.jumps),
        }
    }
}

/// −i[H, x] + Σ Γ (L x L† − ½{L†L, x}).
pub fn lindbladian(h: &Operator, jumps: &[Jump], x: &Operator) -> Operator {
    let mut out = h.commutator(x).scale(C64::new(0.0, -1.0));
    for j in jumps {
        out = &out + &dissipator_term(&j.op, x).scale_real(j.rate);
    }
    out
}

fn dissipator_term(l: &Operator, x: &Operator) -> Operator {
    let ld = l.dagger();
    let ldl = &ld * l;
    &(&(l * x) * &ld) - &ldl.anticommutator(x).scale_real(0.5)
}

/// Generator applied to a state at t = 0.
pub fn apply_generator(gen: &LindbladGenerator, rho: &DensityMatrix) -> Result<Operator> {
    apply_generator_at(gen, 0.0, rho.op())
}

pub fn apply_generator_at(gen: &LindbladGenerator, t: f64, x: &Operator) -> Result<Operator> {
    if x.dims() != gen.dims() {
        return Err(Error::DimensionMismatch(format!(
            "state dims {:?} vs generator dims {:?}",
            x.dims(),
            gen.dims()
        )));
    }
    let (h, jumps) = gen.at(t);
    Ok(lindbladian(h, jumps, x))
}

fn split_dims(v: &Operator, eta: &DensityMatrix) -> Result<Vec<usize>> {
    let dims = v.dims();
    if eta.dims().len() != 1 || dims.len() < 2 || dims[dims.len() - 1] != eta.side() {
        return Err(Error::DimensionMismatch(format!(
            "interaction dims {:?} do not end in the ancilla dimension {}",
            dims,
            eta.side()
        )));
    }
    Ok(dims[..dims.len() - 1].to_vec())
}

/// H′_S = Tr_anc{ V (I ⊗ η) }.
pub fn effective_hamiltonian(v_int: &Operator, eta: &DensityMatrix) -> Result<Operator> {
    let sys = split_dims(v_int, eta)?;
    let weighted = v_int * &Operator::identity(&sys).tensor(eta.op());
    partial_trace_op(&weighted, &(0..sys.len()).collect::<Vec<_>>())
}

/// Eigen-decomposition η = Σ p_k |k><k| with weights in descending order.
/// Diagonal states keep the computational (Fock) basis and its ordering;
/// otherwise each eigenvector is phased so its largest entry is real
/// positive.
pub fn ancilla_eigenbasis(eta: &DensityMatrix) -> (Vec<f64>, Vec<Vec<C64>>) {
    let d = eta.side();
    let off_diagonal = (0..d)
        .flat_map(|r| (0..d).filter(move |&c| c != r).map(move |c| (r, c)))
        .fold(0.0_f64, |m, (r, c)| m.max(eta.op().get(r, c).norm()));
    if off_diagonal == 0.0 {
        let probs = (0..d).map(|k| eta.population(k)).collect();
        let basis = (0..d)
            .map(|k| {
                let mut v = vec![C64::new(0.0, 0.0); d];
                v[k] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        return (probs, basis);
    }
    let (vals, vecs) = hermitian_eigen(eta.op());
    let mut probs = Vec::with_capacity(d);
    let mut basis = Vec::with_capacity(d);
    for k in (0..d).rev() {
        let mut v: Vec<C64> = vecs.column(k).iter().copied().collect();
        let pivot = v
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(C64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
        probs.push(vals[k]);
        basis.push(v);
    }
    (probs, basis)
}

/// ⟨bra| v |ket⟩ on the ancilla factor, leaving a system operator.
fn ancilla_matrix_element(v: &Operator, sys: &[usize], bra: &[C64], ket: &[C64]) -> Operator {
    let d_s: usize = sys.iter().product();
    let d_a = bra.len();
    let m = v.matrix();
    let out = DMatrix::from_fn(d_s, d_s, |r, c| {
        let mut acc = C64::new(0.0, 0.0);
        for (a, ba) in bra.iter().enumerate() {
            if *ba == C64::new(0.0, 0.0) {
                continue;
            }
            for (a2, kb) in ket.iter().enumerate() {
                acc += ba.conj() * m[(r * d_a + a, c * d_a + a2)] * kb;
            }
        }
        acc
    });
    Operator::new(out, sys.to_vec()).expect("system dims")
}

/// Jumps L_ij = √p_j ⟨i| v |j⟩ over an explicit ancilla eigenbasis, all at
/// rate `gamma`. Branches with p_j ≤ [`P_FLOOR`] and vanishing operators are
/// omitted.
pub fn jumps_in_basis(
    v: &Operator,
    probs: &[f64],
    basis: &[Vec<C64>],
    gamma: f64,
) -> Result<Vec<Jump>> {
    let d_a = basis.len();
    let dims = v.dims();
    if dims.len() < 2 || dims[dims.len() - 1] != d_a || probs.len() != d_a {
        return Err(Error::DimensionMismatch(format!(
            "interaction dims {dims:?} vs ancilla basis of size {d_a}"
        )));
    }
    let sys = &dims[..dims.len() - 1];
    let mut jumps = Vec::new();
    for (j, &p) in probs.iter().enumerate() {
        if p <= P_FLOOR {
            continue;
        }
        for i in 0..d_a {
            let l = ancilla_matrix_element(v, sys, &basis[i], &basis[j]).scale_real(p.sqrt());
            if l.max_abs() > ZERO_JUMP {
                jumps.push(Jump {
                    op: l,
                    rate: gamma,
                    label: (i, j),
                });
            }
        }
    }
    Ok(jumps)
}

/// Jump operators of the dimensionless interaction `v` for ancilla state
/// `eta`, each with rate `gamma`.
pub fn jump_operators(v: &Operator, eta: &DensityMatrix, gamma: f64) -> Result<Vec<Jump>> {
    split_dims(v, eta)?;
    let (probs, basis) = ancilla_eigenbasis(eta);
    jumps_in_basis(v, &probs, &basis, gamma)
}

fn step_generator(
    spec: &CollisionSpec,
    eta: &DensityMatrix,
    step: usize,
    diagnostics: &mut Vec<String>,
) -> Result<(Operator, Vec<Jump>)> {
    if eta.side() != spec.d_anc() {
        return Err(Error::DimensionMismatch(format!(
            "ancilla state side {} vs collision ancilla dimension {}",
            eta.side(),
            spec.d_anc()
        )));
    }
    let v = spec.dimensionless_interaction();
    let h_prime = effective_hamiltonian(&v, eta)?.scale_real(spec.g());
    let jumps = jump_operators(&v, eta, spec.rate())?;
    let h_sys = spec.h_sys(step);

    let omega0 = hermitian_eigen(h_sys)
        .0
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    if omega0 * spec.dt() > 0.1 * spec.rate() && spec.rate() > 0.0 {
        diagnostics.push(format!(
            "step {step}: system frequency {omega0:.3e} is not small against the coupling \
             (ω0·dt = {:.3e} > 0.1·g²dt = {:.3e}); the generator is only first order in H_S",
            omega0 * spec.dt(),
            0.1 * spec.rate()
        ));
    }
    if matches!(spec.coupling(), Coupling::RawG(_)) && h_prime.max_abs() > 0.0 {
        diagnostics.push(format!(
            "step {step}: bath-induced Hamiltonian of size {:.3e} scales with g and is not renormalized",
            h_prime.max_abs()
        ));
    }
    Ok((h_sys + &h_prime, jumps))
}

/// Generator H_S + H′_S, {(L_ij, Γ)} of a single collision with ancilla
/// state `eta`, with Γ = g²·dt (γ itself in rate mode).
pub fn generator_from_collision(
    spec: &CollisionSpec,
    eta: &DensityMatrix,
) -> Result<LindbladGenerator> {
    let mut diagnostics = Vec::new();
    let (h, jumps) = step_generator(spec, eta, 1, &mut diagnostics)?;
    let mut gen = LindbladGenerator::new(h, jumps)?;
    gen.diagnostics = diagnostics;
    Ok(gen)
}

/// Step-dependent generator of a product bath; entry n covers the window
/// `[t_{n-1}, t_n)`.
pub fn generator_schedule_from_collision(
    spec: &CollisionSpec,
    bath: &BathSpec,
) -> Result<LindbladGenerator> {
    if !bath.is_product() {
        return Err(Error::InvalidInput(
            "a correlated bath has no Lindblad generator".into(),
        ));
    }
    let n = spec.n_steps().min(bath.n_steps()).max(1);
    let mut diagnostics = Vec::new();
    let mut entries = Vec::with_capacity(n);
    for step in 1..=n {
        let eta = bath.ancilla_state(step)?;
        entries.push(step_generator(spec, &eta, step, &mut diagnostics)?);
    }
    let mut gen = LindbladGenerator::from_schedule(GeneratorSchedule {
        t0: 0.0,
        step: spec.dt(),
        entries,
    })?;
    gen.diagnostics = diagnostics;
    Ok(gen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{annihilator, c64, displacement, pauli};

    fn interaction(b: &Operator, d: usize) -> Operator {
        let a = annihilator(d).unwrap();
        &b.tensor(&a.dagger()) + &b.dagger().tensor(&a)
    }

    #[test]
    fn vacuum_has_no_induced_hamiltonian() {
        let v = interaction(&pauli::sigma_minus(), 4).scale_real(7.0);
        let h = effective_hamiltonian(&v, &DensityMatrix::basis_state(4, 0).unwrap()).unwrap();
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn maximally_mixed_has_no_induced_hamiltonian() {
        let v = interaction(&pauli::sigma_minus(), 5).scale_real(3.0);
        let h = effective_hamiltonian(&v, &DensityMatrix::maximally_mixed(&[5])).unwrap();
        assert!(h.max_abs() < 1e-15);
    }

    #[test]
    fn coherent_induced_hamiltonian() {
        let (g, d) = (4.0, 12);
        let xi = c64(0.06, 0.08);
        let b = pauli::sigma_minus();
        let dop = displacement(xi, d).unwrap();
        let col: Vec<C64> = dop.matrix().column(0).iter().copied().collect();
        let eta = DensityMatrix::new(Operator::outer(&col, &col, &[d]).unwrap()).unwrap();
        let h = effective_hamiltonian(&interaction(&b, d).scale_real(g), &eta).unwrap();
        let expected = (&b.scale(xi.conj()) + &b.dagger().scale(xi)).scale_real(g);
        assert!((&h - &expected).max_abs() < 1e-6);
        assert!(h.hermiticity_defect() < 1e-10);
    }

    #[test]
    fn vacuum_jump_is_b() {
        let b = pauli::sigma_minus();
        let jumps = jump_operators(
            &interaction(&b, 2),
            &DensityMatrix::basis_state(2, 0).unwrap(),
            1.5,
        )
        .unwrap();
        assert_eq!(jumps.len(), 1);
        assert_eq!(jumps[0].label, (1, 0));
        assert_eq!(jumps[0].rate, 1.5);
        assert!((&jumps[0].op - &b).max_abs() < 1e-15);
    }

    #[test]
    fn fock_one_jumps() {
        // η = |1><1|, d = 3: L_01 = b†, L_21 = √2 b
        let b = pauli::sigma_minus();
        let jumps = jump_operators(
            &interaction(&b, 3),
            &DensityMatrix::basis_state(3, 1).unwrap(),
            1.0,
        )
        .unwrap();
        assert_eq!(jumps.len(), 2);
        let find = |label| jumps.iter().find(|j| j.label == label).unwrap();
        assert!((&find((0, 1)).op - &b.dagger()).max_abs() < 1e-15);
        assert!((&find((2, 1)).op - &b.scale_real(2f64.sqrt())).max_abs() < 1e-15);
    }

    #[test]
    fn degenerate_block_rotation_leaves_dissipator() {
        // η = diag(0.5, 0.25, 0.25): rotate the degenerate block by a unitary
        let b = pauli::sigma_minus();
        let v = interaction(&b, 3);
        let probs = [0.5, 0.25, 0.25];
        let e = |k: usize| {
            let mut x = vec![c64(0.0, 0.0); 3];
            x[k] = c64(1.0, 0.0);
            x
        };
        let fock: Vec<Vec<C64>> = (0..3).map(e).collect();
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let phase = C64::from_polar(1.0, 1.1);
        let rotated = vec![
            e(0),
            vec![c64(0.0, 0.0), c64(c, 0.0), phase * s],
            vec![c64(0.0, 0.0), -phase.conj() * s, c64(c, 0.0)],
        ];
        let j1 = jumps_in_basis(&v, &probs, &fock, 1.0).unwrap();
        let j2 = jumps_in_basis(&v, &probs, &rotated, 1.0).unwrap();
        let rho = DensityMatrix::new(
            Operator::from_rows(
                2,
                &[c64(0.3, 0.0), c64(0.1, 0.2), c64(0.1, -0.2), c64(0.7, 0.0)],
            )
            .unwrap(),
        )
        .unwrap();
        let zero = Operator::zeros(&[2]);
        let d1 = lindbladian(&zero, &j1, rho.op());
        let d2 = lindbladian(&zero, &j2, rho.op());
        assert!((&d1 - &d2).max_abs() < 1e-14);
    }

    #[test]
    fn generator_output_traceless_hermitian() {
        let h = pauli::sigma_x().scale_real(0.8);
        let jumps = vec![
            Jump::new(pauli::sigma_minus(), 1.3),
            Jump::new(pauli::sigma_z(), 0.4),
        ];
        let gen = LindbladGenerator::new(h, jumps).unwrap();
        let rho = DensityMatrix::new(
            Operator::from_rows(
                2,
                &[c64(0.6, 0.0), c64(0.2, -0.1), c64(0.2, 0.1), c64(0.4, 0.0)],
            )
            .unwrap(),
        )
        .unwrap();
        let out = apply_generator(&gen, &rho).unwrap();
        assert!(out.trace().norm() < 1e-12);
        assert!(out.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn decay_rates_by_hand() {
        let gen = LindbladGenerator::new(
            Operator::zeros(&[2]),
            vec![Jump::new(pauli::sigma_minus(), 2.0)],
        )
        .unwrap();
        let out = apply_generator(&gen, &DensityMatrix::basis_state(2, 1).unwrap()).unwrap();
        assert!((out.get(1, 1).re + 2.0).abs() < 1e-15);
        assert!((out.get(0, 0).re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn stationary_state() {
        let gen = LindbladGenerator::new(pauli::sigma_z(), vec![]).unwrap();
        let out = apply_generator(&gen, &DensityMatrix::diagonal(&[0.25, 0.75]).unwrap()).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn negative_rate_rejected() {
        let err = LindbladGenerator::new(
            Operator::zeros(&[2]),
            vec![Jump::new(pauli::sigma_z(), -0.1)],
        );
        assert!(err.is_err());
    }

    #[test]
    fn schedule_lookup_clamps() {
        let h = |x: f64| pauli::sigma_z().scale_real(x);
        let gen = LindbladGenerator::from_schedule(GeneratorSchedule {
            t0: 0.0,
            step: 0.5,
            entries: vec![(h(1.0), vec![]), (h(2.0), vec![]), (h(3.0), vec![])],
        })
        .unwrap();
        assert_eq!(gen.at(-1.0).0, &h(1.0));
        assert_eq!(gen.at(0.75).0, &h(2.0));
        assert_eq!(gen.at(10.0).0, &h(3.0));
    }
}
