use super::{lindbladian, LindbladGenerator};
use crate::collision::{check_run_state, Observable, Trajectory};
use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, Operator};

/// Classical RK4 with `n_substeps` equal steps over `[0, t_final]`. A
/// time-dependent generator is sampled once per substep, at its midpoint.
/// Every substep is recorded, re-symmetrized and checked against the run
/// tolerances.
pub fn integrate_me(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    t_final: f64,
    n_substeps: usize,
    observables: &[Observable],
) -> Result<Trajectory> {
    if n_substeps == 0 {
        return Err(Error::InvalidInput("n_substeps must be at least 1".into()));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "t_final must be finite and non-negative, got {t_final}"
        )));
    }
    if rho0.dims() != gen.dims() {
        return Err(Error::DimensionMismatch(format!(
            "state dims {:?} vs generator dims {:?}",
            rho0.dims(),
            gen.dims()
        )));
    }
    let h = t_final / n_substeps as f64;
    let mut traj = Trajectory::start(rho0, observables, n_substeps + 1);
    let mut rho: Operator = rho0.op().clone();
    for k in 0..n_substeps {
        let (ham, jumps) = gen.at((k as f64 + 0.5) * h);
        let f = |x: &Operator| lindbladian(ham, jumps, x);
        let k1 = f(&rho);
        let k2 = f(&(&rho + &k1.scale_real(0.5 * h)));
        let k3 = f(&(&rho + &k2.scale_real(0.5 * h)));
        let k4 = f(&(&rho + &k3.scale_real(h)));
        let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
        rho = &rho + &incr.scale_real(h / 6.0);
        let state = check_run_state(rho.clone(), k + 1)?;
        rho = state.op().clone();
        traj.push((k + 1) as f64 * h, state, observables);
    }
    Ok(traj)
}
