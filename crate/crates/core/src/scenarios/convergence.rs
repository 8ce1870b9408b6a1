use rayon::prelude::*;

use super::runs::{continuum_generator, endpoint_error, max_trace_distance, subsample};
use super::{discretize_input_output, FieldConfig, FieldKind, REFERENCE_REFINEMENT};
use crate::collision::{run_product, CollisionSpec, Coupling};
use crate::error::{Error, Result};
use crate::lindblad::integrate_me;

/// Largest number of reference substeps.
const MAX_REFERENCE_SUBSTEPS: usize = 10_000_000;

/// How the coupling follows the step size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CouplingScaling {
    /// g = √(γ/dt): the rate is held fixed.
    Rate,
    /// g held fixed, so the rate g²·dt vanishes as dt → 0.
    FixedG(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n_steps: usize,
    pub dt: f64,
    /// Largest trace distance to the reference on the collision grid.
    pub max_state_error: f64,
    /// |Δρ_ee| at the final time.
    pub endpoint_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of ln(max_state_error) against ln(N).
    pub slope: f64,
    pub reference_substeps: usize,
    pub scaling: CouplingScaling,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest multiple of lcm(n_list) that is at least
/// `REFERENCE_REFINEMENT · max(n_list)`.
fn reference_substeps(n_list: &[usize]) -> Result<usize> {
    let too_many = || Error::ResourceCap {
        required: usize::MAX,
        cap: MAX_REFERENCE_SUBSTEPS,
    };
    let mut lcm = 1usize;
    for &n in n_list {
        lcm = (lcm / gcd(lcm, n)).checked_mul(n).ok_or_else(too_many)?;
        if lcm > MAX_REFERENCE_SUBSTEPS {
            return Err(Error::ResourceCap {
                required: lcm,
                cap: MAX_REFERENCE_SUBSTEPS,
            });
        }
    }
    let floor = REFERENCE_REFINEMENT * n_list.iter().copied().max().unwrap_or(1);
    let m = floor.div_ceil(lcm) * lcm;
    if m > MAX_REFERENCE_SUBSTEPS {
        return Err(Error::ResourceCap {
            required: m,
            cap: MAX_REFERENCE_SUBSTEPS,
        });
    }
    Ok(m)
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Collision model at each N in `n_list` against one fine master-equation
/// reference. Works for vacuum and coherent fields.
pub fn convergence_study(
    cfg: &FieldConfig,
    n_list: &[usize],
    scaling: CouplingScaling,
) -> Result<ConvergenceReport> {
    if n_list.len() < 3 {
        return Err(Error::InvalidInput(
            "a convergence study needs at least three step counts".into(),
        ));
    }
    if n_list[0] == 0 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "step counts must be positive and strictly increasing".into(),
        ));
    }
    if matches!(cfg.kind, FieldKind::SinglePhoton(_)) {
        return Err(Error::InvalidInput(
            "convergence studies need a vacuum or coherent field".into(),
        ));
    }
    if let CouplingScaling::FixedG(g) = scaling {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidInput(
                "fixed coupling g must be non-negative".into(),
            ));
        }
    }
    cfg.validate()?;
    let m = reference_substeps(n_list)?;
    let obs = cfg.observables();
    let gen = continuum_generator(cfg, m)?;
    let reference = integrate_me(&gen, &cfg.system.rho0, cfg.t_final, m, &obs)?;

    let rows = n_list
        .par_iter()
        .map(|&n| {
            let cfg_n = cfg.with_n_steps(n)?;
            let (spec, bath) = discretize_input_output(&cfg_n)?;
            let spec = match scaling {
                CouplingScaling::Rate => spec,
                CouplingScaling::FixedG(g) => CollisionSpec::new(
                    cfg.system.h_sys.clone(),
                    cfg.system.b.clone(),
                    Coupling::RawG(g),
                    spec.dt(),
                    n,
                    cfg.d_anc,
                )?,
            };
            let cm = run_product(&spec, &bath, &cfg.system.rho0, &obs)?;
            let me = subsample(&reference, m / n);
            Ok(ConvergenceRow {
                n_steps: n,
                dt: spec.dt(),
                max_state_error: max_trace_distance(&cm, &me)?,
                endpoint_error: endpoint_error(&cm, &me),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let xs: Vec<f64> = rows.iter().map(|r| (r.n_steps as f64).ln()).collect();
    let ys: Vec<f64> = rows
        .iter()
        .map(|r| r.max_state_error.max(f64::MIN_POSITIVE).ln())
        .collect();
    Ok(ConvergenceReport {
        slope: least_squares_slope(&xs, &ys),
        rows,
        reference_substeps: m,
        scaling,
    })
}
