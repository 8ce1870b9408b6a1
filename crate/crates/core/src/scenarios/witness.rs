use crate::collision::Trajectory;
use crate::error::Result;
use crate::qcore::trace_distance;

use super::runs::max_trace_distance;

/// Smallest step-to-step growth of the trace distance counted as a revival.
pub const REVIVAL_EPS: f64 = 1e-6;

/// Trace distance between two runs of the same dynamics and the steps at
/// which it grew. Any growth rules out a CP-divisible evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct NmReport {
    pub distances: Vec<f64>,
    /// (step n, D_n − D_{n−1}) wherever the increase exceeds `eps`.
    pub revivals: Vec<(usize, f64)>,
    pub eps: f64,
}

impl NmReport {
    pub fn fired(&self) -> bool {
        !self.revivals.is_empty()
    }

    pub fn max_revival(&self) -> f64 {
        self.revivals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

pub fn nm_witness(a: &Trajectory, b: &Trajectory, eps: f64) -> Result<NmReport> {
    max_trace_distance(a, b)?;
    let distances: Vec<f64> = a
        .states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| trace_distance(x.op(), y.op()))
        .collect();
    let revivals = distances
        .windows(2)
        .enumerate()
        .filter_map(|(n, w)| {
            let rise = w[1] - w[0];
            (rise > eps).then_some((n + 1, rise))
        })
        .collect();
    Ok(NmReport {
        distances,
        revivals,
        eps,
    })
}
