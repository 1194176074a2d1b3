use serde::{Deserialize, Serialize};

use super::paths::Sampler;
use super::{fringe_scan, phase_sweep, visibility, FransonSetup};
use crate::biphoton::{Domain, JointAmplitude};
use crate::error::{Error, Result, Warned};

/// Phase points used to measure the visibility for the classical-bound comparison.
const VISIBILITY_POINTS: usize = 32;

/// Coincidence rate with no interferometers at relative delay Δt: `∫|f̃(t, t−Δt)|² dt`.
pub fn bare_coincidence(state: &JointAmplitude, delay: f64) -> Result<f64> {
    let s = state.in_domain(Domain::Time)?;
    let axis = s.grid().axes[0];
    let limit = axis.time_extent().min(s.grid().axes[1].time_extent());
    if !(delay.abs() < limit) {
        return Err(Error::OffGrid { delay, limit });
    }
    let sampler = Sampler::new(&s);
    let dt = axis.time_step();
    Ok((0..axis.n_points)
        .map(|i| {
            let t = axis.time(i);
            sampler.at_time(t, t - delay).norm_sqr()
        })
        .sum::<f64>()
        * dt)
}

/// Upper limit on the fringe visibility of any classical field:
/// `R_c0(Δt) / (R_c0(0) + R_c0(Δt))`.
pub fn classical_bound(state: &JointAmplitude, delay: f64) -> Result<f64> {
    let r0 = bare_coincidence(state, 0.0)?;
    let rd = bare_coincidence(state, delay)?;
    if r0 + rd <= 0.0 {
        return Err(Error::DegenerateGrid(
            "no coincidences at zero or finite delay".into(),
        ));
    }
    Ok(rd / (r0 + rd))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalCheck {
    pub bound: f64,
    pub visibility: f64,
    pub violated: bool,
    /// Simulated visibility minus the bound.
    pub margin: f64,
}

/// Compares the simulated fringe visibility with the classical bound evaluated at `delay`
/// (the interferometer imbalance when `None`).
pub fn classical_bound_violated(
    state: &JointAmplitude,
    setup: &FransonSetup,
    delay: Option<f64>,
) -> Result<Warned<ClassicalCheck>> {
    let s = state.in_domain(Domain::Time)?;
    let bound = classical_bound(&s, delay.unwrap_or(setup.delay()))?;
    let phi2 = setup.right.phase();
    let phases: Vec<(f64, f64)> = phase_sweep(0.0, VISIBILITY_POINTS)
        .into_iter()
        .map(|p| (p, phi2))
        .collect();
    let scan = fringe_scan(&s, setup, &phases)?;
    let v = visibility(&scan.value)?;
    Ok(Warned {
        value: ClassicalCheck {
            bound,
            visibility: v,
            violated: v > bound,
            margin: v - bound,
        },
        warnings: scan.warnings,
    })
}
