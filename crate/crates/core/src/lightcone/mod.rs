//! Feynman propagator of a massless field, two-atom excitation transfer through it, and
//! the post-selection protocol that turns the transfer into atom-atom entanglement.
//!
//! Natural units c = ħ = 1 throughout: lengths and times share one unit, frequencies are
//! its inverse.

mod amplitude;
mod entanglement;
mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scan::{linspace, ScanResult};

pub use amplitude::{
    amplitude_b_closed, amplitude_b_numeric, NumericAmplitude, QuadratureOptions, TwoAtomConfig,
    ALPHA_FS, FAR_FIELD_RATIO,
};
pub use entanglement::{
    assemble_two_atom_state, balance_to_maximal, binary_entropy, concurrence, max_product_fidelity,
    mutual_information, post_select, Balanced, PostSelectedState, TwoAtomState,
};
pub use quadrature::gauss_legendre;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "regularization epsilon {epsilon} must be > 0"
        )))
    }
}

/// `D_F(r, t) = −1/(4iπ²) · 1/(r² − t² − iε)`.
pub fn feynman_propagator(r: f64, t: f64, epsilon: f64) -> Result<Complex64> {
    check_epsilon(epsilon)?;
    if !(r.is_finite() && t.is_finite()) {
        return Err(Error::param("propagator arguments must be finite"));
    }
    Ok(propagator_unchecked(r, t, epsilon))
}

#[inline]
pub(crate) fn propagator_unchecked(r: f64, t: f64, epsilon: f64) -> Complex64 {
    // −1/(4iπ²) = i/(4π²)
    Complex64::new(0.0, 1.0 / (4.0 * PI * PI)) / Complex64::new(r * r - t * t, -epsilon)
}

/// A propagator value at one space-time separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorPoint {
    pub r: f64,
    pub t: f64,
    pub epsilon: f64,
    pub value: Complex64,
}

impl PropagatorPoint {
    pub fn new(r: f64, t: f64, epsilon: f64) -> Result<Self> {
        Ok(PropagatorPoint {
            r,
            t,
            epsilon,
            value: feynman_propagator(r, t, epsilon)?,
        })
    }

    /// Spacelike separation, r > |t|.
    pub fn outside_cone(&self) -> bool {
        self.r.abs() > self.t.abs()
    }
}

/// `D_F` on an (x, t) lattice with r = |x|; columns `x, t, re, im, abs`, rows ordered
/// with t varying fastest.
pub fn propagator_map(
    x_range: [f64; 2],
    t_range: [f64; 2],
    resolution: [usize; 2],
    epsilon: f64,
) -> Result<ScanResult> {
    check_epsilon(epsilon)?;
    if !x_range.iter().chain(&t_range).all(|v| v.is_finite()) {
        return Err(Error::param("propagator map ranges must be finite"));
    }
    if resolution.contains(&0) {
        return Err(Error::param(
            "propagator map needs at least one point per axis",
        ));
    }
    let xs = linspace(x_range, resolution[0]);
    let ts = linspace(t_range, resolution[1]);
    let mut scan = ScanResult::new(["x", "t", "re", "im", "abs"]);
    for &x in &xs {
        for &t in &ts {
            let d = propagator_unchecked(x.abs(), t, epsilon);
            scan.rows.push(vec![x, t, d.re, d.im, d.norm()]);
        }
    }
    Ok(scan
        .with_meta("epsilon", epsilon)
        .with_meta("resolution", resolution)
        .with_meta("light_cone", "|x| = |t|")
        .with_meta("cone_peak_abs", 1.0 / (4.0 * PI * PI * epsilon)))
}

/// `|D_F(r, t)|²` as a first-order detection proxy for a point emission at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaDetection {
    pub value: f64,
    /// r > t: detection before light from the emitter could arrive.
    pub outside_cone: bool,
}

pub fn rwa_detection_probability(r: f64, t: f64, epsilon: f64) -> Result<RwaDetection> {
    if !(t > 0.0) {
        return Err(Error::param(format!("detection time {t} must be > 0")));
    }
    if !(r >= 0.0) {
        return Err(Error::param(format!("distance {r} must be >= 0")));
    }
    let d = feynman_propagator(r, t, epsilon)?;
    Ok(RwaDetection {
        value: d.norm_sqr(),
        outside_cone: r > t,
    })
}
