//! Second-order amplitude b for atom 1's excitation to reach atom 2.
//!
//! Assembly of the prefactor, in natural units with the electron charge in Gaussian
//! units (e² = α): each dipole vertex contributes e·d·ω_A through the field, and the two
//! time-ordered vertices bring 1/(iħ)² = −1. The commutator of the field at the two atoms
//! is carried by −i·D_F(r, t′−t″). Hence
//!
//! ```text
//! b = −α d² ω_A² ∫₀^Δt dt′ ∫₀^t′ dt″ e^{iω_A(t′−t″)} · (−i)·D_F(r, t′−t″)
//! ```
//!
//! For r ≫ Δt, −i·D_F → 1/(4π² r²) and the double integral evaluates to
//! (iω_AΔt + 1 − e^{iω_AΔt})/ω_A², which is the closed form implemented in
//! [`amplitude_b_closed`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::propagator_unchecked;
use super::quadrature::Composite;
use crate::error::{Error, RegimeWarning, Result, Warned};

/// Fine-structure constant (CODATA 2018).
pub const ALPHA_FS: f64 = 7.297_352_569_3e-3;

/// r ≥ FAR_FIELD_RATIO · Δt is treated as the far field in which the closed form holds.
pub const FAR_FIELD_RATIO: f64 = 100.0;

/// Two identical two-level atoms a distance r apart, coupled for a time Δt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoAtomConfig {
    /// Separation r.
    pub separation: f64,
    /// Transition angular frequency ω_A.
    pub omega: f64,
    /// Dipole matrix element d (a length; the charge is carried by α).
    pub dipole: f64,
    /// Interaction duration Δt.
    pub duration: f64,
}

impl TwoAtomConfig {
    pub fn new(separation: f64, omega: f64, dipole: f64, duration: f64) -> Result<Self> {
        let c = TwoAtomConfig {
            separation,
            omega,
            dipole,
            duration,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.separation > 0.0 && self.separation.is_finite()) {
            return Err(Error::param(format!(
                "separation {} must be > 0",
                self.separation
            )));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::param(format!(
                "transition frequency {} must be > 0",
                self.omega
            )));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(Error::param(format!(
                "duration {} must be >= 0",
                self.duration
            )));
        }
        if !self.dipole.is_finite() {
            return Err(Error::param("dipole matrix element must be finite"));
        }
        Ok(())
    }

    /// r ≥ 100·Δt.
    pub fn far_field(&self) -> bool {
        self.separation >= FAR_FIELD_RATIO * self.duration
    }

    /// Overall factor −α d² ω_A².
    fn prefactor(&self) -> f64 {
        -ALPHA_FS * self.dipole * self.dipole * self.omega * self.omega
    }
}

fn far_field_warnings(config: &TwoAtomConfig) -> Vec<RegimeWarning> {
    if config.far_field() {
        Vec::new()
    } else {
        vec![RegimeWarning::new(
            "far-field",
            format!(
                "separation {} is below {FAR_FIELD_RATIO} x duration {}; the closed form assumes r >> c*dt",
                config.separation, config.duration
            ),
        )]
    }
}

/// `b = −(α/4π²)(d²/r²)(iω_AΔt + 1 − e^{iω_AΔt})`.
pub fn amplitude_b_closed(config: &TwoAtomConfig) -> Result<Warned<Complex64>> {
    config.validate()?;
    let phase = config.omega * config.duration;
    let bracket = Complex64::new(1.0 - phase.cos(), phase - phase.sin());
    let scale = -ALPHA_FS / (4.0 * PI * PI) * config.dipole * config.dipole
        / (config.separation * config.separation);
    Ok(Warned {
        value: bracket * scale,
        warnings: far_field_warnings(config),
    })
}

/// Controls for [`amplitude_b_numeric`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureOptions {
    /// Gauss-Legendre points per panel.
    pub order: usize,
    /// Largest number of integrand evaluations allowed in one refinement.
    pub node_budget: usize,
    /// Refinement stops once successive panel doublings agree to this relative size.
    pub rel_tolerance: f64,
    /// Regularizations to evaluate, in order; the last one is reported, and the change
    /// between the last two is the ε sensitivity.
    pub epsilons: Vec<f64>,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            order: 8,
            node_budget: 1 << 22,
            rel_tolerance: 1e-10,
            epsilons: vec![1e-8, 5e-9],
        }
    }
}

impl QuadratureOptions {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 || self.order > 64 {
            return Err(Error::param("quadrature order must be in 1..=64"));
        }
        if !(self.rel_tolerance > 0.0) {
            return Err(Error::param("quadrature tolerance must be > 0"));
        }
        if self.epsilons.is_empty() {
            return Err(Error::param("epsilon schedule must not be empty"));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(Error::param(format!("epsilon {e} must be > 0")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericAmplitude {
    pub value: Complex64,
    /// |I(m) − I(m/2)| of the final panel doubling.
    pub error_estimate: f64,
    /// Panels per integration level in the accepted refinement.
    pub panels: usize,
    /// Integrand evaluations in the accepted refinement.
    pub nodes: usize,
    pub epsilon: f64,
    /// Relative change between the last two ε of the schedule, if there were two.
    pub epsilon_sensitivity: Option<f64>,
}

/// The double integral of the module docs, evaluated by nested composite Gauss-Legendre
/// quadrature on the triangle with panel doubling until successive results agree.
pub fn amplitude_b_numeric(
    config: &TwoAtomConfig,
    options: &QuadratureOptions,
) -> Result<NumericAmplitude> {
    config.validate()?;
    options.validate()?;
    let eps_last = *options.epsilons.last().expect("validated non-empty");
    if config.duration == 0.0 {
        return Ok(NumericAmplitude {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            panels: 0,
            nodes: 0,
            epsilon: eps_last,
            epsilon_sensitivity: None,
        });
    }
    if config.separation <= config.duration {
        return Err(Error::OnCone {
            separation: config.separation,
            duration: config.duration,
        });
    }
    let rule = Composite::new(options.order);
    let mut results = Vec::with_capacity(options.epsilons.len());
    for &eps in &options.epsilons {
        results.push(integrate(config, &rule, options, eps)?);
    }
    let mut out = *results.last().expect("non-empty");
    if results.len() >= 2 {
        let prev = results[results.len() - 2].value;
        out.epsilon_sensitivity = Some((out.value - prev).norm() / out.value.norm().max(1e-300));
    }
    Ok(out)
}

fn integrate(
    config: &TwoAtomConfig,
    rule: &Composite,
    options: &QuadratureOptions,
    epsilon: f64,
) -> Result<NumericAmplitude> {
    let (r, w) = (config.separation, config.omega);
    let minus_i = Complex64::new(0.0, -1.0);
    let integrand = |t1: f64, t2: f64| {
        let s = t1 - t2;
        Complex64::from_polar(1.0, w * s) * minus_i * propagator_unchecked(r, s, epsilon)
    };
    let pre = config.prefactor();
    let nodes_for = |m: usize| (rule.order() * m).pow(2);
    let mut panels = 1;
    let mut prev = rule.triangle(config.duration, panels, &integrand) * pre;
    loop {
        let next = panels * 2;
        if nodes_for(next) > options.node_budget {
            return Err(Error::Convergence(format!(
                "node budget {} exhausted at {panels} panels without reaching relative tolerance {}",
                options.node_budget, options.rel_tolerance
            )));
        }
        let cur = rule.triangle(config.duration, next, &integrand) * pre;
        let err = (cur - prev).norm();
        panels = next;
        if err <= options.rel_tolerance * cur.norm().max(1e-300) {
            return Ok(NumericAmplitude {
                value: cur,
                error_estimate: err,
                panels,
                nodes: nodes_for(panels),
                epsilon,
                epsilon_sensitivity: None,
            });
        }
        prev = cur;
    }
}
