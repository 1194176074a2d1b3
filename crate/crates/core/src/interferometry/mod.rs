//! Franson apparatus: two distant unbalanced interferometers fed by one photon pair.
//!
//! Coincidences are gated on `|t₁ − t₂| ≤ w`. When the imbalance ΔT is large compared
//! with the pair correlation time this removes the SL and LS paths, leaving SS and LL to
//! interfere with a phase φ₁ + φ₂. Arm phases are taken at the axis center frequencies,
//! the carrier part of the delay phase (ω₀ΔT) being folded into φ.

mod bell;
mod classical;
mod fringe;
mod paths;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::biphoton::{second_order_coherence_time, Domain, JointAmplitude};
use crate::dispersion::correlation_width;
use crate::error::{Error, RegimeWarning, Result, Warned};

pub use bell::{chsh_value, correlation, ChshResult, ChshSettings, MinusPosition};
pub use classical::{bare_coincidence, classical_bound, classical_bound_violated, ClassicalCheck};
pub use fringe::{fit_fringe, fit_phase_sum_law, visibility, FringeFit, PhaseSumFit};
pub use paths::{
    coincidence_amplitude, path_coefficients, port_amplitude, Arm, PathGram, Port, PortPair, PATHS,
};

/// "≪" in the regime check τ₂ ≪ w ≪ ΔT ≪ τ₁ means at least this ratio.
pub const REGIME_RATIO: f64 = 2.0;

/// One unbalanced Mach-Zehnder: long-arm excess delay and phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMz", into = "RawMz")]
pub struct UnbalancedMZ {
    delay: f64,
    phase: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMz {
    delay: f64,
    #[serde(default)]
    phase: f64,
}

impl TryFrom<RawMz> for UnbalancedMZ {
    type Error = Error;
    fn try_from(r: RawMz) -> Result<Self> {
        UnbalancedMZ::new(r.delay, r.phase)
    }
}

impl From<UnbalancedMZ> for RawMz {
    fn from(m: UnbalancedMZ) -> RawMz {
        RawMz {
            delay: m.delay,
            phase: m.phase,
        }
    }
}

impl UnbalancedMZ {
    /// `delay` is (L − S)/c; the phase is reduced to [0, 2π).
    pub fn new(delay: f64, phase: f64) -> Result<Self> {
        if !(delay >= 0.0 && delay.is_finite()) {
            return Err(Error::param(format!(
                "interferometer delay {delay} must be >= 0"
            )));
        }
        if !phase.is_finite() {
            return Err(Error::param("interferometer phase must be finite"));
        }
        Ok(UnbalancedMZ {
            delay,
            phase: phase.rem_euclid(TAU),
        })
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        UnbalancedMZ {
            delay: self.delay,
            phase: phase.rem_euclid(TAU),
        }
    }
}

/// Two matched interferometers plus the coincidence gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FransonSetup {
    pub left: UnbalancedMZ,
    pub right: UnbalancedMZ,
    /// Coincidence window w on |t₁ − t₂|; `f64::INFINITY` disables gating.
    pub window: f64,
    pub ports: PortPair,
    /// Optional gate on the mean arrival time (t₁+t₂)/2, used to pick the central
    /// slot of time-bin experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrival_gate: Option<[f64; 2]>,
}

impl FransonSetup {
    pub fn new(
        left: UnbalancedMZ,
        right: UnbalancedMZ,
        window: f64,
        ports: PortPair,
    ) -> Result<Self> {
        let setup = FransonSetup {
            left,
            right,
            window,
            ports,
            arrival_gate: None,
        };
        setup.validate()?;
        Ok(setup)
    }

    /// Matched interferometers with delay ΔT and phases (φ₁, φ₂).
    pub fn symmetric(delay: f64, window: f64, phi1: f64, phi2: f64) -> Result<Self> {
        Self::new(
            UnbalancedMZ::new(delay, phi1)?,
            UnbalancedMZ::new(delay, phi2)?,
            window,
            PortPair::HH,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.window > 0.0) || self.window.is_nan() {
            return Err(Error::param(format!(
                "coincidence window {} must be > 0",
                self.window
            )));
        }
        let mismatch = (self.left.delay - self.right.delay).abs();
        if mismatch > self.window {
            return Err(Error::param(format!(
                "interferometer delays differ by {mismatch}, more than the coincidence window {}",
                self.window
            )));
        }
        if let Some([lo, hi]) = self.arrival_gate {
            if !(lo < hi) {
                return Err(Error::param("arrival gate must satisfy lo < hi"));
            }
        }
        Ok(())
    }

    pub fn with_phases(&self, phi1: f64, phi2: f64) -> Self {
        FransonSetup {
            left: self.left.with_phase(phi1),
            right: self.right.with_phase(phi2),
            ..*self
        }
    }

    pub fn with_ports(&self, ports: PortPair) -> Self {
        FransonSetup { ports, ..*self }
    }

    pub fn with_window(&self, window: f64) -> Self {
        FransonSetup { window, ..*self }
    }

    /// Mean imbalance of the two interferometers.
    pub fn delay(&self) -> f64 {
        0.5 * (self.left.delay + self.right.delay)
    }
}

/// Checks τ₂ ≪ w ≪ ΔT ≪ τ₁, estimating τ₂ by the RMS of t₁ − t₂ and τ₁ by the RMS of the
/// mean emission time, and that shifted paths stay on the grid.
pub fn regime_warnings(state: &JointAmplitude, setup: &FransonSetup) -> Result<Vec<RegimeWarning>> {
    let mut out = Vec::new();
    let tau2 = correlation_width(state)?;
    let tau1 = second_order_coherence_time(state)?;
    let (w, dt) = (setup.window, setup.delay());
    let r = REGIME_RATIO;
    if w < r * tau2 {
        out.push(RegimeWarning::new(
            "window-vs-correlation",
            format!("coincidence window {w} is not >> correlation time {tau2:.4}"),
        ));
    }
    if dt < r * w {
        out.push(RegimeWarning::new(
            "delay-vs-window",
            format!("imbalance {dt} is not >> coincidence window {w}"),
        ));
    }
    if tau1 < r * dt {
        out.push(RegimeWarning::new(
            "delay-vs-coherence",
            format!("imbalance {dt} is not << second-order coherence time {tau1:.4}"),
        ));
    }
    let extent = state.grid().axes[0].time_extent();
    if dt >= extent {
        out.push(RegimeWarning::new(
            "grid-coverage",
            format!("imbalance {dt} exceeds the time grid half-width {extent}"),
        ));
    }
    Ok(out)
}

/// Gated coincidence probability for the setup's ports and phases, unnormalized.
pub fn coincidence_probability(state: &JointAmplitude, setup: &FransonSetup) -> Result<f64> {
    setup.validate()?;
    let s = state.in_domain(Domain::Time)?;
    let gram = PathGram::compute(&s, setup)?;
    Ok(gram.probability(setup.ports, setup.left.phase(), setup.right.phase()))
}

/// Coincidence rate normalized to the fringe maximum over all phase settings, so the
/// ideal-regime value follows cos²((φ₁+φ₂)/2).
pub fn coincidence_rate(state: &JointAmplitude, setup: &FransonSetup) -> Result<Warned<f64>> {
    setup.validate()?;
    let s = state.in_domain(Domain::Time)?;
    let warnings = regime_warnings(&s, setup)?;
    let gram = PathGram::compute(&s, setup)?;
    let max = gram.max_probability(setup.ports);
    let raw = gram.probability(setup.ports, setup.left.phase(), setup.right.phase());
    let rate = if max > 0.0 {
        (raw / max).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(Warned {
        value: rate,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringePoint {
    pub phi1: f64,
    pub phi2: f64,
    pub rate: f64,
}

/// Normalized coincidence rates over a list of phase settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    pub points: Vec<FringePoint>,
    pub source: String,
    pub setup: FransonSetup,
    /// Raw gated probability that maps to rate 1.
    pub normalization: f64,
}

impl FringeScan {
    pub fn phase_sums(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.phi1 + p.phi2).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.rate).collect()
    }
}

/// Element-wise [`coincidence_rate`] over `phases`, in input order.
pub fn fringe_scan(
    state: &JointAmplitude,
    setup: &FransonSetup,
    phases: &[(f64, f64)],
) -> Result<Warned<FringeScan>> {
    setup.validate()?;
    let s = state.in_domain(Domain::Time)?;
    let mut scan = FringeScan {
        points: Vec::with_capacity(phases.len()),
        source: state.label().to_string(),
        setup: *setup,
        normalization: 0.0,
    };
    if phases.is_empty() {
        return Ok(Warned::clean(scan));
    }
    let warnings = regime_warnings(&s, setup)?;
    let gram = PathGram::compute(&s, setup)?;
    let max = gram.max_probability(setup.ports);
    scan.normalization = max;
    for &(phi1, phi2) in phases {
        let raw = gram.probability(setup.ports, phi1, phi2);
        let rate = if max > 0.0 {
            (raw / max).clamp(0.0, 1.0)
        } else {
            0.0
        };
        scan.points.push(FringePoint { phi1, phi2, rate });
    }
    Ok(Warned {
        value: scan,
        warnings,
    })
}

/// `count` evenly spaced phases over one period, starting at `start`.
pub fn phase_sweep(start: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| start + TAU * k as f64 / count as f64)
        .collect()
}
