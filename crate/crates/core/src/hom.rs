//! Hong-Ou-Mandel interference of a photon pair on one 50/50 beam splitter.
//!
//! With photon 1 delayed by τ the coincidence probability is
//! `P(τ) = ½ − ½·Re Σ f(ω₁,ω₂) f*(ω₂,ω₁) e^{i(ω₁−ω₂)τ}`. The sum only depends on
//! ω₁ − ω₂, so it is collapsed once onto the diagonals of the grid and every delay then
//! costs O(n).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::biphoton::{weighted_rms, Domain, JointAmplitude};
use crate::dispersion::{apply_medium, DispersiveMedium, Photon};
use crate::error::{Error, Result};
use crate::scan::ScanResult;

/// Relative delay τ added to photon 1, and an optional medium in arm 1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomSetup {
    pub delay: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium: Option<DispersiveMedium>,
}

impl HomSetup {
    pub fn new(delay: f64, medium: Option<DispersiveMedium>) -> Result<Self> {
        if !delay.is_finite() {
            return Err(Error::param("HOM delay must be finite"));
        }
        Ok(HomSetup { delay, medium })
    }
}

/// Exchange overlap of a state summed along the diagonals ω₁ − ω₂ = const.
#[derive(Debug, Clone)]
pub struct HomOverlap {
    diagonals: Vec<Complex64>,
    step: f64,
}

impl HomOverlap {
    /// Requires a frequency-domain state whose two axes sample the same frequencies; the
    /// medium, if any, is applied to photon 1 first.
    pub fn new(state: &JointAmplitude, medium: Option<&DispersiveMedium>) -> Result<Self> {
        state.expect_domain(Domain::Frequency)?;
        let [a1, a2] = state.grid().axes;
        if !(a1.same_sampling(&a2) && a1.center == a2.center) {
            return Err(Error::AxisMismatch(
                "HOM interference needs both photons sampled on the same frequency axis".into(),
            ));
        }
        let dispersed;
        let s = match medium {
            Some(m) => {
                dispersed = apply_medium(state, m, Photon::First)?;
                &dispersed
            }
            None => state,
        };
        let n = a1.n_points;
        let f = s.data();
        let mut diagonals = vec![Complex64::new(0.0, 0.0); 2 * n - 1];
        for i in 0..n {
            for j in 0..n {
                diagonals[i + n - 1 - j] += f[i * n + j] * f[j * n + i].conj();
            }
        }
        let norm = s.norm() * s.norm();
        diagonals.iter_mut().for_each(|g| *g /= norm);
        Ok(HomOverlap {
            diagonals,
            step: a1.step(),
        })
    }

    /// Coincidence probability at delay τ.
    pub fn probability(&self, delay: f64) -> f64 {
        let n = self.diagonals.len().div_ceil(2);
        let rotor = Complex64::from_polar(1.0, self.step * delay);
        // Start at d = −(n−1) and step the phase e^{i·d·Δω·τ} multiplicatively, with a
        // direct evaluation every 64 steps to stop drift.
        let mut acc = 0.0;
        let mut phase = Complex64::new(0.0, 0.0);
        for (k, g) in self.diagonals.iter().enumerate() {
            if k % 64 == 0 {
                let d = k as f64 - (n - 1) as f64;
                phase = Complex64::from_polar(1.0, d * self.step * delay);
            }
            acc += (g * phase).re;
            phase *= rotor;
        }
        (0.5 - 0.5 * acc).clamp(0.0, 1.0)
    }
}

/// Coincidence probability for one setup.
pub fn hom_coincidence(state: &JointAmplitude, setup: &HomSetup) -> Result<f64> {
    Ok(HomOverlap::new(state, setup.medium.as_ref())?.probability(setup.delay))
}

/// Dip scan with moment-based summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomScan {
    pub delays: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub source: String,
    /// `(0.5 − P_min)/0.5`; `None` for an empty scan.
    pub visibility: Option<f64>,
    /// RMS width of the dip, weighting each delay by `max(0.5 − P, 0)`.
    pub width: Option<f64>,
    /// Weighted mean delay of the dip.
    pub center: Option<f64>,
}

impl HomScan {
    pub fn min_probability(&self) -> Option<f64> {
        self.probabilities.iter().copied().reduce(f64::min)
    }

    /// Delay at which the scanned probability is smallest.
    pub fn min_delay(&self) -> Option<f64> {
        let k = (0..self.probabilities.len())
            .min_by(|&a, &b| self.probabilities[a].total_cmp(&self.probabilities[b]))?;
        Some(self.delays[k])
    }
}

impl From<HomScan> for ScanResult {
    fn from(h: HomScan) -> ScanResult {
        let mut s = ScanResult::new(["tau", "coincidence"]);
        s.rows = h
            .delays
            .iter()
            .zip(&h.probabilities)
            .map(|(&t, &p)| vec![t, p])
            .collect();
        s.with_meta("source", &h.source)
            .with_meta("visibility", h.visibility)
            .with_meta("dip_width", h.width)
            .with_meta("dip_center", h.center)
    }
}

/// [`hom_coincidence`] at each delay, in input order.
pub fn hom_scan(
    state: &JointAmplitude,
    delays: &[f64],
    medium: Option<&DispersiveMedium>,
) -> Result<HomScan> {
    if let Some(d) = delays.iter().find(|d| !d.is_finite()) {
        return Err(Error::param(format!("HOM delay {d} must be finite")));
    }
    let mut scan = HomScan {
        delays: delays.to_vec(),
        probabilities: Vec::with_capacity(delays.len()),
        source: state.label().to_string(),
        visibility: None,
        width: None,
        center: None,
    };
    if delays.is_empty() {
        return Ok(scan);
    }
    let overlap = HomOverlap::new(state, medium)?;
    scan.probabilities = delays.iter().map(|&t| overlap.probability(t)).collect();
    let p_min = scan.min_probability().unwrap_or(0.5);
    scan.visibility = Some(((0.5 - p_min) / 0.5).clamp(0.0, 1.0));
    let weights: Vec<f64> = scan
        .probabilities
        .iter()
        .map(|p| (0.5 - p).max(0.0))
        .collect();
    if let Some((mean, rms)) = weighted_rms(delays, &weights) {
        scan.center = Some(mean);
        scan.width = Some(rms);
    }
    Ok(scan)
}

/// Dip width with the medium in arm 1 divided by the width without it.
pub fn hom_dispersion_cancellation(
    state: &JointAmplitude,
    medium: &DispersiveMedium,
    delays: &[f64],
) -> Result<f64> {
    let width = |m: Option<&DispersiveMedium>| -> Result<f64> {
        hom_scan(state, delays, m)?
            .width
            .filter(|w| *w > 0.0)
            .ok_or_else(|| Error::DegenerateGrid("no HOM dip inside the scanned delays".into()))
    };
    Ok(width(Some(medium))? / width(None)?)
}
