use super::state::{weighted_rms, Domain, JointAmplitude};
use crate::error::{Error, Result};

/// Inverse RMS width of photon 1's marginal spectrum.
pub fn first_order_coherence_time(state: &JointAmplitude) -> Result<f64> {
    let s = state.in_domain(Domain::Frequency)?;
    let marginal = s.marginal(0);
    let peak = marginal.iter().cloned().fold(0.0, f64::max);
    if marginal.iter().filter(|&&p| p > 1e-12 * peak).count() < 2 {
        return Err(Error::DegenerateGrid(
            "single-photon spectrum occupies one cell".into(),
        ));
    }
    let (_, rms) = weighted_rms(&s.coordinates(0), &marginal)
        .ok_or_else(|| Error::DegenerateGrid("empty spectrum".into()))?;
    Ok(1.0 / rms)
}

/// RMS width of the mean emission time (t₁+t₂)/2.
pub fn second_order_coherence_time(state: &JointAmplitude) -> Result<f64> {
    let s = state.in_domain(Domain::Time)?;
    let m = s.moments(|t1, t2| 0.5 * (t1 + t2));
    if m.support < 2 || m.rms <= 0.0 {
        return Err(Error::DegenerateGrid(
            "mean-time envelope occupies one cell".into(),
        ));
    }
    Ok(m.rms)
}
