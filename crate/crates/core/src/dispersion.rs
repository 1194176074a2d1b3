//! Dispersive propagation of one photon of a pair and the nonlocal cancellation test.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::biphoton::{Domain, JointAmplitude};
use crate::error::{Error, Result};

/// Medium with propagation constant expanded to second order about the axis center:
/// `k(ω) = k₀ + k′·δω + ½k″·δω²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMedium", into = "RawMedium")]
pub struct DispersiveMedium {
    k0: f64,
    k1: f64,
    k2: f64,
    length: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMedium {
    #[serde(default)]
    k0: f64,
    #[serde(default)]
    k1: f64,
    #[serde(default)]
    k2: f64,
    length: f64,
}

impl TryFrom<RawMedium> for DispersiveMedium {
    type Error = Error;
    fn try_from(r: RawMedium) -> Result<Self> {
        DispersiveMedium::new(r.k0, r.k1, r.k2, r.length)
    }
}

impl From<DispersiveMedium> for RawMedium {
    fn from(m: DispersiveMedium) -> RawMedium {
        RawMedium {
            k0: m.k0,
            k1: m.k1,
            k2: m.k2,
            length: m.length,
        }
    }
}

impl DispersiveMedium {
    pub fn new(k0: f64, k1: f64, k2: f64, length: f64) -> Result<Self> {
        if ![k0, k1, k2].iter().all(|k| k.is_finite()) {
            return Err(Error::param("dispersion coefficients must be finite"));
        }
        if !(length >= 0.0 && length.is_finite()) {
            return Err(Error::param(format!("medium length {length} must be >= 0")));
        }
        Ok(DispersiveMedium { k0, k1, k2, length })
    }

    /// Medium with only second-order dispersion `k″` over `length`.
    pub fn quadratic(k2: f64, length: f64) -> Result<Self> {
        Self::new(0.0, 0.0, k2, length)
    }

    /// From Taylor coefficients `[k₀, k′, k″, k‴, …]`; anything beyond second order must be zero.
    pub fn from_taylor(coefficients: &[f64], length: f64) -> Result<Self> {
        if let Some((order, _)) = coefficients
            .iter()
            .enumerate()
            .skip(3)
            .find(|(_, c)| **c != 0.0)
        {
            return Err(Error::param(format!(
                "dispersion of order {order} is not supported (second order at most)"
            )));
        }
        let c = |k: usize| coefficients.get(k).copied().unwrap_or(0.0);
        Self::new(c(0), c(1), c(2), length)
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn group_slowness(&self) -> f64 {
        self.k1
    }

    pub fn gvd(&self) -> f64 {
        self.k2
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Group delay k′z accumulated across the medium.
    pub fn group_delay(&self) -> f64 {
        self.k1 * self.length
    }

    /// Total second-order coefficient k″z.
    pub fn total_gvd(&self) -> f64 {
        self.k2 * self.length
    }

    /// Medium whose phase exactly undoes this one.
    pub fn negated(&self) -> Self {
        DispersiveMedium {
            k0: -self.k0,
            k1: -self.k1,
            k2: -self.k2,
            length: self.length,
        }
    }

    /// Spectral phase `z·(k₀ + k′δω + ½k″δω²)`.
    pub fn phase(&self, detuning: f64) -> f64 {
        self.length * (self.k0 + detuning * (self.k1 + 0.5 * self.k2 * detuning))
    }
}

/// Which photon of the pair crosses a medium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Photon {
    First,
    Second,
}

impl Photon {
    pub fn axis(self) -> usize {
        match self {
            Photon::First => 0,
            Photon::Second => 1,
        }
    }
}

/// Multiplies the selected photon's spectrum by `exp(i·z·k(ω))`, δω measured from that
/// axis' center frequency.
pub fn apply_medium(
    state: &JointAmplitude,
    medium: &DispersiveMedium,
    photon: Photon,
) -> Result<JointAmplitude> {
    state.expect_domain(Domain::Frequency)?;
    let axis = state.grid().axes[photon.axis()];
    let factors: Vec<Complex64> = (0..axis.n_points)
        .map(|k| Complex64::from_polar(1.0, medium.phase(axis.offset(k))))
        .collect();
    let mut out = state.clone();
    let (_, n2) = out.dims();
    for (idx, z) in out.data_mut().iter_mut().enumerate() {
        let k = if photon == Photon::First {
            idx / n2
        } else {
            idx % n2
        };
        *z *= factors[k];
    }
    out.refresh_norm();
    Ok(out)
}

/// RMS width of the t₁ − t₂ marginal.
pub fn correlation_width(state: &JointAmplitude) -> Result<f64> {
    let s = state.in_domain(Domain::Time)?;
    let m = s.moments(|t1, t2| t1 - t2);
    if m.support < 2 || m.rms <= 0.0 {
        return Err(Error::DegenerateGrid(
            "relative-time distribution occupies one cell".into(),
        ));
    }
    Ok(m.rms)
}

/// Correlation width after sending photon 1 through `first` and photon 2 through
/// `second`, relative to the undispersed width.
pub fn nonlocal_cancellation_check(
    state: &JointAmplitude,
    first: &DispersiveMedium,
    second: &DispersiveMedium,
) -> Result<f64> {
    let s = state.in_domain(Domain::Frequency)?;
    let bare = correlation_width(&s)?;
    let dispersed = apply_medium(
        &apply_medium(&s, first, Photon::First)?,
        second,
        Photon::Second,
    )?;
    Ok(correlation_width(&dispersed)? / bare)
}
