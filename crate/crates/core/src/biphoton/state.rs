use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{FrequencyGrid, TimeGrid};
use crate::error::{Error, Result};

/// Which conjugate representation a [`JointAmplitude`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Frequency,
    Time,
}

/// Two-photon amplitude sampled on a Cartesian grid.
///
/// In the frequency domain element `(i, j)` is `f(ω₁ᵢ, ω₂ⱼ)`. In the time domain it is the
/// envelope `f̃(t₁ᵢ, t₂ⱼ)` referenced to the axis center frequencies, so a delay of the long
/// interferometer arm only carries the explicit arm phase. Norms are discrete
/// (`Σ|f|² = 1`), which the unitary transform keeps domain independent.
#[derive(Debug, Clone)]
pub struct JointAmplitude {
    domain: Domain,
    grid: FrequencyGrid,
    data: Vec<Complex64>,
    norm: f64,
    label: String,
}

fn l2(data: &[Complex64]) -> f64 {
    data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl JointAmplitude {
    /// Wraps raw samples without rescaling them.
    pub fn from_parts(
        domain: Domain,
        grid: FrequencyGrid,
        data: Vec<Complex64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::AxisMismatch(format!(
                "{} samples for a {}x{} grid",
                data.len(),
                grid.axes[0].n_points,
                grid.axes[1].n_points
            )));
        }
        let norm = l2(&data);
        Ok(JointAmplitude {
            domain,
            grid,
            data,
            norm,
            label: label.into(),
        })
    }

    /// Wraps raw samples and rescales them to unit norm.
    pub fn normalized(
        domain: Domain,
        grid: FrequencyGrid,
        mut data: Vec<Complex64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let norm = l2(&data);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::DegenerateGrid(
                "amplitude vanishes on every grid point".into(),
            ));
        }
        let inv = 1.0 / norm;
        data.iter_mut().for_each(|z| *z *= inv);
        Self::from_parts(domain, grid, data, label)
    }

    pub(crate) fn sample_frequency_fn(
        grid: &FrequencyGrid,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Vec<Complex64> {
        let [a1, a2] = grid.axes;
        let w2: Vec<f64> = a2.values();
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..a1.n_points {
            let w1 = a1.value(i);
            data.extend(w2.iter().map(|&w| f(w1, w)));
        }
        data
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn time_grid(&self) -> TimeGrid {
        self.grid.time_grid()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.grid.dims()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub(crate) fn refresh_norm(&mut self) {
        self.norm = l2(&self.data);
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Cached L2 norm.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.grid.axes[1].n_points + j]
    }

    /// Coordinate of index `k` on `axis` in the current domain.
    pub fn coordinate(&self, axis: usize, k: usize) -> f64 {
        match self.domain {
            Domain::Frequency => self.grid.axes[axis].value(k),
            Domain::Time => self.grid.axes[axis].time(k),
        }
    }

    pub fn coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.grid.axes[axis].n_points)
            .map(|k| self.coordinate(axis, k))
            .collect()
    }

    pub fn expect_domain(&self, expected: Domain) -> Result<()> {
        if self.domain != expected {
            return Err(Error::DomainMismatch {
                expected,
                found: self.domain,
            });
        }
        Ok(())
    }

    /// Single-photon marginal intensity along `axis`.
    pub fn marginal(&self, axis: usize) -> Vec<f64> {
        let (n1, n2) = self.dims();
        let mut out = vec![0.0; if axis == 0 { n1 } else { n2 }];
        for i in 0..n1 {
            let row = &self.data[i * n2..(i + 1) * n2];
            for (j, z) in row.iter().enumerate() {
                let p = z.norm_sqr();
                if axis == 0 {
                    out[i] += p;
                } else {
                    out[j] += p;
                }
            }
        }
        out
    }

    /// Intensity-weighted mean and RMS spread of `g(x₁, x₂)` in the current domain.
    pub fn moments(&self, g: impl Fn(f64, f64) -> f64) -> Moments {
        let c1 = self.coordinates(0);
        let c2 = self.coordinates(1);
        let n2 = c2.len();
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        let mut support = 0usize;
        let peak = self.data.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        for (i, &x1) in c1.iter().enumerate() {
            for (j, &x2) in c2.iter().enumerate() {
                let p = self.data[i * n2 + j].norm_sqr();
                if p > 1e-12 * peak {
                    support += 1;
                }
                let v = g(x1, x2);
                s0 += p;
                s1 += p * v;
                s2 += p * v * v;
            }
        }
        let mean = s1 / s0;
        let var = (s2 / s0 - mean * mean).max(0.0);
        Moments {
            mean,
            rms: var.sqrt(),
            support,
        }
    }

    /// Relative L2 distance `‖self − other‖ / ‖other‖` between states on the same grid.
    pub fn relative_distance(&self, other: &JointAmplitude) -> Result<f64> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch {
                expected: other.domain,
                found: self.domain,
            });
        }
        if self.data.len() != other.data.len() {
            return Err(Error::AxisMismatch("states live on different grids".into()));
        }
        let diff: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok(diff.sqrt() / other.norm)
    }

    /// Copy with the two photon labels exchanged, `f(x₁,x₂) → f(x₂,x₁)`.
    pub fn swapped(&self) -> JointAmplitude {
        let (n1, n2) = self.dims();
        let mut data = vec![Complex64::new(0.0, 0.0); n1 * n2];
        for i in 0..n1 {
            for j in 0..n2 {
                data[j * n1 + i] = self.data[i * n2 + j];
            }
        }
        JointAmplitude {
            domain: self.domain,
            grid: FrequencyGrid {
                axes: [self.grid.axes[1], self.grid.axes[0]],
            },
            data,
            norm: self.norm,
            label: self.label.clone(),
        }
    }

    /// Fraction of intensity sitting on the outermost ring of grid cells.
    pub fn edge_fraction(&self) -> f64 {
        let (n1, n2) = self.dims();
        let total: f64 = self.data.iter().map(|z| z.norm_sqr()).sum();
        let mut edge = 0.0;
        for i in 0..n1 {
            for j in 0..n2 {
                if i == 0 || j == 0 || i == n1 - 1 || j == n2 - 1 {
                    edge += self.data[i * n2 + j].norm_sqr();
                }
            }
        }
        edge / total
    }
}

/// Intensity-weighted first and second moments of a scalar observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub rms: f64,
    /// Number of cells carrying non-negligible intensity.
    pub support: usize,
}

/// Mean and RMS spread of a 1-D weighted distribution.
pub fn weighted_rms(xs: &[f64], weights: &[f64]) -> Option<(f64, f64)> {
    let s0: f64 = weights.iter().sum();
    if !(s0 > 0.0) {
        return None;
    }
    let mean = xs.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() / s0;
    let var = xs
        .iter()
        .zip(weights)
        .map(|(x, w)| w * (x - mean) * (x - mean))
        .sum::<f64>()
        / s0;
    Some((mean, var.max(0.0).sqrt()))
}
