use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 16;

/// Uniform sampling of one frequency axis, `value(k) = center + (k - n/2) * step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralAxis {
    pub n_points: usize,
    pub center: f64,
    pub span: f64,
}

impl SpectralAxis {
    pub fn new(n_points: usize, center: f64, span: f64) -> Result<Self> {
        let axis = SpectralAxis {
            n_points,
            center,
            span,
        };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n_points.is_power_of_two() || self.n_points < MIN_POINTS {
            return Err(Error::param(format!(
                "axis size {} must be a power of two >= {MIN_POINTS}",
                self.n_points
            )));
        }
        if !(self.span > 0.0 && self.span.is_finite()) {
            return Err(Error::param(format!("axis span {} must be > 0", self.span)));
        }
        if !self.center.is_finite() {
            return Err(Error::param("axis center must be finite"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        self.span / self.n_points as f64
    }

    pub fn value(&self, k: usize) -> f64 {
        self.center + self.offset(k)
    }

    /// Detuning of sample `k` from the axis center.
    pub fn offset(&self, k: usize) -> f64 {
        (k as f64 - (self.n_points / 2) as f64) * self.step()
    }

    pub fn min(&self) -> f64 {
        self.value(0)
    }

    pub fn max(&self) -> f64 {
        self.value(self.n_points - 1)
    }

    /// Spacing of the conjugate time axis.
    pub fn time_step(&self) -> f64 {
        2.0 * PI / self.span
    }

    /// Time of sample `k` on the conjugate axis; time zero sits at index n/2.
    pub fn time(&self, k: usize) -> f64 {
        (k as f64 - (self.n_points / 2) as f64) * self.time_step()
    }

    /// Largest |t| representable on the conjugate time axis.
    pub fn time_extent(&self) -> f64 {
        (self.n_points / 2) as f64 * self.time_step()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.value(k)).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.time(k)).collect()
    }

    pub fn same_sampling(&self, other: &SpectralAxis) -> bool {
        self.n_points == other.n_points
            && (self.center - other.center).abs() <= 1e-12 * self.span
            && (self.span - other.span).abs() <= 1e-12 * self.span
    }
}

/// Two-axis frequency grid over (ω₁, ω₂).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub axes: [SpectralAxis; 2],
}

impl FrequencyGrid {
    pub fn new(axes: [SpectralAxis; 2]) -> Result<Self> {
        axes[0].validate()?;
        axes[1].validate()?;
        Ok(FrequencyGrid { axes })
    }

    /// Square grid with identical sampling on both axes.
    pub fn square(n_points: usize, center: f64, span: f64) -> Result<Self> {
        let axis = SpectralAxis::new(n_points, center, span)?;
        Ok(FrequencyGrid { axes: [axis, axis] })
    }

    pub fn with_centers(n_points: usize, centers: [f64; 2], span: f64) -> Result<Self> {
        Self::new([
            SpectralAxis::new(n_points, centers[0], span)?,
            SpectralAxis::new(n_points, centers[1], span)?,
        ])
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.axes[0].n_points, self.axes[1].n_points)
    }

    pub fn len(&self) -> usize {
        self.axes[0].n_points * self.axes[1].n_points
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same grid at twice the resolution (half the step, same span).
    pub fn refined(&self) -> Self {
        let mut axes = self.axes;
        for a in &mut axes {
            a.n_points *= 2;
        }
        FrequencyGrid { axes }
    }

    pub fn time_grid(&self) -> TimeGrid {
        TimeGrid {
            n_points: [self.axes[0].n_points, self.axes[1].n_points],
            step: [self.axes[0].time_step(), self.axes[1].time_step()],
            carrier: [self.axes[0].center, self.axes[1].center],
        }
    }
}

/// Two-axis time grid over (t₁, t₂), centered on t = 0.
///
/// `carrier` holds the optical frequency each axis' envelope is referenced to;
/// the conjugate frequency grid is centered on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub n_points: [usize; 2],
    pub step: [f64; 2],
    pub carrier: [f64; 2],
}

impl TimeGrid {
    pub fn new(n_points: usize, step: f64, carrier: [f64; 2]) -> Result<Self> {
        let grid = TimeGrid {
            n_points: [n_points; 2],
            step: [step; 2],
            carrier,
        };
        grid.frequency_grid()?;
        Ok(grid)
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        if !(self.step[0] > 0.0 && self.step[1] > 0.0) {
            return Err(Error::param("time step must be > 0"));
        }
        FrequencyGrid::new([
            SpectralAxis::new(self.n_points[0], self.carrier[0], 2.0 * PI / self.step[0])?,
            SpectralAxis::new(self.n_points[1], self.carrier[1], 2.0 * PI / self.step[1])?,
        ])
    }

    pub fn time(&self, axis: usize, k: usize) -> f64 {
        (k as f64 - (self.n_points[axis] / 2) as f64) * self.step[axis]
    }
}
