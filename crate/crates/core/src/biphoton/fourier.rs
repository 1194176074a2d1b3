//! Unitary 2-D transform between the (ω₁, ω₂) and (t₁, t₂) pictures.
//!
//! With `ωₖ = c + (k − n/2)Δω` and `tₖ = (k − n/2)Δt`, `Δt = 2π/(nΔω)`, the centered
//! transform `f̃[k] = n^{-1/2} Σⱼ f[j] e^{-i(ωⱼ−c)tₖ}` reduces to a plain FFT sandwiched
//! between `(−1)^{j}` and `(−1)^{k}` modulations, because n/2 is even for every
//! admissible grid.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::state::{Domain, JointAmplitude};
use crate::error::Result;

impl JointAmplitude {
    /// Transform a frequency-domain state to the time domain.
    pub fn to_time_domain(&self) -> Result<JointAmplitude> {
        self.expect_domain(Domain::Frequency)?;
        self.transformed(FftDirection::Forward, Domain::Time)
    }

    /// Transform a time-domain state to the frequency domain.
    pub fn to_frequency_domain(&self) -> Result<JointAmplitude> {
        self.expect_domain(Domain::Time)?;
        self.transformed(FftDirection::Inverse, Domain::Frequency)
    }

    /// This state in the requested domain, converting only when needed.
    pub fn in_domain(&self, domain: Domain) -> Result<std::borrow::Cow<'_, JointAmplitude>> {
        use std::borrow::Cow;
        if self.domain() == domain {
            return Ok(Cow::Borrowed(self));
        }
        Ok(Cow::Owned(match domain {
            Domain::Time => self.to_time_domain()?,
            Domain::Frequency => self.to_frequency_domain()?,
        }))
    }

    fn transformed(&self, direction: FftDirection, target: Domain) -> Result<JointAmplitude> {
        let (n1, n2) = self.dims();
        let mut data = self.data().to_vec();
        fft2(&mut data, n1, n2, direction);
        JointAmplitude::from_parts(target, *self.grid(), data, self.label())
    }
}

fn modulate(data: &mut [Complex64], n1: usize, n2: usize, scale: f64) {
    for i in 0..n1 {
        for j in 0..n2 {
            let s = if (i + j) % 2 == 0 { scale } else { -scale };
            data[i * n2 + j] *= s;
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const BLOCK: usize = 32;
    for ib in (0..rows).step_by(BLOCK) {
        for jb in (0..cols).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(rows) {
                for j in jb..(jb + BLOCK).min(cols) {
                    dst[j * rows + i] = src[i * cols + j];
                }
            }
        }
    }
}

/// Centered, unitary 2-D DFT in place (row-major `n1 × n2`).
pub(crate) fn fft2(data: &mut [Complex64], n1: usize, n2: usize, direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    modulate(data, n1, n2, 1.0);

    let rows = planner.plan_fft(n2, direction);
    rows.process(data);

    let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
    transpose(data, &mut t, n1, n2);
    let cols = planner.plan_fft(n1, direction);
    cols.process(&mut t);
    transpose(&t, data, n2, n1);

    modulate(data, n1, n2, 1.0 / ((n1 * n2) as f64).sqrt());
}
