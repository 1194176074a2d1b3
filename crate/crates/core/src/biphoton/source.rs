use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{FrequencyGrid, TimeGrid};
use super::state::{Domain, JointAmplitude};
use crate::error::{Error, Result};

/// Out-of-band budget: intensity on the outermost grid ring, relative to the total.
pub const OUT_OF_BAND_LIMIT: f64 = 1e-6;

/// Half-width of the spectral window a cascade grid must cover, in units of 1/τ₂.
pub const CASCADE_COVERAGE: f64 = 5.0;

/// Parameterization of a photon-pair source. All values in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    /// Three-level atomic cascade: a long-lived upper level (lifetime `tau1`) feeding a
    /// short-lived intermediate level (lifetime `tau2`).
    Cascade {
        /// Total transition frequency ΔE_A/ħ, the sum of the two photon frequencies.
        sum_frequency: f64,
        tau1: f64,
        tau2: f64,
    },
    /// Spontaneous parametric down-conversion with Gaussian sum/difference envelopes.
    GaussianPdc {
        center1: f64,
        center2: f64,
        sigma_plus: f64,
        sigma_minus: f64,
    },
    /// Pump pulse split in two: coherent pair emission at t = 0 and t = `separation`.
    TimeBin {
        pulse_width: f64,
        separation: f64,
        phase: f64,
    },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl SourceSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SourceSpec::Cascade {
                sum_frequency,
                tau1,
                tau2,
            } => {
                positive("tau1", tau1)?;
                positive("tau2", tau2)?;
                if !sum_frequency.is_finite() {
                    return Err(Error::param("sum_frequency must be finite"));
                }
                if tau1 <= tau2 {
                    return Err(Error::param(format!(
                        "cascade requires tau1 > tau2 > 0 (tau1 = {tau1}, tau2 = {tau2})"
                    )));
                }
            }
            SourceSpec::GaussianPdc {
                center1,
                center2,
                sigma_plus,
                sigma_minus,
            } => {
                positive("sigma_plus", sigma_plus)?;
                positive("sigma_minus", sigma_minus)?;
                if !(center1.is_finite() && center2.is_finite()) {
                    return Err(Error::param("PDC center frequencies must be finite"));
                }
                if sigma_plus > sigma_minus {
                    return Err(Error::param(format!(
                        "PDC requires sigma_plus <= sigma_minus (got {sigma_plus} > {sigma_minus})"
                    )));
                }
            }
            SourceSpec::TimeBin {
                pulse_width,
                separation,
                phase,
            } => {
                positive("pulse_width", pulse_width)?;
                if !phase.is_finite() {
                    return Err(Error::param("time-bin phase must be finite"));
                }
                if !(separation > 5.0 * pulse_width) {
                    return Err(Error::BinOverlap {
                        separation,
                        width: pulse_width,
                    });
                }
            }
        }
        Ok(())
    }

    /// Short identifier used in scan metadata.
    pub fn label(&self) -> String {
        match *self {
            SourceSpec::Cascade { tau1, tau2, .. } => format!("cascade(tau1={tau1},tau2={tau2})"),
            SourceSpec::GaussianPdc {
                sigma_plus,
                sigma_minus,
                ..
            } => format!("gaussian_pdc(sigma_plus={sigma_plus},sigma_minus={sigma_minus})"),
            SourceSpec::TimeBin {
                pulse_width,
                separation,
                phase,
            } => format!("time_bin(width={pulse_width},separation={separation},phase={phase})"),
        }
    }

    /// Checks the grid preconditions of the matching constructor without building the state.
    pub fn check_grid(&self, grid: &FrequencyGrid) -> Result<()> {
        self.validate()?;
        match *self {
            SourceSpec::Cascade { .. } => cascade_grid_check(self, grid),
            SourceSpec::GaussianPdc { .. } => pdc_grid_check(self, grid),
            SourceSpec::TimeBin { .. } => timebin_grid_check(self, &grid.time_grid()),
        }
    }

    /// Builds the state this source emits on `grid` (time-bin states come out in the
    /// time domain on the conjugate time grid).
    pub fn build(&self, grid: &FrequencyGrid) -> Result<JointAmplitude> {
        match self {
            SourceSpec::Cascade { .. } => make_cascade_state(self, grid),
            SourceSpec::GaussianPdc { .. } => make_gaussian_pdc_state(self, grid),
            SourceSpec::TimeBin { .. } => make_timebin_state(self, &grid.time_grid()),
        }
    }
}

/// Unit-peak Lorentzian with half width `gamma`.
fn lorentzian(x: f64, gamma: f64) -> f64 {
    gamma * gamma / (x * x + gamma * gamma)
}

fn cascade_grid_check(spec: &SourceSpec, grid: &FrequencyGrid) -> Result<()> {
    let SourceSpec::Cascade {
        sum_frequency,
        tau1,
        tau2,
    } = *spec
    else {
        return Err(Error::param("expected a cascade source"));
    };
    let [a1, a2] = grid.axes;
    let reach = CASCADE_COVERAGE / tau2;
    // Photon 2 is centered on its axis; photon 1 sits at ΔE/ħ − ω₀₂.
    let line1 = sum_frequency - a2.center;
    if a2.span / 2.0 < reach || (line1 - a1.center).abs() + reach > a1.span / 2.0 {
        return Err(Error::GridResolution(format!(
            "cascade grid must cover ±{reach} around each photon's center"
        )));
    }
    let fwhm = 2.0 / tau1;
    let step = a1.step().max(a2.step());
    if fwhm < 4.0 * step {
        return Err(Error::GridResolution(format!(
            "sum-frequency linewidth {fwhm} spans fewer than 4 cells of {step}"
        )));
    }
    Ok(())
}

/// Cascade state `f = L(ω₁+ω₂−ΔE/ħ; 1/τ₁)·L(ω₂−ω₀₂; 1/τ₂)` with ω₀₂ the axis-2 center.
///
/// The double-Lorentzian line shape is a modeling choice. Its heavy tails make the
/// ring-mass budget unreachable on practical grids, so coverage is checked as ±5/τ₂
/// around each photon's center instead.
pub fn make_cascade_state(spec: &SourceSpec, grid: &FrequencyGrid) -> Result<JointAmplitude> {
    spec.validate()?;
    cascade_grid_check(spec, grid)?;
    let SourceSpec::Cascade {
        sum_frequency,
        tau1,
        tau2,
    } = *spec
    else {
        unreachable!()
    };
    let w02 = grid.axes[1].center;
    let data = JointAmplitude::sample_frequency_fn(grid, |w1, w2| {
        Complex64::new(
            lorentzian(w1 + w2 - sum_frequency, 1.0 / tau1) * lorentzian(w2 - w02, 1.0 / tau2),
            0.0,
        )
    });
    JointAmplitude::normalized(Domain::Frequency, *grid, data, spec.label())
}

fn pdc_grid_check(spec: &SourceSpec, grid: &FrequencyGrid) -> Result<()> {
    let SourceSpec::GaussianPdc { sigma_plus, .. } = *spec else {
        return Err(Error::param("expected a PDC source"));
    };
    // The mean-time envelope must fit inside the conjugate time window.
    let step = grid.axes[0].step().max(grid.axes[1].step());
    if sigma_plus < step {
        return Err(Error::GridResolution(format!(
            "sum-frequency width {sigma_plus} is below the grid step {step}"
        )));
    }
    Ok(())
}

/// Gaussian down-conversion state
/// `exp(−(ω₁+ω₂−ω_s)²/4σ₊²)·exp(−(ω₁−ω₂−ω_d)²/4σ₋²)` with `ω_s = ω₀₁+ω₀₂`, `ω_d = ω₀₁−ω₀₂`.
pub fn make_gaussian_pdc_state(spec: &SourceSpec, grid: &FrequencyGrid) -> Result<JointAmplitude> {
    spec.validate()?;
    pdc_grid_check(spec, grid)?;
    let SourceSpec::GaussianPdc {
        center1,
        center2,
        sigma_plus,
        sigma_minus,
    } = *spec
    else {
        unreachable!()
    };
    let ws = center1 + center2;
    let wd = center1 - center2;
    let (cp, cm) = (
        1.0 / (4.0 * sigma_plus * sigma_plus),
        1.0 / (4.0 * sigma_minus * sigma_minus),
    );
    let data = JointAmplitude::sample_frequency_fn(grid, |w1, w2| {
        let s = w1 + w2 - ws;
        let d = w1 - w2 - wd;
        Complex64::new((-s * s * cp - d * d * cm).exp(), 0.0)
    });
    let state = JointAmplitude::normalized(Domain::Frequency, *grid, data, spec.label())?;
    check_out_of_band(&state)?;
    Ok(state)
}

fn timebin_grid_check(spec: &SourceSpec, grid: &TimeGrid) -> Result<()> {
    let SourceSpec::TimeBin {
        pulse_width,
        separation,
        ..
    } = *spec
    else {
        return Err(Error::param("expected a time-bin source"));
    };
    for axis in 0..2 {
        if grid.step[axis] > pulse_width / 4.0 {
            return Err(Error::GridResolution(format!(
                "time step {} gives fewer than 4 cells per pulse width {pulse_width}",
                grid.step[axis]
            )));
        }
        let lo = grid.time(axis, 0);
        let hi = grid.time(axis, grid.n_points[axis] - 1);
        if lo > -5.0 * pulse_width || hi < separation + 5.0 * pulse_width {
            return Err(Error::GridResolution(format!(
                "time axis [{lo}, {hi}] does not cover both bins"
            )));
        }
    }
    Ok(())
}

/// Time-bin state `g(t₁)g(t₂) + e^{iφ_p} g(t₁−T)g(t₂−T)` with `|g|²` a Gaussian of RMS
/// width σ_p; built directly in the time domain.
pub fn make_timebin_state(spec: &SourceSpec, grid: &TimeGrid) -> Result<JointAmplitude> {
    spec.validate()?;
    timebin_grid_check(spec, grid)?;
    let SourceSpec::TimeBin {
        pulse_width,
        separation,
        phase,
    } = *spec
    else {
        unreachable!()
    };
    let fgrid = grid.frequency_grid()?;
    let g = |t: f64| (-t * t / (4.0 * pulse_width * pulse_width)).exp();
    let late = Complex64::from_polar(1.0, phase);
    let (n1, n2) = (grid.n_points[0], grid.n_points[1]);
    let t2s: Vec<f64> = (0..n2).map(|k| grid.time(1, k)).collect();
    let mut data = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        let t1 = grid.time(0, i);
        let (e1, l1) = (g(t1), g(t1 - separation));
        data.extend(
            t2s.iter()
                .map(|&t2| e1 * g(t2) + late * (l1 * g(t2 - separation))),
        );
    }
    let state = JointAmplitude::normalized(Domain::Time, fgrid, data, spec.label())?;
    check_out_of_band(&state)?;
    Ok(state)
}

fn check_out_of_band(state: &JointAmplitude) -> Result<()> {
    let mass = state.edge_fraction();
    if mass >= OUT_OF_BAND_LIMIT {
        return Err(Error::OutOfBand {
            mass,
            limit: OUT_OF_BAND_LIMIT,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cascade(tau1: f64, tau2: f64) -> SourceSpec {
        SourceSpec::Cascade {
            sum_frequency: 0.0,
            tau1,
            tau2,
        }
    }

    /// Pearson correlation of ω₁ and ω₂ under |f|².
    fn frequency_correlation(s: &JointAmplitude) -> f64 {
        let m1 = s.moments(|a, _| a);
        let m2 = s.moments(|_, b| b);
        let cov = s.moments(|a, b| (a - m1.mean) * (b - m2.mean)).mean;
        cov / (m1.rms * m2.rms)
    }

    #[test]
    fn cascade_rejects_inverted_lifetimes() {
        let grid = FrequencyGrid::square(1024, 0.0, 10.0).unwrap();
        let err = make_cascade_state(&cascade(1.0, 2.0), &grid).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)), "{err}");
        let err = make_cascade_state(&cascade(1.0, 1.0), &grid).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }

    #[test]
    fn cascade_rejects_unresolved_linewidth() {
        let grid = FrequencyGrid::square(256, 0.0, 10.0).unwrap();
        let err = make_cascade_state(&cascade(100.0, 1.0), &grid).unwrap_err();
        assert!(matches!(err, Error::GridResolution(_)), "{err}");
        // Span too narrow for ±5/τ₂.
        let grid = FrequencyGrid::square(256, 0.0, 8.0).unwrap();
        let err = make_cascade_state(&cascade(10.0, 1.0), &grid).unwrap_err();
        assert!(matches!(err, Error::GridResolution(_)));
    }

    #[test]
    fn cascade_is_anticorrelated_and_on_the_energy_line() {
        let sum = 3.0;
        let grid = FrequencyGrid::with_centers(2048, [1.0, 2.0], 10.0).unwrap();
        let spec = SourceSpec::Cascade {
            sum_frequency: sum,
            tau1: 100.0,
            tau2: 1.0,
        };
        let s = make_cascade_state(&spec, &grid).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-9);
        assert!(frequency_correlation(&s) < -0.99);

        let (imax, _) = s
            .data()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
            .unwrap();
        let (n2, step) = (grid.axes[1].n_points, grid.axes[0].step());
        let w1 = grid.axes[0].value(imax / n2);
        let w2 = grid.axes[1].value(imax % n2);
        assert!(
            (w1 + w2 - sum).abs() <= step,
            "peak off the line: {}",
            w1 + w2
        );

        // Probability within 3/τ₁ of the energy line.
        let (n1, _) = s.dims();
        let mut mass = 0.0;
        for i in 0..n1 {
            for j in 0..n2 {
                if (grid.axes[0].value(i) + grid.axes[1].value(j) - sum).abs() <= 3.0 / 100.0 {
                    mass += s.get(i, j).norm_sqr();
                }
            }
        }
        assert!(mass > 0.9, "line mass {mass}");
    }

    #[test]
    fn pdc_correlation_limits() {
        let grid = FrequencyGrid::square(256, 0.0, 16.0).unwrap();
        let sep = SourceSpec::GaussianPdc {
            center1: 0.0,
            center2: 0.0,
            sigma_plus: 1.0,
            sigma_minus: 1.0,
        };
        let s = make_gaussian_pdc_state(&sep, &grid).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-9);
        assert!(frequency_correlation(&s).abs() < 1e-6);

        let grid = FrequencyGrid::square(1024, 0.0, 12.0).unwrap();
        let tight = SourceSpec::GaussianPdc {
            center1: 0.0,
            center2: 0.0,
            sigma_plus: 0.02,
            sigma_minus: 1.0,
        };
        let s = make_gaussian_pdc_state(&tight, &grid).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-9);
        assert!(frequency_correlation(&s) < -0.998);
    }

    #[test]
    fn pdc_rejects_wide_sum_and_truncation() {
        let grid = FrequencyGrid::square(256, 0.0, 16.0).unwrap();
        let bad = SourceSpec::GaussianPdc {
            center1: 0.0,
            center2: 0.0,
            sigma_plus: 2.0,
            sigma_minus: 1.0,
        };
        assert!(matches!(bad.validate(), Err(Error::Parameter(_))));
        let truncated = SourceSpec::GaussianPdc {
            center1: 0.0,
            center2: 0.0,
            sigma_plus: 0.5,
            sigma_minus: 6.0,
        };
        assert!(matches!(
            make_gaussian_pdc_state(&truncated, &grid),
            Err(Error::OutOfBand { .. })
        ));
    }

    #[test]
    fn timebin_populations_and_peaks() {
        let spec = SourceSpec::TimeBin {
            pulse_width: 1.0,
            separation: 20.0,
            phase: 0.0,
        };
        let grid = TimeGrid::new(256, 0.25, [0.0, 0.0]).unwrap();
        let s = make_timebin_state(&spec, &grid).unwrap();
        assert_eq!(s.domain(), Domain::Time);
        assert!((s.norm() - 1.0).abs() < 1e-9);

        let (n1, n2) = s.dims();
        let mut early = 0.0;
        for i in 0..n1 {
            for j in 0..n2 {
                if 0.5 * (grid.time(0, i) + grid.time(1, j)) < 10.0 {
                    early += s.get(i, j).norm_sqr();
                }
            }
        }
        assert!((early - 0.5).abs() < 1e-6, "early bin {early}");

        let marginal = s.marginal(0);
        let times: Vec<f64> = (0..n1).map(|k| grid.time(0, k)).collect();
        let peak_near = |t0: f64| {
            let (k, _) = times
                .iter()
                .enumerate()
                .filter(|(_, &t)| (t - t0).abs() < 5.0)
                .max_by(|a, b| marginal[a.0].total_cmp(&marginal[b.0]))
                .unwrap();
            times[k]
        };
        assert!(peak_near(0.0).abs() < 1e-12);
        assert!((peak_near(20.0) - 20.0).abs() < 1e-12);
        // Dip between the bins.
        let mid = times.iter().position(|&t| (t - 10.0).abs() < 1e-9).unwrap();
        assert!(marginal[mid] < 1e-6 * marginal[n1 / 2]);
    }

    #[test]
    fn timebin_rejects_overlap_and_coarse_grid() {
        let grid = TimeGrid::new(256, 0.25, [0.0, 0.0]).unwrap();
        let overlap = SourceSpec::TimeBin {
            pulse_width: 1.0,
            separation: 5.0,
            phase: 0.0,
        };
        assert!(matches!(
            make_timebin_state(&overlap, &grid),
            Err(Error::BinOverlap { .. })
        ));
        let coarse = TimeGrid::new(64, 0.5, [0.0, 0.0]).unwrap();
        let spec = SourceSpec::TimeBin {
            pulse_width: 1.0,
            separation: 8.0,
            phase: 0.0,
        };
        assert!(matches!(
            make_timebin_state(&spec, &coarse),
            Err(Error::GridResolution(_))
        ));
    }
}
