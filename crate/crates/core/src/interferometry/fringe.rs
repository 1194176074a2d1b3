use std::f64::consts::{PI, TAU};

use super::FringeScan;
use crate::error::{Error, Result};

/// Least-squares fit of `A·cos²((Φ + c)/2) + B` to rates against Φ = φ₁ + φ₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub amplitude: f64,
    pub offset: f64,
    pub phase: f64,
    pub rms_residual: f64,
    pub max_residual: f64,
}

impl FringeFit {
    pub fn max_rate(&self) -> f64 {
        self.offset + self.amplitude
    }

    pub fn min_rate(&self) -> f64 {
        self.offset
    }

    /// (R_max − R_min)/(R_max + R_min), clamped to [0, 1].
    pub fn visibility(&self) -> f64 {
        let den = self.max_rate() + self.min_rate();
        if self.amplitude <= 0.0 || den <= 0.0 {
            return 0.0;
        }
        (self.amplitude / den).clamp(0.0, 1.0)
    }
}

/// One-parameter fit of `α·cos²((φ₁+φ₂)/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSumFit {
    pub alpha: f64,
    pub rms_residual: f64,
    pub max_residual: f64,
}

fn check_coverage(sums: &[f64]) -> Result<()> {
    let mut wrapped: Vec<f64> = sums.iter().map(|s| s.rem_euclid(TAU)).collect();
    wrapped.sort_by(f64::total_cmp);
    wrapped.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if wrapped.len() < 3 {
        return Err(Error::InsufficientCoverage(format!(
            "{} distinct phase sums",
            wrapped.len()
        )));
    }
    let mut gap = wrapped[0] + TAU - wrapped[wrapped.len() - 1];
    for w in wrapped.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    if gap >= PI {
        return Err(Error::InsufficientCoverage(format!(
            "largest gap between phase sums is {gap:.3} rad"
        )));
    }
    Ok(())
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Fits the fringe as `p + q·cos Φ + s·sin Φ`, which is linear and equivalent to
/// `A·cos²((Φ+c)/2) + B` with `A = 2√(q²+s²)`, `B = p − A/2`.
pub fn fit_fringe(scan: &FringeScan) -> Result<FringeFit> {
    let sums = scan.phase_sums();
    check_coverage(&sums)?;
    let rates = scan.rates();
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (&phi, &r) in sums.iter().zip(&rates) {
        let row = [1.0, phi.cos(), phi.sin()];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * r;
        }
    }
    let [p, q, s] = solve3(ata, atb)
        .ok_or_else(|| Error::InsufficientCoverage("singular fringe fit".into()))?;
    let amplitude = 2.0 * q.hypot(s);
    let offset = p - 0.5 * amplitude;
    let phase = (-s).atan2(q);
    let (mut ss, mut worst) = (0.0, 0.0f64);
    for (&phi, &r) in sums.iter().zip(&rates) {
        let model = p + q * phi.cos() + s * phi.sin();
        ss += (r - model).powi(2);
        worst = worst.max((r - model).abs());
    }
    Ok(FringeFit {
        amplitude,
        offset,
        phase,
        rms_residual: (ss / rates.len() as f64).sqrt(),
        max_residual: worst,
    })
}

/// Fits the pure phase-sum law `α·cos²((φ₁+φ₂)/2)` with no offset.
pub fn fit_phase_sum_law(scan: &FringeScan) -> Result<PhaseSumFit> {
    let sums = scan.phase_sums();
    check_coverage(&sums)?;
    let basis: Vec<f64> = sums.iter().map(|s| (0.5 * s).cos().powi(2)).collect();
    let rates = scan.rates();
    let num: f64 = basis.iter().zip(&rates).map(|(b, r)| b * r).sum();
    let den: f64 = basis.iter().map(|b| b * b).sum();
    let alpha = num / den;
    let res: Vec<f64> = basis
        .iter()
        .zip(&rates)
        .map(|(b, r)| r - alpha * b)
        .collect();
    Ok(PhaseSumFit {
        alpha,
        rms_residual: (res.iter().map(|r| r * r).sum::<f64>() / res.len() as f64).sqrt(),
        max_residual: res.iter().fold(0.0, |m, r| m.max(r.abs())),
    })
}

/// Fringe visibility from the fitted fringe.
pub fn visibility(scan: &FringeScan) -> Result<f64> {
    Ok(fit_fringe(scan)?.visibility())
}
