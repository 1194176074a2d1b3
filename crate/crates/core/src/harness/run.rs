//! Dispatch from a resolved config to the simulation modules.

use std::f64::consts::{SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::config::{
    ChshParams, ClassicalParams, Experiment, ExperimentConfig, ExperimentParams, FransonParams,
    GridParams, HomDipParams, HomDispersionParams, NonlocalDispersionParams, PropagatorMapParams,
    RwaParams, TwoAtomParams,
};
use crate::biphoton::{Domain, JointAmplitude, SourceSpec};
use crate::dispersion::{apply_medium, correlation_width, DispersiveMedium, Photon};
use crate::error::{RegimeWarning, Result};
use crate::hom::hom_scan;
use crate::interferometry::{
    chsh_value, classical_bound_violated, fit_fringe, fit_phase_sum_law, fringe_scan, phase_sweep,
    visibility, FransonSetup,
};
use crate::lightcone::{
    amplitude_b_closed, amplitude_b_numeric, assemble_two_atom_state, balance_to_maximal,
    concurrence, max_product_fidelity, mutual_information, post_select, propagator_map,
    rwa_detection_probability,
};
use crate::scan::ScanResult;

/// Phase points per fringe used to measure a visibility.
const VISIBILITY_POINTS: usize = 32;

/// Distances at least this many times the detection time enter the RWA tail fit.
const RWA_TAIL_RATIO: f64 = 10.0;

/// Result of one experiment: its table, with the resolved config, the regime warnings
/// and the library version recorded in the metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub experiment: Experiment,
    pub scan: ScanResult,
    pub warnings: Vec<RegimeWarning>,
}

/// Runs the experiment described by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let mut warnings = Vec::new();
    let scan = match &config.params {
        ExperimentParams::FransonFringes(p) => franson(p, &mut warnings)?,
        ExperimentParams::Chsh(p) => chsh(p, &mut warnings)?,
        ExperimentParams::ClassicalBound(p) => classical(p, &mut warnings)?,
        ExperimentParams::HomDip(p) => hom_dip(p)?,
        ExperimentParams::HomDispersion(p) => hom_dispersion(p)?,
        ExperimentParams::NonlocalDispersion(p) => nonlocal_dispersion(p)?,
        ExperimentParams::PropagatorMap(p) => propagator(p)?,
        ExperimentParams::TwoAtomEntanglement(p) => two_atom(p, config.seed, &mut warnings)?,
        ExperimentParams::RwaArtifact(p) => rwa(p)?,
    };
    dedup(&mut warnings);
    let scan = scan
        .with_meta("experiment", config.experiment())
        .with_meta("config", config.to_json())
        .with_meta("warnings", &warnings)
        .with_meta("library_version", env!("CARGO_PKG_VERSION"));
    scan.validate()?;
    Ok(RunOutput {
        experiment: config.experiment(),
        scan,
        warnings,
    })
}

/// Drops repeated warnings, keeping the first occurrence of each.
fn dedup(warnings: &mut Vec<RegimeWarning>) {
    let mut seen = Vec::new();
    warnings.retain(|w| {
        if seen.contains(w) {
            false
        } else {
            seen.push(w.clone());
            true
        }
    });
}

fn build_source(source: &SourceSpec, grid: &GridParams) -> Result<JointAmplitude> {
    source.build(&grid.build()?)
}

fn franson(p: &FransonParams, warnings: &mut Vec<RegimeWarning>) -> Result<ScanResult> {
    let state = build_source(&p.source, &p.grid)?
        .in_domain(Domain::Time)?
        .into_owned();
    let setup = p.setup()?;
    let phases = phase_sweep(0.0, p.phase_points);
    let grid: Vec<(f64, f64)> = phases
        .iter()
        .flat_map(|&a| phases.iter().map(move |&b| (a, b)))
        .collect();
    let fringes = fringe_scan(&state, &setup, &grid)?;
    warnings.extend(fringes.warnings);
    let fringes = fringes.value;
    let mut scan = ScanResult::new(["phi1", "phi2", "rate"]);
    scan.rows = fringes
        .points
        .iter()
        .map(|q| vec![q.phi1, q.phi2, q.rate])
        .collect();
    scan.set_meta("source", &fringes.source);
    scan.set_meta("normalization", fringes.normalization);
    if !grid.is_empty() {
        let fit = fit_fringe(&fringes)?;
        let law = fit_phase_sum_law(&fringes)?;
        scan.set_meta("visibility", fit.visibility());
        scan.set_meta(
            "phase_sum_fit",
            json!({
                "alpha": law.alpha,
                "rms_residual": law.rms_residual,
                "max_residual": law.max_residual,
            }),
        );
    }
    Ok(scan)
}

/// Visibility of the φ₁ fringe at φ₂ = 0.
fn fringe_visibility(state: &JointAmplitude, setup: &FransonSetup) -> Result<f64> {
    let phases: Vec<(f64, f64)> = phase_sweep(0.0, VISIBILITY_POINTS)
        .into_iter()
        .map(|a| (a, 0.0))
        .collect();
    visibility(&fringe_scan(state, setup, &phases)?.value)
}

fn chsh(p: &ChshParams, warnings: &mut Vec<RegimeWarning>) -> Result<ScanResult> {
    let state = build_source(&p.source, &p.grid)?
        .in_domain(Domain::Time)?
        .into_owned();
    let tsirelson = 2.0 * SQRT_2;
    let mut scan = ScanResult::new(["delay", "visibility", "s", "s_over_tsirelson_v"]);
    for &delay in &p.delays {
        let setup = FransonSetup::symmetric(delay, p.window, 0.0, 0.0)?;
        let v = fringe_visibility(&state, &setup)?;
        let s = chsh_value(&state, &setup, &p.settings)?;
        warnings.extend(s.warnings);
        let ratio = if v > 0.0 {
            s.value.s / (tsirelson * v)
        } else {
            0.0
        };
        scan.push(vec![delay, v, s.value.s, ratio])?;
    }
    let crossing = crossing_visibility(&scan.rows);
    Ok(scan
        .with_meta("source", state.label())
        .with_meta("settings", p.settings)
        .with_meta("classical_limit", 2.0)
        .with_meta("tsirelson_bound", tsirelson)
        .with_meta("crossing_visibility", crossing))
}

/// Visibility at which S crosses 2, interpolated linearly between the bracketing rows.
fn crossing_visibility(rows: &[Vec<f64>]) -> Option<f64> {
    rows.windows(2).find_map(|w| {
        let (v0, s0, v1, s1) = (w[0][1], w[0][2], w[1][1], w[1][2]);
        if (s0 - 2.0) * (s1 - 2.0) <= 0.0 && s0 != s1 {
            Some(v0 + (2.0 - s0) * (v1 - v0) / (s1 - s0))
        } else {
            None
        }
    })
}

fn classical(p: &ClassicalParams, warnings: &mut Vec<RegimeWarning>) -> Result<ScanResult> {
    let state = build_source(&p.source, &p.grid)?
        .in_domain(Domain::Time)?
        .into_owned();
    let mut scan = ScanResult::new(["delay", "bound", "visibility", "margin", "violated"]);
    for &delay in &p.delays {
        let setup = FransonSetup::symmetric(delay, p.window, 0.0, 0.0)?;
        let check = classical_bound_violated(&state, &setup, None)?;
        warnings.extend(check.warnings);
        let c = check.value;
        scan.push(vec![
            delay,
            c.bound,
            c.visibility,
            c.margin,
            f64::from(u8::from(c.violated)),
        ])?;
    }
    Ok(scan.with_meta("source", state.label()))
}

fn hom_dip(p: &HomDipParams) -> Result<ScanResult> {
    let state = build_source(&p.source, &p.grid)?;
    let h = hom_scan(&state, &p.delays.values(), None)?;
    let p_min = h.min_probability();
    let tails = match (h.probabilities.first(), h.probabilities.last()) {
        (Some(a), Some(b)) => Some(0.5 * (a + b)),
        _ => None,
    };
    Ok(ScanResult::from(h)
        .with_meta("min_probability", p_min)
        .with_meta("tail_probability", tails))
}

fn hom_dispersion(p: &HomDispersionParams) -> Result<ScanResult> {
    let state = build_source(&p.source, &p.grid)?;
    let delays = p.delays.values();
    let bare = hom_scan(&state, &delays, None)?;
    let dispersed = hom_scan(&state, &delays, Some(&p.medium))?;
    let mut scan = ScanResult::new(["tau", "bare", "dispersed"]);
    scan.rows = delays
        .iter()
        .zip(bare.probabilities.iter().zip(&dispersed.probabilities))
        .map(|(&t, (&a, &b))| vec![t, a, b])
        .collect();
    let ratio = match (bare.width, dispersed.width) {
        (Some(a), Some(b)) if a > 0.0 => Some(b / a),
        _ => None,
    };
    Ok(scan
        .with_meta("source", &bare.source)
        .with_meta("medium", p.medium)
        .with_meta("width_bare", bare.width)
        .with_meta("width_dispersed", dispersed.width)
        .with_meta("width_ratio", ratio)
        .with_meta("center_bare", bare.center)
        .with_meta("center_dispersed", dispersed.center)
        .with_meta("expected_center_shift", -p.medium.group_delay()))
}

fn nonlocal_dispersion(p: &NonlocalDispersionParams) -> Result<ScanResult> {
    let state = build_source(&p.source, &p.grid)?;
    let bare = correlation_width(&state)?;
    let mut scan = ScanResult::new([
        "gvd",
        "width_bare",
        "width_opposite",
        "width_same",
        "ratio_opposite",
        "ratio_same",
    ]);
    let width = |m1: &DispersiveMedium, m2: &DispersiveMedium| -> Result<f64> {
        let mut s = apply_medium(&state, m1, Photon::First)?;
        s = apply_medium(&s, m2, Photon::Second)?;
        correlation_width(&s)
    };
    for &k2 in &p.gvd {
        let m = DispersiveMedium::quadratic(k2, p.length)?;
        let opposite = width(&m, &m.negated())?;
        let same = width(&m, &m)?;
        scan.push(vec![k2, bare, opposite, same, opposite / bare, same / bare])?;
    }
    Ok(scan
        .with_meta("source", state.label())
        .with_meta("length", p.length))
}

fn propagator(p: &PropagatorMapParams) -> Result<ScanResult> {
    propagator_map(p.x_range, p.t_range, p.resolution, p.epsilon)
}

fn two_atom(p: &TwoAtomParams, seed: u64, warnings: &mut Vec<RegimeWarning>) -> Result<ScanResult> {
    let closed = amplitude_b_closed(&p.atoms)?;
    warnings.extend(closed.warnings);
    let numeric = amplitude_b_numeric(&p.atoms, &p.quadrature)?;
    let mut scan = ScanResult::new([
        "sample",
        "b_re",
        "b_im",
        "p_gamma",
        "product_fidelity",
        "post_success",
        "stage_success",
        "total_success",
        "concurrence",
        "mutual_information",
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = vec![(numeric.value, p.p_gamma)];
    for _ in 0..p.samples {
        let mag = rng.random_range(0.01..0.5);
        let phase = rng.random_range(0.0..TAU);
        let b = Complex64::from_polar(mag, phase);
        // Keeps |a|² ≥ 1/2 ≥ |b|², the regime the balancing pulse acts in.
        let p_gamma = rng.random_range(0.0..0.5 * (1.0 - 2.0 * mag * mag));
        draws.push((b, p_gamma));
    }
    for (k, (b, p_gamma)) in draws.into_iter().enumerate() {
        let state = assemble_two_atom_state(b, p_gamma)?;
        let post = post_select(&state)?;
        let balanced = balance_to_maximal(&post)?;
        scan.push(vec![
            k as f64,
            b.re,
            b.im,
            p_gamma,
            max_product_fidelity(&state),
            post.success,
            balanced.stage_success,
            balanced.state.success,
            concurrence(&balanced.state),
            mutual_information(&balanced.state),
        ])?;
    }
    let rel = (numeric.value - closed.value).norm() / closed.value.norm().max(f64::MIN_POSITIVE);
    Ok(scan
        .with_meta("atoms", p.atoms)
        .with_meta("b_closed", [closed.value.re, closed.value.im])
        .with_meta("b_numeric", [numeric.value.re, numeric.value.im])
        .with_meta("b_relative_difference", rel)
        .with_meta("quadrature_error_estimate", numeric.error_estimate)
        .with_meta("quadrature_panels", numeric.panels)
        .with_meta("epsilon", numeric.epsilon)
        .with_meta("epsilon_sensitivity", numeric.epsilon_sensitivity)
        .with_meta("far_field", p.atoms.far_field())
        .with_meta("seed", seed))
}

fn rwa(p: &RwaParams) -> Result<ScanResult> {
    let mut scan = ScanResult::new(["r", "t", "probability", "outside_cone"]);
    let mut tail = (Vec::new(), Vec::new());
    for r in p.distances() {
        let d = rwa_detection_probability(r, p.time, p.epsilon)?;
        scan.push(vec![
            r,
            p.time,
            d.value,
            f64::from(u8::from(d.outside_cone)),
        ])?;
        if r >= RWA_TAIL_RATIO * p.time && d.value > 0.0 {
            tail.0.push(r.ln());
            tail.1.push(d.value.ln());
        }
    }
    let positive_outside = scan
        .rows
        .iter()
        .filter(|row| row[3] == 1.0)
        .all(|row| row[2] > 0.0);
    Ok(scan
        .with_meta("epsilon", p.epsilon)
        .with_meta("tail_exponent", slope(&tail.0, &tail.1))
        .with_meta("positive_outside_cone", positive_outside))
}

/// Least-squares slope of y against x; `None` with fewer than two distinct x.
fn slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}
