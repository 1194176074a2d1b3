//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the report is printed even when every criterion
//! passes. Criteria run concurrently and are reported in order.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2, TAU};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nonlocal::biphoton::{
    first_order_coherence_time, second_order_coherence_time, FrequencyGrid, SourceSpec,
};
use nonlocal::harness::{run_experiment, Experiment, ExperimentConfig};
use nonlocal::hom::{hom_coincidence, hom_scan, HomSetup};
use nonlocal::lightcone::{
    amplitude_b_closed, amplitude_b_numeric, assemble_two_atom_state, balance_to_maximal,
    concurrence, feynman_propagator, mutual_information, post_select, rwa_detection_probability,
    QuadratureOptions, TwoAtomConfig,
};
use nonlocal::scan::ScanResult;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run(e: Experiment) -> Result<ScanResult, String> {
    run_experiment(&ExperimentConfig::defaults(e))
        .map(|r| r.scan)
        .map_err(|err| format!("{e} failed: {err}"))
}

fn col(scan: &ScanResult, name: &str) -> Vec<f64> {
    scan.column(name).expect("column present")
}

/// Least-squares slope of y on x.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// 1. Rate over a 16×16 phase grid follows α·cos²((φ₁+φ₂)/2) with residual < 1e-3.
fn franson_fringe_law() -> Outcome {
    let scan = run(Experiment::FransonFringes)?;
    let (p1, p2, rate) = (col(&scan, "phi1"), col(&scan, "phi2"), col(&scan, "rate"));
    let model: Vec<f64> = p1
        .iter()
        .zip(&p2)
        .map(|(a, b)| (0.5 * (a + b)).cos().powi(2))
        .collect();
    let alpha = rate.iter().zip(&model).map(|(r, m)| r * m).sum::<f64>()
        / model.iter().map(|m| m * m).sum::<f64>();
    let max_res = rate
        .iter()
        .zip(&model)
        .map(|(r, m)| (r - alpha * m).abs())
        .fold(0.0, f64::max);
    let warnings = scan
        .meta("warnings")
        .and_then(|w| w.as_array())
        .map_or(0, Vec::len);
    check(
        rate.len() == 256 && max_res < 1e-3 && warnings == 0,
        format!(
            "{} points, alpha = {alpha:.6}, max residual = {max_res:.2e}, regime warnings = {warnings}",
            rate.len()
        ),
    )
}

/// 2. S = 2√2·v within 1%, crossing S = 2 at v = 0.7071 ± 0.005.
fn bell_threshold() -> Outcome {
    let scan = run(Experiment::Chsh)?;
    let (v, s) = (col(&scan, "visibility"), col(&scan, "s"));
    let worst = v
        .iter()
        .zip(&s)
        .map(|(v, s)| (s / (2.0 * SQRT_2 * v) - 1.0).abs())
        .fold(0.0, f64::max);
    let crossing = (1..v.len()).find_map(|k| {
        let (s0, s1) = (s[k - 1], s[k]);
        ((s0 - 2.0) * (s1 - 2.0) <= 0.0 && s0 != s1)
            .then(|| v[k - 1] + (2.0 - s0) * (v[k] - v[k - 1]) / (s1 - s0))
    });
    let Some(vc) = crossing else {
        return Err(format!(
            "S never crosses 2 (S from {:.3} to {:.3})",
            s[0],
            s[s.len() - 1]
        ));
    };
    check(
        worst < 0.01 && (vc - FRAC_1_SQRT_2).abs() < 0.005,
        format!(
            "{} visibilities in [{:.3}, {:.3}], max |S/(2√2 v) − 1| = {worst:.2e}, S = 2 at v = {vc:.5}",
            v.len(),
            v[v.len() - 1],
            v[0]
        ),
    )
}

/// 3. Cascade with ΔT ≫ τ₂: bound < 0.1 while v > 0.99.
fn classical_bound() -> Outcome {
    let scan = run(Experiment::ClassicalBound)?;
    let rows: Vec<(f64, f64, f64)> = scan.rows.iter().map(|r| (r[0], r[1], r[2])).collect();
    let hits: Vec<&(f64, f64, f64)> = rows
        .iter()
        .filter(|(_, b, v)| *b < 0.1 && *v > 0.99)
        .collect();
    let detail = rows
        .iter()
        .map(|(d, b, v)| format!("ΔT={d:.2}: bound {b:.1e}, v {v:.4}"))
        .collect::<Vec<_>>()
        .join("; ");
    check(!hits.is_empty(), detail)
}

/// 4. τ₁/τ₂ = 100: second/first-order coherence ratio > 10, stable to 1% under doubling.
fn coherence_hierarchy() -> Outcome {
    let spec = SourceSpec::Cascade {
        sum_frequency: 0.0,
        tau1: 100.0,
        tau2: 1.0,
    };
    let ratio = |grid: &FrequencyGrid| -> Result<f64, String> {
        let s = spec.build(grid).map_err(|e| e.to_string())?;
        let first = first_order_coherence_time(&s).map_err(|e| e.to_string())?;
        let second = second_order_coherence_time(&s).map_err(|e| e.to_string())?;
        Ok(second / first)
    };
    let base = FrequencyGrid::square(2048, 0.0, 10.0).map_err(|e| e.to_string())?;
    let r1 = ratio(&base)?;
    let r2 = ratio(&base.refined())?;
    let change = (r2 / r1 - 1.0).abs();
    check(
        r1 > 10.0 && change < 0.01,
        format!(
            "ratio {r1:.3} on 2048², {r2:.3} on 4096², change {:.3}%",
            100.0 * change
        ),
    )
}

/// 5. Symmetric HOM: P(0) < 1e-6, far P = 0.5 ± 1e-3; weak asymmetry: visibility > 0.99.
fn hom_dip() -> Outcome {
    let grid = FrequencyGrid::square(512, 0.0, 16.0).map_err(|e| e.to_string())?;
    let pdc = |wd: f64| {
        SourceSpec::GaussianPdc {
            center1: 0.5 * wd,
            center2: -0.5 * wd,
            sigma_plus: 0.1,
            sigma_minus: 1.0,
        }
        .build(&grid)
        .map_err(|e| e.to_string())
    };
    let sym = pdc(0.0)?;
    let p = |t: f64| hom_coincidence(&sym, &HomSetup::new(t, None).unwrap()).unwrap();
    let (p0, far) = (p(0.0), [p(-10.0), p(10.0)]);
    let far_dev = far.iter().map(|x| (x - 0.5).abs()).fold(0.0, f64::max);
    let wd = 0.1;
    let delays: Vec<f64> = (-100..=100).map(|k| 0.05 * k as f64).collect();
    let asym = hom_scan(&pdc(wd)?, &delays, None).map_err(|e| e.to_string())?;
    let vis = asym.visibility.unwrap_or(0.0);
    let oracle = (-wd * wd / 2.0).exp();
    check(
        p0 < 1e-6 && far_dev < 1e-3 && vis > 0.99,
        format!(
            "P(0) = {p0:.2e}, |P(±10/σ₋) − 0.5| = {far_dev:.2e}, ω_d = {wd}: visibility {vis:.5} (overlap {oracle:.5})"
        ),
    )
}

/// 6. Opposite-sign GVD keeps the correlation width (ratio 1 ± 0.02); same sign > 2.
fn nonlocal_dispersion() -> Outcome {
    let scan = run(Experiment::NonlocalDispersion)?;
    let (gvd, opp, same) = (
        col(&scan, "gvd"),
        col(&scan, "ratio_opposite"),
        col(&scan, "ratio_same"),
    );
    let k = gvd
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .ok_or("empty scan")?;
    let all_opp = opp.iter().all(|r| (r - 1.0).abs() < 0.02);
    check(
        all_opp && same[k] > 2.0,
        format!(
            "k″z up to {}: opposite ratios ≤ {:.4}, same-sign ratio {:.3}",
            gvd[k],
            opp.iter().cloned().fold(0.0, f64::max),
            same[k]
        ),
    )
}

/// 7. Second-order-only medium in one HOM arm leaves the dip width unchanged (± 0.02).
fn hom_dispersion() -> Outcome {
    let scan = run(Experiment::HomDispersion)?;
    let ratio = scan.meta_f64("width_ratio").ok_or("no width ratio")?;
    check(
        (ratio - 1.0).abs() < 0.02,
        format!("k″z = 4: dip width ratio {ratio:.5}"),
    )
}

/// 8. D_F(1, 0) = i/4π², |D_F| ∝ r⁻² outside the cone, nonzero everywhere outside.
fn propagator() -> Outcome {
    let d = feynman_propagator(1.0, 0.0, 1e-12).map_err(|e| e.to_string())?;
    let expect = Complex64::new(0.0, 1.0 / (4.0 * PI * PI));
    let spot = (d - expect).norm() / expect.norm();
    let rs: Vec<f64> = (0..=20).map(|k| 2.0 * 1.2f64.powi(k)).collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = rs
        .iter()
        .map(|&r| {
            (
                r.ln(),
                feynman_propagator(r, 0.5, 1e-9).unwrap().norm().ln(),
            )
        })
        .unzip();
    let exponent = slope(&lx, &ly);
    let map = run(Experiment::PropagatorMap)?;
    let outside: Vec<&Vec<f64>> = map
        .rows
        .iter()
        .filter(|r| r[0].abs() > r[1].abs())
        .collect();
    let zero = outside
        .iter()
        .filter(|r| r[4] <= 0.0 || r[4].is_nan())
        .count();
    check(
        spot < 1e-9 && (exponent + 2.0).abs() < 0.05 && !outside.is_empty() && zero == 0,
        format!(
            "|D_F(1,0)/(i/4π²) − 1| = {spot:.1e}, exponent {exponent:.4}, {} spacelike map points, {zero} zero",
            outside.len()
        ),
    )
}

/// 9. Numeric b matches the closed form within 1% for ≥ 20 far-field points; b(0) = 0.
fn oracle_equivalence() -> Outcome {
    let opts = QuadratureOptions::default();
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for &r in &[100.0, 250.0, 1000.0, 5000.0] {
        for &phase in &[0.5, 1.0, PI, 5.0, 12.0] {
            let c = TwoAtomConfig::new(r, phase, 1.0, 1.0).map_err(|e| e.to_string())?;
            let num = amplitude_b_numeric(&c, &opts)
                .map_err(|e| e.to_string())?
                .value;
            let closed = amplitude_b_closed(&c).map_err(|e| e.to_string())?.value;
            worst = worst.max((num / closed - 1.0).norm());
            n += 1;
        }
    }
    let z = TwoAtomConfig::new(100.0, 3.0, 1.0, 0.0).map_err(|e| e.to_string())?;
    let zero_num = amplitude_b_numeric(&z, &opts)
        .map_err(|e| e.to_string())?
        .value;
    let zero_closed = amplitude_b_closed(&z).map_err(|e| e.to_string())?.value;
    let zeros = zero_num == Complex64::new(0.0, 0.0) && zero_closed == Complex64::new(0.0, 0.0);
    check(
        n >= 20 && worst < 0.01 && zeros,
        format!("{n} points with r ≥ 100Δt: max |numeric/closed − 1| = {worst:.2e}; b(Δt=0) exactly 0: {zeros}"),
    )
}

/// 10. Post-selection plus balancing gives C = 1, I = 1 bit, and the chained success
///     probability equals the single-shot probability 2|b|².
fn entanglement_pipeline() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut dc, mut di, mut dp): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut in_range = true;
    let samples = 500;
    for _ in 0..samples {
        let mag = 10f64.powf(rng.random_range(-6.0..-0.5));
        let b = Complex64::from_polar(mag, rng.random_range(0.0..TAU));
        let p_gamma = rng.random_range(0.0..0.5 * (1.0 - 2.0 * mag * mag));
        let state = assemble_two_atom_state(b, p_gamma).map_err(|e| e.to_string())?;
        let post = post_select(&state).map_err(|e| e.to_string())?;
        let bal = balance_to_maximal(&post).map_err(|e| e.to_string())?;
        dc = dc.max((concurrence(&bal.state) - 1.0).abs());
        di = di.max((mutual_information(&bal.state) - 1.0).abs());
        let chained = post.success * bal.stage_success;
        let direct = 2.0 * b.norm_sqr();
        dp = dp.max((chained / direct - 1.0).abs() + (bal.state.success / chained - 1.0).abs());
        in_range &= [post.success, bal.stage_success, bal.state.success]
            .iter()
            .all(|p| *p > 0.0 && *p <= 1.0);
    }
    check(
        dc < 1e-9 && di < 1e-6 && dp < 1e-9 && in_range,
        format!(
            "{samples} inputs: max |C − 1| = {dc:.1e}, max |I − 1| = {di:.1e}, max relative success mismatch = {dp:.1e}"
        ),
    )
}

/// 11. RWA detection probability is positive at (r=2, t=1) and decays as r⁻⁴.
fn rwa_artifact() -> Outcome {
    let p = rwa_detection_probability(2.0, 1.0, 1e-9).map_err(|e| e.to_string())?;
    let scan = run(Experiment::RwaArtifact)?;
    let (r, prob) = (col(&scan, "r"), col(&scan, "probability"));
    let (lx, ly): (Vec<f64>, Vec<f64>) = r
        .iter()
        .zip(&prob)
        .filter(|(r, _)| **r >= 10.0)
        .map(|(r, p)| (r.ln(), p.ln()))
        .unzip();
    let exponent = slope(&lx, &ly);
    check(
        p.value > 0.0 && p.outside_cone && (exponent + 4.0).abs() < 0.1,
        format!(
            "P(2, 1) = {:.3e}, outside cone: {}, tail exponent {exponent:.4}",
            p.value, p.outside_cone
        ),
    )
}

/// 12. Two runs of every experiment give byte-identical CSVs.
fn determinism() -> Outcome {
    let mut differing = Vec::new();
    for e in Experiment::ALL {
        let csv = || -> Result<String, String> { run(e)?.to_csv().map_err(|err| err.to_string()) };
        if csv()? != csv()? {
            differing.push(e.name());
        }
    }
    check(
        differing.is_empty(),
        format!(
            "{} experiments run twice, differing: {:?}",
            Experiment::ALL.len(),
            differing
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("Franson fringe law", franson_fringe_law),
        ("Bell threshold", bell_threshold),
        ("Classical bound", classical_bound),
        ("Coherence hierarchy", coherence_hierarchy),
        ("HOM dip", hom_dip),
        ("Nonlocal dispersion cancellation", nonlocal_dispersion),
        ("HOM dispersion cancellation", hom_dispersion),
        ("Propagator", propagator),
        ("Oracle equivalence", oracle_equivalence),
        ("Entanglement pipeline", entanglement_pipeline),
        ("RWA artifact", rwa_artifact),
        ("Harness determinism", determinism),
    ];
    let start = Instant::now();
    let results: Vec<(Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let out =
                        std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".to_string()));
                    (out, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (k, ((name, _), (out, secs))) in criteria.iter().zip(&results).enumerate() {
        let (tag, detail) = match out {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name} ({secs:.1} s): {detail}", k + 1);
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1} s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
