use std::f64::consts::{PI, TAU};

use nonlocal::lightcone::{
    amplitude_b_closed, amplitude_b_numeric, assemble_two_atom_state, balance_to_maximal,
    concurrence, feynman_propagator, max_product_fidelity, mutual_information, post_select,
    propagator_map, rwa_detection_probability, PostSelectedState, QuadratureOptions, TwoAtomConfig,
    ALPHA_FS,
};
use nonlocal::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn propagator_symmetry_and_far_decay() {
    for (r, t) in [(1.0, 0.3), (5.0, 4.9), (0.2, 3.0)] {
        assert_eq!(
            feynman_propagator(r, t, 1e-6).unwrap(),
            feynman_propagator(r, -t, 1e-6).unwrap()
        );
    }
    for t in [0.5, 1.0, 2.0] {
        for r in [10.0 * t, 20.0 * t, 100.0 * t] {
            let ratio = feynman_propagator(2.0 * r, t, 1e-9).unwrap().norm()
                / feynman_propagator(r, t, 1e-9).unwrap().norm();
            assert!((ratio / 0.25 - 1.0).abs() < 0.01, "r={r} t={t}: {ratio}");
        }
    }
}

#[test]
fn propagator_map_is_nonzero_outside_cone_and_even_in_t() {
    let eps = 1e-4;
    let map = propagator_map([-4.0, 4.0], [-3.0, 3.0], [81, 61], eps).unwrap();
    let (xs, ts, abs) = (
        map.column("x").unwrap(),
        map.column("t").unwrap(),
        map.column("abs").unwrap(),
    );
    let mut outside = 0;
    for k in 0..abs.len() {
        if xs[k].abs() > ts[k].abs() + 3.0 * eps.sqrt() {
            outside += 1;
            assert!(abs[k] > 0.0);
        }
    }
    assert!(outside > 1000);
    // Rows are ordered with t fastest over a range symmetric about 0.
    for row in abs.chunks(61) {
        for k in 0..61 {
            assert_eq!(row[k], row[60 - k]);
        }
    }
}

fn closed(r: f64, w: f64, d: f64, dt: f64) -> Complex64 {
    amplitude_b_closed(&TwoAtomConfig::new(r, w, d, dt).unwrap())
        .unwrap()
        .value
}

#[test]
fn closed_form_examples() {
    assert_eq!(closed(10.0, 2.0, 1.0, 0.0), Complex64::new(0.0, 0.0));
    // ω_AΔt = 2π: |b| = α d²/(2π r²), purely imaginary.
    let (r, d) = (50.0, 0.7);
    let b = closed(r, TAU, d, 1.0);
    assert!(b.re.abs() < 1e-15 * b.norm().max(1e-300) + 1e-22);
    assert!((b.norm() / (ALPHA_FS * d * d / (TAU * r * r)) - 1.0).abs() < 1e-12);
    // 1/r² scaling.
    let near = closed(30.0, 1.3, 1.0, 0.2);
    let far = closed(120.0, 1.3, 1.0, 0.2);
    assert!(((near / far).norm() - 16.0).abs() < 1e-12);
    // Shift of ω_AΔt by 2π adds exactly −(α/4π²)(d²/r²)·2πi.
    let (w, dt) = (0.9, 1.0);
    let jump = closed(r, w + TAU, d, dt) - closed(r, w, d, dt);
    let expected = Complex64::new(0.0, -ALPHA_FS / (4.0 * PI * PI) * d * d / (r * r) * TAU);
    assert!((jump - expected).norm() < 1e-12 * expected.norm());
}

#[test]
fn numeric_matches_closed_form_across_far_field_sweep() {
    let opts = QuadratureOptions::default();
    let mut points = 0;
    for phase in [0.3, 1.0, PI, 5.0, 2.0 * TAU] {
        for ratio in [100.0, 200.0, 500.0, 1000.0] {
            let dt = 0.5;
            let cfg = TwoAtomConfig::new(ratio * dt, phase / dt, 1.0, dt).unwrap();
            let num = amplitude_b_numeric(&cfg, &opts).unwrap();
            let cl = amplitude_b_closed(&cfg).unwrap();
            assert!(cl.warnings.is_empty());
            let dev = (num.value / cl.value - 1.0).norm();
            assert!(dev < 0.01, "phase {phase}, r/Δt {ratio}: {dev}");
            points += 1;
        }
    }
    assert!(points >= 20);
}

/// Independent oracle: the integrand depends only on s = t′ − t″, so the triangle
/// collapses to ∫₀^Δt (Δt − s) e^{iωs} / (4π²(r² − s² − iε)) ds, done here by
/// composite Simpson with many intervals.
fn one_dimensional_oracle(cfg: &TwoAtomConfig, eps: f64) -> Complex64 {
    let n = 200_000;
    let h = cfg.duration / n as f64;
    let f = |s: f64| {
        let k = Complex64::new(1.0, 0.0)
            / (Complex64::new(cfg.separation.powi(2) - s * s, -eps) * (4.0 * PI * PI));
        Complex64::from_polar(cfg.duration - s, cfg.omega * s) * k
    };
    let mut acc = f(0.0) + f(cfg.duration);
    for k in 1..n {
        acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0) * (-ALPHA_FS * cfg.dipole.powi(2) * cfg.omega.powi(2))
}

#[test]
fn numeric_matches_reduced_integral_near_the_cone() {
    // r = 1.5Δt is outside the far field, where the closed form no longer applies.
    let cfg = TwoAtomConfig::new(1.5, 4.0, 1.0, 1.0).unwrap();
    let num = amplitude_b_numeric(&cfg, &QuadratureOptions::default()).unwrap();
    let oracle = one_dimensional_oracle(&cfg, 5e-9);
    assert!(
        (num.value / oracle - 1.0).norm() < 1e-8,
        "{} vs {oracle}",
        num.value
    );
    let cl = amplitude_b_closed(&cfg).unwrap();
    assert_eq!(cl.warnings.len(), 1);
    assert!((cl.value / oracle - 1.0).norm() > 0.05);
}

#[test]
fn refinement_contract_and_epsilon_robustness() {
    let cfg = TwoAtomConfig::new(100.0, PI, 1.0, 1.0).unwrap();
    // A low-order rule needs several doublings, which exercises the error estimate.
    let loose = QuadratureOptions {
        order: 2,
        rel_tolerance: 1e-6,
        ..Default::default()
    };
    let a = amplitude_b_numeric(&cfg, &loose).unwrap();
    let tight = QuadratureOptions {
        order: 2,
        rel_tolerance: 1e-10,
        ..Default::default()
    };
    let b = amplitude_b_numeric(&cfg, &tight).unwrap();
    assert!(b.panels > a.panels);
    assert!((a.value - b.value).norm() < a.error_estimate.max(1e-30));
    assert!(a.epsilon_sensitivity.unwrap() < 1e-6);
    assert!(matches!(
        amplitude_b_numeric(&TwoAtomConfig::new(0.5, 1.0, 1.0, 1.0).unwrap(), &loose),
        Err(Error::OnCone { .. })
    ));
}

/// Numeric search over unit product vectors |Ψ₁⟩ ⊗ |Ψ₂⟩ with |Ψ₁⟩ on atom 1 and the
/// field, |Ψ₂⟩ on atom 2.
fn optimized_product_fidelity(
    a: Complex64,
    b: Complex64,
    g: Complex64,
    rng: &mut ChaCha8Rng,
) -> f64 {
    // Components indexed (atom1, atom2, field): a at (E,G,0), b at (G,E,0), γ at (G,G,φ).
    let psi = |x1: usize, x2: usize, f: usize| match (x1, x2, f) {
        (1, 0, 0) => a,
        (0, 1, 0) => b,
        (0, 0, 1) => g,
        _ => Complex64::new(0.0, 0.0),
    };
    let rand_vec = |rng: &mut ChaCha8Rng, n: usize| -> Vec<Complex64> {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / norm).collect()
    };
    let mut best: f64 = 0.0;
    for _ in 0..200 {
        let mut u = rand_vec(rng, 2);
        let mut v;
        // Alternating maximization: each step is an exact optimum for one factor.
        for _ in 0..50 {
            let amp = |atom: usize, rest: usize| {
                let (x1, f) = (rest / 2, rest % 2);
                psi(x1, atom, f)
            };
            let mut nv: Vec<Complex64> = (0..4)
                .map(|k| (0..2).map(|i| u[i].conj() * amp(i, k)).sum())
                .collect();
            let n = nv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            nv.iter_mut().for_each(|z| *z /= n);
            v = nv;
            let mut nu: Vec<Complex64> = (0..2)
                .map(|i| (0..4).map(|k| v[k].conj() * amp(i, k)).sum())
                .collect();
            let n = nu.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            best = best.max(n * n);
            nu.iter_mut().for_each(|z| *z /= n);
            u = nu;
        }
    }
    best
}

#[test]
fn transfer_amplitude_makes_state_non_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let b = Complex64::from_polar(rng.random_range(0.05..0.6), rng.random_range(0.0..TAU));
        let p = rng.random_range(0.0..(1.0 - b.norm_sqr()) * 0.9);
        let s = assemble_two_atom_state(b, p).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
        let analytic = max_product_fidelity(&s);
        let numeric = optimized_product_fidelity(s.a, s.b, s.gamma, &mut rng);
        assert!((analytic - numeric).abs() < 1e-9, "{analytic} vs {numeric}");
        assert!(analytic < 1.0 - b.norm_sqr() / 2.0);
    }
    let free = assemble_two_atom_state(Complex64::new(0.0, 0.0), 0.0).unwrap();
    assert!((max_product_fidelity(&free) - 1.0).abs() < 1e-15);
}

#[test]
fn protocol_reaches_one_ebit_with_consistent_success() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let b = Complex64::from_polar(rng.random_range(1e-4..0.5), rng.random_range(0.0..TAU));
        let p = rng.random_range(0.0..0.5);
        let s = assemble_two_atom_state(b, p).unwrap();
        let ps = post_select(&s).unwrap();
        assert!((ps.norm_sqr() - 1.0).abs() < 1e-9);
        let bal = balance_to_maximal(&ps).unwrap();
        assert!((concurrence(&bal.state) - 1.0).abs() < 1e-9);
        assert!((mutual_information(&bal.state) - 1.0).abs() < 1e-6);
        // Single shot: amplitudes a·cosθ and b survive, probability 2|b|².
        let direct = 2.0 * b.norm_sqr();
        assert!((bal.state.success - ps.success * bal.stage_success).abs() < 1e-15);
        assert!((bal.state.success - direct).abs() < 1e-12 * direct.max(1e-300));
        assert!(bal.state.success > 0.0 && bal.state.success <= 1.0);
        // Phase preserving.
        let rel_in = (ps.b / ps.a).arg();
        let rel_out = (bal.state.b / bal.state.a).arg();
        assert!((rel_in - rel_out).abs() < 1e-12);
    }
}

#[test]
fn balancing_examples() {
    let s = PostSelectedState {
        a: Complex64::new(0.99f64.sqrt(), 0.0),
        b: Complex64::new(0.1, 0.0),
        success: 1.0,
    };
    let bal = balance_to_maximal(&s).unwrap();
    assert!((bal.stage_success - 0.02).abs() < 1e-12);
    let even = PostSelectedState {
        a: Complex64::new(0.5f64.sqrt(), 0.0),
        b: Complex64::new(0.0, 0.5f64.sqrt()),
        success: 0.3,
    };
    let bal = balance_to_maximal(&even).unwrap();
    assert!((bal.cos_theta - 1.0).abs() < 1e-15 && (bal.stage_success - 1.0).abs() < 1e-12);
    assert!((bal.state.a - even.a).norm() < 1e-15 && (bal.state.b - even.b).norm() < 1e-15);
    let product = PostSelectedState {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        success: 1.0,
    };
    assert_eq!(concurrence(&product), 0.0);
    assert_eq!(mutual_information(&product), 0.0);
}

#[test]
fn rwa_artifact_outside_cone() {
    let p = rwa_detection_probability(2.0, 1.0, 1e-9).unwrap();
    assert!(p.value > 0.0 && p.outside_cone);
    // Log-log slope over r ∈ [10, 100] at t = 1.
    let rs: Vec<f64> = (0..=20)
        .map(|k| 10f64.powf(1.0 + k as f64 / 20.0))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = rs
        .iter()
        .map(|&r| {
            (
                r.ln(),
                rwa_detection_probability(r, 1.0, 1e-9).unwrap().value.ln(),
            )
        })
        .unzip();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope + 4.0).abs() < 0.1, "{slope}");
    let inside = rwa_detection_probability(1.0, 1e6, 1e-9).unwrap();
    assert!(inside.value.is_finite() && !inside.outside_cone);
}
