use std::fs;
use std::path::Path;
use std::process::Command;

use nonlocal::harness::{
    parse_config, run_experiment, verify_manifest, write_outputs, Experiment, ExperimentConfig,
    MANIFEST_FILE,
};
use nonlocal::scan::ScanResult;
use nonlocal::Error;

const BIN: &str = env!("CARGO_BIN_EXE_nonlocal-sim");

fn config_text(experiment: &str, params: &str) -> String {
    format!(r#"{{"schema_version": 1, "experiment": "{experiment}", "params": {params}}}"#)
}

#[test]
fn every_experiment_has_valid_defaults_that_round_trip() {
    for e in Experiment::ALL {
        let c = ExperimentConfig::defaults(e);
        c.validate().unwrap_or_else(|err| panic!("{e}: {err}"));
        let parsed = parse_config(&c.to_json_string()).unwrap();
        assert_eq!(parsed, c, "{e}");
        // A config naming only the experiment resolves to the same defaults.
        let minimal =
            parse_config(&format!(r#"{{"schema_version": 1, "experiment": "{e}"}}"#)).unwrap();
        assert_eq!(minimal, c, "{e}");
    }
}

#[test]
fn non_default_configs_round_trip() {
    let text = r#"{
        "schema_version": 1,
        "experiment": "chsh",
        "seed": 7,
        "output_dir": "runs/chsh",
        "params": {
            "source": {"type": "gaussian_pdc", "center1": 0.25, "center2": -0.25,
                       "sigma_plus": 0.05, "sigma_minus": 1.0},
            "grid": {"n_points": 512, "span": 12.0, "centers": [0.25, -0.25]},
            "window": 2.6,
            "delays": [9.1, 13.7],
            "settings": {"a": 0.1, "minus": "a_b"}
        }
    }"#;
    let c = parse_config(text).unwrap();
    assert_eq!(c.seed, 7);
    let again = parse_config(&c.to_json_string()).unwrap();
    assert_eq!(again, c);
    assert_eq!(again.to_json_string(), c.to_json_string());
}

#[test]
fn cascade_with_inverted_lifetimes_is_a_parameter_error() {
    let text = config_text(
        "classical-bound",
        r#"{"source": {"type": "cascade", "sum_frequency": 0.0, "tau1": 1.0, "tau2": 100.0}}"#,
    );
    let err = parse_config(&text).unwrap_err();
    assert!(matches!(err, Error::Parameter(_)), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    for e in [
        Experiment::HomDip,
        Experiment::TwoAtomEntanglement,
        Experiment::PropagatorMap,
    ] {
        let c = ExperimentConfig {
            seed: 42,
            ..ExperimentConfig::defaults(e)
        };
        let (a, b) = (
            tmp.path().join(format!("{e}-a")),
            tmp.path().join(format!("{e}-b")),
        );
        let ma = write_outputs(&run_experiment(&c).unwrap(), &a).unwrap();
        let mb = write_outputs(&run_experiment(&c).unwrap(), &b).unwrap();
        assert_eq!(ma, mb, "{e}");
        for f in &ma.files {
            assert_eq!(
                fs::read(a.join(&f.path)).unwrap(),
                fs::read(b.join(&f.path)).unwrap(),
                "{e}: {}",
                f.path
            );
        }
        verify_manifest(&a).unwrap();
    }
}

#[test]
fn seed_changes_only_the_random_samples() {
    let run = |seed| {
        let c = ExperimentConfig {
            seed,
            ..ExperimentConfig::defaults(Experiment::TwoAtomEntanglement)
        };
        run_experiment(&c).unwrap().scan
    };
    let (a, b) = (run(1), run(2));
    assert_eq!(
        a.rows[0], b.rows[0],
        "the physical row does not depend on the seed"
    );
    assert_ne!(a.rows[1], b.rows[1]);
}

#[test]
fn empty_sweep_writes_header_only_csv_and_manifest() {
    let c = parse_config(&config_text(
        "hom-dip",
        r#"{"delays": {"start": -1.0, "stop": 1.0, "count": 0}}"#,
    ))
    .unwrap();
    let run = run_experiment(&c).unwrap();
    assert!(run.scan.is_empty());
    let tmp = tempfile::tempdir().unwrap();
    let manifest = write_outputs(&run, tmp.path()).unwrap();
    let csv = fs::read_to_string(tmp.path().join("hom-dip.csv")).unwrap();
    assert_eq!(csv, "tau,coincidence\n");
    assert_eq!(manifest.files.len(), 2);
    assert_eq!(verify_manifest(tmp.path()).unwrap(), manifest);
}

#[test]
fn csv_output_parses_back_to_the_same_table() {
    let run = run_experiment(&ExperimentConfig::defaults(Experiment::RwaArtifact)).unwrap();
    let back = ScanResult::from_csv(&run.scan.to_csv().unwrap()).unwrap();
    assert_eq!(back.columns, run.scan.columns);
    assert_eq!(back.rows, run.scan.rows);
    // Metadata carries the resolved config and the summary statistics.
    assert_eq!(
        run.scan.meta("config").unwrap()["experiment"],
        "rwa-artifact"
    );
    assert!(run.scan.meta_f64("tail_exponent").is_some());
}

#[test]
fn rerun_replaces_outputs_in_place() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::defaults(Experiment::PropagatorMap);
    write_outputs(&run_experiment(&c).unwrap(), tmp.path()).unwrap();
    if let nonlocal::harness::ExperimentParams::PropagatorMap(p) = &mut c.params {
        p.resolution = [3, 3];
    }
    let m = write_outputs(&run_experiment(&c).unwrap(), tmp.path()).unwrap();
    assert_eq!(verify_manifest(tmp.path()).unwrap(), m);
    let csv = fs::read_to_string(tmp.path().join("propagator-map.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    // Only the three outputs remain: no temporary files are left behind.
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 3);
}

fn cli(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("NONLOCAL_SIM_OUT")
        .output()
        .unwrap()
}

#[test]
fn cli_exit_codes_and_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("ok.json"),
        config_text("propagator-map", r#"{"resolution": [5, 4]}"#),
    )
    .unwrap();
    fs::write(
        d.join("bad.json"),
        config_text("propagator-map", r#"{"epsilon": -1}"#),
    )
    .unwrap();
    fs::write(d.join("unknown.json"), config_text("teleport", "{}")).unwrap();
    fs::write(
        d.join("numeric.json"),
        config_text(
            "two-atom-entanglement",
            r#"{"atoms": {"separation": 1.0, "omega": 3.0, "dipole": 1.0, "duration": 2.0}}"#,
        ),
    )
    .unwrap();

    let out = cli(&["run", "--config", "ok.json", "--out", "res"], d);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(d.join("res").join(MANIFEST_FILE).exists());
    verify_manifest(&d.join("res")).unwrap();

    let out = cli(&["validate", "--config", "ok.json"], d);
    assert_eq!(out.status.code(), Some(0));
    let echoed = parse_config(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(
        echoed,
        parse_config(&fs::read_to_string(d.join("ok.json")).unwrap()).unwrap()
    );

    assert_eq!(
        cli(&["validate", "--config", "bad.json"], d).status.code(),
        Some(2)
    );
    assert_eq!(
        cli(&["run", "--config", "unknown.json"], d).status.code(),
        Some(2)
    );
    assert_eq!(
        cli(&["run", "--config", "missing.json"], d).status.code(),
        Some(4)
    );
    assert_eq!(
        cli(&["run", "--config", "numeric.json", "--out", "n"], d)
            .status
            .code(),
        Some(3)
    );

    let out = cli(&["list-experiments"], d);
    let listing = String::from_utf8(out.stdout).unwrap();
    for e in Experiment::ALL {
        assert!(listing.contains(e.name()));
    }
}

#[test]
fn cli_out_flag_overrides_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("c.json"),
        config_text("propagator-map", r#"{"resolution": [2, 2]}"#),
    )
    .unwrap();
    let run = |args: &[&str]| {
        Command::new(BIN)
            .args(args)
            .current_dir(d)
            .env("NONLOCAL_SIM_OUT", "from-env")
            .output()
            .unwrap()
            .status
    };
    assert!(run(&["run", "--config", "c.json"]).success());
    assert!(d.join("from-env").join(MANIFEST_FILE).exists());
    assert!(run(&[
        "run",
        "--config",
        "c.json",
        "--out",
        "from-flag",
        "--seed",
        "3"
    ])
    .success());
    assert!(d.join("from-flag").join(MANIFEST_FILE).exists());
}
