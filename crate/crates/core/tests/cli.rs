use std::path::{Path, PathBuf};

use radial_tumor::cli::run_from_args;
use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> i32 {
    let mut full: Vec<String> = vec!["radial-tumor".into()];
    full.extend(args.iter().map(|s| s.to_string()));
    full.push("--out".into());
    full.push(out.display().to_string());
    run_from_args(full)
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"))
}

/// Parses `file` and validates it against `schemas/<schema>.schema.json`.
fn load_valid(file: &Path, schema: &str) -> Value {
    let instance: Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path(schema)).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(&instance) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{} fails its schema: {msgs:?}", file.display());
    }
    instance
}

const FAST: [&str; 8] = [
    "--param",
    "numerics.grid_n=128",
    "--param",
    "numerics.reference_n=1024",
    "--param",
    "numerics.dt=0.004",
    "--param",
    "numerics.T=4",
];

#[test]
fn stationary_default_radius_and_files() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["stationary"]), 0);
    let meta = load_valid(&dir.path().join("stationary_meta.json"), "stationary_meta");
    let r = meta["R_star"].as_f64().unwrap();
    assert!((1.9435..=1.9835).contains(&r), "{r}");
    let csv = std::fs::read_to_string(dir.path().join("stationary_profile.csv")).unwrap();
    assert!(csv.starts_with("r,sigma,m,E,u\n"));
    assert_eq!(csv.lines().count(), 1026);
}

#[test]
fn stationary_high_mobility_reports_structural_violations() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["stationary", "--param", "mu=10"]), 0);
    let meta = load_valid(&dir.path().join("stationary_meta.json"), "stationary_meta");
    assert!(meta["structural"]["violation_count"].as_u64().unwrap() > 0);
    assert!(meta["R_star"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_params_exit_two_with_error_json() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["stationary", "--param", "sigma_bar=1.0"]), 2);
    let err = load_valid(&dir.path().join("error.json"), "error");
    assert_eq!(err["kind"], "InvalidParams");
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"params": {"mu": "fast"}}"#).unwrap();
    assert_eq!(run(dir.path(), &["check", "--config", cfg.to_str().unwrap()]), 2);
    let err = load_valid(&dir.path().join("error.json"), "error");
    assert_eq!(err["kind"], "InvalidConfig");
    assert_eq!(run(dir.path(), &["check", "--param", "init.amplitude=0.9"]), 2);
}

#[test]
fn check_writes_warnings_not_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["check", "--param", "gamma=25"]), 0);
    let rep = load_valid(&dir.path().join("check_report.json"), "check_report");
    let warnings: Vec<&str> = rep["warnings"].as_array().unwrap().iter().map(|w| w.as_str().unwrap()).collect();
    assert!(warnings.iter().any(|w| w.starts_with("gamma")));
}

#[test]
fn simulate_perturbed_converges_for_low_mobility() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &[&["simulate"], &FAST[..]].concat()), 0);
    let s = load_valid(&dir.path().join("simulate_summary.json"), "simulate_summary");
    assert_eq!(s["converged"], true);
    assert!(s["final_distances"]["sup_e"].as_f64().unwrap() <= 1e-2);
    let series = std::fs::read_to_string(dir.path().join("series.csv")).unwrap();
    assert!(series.starts_with("t,R,u1,dist_sigma,dist_E,dist_m\n"));
    assert_eq!(series.lines().count(), 1 + 1001);
}

#[test]
fn simulate_high_mobility_records_final_band() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &[&["simulate", "--param", "mu=10"], &FAST[..]].concat()), 0);
    let s = load_valid(&dir.path().join("simulate_summary.json"), "simulate_summary");
    let (lo, hi) = (s["E_final_min"].as_f64().unwrap(), s["E_final_max"].as_f64().unwrap());
    assert!(0.0 < lo && lo <= hi);
    // the run settles on the stationary profile, so the bands coincide
    assert!((lo - s["E_stationary_min"].as_f64().unwrap()).abs() < 1e-3);
    assert!((hi - s["E_stationary_max"].as_f64().unwrap()).abs() < 1e-3);
}

#[test]
fn zero_horizon_snapshot_is_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate",
        "--param",
        "numerics.T=0",
        "--param",
        "numerics.grid_n=64",
        "--param",
        "numerics.reference_n=512",
        "--param",
        "init.kind=stationary",
    ];
    assert_eq!(run(dir.path(), &args), 0);
    let snaps = std::fs::read_to_string(dir.path().join("snapshots.csv")).unwrap();
    let rows: Vec<&str> = snaps.lines().skip(1).collect();
    assert_eq!(rows.len(), 65);
    assert!(rows.iter().all(|r| r.starts_with("0,")));
    let last: Vec<f64> = rows[64].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!((last[1], last[2]), (1.0, 1.0));

    // the same file is accepted back as initial data
    let path = dir.path().join("init.csv");
    std::fs::write(&path, &snaps).unwrap();
    let again = dir.path().join("again");
    let r0 = "init.r0=1.9634";
    let file_args = [
        "simulate",
        "--param",
        "numerics.T=0.01",
        "--param",
        "numerics.grid_n=64",
        "--param",
        "numerics.reference_n=512",
        "--param",
        "init.kind=file",
        "--param",
        r0,
        "--param",
    ];
    let spec = format!("init.path={}", path.display());
    assert_eq!(run(&again, &[&file_args[..], &[spec.as_str()]].concat()), 0);
}

#[test]
fn simulate_is_byte_deterministic_with_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [&["simulate", "--seed", "17", "--param", "numerics.T=1"], &FAST[..6]].concat();
    assert_eq!(run(a.path(), &args), 0);
    assert_eq!(run(b.path(), &args), 0);
    for f in ["series.csv", "snapshots.csv", "simulate_summary.json"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let s = load_valid(&a.path().join("simulate_summary.json"), "simulate_summary");
    assert_eq!(s["seed"], 17);
    assert_eq!(s["perturbation"]["kind"], "cosine_bumps");
}

#[test]
fn paper_verbatim_flag_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let args = [&["simulate", "--paper-verbatim-transform", "--param", "numerics.T=0.5"], &FAST[..6]].concat();
    assert_eq!(run(dir.path(), &args), 0);
    let s = load_valid(&dir.path().join("simulate_summary.json"), "simulate_summary");
    assert_eq!(s["transform"], "paper_verbatim");
}

#[test]
fn default_sweep_radii_increase_and_jobs_do_not_change_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run(a.path(), &["sweep", "--jobs", "1", "--param", "sweep.simulate=false"]), 0);
    assert_eq!(run(b.path(), &["sweep", "--jobs", "3", "--param", "sweep.simulate=false"]), 0);
    let csv_a = std::fs::read(a.path().join("sweep.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(b.path().join("sweep.csv")).unwrap());
    let meta = load_valid(&a.path().join("sweep_meta.json"), "sweep_meta");
    let radii: Vec<f64> = meta["rows"].as_array().unwrap().iter().map(|r| r["R_star"].as_f64().unwrap()).collect();
    assert_eq!(radii.len(), 3);
    assert!(radii.windows(2).all(|w| w[0] < w[1]), "{radii:?}");
    assert!(a.path().join("row_2/stationary_profile.csv").exists());
}

#[test]
fn sweep_over_consumption_range_is_viable() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        &["sweep", "--param", "sweep.param=\"lambda\"", "--param", "sweep.values=[0.05, 2]"],
        &FAST[..],
        &["--param", "numerics.T=0.5"],
    ]
    .concat();
    assert_eq!(run(dir.path(), &args), 0);
    let meta = load_valid(&dir.path().join("sweep_meta.json"), "sweep_meta");
    for row in meta["rows"].as_array().unwrap() {
        assert!(row["error"].is_null(), "{row}");
        assert_eq!(row["viability"], true);
        assert!(row["simulation"]["min_R"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn sweep_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["sweep", "--param", "sweep.values=[]"]), 2);
    assert_eq!(run(dir.path(), &["sweep", "--param", "sweep.param=nope"]), 2);
    // one bad row does not fail the sweep
    let mixed = ["sweep", "--param", "sweep.param=sigma_bar", "--param", "sweep.values=[0.7, 1.5]", "--param", "sweep.simulate=false"];
    assert_eq!(run(dir.path(), &mixed), 0);
    let meta = load_valid(&dir.path().join("sweep_meta.json"), "sweep_meta");
    assert_eq!(meta["succeeded"], 1);
    assert!(meta["rows"][1]["error"].as_str().unwrap().starts_with("InvalidParams"));
    let all_bad = ["sweep", "--param", "sweep.param=sigma_bar", "--param", "sweep.values=[1.5]"];
    assert_eq!(run(dir.path(), &all_bad), 2);
}

#[test]
fn oracles_pass_and_mutation_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["oracles"]), 0);
    let rep = load_valid(&dir.path().join("oracles_report.json"), "oracles_report");
    assert!(rep["outcomes"].as_array().unwrap().len() >= 5);
    assert_eq!(rep["all_passed"], true);

    let bad = tempfile::tempdir().unwrap();
    assert_eq!(run(bad.path(), &["oracles", "--param", "oracles.theta_shift=1e-3"]), 1);
    let rep = load_valid(&bad.path().join("oracles_report.json"), "oracles_report");
    let linear = rep["outcomes"].as_array().unwrap().iter().find(|o| o["name"] == "linear_exact").unwrap();
    assert_eq!(linear["passed"], false);
    load_valid(&bad.path().join("error.json"), "error");
}
