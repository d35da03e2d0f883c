//! Artifact-level behavior of the runner: determinism, abort diagnostics,
//! grid round-trips, and process exit codes.

use std::path::Path;
use std::process::Command;

use qamp_cli::artifacts::{read_grid_csv, read_json};
use qamp_cli::config::ScenarioConfig;
use qamp_cli::runner::{run_scenario, RunError};

fn small_config(dir: &Path) -> ScenarioConfig {
    ScenarioConfig::parse(&format!(
        "scenario_id = det\n\
         lambda_over_gamma = 100\n\
         field_dim = 24\n\
         t_max = 0.5\n\
         sample_interval = 0.1\n\
         snapshots = 0,0.5\n\
         phase_space = q,w\n\
         grid_half_width = 7\n\
         guard_tol = 0.001\n\
         out_dir = {}\n",
        dir.display()
    ))
    .unwrap()
}

#[test]
fn identical_configs_produce_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    run_scenario(&cfg).unwrap();
    let dir = cfg.scenario_dir();
    let thermo1 = std::fs::read(dir.join("thermo.csv")).unwrap();
    let meta1 = std::fs::read(dir.join("meta.json")).unwrap();
    let grid1 = std::fs::read(dir.join("snapshots/w_t0p5.csv")).unwrap();

    run_scenario(&cfg).unwrap();
    assert_eq!(thermo1, std::fs::read(dir.join("thermo.csv")).unwrap());
    assert_eq!(meta1, std::fs::read(dir.join("meta.json")).unwrap());
    assert_eq!(
        grid1,
        std::fs::read(dir.join("snapshots/w_t0p5.csv")).unwrap()
    );
}

#[test]
fn grid_csv_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    run_scenario(&cfg).unwrap();
    let path = cfg.scenario_dir().join("snapshots/q_t0.csv");
    let grid = read_grid_csv(&path).unwrap();
    assert_eq!(grid.spec.n_re, cfg.grid_points);
    assert_eq!(grid.spec.re_min, -7.0);
    // Integral survives the 12-digit serialization.
    assert!((grid.integral() - 1.0).abs() < 1e-2);

    let sidecar = read_json(&cfg.scenario_dir().join("snapshots/q_t0.json")).unwrap();
    assert_eq!(sidecar["function"], "q");
    assert_eq!(sidecar["scenario_id"], "det");
    assert!(sidecar["integral"].as_f64().unwrap() > 0.9);
}

#[test]
fn truncation_abort_writes_diagnostic_meta() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small_config(tmp.path());
    cfg.scenario_id = "abort".into();
    // Initial state piled against the truncation boundary.
    cfg.field_init = qamp_cli::config::FieldInit::Fock(22);
    cfg.snapshots = vec![];
    let err = run_scenario(&cfg).unwrap_err();
    match &err {
        RunError::Abort { reason, .. } => assert!(reason.contains("truncation"), "{reason}"),
        other => panic!("expected abort, got {other:?}"),
    }
    assert_eq!(err.exit_code(), 3);
    let meta = read_json(&cfg.scenario_dir().join("meta.json")).unwrap();
    assert!(meta["health"]["abort"]["reason"]
        .as_str()
        .unwrap()
        .contains("truncation"));
}

#[test]
fn binary_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_cfg = tmp.path().join("bad.cfg");
    std::fs::write(&bad_cfg, "no_such_key = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qamp"))
        .args(["simulate", "--config"])
        .arg(&bad_cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    let abort_cfg = tmp.path().join("abort.cfg");
    std::fs::write(
        &abort_cfg,
        format!(
            "scenario_id = abort\nlambda_over_gamma = 100\nfield_dim = 16\n\
             field_init = fock:14\natom_init = level:1\nt_max = 0.5\n\
             sample_interval = 0.1\nguard_tol = 1e-6\nout_dir = {}\n",
            tmp.path().display()
        ),
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qamp"))
        .args(["simulate", "--config"])
        .arg(&abort_cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{out:?}");

    let out = Command::new(env!("CARGO_BIN_EXE_qamp"))
        .args(["reproduce", "nonexistent"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn semiclassical_subcommand_reports_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("sc.cfg");
    std::fs::write(
        &cfg_path,
        format!("scenario_id = sc\nout_dir = {}\n", tmp.path().display()),
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qamp"))
        .args(["semiclassical", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let report = read_json(&tmp.path().join("sc/semiclassical.json")).unwrap();
    let qh = report["qdot_h_sc"].as_f64().unwrap();
    let qc = report["qdot_c_sc"].as_f64().unwrap();
    let p = report["p_sc"].as_f64().unwrap();
    // Units of Γ ω_res: the standard triple.
    let unit = 1e-3 * 1000.0;
    assert!((qh / unit - 0.6927).abs() < 5e-4);
    assert!((qc / unit + 0.1155).abs() < 5e-4);
    assert!((p / unit - 0.5773).abs() < 5e-4);
    assert!(report["max_rel_discrepancy"].as_f64().unwrap() < 1e-8);
}
