//! Scenario execution: build the model, evolve, and write artifacts.

use std::path::PathBuf;

use qamp_core::hilbert::{build_joint_state, partial_trace, Subsystem};
use qamp_core::integrate::{evolve, EvolveOutput};
use qamp_core::phasespace::{parity_expectation, q_function, wigner_function};
use qamp_core::thermo::detect_steady_state;
use qamp_core::Error as CoreError;
use serde_json::{json, Value};

use crate::artifacts::{
    ensure_dir, grid_csv_path, grid_sidecar, grid_sidecar_path, write_grid_csv, write_json,
    write_thermo_csv,
};
use crate::config::{ConfigError, ScenarioConfig};

/// Failure modes of a run, mapped onto process exit codes by the binary:
/// configuration problems exit 2, integrator aborts exit 3, I/O failures 1.
#[derive(Debug, Clone, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("integrator abort at t = {t}: {reason}")]
    Abort { t: f64, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("engine error: {0}")]
    Engine(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Abort { .. } => 3,
            RunError::Io(_) | RunError::Engine(_) => 1,
        }
    }
}

fn engine_err(e: CoreError) -> RunError {
    match e {
        CoreError::IntegratorAbort { t, reason } => RunError::Abort { t, reason },
        // Problems that trace back to scenario parameters rather than the run.
        CoreError::TruncationTail { .. }
        | CoreError::InvalidDimension(_)
        | CoreError::InvalidParameter(_)
        | CoreError::UnsupportedConfiguration(_)
        | CoreError::GridCoverage { .. } => RunError::Config(ConfigError(e.to_string())),
        other => RunError::Engine(other.to_string()),
    }
}

/// Everything a finished run leaves in memory.
#[derive(Debug)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub output: EvolveOutput,
    pub steady_time: Option<f64>,
}

fn config_json(cfg: &ScenarioConfig) -> Value {
    json!({
        "scenario_id": cfg.scenario_id,
        "interaction_order": cfg.interaction_order,
        "frame": cfg.frame,
        "omega_res_over_lambda": cfg.omega_res_over_lambda,
        "lambda_over_gamma": cfg.lambda_over_gamma,
        "omega31_over_res": cfg.omega31_over_res,
        "omega32_over_res": cfg.omega32_over_res,
        "nbar_h": cfg.nbar_h,
        "nbar_c": cfg.nbar_c,
        "field_dim": cfg.field_dim,
        "atom_init": cfg.atom_init.to_string(),
        "field_init": cfg.field_init.to_string(),
        "dt": cfg.dt,
        "t_max": cfg.t_max,
        "sample_interval": cfg.sample_interval,
        "guard_levels": cfg.guard_levels,
        "guard_tol": cfg.guard_tol,
        "trace_drift_tol": cfg.trace_drift_tol,
        "steady_window": cfg.steady_window,
        "steady_tol": cfg.steady_tol,
        "snapshots": cfg.snapshots,
        "phase_space": cfg.phase_space.to_string(),
        "grid_half_width": cfg.grid_half_width,
        "grid_points": cfg.grid_points,
    })
}

/// Run one scenario and write `thermo.csv`, `snapshots/`, and `meta.json`
/// under `cfg.scenario_dir()`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunSummary, RunError> {
    cfg.validate()?;
    let dir = cfg.scenario_dir();
    ensure_dir(&dir)?;

    let model = cfg.model()?;
    let initial = build_joint_state(&cfg.atom_spec(), &cfg.field_spec(), model.layout)
        .map_err(engine_err)?;

    let result = evolve(&initial.rho, &model, &cfg.integrator());
    let output = match result {
        Ok(out) => out,
        Err(CoreError::IntegratorAbort { t, reason }) => {
            // The abort diagnostic still lands in meta.json.
            let meta = json!({
                "config_kv": cfg.to_kv_string(),
                "config": config_json(cfg),
                "health": {
                    "abort": { "t": t, "reason": reason },
                },
            });
            write_json(&dir.join("meta.json"), &meta)?;
            return Err(RunError::Abort { t, reason });
        }
        Err(e) => return Err(engine_err(e)),
    };

    let steady_time = detect_steady_state(&output.series, cfg.steady_window, cfg.steady_tol);
    write_thermo_csv(&dir.join("thermo.csv"), &output.series)?;

    // Phase-space grids for each snapshot.
    let mut snapshot_meta = Vec::new();
    if !output.snapshots.is_empty() && (cfg.phase_space.q || cfg.phase_space.w) {
        let snap_dir = dir.join("snapshots");
        ensure_dir(&snap_dir)?;
        let spec = cfg.grid_spec();
        for snap in &output.snapshots {
            let rho_f = partial_trace(&snap.state, Subsystem::Field).map_err(engine_err)?;
            let parity = parity_expectation(&rho_f).map_err(engine_err)?;
            let mut files = Vec::new();
            if cfg.phase_space.q {
                let grid = q_function(&rho_f, spec).map_err(engine_err)?;
                let path = grid_csv_path(&snap_dir, "q", snap.t);
                write_grid_csv(&path, &grid)?;
                write_json(
                    &grid_sidecar_path(&snap_dir, "q", snap.t),
                    &grid_sidecar(&cfg.scenario_id, "q", snap.t, &grid, parity),
                )?;
                files.push(path.file_name().unwrap().to_string_lossy().to_string());
            }
            if cfg.phase_space.w {
                let grid = wigner_function(&rho_f, spec).map_err(engine_err)?;
                let path = grid_csv_path(&snap_dir, "w", snap.t);
                write_grid_csv(&path, &grid)?;
                write_json(
                    &grid_sidecar_path(&snap_dir, "w", snap.t),
                    &grid_sidecar(&cfg.scenario_id, "w", snap.t, &grid, parity),
                )?;
                files.push(path.file_name().unwrap().to_string_lossy().to_string());
            }
            snapshot_meta.push(json!({
                "t": snap.t,
                "field_parity": parity,
                "files": files,
            }));
        }
    }

    let last = output.series.last().expect("series has at least one sample");
    let meta = json!({
        "config_kv": cfg.to_kv_string(),
        "config": config_json(cfg),
        "derived": {
            "lambda": model.lambda,
            "gamma_h": model.gamma_h,
            "gamma_c": model.gamma_c,
            "omega": [model.omega1, model.omega2, model.omega3],
            "omega_f": model.omega_f,
            "dt_internal": output.health.dt_internal,
            "dt_requested_internal": output.health.dt_requested_internal,
            "dt_clamped": output.health.dt_clamped,
            "steps_total": output.health.steps_total,
            "units": {
                "time": "1/gamma",
                "energy": "hbar*omega_res",
                "current": "hbar*omega_res*gamma",
                "entropy": "nats",
            },
        },
        "health": {
            "abort": Value::Null,
            "max_trace_drift": output.health.max_trace_drift,
            "min_eigenvalue": output.health.min_eigenvalue,
            "max_tail_mass": output.health.max_tail_mass,
            "steady_state_time": steady_time,
        },
        "final_sample": {
            "t": last.t,
            "qdot_h": last.thermo.qdot_h,
            "qdot_c": last.thermo.qdot_c,
            "p_f": last.thermo.p_f,
            "eta": last.thermo.eta,
            "e_field": last.thermo.e_field,
            "s_field": last.thermo.s_field,
            "field_parity": last.field_parity,
        },
        "snapshots": snapshot_meta,
    });
    write_json(&dir.join("meta.json"), &meta)?;

    Ok(RunSummary {
        dir,
        output,
        steady_time,
    })
}

/// Semiclassical steady-state table: closed forms, the numeric null-space
/// solve, and their worst relative discrepancy.
pub fn semiclassical_report(cfg: &ScenarioConfig) -> Result<Value, RunError> {
    let model = cfg.semiclassical_model()?;
    let analytic =
        qamp_core::semiclassical::sc_analytic_currents(&model).map_err(engine_err)?;
    let numeric =
        qamp_core::semiclassical::sc_numeric_steady_state(&model).map_err(engine_err)?;
    let discrepancy = qamp_core::semiclassical::sc_discrepancy(&analytic, &numeric.currents);
    let rho_diag: Vec<f64> = (0..3).map(|i| numeric.rho_ss[[i, i]].re).collect();
    Ok(json!({
        "params": {
            "omega1": model.omega1,
            "omega2": model.omega2,
            "omega3": model.omega3,
            "omega_f": model.omega_f,
            "lambda": model.lambda,
            "gamma_h": model.gamma_h,
            "gamma_c": model.gamma_c,
            "nbar_h": model.nbar_h,
            "nbar_c": model.nbar_c,
        },
        "qdot_h_sc": analytic.qdot_h_sc,
        "qdot_c_sc": analytic.qdot_c_sc,
        "p_sc": analytic.p_sc,
        "eta_sc": analytic.eta_sc,
        "aggregates": {
            "alpha_sc": analytic.alpha_sc,
            "beta_sc": analytic.beta_sc,
            "gamma_sc": analytic.gamma_sc,
        },
        "numeric": {
            "qdot_h": numeric.currents.qdot_h_sc,
            "qdot_c": numeric.currents.qdot_c_sc,
            "p": numeric.currents.p_sc,
            "eta": numeric.currents.eta_sc,
            "rho_ss_diagonal": rho_diag,
            "power_crosscheck_residual": numeric.power_crosscheck_residual,
        },
        "max_rel_discrepancy": discrepancy,
    }))
}
