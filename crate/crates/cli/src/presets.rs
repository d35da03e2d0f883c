//! Hard-coded reproduction presets.
//!
//! Full presets use the standard parameter set (λ/Γ = 10³, N = 100, t = 10/Γ);
//! the `--fast` variants are CI-scale (λ/Γ = 100, N = 56) and finish in well
//! under two minutes each. N = 56 keeps the truncation tail below 1e-8 over
//! the amplification window, which the doubling check requires.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::artifacts::{grid_csv_path, read_grid_csv, write_json};
use crate::config::{AtomInit, FieldInit, PhaseSpaceSelect, ScenarioConfig};
use crate::runner::{run_scenario, semiclassical_report, RunError, RunSummary};
use qamp_core::phasespace::{grid_distance, GridNorm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    SemiclassicalTable,
}

impl Preset {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "fig2" => Some(Preset::Fig2),
            "fig3" => Some(Preset::Fig3),
            "fig4" => Some(Preset::Fig4),
            "fig5" => Some(Preset::Fig5),
            "fig6" => Some(Preset::Fig6),
            "fig7" => Some(Preset::Fig7),
            "semiclassical_table" => Some(Preset::SemiclassicalTable),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::SemiclassicalTable => "semiclassical_table",
        }
    }

    pub const ALL: [&'static str; 7] = [
        "fig2",
        "fig3",
        "fig4",
        "fig5",
        "fig6",
        "fig7",
        "semiclassical_table",
    ];
}

/// Baseline configuration shared by every preset.
pub fn base_config(fast: bool) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    if fast {
        cfg.lambda_over_gamma = 100.0;
        cfg.field_dim = 56;
        cfg.steady_tol = 1e-3;
    }
    cfg
}

fn dir_name(preset: Preset, fast: bool) -> String {
    if fast {
        format!("{}_fast", preset.name())
    } else {
        preset.name().to_string()
    }
}

/// Scenario list of a preset (empty for the semiclassical table).
pub fn preset_scenarios(preset: Preset, fast: bool, out_root: &Path) -> Vec<ScenarioConfig> {
    let out_dir = out_root.join(dir_name(preset, fast));
    let branch = |id: &str, field: FieldInit| {
        let mut c = base_config(fast);
        c.scenario_id = id.into();
        c.atom_init = AtomInit::Level(1);
        c.field_init = field;
        c.out_dir = out_dir.clone();
        c
    };
    match preset {
        Preset::Fig2 => {
            // Amplification from an empty cavity: atom excited, vacuum field.
            let mut c = base_config(fast);
            c.scenario_id = "fig2".into();
            c.atom_init = AtomInit::Level(2);
            c.field_init = FieldInit::Vacuum;
            c.out_dir = out_dir;
            vec![c]
        }
        Preset::Fig3 => {
            vec![
                branch("fock4", FieldInit::Fock(4)),
                branch("poisson4", FieldInit::Poisson(4.0)),
            ]
        }
        Preset::Fig4 | Preset::Fig5 => {
            let mut scenarios = vec![
                branch("fock4", FieldInit::Fock(4)),
                branch("poisson4", FieldInit::Poisson(4.0)),
            ];
            for c in &mut scenarios {
                c.t_max = 8.0;
                c.snapshots = vec![0.0, 0.1, 8.0];
                c.phase_space = if preset == Preset::Fig4 {
                    PhaseSpaceSelect { q: true, w: false }
                } else {
                    PhaseSpaceSelect { q: false, w: true }
                };
                c.grid_half_width = 9.0;
                c.grid_points = 201;
            }
            scenarios
        }
        Preset::Fig6 => {
            let mut scenarios = vec![
                branch("fock4", FieldInit::Fock(4)),
                branch("poisson4", FieldInit::Poisson(4.0)),
            ];
            for c in &mut scenarios {
                c.interaction_order = 1;
                c.snapshots = vec![0.0, 0.1, 10.0];
                c.phase_space = PhaseSpaceSelect { q: false, w: true };
                c.grid_half_width = 9.0;
                c.grid_points = 201;
            }
            scenarios
        }
        Preset::Fig7 => {
            let mut scenarios = vec![
                branch("fock3", FieldInit::Fock(3)),
                branch("poisson3", FieldInit::Poisson(3.0)),
            ];
            for c in &mut scenarios {
                c.t_max = 8.0;
                c.snapshots = vec![0.0, 0.1, 8.0];
                c.phase_space = PhaseSpaceSelect { q: false, w: true };
                c.grid_half_width = 9.0;
                c.grid_points = 201;
            }
            scenarios
        }
        Preset::SemiclassicalTable => Vec::new(),
    }
}

/// Result of running a preset: branch summaries plus the comparison report.
pub struct PresetReport {
    pub dir: PathBuf,
    pub summaries: Vec<RunSummary>,
    pub report: Value,
}

/// Run every scenario of the preset (branches concurrently) and write the
/// cross-branch comparison file.
pub fn run_preset(preset: Preset, fast: bool, out_root: &Path) -> Result<PresetReport, RunError> {
    let dir = out_root.join(dir_name(preset, fast));

    if preset == Preset::SemiclassicalTable {
        let cfg = base_config(fast);
        let report = semiclassical_report(&cfg)?;
        crate::artifacts::ensure_dir(&dir)?;
        write_json(&dir.join("semiclassical.json"), &report)?;
        return Ok(PresetReport {
            dir,
            summaries: Vec::new(),
            report,
        });
    }

    let scenarios = preset_scenarios(preset, fast, out_root);
    let mut summaries: Vec<RunSummary> = Vec::new();
    if scenarios.len() == 1 {
        summaries.push(run_scenario(&scenarios[0])?);
    } else {
        // Branches are independent and write to disjoint directories.
        let results: Vec<Result<RunSummary, RunError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = scenarios
                .iter()
                .map(|cfg| scope.spawn(move || run_scenario(cfg)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("branch thread panicked"))
                .collect()
        });
        for r in results {
            summaries.push(r?);
        }
    }

    let report = if summaries.len() == 2 {
        let report = comparison_report(preset, &scenarios, &summaries)?;
        write_json(&dir.join("comparison.json"), &report)?;
        report
    } else {
        let last = summaries[0]
            .output
            .series
            .last()
            .expect("series is never empty");
        json!({
            "final_eta": last.thermo.eta,
            "final_qdot_h": last.thermo.qdot_h,
            "final_qdot_c": last.thermo.qdot_c,
            "final_p_f": last.thermo.p_f,
            "steady_state_time": summaries[0].steady_time,
        })
    };

    Ok(PresetReport {
        dir,
        summaries,
        report,
    })
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn comparison_report(
    preset: Preset,
    scenarios: &[ScenarioConfig],
    summaries: &[RunSummary],
) -> Result<Value, RunError> {
    let (a, b) = (&summaries[0], &summaries[1]);
    let last_a = a.output.series.last().unwrap();
    let last_b = b.output.series.last().unwrap();

    let mut grids = Vec::new();
    let cfg = &scenarios[0];
    let functions: Vec<&str> = match (cfg.phase_space.q, cfg.phase_space.w) {
        (true, true) => vec!["q", "w"],
        (true, false) => vec!["q"],
        (false, true) => vec!["w"],
        (false, false) => vec![],
    };
    for &t in &cfg.snapshots {
        for f in &functions {
            let ga = read_grid_csv(&grid_csv_path(&a.dir.join("snapshots"), f, t))?;
            let gb = read_grid_csv(&grid_csv_path(&b.dir.join("snapshots"), f, t))?;
            let d = grid_distance(&ga, &gb, GridNorm::MaxAbs)
                .map_err(|e| RunError::Engine(e.to_string()))?;
            grids.push(json!({
                "t": t,
                "function": f,
                "max_abs_distance": d,
                "peak": ga.max_value().max(gb.max_value()),
                "origin": [ga.origin_value(), gb.origin_value()],
                "min": [ga.min_value(), gb.min_value()],
            }));
        }
    }

    Ok(json!({
        "preset": preset.name(),
        "branches": [
            {
                "scenario_id": scenarios[0].scenario_id,
                "p_f": last_a.thermo.p_f,
                "eta": last_a.thermo.eta,
                "qdot_h": last_a.thermo.qdot_h,
                "qdot_c": last_a.thermo.qdot_c,
                "field_parity": last_a.field_parity,
                "steady_state_time": a.steady_time,
            },
            {
                "scenario_id": scenarios[1].scenario_id,
                "p_f": last_b.thermo.p_f,
                "eta": last_b.thermo.eta,
                "qdot_h": last_b.thermo.qdot_h,
                "qdot_c": last_b.thermo.qdot_c,
                "field_parity": last_b.field_parity,
                "steady_state_time": b.steady_time,
            },
        ],
        "rel_diff_p_f": rel_diff(last_a.thermo.p_f, last_b.thermo.p_f),
        "rel_diff_eta": rel_diff(last_a.thermo.eta, last_b.thermo.eta),
        "grids": grids,
    }))
}
