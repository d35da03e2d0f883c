use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qamp_cli::config::{default_out_root, ScenarioConfig};
use qamp_cli::presets::{run_preset, Preset};
use qamp_cli::runner::{run_scenario, semiclassical_report, RunError};

/// Simulator for resonant three-level quantum optical amplifiers: Lindblad
/// evolution, thermodynamic bookkeeping, and phase-space analysis.
#[derive(Parser)]
#[command(name = "qamp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a key/value config file.
    Simulate {
        /// Path to the scenario config.
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a named reproduction preset.
    Reproduce {
        /// One of: fig2, fig3, fig4, fig5, fig6, fig7, semiclassical_table.
        preset: String,
        /// Output root (default: $QAMP_OUT_ROOT or ./runs).
        #[arg(long)]
        out: Option<PathBuf>,
        /// CI-scale variant (lambda/gamma = 100, N = 56).
        #[arg(long)]
        fast: bool,
    },
    /// Semiclassical steady-state currents (closed form vs numeric solve).
    Semiclassical {
        /// Path to the scenario config (model parameters are used).
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_config(path: &PathBuf) -> Result<ScenarioConfig, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    Ok(ScenarioConfig::parse(&text)?)
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Simulate { config } => {
            let cfg = load_config(&config)?;
            let summary = run_scenario(&cfg)?;
            let last = summary.output.series.last().unwrap();
            println!("wrote {}", summary.dir.display());
            println!(
                "t = {} / Gamma: qdot_h = {:+.6}, qdot_c = {:+.6}, p_f = {:+.6}, eta = {:.6}",
                last.t, last.thermo.qdot_h, last.thermo.qdot_c, last.thermo.p_f, last.thermo.eta
            );
            match summary.steady_time {
                Some(t) => println!("steady state detected at t = {t} / Gamma"),
                None => println!("steady state not detected"),
            }
            Ok(())
        }
        Command::Reproduce { preset, out, fast } => {
            let preset = Preset::from_name(&preset).ok_or_else(|| {
                RunError::Config(qamp_cli::ConfigError(format!(
                    "unknown preset '{preset}' (expected one of {})",
                    Preset::ALL.join(", ")
                )))
            })?;
            let out_root = out.unwrap_or_else(default_out_root);
            let report = run_preset(preset, fast, &out_root)?;
            println!("wrote {}", report.dir.display());
            println!(
                "{}",
                serde_json::to_string_pretty(&report.report).expect("report serializes")
            );
            Ok(())
        }
        Command::Semiclassical { config } => {
            let cfg = load_config(&config)?;
            let report = semiclassical_report(&cfg)?;
            let dir = cfg.scenario_dir();
            qamp_cli::artifacts::ensure_dir(&dir)?;
            qamp_cli::artifacts::write_json(&dir.join("semiclassical.json"), &report)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
