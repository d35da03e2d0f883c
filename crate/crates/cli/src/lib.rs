//! Configuration-driven runner for amplifier simulations: scenario configs,
//! artifact writers, and figure-reproduction presets.

pub mod artifacts;
pub mod config;
pub mod presets;
pub mod runner;

pub use config::{ConfigError, ScenarioConfig};
pub use presets::{run_preset, Preset};
pub use runner::{run_scenario, semiclassical_report, RunError, RunSummary};
