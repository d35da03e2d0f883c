//! Artifact files written by scenario runs.
//!
//! Every run directory is self-describing: `meta.json` embeds the canonical
//! config text, so a run can be reproduced bit-identically from it. No
//! timestamps or machine identifiers are written anywhere; identical configs
//! produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use qamp_core::integrate::TimeSeries;
use qamp_core::phasespace::{GridSpec, PhaseSpaceGrid};
use qamp_core::thermo::ThermoSample;
use serde_json::{json, Value};

use crate::runner::RunError;

pub fn write_thermo_csv(path: &Path, series: &TimeSeries) -> Result<(), RunError> {
    let mut out = String::with_capacity(series.records.len() * 200);
    out.push_str(ThermoSample::CSV_HEADER);
    out.push('\n');
    for r in &series.records {
        out.push_str(&r.thermo.csv_row());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

/// Deterministic file label for a snapshot time: `8` -> "8", `0.1` -> "0p1".
pub fn time_label(t: f64) -> String {
    let s = format!("{t}");
    s.replace('.', "p").replace('-', "m")
}

pub fn write_grid_csv(path: &Path, grid: &PhaseSpaceGrid) -> Result<(), RunError> {
    fs::write(path, grid.to_csv()).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

/// Read a grid CSV produced by [`write_grid_csv`].
pub fn read_grid_csv(path: &Path) -> Result<PhaseSpaceGrid, RunError> {
    let text =
        fs::read_to_string(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    let bad = |msg: &str| RunError::Io(format!("{}: {msg}", path.display()));
    let mut lines = text.lines();
    let parse_header = |line: Option<&str>| -> Result<(f64, f64, usize), RunError> {
        let line = line.ok_or_else(|| bad("missing header"))?;
        let body = line
            .strip_prefix("# ")
            .ok_or_else(|| bad("header must start with '# '"))?;
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 3 {
            return Err(bad("header needs three fields"));
        }
        Ok((
            parts[0].parse().map_err(|_| bad("bad header number"))?,
            parts[1].parse().map_err(|_| bad("bad header number"))?,
            parts[2].parse().map_err(|_| bad("bad header count"))?,
        ))
    };
    let (re_min, re_max, n_re) = parse_header(lines.next())?;
    let (im_min, im_max, n_im) = parse_header(lines.next())?;
    let spec = GridSpec {
        re_min,
        re_max,
        im_min,
        im_max,
        n_re,
        n_im,
    };
    let mut values = ndarray::Array2::zeros((n_im, n_re));
    for i in 0..n_im {
        let line = lines.next().ok_or_else(|| bad("missing value row"))?;
        for (j, field) in line.split(',').enumerate() {
            if j >= n_re {
                return Err(bad("row too long"));
            }
            values[[i, j]] = field.parse().map_err(|_| bad("bad value"))?;
        }
    }
    Ok(PhaseSpaceGrid {
        spec,
        values,
        cell_area: spec.cell_area(),
    })
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

pub fn read_json(path: &Path) -> Result<Value, RunError> {
    let text =
        fs::read_to_string(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

/// Sidecar metadata for one phase-space grid file.
pub fn grid_sidecar(
    scenario_id: &str,
    function: &str,
    t: f64,
    grid: &PhaseSpaceGrid,
    field_parity: f64,
) -> Value {
    let neg = qamp_core::phasespace::negativity_metrics(grid);
    json!({
        "scenario_id": scenario_id,
        "function": function,
        "t": t,
        "min_value": neg.min_value,
        "min_location": [neg.min_location.0, neg.min_location.1],
        "negative_volume": neg.negative_volume,
        "max_value": grid.max_value(),
        "origin_value": grid.origin_value(),
        "integral": grid.integral(),
        "field_parity": field_parity,
    })
}

pub fn ensure_dir(path: &Path) -> Result<(), RunError> {
    fs::create_dir_all(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

pub fn grid_csv_path(dir: &Path, function: &str, t: f64) -> PathBuf {
    dir.join(format!("{function}_t{}.csv", time_label(t)))
}

pub fn grid_sidecar_path(dir: &Path, function: &str, t: f64) -> PathBuf {
    dir.join(format!("{function}_t{}.json", time_label(t)))
}
