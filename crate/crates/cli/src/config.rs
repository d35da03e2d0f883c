//! Scenario configuration: a flat `key = value` document.
//!
//! Lines are `key = value`, blank, or `#` comments. Unknown keys are hard
//! errors so presets cannot silently rot. All keys have defaults taken from
//! the standard amplifier parameter set; a minimal config can set nothing but
//! `interaction_order`.
//!
//! Frequencies are dimensionless ratios; the absolute scale is fixed by
//! λ = 1 in internal time units. Times are in 1/Γ except `dt` (units 1/λ).

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use qamp_core::hilbert::{AtomStateSpec, FieldStateSpec, HilbertLayout};
use qamp_core::integrate::IntegratorConfig;
use qamp_core::liouville::{AmplifierModel, Frame, InteractionOrder};
use qamp_core::phasespace::GridSpec;
use qamp_core::semiclassical::SemiclassicalModel;

#[derive(Debug, Clone, thiserror::Error)]
#[error("config error: {0}")]
pub struct ConfigError(pub String);

type Result<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

/// Initial atomic state, config form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomInit {
    Level(usize),
}

impl fmt::Display for AtomInit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomInit::Level(l) => write!(f, "level:{l}"),
        }
    }
}

impl FromStr for AtomInit {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix("level:") {
            Some(rest) => {
                let l: usize = rest
                    .parse()
                    .map_err(|_| ConfigError(format!("atom_init: bad level '{rest}'")))?;
                if (1..=3).contains(&l) {
                    Ok(AtomInit::Level(l))
                } else {
                    err(format!("atom_init: level must be 1..=3, got {l}"))
                }
            }
            None => err(format!(
                "atom_init: expected 'level:<1|2|3>', got '{s}'"
            )),
        }
    }
}

/// Initial field state, config form.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldInit {
    Vacuum,
    Fock(usize),
    Coherent(f64, f64),
    Poisson(f64),
    Thermal(f64),
}

impl fmt::Display for FieldInit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldInit::Vacuum => write!(f, "vacuum"),
            FieldInit::Fock(n) => write!(f, "fock:{n}"),
            FieldInit::Coherent(re, im) => write!(f, "coherent:{re},{im}"),
            FieldInit::Poisson(m) => write!(f, "poisson:{m}"),
            FieldInit::Thermal(m) => write!(f, "thermal:{m}"),
        }
    }
}

impl FromStr for FieldInit {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self> {
        if s == "vacuum" {
            return Ok(FieldInit::Vacuum);
        }
        if let Some(rest) = s.strip_prefix("fock:") {
            let n = rest
                .parse()
                .map_err(|_| ConfigError(format!("field_init: bad fock number '{rest}'")))?;
            return Ok(FieldInit::Fock(n));
        }
        if let Some(rest) = s.strip_prefix("coherent:") {
            let parts: Vec<&str> = rest.split(',').collect();
            let parse = |p: &str| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| ConfigError(format!("field_init: bad amplitude '{p}'")))
            };
            return match parts.as_slice() {
                [re] => Ok(FieldInit::Coherent(parse(re)?, 0.0)),
                [re, im] => Ok(FieldInit::Coherent(parse(re)?, parse(im)?)),
                _ => err(format!("field_init: bad coherent spec '{rest}'")),
            };
        }
        if let Some(rest) = s.strip_prefix("poisson:") {
            let m = rest
                .parse()
                .map_err(|_| ConfigError(format!("field_init: bad poisson mean '{rest}'")))?;
            return Ok(FieldInit::Poisson(m));
        }
        if let Some(rest) = s.strip_prefix("thermal:") {
            let m = rest
                .parse()
                .map_err(|_| ConfigError(format!("field_init: bad thermal mean '{rest}'")))?;
            return Ok(FieldInit::Thermal(m));
        }
        err(format!(
            "field_init: expected vacuum | fock:<n> | coherent:<re>[,<im>] | poisson:<mean> | thermal:<mean>, got '{s}'"
        ))
    }
}

/// Which quasiprobability functions to evaluate at snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PhaseSpaceSelect {
    pub q: bool,
    pub w: bool,
}

impl fmt::Display for PhaseSpaceSelect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.q, self.w) {
            (true, true) => write!(f, "q,w"),
            (true, false) => write!(f, "q"),
            (false, true) => write!(f, "w"),
            (false, false) => write!(f, "none"),
        }
    }
}

impl FromStr for PhaseSpaceSelect {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self> {
        let mut sel = PhaseSpaceSelect::default();
        if s == "none" || s.is_empty() {
            return Ok(sel);
        }
        for part in s.split(',') {
            match part.trim() {
                "q" => sel.q = true,
                "w" => sel.w = true,
                other => return err(format!("phase_space: unknown function '{other}'")),
            }
        }
        Ok(sel)
    }
}

/// Fully resolved scenario configuration. Field order here is the canonical
/// key order of the serialized form.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario_id: String,
    pub interaction_order: usize,
    pub frame: String,
    pub omega_res_over_lambda: f64,
    pub lambda_over_gamma: f64,
    pub omega31_over_res: f64,
    pub omega32_over_res: f64,
    pub nbar_h: f64,
    pub nbar_c: f64,
    pub field_dim: usize,
    pub atom_init: AtomInit,
    pub field_init: FieldInit,
    pub dt: f64,
    pub t_max: f64,
    pub sample_interval: f64,
    pub guard_levels: usize,
    pub guard_tol: f64,
    pub trace_drift_tol: f64,
    pub steady_window: f64,
    pub steady_tol: f64,
    pub snapshots: Vec<f64>,
    pub phase_space: PhaseSpaceSelect,
    pub grid_half_width: f64,
    pub grid_points: usize,
    pub out_dir: PathBuf,
}

pub fn default_out_root() -> PathBuf {
    std::env::var_os("QAMP_OUT_ROOT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario_id: "scenario".into(),
            interaction_order: 2,
            frame: "interaction".into(),
            omega_res_over_lambda: 1000.0,
            lambda_over_gamma: 1000.0,
            omega31_over_res: 1.2,
            omega32_over_res: 0.2,
            nbar_h: 10.0,
            nbar_c: 0.1,
            field_dim: 100,
            atom_init: AtomInit::Level(2),
            field_init: FieldInit::Vacuum,
            dt: 0.02,
            t_max: 10.0,
            sample_interval: 0.05,
            guard_levels: 5,
            guard_tol: 1e-6,
            trace_drift_tol: 1e-8,
            steady_window: 1.0,
            steady_tol: 1e-4,
            snapshots: Vec::new(),
            phase_space: PhaseSpaceSelect::default(),
            grid_half_width: 6.0,
            grid_points: 201,
            out_dir: default_out_root(),
        }
    }
}

fn fmt_f64(v: f64) -> String {
    // Shortest representation that round-trips.
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("nan") {
        s.push_str(".0");
    }
    s
}

impl ScenarioConfig {
    /// Parse the key/value document, filling defaults and rejecting unknown
    /// keys.
    pub fn parse(text: &str) -> Result<Self> {
        let mut seen: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected 'key = value'", lineno + 1));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if seen.insert(key.clone(), value).is_some() {
                return err(format!("line {}: duplicate key '{key}'", lineno + 1));
            }
        }

        let mut cfg = ScenarioConfig::default();
        let parse_f64 = |k: &str, v: &str| -> Result<f64> {
            v.parse()
                .map_err(|_| ConfigError(format!("{k}: expected a number, got '{v}'")))
        };
        let parse_usize = |k: &str, v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| ConfigError(format!("{k}: expected an integer, got '{v}'")))
        };

        for (key, value) in &seen {
            match key.as_str() {
                "scenario_id" => cfg.scenario_id = value.clone(),
                "interaction_order" => cfg.interaction_order = parse_usize(key, value)?,
                "frame" => cfg.frame = value.clone(),
                "omega_res_over_lambda" => cfg.omega_res_over_lambda = parse_f64(key, value)?,
                "lambda_over_gamma" => cfg.lambda_over_gamma = parse_f64(key, value)?,
                "omega31_over_res" => cfg.omega31_over_res = parse_f64(key, value)?,
                "omega32_over_res" => cfg.omega32_over_res = parse_f64(key, value)?,
                "nbar_h" => cfg.nbar_h = parse_f64(key, value)?,
                "nbar_c" => cfg.nbar_c = parse_f64(key, value)?,
                "field_dim" => cfg.field_dim = parse_usize(key, value)?,
                "atom_init" => cfg.atom_init = value.parse()?,
                "field_init" => cfg.field_init = value.parse()?,
                "dt" => cfg.dt = parse_f64(key, value)?,
                "t_max" => cfg.t_max = parse_f64(key, value)?,
                "sample_interval" => cfg.sample_interval = parse_f64(key, value)?,
                "guard_levels" => cfg.guard_levels = parse_usize(key, value)?,
                "guard_tol" => cfg.guard_tol = parse_f64(key, value)?,
                "trace_drift_tol" => cfg.trace_drift_tol = parse_f64(key, value)?,
                "steady_window" => cfg.steady_window = parse_f64(key, value)?,
                "steady_tol" => cfg.steady_tol = parse_f64(key, value)?,
                "snapshots" => {
                    cfg.snapshots = if value.is_empty() || value == "none" {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|p| parse_f64(key, p.trim()))
                            .collect::<Result<Vec<f64>>>()?
                    }
                }
                "phase_space" => cfg.phase_space = value.parse()?,
                "grid_half_width" => cfg.grid_half_width = parse_f64(key, value)?,
                "grid_points" => cfg.grid_points = parse_usize(key, value)?,
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                other => return err(format!("unknown key '{other}'")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical key/value rendering; `parse(to_kv_string(c))` reproduces `c`.
    pub fn to_kv_string(&self) -> String {
        let snaps = self
            .snapshots
            .iter()
            .map(|t| fmt_f64(*t))
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "scenario_id = {}\n\
             interaction_order = {}\n\
             frame = {}\n\
             omega_res_over_lambda = {}\n\
             lambda_over_gamma = {}\n\
             omega31_over_res = {}\n\
             omega32_over_res = {}\n\
             nbar_h = {}\n\
             nbar_c = {}\n\
             field_dim = {}\n\
             atom_init = {}\n\
             field_init = {}\n\
             dt = {}\n\
             t_max = {}\n\
             sample_interval = {}\n\
             guard_levels = {}\n\
             guard_tol = {}\n\
             trace_drift_tol = {}\n\
             steady_window = {}\n\
             steady_tol = {}\n\
             snapshots = {}\n\
             phase_space = {}\n\
             grid_half_width = {}\n\
             grid_points = {}\n\
             out_dir = {}\n",
            self.scenario_id,
            self.interaction_order,
            self.frame,
            fmt_f64(self.omega_res_over_lambda),
            fmt_f64(self.lambda_over_gamma),
            fmt_f64(self.omega31_over_res),
            fmt_f64(self.omega32_over_res),
            fmt_f64(self.nbar_h),
            fmt_f64(self.nbar_c),
            self.field_dim,
            self.atom_init,
            self.field_init,
            fmt_f64(self.dt),
            fmt_f64(self.t_max),
            fmt_f64(self.sample_interval),
            self.guard_levels,
            fmt_f64(self.guard_tol),
            fmt_f64(self.trace_drift_tol),
            fmt_f64(self.steady_window),
            fmt_f64(self.steady_tol),
            snaps,
            self.phase_space,
            fmt_f64(self.grid_half_width),
            self.grid_points,
            self.out_dir.display(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.interaction_order == 1 || self.interaction_order == 2) {
            return err(format!(
                "interaction_order: must be 1 or 2, got {}",
                self.interaction_order
            ));
        }
        if self.frame != "interaction" && self.frame != "lab" {
            return err(format!(
                "frame: must be 'interaction' or 'lab', got '{}'",
                self.frame
            ));
        }
        if self.field_dim < 2 {
            return err(format!("field_dim: must be >= 2, got {}", self.field_dim));
        }
        if ((self.omega31_over_res - self.omega32_over_res) - 1.0).abs() > 1e-12 {
            return err(format!(
                "omega31_over_res - omega32_over_res must equal 1 (the ratios are \
                 relative to omega_res = omega2 - omega1); got {} - {}",
                self.omega31_over_res, self.omega32_over_res
            ));
        }
        if self.omega32_over_res <= 0.0 {
            return err("omega32_over_res: must be > 0");
        }
        if self.omega_res_over_lambda <= 0.0 || self.lambda_over_gamma <= 0.0 {
            return err("frequency ratios must be > 0");
        }
        if self.nbar_h < 0.0 || self.nbar_c < 0.0 {
            return err("bath occupations must be >= 0");
        }
        if let FieldInit::Fock(n) = self.field_init {
            if n >= self.field_dim {
                return err(format!(
                    "field_init: fock:{n} does not fit in field_dim {}",
                    self.field_dim
                ));
            }
        }
        if !(self.dt > 0.0) {
            return err("dt: must be > 0");
        }
        if self.t_max < 0.0 {
            return err("t_max: must be >= 0");
        }
        if self.t_max > 0.0 && !(self.sample_interval > 0.0) {
            return err("sample_interval: must be > 0");
        }
        if self.guard_levels < 1 {
            return err("guard_levels: must be >= 1");
        }
        for &t in &self.snapshots {
            if t < 0.0 || t > self.t_max + 1e-9 {
                return err(format!("snapshots: time {t} outside [0, t_max]"));
            }
            let k = (t / self.sample_interval).round();
            if (k * self.sample_interval - t).abs() > 1e-9 * t.abs().max(1.0) {
                return err(format!(
                    "snapshots: time {t} is not a multiple of sample_interval {}",
                    self.sample_interval
                ));
            }
        }
        if self.grid_points < 2 {
            return err("grid_points: must be >= 2");
        }
        if !(self.grid_half_width > 0.0) {
            return err("grid_half_width: must be > 0");
        }
        Ok(())
    }

    /// Resolve into the physical model: λ = 1 fixes the internal time unit,
    /// ω1 = 0 fixes the energy offset.
    pub fn model(&self) -> Result<AmplifierModel> {
        let layout = HilbertLayout::new(self.field_dim)
            .map_err(|e| ConfigError(format!("field_dim: {e}")))?;
        let order = InteractionOrder::from_photons(self.interaction_order)
            .map_err(|e| ConfigError(e.to_string()))?;
        let omega_res = self.omega_res_over_lambda;
        let model = AmplifierModel {
            omega1: 0.0,
            omega2: omega_res,
            omega3: self.omega31_over_res * omega_res,
            omega_f: omega_res / self.interaction_order as f64,
            lambda: 1.0,
            gamma_h: 1.0 / self.lambda_over_gamma,
            gamma_c: 1.0 / self.lambda_over_gamma,
            nbar_h: self.nbar_h,
            nbar_c: self.nbar_c,
            order,
            frame: if self.frame == "lab" {
                Frame::Lab
            } else {
                Frame::Interaction
            },
            layout,
        };
        model.validated().map_err(|e| ConfigError(e.to_string()))
    }

    pub fn semiclassical_model(&self) -> Result<SemiclassicalModel> {
        let omega_res = self.omega_res_over_lambda;
        SemiclassicalModel {
            omega1: 0.0,
            omega2: omega_res,
            omega3: self.omega31_over_res * omega_res,
            omega_f: omega_res / 2.0,
            lambda: 1.0,
            gamma_h: 1.0 / self.lambda_over_gamma,
            gamma_c: 1.0 / self.lambda_over_gamma,
            nbar_h: self.nbar_h,
            nbar_c: self.nbar_c,
        }
        .validated()
        .map_err(|e| ConfigError(e.to_string()))
    }

    pub fn atom_spec(&self) -> AtomStateSpec {
        match self.atom_init {
            AtomInit::Level(l) => AtomStateSpec::Level(l),
        }
    }

    pub fn field_spec(&self) -> FieldStateSpec {
        match &self.field_init {
            FieldInit::Vacuum => FieldStateSpec::Vacuum,
            FieldInit::Fock(n) => FieldStateSpec::Fock(*n),
            FieldInit::Coherent(re, im) => FieldStateSpec::Coherent(C64::new(*re, *im)),
            FieldInit::Poisson(m) => FieldStateSpec::PoissonMixed(*m),
            FieldInit::Thermal(m) => FieldStateSpec::Thermal(*m),
        }
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            dt: self.dt,
            t_max: self.t_max,
            sample_interval: self.sample_interval,
            guard_levels: self.guard_levels,
            guard_tol: self.guard_tol,
            trace_drift_tol: self.trace_drift_tol,
            snapshot_times: self.snapshots.clone(),
        }
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec::square(self.grid_half_width, self.grid_points)
    }

    /// Directory all artifacts of this scenario land in.
    pub fn scenario_dir(&self) -> PathBuf {
        self.out_dir.join(&self.scenario_id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_paper_defaults() {
        let cfg = ScenarioConfig::parse("interaction_order = 2\n").unwrap();
        assert_eq!(cfg.lambda_over_gamma, 1000.0);
        assert_eq!(cfg.nbar_h, 10.0);
        assert_eq!(cfg.field_dim, 100);
        assert_eq!(cfg.atom_init, AtomInit::Level(2));
        assert_eq!(cfg.field_init, FieldInit::Vacuum);
        let m = cfg.model().unwrap();
        assert_eq!(m.omega2, 1000.0);
        assert_eq!(m.omega3, 1200.0);
        assert_eq!(m.omega_f, 500.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = ScenarioConfig::parse("interaction_order = 2\nfock_n = 4\n").unwrap_err();
        assert!(e.0.contains("unknown key 'fock_n'"), "{e}");
    }

    #[test]
    fn oversized_fock_is_rejected() {
        let e =
            ScenarioConfig::parse("field_init = fock:4\nfield_dim = 3\n").unwrap_err();
        assert!(e.0.contains("does not fit"), "{e}");
    }

    #[test]
    fn round_trip_is_idempotent() {
        let text = "scenario_id = demo\ninteraction_order = 1\nfield_init = poisson:4\n\
                    snapshots = 0,0.1,8\nphase_space = q,w\nt_max = 8\nnbar_c = 0.25\n";
        let cfg = ScenarioConfig::parse(text).unwrap();
        let rendered = cfg.to_kv_string();
        let cfg2 = ScenarioConfig::parse(&rendered).unwrap();
        assert_eq!(cfg, cfg2);
        assert_eq!(rendered, cfg2.to_kv_string());
    }

    #[test]
    fn snapshot_grid_alignment_checked() {
        let e = ScenarioConfig::parse("snapshots = 0.03\n").unwrap_err();
        assert!(e.0.contains("multiple of sample_interval"), "{e}");
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let cfg = ScenarioConfig::parse(
            "# a comment\n\n  interaction_order = 1   # trailing\n\nnbar_h = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.interaction_order, 1);
        assert_eq!(cfg.nbar_h, 3.0);
    }

    #[test]
    fn gap_ratio_consistency_enforced() {
        let e = ScenarioConfig::parse("omega31_over_res = 1.3\n").unwrap_err();
        assert!(e.0.contains("must equal 1"), "{e}");
    }
}
