//! Run configuration: TOML (or JSON) with every default embedded.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use wavefront::model::{make_birth_function, BirthFunction, BirthSpec};
use wavefront::profile::ProfileOptions;
use wavefront::scenarios::VerifyOptions;
use wavefront::simulator::{default_dt, lag_steps, DatumParams};
use wavefront::spectral::{decay_rates, minimal_linear_speed};

/// Failure of a config to load or validate; always exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<wavefront::Error> for ConfigError {
    fn from(e: wavefront::Error) -> Self {
        match e {
            wavefront::Error::InvalidParameter(msg) => ConfigError(msg),
            other => ConfigError(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: BirthSpec,
    pub h: f64,
    pub out_dir: PathBuf,
    pub spectrum: SpectrumConfig,
    pub profile: ProfileConfig,
    pub sweep: SweepConfig,
    pub simulation: SimulationConfig,
    pub diagnostics: DiagnosticsConfig,
    pub verify: VerifyOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Speeds at which `λ1`, `λ2` and `λ3` are reported.
    pub speeds: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    /// Fixed speed; the minimal front is computed when absent.
    pub speed: Option<f64>,
    pub half_width: Option<f64>,
    pub dz: f64,
    pub tol: f64,
    pub tol_c: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub h_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    /// Domain `[−L_x, L_x]`.
    pub half_width: f64,
    pub dx: f64,
    pub dt: Option<f64>,
    pub t_final: f64,
    pub datum: DatumParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Weight rate; defaults to `λ1 + θ(λ2 − λ1)` at the front speed.
    pub lambda: Option<f64>,
    pub theta: f64,
    pub snapshot_every: f64,
    pub points: Vec<f64>,
    pub point_every: f64,
    /// Levels as fractions of `κ`.
    pub levels: Vec<f64>,
    pub level_every: f64,
    pub discard: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: BirthSpec::Preset("hadeler_rothe".into()),
            h: 0.0,
            out_dir: PathBuf::from("out"),
            spectrum: SpectrumConfig::default(),
            profile: ProfileConfig::default(),
            sweep: SweepConfig::default(),
            simulation: SimulationConfig::default(),
            diagnostics: DiagnosticsConfig::default(),
            verify: VerifyOptions::default(),
        }
    }
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            speeds: vec![1.25, 1.5, 2.0, 2.5],
        }
    }
}

impl Default for ProfileConfig {
    fn default() -> Self {
        let o = ProfileOptions::default();
        Self {
            speed: None,
            half_width: o.half_width,
            dz: o.dz,
            tol: o.tol,
            tol_c: o.tol_c,
            max_iter: o.max_iter,
        }
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            h_values: vec![0.0, 0.05, 0.1, 0.2],
        }
    }
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            half_width: 120.0,
            dx: 0.1,
            dt: None,
            t_final: 40.0,
            datum: DatumParams::Heaviside { mu: 1.0, sigma: 0.5 },
        }
    }
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            lambda: None,
            theta: 0.25,
            snapshot_every: 1.0,
            points: vec![0.0],
            point_every: 0.1,
            levels: vec![0.5],
            level_every: 0.5,
            discard: 0.3,
        }
    }
}

impl ProfileConfig {
    pub fn options(&self) -> ProfileOptions {
        ProfileOptions {
            half_width: self.half_width,
            dz: self.dz,
            tol: self.tol,
            tol_c: self.tol_c,
            max_iter: self.max_iter,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError(format!("{name} must be positive")))
    }
}

impl RunConfig {
    /// Reads a TOML file, or JSON when the extension is `.json` or the text is a JSON object.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path.extension().and_then(|e| e.to_str()) == Some("json"))
    }

    pub fn parse(text: &str, json: bool) -> Result<Self, ConfigError> {
        if text.trim().is_empty() {
            return Err(ConfigError("config file is empty".into()));
        }
        if json || text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid JSON config: {e}")))
        } else {
            toml::from_str(text).map_err(|e| ConfigError(format!("invalid TOML config: {e}")))
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    pub fn birth_function(&self) -> Result<BirthFunction, ConfigError> {
        Ok(make_birth_function(&self.model)?)
    }

    /// Checks shared by every subcommand.
    pub fn validate(&self) -> Result<BirthFunction, ConfigError> {
        if !(self.h >= 0.0) || !self.h.is_finite() {
            return Err(ConfigError("h must be nonnegative".into()));
        }
        let g = self.birth_function()?;
        let p = &self.profile;
        positive("profile.dz", p.dz)?;
        positive("profile.tol", p.tol)?;
        positive("profile.tol_c", p.tol_c)?;
        if let Some(w) = p.half_width {
            positive("profile.half_width", w)?;
        }
        if p.max_iter == 0 {
            return Err(ConfigError("profile.max_iter must be positive".into()));
        }
        for h in &self.sweep.h_values {
            if !(*h >= 0.0) || !h.is_finite() {
                return Err(ConfigError("h must be nonnegative".into()));
            }
        }
        let d = &self.diagnostics;
        if !(d.theta > 0.0 && d.theta < 1.0) {
            return Err(ConfigError("diagnostics.theta must lie in (0, 1)".into()));
        }
        if !(0.0..1.0).contains(&d.discard) {
            return Err(ConfigError("diagnostics.discard must lie in [0, 1)".into()));
        }
        Ok(g)
    }

    /// Step used by `simulate`: the configured one or the default for `(h, L_g)`.
    pub fn dt(&self, g: &BirthFunction) -> f64 {
        self.simulation.dt.unwrap_or_else(|| default_dt(self.h, g.lipschitz))
    }

    /// Cross-field checks for `simulate`.
    pub fn validate_simulation(&self, g: &BirthFunction) -> Result<(), ConfigError> {
        let s = &self.simulation;
        positive("simulation.dx", s.dx)?;
        positive("simulation.t_final", s.t_final)?;
        positive("simulation.half_width", s.half_width)?;
        let dt = self.dt(g);
        positive("simulation.dt", dt)?;
        lag_steps(self.h, dt)?;
        let d = &self.diagnostics;
        for (name, v) in [
            ("diagnostics.snapshot_every", d.snapshot_every),
            ("diagnostics.point_every", d.point_every),
            ("diagnostics.level_every", d.level_every),
        ] {
            positive(name, v)?;
        }
        for l in &d.levels {
            if !(*l > 0.0 && *l < 1.0) {
                return Err(ConfigError("diagnostics.levels must lie in (0, 1)".into()));
            }
        }
        let c_sharp = minimal_linear_speed(g.gp0, self.h)?.c_sharp;
        let need = c_sharp * s.t_final + 30.0;
        if s.half_width < need {
            return Err(ConfigError(format!(
                "simulation.half_width = {} is below c_# T + 30 = {need:.3}",
                s.half_width
            )));
        }
        Ok(())
    }

    /// Weight rate at speed `c`, checked to lie strictly inside `(λ1, λ2)`.
    pub fn lambda(&self, g: &BirthFunction, c: f64) -> Result<f64, ConfigError> {
        let r = decay_rates(c, g.gp0, self.h)?;
        match self.diagnostics.lambda {
            Some(l) if l > r.lambda1 && l < r.lambda2 => Ok(l),
            Some(l) => Err(ConfigError(format!(
                "diagnostics.lambda = {l} must lie in ({}, {})",
                r.lambda1, r.lambda2
            ))),
            None => Ok(r.lambda1 + self.diagnostics.theta * (r.lambda2 - r.lambda1)),
        }
    }
}
