//! Run configuration: one JSON document, overridable field by field.

use std::path::{Path, PathBuf};

use catlab_core::dynamics::{GeneratorScale, HoppingSign, InitialState, TwistTurnParams};
use catlab_core::metrology::ReadoutSpec;
use catlab_core::spin::{SpinAxis, SpinSpace};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateLabel {
    Pi,
    #[default]
    Zero,
}

impl From<StateLabel> for InitialState {
    fn from(s: StateLabel) -> Self {
        match s {
            StateLabel::Pi => InitialState::Pi,
            StateLabel::Zero => InitialState::Zero,
        }
    }
}

impl std::str::FromStr for StateLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pi" => Ok(StateLabel::Pi),
            "zero" | "0" => Ok(StateLabel::Zero),
            _ => Err(format!("expected `pi` or `zero`, got `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignSetting {
    #[default]
    Negative,
    Positive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleSetting {
    #[default]
    Pauli,
    Spin,
}

/// Read-out rotation by `angle` about the axis `(theta, phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutConfig {
    pub theta: f64,
    pub phi: f64,
    pub angle: f64,
}

impl Default for ReadoutConfig {
    fn default() -> Self {
        Self {
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
            angle: std::f64::consts::FRAC_PI_2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TempSweepConfig {
    /// `β⁻¹/ε_τ` values; a 13-point log grid over `[0.1, 100]` when absent.
    pub beta_inv_grid: Option<Vec<f64>>,
    pub pi_time_factor: f64,
    pub zero_time_factor: f64,
    /// Pick the `Λ`-maximising factor per temperature from `search_factors`.
    pub search: bool,
    pub search_factors: Vec<f64>,
}

impl Default for TempSweepConfig {
    fn default() -> Self {
        Self {
            beta_inv_grid: None,
            pi_time_factor: 1.0,
            zero_time_factor: 1.4,
            search: false,
            search_factors: (16..=36).map(|k| k as f64 * 0.05).collect(),
        }
    }
}

impl TempSweepConfig {
    pub fn grid(&self) -> Vec<f64> {
        self.beta_inv_grid.clone().unwrap_or_else(default_beta_inv_grid)
    }
}

pub fn default_beta_inv_grid() -> Vec<f64> {
    (0..13).map(|k| 10f64.powf(-1.0 + 3.0 * k as f64 / 12.0)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassicalConfig {
    /// `Λ_cl`; taken from the quantum parameters when absent.
    pub coupling: Option<f64>,
    pub t_final: f64,
    pub dt: f64,
    /// Output every `sample_every`-th step.
    pub sample_every: usize,
    /// `[z, φ]` starting points.
    pub starts: Vec<[f64; 2]>,
    pub separatrix_samples: usize,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        let pi = std::f64::consts::PI;
        Self {
            coupling: None,
            t_final: 10.0,
            dt: 1e-3,
            sample_every: 10,
            starts: vec![
                [0.1, 0.0],
                [0.3, 0.0],
                [0.5, 0.0],
                [0.7, 0.0],
                [0.9, 0.0],
                [0.2, pi],
                [0.6, pi],
                [0.95, pi],
                [-0.6, pi],
                [-0.9, 0.0],
            ],
            separatrix_samples: 181,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CatQubitConfig {
    pub alpha: f64,
    pub peak_width: f64,
    pub eta_points: usize,
}

impl Default for CatQubitConfig {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            peak_width: 10.0,
            eta_points: 91,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n_particles: usize,
    pub u_int: f64,
    pub t_hop: f64,
    pub state: StateLabel,
    /// `β⁻¹/ε_τ`; zero selects the pure-state stand-in.
    pub beta_inv: f64,
    pub time_factor: f64,
    pub sign: SignSetting,
    pub scale: ScaleSetting,
    pub readout: ReadoutConfig,
    pub grid_theta: usize,
    pub grid_phi: usize,
    /// Defaults to `2N + 2` so the `φ`-average is exact.
    pub wigner_phi: Option<usize>,
    pub time_factors: Vec<f64>,
    pub temp_sweep: TempSweepConfig,
    pub classical: ClassicalConfig,
    pub catqubit: CatQubitConfig,
    pub out: PathBuf,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_particles: 200,
            u_int: 0.1,
            t_hop: 1.0,
            state: StateLabel::Zero,
            beta_inv: 0.0,
            time_factor: 1.4,
            sign: SignSetting::Negative,
            scale: ScaleSetting::Pauli,
            readout: ReadoutConfig::default(),
            grid_theta: 64,
            grid_phi: 128,
            wigner_phi: None,
            time_factors: (0..=25).map(|k| k as f64 / 10.0).collect(),
            temp_sweep: TempSweepConfig::default(),
            classical: ClassicalConfig::default(),
            catqubit: CatQubitConfig::default(),
            out: PathBuf::from("catlab-out"),
            workers: None,
        }
    }
}

fn finite_at_least(field: &str, v: f64, min: f64, strict: bool) -> Result<(), ConfigError> {
    let ok = v.is_finite() && if strict { v > min } else { v >= min };
    if ok {
        Ok(())
    } else {
        let op = if strict { ">" } else { ">=" };
        Err(ConfigError::new(field, format!("must be finite and {op} {min}, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::new("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn wigner_phi_points(&self) -> usize {
        self.wigner_phi.unwrap_or(2 * self.n_particles + 2)
    }

    pub fn space(&self) -> Result<SpinSpace, ConfigError> {
        SpinSpace::new(self.n_particles).map_err(|_| {
            ConfigError::new(
                "n_particles",
                format!("must be even and >= 2, got {}", self.n_particles),
            )
        })
    }

    pub fn params(&self) -> Result<TwistTurnParams<f64>, ConfigError> {
        let p = TwistTurnParams::new(self.space()?, self.t_hop, self.u_int)
            .map_err(|e| ConfigError::new("params", e.to_string()))?;
        Ok(p.with_sign(match self.sign {
            SignSetting::Negative => HoppingSign::Negative,
            SignSetting::Positive => HoppingSign::Positive,
        })
        .with_scale(match self.scale {
            ScaleSetting::Pauli => GeneratorScale::Pauli,
            ScaleSetting::Spin => GeneratorScale::Spin,
        }))
    }

    pub fn readout_spec(&self) -> ReadoutSpec<f64> {
        ReadoutSpec {
            axis: SpinAxis::new(self.readout.theta, self.readout.phi),
            angle: self.readout.angle,
        }
    }

    /// Checks every field, naming the first offender.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.space()?;
        finite_at_least("u_int", self.u_int, 0.0, true)?;
        finite_at_least("t_hop", self.t_hop, 0.0, true)?;
        finite_at_least("beta_inv", self.beta_inv, 0.0, false)?;
        finite_at_least("time_factor", self.time_factor, 0.0, false)?;
        for (name, v) in [
            ("readout.theta", self.readout.theta),
            ("readout.phi", self.readout.phi),
            ("readout.angle", self.readout.angle),
        ] {
            if !v.is_finite() {
                return Err(ConfigError::new(name, format!("must be finite, got {v}")));
            }
        }
        if self.grid_theta == 0 {
            return Err(ConfigError::new("grid_theta", "must be >= 1"));
        }
        if self.grid_phi == 0 {
            return Err(ConfigError::new("grid_phi", "must be >= 1"));
        }
        if self.wigner_phi_points() < 4 {
            return Err(ConfigError::new("wigner_phi", "must be >= 4"));
        }
        if self.time_factors.is_empty() {
            return Err(ConfigError::new("time_factors", "must not be empty"));
        }
        for &f in &self.time_factors {
            finite_at_least("time_factors", f, 0.0, false)?;
        }
        let grid = self.temp_sweep.grid();
        if grid.is_empty() {
            return Err(ConfigError::new("temp_sweep.beta_inv_grid", "must not be empty"));
        }
        for &b in &grid {
            finite_at_least("temp_sweep.beta_inv_grid", b, 0.0, false)?;
        }
        finite_at_least("temp_sweep.pi_time_factor", self.temp_sweep.pi_time_factor, 0.0, false)?;
        finite_at_least("temp_sweep.zero_time_factor", self.temp_sweep.zero_time_factor, 0.0, false)?;
        if self.temp_sweep.search && self.temp_sweep.search_factors.is_empty() {
            return Err(ConfigError::new("temp_sweep.search_factors", "must not be empty"));
        }
        for &f in &self.temp_sweep.search_factors {
            finite_at_least("temp_sweep.search_factors", f, 0.0, false)?;
        }
        let c = &self.classical;
        if let Some(l) = c.coupling {
            finite_at_least("classical.coupling", l, 0.0, false)?;
        }
        finite_at_least("classical.t_final", c.t_final, 0.0, false)?;
        finite_at_least("classical.dt", c.dt, 0.0, true)?;
        if c.sample_every == 0 {
            return Err(ConfigError::new("classical.sample_every", "must be >= 1"));
        }
        for s in &c.starts {
            if s[0].is_nan() || s[0].abs() >= 1.0 || !s[1].is_finite() {
                return Err(ConfigError::new(
                    "classical.starts",
                    format!("need |z| < 1 and finite phi, got {s:?}"),
                ));
            }
        }
        let q = &self.catqubit;
        finite_at_least("catqubit.alpha", q.alpha, 0.0, true)?;
        finite_at_least("catqubit.peak_width", q.peak_width, 0.0, true)?;
        if q.eta_points < 2 {
            return Err(ConfigError::new("catqubit.eta_points", "must be >= 2"));
        }
        if self.workers == Some(0) {
            return Err(ConfigError::new("workers", "must be >= 1"));
        }
        let params = self.params()?;
        if self.state == StateLabel::Zero {
            params.critical_imbalance().map_err(|e| {
                ConfigError::new(
                    "state",
                    format!("the zero state needs a separatrix at zero phase: {e}"),
                )
            })?;
        }
        Ok(())
    }
}
