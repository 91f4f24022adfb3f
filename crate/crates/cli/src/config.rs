//! JSON run configuration: flat key/value schema, strict validation, unit
//! conversion (cyclic Hz in, angular rad/s inside) and round-trippable
//! normalized form.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use cavshift::intermode::SpiralDrive;
use cavshift::params::{CavityMode, SpinCavityParams};
use cavshift::spin_shift::thermal_polarization;

use crate::CliError;

/// Unit system of a config: `si` takes frequencies in Hz (cyclic) and
/// converts by 2 pi on load; `normalized` takes everything in units of the
/// cavity frequency omega_a = 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Si,
    Normalized,
}

/// One sweep axis: `count` linearly spaced points over [start, stop].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn value(&self, index: usize) -> f64 {
        self.start + (self.stop - self.start) * index as f64 / (self.count - 1) as f64
    }
}

/// The full flat config schema. Unknown keys are rejected at parse time;
/// which keys are required depends on the mode and the subcommand.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub mode: Mode,

    // Cavity and spin keys: Hz in si mode, units of omega_a in normalized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_b: Option<f64>,
    #[serde(rename = "f_L", skip_serializing_if = "Option::is_none")]
    pub f_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_a: Option<f64>,
    /// Intermode drive scale K^2 |F_bf|^2 in rad^3/s^3 (never 2pi-scaled).
    #[serde(rename = "S", skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,

    // Normalized-mode drive keys (units of omega_a).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_pl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_1: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<AxisSpec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,

    // Time-domain run keys: seconds/Hz in si mode, 1/omega_a and omega_a
    // units in normalized mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kick_amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oscillation_frequency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settle_cycles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure_cycles: Option<usize>,

    // Oracle-mode couplings (same units as g_a).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_list: Option<Vec<f64>>,
}

/// A validated configuration in angular units, plus the normalized raw form
/// for round-tripping.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub raw: RawConfig,
}

fn require(value: Option<f64>, key: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Config(format!("missing required key '{key}'")))
}

fn check_positive(value: f64, key: &str) -> Result<f64, CliError> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::Config(format!("key '{key}' must be > 0, got {value}")))
    }
}

fn check_nonnegative(value: f64, key: &str) -> Result<f64, CliError> {
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(CliError::Config(format!("key '{key}' must be >= 0, got {value}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config '{}': {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!(
                "config parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        Self::validate(raw)
    }

    fn validate(mut raw: RawConfig) -> Result<Self, CliError> {
        match raw.mode {
            Mode::Si => {
                for (opt, key) in [
                    (raw.delta_pl, "delta_pl"),
                    (raw.omega_1, "omega_1"),
                ] {
                    if opt.is_some() {
                        return Err(CliError::Config(format!(
                            "key '{key}' is normalized-mode only; use f_p/f_L/f_1 in si mode"
                        )));
                    }
                }
                // Fill gamma_1 = 2 gamma_2 and thermal p0 when omitted.
                if raw.gamma_1.is_none() {
                    if let Some(g2) = raw.gamma_2 {
                        raw.gamma_1 = Some(2.0 * g2);
                    }
                }
                if raw.p0.is_none() {
                    if let (Some(f_l), Some(t)) = (raw.f_l, raw.temperature) {
                        let p0 = thermal_polarization(TAU * f_l, check_positive(t, "temperature")?)
                            .map_err(CliError::Numeric)?;
                        raw.p0 = Some(p0);
                    }
                }
            }
            Mode::Normalized => {
                for (opt, key) in [
                    (raw.f_b, "f_b"),
                    (raw.gamma_b, "gamma_b"),
                    (raw.f_l, "f_L"),
                    (raw.f_p, "f_p"),
                    (raw.f_1, "f_1"),
                    (raw.temperature, "temperature"),
                    (raw.s, "S"),
                ] {
                    if opt.is_some() {
                        return Err(CliError::Config(format!(
                            "key '{key}' is si-mode only and has no normalized meaning"
                        )));
                    }
                }
                if let Some(f_a) = raw.f_a {
                    if f_a != 1.0 {
                        return Err(CliError::Config(format!(
                            "in normalized mode f_a must be 1 (or omitted), got {f_a}"
                        )));
                    }
                }
                if raw.gamma_1.is_none() {
                    if let Some(g2) = raw.gamma_2 {
                        raw.gamma_1 = Some(2.0 * g2);
                    }
                }
                if raw.p0.is_none() {
                    return Err(CliError::Config(
                        "normalized mode needs an explicit 'p0' (no thermal derivation)".into(),
                    ));
                }
            }
        }

        // Keys that must be sane whenever present.
        for (opt, key) in [
            (raw.f_a, "f_a"),
            (raw.f_b, "f_b"),
            (raw.f_1, "f_1"),
            (raw.gamma_1, "gamma_1"),
            (raw.gamma_2, "gamma_2"),
            (raw.temperature, "temperature"),
        ] {
            if let Some(v) = opt {
                check_positive(v, key)?;
            }
        }
        for (opt, key) in [
            (raw.gamma_a, "gamma_a"),
            (raw.gamma_b, "gamma_b"),
            (raw.g_a, "g_a"),
            (raw.s, "S"),
            (raw.omega_1, "omega_1"),
            (raw.f_l, "f_L"),
            (raw.kick_amplitude, "kick_amplitude"),
            (raw.x_amplitude, "x_amplitude"),
            (raw.oscillation_frequency, "oscillation_frequency"),
            (raw.t_end, "t_end"),
            (raw.dt, "dt"),
        ] {
            if let Some(v) = opt {
                check_nonnegative(v, key)?;
            }
        }
        if let Some(p0) = raw.p0 {
            if !(-1.0..=0.0).contains(&p0) {
                return Err(CliError::Config(format!(
                    "key 'p0' must lie in [-1, 0], got {p0}"
                )));
            }
        }
        if let Some(axes) = &raw.axes {
            if axes.len() != 2 {
                return Err(CliError::Config(format!(
                    "key 'axes' must hold exactly 2 axes, got {}",
                    axes.len()
                )));
            }
            for axis in axes {
                if axis.count < 2 {
                    return Err(CliError::Config(format!(
                        "axis '{}' needs count >= 2, got {}",
                        axis.name, axis.count
                    )));
                }
                if !(axis.start < axis.stop) {
                    return Err(CliError::Config(format!(
                        "axis '{}' needs start < stop, got [{}, {}]",
                        axis.name, axis.start, axis.stop
                    )));
                }
            }
        }
        Ok(RunConfig { raw })
    }

    /// Serialize the normalized form; loading the output reproduces it
    /// byte-identically.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.raw).expect("config serializes");
        s.push('\n');
        s
    }

    /// FNV-1a hash of the normalized config text, recorded as sweep
    /// provenance.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.to_json().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }

    pub fn mode(&self) -> Mode {
        self.raw.mode
    }

    /// Angular conversion factor for frequency-like keys.
    fn freq_scale(&self) -> f64 {
        match self.raw.mode {
            Mode::Si => TAU,
            Mode::Normalized => 1.0,
        }
    }

    /// Cavity angular frequency omega_a.
    pub fn omega_a(&self) -> Result<f64, CliError> {
        match self.raw.mode {
            Mode::Si => Ok(TAU * require(self.raw.f_a, "f_a")?),
            Mode::Normalized => Ok(1.0),
        }
    }

    /// The spin-branch parameter bundle at the configured operating point.
    pub fn spin_params(&self) -> Result<SpinCavityParams, CliError> {
        let (delta_pl, omega_1, omega_l) = match self.raw.mode {
            Mode::Si => {
                let f_l = require(self.raw.f_l, "f_L")?;
                let f_p = require(self.raw.f_p, "f_p")?;
                let f_1 = require(self.raw.f_1, "f_1")?;
                (TAU * (f_p - f_l), TAU * f_1, Some(TAU * f_l))
            }
            Mode::Normalized => (
                require(self.raw.delta_pl, "delta_pl")?,
                require(self.raw.omega_1, "omega_1")?,
                None,
            ),
        };
        let mut p = self.spin_params_at(delta_pl, omega_1)?;
        p.omega_l = omega_l;
        Ok(p)
    }

    /// Same bundle with the operating point supplied by the caller (sweep
    /// cells); only the rate/coupling keys are required.
    pub fn spin_params_at(
        &self,
        delta_pl: f64,
        omega_1: f64,
    ) -> Result<SpinCavityParams, CliError> {
        let scale = self.freq_scale();
        let omega_a = self.omega_a()?;
        let gamma_a = scale * self.raw.gamma_a.unwrap_or(0.0);
        let g = scale * require(self.raw.g_a, "g_a")?;
        let gamma_2 = scale * require(self.raw.gamma_2, "gamma_2")?;
        let gamma_1 = scale * require(self.raw.gamma_1, "gamma_1 (or gamma_2 to default it)")?;
        let p0 = require(self.raw.p0, "p0 (or f_L and temperature in si mode)")?;
        let cavity = CavityMode::new(omega_a, gamma_a, g).map_err(CliError::Numeric)?;
        SpinCavityParams::new(cavity, gamma_1, gamma_2, p0, delta_pl, omega_1)
            .map_err(CliError::Numeric)
    }

    /// Spiral-branch inputs: (omega_b, gamma_b, drive per unit scale).
    /// Only the product S = K^2 |F_bf|^2 enters the shift, so the drive is
    /// built with K = 1 and |F_bf| = sqrt(S).
    pub fn spiral(&self, omega_d: f64) -> Result<(f64, f64, SpiralDrive), CliError> {
        if self.raw.mode == Mode::Normalized {
            return Err(CliError::Config(
                "the intermode branch is only available in si mode".into(),
            ));
        }
        let omega_b = TAU * require(self.raw.f_b, "f_b")?;
        let gamma_b = TAU * require(self.raw.gamma_b, "gamma_b")?;
        let s = require(self.raw.s, "S (= K^2 |F_bf|^2, rad^3/s^3)")?;
        let drive = SpiralDrive::new(Complex64::new(s.sqrt(), 0.0), omega_d, 1.0);
        Ok((omega_b, gamma_b, drive))
    }

    pub fn axes(&self) -> Result<(AxisSpec, AxisSpec), CliError> {
        let axes = self
            .raw
            .axes
            .as_ref()
            .ok_or_else(|| CliError::Config("missing required key 'axes'".into()))?;
        Ok((axes[0].clone(), axes[1].clone()))
    }

    pub fn threads(&self) -> usize {
        self.raw.threads.unwrap_or(0)
    }
}
