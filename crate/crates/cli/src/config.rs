// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! TOML run configuration. Every field is optional; command-line flags take
//! precedence over the file.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use qstab_core::synth::ControlClass;
use qstab_core::{BlochPoint, SystemParams};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Angles {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub pulse: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub region: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub omega0: Option<f64>,
    pub g0: Option<f64>,
    pub initial: Option<Angles>,
    pub target: Option<Angles>,
    pub control_class: Option<ControlClass>,
    pub t0: Option<f64>,
    /// Time and energy budgets.
    pub ts: Option<f64>,
    pub es: Option<f64>,
    /// Envelope order.
    pub n: Option<u32>,
    pub soft_bound: Option<f64>,
    pub dt: Option<f64>,
    /// Simulated span after t_f.
    pub t_horizon: Option<f64>,
    pub ratio: Option<f64>,
    pub res: Option<usize>,
    #[serde(default)]
    pub output: OutputPaths,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| CliError::Config {
            path: path.to_path_buf(),
            source,
        })
    }
}

pub fn require<T>(value: Option<T>, name: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Invalid(format!("missing required value --{name} (flag or config)")))
}

pub fn positive(value: f64, name: &str) -> CliResult<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::Invalid(format!("{name} must be a positive finite number, got {value}")))
    }
}

/// Angles in radians: θ ∈ [0, π], φ ∈ [0, 2π).
pub fn point(theta: f64, phi: f64, what: &str) -> CliResult<BlochPoint> {
    if !(0.0..=PI).contains(&theta) || !(0.0..TAU).contains(&phi) {
        return Err(CliError::Invalid(format!(
            "{what} angles out of range: theta = {theta} must be in [0, pi], phi = {phi} in [0, 2pi) (radians)"
        )));
    }
    Ok(BlochPoint::new(theta, phi)?)
}

pub fn params(omega0: Option<f64>, g0: Option<f64>) -> CliResult<SystemParams> {
    let omega0 = positive(require(omega0, "omega0")?, "omega0")?;
    let g0 = positive(require(g0, "g0")?, "g0")?;
    Ok(SystemParams::new(omega0, g0)?)
}
