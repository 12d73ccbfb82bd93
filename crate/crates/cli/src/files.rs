// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! Pulse JSON, trajectory CSV and region CSV.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use qstab_core::logical::{self, EntanglerResult, LIFTING_ROLES};
use qstab_core::propagator::Trajectory;
use qstab_core::stab::RegionGrid;
use qstab_core::state::state_to_bloch;
use qstab_core::synth::{ControlClass, Design, SynthesisResult, TargetSet};
use qstab_core::{BlochPoint, ControlPulse, Segment, SystemParams};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

/// Budgets the design was requested under.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetBlock {
    pub time: Option<f64>,
    pub energy: Option<f64>,
}

/// Everything needed to re-verify a synthesized pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisBlock {
    pub initial: BlochPoint,
    pub target: BlochPoint,
    pub target_set: TargetSet,
    pub control_class: ControlClass,
    pub t0: f64,
    pub t_f: f64,
    pub design: Design,
    pub claimed_bound: Option<f64>,
    pub claimed_energy: Option<f64>,
    pub budgets: BudgetBlock,
}

/// Present when `segments` is a logical pulse driving the two-qubit system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftingBlock {
    /// Two-qubit coefficient → logical control it carries.
    pub roles: BTreeMap<String, String>,
    /// Parameters of the effective qubit the design was computed on.
    pub effective_params: SystemParams,
    pub claimed_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseFile {
    pub version: u32,
    pub params: SystemParams,
    pub segments: Vec<Segment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthesis: Option<SynthesisBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifting: Option<LiftingBlock>,
}

fn synthesis_block(res: &SynthesisResult, budgets: BudgetBlock) -> SynthesisBlock {
    SynthesisBlock {
        initial: res.initial,
        target: res.target,
        target_set: res.target_set,
        control_class: res.control_class,
        t0: res.t0,
        t_f: res.t_f,
        design: res.design.clone(),
        claimed_bound: res.claimed_bound,
        claimed_energy: res.claimed_energy,
        budgets,
    }
}

impl PulseFile {
    pub fn from_synthesis(res: &SynthesisResult, budgets: BudgetBlock) -> Self {
        Self {
            version: FORMAT_VERSION,
            params: res.params,
            segments: res.pulse.segments().to_vec(),
            synthesis: Some(synthesis_block(res, budgets)),
            lifting: None,
        }
    }

    pub fn from_entangler(res: &EntanglerResult, budgets: BudgetBlock) -> Self {
        let roles = LIFTING_ROLES
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Self {
            version: FORMAT_VERSION,
            params: res.params,
            segments: res.lifted.logical().segments().to_vec(),
            synthesis: Some(synthesis_block(&res.effective, budgets)),
            lifting: Some(LiftingBlock {
                roles,
                effective_params: res.effective.params,
                claimed_bound: res.claimed_bound,
            }),
        }
    }

    pub fn pulse(&self) -> CliResult<ControlPulse> {
        Ok(ControlPulse::new(self.segments.clone())?)
    }

    fn require_synthesis(&self) -> CliResult<&SynthesisBlock> {
        self.synthesis
            .as_ref()
            .ok_or_else(|| CliError::Invalid("pulse file has no synthesis block to verify against".into()))
    }

    pub fn to_synthesis(&self) -> CliResult<SynthesisResult> {
        let s = self.require_synthesis()?;
        Ok(SynthesisResult {
            params: self.params,
            initial: s.initial,
            target: s.target,
            target_set: s.target_set,
            control_class: s.control_class,
            t0: s.t0,
            t_f: s.t_f,
            pulse: self.pulse()?,
            design: s.design.clone(),
            claimed_bound: s.claimed_bound,
            claimed_energy: s.claimed_energy,
        })
    }

    pub fn to_entangler(&self) -> CliResult<EntanglerResult> {
        let s = self.require_synthesis()?;
        let lift = self
            .lifting
            .as_ref()
            .ok_or_else(|| CliError::Invalid("pulse file has no lifting block".into()))?;
        let logical_pulse = self.pulse()?;
        let effective = SynthesisResult {
            params: lift.effective_params,
            initial: s.initial,
            target: s.target,
            target_set: s.target_set,
            control_class: s.control_class,
            t0: s.t0,
            t_f: s.t_f,
            pulse: logical_pulse.scaled(-4.0)?,
            design: s.design.clone(),
            claimed_bound: s.claimed_bound,
            claimed_energy: s.claimed_energy,
        };
        Ok(EntanglerResult {
            params: self.params,
            initial: logical::embed_logical(s.initial),
            effective,
            lifted: logical::lift_logical_controls(logical_pulse),
            claimed_bound: lift.claimed_bound,
        })
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(crate::json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let file: PulseFile = serde_json::from_str(text)?;
        if file.version != FORMAT_VERSION {
            return Err(CliError::Invalid(format!(
                "unsupported pulse file version {} (expected {FORMAT_VERSION})",
                file.version
            )));
        }
        file.pulse()?;
        Ok(file)
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Trajectory CSV. Two-dimensional states report their Bloch angles,
/// four-dimensional ones the logical Bloch angles (NaN once leaked).
pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let dim = traj.samples().first().map_or(2, |s| s.state.dim());
    let mut header = vec!["t".to_string()];
    for k in 0..dim {
        header.push(format!("re{k}"));
        header.push(format!("im{k}"));
    }
    header.extend(["theta", "phi", "ux", "uy"].map(String::from));
    w.write_record(&header)?;
    for s in traj.samples() {
        let mut row = vec![num(s.t)];
        for a in s.state.amplitudes() {
            row.push(num(a.re));
            row.push(num(a.im));
        }
        let point: Option<BlochPoint> = if dim == 2 {
            state_to_bloch(&s.state).ok()
        } else {
            logical::logical_point(&s.state, 1e-6).ok()
        };
        let (theta, phi) = point.map_or((f64::NAN, f64::NAN), |p| (p.theta(), p.phi()));
        row.extend([num(theta), num(phi), num(s.ux), num(s.uy)]);
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Region CSV, θ outer and φ inner.
pub fn write_region<W: Write>(out: W, grid: &RegionGrid) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "phi", "stabilizable"])?;
    for i in 0..grid.n_theta {
        for j in 0..grid.n_phi {
            w.write_record([num(grid.theta(i)), num(grid.phi(j)), grid.cell(i, j).to_string()])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
