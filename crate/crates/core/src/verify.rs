// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! Independent certification of synthesized pulses.
//!
//! Every claim is re-measured: the state is re-propagated with the RK4
//! oracle rather than the production integrator, bounds are sampled
//! densely as well as at analytic extrema, and energies are compared
//! against the budgets. A report is the conjunction of its checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logical::{self, EntanglerResult};
use crate::propagator::{self, Trajectory};
use crate::pulse::{self, ControlPulse};
use crate::state::{bloch_to_state, fidelity, state_to_bloch, BlochPoint, StateVector, SystemParams};
use crate::synth::{ControlClass, Design, SynthesisResult, TargetSet};

/// Slack on amplitude bounds and on continuity jumps.
pub const BOUND_TOLERANCE: f64 = 1e-12;
/// Dense samples taken over the finite part of a pulse by [`check_bounds`].
pub const BOUND_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// measured ≤ claimed + tolerance.
    AtMost,
    /// measured ≥ claimed − tolerance.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub claimed: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl CheckRecord {
    pub fn at_most(name: &str, claimed: f64, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            claimed,
            measured,
            tolerance,
            relation: Relation::AtMost,
            pass: measured <= claimed + tolerance,
        }
    }

    pub fn at_least(name: &str, claimed: f64, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            claimed,
            measured,
            tolerance,
            relation: Relation::AtLeast,
            pass: measured >= claimed - tolerance,
        }
    }
}

/// Design parameters echoed into a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub params: SystemParams,
    pub control_class: ControlClass,
    pub target_set: TargetSet,
    pub t0: f64,
    pub t_f: f64,
    pub design: Design,
    pub oracle_dt: f64,
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckRecord>,
    pub overall: bool,
    pub provenance: Provenance,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(checks: Vec<CheckRecord>, provenance: Provenance, notes: Vec<String>) -> Self {
        let overall = checks.iter().all(|c| c.pass);
        Self {
            checks,
            overall,
            provenance,
            notes,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Optional time and energy budgets.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Budgets {
    pub time: Option<f64>,
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Oracle step as a fraction of the drift period.
    pub dt_fraction: f64,
    /// Required 1 − fidelity, and the θ tolerance for circle residence.
    pub fidelity_tolerance: f64,
    pub residence_tolerance: f64,
    /// Residence horizon after t_f, in drift periods.
    pub horizon_periods: f64,
    pub norm_tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            dt_fraction: 1e-4,
            fidelity_tolerance: 1e-6,
            residence_tolerance: 1e-6,
            horizon_periods: 10.0,
            norm_tolerance: 1e-9,
        }
    }
}

/// The last finite time worth sampling: the final boundary, extended by one
/// unit so an unbounded tail contributes samples too.
fn sampling_end(pulse: &ControlPulse) -> f64 {
    let last = pulse.segments().last().expect("pulses are non-empty");
    if last.t_end().is_finite() {
        last.t_end()
    } else {
        last.t_start() + 1.0
    }
}

fn sup_norm(pulse: &ControlPulse) -> Result<f64> {
    let (a, b) = (pulse.t_start(), sampling_end(pulse));
    let mut sup = 0.0_f64;
    let mut visit = |t: f64| -> Result<()> {
        let (ux, uy) = pulse::eval_pulse(pulse, t)?;
        sup = sup.max(ux.abs()).max(uy.abs());
        Ok(())
    };
    for k in 0..=BOUND_SAMPLES {
        visit(a + (b - a) * k as f64 / BOUND_SAMPLES as f64)?;
    }
    for seg in pulse.segments() {
        // Candidates are evaluated with the segment's own formula so that a
        // boundary value of the earlier segment is not skipped.
        for t in seg.extremum_candidates(seg.t_start(), seg.t_end()) {
            let (ux, uy) = seg.controls_at(t);
            sup = sup.max(ux.abs()).max(uy.abs());
        }
    }
    Ok(sup)
}

/// sup_t max(|u_x|, |u_y|) against g₀.
pub fn check_bounds(pulse: &ControlPulse, g0: f64) -> CheckRecord {
    let measured = sup_norm(pulse).unwrap_or(f64::INFINITY);
    CheckRecord::at_most("bounds", g0, measured, BOUND_TOLERANCE)
}

/// Largest jump of (u_x, u_y) across internal segment boundaries.
pub fn check_continuity(pulse: &ControlPulse) -> CheckRecord {
    let segs = pulse.segments();
    let mut jump = 0.0_f64;
    for w in segs.windows(2) {
        let t = w[1].t_start();
        let (lx, ly) = w[0].controls_at(t);
        let (rx, ry) = w[1].controls_at(t);
        jump = jump.max((lx - rx).abs()).max((ly - ry).abs());
    }
    CheckRecord::at_most("continuity", 0.0, jump, BOUND_TOLERANCE)
}

/// max |θ(t) − θ_f| over samples with t ≥ `from`.
pub fn check_circle_residence(traj: &Trajectory, theta_f: f64, from: f64, tol: f64) -> Result<CheckRecord> {
    if !(from >= traj.t_start() && from <= traj.t_end()) {
        return Err(Error::Interval {
            t: from,
            start: traj.t_start(),
            end: traj.t_end(),
        });
    }
    let mut worst = 0.0_f64;
    for s in traj.since(from) {
        let p = state_to_bloch(&s.state)?;
        worst = worst.max((p.theta() - theta_f).abs());
    }
    Ok(CheckRecord::at_most("circle_residence", 0.0, worst, tol))
}

fn min_fidelity_since(traj: &Trajectory, target: &StateVector, from: f64) -> Result<f64> {
    let mut worst = 1.0_f64;
    for s in traj.since(from) {
        worst = worst.min(fidelity(&s.state, target)?);
    }
    Ok(worst)
}

fn time_and_energy_checks(
    checks: &mut Vec<CheckRecord>,
    pulse: &ControlPulse,
    t0: f64,
    t_f: f64,
    claimed_bound: Option<f64>,
    budgets: Budgets,
) -> Result<()> {
    let elapsed = t_f - t0;
    if let Some(bound) = claimed_bound {
        checks.push(CheckRecord::at_most("time_bound", bound, elapsed, 0.0));
    }
    if let Some(ts) = budgets.time {
        checks.push(CheckRecord::at_most("time_budget", ts, elapsed, 0.0));
    }
    if let Some(es) = budgets.energy {
        checks.push(CheckRecord::at_most("energy_budget", es, pulse::pulse_energy(pulse, t0, t_f)?, 0.0));
    }
    Ok(())
}

/// Re-propagates `result` with the oracle and checks every claim.
pub fn verify_synthesis(
    result: &SynthesisResult,
    budgets: Budgets,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    let params = &result.params;
    let period = params.drift_period();
    let dt = options.dt_fraction * period;
    let horizon = options.horizon_periods * period;
    let s0 = bloch_to_state(result.initial);
    let target = bloch_to_state(result.target);
    let traj = propagator::oracle_propagate(&result.pulse, &s0, params, dt, result.t_f + horizon)?;

    let mut checks = Vec::new();
    let at_tf = traj.sample_at(result.t_f)?;
    checks.push(CheckRecord::at_least(
        "target_fidelity",
        1.0,
        fidelity(&at_tf.state, &target)?,
        options.fidelity_tolerance,
    ));
    checks.push(CheckRecord::at_most(
        "norm_drift",
        0.0,
        traj.max_norm_deviation(),
        options.norm_tolerance,
    ));
    if result.control_class != ControlClass::Unbounded {
        checks.push(check_bounds(&result.pulse, params.g0));
    }
    if result.control_class == ControlClass::BoundedContinuous {
        checks.push(check_continuity(&result.pulse));
    }
    match result.target_set {
        TargetSet::Point => checks.push(CheckRecord::at_least(
            "point_residence",
            1.0,
            min_fidelity_since(&traj, &target, result.t_f)?,
            options.fidelity_tolerance,
        )),
        TargetSet::Circle => checks.push(check_circle_residence(
            &traj,
            result.target.theta(),
            result.t_f,
            options.residence_tolerance,
        )?),
    }
    time_and_energy_checks(&mut checks, &result.pulse, result.t0, result.t_f, result.claimed_bound, budgets)?;

    let mut notes = Vec::new();
    if let Design::ResonantTransfer {
        exceeds_soft_bound: true,
        g,
        ..
    } = result.design
    {
        notes.push(format!("transfer amplitude g = {g:e} exceeds the requested soft bound"));
    }
    Ok(VerificationReport::new(
        checks,
        Provenance {
            params: *params,
            control_class: result.control_class,
            target_set: result.target_set,
            t0: result.t0,
            t_f: result.t_f,
            design: result.design.clone(),
            oracle_dt: dt,
            horizon,
        },
        notes,
    ))
}

/// Oracle certification of an entangler on the full two-qubit system.
pub fn verify_entangler(
    result: &EntanglerResult,
    budgets: Budgets,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    let params = &result.params;
    let period = params.drift_period();
    // the logical phase turns four times faster than a bare qubit
    let dt = 0.25 * options.dt_fraction * period;
    let horizon = options.horizon_periods * period;
    let (t0, t_f) = (result.t0(), result.t_f());
    let traj = logical::oracle_propagate_two_qubit(&result.lifted, &result.initial, params, dt, t_f + horizon)?;
    let tol = options.fidelity_tolerance;

    let mut checks = Vec::new();
    let fin = &traj.sample_at(t_f)?.state;
    let em = logical::em_membership(fin, tol)?;
    checks.push(CheckRecord::at_least("em_membership", 1.0, if em { 1.0 } else { 0.0 }, 0.0));
    checks.push(CheckRecord::at_least("concurrence", 1.0, logical::concurrence(fin)?, tol));
    let mut leak = 0.0_f64;
    let mut conc = 1.0_f64;
    for s in traj.samples() {
        leak = leak.max(logical::leakage(&s.state)?);
    }
    for s in traj.since(t_f) {
        conc = conc.min(logical::concurrence(&s.state)?);
    }
    checks.push(CheckRecord::at_most("leakage", 0.0, leak, 1e-9));
    checks.push(CheckRecord::at_least("em_residence", 1.0, conc, tol));
    checks.push(CheckRecord::at_most(
        "norm_drift",
        0.0,
        traj.max_norm_deviation(),
        options.norm_tolerance,
    ));
    // |u_ij| ≤ g₀ for all four coefficients is |u^L_x|, |u^L_y| ≤ g₀.
    checks.push(check_bounds(result.lifted.logical(), params.g0));
    if result.effective.control_class == ControlClass::BoundedContinuous {
        checks.push(check_continuity(result.lifted.logical()));
    }
    time_and_energy_checks(&mut checks, result.lifted.logical(), t0, t_f, Some(result.claimed_bound), budgets)?;

    let elapsed = t_f - t0;
    let alt = std::f64::consts::PI / (4.0 * params.g0) + 2.0 * std::f64::consts::PI / params.omega0;
    let mut notes = vec![format!(
        "t_f - t0 = {elapsed:e}; within pi/g0 + 2pi/omega0: {}; within pi/(4 g0) + 2pi/omega0: {}",
        elapsed <= std::f64::consts::PI / params.g0 + 2.0 * std::f64::consts::PI / params.omega0,
        elapsed <= alt
    )];
    if let Some(dir) = drift_direction(&traj, t_f)? {
        notes.push(format!("logical phase drift on E_M after t_f: {dir}"));
    }
    Ok(VerificationReport::new(
        checks,
        Provenance {
            params: *params,
            control_class: result.effective.control_class,
            target_set: TargetSet::Circle,
            t0,
            t_f,
            design: result.effective.design.clone(),
            oracle_dt: dt,
            horizon,
        },
        notes,
    ))
}

/// Sign of dφ/dt just after t_f, measured on the logical Bloch sphere.
fn drift_direction(traj: &Trajectory, t_f: f64) -> Result<Option<&'static str>> {
    let after = traj.since(t_f);
    if after.len() < 2 {
        return Ok(None);
    }
    let phase = |s: &StateVector| -> Result<BlochPoint> { logical::logical_point(s, 1e-6) };
    let (a, b) = (phase(&after[0].state)?, phase(&after[1].state)?);
    let d = crate::state::phase_difference(b.phi(), a.phi());
    Ok(Some(if d < 0.0 { "decreasing" } else { "increasing" }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::Segment;
    use crate::stab;
    use crate::synth;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn pt(t: f64, p: f64) -> BlochPoint {
        BlochPoint::new(t, p).unwrap()
    }

    #[test]
    fn bounds_examples() {
        let res = ControlPulse::new(vec![Segment::Resonant { g: 0.5, omega_rf: -1.0, phi1: 0.3, t_start: 0.0, t_end: 10.0 }]).unwrap();
        let c = check_bounds(&res, 1.0);
        assert!(c.pass);
        assert!((c.measured - 0.5).abs() < 1e-15);

        let params = SystemParams::new(1.0, 1.0).unwrap();
        let (ux, uy) = stab::hold_controls(&pt(FRAC_PI_4, 0.0), &params).unwrap();
        let hold = ControlPulse::new(vec![Segment::StaticHold { ux, uy, t_start: 0.0, t_end: f64::INFINITY }]).unwrap();
        let c = check_bounds(&hold, 1.0);
        assert!(c.pass && (c.measured - 1.0).abs() < 1e-15);

        let env = ControlPulse::new(vec![Segment::Envelope {
            g: 1.2, n: 3, carrier_omega: 1.0, carrier_t_ref: 2.0, sign_y: -1, t_start: 2.0, t_end: 2.0 + 4.0 * PI,
        }])
        .unwrap();
        let c = check_bounds(&env, 1.0);
        assert!(!c.pass);
        assert!((c.measured - 1.2).abs() < 1e-12, "{}", c.measured);
    }

    #[test]
    fn continuity_examples() {
        let p = SystemParams::new(1.0, 0.5).unwrap();
        let cont = synth::synth_circle_continuous(pt(0.3, 1.0), pt(2.0, 4.0), p, 0.0, 5).unwrap();
        assert!(check_continuity(&cont.pulse).pass);
        let point = synth::synth_point_hold(pt(FRAC_PI_2, 0.0), pt(0.2, 1.0), p, 0.0).unwrap();
        assert!(!check_continuity(&point.pulse).pass);
        let silent = ControlPulse::new(vec![Segment::Silence { t_start: 0.0, t_end: f64::INFINITY }]).unwrap();
        assert!(check_continuity(&silent).pass);
    }

    #[test]
    fn residence_examples() {
        let params = SystemParams::new(1.0, 1.0).unwrap();
        let silent = ControlPulse::new(vec![Segment::Silence { t_start: 0.0, t_end: f64::INFINITY }]).unwrap();
        for theta in [0.3, FRAC_PI_2, 2.8] {
            let traj = propagator::oracle_propagate(&silent, &bloch_to_state(pt(theta, 1.0)), &params, 1e-3, 20.0).unwrap();
            assert!(check_circle_residence(&traj, theta, 0.0, 1e-6).unwrap().pass);
            assert!(check_circle_residence(&traj, theta, 30.0, 1e-6).is_err());
        }

        let p = SystemParams::new(1.0, 0.5).unwrap();
        let res = synth::synth_circle_continuous(pt(0.3, 1.0), pt(2.0, 4.0), p, 0.0, 5).unwrap();
        let dt = 1e-4 * p.drift_period();
        let traj = propagator::oracle_propagate(&res.pulse, &bloch_to_state(res.initial), &p, dt, res.t_f + 10.0 * p.drift_period()).unwrap();
        assert!(check_circle_residence(&traj, 2.0, res.t_f, 1e-6).unwrap().pass);
        let Design::Envelope { t1, .. } = res.design else { panic!() };
        assert!(!check_circle_residence(&traj, 2.0, t1, 1e-6).unwrap().pass);
    }

    #[test]
    fn point_hold_reference_passes() {
        let p = SystemParams::new(1.0, 0.1).unwrap();
        let res = synth::synth_point_hold(pt(FRAC_PI_2, 0.0), pt(0.0, 0.0), p, 0.0).unwrap();
        let report = verify_synthesis(&res, Budgets::default(), &VerifyOptions::default()).unwrap();
        assert!(report.overall, "{:?}", report.checks);
    }

    #[test]
    fn case_four_meets_its_budget() {
        let p = SystemParams::new(1.0, 0.5).unwrap();
        let ts = PI / p.g0 + 6.0 * PI / p.omega0;
        let res = synth::synth_circle_by_case(pt(1.0, 2.0), pt(2.5, 0.4), p, 0.0).unwrap();
        assert!(matches!(res.design, Design::Envelope { case: Some(synth::TransferCase::Four), .. }));
        let report = verify_synthesis(&res, Budgets { time: Some(ts), energy: None }, &VerifyOptions::default()).unwrap();
        assert!(report.check("time_budget").unwrap().pass);
        assert!(report.overall, "{:?}", report.checks);
    }

    #[test]
    fn identity_time_energy_passes() {
        let p = SystemParams::new(1.0, 1.0).unwrap();
        let z = BlochPoint::north();
        let res = synth::synth_time_energy(z, z, p, 0.0, 7.0 * PI, PI, None).unwrap();
        let b = Budgets { time: Some(7.0 * PI), energy: Some(PI) };
        let report = verify_synthesis(&res, b, &VerifyOptions::default()).unwrap();
        assert!(report.check("energy_budget").unwrap().pass);
        assert!(report.overall, "{:?}", report.checks);
    }

    #[test]
    fn reports_are_deterministic() {
        let p = SystemParams::new(2.0, 0.7).unwrap();
        let res = synth::synth_circle_bounded(pt(2.2, 5.0), pt(0.4, 1.0), p, 1.0).unwrap();
        let opts = VerifyOptions::default();
        let a = verify_synthesis(&res, Budgets::default(), &opts).unwrap();
        let b = verify_synthesis(&res, Budgets::default(), &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.overall, "{:?}", a.checks);
    }
}
