// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

//! Explicit open-loop control laws for the driven qubit.
//!
//! Two transfer mechanisms are used:
//!
//! * **Resonant transfer.** A rotating drive g·(cos, sin)[ω_rf(t − t₀) + φ₀]
//!   is, in the frame co-rotating at −ω_rf, a static field of tilt
//!   c = (θ₀ + θ_f)/2 in the meridian of φ₀. Choosing the detuning and
//!   amplitude so that the rotating-frame generator is (π/(2T))·n̂·σ over the
//!   duration T = φ_k/ω₀ performs a half-turn about n̂, reflecting θ₀ into θ_f,
//!   and the frame rotation lands the phase on φ_f. The integer k trades
//!   transfer time against amplitude; the minimal k with g ≤ g₀ is used.
//!   Followed by a static hold (point target) or silence (circle target).
//! * **Envelope transfer.** After free drift to relative phase π/2, an
//!   exactly resonant carrier with an order-n ramp g(t) rotates the state in
//!   the co-rotating frame about x by the ramp area; the end time is chosen
//!   so that drift brings the phase to φ_f. Controls start and end at zero,
//!   so the whole schedule is continuous.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::{ControlPulse, Segment};
use crate::stab;
use crate::state::{BlochPoint, SystemParams};

/// Admissible control class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlClass {
    /// |u_x|, |u_y| ≤ g₀, possibly discontinuous.
    Bounded,
    /// Bounded and continuous in time.
    BoundedContinuous,
    /// No amplitude bound; used by the time-energy construction.
    Unbounded,
}

/// Whether the target is a single point or its whole latitude circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSet {
    Point,
    Circle,
}

/// Sign cases of the time-budgeted envelope transfer, by
/// (φ₀ − π/2 ≥ 0, θ_f − θ₀ ≥ 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferCase {
    /// φ₀ < π/2, θ_f < θ₀.
    One,
    /// φ₀ < π/2, θ_f ≥ θ₀.
    Two,
    /// φ₀ ≥ π/2, θ_f < θ₀.
    Three,
    /// φ₀ ≥ π/2, θ_f ≥ θ₀.
    Four,
}

impl TransferCase {
    pub fn classify(p0: &BlochPoint, pf: &BlochPoint) -> Self {
        let late = p0.phi() >= FRAC_PI_2;
        let rising = pf.theta() >= p0.theta();
        match (late, rising) {
            (false, false) => TransferCase::One,
            (false, true) => TransferCase::Two,
            (true, false) => TransferCase::Three,
            (true, true) => TransferCase::Four,
        }
    }

    /// Drift starts as soon as the phase passes π/2 (no extra turn).
    pub fn late_start(self) -> bool {
        matches!(self, TransferCase::Three | TransferCase::Four)
    }

    /// Rotation by θ_f − θ₀ instead of 4π + θ_f − θ₀.
    pub fn reduced_angle(self) -> bool {
        matches!(self, TransferCase::Two | TransferCase::Four)
    }
}

/// Chosen integers and reals of a construction, echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum Design {
    /// Initial and target coincide: no transfer segment.
    Identity,
    ResonantTransfer {
        k: i64,
        phi_fap: f64,
        g: f64,
        omega_rf: f64,
        phi1: f64,
        /// Static hold applied after the transfer, if any.
        hold: Option<(f64, f64)>,
        /// Integers admitted by the time-energy constraints, when used.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        feasible_k: Option<Vec<i64>>,
        /// g exceeded the caller's soft amplitude bound.
        #[serde(default)]
        exceeds_soft_bound: bool,
    },
    Envelope {
        k_dn: i64,
        n: u32,
        g: f64,
        t1: f64,
        case: Option<TransferCase>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub params: SystemParams,
    pub initial: BlochPoint,
    pub target: BlochPoint,
    pub target_set: TargetSet,
    pub control_class: ControlClass,
    pub t0: f64,
    /// End of the transfer; the hold or drift tail starts here.
    pub t_f: f64,
    pub pulse: ControlPulse,
    pub design: Design,
    /// Sufficient bound on t_f − t₀ the construction guarantees.
    pub claimed_bound: Option<f64>,
    /// ∫(u_x² + u_y²) over [t₀, t_f] in closed form.
    pub claimed_energy: Option<f64>,
}

impl SynthesisResult {
    pub fn transfer_time(&self) -> f64 {
        self.t_f - self.t0
    }
}

fn check_t0(t0: f64) -> Result<()> {
    if t0.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("t0 must be finite, got {t0}")))
    }
}

/// φ_k = 2kπ − φ_f + φ₀ + π·cos((θ₀ + θ_f)/2).
pub fn resonant_phase_budget(p0: &BlochPoint, pf: &BlochPoint, k: i64) -> f64 {
    let c = 0.5 * (p0.theta() + pf.theta());
    TAU * k as f64 - pf.phi() + p0.phi() + PI * c.cos()
}

/// Smallest k with g ≤ g₀ and φ_k > 0.
pub fn minimal_resonant_k(p0: &BlochPoint, pf: &BlochPoint, params: &SystemParams) -> i64 {
    let c = 0.5 * (p0.theta() + pf.theta());
    let lower = (pf.phi() - p0.phi() - PI * c.cos()) / TAU + params.omega0 * c.sin() / (2.0 * params.g0);
    let mut k = lower.ceil() as i64;
    while resonant_phase_budget(p0, pf, k) <= 0.0 {
        k += 1;
    }
    k
}

struct ResonantParts {
    phi_fap: f64,
    g: f64,
    omega_rf: f64,
    duration: f64,
}

fn resonant_parts(p0: &BlochPoint, pf: &BlochPoint, omega0: f64, k: i64) -> ResonantParts {
    let c = 0.5 * (p0.theta() + pf.theta());
    let phi_fap = resonant_phase_budget(p0, pf, k);
    ResonantParts {
        phi_fap,
        g: omega0 * PI * c.sin() / phi_fap,
        omega_rf: -(TAU * k as f64 - pf.phi() + p0.phi()) * omega0 / phi_fap,
        duration: phi_fap / omega0,
    }
}

fn resonant_result(
    p0: BlochPoint,
    pf: BlochPoint,
    params: SystemParams,
    t0: f64,
    k: i64,
    tail: Tail,
    control_class: ControlClass,
) -> Result<SynthesisResult> {
    let parts = resonant_parts(&p0, &pf, params.omega0, k);
    let t_f = t0 + parts.duration;
    let (tail_seg, hold, target_set) = match tail {
        Tail::Hold(ux, uy) => (
            Segment::StaticHold {
                ux,
                uy,
                t_start: t_f,
                t_end: f64::INFINITY,
            },
            Some((ux, uy)),
            TargetSet::Point,
        ),
        Tail::Drift => (
            Segment::Silence {
                t_start: t_f,
                t_end: f64::INFINITY,
            },
            None,
            TargetSet::Circle,
        ),
    };
    let pulse = ControlPulse::new(vec![
        Segment::Resonant {
            g: parts.g,
            omega_rf: parts.omega_rf,
            phi1: p0.phi(),
            t_start: t0,
            t_end: t_f,
        },
        tail_seg,
    ])?;
    Ok(SynthesisResult {
        params,
        initial: p0,
        target: pf,
        target_set,
        control_class,
        t0,
        t_f,
        pulse,
        design: Design::ResonantTransfer {
            k,
            phi_fap: parts.phi_fap,
            g: parts.g,
            omega_rf: parts.omega_rf,
            phi1: p0.phi(),
            hold,
            feasible_k: None,
            exceeds_soft_bound: false,
        },
        claimed_bound: None,
        claimed_energy: Some(parts.g * parts.g * parts.duration),
    })
}

enum Tail {
    Hold(f64, f64),
    Drift,
}

fn identity_result(
    p: BlochPoint,
    params: SystemParams,
    t0: f64,
    tail: Segment,
    target_set: TargetSet,
    control_class: ControlClass,
) -> Result<SynthesisResult> {
    Ok(SynthesisResult {
        params,
        initial: p,
        target: p,
        target_set,
        control_class,
        t0,
        t_f: t0,
        pulse: ControlPulse::new(vec![tail])?,
        design: Design::Identity,
        claimed_bound: None,
        claimed_energy: Some(0.0),
    })
}

/// Resonant transfer to `pf` followed by the static hold that freezes it.
pub fn synth_point_hold(
    p0: BlochPoint,
    pf: BlochPoint,
    params: SystemParams,
    t0: f64,
) -> Result<SynthesisResult> {
    check_t0(t0)?;
    let (ux, uy) = stab::hold_controls(&pf, &params)?;
    if p0 == pf {
        let hold = Segment::StaticHold {
            ux,
            uy,
            t_start: t0,
            t_end: f64::INFINITY,
        };
        return identity_result(pf, params, t0, hold, TargetSet::Point, ControlClass::Bounded);
    }
    let k = minimal_resonant_k(&p0, &pf, &params);
    resonant_result(p0, pf, params, t0, k, Tail::Hold(ux, uy), ControlClass::Bounded)
}

/// Resonant transfer to `pf` followed by free drift on its latitude circle.
/// Discontinuous at both ends of the transfer; meets the bounded-class time
/// bound with t_f − t₀ < π·sin((θ₀+θ_f)/2)/g₀ + 2π/ω₀.
pub fn synth_circle_bounded(
    p0: BlochPoint,
    pf: BlochPoint,
    params: SystemParams,
    t0: f64,
) -> Result<SynthesisResult> {
    check_t0(t0)?;
    let bound = transition_time_bound(None, &params, ControlClass::Bounded);
    let mut res = if p0 == pf {
        identity_result(pf, params, t0, silence_from(t0), TargetSet::Circle, ControlClass::Bounded)?
    } else {
        let k = minimal_resonant_k(&p0, &pf, &params);
        resonant_result(p0, pf, params, t0, k, Tail::Drift, ControlClass::Bounded)?
    };
    res.claimed_bound = Some(bound);
    Ok(res)
}

fn silence_from(t0: f64) -> Segment {
    Segment::Silence {
        t_start: t0,
        t_end: f64::INFINITY,
    }
}

struct EnvelopeParts {
    k_dn: i64,
    g: f64,
    t1: f64,
    t_f: f64,
}

fn envelope_parts(
    p0: &BlochPoint,
    pf: &BlochPoint,
    params: &SystemParams,
    t0: f64,
    n: u32,
    late_start: bool,
    reduced_angle: bool,
) -> EnvelopeParts {
    let (w, g0) = (params.omega0, params.g0);
    let nf = f64::from(n);
    let angle = if reduced_angle {
        pf.theta() - p0.theta()
    } else {
        2.0 * TAU + pf.theta() - p0.theta()
    };
    let lower = (nf + 1.0) / nf * w / g0 * angle / TAU + pf.phi() / TAU - 0.25;
    let k_dn = (lower.ceil() as i64).max(1);
    let kf = k_dn as f64;
    let g = w * (nf + 1.0) / nf * angle / (TAU * kf + FRAC_PI_2 - pf.phi());
    let (t1, t_f) = if late_start {
        (
            (p0.phi() - FRAC_PI_2) / w + t0,
            (TAU * kf - pf.phi() + p0.phi()) / w + t0,
        )
    } else {
        (
            (p0.phi() + 1.5 * PI) / w + t0,
            (TAU * kf + TAU - pf.phi() + p0.phi()) / w + t0,
        )
    };
    EnvelopeParts { k_dn, g, t1, t_f }
}

fn envelope_result(
    p0: BlochPoint,
    pf: BlochPoint,
    params: SystemParams,
    t0: f64,
    n: u32,
    case: Option<TransferCase>,
) -> Result<SynthesisResult> {
    let (late, reduced) = case.map_or((false, false), |c| (c.late_start(), c.reduced_angle()));
    let parts = envelope_parts(&p0, &pf, &params, t0, n, late, reduced);
    let mut segments = Vec::with_capacity(3);
    if parts.t1 > t0 {
        segments.push(Segment::Silence {
            t_start: t0,
            t_end: parts.t1,
        });
    }
    segments.push(Segment::Envelope {
        g: parts.g,
        n,
        carrier_omega: params.omega0,
        carrier_t_ref: parts.t1,
        sign_y: -1,
        t_start: parts.t1,
        t_end: parts.t_f,
    });
    segments.push(silence_from(parts.t_f));
    let pulse = ControlPulse::new(segments)?;
    let claimed_energy = pulse_energy_closed(&pulse, t0, parts.t_f)?;
    Ok(SynthesisResult {
        params,
        initial: p0,
        target: pf,
        target_set: TargetSet::Circle,
        control_class: ControlClass::BoundedContinuous,
        t0,
        t_f: parts.t_f,
        pulse,
        design: Design::Envelope {
            k_dn: parts.k_dn,
            n,
            g: parts.g,
            t1: parts.t1,
            case,
        },
        claimed_bound: case.map(|c| case_time_bound(c, &params)),
        claimed_energy: Some(claimed_energy),
    })
}

fn pulse_energy_closed(pulse: &ControlPulse, t0: f64, tf: f64) -> Result<f64> {
    crate::pulse::pulse_energy(pulse, t0, tf)
}

/// Continuous envelope transfer to `pf`, then free drift on C_{θ_f}.
pub fn synth_circle_continuous(
    p0: BlochPoint,
    pf: BlochPoint,
    params: SystemParams,
    t0: f64,
    n: u32,
) -> Result<SynthesisResult> {
    check_t0(t0)?;
    if n == 0 {
        return Err(Error::Parameter("envelope order n must be >= 1".into()));
    }
    if p0 == pf {
        return identity_result(
            pf,
            params,
            t0,
            silence_from(t0),
            TargetSet::Circle,
            ControlClass::BoundedContinuous,
        );
    }
    envelope_result(p0, pf, params, t0, n, None)
}

/// Minimal integer exceeding the case threshold 8ω₀/g₀ (cases 1, 3) or
/// 2ω₀/g₀ (cases 2, 4).
pub fn default_envelope_order(case: TransferCase, params: &SystemParams) -> u32 {
    let factor = if case.reduced_angle() { 2.0 } else { 8.0 };
    let threshold = factor * params.omega0 / params.g0;
    let n = threshold.floor() + 1.0;
    if n > f64::from(u32::MAX) {
        u32::MAX
    } else {
        n as u32
    }
}

/// Envelope transfer certified to finish within `ts`.
///
/// Errors with [`Error::TimeBudgetInfeasible`] when `ts` is below
/// 4π/g₀ + 8π/ω₀. That only means the sufficient condition fails.
pub fn synth_circle_within_budget(
    p0: BlochPoint,
    pf: BlochPoint,
    params: SystemParams,
    t0: f64,
    ts: f64,
) -> Result<SynthesisResult> {
    let required = transition_time_bound(None, &params, ControlClass::BoundedContinuous);
    if !(ts >= required) {
        return Err(Error::TimeBudgetInfeasible {
            budget: ts,
            required,
        });
    }
    synth_circle_by_case(p0, pf, params, t0)
}

/// The case-dispatched envelope construction without the budget check.
pub fn synth_circle_by_case(
    p0: BlochPoint,
    pf: BlochPoint,
    params: SystemParams,
    t0: f64,
) -> Result<SynthesisResult> {
    check_t0(t0)?;
    let case = TransferCase::classify(&p0, &pf);
    if p0 == pf {
        let mut res = identity_result(
            pf,
            params,
            t0,
            silence_from(t0),
            TargetSet::Circle,
            ControlClass::BoundedContinuous,
        )?;
        res.claimed_bound = Some(case_time_bound(case, &params));
        return Ok(res);
    }
    let n = default_envelope_order(case, &params);
    envelope_result(p0, pf, params, t0, n, Some(case))
}

/// Per-case bound on t_f − t₀ for the time-budgeted envelope transfer.
pub fn case_time_bound(case: TransferCase, params: &SystemParams) -> f64 {
    let (w, g0) = (params.omega0, params.g0);
    match case {
        TransferCase::One => 4.0 * PI / g0 + 8.0 * PI / w,
        TransferCase::Two => PI / g0 + 8.0 * PI / w,
        TransferCase::Three => 4.0 * PI / g0 + 6.0 * PI / w,
        TransferCase::Four => PI / g0 + 6.0 * PI / w,
    }
}

/// Sufficient transfer-time bound.
///
/// Without a case: 4π/g₀ + 8π/ω₀ for continuous controls, and
/// min(π/g₀ + 8π/ω₀, 4π/g₀ + 6π/ω₀) for bounded ones. With a case, the
/// per-case bound, tightened by the bounded-class bound when applicable.
pub fn transition_time_bound(
    case: Option<TransferCase>,
    params: &SystemParams,
    class: ControlClass,
) -> f64 {
    let (w, g0) = (params.omega0, params.g0);
    let global = match class {
        ControlClass::BoundedContinuous => 4.0 * PI / g0 + 8.0 * PI / w,
        ControlClass::Bounded => (PI / g0 + 8.0 * PI / w).min(4.0 * PI / g0 + 6.0 * PI / w),
        ControlClass::Unbounded => f64::INFINITY,
    };
    match case {
        None => global,
        Some(c) => case_time_bound(c, params).min(global),
    }
}

/// Lower bound on k from the energy budget.
pub fn energy_k_lower(p0: &BlochPoint, pf: &BlochPoint, omega0: f64, es: f64) -> f64 {
    let c = 0.5 * (p0.theta() + pf.theta());
    omega0 * PI * c.sin().powi(2) / (2.0 * es) + (pf.phi() - p0.phi()) / TAU - 0.5 * c.cos()
}

/// Upper bound on k from the time budget.
pub fn time_k_upper(p0: &BlochPoint, pf: &BlochPoint, omega0: f64, ts: f64) -> f64 {
    let c = 0.5 * (p0.theta() + pf.theta());
    (ts * omega0 + pf.phi() - p0.phi() - PI * c.cos()) / TAU
}

/// Every integer k for which the resonant transfer meets both the time
/// budget `ts` and the energy budget `es` with a positive phase budget φ_k.
pub fn feasible_k_time_energy(
    p0: &BlochPoint,
    pf: &BlochPoint,
    params: &SystemParams,
    ts: f64,
    es: f64,
) -> Result<Vec<i64>> {
    if !(ts > 0.0 && ts.is_finite()) || !(es > 0.0 && es.is_finite()) {
        return Err(Error::Parameter(format!(
            "time and energy budgets must be positive and finite (ts = {ts}, es = {es})"
        )));
    }
    let lo = energy_k_lower(p0, pf, params.omega0, es).ceil();
    let hi = time_k_upper(p0, pf, params.omega0, ts).floor();
    if hi < lo {
        return Ok(Vec::new());
    }
    // The real-valued bounds decide the range; each k is then re-checked on
    // the closed-form time and energy so boundary equalities that round the
    // wrong way are dropped.
    Ok(((lo as i64)..=(hi as i64))
        .filter(|&k| {
            if resonant_phase_budget(p0, pf, k) <= 0.0 {
                return false;
            }
            let parts = resonant_parts(p0, pf, params.omega0, k);
            parts.duration <= ts && parts.g * parts.g * parts.duration <= es
        })
        .collect())
}

/// Resonant transfer with the smallest k admitted by the time and energy
/// budgets, then free drift. The amplitude is not bounded; `soft_bound`
/// only flags designs whose g exceeds it.
pub fn synth_time_energy(
    p0: BlochPoint,
    pf: BlochPoint,
    params: SystemParams,
    t0: f64,
    ts: f64,
    es: f64,
    soft_bound: Option<f64>,
) -> Result<SynthesisResult> {
    check_t0(t0)?;
    let ks = feasible_k_time_energy(&p0, &pf, &params, ts, es)?;
    let mut chosen = None;
    for &k in &ks {
        let res = resonant_result(p0, pf, params, t0, k, Tail::Drift, ControlClass::Unbounded)?;
        let energy = crate::pulse::pulse_energy(&res.pulse, res.t0, res.t_f)?;
        if res.t_f - res.t0 <= ts && energy <= es {
            chosen = Some(res);
            break;
        }
    }
    let Some(mut res) = chosen else {
        return Err(Error::TimeEnergyInfeasible { ts, es });
    };
    if let Design::ResonantTransfer {
        g,
        feasible_k,
        exceeds_soft_bound,
        ..
    } = &mut res.design
    {
        *exceeds_soft_bound = soft_bound.is_some_and(|b| *g > b);
        *feasible_k = Some(ks);
    }
    Ok(res)
}
