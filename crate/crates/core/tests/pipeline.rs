// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_PI_2, PI};

use qstab_core::logical::{self, EM_TOLERANCE};
use qstab_core::synth::{self, ControlClass, Design};
use qstab_core::verify::{self, Budgets, VerifyOptions};
use qstab_core::{BlochPoint, Error, SystemParams};

fn pt(t: f64, p: f64) -> BlochPoint {
    BlochPoint::new(t, p).unwrap()
}

#[test]
fn point_hold_from_equator_to_pole() {
    let params = SystemParams::new(1.0, 0.1).unwrap();
    let res = synth::synth_point_hold(pt(FRAC_PI_2, 0.0), pt(0.0, 0.0), params, 0.0).unwrap();
    assert!(matches!(res.design, Design::ResonantTransfer { k: 4, .. }));
    let rep = verify::verify_synthesis(&res, Budgets::default(), &VerifyOptions::default()).unwrap();
    assert!(rep.overall, "{:?}", rep.checks);
    // the resonant/hold junction is a jump
    assert!(!verify::check_continuity(&res.pulse).pass);
}

#[test]
fn continuous_transfer_with_nonzero_start_time() {
    let params = SystemParams::new(3.0, 1.2).unwrap();
    let res = synth::synth_circle_continuous(pt(2.5, 0.2), pt(0.6, 4.0), params, 7.25, 4).unwrap();
    let rep = verify::verify_synthesis(&res, Budgets::default(), &VerifyOptions::default()).unwrap();
    assert!(rep.overall, "{:?}", rep.checks);
}

#[test]
fn budget_too_small_is_reported() {
    let params = SystemParams::new(1.0, 0.5).unwrap();
    let err = synth::synth_circle_within_budget(pt(0.1, 0.0), pt(2.0, 0.0), params, 0.0, 10.0).unwrap_err();
    match err {
        Error::TimeBudgetInfeasible { budget, required } => {
            assert_eq!(budget, 10.0);
            assert!((required - (8.0 * PI + 8.0 * PI)).abs() < 1e-12);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn time_energy_budget_violation_fails_verification() {
    let params = SystemParams::new(1.0, 1.0).unwrap();
    let res = synth::synth_time_energy(pt(1.0, 0.0), pt(2.0, 3.0), params, 0.0, 7.0 * PI, PI, None).unwrap();
    let ok = verify::verify_synthesis(&res, Budgets { time: Some(7.0 * PI), energy: Some(PI) }, &VerifyOptions::default()).unwrap();
    assert!(ok.overall, "{:?}", ok.checks);
    let tight = Budgets { time: Some(0.5 * (res.t_f - res.t0)), energy: Some(1e-6) };
    let bad = verify::verify_synthesis(&res, tight, &VerifyOptions::default()).unwrap();
    assert!(!bad.overall);
    let failed: Vec<_> = bad.failures().map(|c| c.name.as_str()).collect();
    assert_eq!(failed, ["time_budget", "energy_budget"]);
}

#[test]
fn entangler_from_logical_zero_under_continuous_budget() {
    let params = SystemParams::new(1.0, 1.0).unwrap();
    let s0 = logical::embed_logical(BlochPoint::north());
    let ts = PI / params.g0 + 2.0 * PI / params.omega0;
    let res = logical::synth_entangler(&s0, params, 0.0, Some(ts), ControlClass::BoundedContinuous).unwrap();
    let rep = verify::verify_entangler(&res, Budgets { time: Some(ts), energy: None }, &VerifyOptions::default()).unwrap();
    assert!(rep.overall, "{:?}", rep.checks);
    assert!(rep.check("concurrence").unwrap().measured >= 1.0 - 1e-6);

    let dt = logical::default_logical_dt(&params);
    let traj = logical::oracle_propagate_two_qubit(&res.lifted, &s0, &params, dt, res.t_f()).unwrap();
    let [a, b] = logical::project_logical(traj.final_state()).unwrap();
    assert!((a.norm() - 0.5f64.sqrt()).abs() < 1e-6 && (b.norm() - 0.5f64.sqrt()).abs() < 1e-6);
    assert!(logical::em_membership(traj.final_state(), EM_TOLERANCE).unwrap());
}

#[test]
fn bounded_entangler_meets_its_bound() {
    let params = SystemParams::new(2.0, 0.5).unwrap();
    let s0 = logical::embed_logical(pt(2.7, 1.0));
    let bound = (PI / (4.0 * params.g0) + 2.0 * PI / params.omega0).min(PI / params.g0 + 1.5 * PI / params.omega0);
    let res = logical::synth_entangler(&s0, params, 0.0, Some(bound), ControlClass::Bounded).unwrap();
    assert!(res.t_f() - res.t0() <= bound);
    let rep = verify::verify_entangler(&res, Budgets::default(), &VerifyOptions::default()).unwrap();
    assert!(rep.overall, "{:?}", rep.checks);
}
