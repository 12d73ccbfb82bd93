// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qstab::files::PulseFile;
use tempfile::TempDir;

fn qstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qstab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_point_reference_example() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("pulse.json");
    let o = qstab(&[
        "synth-point", "--theta0", "1.5708", "--phi0", "0", "--thetaf", "0", "--phif", "0",
        "--omega0", "1", "--g0", "0.1", "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["synthesis"]["design"]["k"], 4);
    assert_eq!(v["segments"][0]["kind"], "resonant");
    assert!(v["segments"][1]["t_end"].is_null());
}

#[test]
fn equator_target_is_rejected_with_exit_2() {
    let o = qstab(&[
        "synth-point", "--theta0", "0", "--phi0", "0", "--thetaf", "1.5708", "--phif", "0",
        "--omega0", "1", "--g0", "0.1",
    ]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("not point-stabilizable"), "{err}");
    assert!(err.contains("max(|sin(phi_f)|"), "{err}");
}

#[test]
fn region_column_measure() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("region.csv");
    let o = qstab(&["region", "--ratio", "1", "--res", "512", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["theta", "phi", "stabilizable"]);
    let (mut total, mut hits) = (0usize, 0usize);
    let mut rows = 0usize;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        rows += 1;
        if rec[1].parse::<f64>().unwrap() == 0.0 {
            total += 1;
            hits += usize::from(&rec[2] == "true");
        }
    }
    assert_eq!(rows, 512 * 512);
    let frac = hits as f64 / total as f64;
    assert!((frac - 0.5).abs() <= 1.0 / 512.0, "{frac}");
}

fn synth_from_config(command: &str, config: &str, out: &Path) -> Output {
    let cfg = configs().join(config);
    qstab(&[command, "--config", s(&cfg), "--out", s(out)])
}

const SHIPPED: [(&str, &str); 8] = [
    ("synth-point", "point_hold.toml"),
    ("synth-point", "point_hold_tilted.toml"),
    ("synth-circle", "circle_continuous.toml"),
    ("synth-circle", "circle_budget.toml"),
    ("synth-circle", "circle_bounded.toml"),
    ("time-energy", "time_energy.toml"),
    ("entangle", "entangler.toml"),
    ("entangle", "entangler_bounded.toml"),
];

#[test]
fn shipped_configs_synthesize_and_verify() {
    let dir = TempDir::new().unwrap();
    for (command, config) in SHIPPED {
        let pulse = dir.path().join(format!("{config}.json"));
        let o = synth_from_config(command, config, &pulse);
        assert_eq!(code(&o), 0, "{command} {config}: {}", stderr(&o));
        let report = dir.path().join(format!("{config}.report.json"));
        let o = qstab(&["verify", "--pulse", s(&pulse), "--out", s(&report)]);
        assert_eq!(code(&o), 0, "verify {config}: {}", stderr(&o));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        assert_eq!(v["overall"], true);
    }
}

#[test]
fn pulse_json_round_trips_byte_identically() {
    let dir = TempDir::new().unwrap();
    for (command, config) in SHIPPED {
        let pulse = dir.path().join(format!("{config}.json"));
        assert_eq!(code(&synth_from_config(command, config, &pulse)), 0);
        let text = std::fs::read_to_string(&pulse).unwrap();
        let file = PulseFile::from_json(&text).unwrap();
        assert_eq!(file.to_json().unwrap(), text, "{config}");
    }
}

#[test]
fn simulate_writes_trajectory_csv() {
    let dir = TempDir::new().unwrap();
    let pulse = dir.path().join("p.json");
    assert_eq!(code(&synth_from_config("synth-circle", "circle_continuous.toml", &pulse)), 0);
    let traj = dir.path().join("t.csv");
    let o = qstab(&["simulate", "--pulse", s(&pulse), "--t-horizon", "1", "--out", s(&traj)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(&traj).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["t", "re0", "im0", "re1", "im1", "theta", "phi", "ux", "uy"]);
    let last = rdr.records().last().unwrap().unwrap();
    // one time unit after t_f the state is still on the target circle
    assert!((last[5].parse::<f64>().unwrap() - 2.0).abs() < 1e-6);

    let pulse = dir.path().join("e.json");
    assert_eq!(code(&synth_from_config("entangle", "entangler.toml", &pulse)), 0);
    let o = qstab(&["simulate", "--pulse", s(&pulse), "--integrator", "rk4", "--t-horizon", "0.5", "--out", s(&traj)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(&traj).unwrap();
    assert_eq!(rdr.headers().unwrap().len(), 1 + 8 + 4);
    let last = rdr.records().last().unwrap().unwrap();
    assert!((last[9].parse::<f64>().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
}

#[test]
fn failed_verification_exits_2() {
    let dir = TempDir::new().unwrap();
    let pulse = dir.path().join("p.json");
    assert_eq!(code(&synth_from_config("synth-point", "point_hold.toml", &pulse)), 0);
    let o = qstab(&["verify", "--pulse", s(&pulse), "--ts", "1.0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("time_budget"));
}

#[test]
fn infeasible_budgets_exit_2() {
    let o = qstab(&[
        "synth-circle", "--omega0", "1", "--g0", "0.5", "--theta0", "0.1", "--phi0", "0", "--thetaf", "2",
        "--phif", "0", "--ts", "10",
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let o = qstab(&[
        "time-energy", "--omega0", "1", "--g0", "1", "--theta0", "0.1", "--phi0", "0", "--thetaf", "2",
        "--phif", "0", "--ts", "0.1", "--es", "1",
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let o = qstab(&["entangle", "--omega0", "1", "--g0", "1", "--theta0", "0", "--phi0", "0", "--ts", "1"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn usage_and_validation_errors_exit_1() {
    assert_eq!(code(&qstab(&["synth-point", "--bogus"])), 1);
    assert_eq!(code(&qstab(&["no-such-command"])), 1);
    assert_eq!(code(&qstab(&[])), 1);
    // missing values
    assert_eq!(code(&qstab(&["synth-point", "--omega0", "1"])), 1);
    // out-of-range angle and non-positive frequency
    let base = ["synth-point", "--g0", "1", "--theta0", "0", "--phi0", "0", "--thetaf", "0"];
    let mut a = base.to_vec();
    a.extend(["--omega0", "1", "--phif", "7"]);
    assert_eq!(code(&qstab(&a)), 1);
    let mut a = base.to_vec();
    a.extend(["--omega0", "-1", "--phif", "0"]);
    assert_eq!(code(&qstab(&a)), 1);
    // unreadable and malformed files
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&qstab(&["verify", "--pulse", s(&missing)])), 1);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"version\": 1, \"params\": ").unwrap();
    let o = qstab(&["verify", "--pulse", s(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("bad.json"));
    // structurally valid JSON with a broken schedule
    std::fs::write(
        &bad,
        r#"{"version": 1, "params": {"omega0": 1.0, "g0": 1.0}, "segments": [
            {"kind": "silence", "t_start": 0.0, "t_end": 1.0},
            {"kind": "silence", "t_start": 2.0, "t_end": null}]}"#,
    )
    .unwrap();
    assert_eq!(code(&qstab(&["simulate", "--pulse", s(&bad), "--theta0", "0", "--phi0", "0"])), 1);
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "omega0 = 1.0\nunknown_key = 3\n").unwrap();
    assert_eq!(code(&qstab(&["region", "--config", s(&cfg), "--ratio", "1"])), 1);
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(code(&qstab(&["--help"])), 0);
    assert_eq!(code(&qstab(&["--version"])), 0);
    assert_eq!(code(&qstab(&["synth-circle", "--help"])), 0);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        assert_eq!(code(&synth_from_config("synth-circle", "circle_budget.toml", p)), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (ra, rb) = (dir.path().join("ra.json"), dir.path().join("rb.json"));
    for r in [&ra, &rb] {
        assert_eq!(code(&qstab(&["verify", "--pulse", s(&a), "--out", s(r)])), 0);
    }
    assert_eq!(std::fs::read(&ra).unwrap(), std::fs::read(&rb).unwrap());
}

#[test]
fn in_process_entry_point_matches_binary() {
    assert_eq!(qstab::run_cli(["qstab", "--version"]), 0);
    assert_eq!(qstab::run_cli(["qstab", "region", "--bogus"]), 1);
}
