use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sdcsim::{reference_scenario, to_json};

fn sdcsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdcsim")).args(args).env_remove("SDCSIM_OUT_DIR").output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Reference scene cut down to 60 snapshots, with the obstacle crossing the
/// TRP 3 line of sight inside that window.
fn short_scenario(dir: &Path) -> String {
    let mut s = reference_scenario();
    s.snapshots = 60;
    let o = s.obstacle.as_mut().unwrap();
    o.move_start = 0;
    o.move_end = 60;
    o.start.x = 13.0;
    o.end.x = 17.0;
    let path = dir.join("short.json");
    fs::write(&path, to_json(&s)).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn reference_scenario_validates() {
    let dir = tempfile::tempdir().unwrap();
    let out = sdcsim(&["reference-scenario"]);
    assert!(out.status.success());
    let path = dir.path().join("reference.json");
    fs::write(&path, &out.stdout).unwrap();
    let v = sdcsim(&["validate", path.to_str().unwrap()]);
    assert!(v.status.success(), "{}", stderr(&v));
    assert!(String::from_utf8_lossy(&v.stdout).contains("6 TRPs, 11 clusters, 1000 snapshots"));
}

#[test]
fn invalid_trp_is_named_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = reference_scenario();
    s.trps[2].position.x = 31.0;
    let path = dir.path().join("bad.json");
    fs::write(&path, to_json(&s)).unwrap();
    let out = sdcsim(&["validate", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("trps[2].position") && err.contains("TRP 3"), "{err}");
}

#[test]
fn malformed_json_reports_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let text = to_json(&reference_scenario()).replacen("\"seed\"", "\"sed\"", 1);
    let path = dir.path().join("typo.json");
    fs::write(&path, text).unwrap();
    let out = sdcsim(&["simulate", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("sed"), "{}", stderr(&out));
}

#[test]
fn unknown_trp_fails() {
    let out = sdcsim(&["cir", "--trp", "9", "--snapshot", "0", "--out", "/nonexistent"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("no TRP with id 9"), "{}", stderr(&out));
}

#[test]
fn simulate_is_deterministic_and_writes_one_trace_per_trp() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = short_scenario(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = sdcsim(&["simulate", &scenario, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for trp in 1..=6 {
        let name = format!("trace_trp{trp}.csv");
        let x = fs::read_to_string(a.join(&name)).unwrap();
        assert_eq!(x, fs::read_to_string(b.join(&name)).unwrap(), "{name}");
        let mut lines = x.lines();
        assert!(lines.next().unwrap().starts_with("# scenario="));
        assert_eq!(lines.next().unwrap(), sdcsim::output::TRACE_HEADER);
        assert_eq!(lines.count(), 60);
    }
    let trace3 = fs::read_to_string(a.join("trace_trp3.csv")).unwrap();
    assert!(trace3.lines().any(|l| l.ends_with(",1")), "obstacle never blocks TRP 3");
}

#[test]
fn out_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = short_scenario(dir.path());
    let target = dir.path().join("env-out");
    let o = Command::new(env!("CARGO_BIN_EXE_sdcsim"))
        .args(["simulate", &scenario])
        .env("SDCSIM_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(target.join("trace_trp1.csv").exists());
}

#[test]
fn seed_flag_changes_only_random_fields() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = short_scenario(dir.path());
    let run = |seed: &str| {
        let o = sdcsim(&["trace", &scenario, "--trp", "1", "--seed", seed]);
        assert!(o.status.success(), "{}", stderr(&o));
        String::from_utf8(o.stdout).unwrap()
    };
    let (x, y) = (run("1"), run("2"));
    assert_ne!(x, y);
    for (l, m) in x.lines().skip(2).zip(y.lines().skip(2)) {
        let (l, m): (Vec<_>, Vec<_>) = (l.split(',').collect(), m.split(',').collect());
        assert_eq!((l[0], l[1], l[5], l[6]), (m[0], m[1], m[5], m[6]));
    }
}

#[test]
fn cir_dump_of_the_blocked_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let o = sdcsim(&["cir", "--trp", "3", "--snapshot", "726", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cir = fs::read_to_string(dir.path().join("cir_trp3_s726.csv")).unwrap();
    let profile = fs::read_to_string(dir.path().join("profile_trp3_s726.csv")).unwrap();
    let los = cir.lines().find(|l| l.split(',').nth(1) == Some("los")).unwrap();
    assert!(los.ends_with(",1"), "LOS should be blocked: {los}");
    assert_eq!(cir.lines().filter(|l| l.contains(",sdc_diffraction,")).count(), 6);
    assert_eq!(profile.lines().nth(1).unwrap(), sdcsim::output::PROFILE_HEADER);
    assert!(profile.lines().count() > 100);
}

#[test]
fn position_writes_one_row_per_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = short_scenario(dir.path());
    let out = dir.path().join("pos.csv");
    let o = sdcsim(&["position", &scenario, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("median="));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), sdcsim::output::POSITION_HEADER);
    assert_eq!(text.lines().count(), 62);
}
