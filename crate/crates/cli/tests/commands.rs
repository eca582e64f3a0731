use std::process::Command;

use eulerdd::config::RunConfig;
use eulerdd::dynamics::control_propagator;
use eulerdd::pulses::eulerian_schedule;
use eulerdd::schedule_io::{import_schedule, schedule_file};
use eulerdd_cli::{cmd_export_schedule, cmd_list, cmd_sweep, cmd_verify, SWEEP_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eulerdd"))
}

fn config(text: &str) -> RunConfig {
    RunConfig::from_toml_str(text).unwrap()
}

#[test]
fn list_names_all_builtins() {
    let text = cmd_list(false);
    assert_eq!(text.lines().count(), 4);
    for name in ["carr-purcell", "pauli", "spin-flip", "symmetric-s3"] {
        assert!(text.contains(name));
    }
    let json: serde_json::Value = serde_json::from_str(&cmd_list(true)).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 4);
    assert_eq!(json[0]["name"], "carr-purcell");
}

#[test]
fn verify_exit_codes() {
    let ok = bin().args(["verify", "--scenario", "carr-purcell"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));

    let bad = bin()
        .args(["verify", "--scenario", "carr-purcell", "--delta-t", "-1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let unknown = bin().args(["verify", "--scenario", "nope"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));

    let few_slices = bin()
        .args(["verify", "--scenario", "pauli", "--slices", "4"])
        .output()
        .unwrap();
    assert_eq!(few_slices.status.code(), Some(2));
}

#[test]
fn failing_check_exits_one() {
    // Demanding a 1e6 fidelity improvement from only a single cycle fails.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        r#"
cycles = 1
[inline]
name = "z-echo"
generators = [[[0,0],[1,0],[1,0],[0,0]]]
min_fidelity_ratio = 1e6
[[inline.profiles]]
generator = 0
segments = [{ fraction = 1.0, hamiltonian = [[0,0],[1,0],[1,0],[0,0]], amplitude = 1.5707963267948966 }]
[inline.drift]
env_dim = 2
couplings = [{ s = [[1,0],[0,0],[0,0],[-1,0]], e = [[0,0],[1,0],[1,0],[0,0]] }]
"#,
    )
    .unwrap();
    let out = bin()
        .args(["verify", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(1), "{stdout}");
    assert!(stdout.contains("FAIL decoupling-fidelity"));
}

#[test]
fn verify_pauli_with_random_faults_across_seeds() {
    for seed in 0..10 {
        let report = cmd_verify(&config(&format!(
            "scenario = \"pauli\"\nseed = {seed}\nrandom_faults = 20\nfault_amplitude = 0.3"
        )))
        .unwrap();
        assert!(report.passed, "seed {seed}: {}", report.to_text(true));
    }
}

#[test]
fn json_report_is_stable_and_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let st = bin()
            .args(["verify", "--scenario", "spin-flip", "--seed", "9", "--json", "--out"])
            .arg(p)
            .status()
            .unwrap();
        assert_eq!(st.code(), Some(0));
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["structure"]["path_length"], 8);
    assert_eq!(v["passed"], true);
}

#[test]
fn sweep_emits_rows_and_slope() {
    let text = cmd_sweep(&config(
        "scenario = \"carr-purcell\"\ndelta_t = [0.02, 0.006, 0.002]",
    ))
    .unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER);
    let rows: Vec<&str> = lines.iter().copied().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3);
    let last = lines.last().unwrap();
    let slope: f64 = last.strip_prefix("# slope ").unwrap().parse().unwrap();
    assert!((slope - 2.0).abs() < 0.2, "{text}");
    let first: Vec<f64> = rows[0].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first.len(), 5);
    assert_eq!(first[0], 0.02);
    assert!((first[1] - 0.04).abs() < 1e-15);

    let again = cmd_sweep(&config(
        "scenario = \"carr-purcell\"\ndelta_t = [0.02, 0.006, 0.002]",
    ))
    .unwrap();
    assert_eq!(text, again);
}

#[test]
fn sweep_single_point_omits_slope() {
    let text = cmd_sweep(&config("scenario = \"carr-purcell\"\ndelta_t = 0.01")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 2);
    assert!(text.lines().last().unwrap().starts_with("# slope omitted"));
    assert!(cmd_sweep(&config("scenario = \"carr-purcell\"")).is_err());
}

#[test]
fn sweep_symmetric_finishes_quickly() {
    let start = std::time::Instant::now();
    let text = cmd_sweep(&config(
        "scenario = \"symmetric-s3\"\ndelta_t = [0.02, 0.01, 0.005]",
    ))
    .unwrap();
    assert!(text.contains("# slope"));
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn export_structure_and_round_trip() {
    let cp = config("scenario = \"carr-purcell\"\ndelta_t = 0.1");
    let text = cmd_export_schedule(&cp, None).unwrap();
    let (sched, rep) = import_schedule(&text).unwrap();
    let file = schedule_file(&sched, &rep).unwrap();
    assert_eq!(file.intervals.len(), 2);
    assert!(file.intervals.iter().all(|i| i.segments.len() == 1));

    let s3 = config("scenario = \"symmetric-s3\"\ndelta_t = 0.01");
    let text = cmd_export_schedule(&s3, None).unwrap();
    let (back, rep) = import_schedule(&text).unwrap();
    let file = schedule_file(&back, &rep).unwrap();
    assert_eq!(file.intervals.len(), 12);
    let scenario = s3.scenario().unwrap();
    for iv in &file.intervals {
        assert_eq!(iv.segments.len(), scenario.profiles[iv.color].segments().len());
    }
    assert!(file.intervals.iter().any(|iv| iv.segments.len() == 2));
    let orig = eulerian_schedule(&scenario.path, scenario.profiles.clone(), 0.01).unwrap();
    for l in 0..=12 {
        let t = l as f64 * 0.01;
        let d = control_propagator(&orig, t).unwrap() - control_propagator(&back, t).unwrap();
        assert!(d.norm() < 1e-12);
    }

    let faulty = cmd_export_schedule(&s3, Some("exchange-12")).unwrap();
    assert!(faulty.contains("fault_segments"));
    assert!(cmd_export_schedule(&s3, Some("missing")).is_err());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "scenario = \"carr-purcell\"\nseed = 4\n").unwrap();
    let out = bin()
        .args(["verify", "--json", "--seed", "7", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["scenario"], "carr-purcell");
}

#[test]
fn shipped_config_verifies() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/x-echo.toml");
    let cfg = RunConfig::load(std::path::Path::new(path)).unwrap();
    let report = cmd_verify(&cfg).unwrap();
    assert!(report.passed, "{}", report.to_text(true));
    assert_eq!(report.checks.len(), 7);
}
