use std::path::Path;
use std::process::{Command, Output};

use stochres_core::cli::Report;

fn stochres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stochres"))
        .args(args)
        .env_remove("STOCHRES_THREADS")
        .output()
        .expect("binary runs")
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let path = dir.join(name);
    let mut full = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--output", p]);
    let out = stochres(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(&path).unwrap()
}

#[test]
fn default_sweep_ordering_and_flags() {
    let out = stochres(&["sweep"]);
    assert!(out.status.success());
    let report = Report::parse_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(report.series.len(), 6);
    assert_eq!(report.series[0].points.len(), 61);
    let at_zero: Vec<f64> = report.series.iter().map(|s| s.points[0][1]).collect();
    assert!(at_zero.windows(2).all(|w| w[0] > w[1]), "{at_zero:?}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    let flags: Vec<bool> = stderr
        .lines()
        .map(|l| l.contains("nonmonotonic = true"))
        .collect();
    assert_eq!(flags, vec![false, false, true, true, true, true]);
}

#[test]
fn interval_prints_endpoints() {
    let out = stochres(&["interval"]);
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("theta_- = -0.955") && stderr.contains("theta_+ = 0.955"), "{stderr}");
    assert!(stderr.contains("residuals"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mc = ["mc-check", "--n", "1000000", "--seed", "42"];
    let a = run_to(dir.path(), "a.csv", &mc);
    let b = run_to(dir.path(), "b.csv", &mc);
    assert_eq!(a, b);

    let threaded: Vec<&str> = mc.iter().copied().chain(["--threads", "4"]).collect();
    assert_eq!(run_to(dir.path(), "c.csv", &threaded), a);

    let other_seed = run_to(dir.path(), "d.csv", &["mc-check", "--n", "1000", "--seed", "7"]);
    assert_ne!(other_seed, a);

    let fid = ["fidelity", "--format", "json"];
    let f1 = run_to(dir.path(), "f1.json", &fid);
    let f4 = run_to(dir.path(), "f4.json", &[&fid[..], &["--threads", "3"]].concat());
    assert_eq!(f1, f4);
}

#[test]
fn emitted_files_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = run_to(dir.path(), "s.csv", &["sweep", "--scheme", "ea", "--theta", "-1.2,0.3,1.4"]);
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(Report::parse_csv(&text).unwrap().to_csv().unwrap(), text);

    let json = run_to(dir.path(), "n.json", &["negativity", "--format", "json", "--step", "0.037"]);
    let text = String::from_utf8(json).unwrap();
    let report = Report::parse_json(&text).unwrap();
    assert_eq!(report.meta.command, "negativity");
    assert_eq!(report.x_name(), "sigma");
    assert_eq!(report.to_json().unwrap(), text);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "eta = 0.5\ntheta = [1.1]\nstop = 0.5\nformat = \"json\"\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = run_to(dir.path(), "a.json", &["sweep", "--config", cfg]);
    let r = Report::parse_json(std::str::from_utf8(&from_file).unwrap()).unwrap();
    assert_eq!(r.meta.parameters["eta"], 0.5);
    assert_eq!(r.series.len(), 1);
    assert_eq!(r.series[0].points.len(), 11);

    let flagged = run_to(dir.path(), "b.json", &["sweep", "--config", cfg, "--eta", "0.7"]);
    let r = Report::parse_json(std::str::from_utf8(&flagged).unwrap()).unwrap();
    assert_eq!(r.meta.parameters["eta"], 0.7);
    assert_eq!(r.meta.parameters["theta"], serde_json::json!([1.1]));
}

#[test]
fn invalid_configurations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "eta = 0.5\nunknown-key = 1\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["sweep", "--config", bad.to_str().unwrap()],
        vec!["sweep", "--start", "2", "--stop", "1"],
        vec!["sweep", "--step", "0"],
        vec!["sweep", "--eta", "1.5"],
        vec!["fidelity", "--eta", "0.5"],
        vec!["probe-conjecture", "--site", "receiver"],
        vec!["sweep", "--nonsense"],
        vec!["interval", "--alpha", "0"],
    ];
    for args in cases {
        let out = stochres(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn unwritable_output_exits_1() {
    let out = stochres(&["interval", "--output", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}
