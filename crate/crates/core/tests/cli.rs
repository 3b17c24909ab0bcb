use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use plaplace::RunConfig;
use tempfile::TempDir;

const CUBIC: &str = r#"{"problem": {"p": 2.0, "f": {"sign_power_sum": [{"a": 1.0, "l": 3.0}]}}}"#;
const LINEAR: &str =
    r#"{"problem": {"p": 2.0, "f": {"sign_power_sum": [{"a": 1.0, "l": 1.0}]}}, "params": {"n_max": 2}}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plaplace"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn eigs_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "lin.json", LINEAR);
    let text = stdout(&run(&["eigs"], &cfg));
    assert!(text.starts_with("n,lambda,residual\n"));
    assert!(!text.contains('\r'));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 3);
    let pi = std::f64::consts::PI;
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0], k.to_string());
        let lambda: f64 = row[1].parse().unwrap();
        let exact = ((k + 1) as f64 * pi).powi(2);
        assert!((lambda - exact).abs() < 1e-7 * exact, "{lambda} vs {exact}");
        // 17 significant digits
        assert_eq!(row[1].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    }

    let one = stdout(&run(&["eigs", "--n-max", "0"], &cfg));
    assert_eq!(csv_rows(&one).len(), 1);

    let json = stdout(&run(&["eigs", "--format", "json"], &cfg));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(v[2]["zero_count"], 2);
}

#[test]
fn malformed_config_names_the_field() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"problem": {"p": 2.0, "f": {"sign_power_sum": [{"a": "x", "l": 3.0}]}}}"#,
    );
    let out = run(&["eigs"], &bad);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("problem.f"), "{err}");

    let unknown = write(
        &dir,
        "unknown.json",
        r#"{"problem": {"p": 2.0, "f": {"sinh": {"a": 1, "b": 1}}}, "parms": {}}"#,
    );
    let out = run(&["solve"], &unknown);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parms"));

    let invalid = write(
        &dir,
        "invalid.json",
        r#"{"problem": {"p": 0.5, "f": {"sinh": {"a": 1, "b": 1}}}}"#,
    );
    assert_eq!(run(&["classify"], &invalid).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["eigs"], &missing).status.code(), Some(2));
}

#[test]
fn solve_writes_profile_and_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "cubic.json", CUBIC);
    let profile = dir.path().join("profile.csv");
    let out = run(&["solve", "--n", "2", "--out", profile.to_str().unwrap()], &cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&profile).unwrap();
    assert!(text.starts_with("x,y,yprime,z,energy\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 201);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("profile.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["n"], 2);
    assert_eq!(summary["zero_count"], 2);
    let zeros = summary["zeros"].as_array().unwrap();
    assert!((zeros[0].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-4);
    assert!(summary["bc_residual"].as_f64().unwrap() <= 1e-8);
    // the profile changes sign exactly twice
    let ys: Vec<f64> = rows[1..200].iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(ys.windows(2).filter(|w| w[0] * w[1] < 0.0).count(), 2);

    let json = stdout(&run(&["solve", "--format", "json"], &cfg));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["zero_count"], 0);
    assert_eq!(v["profile"].as_array().unwrap().len(), 201);
}

#[test]
fn solve_writes_the_angle_path_when_asked() {
    let dir = TempDir::new().unwrap();
    let angles = dir.path().join("angles.csv");
    let text = format!(
        r#"{{"problem": {{"p": 3.0, "f": {{"sign_power_sum": [{{"a": 1.0, "l": 4.0}}]}}}}, "output": {{"angle_path": {:?}}}}}"#,
        angles.to_str().unwrap()
    );
    let cfg = write(&dir, "p3.json", &text);
    let out = run(&["solve", "--n", "1"], &cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&angles).unwrap();
    assert!(csv.starts_with("x,theta,r\n"));
    let rows = csv_rows(&csv);
    let last: f64 = rows.last().unwrap()[1].parse().unwrap();
    let pi_p = plaplace::pi_p(3.0).unwrap();
    assert!((last - 2.0 * pi_p).abs() < 1e-7);
}

#[test]
fn missing_bracket_exits_with_four() {
    let dir = TempDir::new().unwrap();
    // c = 25 lies between λ₀ = π² and λ₁ = 4π²
    let cfg = write(
        &dir,
        "pinched.json",
        r#"{"problem": {"p": 2.0, "f": {"sign_power_sum": [{"a": 25.0, "l": 1.0}]}}}"#,
    );
    let out = run(&["solve", "--n", "1"], &cfg);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no-nontrivial"), "{err}");

    let verdicts: serde_json::Value = serde_json::from_str(&stdout(&run(&["classify", "--n-max", "2"], &cfg))).unwrap();
    for v in verdicts.as_array().unwrap() {
        assert_eq!(v["verdict"], "no-nontrivial");
        assert_eq!(v["witness"]["ratio_bounds"]["source"], "numerical-grid");
    }
    let table = stdout(&run(&["classify", "--n-max", "1", "--format", "csv"], &cfg));
    assert!(table.starts_with("n,verdict,lambda_n,hypothesis\n"));
    assert!(csv_rows(&table).iter().all(|r| r[1] == "no-nontrivial"));
}

#[test]
fn sweep_of_homogeneous_problem_is_flat() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "hom.json",
        r#"{"problem": {"p": 2.5, "f": {"sign_power_sum": [{"a": 4.0, "l": 1.5}]}},
            "bc": {"alpha": {"value": 0.3}, "beta": {"pi_p_fraction": 0.6}},
            "params": {"rho_grid": {"log_space": {"min": 0.01, "max": 100.0, "count": 9}}}}"#,
    );
    let text = stdout(&run(&["sweep"], &cfg));
    assert!(text.starts_with("rho,terminal_angle,zero_count,error\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 9);
    let first: f64 = rows[0][1].parse().unwrap();
    for r in &rows {
        assert!((r[1].parse::<f64>().unwrap() - first).abs() < 1e-8);
        assert_eq!(r[2], rows[0][2]);
        assert_eq!(r[3], "");
    }
}

#[test]
fn dump_config_round_trips() {
    let dir = TempDir::new().unwrap();
    let text = r#"{
        "problem": {
            "p": 2.7,
            "q": {"polynomial": [0.5, -1.0, 0.25]},
            "w": {"trig": {"a": 2.0, "b": 0.3, "c": -0.1, "omega": 4.0}},
            "f": {"sinh": {"a": 1.5, "b": 0.5}}
        },
        "bc": {"alpha": {"pi_p_fraction": 0.25}, "beta": {"value": 1.0}},
        "params": {"n": 1, "ratio_bounds": [0.0, 5.0]}
    }"#;
    let cfg = write(&dir, "full.json", text);
    let dumped = stdout(&run(&["dump-config", "--n-max", "7"], &cfg));
    let original = RunConfig::from_json(text).unwrap();
    let back = RunConfig::from_json(&dumped).unwrap();
    assert_eq!(back.params.n_max, 7);
    assert_eq!(back.problem, original.problem);
    assert_eq!(back.bc, original.bc);
    let (a, b) = (original.build().unwrap(), back.build().unwrap());
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    // dumping the dump is a fixed point
    let again = write(&dir, "again.json", &dumped);
    assert_eq!(stdout(&run(&["dump-config"], &again)), dumped);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "cubic.json", CUBIC);
    for args in [
        &["eigs"][..],
        &["solve", "--n", "1"],
        &["sweep"],
        &["classify", "--n-max", "2"],
    ] {
        let a = run(args, &cfg);
        let b = run(args, &cfg);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
