use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mvop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn compute_scalar_hermite() {
    let out = mvop(&["compute", "--config", &config("scalar-hermite.toml")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["N"], 1);
    assert_eq!(json["n_max"], 8);
    for n in 1..=8 {
        let c = json["C"][n][0][0][0].as_f64().unwrap();
        assert!((c - n as f64 / 2.0).abs() < 1e-9 * n as f64, "C({n}) = {c}");
        assert!(json["C"][n][0][0][1].as_f64().unwrap().abs() < 1e-12);
    }
    assert!(json["residuals"]["recurrence"].as_f64().unwrap() < 1e-10);
}

#[test]
fn missing_field_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "bad.toml", "family = \"freud\"\nN = 2\nfreud_alpha = 1.0\n");
    let out = mvop(&["compute", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("freud_beta"));

    let path = write(&dir, "typo.toml", "family = \"hermite-alpha\"\nalpah = [1.0]\n");
    assert_eq!(mvop(&["compute", "--config", &path]).status.code(), Some(2));
    assert_eq!(
        mvop(&["compute", "--config", "/nonexistent.toml"]).status.code(),
        Some(2)
    );
}

#[test]
fn degree_budget_exits_3() {
    let out = mvop(&["compute", "--config", &config("scalar-hermite.toml"), "--n-max", "31"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree budget"));
}

#[test]
fn unknown_suite_exits_2() {
    assert_eq!(mvop(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(mvop(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn verify_string_on_hermite_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = mvop(&[
        "verify",
        "--suite",
        "string",
        "--config",
        &config("hermite-alpha.toml"),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["pass"], true);
    let checks = json["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for c in checks {
        for key in ["id", "anchor", "max_residual", "tolerance", "pass"] {
            assert!(c.get(key).is_some(), "{key} missing");
        }
    }
}

#[test]
fn verify_dpainleve_on_quartic_config() {
    let out = mvop(&["verify", "dpainleve", "--config", &config("quartic.toml")]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for c in json["checks"].as_array().unwrap() {
        assert!(c["max_residual"].as_f64().unwrap() < 1e-6);
    }
    // a matrix weight is not a quartic scalar weight
    let out = mvop(&["verify", "dpainleve", "--config", &config("freud.toml")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_check_exits_1() {
    let out = mvop(&["verify", "lax", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_csv() {
    let out = mvop(&["bench", "--n-max", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["family", "N", "n_max", "oracle_ms", "fast_ms", "max_residual"]
    );
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert!(row[5].parse::<f64>().unwrap() < 1e-8);
    }
    let out = mvop(&["bench", "--config", &config("freud.toml")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fast_hermite_json() {
    let out = mvop(&["fast-hermite", "--alpha", "1,0.7", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["H"].as_array().unwrap().len(), 5);
    assert_eq!(json["xi"][4].as_array().unwrap().len(), 2);
    assert_eq!(json["P"][4].as_array().unwrap().len(), 7);
    assert_eq!(mvop(&["fast-hermite", "--alpha", "1,-1"]).status.code(), Some(2));
}

#[test]
fn export_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = mvop(&[
        "export",
        "--config",
        &config("freud.toml"),
        "--n-max",
        "10",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let norms = std::fs::read_to_string(out_dir.join("norms.csv")).unwrap();
    assert!(norms.starts_with("n,h_1,h_2\n"));
    assert_eq!(norms.lines().count(), 12);
    let op: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("lowering.json")).unwrap()).unwrap();
    assert_eq!(op["band"], serde_json::json!([-3, 0]));
    assert!(out_dir.join("family.json").exists() && out_dir.join("raising.json").exists());
}

#[test]
fn toda_evolve_csv() {
    let out = mvop(&[
        "toda-evolve",
        "--config",
        &config("scalar-hermite.toml"),
        "--flow-j",
        "1",
        "--t",
        "0.1",
        "--h",
        "0.001",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,n,kind,i,j,re,im"));
    // the scalar Hermite chain drifts like B = -t/2 under the first flow
    let last_b0 = text
        .lines()
        .rfind(|l| l.contains(",0,B,0,0,"))
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect::<Vec<_>>();
    assert!((last_b0[0].parse::<f64>().unwrap() - 0.1).abs() < 1e-12);
    assert!((last_b0[5].parse::<f64>().unwrap() + 0.05).abs() < 1e-6);
    assert_eq!(
        mvop(&[
            "toda-evolve",
            "--config",
            &config("scalar-hermite.toml"),
            "--flow-j",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn verify_all_within_two_minutes() {
    let start = std::time::Instant::now();
    let out = mvop(&["verify", "all"]);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "{elapsed:.1} s");
    // exit 1: the literal discrete Painlevé I form fails at t = 1
    assert_eq!(out.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<_> = json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(failed, ["dpainleve.t=1.literal"]);
}
