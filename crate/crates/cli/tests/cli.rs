use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_newton-ensemble"));
    cmd.env_remove("NEWTON_ENSEMBLE_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_polytope(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn square(dir: &TempDir) -> String {
    write_polytope(dir.path(), "square.json", r#"{"vertices": [[0,0],[1,0],[0,1],[1,1]]}"#).display().to_string()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn info_reports_the_square() {
    let dir = TempDir::new().unwrap();
    let v = json_of(&run(&["info", "--polytope", &square(&dir), "--deterministic"]));
    let r = &v["result"];
    assert_eq!(r["p"], 2);
    assert_eq!(r["volume"], "1");
    assert_eq!(r["delzant"]["is_delzant"], true);
    assert_eq!(r["facets"].as_array().unwrap().len(), 4);
    assert_eq!(r["faces"].as_array().unwrap().len(), 9);
    assert_eq!(r["boundary"]["exterior_length"], 2);
    assert_eq!(v["provenance"]["command"], "info");
    assert!(v["provenance"].get("timestamp").is_none());
}

#[test]
fn converge_approaches_the_decay_rate() {
    let dir = TempDir::new().unwrap();
    let out = run(&["converge", "--polytope", &square(&dir), "--s", "0,1.386", "--Nmax", "200", "--deterministic"]);
    assert!(out.status.success());
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 200);
    let target = (9.0f64 / 8.0).ln();
    let last = &rows[199];
    let b: f64 = last[3].parse().unwrap();
    let rate: f64 = last[2].parse().unwrap();
    assert!((b - target).abs() < 2e-3, "b = {b}");
    let first_gap = (rows[9][2].parse::<f64>().unwrap() - b).abs();
    assert!((rate - b).abs() < first_gap);
    assert!((rate - b).abs() < 0.05);
}

#[test]
fn mass_grid_has_the_quarter_normalization() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("mass.csv");
    let out = run(&[
        "mass", "--polytope", &square(&dir), "--N", "100", "--grid", "-3:3:61x-3:3:61", "-o", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("# newton-ensemble "));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 61 * 61);
    // s = (-3, -3) lies in the allowed region, where the quarter density tends to 1
    let q: f64 = rows[0][4].parse().unwrap();
    assert!((q - 1.0).abs() < 0.02, "{q}");
    let ok = run(&["validate", out_path.to_str().unwrap()]);
    assert!(ok.status.success());
}

#[test]
fn deterministic_output_is_byte_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let poly = square(&dir);
    let args = ["mc-zeros", "--polytope", &poly, "--N", "2", "--trials", "6", "--seed", "9", "--deterministic"];
    let one = bin().args(args).arg("--threads").arg("1").output().unwrap();
    let four = bin().args(args).env("NEWTON_ENSEMBLE_THREADS", "4").output().unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let v: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["provenance"]["seed"], 9);
    assert_eq!(v["result"]["expected_count"], 8);
}

#[test]
fn timestamp_only_without_deterministic() {
    let dir = TempDir::new().unwrap();
    let out = run(&["regions", "--polytope", &square(&dir), "--grid", "-1:1:3x-1:1:3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# timestamp: ")));
    assert_eq!(csv_rows(&text).len(), 9);
}

#[test]
fn every_emitted_file_validates() {
    let dir = TempDir::new().unwrap();
    let poly = square(&dir);
    let path = |n: &str| dir.path().join(n).display().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["regions", "--polytope", &poly, "--grid", "-2:2:4x-2:2:4", "-o", &path("r.csv")],
        vec!["regions", "--polytope", &poly, "--grid", "-2:2:4x-2:2:4", "--format", "json", "-o", &path("r.json")],
        vec!["decay", "--polytope", &poly, "--s", "0,2", "--action-steps", "200", "-o", &path("d.json")],
        vec!["mass", "--polytope", &poly, "--N", "3", "--grid", "1:2:2x1:2:2", "--coords", "moduli", "-o", &path("m.csv")],
        vec!["mc-zeros", "--polytope", &poly, "--N", "1", "--trials", "3", "--format", "csv", "-o", &path("z.csv")],
        vec!["amoeba", "--polytope", &poly, "--N", "3", "--grid", "-2:2:5", "--format", "csv", "-o", &path("a.csv")],
        vec!["amoeba", "--polytope", &poly, "--N", "3", "--trials", "2", "-o", &path("a.json")],
        vec!["oracle-check", "--case", "square", "--grid", "-4:4:10x-4:4:10", "-o", &path("o.json")],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    for args in &runs {
        let out = bin().args(args).output().unwrap();
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let files: Vec<String> = ["r.csv", "r.json", "d.json", "m.csv", "z.csv", "a.csv", "a.json", "o.json"].map(path).to_vec();
    let out = bin().arg("validate").args(&files).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().filter(|l| l.starts_with("ok ")).count(), 8);
}

#[test]
fn decay_report_matches_the_square_closed_form() {
    let dir = TempDir::new().unwrap();
    let v = json_of(&run(&["decay", "--polytope", &square(&dir), "--s", "0,2"]));
    let (a, c) = (1.0f64, 2.0f64.exp());
    let closed = ((1.0 + a + c).powi(2) / (4.0 * c * (1.0 + a))).ln();
    assert!((v["result"]["b"].as_f64().unwrap() - closed).abs() < 1e-10);
    assert_eq!(v["result"]["region"]["face_dim"], 1);
    assert_eq!(v["result"]["psi_hessian"]["rank"], 1);
}

#[test]
fn moduli_coordinates_convert_to_s() {
    let dir = TempDir::new().unwrap();
    let poly = square(&dir);
    let by_s = json_of(&run(&["decay", "--polytope", &poly, "--s", "0,2"]));
    let r2 = 1.0f64.exp().to_string();
    let by_r = json_of(&run(&["decay", "--polytope", &poly, "--s", &format!("1,{r2}"), "--coords", "moduli"]));
    assert!((by_s["result"]["b"].as_f64().unwrap() - by_r["result"]["b"].as_f64().unwrap()).abs() < 1e-12);
    let bad = run(&["decay", "--polytope", &poly, "--s", "0,1", "--coords", "moduli"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let poly = square(&dir);
    for args in [
        vec!["regions", "--polytope", &poly, "--grid", "0:1:1x0:1:3"],
        vec!["regions", "--polytope", &poly, "--grid", "0:1:3"],
        vec!["regions", "--polytope", &poly, "--grid", "0:1x0:1:3"],
        vec!["decay", "--polytope", &poly, "--s", "0"],
        vec!["info", "--polytope", "/nonexistent/poly.json"],
        vec!["info", "--polytope", &poly, "--format", "csv"],
        vec!["mass", "--polytope", &poly, "--N", "0", "--grid", "0:1:2x0:1:2"],
        vec!["oracle-check", "--case", "hexagon"],
        vec!["mc-zeros", "--polytope", &poly],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn non_delzant_polytopes_are_limited_to_info() {
    let dir = TempDir::new().unwrap();
    let poly = write_polytope(dir.path(), "kite.json", r#"{"vertices": [[0,0],[2,0],[0,1],[1,2]]}"#);
    let poly = poly.to_str().unwrap();
    assert_eq!(run(&["info", "--polytope", poly]).status.code(), Some(2));
    let v = json_of(&run(&["info", "--polytope", poly, "--allow-non-delzant"]));
    assert_eq!(v["result"]["delzant"]["is_delzant"], false);
    let out = run(&["regions", "--polytope", poly, "--allow-non-delzant", "--grid", "0:1:2x0:1:2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_with_three() {
    // one Newton step cannot reach the boundary point of a forbidden sample
    let dir = TempDir::new().unwrap();
    let poly = square(&dir);
    let out = run(&["decay", "--polytope", &poly, "--s", "0.3,2.7", "--max-iterations", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no face accepted"));
    let bad_tol = run(&["regions", "--polytope", &poly, "--grid", "0:1:2x0:1:2", "--feasibility-tol", "-1"]);
    assert_eq!(bad_tol.status.code(), Some(2));
    let few_steps = run(&["decay", "--polytope", &poly, "--s", "0,2", "--action-steps", "4"]);
    assert_eq!(few_steps.status.code(), Some(2));
}

#[test]
fn oracle_check_reports_pass() {
    let out = run(&["oracle-check", "--case", "f3", "--deterministic"]);
    let v = json_of(&out);
    assert_eq!(v["result"]["passed"], true);
    assert_eq!(v["result"]["region_mismatches"], 0);
}

#[test]
fn validator_rejects_malformed_files() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("plain.csv", "a,b\n1,2\n"),
        ("ragged.csv", "# newton-ensemble 0.1.0\n# command: x\n# config: {}\n# seed: none\na,b\n1,2,3\n"),
        ("noprov.json", "{\"result\": 1}"),
        ("garbage.csv", "# newton-ensemble 0.1.0\n# command: x\n# config: {}\n# seed: none\na\n\"x y\"\n"),
    ];
    for (name, body) in cases {
        let path = write_polytope(dir.path(), name, body);
        let out = run(&["validate", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{name}");
    }
}
