use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framecalc"))
        .args(args)
        .env_remove("FRAMECALC_FIXTURES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("framecalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn strip_elapsed(v: &mut serde_json::Value) {
    for s in v.as_array_mut().unwrap() {
        s.as_object_mut().unwrap().remove("elapsed_ms");
    }
}

#[test]
fn verify_appendix_a_passes() {
    let o = run(&["verify", "--suite", "appendixA"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("PASS        A.18"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(run(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["--tol", "nope=1", "verify", "--suite", "appendixA"]).status.code(), Some(2));
    let bad = scratch("bad.json", r#"{"suites": ["appendixA"], "colour": "red"}"#);
    assert_eq!(run(&["--config", bad.to_str().unwrap(), "verify"]).status.code(), Some(2));
    assert_eq!(run(&["--config", "/nonexistent/x.json", "verify"]).status.code(), Some(2));
}

#[test]
fn json_output_is_deterministic() {
    let cfg = scratch("ok.json", r#"{"suites": ["appendixB", "properties"], "seed": 7}"#);
    let args = ["--config", cfg.to_str().unwrap(), "--json", "verify"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    let mut va: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let mut vb: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    strip_elapsed(&mut va);
    strip_elapsed(&mut vb);
    assert_eq!(va, vb);
    let suites: Vec<&str> = va.as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(suites, ["appendixB", "properties"]);
    let b13 = va[0]["reports"].as_array().unwrap().iter().find(|r| r["targetId"] == "B.13").unwrap();
    assert_eq!(b13["status"], "documented-discrepancy");
}

#[test]
fn broken_fixture_fails_with_exit_1() {
    let dir = std::env::temp_dir().join(format!("framecalc-fx-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures/appendix_a.txt");
    let text = std::fs::read_to_string(src)
        .unwrap()
        .replace("A.15x = Phi^0 /\\ Phi^2 /\\ Phi^3", "A.15x = Phi^0 /\\ Phi^1 /\\ Phi^3");
    std::fs::write(dir.join("appendix_a.txt"), text).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_framecalc"))
        .args(["verify", "--suite", "appendixA"])
        .env("FRAMECALC_FIXTURES", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL        A.15x"));
}

#[test]
fn render_targets() {
    let o = run(&["render", "A.14", "--latex"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\\Phi^1"));
    let o = run(&["render", "B.20"]);
    assert!(stdout(&o).contains("g_{|0|0} e^{2g}"));
    assert_eq!(run(&["render", "bogus"]).status.code(), Some(2));
}

#[test]
fn spectra_table() {
    let o = run(&["--json", "spectra", "--Z", "1", "--model", "bohr", "--n", "1..2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let e1 = rows[0]["energy"].as_f64().unwrap();
    assert!((e1 + 13.6057).abs() < 1e-3, "{e1}");
    let o = run(&["spectra", "--model", "dirac", "--n", "2"]);
    assert!(stdout(&o).contains("diagnostic"));
    assert_eq!(run(&["spectra", "--model", "klein"]).status.code(), Some(2));
}

#[test]
fn twobody_output() {
    let o = run(&["twobody", "--m", "1", "--M", "2", "--pos", "1,0,0"]);
    assert!(stdout(&o).starts_with("acceleration (geometric): -4, 0, 0"), "{}", stdout(&o));
    let o = run(&[
        "--json", "twobody", "--m", "3", "--q", "2e-6", "--M", "7", "--Q", "-5e-6", "--pos", "0.5,-1,2", "--mks",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for i in 0..3 {
        let (a, b) = (v["force"][i].as_f64().unwrap(), v["force_direct"][i].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-12 * b.abs());
    }
}

#[test]
fn maxwell_potentials() {
    let o = run(&["maxwell", "--potential", "planewave", "--grid", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("grid points: 8"));
    // A^2 = (x^0)^2 carries the source j^2 = 2
    let p = scratch("pot.json", r#"{"A2": [{"coeff": 1.0, "powers": [2, 0, 0, 0]}]}"#);
    let o = run(&["--json", "maxwell", "--potential", p.to_str().unwrap(), "--grid", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["max_j"].as_f64().unwrap() - 2.0).abs() < 1e-9, "{v}");
    let bad = scratch("badpot.json", r#"{"A4": []}"#);
    assert_eq!(run(&["maxwell", "--potential", bad.to_str().unwrap()]).status.code(), Some(2));
}
