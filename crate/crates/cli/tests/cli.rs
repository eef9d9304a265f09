use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_levelraise"));
    c.env_remove("LEVELRAISE_CACHE_DIR").env("RUST_LOG", "error");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn config(ell: u64) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", &format!("ell{ell}.toml")].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn census_first_row() {
    let o = run(&["census", "--ell", "163", "--max-v", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("n,c3,c_lambda,c_taubar,c_both,r_lambda,r_taubar,r_product,r_both"));
    assert_eq!(lines.next(), Some("1000,55,38,15,9,0.69091,0.27273,0.18843,0.16364"));
    assert_eq!(lines.next(), None);
}

#[test]
fn golden_configs_verify_and_match() {
    for ell in [163, 277, 349] {
        let o = run(&["verify-field", "--config", &config(ell)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("dimension 1"));
        let o = run(&["census", "--config", &config(ell), "--check-golden", "--jobs", "4"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&o.stderr).contains("all match"));
    }
}

#[test]
fn output_independent_of_jobs() {
    let a = run(&["census", "--ell", "277", "--max-v", "100000", "--jobs", "1"]);
    let b = run(&["census", "--ell", "277", "--max-v", "100000", "--jobs", "8"]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["census", "--ell", "277", "--max-v", "3000", "--format", "jsonl"]);
    let b = run(&["census", "--ell", "277", "--max-v", "3000", "--format", "jsonl", "--jobs", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let first = stdout(&a).lines().next().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["v"], 5);
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--p", "5", "--trials", "1000000", "--seed", "42", "--format", "csv"];
    let a = run(&args);
    let b = bin().args(args).args(["--jobs", "4"]).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    let est: f64 = s.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap();
    assert!((est - 0.8).abs() < 0.002);
}

#[test]
fn scan_lists_passing_conductors() {
    let o = run(&["scan", "--max-ell", "607"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let passing = s.lines().find(|l| l.starts_with("passing:")).unwrap();
    for ell in ["163", "277", "349", "547", "607"] {
        assert!(passing.contains(ell));
    }
}

#[test]
fn stats_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let o = run(&["census", "--ell", "163", "--max-v", "5000", "--out", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["stats", "--input", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("5,000 & 221 & 0.70588"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["census"]).status.code(), Some(2));
    assert_eq!(run(&["census", "--ell", "163", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["census", "--ell", "163", "--checkpoints", "500,100"]).status.code(), Some(2));
    assert_eq!(run(&["census", "--ell", "7", "--max-v", "100"]).status.code(), Some(1));
    assert_eq!(run(&["census", "--ell", "163", "--max-v", "700", "--check-golden"]).status.code(), Some(2));
    assert_eq!(run(&["diagonal", "--l1", "7", "--l2", "13"]).status.code(), Some(0));
    assert_eq!(run(&["diagonal", "--l1", "7", "--l2", "11"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--p", "4"]).status.code(), Some(2));
}

#[test]
fn cache_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    for _ in 0..2 {
        let o = bin().env("LEVELRAISE_CACHE_DIR", dir.path()).args(["verify-field", "--ell", "349"]).output().unwrap();
        assert_eq!(o.status.code(), Some(0));
    }
    assert!(dir.path().join("field-349.toml").exists());
}
