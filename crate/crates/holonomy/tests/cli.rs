use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use holonomy::io::{read_graph_file, read_log, write_json};
use holonomy_core::Color;
use serde_json::Value;
use tempfile::TempDir;

const SMALL: &[&str] = &["--m", "3", "--levels", "3", "--diam-mult", "2", "--girth", "6", "--chord", "5", "--k", "2"];

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonomy")).current_dir(dir).args(args).output().expect("spawn")
}

fn run_env(dir: &Path, args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonomy"))
        .current_dir(dir)
        .env("HOLONOMY_THREADS", threads)
        .args(args)
        .output()
        .expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn build_small(dir: &Path, seed: &str, out: &str, log: &str) -> Output {
    let mut args = vec!["build", "--seed", seed, "--out", out, "--log", log];
    args.extend_from_slice(SMALL);
    run(dir, &args)
}

fn small_dir() -> TempDir {
    let dir = TempDir::new().unwrap();
    let o = build_small(dir.path(), "7", "graph.json", "build.json");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    dir
}

fn bytes(p: PathBuf) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = small_dir();
    let o = build_small(dir.path(), "7", "g2.json", "b2.json");
    assert_eq!(o.status.code(), Some(0));
    let p = dir.path();
    assert_eq!(bytes(p.join("graph.json")), bytes(p.join("g2.json")));
    assert_eq!(bytes(p.join("build.json")), bytes(p.join("b2.json")));
    let log = read_log(&p.join("build.json")).unwrap();
    assert_eq!(log.levels(), 3);
    assert_eq!(log.config.seed, 7);
}

#[test]
fn exponential_schedule_needs_large_m() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["build", "--m", "5", "--schedule", "paper", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("m > 10"), "{}", stderr(&o));
    assert!(!dir.path().join("graph.json").exists());
}

#[test]
fn infeasible_exponential_stage_is_a_budget_failure() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["build", "--schedule", "paper", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("stage 3"), "{}", stderr(&o));
}

#[test]
fn seed_is_mandatory() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["build", "--m", "12"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    write_json(&cfg, &serde_json::json!({"m": 4, "levels": 2, "diam_multiplier": 2, "girth": 6, "chord_span": 5, "free_radius": 2})).unwrap();
    let o = run(dir.path(), &["build", "--config", "cfg.json", "--m", "5", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let log = read_log(&dir.path().join("build.json")).unwrap();
    assert_eq!((log.config.m, log.config.levels, log.config.seed), (5, 2, 3));
}

#[test]
fn verify_passes_on_a_fresh_build() {
    let dir = small_dir();
    let o = run(dir.path(), &["verify", "--json", "verify.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.starts_with("PASS ")), "{out}");
    let v: Value = serde_json::from_slice(&bytes(dir.path().join("verify.json"))).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
    for name in ["properness", "d_bridges", "boundaries", "pushforward", "nets", "faithfulness"] {
        assert!(checks.iter().any(|c| c["name"] == name), "{name}");
    }
}

#[test]
fn duplicate_color_fails_properness() {
    let dir = small_dir();
    let path = dir.path().join("graph.json");
    let mut file = read_graph_file(&path).unwrap();
    let (u, _, _) = *file.edges.iter().find(|e| e.2 == Color::A).unwrap();
    let w = (0..file.vertices).find(|&w| w != u && !file.edges.iter().any(|e| e.2 == Color::A && (e.0 == w || e.1 == w))).unwrap();
    file.edges.push((u.min(w), u.max(w), Color::A));
    write_json(&path, &file).unwrap();
    let o = run(dir.path(), &["verify"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL properness"), "{}", stdout(&o));
}

#[test]
fn d_edge_across_a_cycle_fails_bridges() {
    let dir = small_dir();
    let path = dir.path().join("graph.json");
    let log = read_log(&dir.path().join("build.json")).unwrap();
    let mut file = read_graph_file(&path).unwrap();
    let has_d = |v: u32, f: &holonomy::io::GraphFile| f.edges.iter().any(|e| e.2 == Color::D && (e.0 == v || e.1 == v));
    let free: Vec<u32> = log.stage(2).h_range.clone().filter(|&v| !has_d(v, &file)).take(2).collect();
    file.edges.push((free[0], free[1], Color::D));
    file.edges.sort_unstable();
    write_json(&path, &file).unwrap();
    let o = run(dir.path(), &["verify"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL d_bridges"), "{}", stdout(&o));
}

#[test]
fn report_writes_json_and_csv() {
    let dir = small_dir();
    let o = run(dir.path(), &["report", "--types-csv", "types.csv", "--holonomy-csv", "holonomy.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&bytes(dir.path().join("report.json"))).unwrap();
    for key in ["m", "levels", "r", "k", "edge_measure_mu1", "free_fraction_mu2", "cost_estimate_mu2", "tv_distance", "gap"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v["gap"].as_f64().unwrap() > 0.0);
    let types = std::fs::read_to_string(dir.path().join("types.csv")).unwrap();
    assert!(types.starts_with("r,fingerprint,count,root_degree,parent\n"));
    let holonomy = std::fs::read_to_string(dir.path().join("holonomy.csv")).unwrap();
    assert!(holonomy.starts_with("r,fingerprint,count,m_alpha\n"));
    assert!(holonomy.lines().count() > 1);
}

#[test]
fn report_is_independent_of_thread_count() {
    let dir = small_dir();
    let a = run_env(dir.path(), &["report", "--out", "a.json"], "1");
    let b = run_env(dir.path(), &["report", "--out", "b.json"], "3");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(bytes(dir.path().join("a.json")), bytes(dir.path().join("b.json")));
}

#[test]
fn radius_zero_report_is_degenerate() {
    let dir = small_dir();
    let o = run(dir.path(), &["report", "--r", "0", "--out", "r0.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&bytes(dir.path().join("r0.json"))).unwrap();
    assert_eq!(v["tv_distance"].as_f64(), Some(0.0));
    assert!(v["edge_measure_mu1"].as_f64().unwrap() >= 1.0);
}

#[test]
fn two_levels_cannot_be_reported() {
    let dir = TempDir::new().unwrap();
    let args = ["build", "--seed", "1", "--m", "3", "--levels", "2", "--diam-mult", "2", "--girth", "6", "--chord", "5", "--k", "2"];
    assert_eq!(run(dir.path(), &args).status.code(), Some(0));
    let o = run(dir.path(), &["report"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("insufficient levels"), "{}", stderr(&o));
}

#[test]
fn dihedral_demo_reports_growth() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["demo", "dihedral", "--n", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["holonomy_ratio"].as_f64().unwrap() >= 1.5);
    assert_eq!(v["reports"][1]["transport_found"], false);
}
