use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

use sigdiag_core::causes::ViolationCauseId;
use sigdiag_core::trace::{serialize_csv, Trace};
use sigdiag_testkit::fixtures;

fn sigdiag(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigdiag")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn path(&self) -> &Path {
        self.0.path()
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn trace(&self, name: &str, t: &Trace) {
        self.file(name, &serialize_csv(t));
    }

    fn run(&self, args: &[&str]) -> Output {
        sigdiag(args, self.path())
    }
}

#[test]
fn check_reports_violation() {
    let d = Dir::new();
    d.trace("t.csv", &fixtures::fig1());
    d.file("p.txt", fixtures::PHI1);
    let o = d.run(&["check", "t.csv", "p.txt"]);
    assert_eq!(code(&o), 1);
    let doc = json_of(&o);
    assert_eq!(doc["verdict"], false);
    assert_eq!(doc["command"], "check");
    assert_eq!(doc["diagnoses"], json!([]));
    assert_eq!(doc["atoms"][0]["cause"], Value::Null);
}

#[test]
fn check_reports_satisfaction() {
    let d = Dir::new();
    d.file("t.csv", "timestamp,s\n0,1\n1,1\n2,1\n");
    d.file("p.txt", "globally assert s = 1\n");
    assert_eq!(code(&d.run(&["check", "t.csv", "p.txt"])), 0);
}

#[test]
fn io_and_usage_errors_exit_2() {
    let d = Dir::new();
    d.file("t.csv", "timestamp,s\n0,1\n");
    d.file("p.txt", "globally assert s < 2\n");
    d.file("bad.txt", "globally assert\n");
    d.file("other.txt", "globally assert x < 2\n");
    for args in [
        &["check", "missing.csv", "p.txt"][..],
        &["diagnose", "t.csv", "missing.txt"],
        &["diagnose", "t.csv", "bad.txt"],
        &["diagnose", "t.csv", "other.txt"],
        &["diagnose", "t.csv", "p.txt", "--epsilon", "-1"],
        &["diagnose", "t.csv", "p.txt", "--timeout", "nan"],
        &["diagnose", "t.csv", "p.txt", "--interpolation", "cubic"],
        &["diagnose", "t.csv"],
        &["frobnicate"],
    ] {
        let o = d.run(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn diagnose_p1() {
    let d = Dir::new();
    d.trace("t.csv", &fixtures::fig6());
    d.file("p.txt", fixtures::P1);
    let o = d.run(&["diagnose", "t.csv", "p.txt"]);
    assert_eq!(code(&o), 0);
    let doc = json_of(&o);
    assert_eq!(doc["trace"], "t.csv");
    assert_eq!(doc["verdict"], false);
    let dg = &doc["diagnoses"][0];
    assert_eq!(dg["cause"], "c_a_aft_1");
    assert_eq!(dg["id"], "d_a_aft_1");
    assert_eq!(dg["payload"], json!({"kind": "interval_and_boundary", "interval": [0.0, 6.0], "boundary": 7.0}));
    assert_eq!(doc["atoms"][0]["payload"], dg["payload"]);
    assert!(doc["duration_ms"].is_u64());
}

#[test]
fn diagnose_exit_codes() {
    let d = Dir::new();
    d.file("t.csv", "timestamp,s\n0,5\n1,1\n2,5\n3,1\n");
    d.file("sat.txt", "globally assert s < 10");
    d.file("nocause.txt", "globally s becomes > 3");
    d.file("cause.txt", "globally assert s < 3");
    let sat = d.run(&["diagnose", "t.csv", "sat.txt"]);
    assert_eq!(code(&sat), 0);
    assert_eq!(json_of(&sat)["diagnoses"], json!([]));
    let none = d.run(&["diagnose", "t.csv", "nocause.txt"]);
    assert_eq!(code(&none), 3);
    assert_eq!(json_of(&none)["verdict"], false);
    assert_eq!(code(&d.run(&["diagnose", "t.csv", "cause.txt"])), 0);
    let late = d.run(&["diagnose", "t.csv", "cause.txt", "--timeout", "0"]);
    assert_eq!(code(&late), 4);
    assert_eq!(json_of(&late)["timeout"], true);
    assert_eq!(code(&d.run(&["check", "t.csv", "cause.txt", "--timeout", "0"])), 4);
}

#[test]
fn epsilon_flag_and_env() {
    let d = Dir::new();
    d.file("t.csv", "timestamp,s\n0,1.05\n1,0.95\n");
    d.file("p.txt", "globally assert s = 1");
    assert_eq!(code(&d.run(&["check", "t.csv", "p.txt"])), 1);
    assert_eq!(code(&d.run(&["check", "t.csv", "p.txt", "--epsilon", "0.1"])), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_sigdiag"))
        .args(["check", "t.csv", "p.txt"])
        .env("SIGDIAG_EPSILON", "0.1")
        .current_dir(d.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn interpolation_flag() {
    let d = Dir::new();
    d.file("t.csv", "timestamp,a,b\n0,0,0\n1,,9\n2,4,0\n");
    // `b` keeps the record at 1 in the prepared trace
    d.file("p.txt", "at 1 assert a - b = -7");
    assert_eq!(code(&d.run(&["check", "t.csv", "p.txt"])), 0);
    assert_eq!(code(&d.run(&["check", "t.csv", "p.txt", "--interpolation", "previous-value"])), 1);
    let args = ["check", "t.csv", "p.txt", "--interpolation", "previous-value", "--interpolation", "a=linear"];
    assert_eq!(code(&d.run(&args)), 0);
}

#[test]
fn output_file_matches_stdout() {
    let d = Dir::new();
    d.trace("t.csv", &fixtures::fig9());
    d.file("p.txt", fixtures::P3);
    let a = d.run(&["diagnose", "t.csv", "p.txt", "--omit-timing"]);
    let b = d.run(&["diagnose", "t.csv", "p.txt", "--omit-timing", "--output", "out.json"]);
    assert!(b.stdout.is_empty());
    assert_eq!(std::fs::read(d.path().join("out.json")).unwrap(), a.stdout);
    let doc = json_of(&a);
    assert_eq!(doc["duration_ms"], Value::Null);
    let ids: Vec<&str> = doc["diagnoses"].as_array().unwrap().iter().map(|x| x["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["d_rises_3", "d_assert_1"]);
}

#[test]
fn batch_keeps_manifest_order_and_isolates_errors() {
    let d = Dir::new();
    std::fs::create_dir(d.path().join("sub")).unwrap();
    d.file("sub/t.csv", "timestamp,s\n0,5\n1,1\n2,5\n3,1\n");
    d.file("sub/sat.txt", "globally assert s < 10");
    d.file("sub/cause.txt", "globally assert s < 3");
    d.file("sub/nocause.txt", "globally s becomes > 3");
    d.file("sub/m.tsv", "# comment\nt.csv\tcause.txt\nt.csv\tsat.txt\n\nmissing.csv\tsat.txt\nt.csv\tnocause.txt\n");
    let run = |jobs: &str| d.run(&["batch", "sub/m.tsv", "--jobs", jobs, "--omit-timing"]);
    let o = run("4");
    assert_eq!(code(&o), 0);
    let doc = json_of(&o);
    let statuses: Vec<&str> = doc["pairs"].as_array().unwrap().iter().map(|p| p["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["diagnosed", "satisfied", "error", "undiagnosed"]);
    let lines: Vec<u64> = doc["pairs"].as_array().unwrap().iter().map(|p| p["line"].as_u64().unwrap()).collect();
    assert_eq!(lines, [2, 3, 5, 6]);
    assert!(doc["pairs"][2]["error"].as_str().unwrap().contains("missing.csv"));
    assert_eq!(doc["pairs"][2]["report"], Value::Null);
    let s = &doc["summary"];
    assert_eq!(s["pairs"], 4);
    assert_eq!(s["errors"], 1);
    assert_eq!(s["finished_pct"], 100.0);
    assert_eq!(s["diagnosed_pct"], 50.0);
    assert_eq!(run("1").stdout, o.stdout);
}

#[test]
fn batch_all_diagnosed() {
    let d = Dir::new();
    d.file("t.csv", "timestamp,s\n0,5\n1,1\n");
    d.file("p.txt", "globally assert s < 3");
    d.file("m.tsv", &"t.csv\tp.txt\n".repeat(10));
    let doc = json_of(&d.run(&["batch", "m.tsv"]));
    assert_eq!(doc["summary"]["diagnosed"], 10);
    assert_eq!(doc["summary"]["diagnosed_pct"], 100.0);
}

#[test]
fn bad_manifest_exits_2() {
    let d = Dir::new();
    d.file("m.tsv", "only-one-field\n");
    assert_eq!(code(&d.run(&["batch", "m.tsv"])), 2);
    assert_eq!(code(&d.run(&["batch", "absent.tsv"])), 2);
}

#[test]
fn generate_constant() {
    let d = Dir::new();
    let o = d.run(&["generate", "--shape", "constant", "--records", "10", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let values: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(values.len(), 10);
    assert!(values.iter().all(|v| *v == values[0]));
}

#[test]
fn generate_rejects_bad_specs() {
    let d = Dir::new();
    for args in [
        &["generate", "--shape", "constant", "--records", "0"][..],
        &["generate", "--cause", "c_spike_3", "--records", "0"],
        &["generate", "--shape", "spiky", "--amp", "5:1"],
        &["generate", "--shape", "spiky", "--amp", "x"],
        &["generate", "--cause", "c_nope_1"],
        &["generate"],
        &["generate", "--shape", "constant", "--cause", "c_spike_3"],
    ] {
        assert_eq!(code(&d.run(args)), 2, "{args:?}");
    }
}

#[test]
fn generated_causes_are_selected() {
    let d = Dir::new();
    for cause in ViolationCauseId::all() {
        let id = cause.to_string();
        let g = d.run(&["generate", "--cause", &id, "--seed", "5", "-o", "t.csv", "--property-out", "p.txt"]);
        assert_eq!(code(&g), 0, "{id}");
        let o = d.run(&["diagnose", "t.csv", "p.txt"]);
        assert_eq!(code(&o), 0, "{id}");
        assert_eq!(json_of(&o)["diagnoses"][0]["cause"], id.as_str());
    }
}

#[test]
fn generated_shapes_are_seeded() {
    let d = Dir::new();
    let args =
        ["generate", "--shape", "oscillating", "--count", "3", "--amp", "2:4", "--span", "0.5", "--records", "40"];
    let a = d.run(&[&args[..], &["--seed", "9"]].concat());
    let b = d.run(&[&args[..], &["--seed", "9"]].concat());
    let c = d.run(&[&args[..], &["--seed", "10"]].concat());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}
