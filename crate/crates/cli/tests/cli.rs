//! End-to-end tests of the binary: exit codes, JSON round trips and
//! output determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ucpoly"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8 stdout")
}

fn write(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

const K1: &str = r#"{"T": 3, "L": 1, "ell": 1, "Cmin": 1, "Cmax": 3, "Vbar": 2, "V": 2}"#;
const WIDE: &str = r#"{"T": 4, "L": 1, "ell": 1, "Cmin": "1", "Cmax": "4", "Vbar": "3/2", "V": "1"}"#;

#[test]
fn check_instance_reports_the_violated_assumption() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "good.json", K1);
    write(
        tmp.path(),
        "bad.json",
        r#"{"T": 3, "L": 1, "ell": 1, "Cmin": 2, "Cmax": 4, "Vbar": 1, "V": 1}"#,
    );
    let ok = run(tmp.path(), &["check-instance", "good.json"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("K1"));
    let bad = run(tmp.path(), &["check-instance", "bad.json"]);
    assert_eq!(bad.status.code(), Some(2));
    let err = String::from_utf8(bad.stderr).unwrap();
    assert!(err.contains("Cmin < Vbar"), "stderr was: {err}");
}

#[test]
fn generate_emits_one_member_or_streams_the_family() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "inst.json", WIDE);
    let one = run(
        tmp.path(),
        &[
            "generate", "inst.json", "--family", "F7", "--t", "4", "--m", "2", "--set", "3",
        ],
    );
    assert_eq!(one.status.code(), Some(0));
    assert!(stdout(&one).contains("F7[t=4,m=2,S={3}]"));
    let all = run(
        tmp.path(),
        &["generate", "inst.json", "--family", "F9", "--all", "--format", "json"],
    );
    assert_eq!(all.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&all)).unwrap();
    let members = doc.as_array().unwrap();
    assert!(!members.is_empty());
    for m in members {
        assert!(m["row"]["tag"].as_str().unwrap().starts_with("F9["));
        assert_eq!(m["row"]["sense"], "<=");
    }
}

#[test]
fn enumerated_points_round_trip_into_separate() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "inst.json", K1);
    let e = run(
        tmp.path(),
        &["enumerate", "inst.json", "--variant", "full", "--format", "json"],
    );
    assert_eq!(e.status.code(), Some(0));
    let points: serde_json::Value = serde_json::from_str(&stdout(&e)).unwrap();
    let points = points.as_array().unwrap();
    assert!(!points.is_empty());
    // a hull extreme point is never cut off: exit 0, nothing found
    write(
        tmp.path(),
        "p.json",
        &serde_json::to_string(points.last().unwrap()).unwrap(),
    );
    let sep = run(
        tmp.path(),
        &[
            "separate", "inst.json", "--variant", "full", "--point", "p.json", "--format",
            "json",
        ],
    );
    assert_eq!(sep.status.code(), Some(0));
    let results: serde_json::Value = serde_json::from_str(&stdout(&sep)).unwrap();
    for r in results.as_array().unwrap() {
        assert_eq!(r["found"], false);
    }
}

#[test]
fn separate_flags_an_infeasible_point() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "inst.json", K1);
    write(
        tmp.path(),
        "p.json",
        r#"{"x": [4, 3, 3], "y": [1, 1, 1], "u": [0, 0]}"#,
    );
    let sep = run(
        tmp.path(),
        &[
            "separate", "inst.json", "--variant", "full", "--point", "p.json", "--format",
            "json",
        ],
    );
    assert_eq!(sep.status.code(), Some(1));
    let results: serde_json::Value = serde_json::from_str(&stdout(&sep)).unwrap();
    let arr = results.as_array().unwrap();
    assert!(arr.iter().any(|r| r["found"] == true));
    // sorted by violation, best first
    assert_eq!(arr[0]["found"], true);
}

#[test]
fn verify_hull_confirms_and_emits_json() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "inst.json", K1);
    let v = run(
        tmp.path(),
        &["verify-hull", "inst.json", "--which", "q-k1", "--format", "json"],
    );
    assert_eq!(v.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(doc[0]["status"], "confirmed");
}

#[test]
fn verify_hull_refutes_the_bare_relaxation_with_a_witness() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "inst.json", WIDE);
    let v = run(
        tmp.path(),
        &["verify-hull", "inst.json", "--which", "base", "--format", "json"],
    );
    assert_eq!(v.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(doc[0]["status"], "refuted");
    assert!(doc[0]["witness"]["kind"].is_string());
}

#[test]
fn verify_hull_objective_mode_records_the_seed() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "inst.json", WIDE);
    let v = run(
        tmp.path(),
        &[
            "verify-hull", "inst.json", "--which", "q-up", "--objectives", "25", "--seed",
            "42",
        ],
    );
    assert_eq!(v.status.code(), Some(0));
    let out = stdout(&v);
    assert!(out.contains("seed=42"), "output was: {out}");
    assert!(out.contains("confirmed"));
}

#[test]
fn facets_confirms_every_member() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "inst.json", K1);
    let f = run(tmp.path(), &["facets", "inst.json", "--family", "F2"]);
    assert_eq!(f.status.code(), Some(0));
    assert!(stdout(&f).lines().all(|l| l.contains("confirmed")));
}

#[test]
fn cutloop_closes_the_gap_and_reports_cut_counts() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "inst.json", WIDE);
    write(
        tmp.path(),
        "obj.json",
        r#"{"x": [1, 1, 1, 1], "y": ["-1/2", 0, 0, 0], "u": [-1, 0, 0]}"#,
    );
    let c = run(
        tmp.path(),
        &[
            "cutloop", "inst.json", "--variant", "up", "--objective", "obj.json",
            "--families", "F7,F9", "--format", "json",
        ],
    );
    assert_eq!(c.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&c)).unwrap();
    assert_eq!(doc["status"], "integral-optimal");
    assert_eq!(doc["gap"], "0");
    assert!(doc["final_solution"]["x"].is_array());
}

#[test]
fn report_aggregates_and_flags_refutations() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "k1.json", K1);
    write(tmp.path(), "wide.json", WIDE);
    write(tmp.path(), "empty.json", "[]");
    let empty = run(tmp.path(), &["report", "empty.json", "--format", "json"]);
    assert_eq!(empty.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&empty)).unwrap();
    assert_eq!(doc["refuted"], 0);
    assert_eq!(doc["cases"].as_array().unwrap().len(), 0);

    write(
        tmp.path(),
        "suite.json",
        r#"[
            {"instance": "k1.json", "claim": "q-k1"},
            {"instance": "wide.json", "claim": "q-up"},
            {"instance": "wide.json", "claim": "base"}
        ]"#,
    );
    let r = run(tmp.path(), &["report", "suite.json", "--format", "json"]);
    // one negative control: exactly one refuted entry, exit 1
    assert_eq!(r.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&r)).unwrap();
    assert_eq!(doc["confirmed"], 2);
    assert_eq!(doc["refuted"], 1);
    let missing = run(tmp.path(), &["report", "nope.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "inst.json", WIDE);
    let args = [
        "verify-hull", "inst.json", "--which", "q-up", "--objectives", "30", "--format",
        "json",
    ];
    let a = run(tmp.path(), &args);
    let b = run(tmp.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let e1 = run(tmp.path(), &["enumerate", "inst.json", "--variant", "down"]);
    let e2 = run(tmp.path(), &["enumerate", "inst.json", "--variant", "down"]);
    assert_eq!(e1.stdout, e2.stdout);
}
