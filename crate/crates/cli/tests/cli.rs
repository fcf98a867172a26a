use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn latinlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latinlab"))
        .args(args)
        .env_remove("LATINLAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn census_three_by_three() {
    let out = latinlab(&["census", "--k", "3", "--n", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["total"], "12");
    assert_eq!(v["constrained"], Value::Null);
    assert_eq!(v["metadata"]["command"], "census");
    assert_eq!(v["metadata"]["seed"], 0);
}

#[test]
fn census_with_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.plr", "2 4\n1 . . .\n. . . .\n");
    let out = latinlab(&["census", "--k", "2", "--n", "4", "--pattern", &p, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["total"], "216");
    assert_eq!(v["constrained"], "54");
}

#[test]
fn single_entry_check_confirms_one_over_n() {
    let out = latinlab(&["verify", "--check", "single-entry", "--n", "4", "--k", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["expected"]["num"], "1");
    assert_eq!(v["expected"]["den"], "4");
    assert_eq!(v["confirmed"], true);
    assert_eq!(v["checked"], 32);
}

#[test]
fn malformed_plr_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.plr", "2 3\n1 2 3\n2 x 1\n");
    let out = latinlab(&["census", "--k", "2", "--n", "3", "--pattern", &p]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, column 3"), "{err}");
}

#[test]
fn missing_file_is_invalid_input() {
    let out = latinlab(&["subsquares", "--input", "/nonexistent/x.plr", "--order", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn size_guard_exit_code() {
    let out = latinlab(&["census", "--k", "6", "--n", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pattern_without_completion_counts_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "u.plr", "2 2\n1 .\n. 2\n");
    let out = latinlab(&["census", "--k", "2", "--n", "2", "--pattern", &p, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["constrained"], "0");
}

#[test]
fn sample_output_round_trips_through_subsquares() {
    let out = latinlab(&["sample", "--k", "3", "--n", "5", "--count", "2", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let blocks: Vec<&str> = text.split("\n\n").collect();
    assert_eq!(blocks.len(), 2);
    let dir = tempfile::tempdir().unwrap();
    for (i, b) in blocks.iter().enumerate() {
        let p = write(dir.path(), &format!("s{i}.plr"), &format!("{}\n", b.trim_end()));
        let again = latinlab(&["subsquares", "--input", &p, "--order", "1"]);
        assert_eq!(again.status.code(), Some(0));
        assert_eq!(stdout(&again).trim(), "15");
    }
}

#[test]
fn seed_flag_and_env_agree() {
    let a = latinlab(&["sample", "--k", "2", "--n", "6", "--count", "5", "--seed", "42"]);
    let b = Command::new(env!("CARGO_BIN_EXE_latinlab"))
        .args(["sample", "--k", "2", "--n", "6", "--count", "5"])
        .env("LATINLAB_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    let c = latinlab(&["sample", "--k", "2", "--n", "6", "--count", "5", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.plr", "2 4\n1 . . .\n. . . .\n");
    let run = |t: &str| {
        let s = latinlab(&["--threads", t, "sample", "--k", "4", "--n", "7", "--count", "2500", "--method", "mcmc"]);
        let e = latinlab(&["--threads", t, "estimate", "--pattern", &p, "--samples", "4000", "--seed", "3", "--csv"]);
        (s.stdout, e.stdout)
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn estimate_json_carries_exact_value() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.plr", "2 4\n1 . . .\n. . . .\n");
    let out = latinlab(&["estimate", "--pattern", &p, "--samples", "3000", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["exact"]["num"], "1");
    assert_eq!(v["exact"]["den"], "4");
    assert_eq!(v["ci_covers_exact"], true);
    assert_eq!(v["samples"], "3000");
}

#[test]
fn csv_has_documented_header() {
    let out = latinlab(&["verify", "--check", "single-entry", "--n", "3", "--k", "2", "--csv"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("row,col,symbol,probability"));
    assert_eq!(lines.count(), 18);
}

#[test]
fn restriction_identity_holds() {
    let out = latinlab(&["verify", "--check", "restriction-identity", "--n", "4", "--k", "3", "--order", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["holds"], true);
}

#[test]
fn digraph_degrees_of_cyclic_rectangle() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "r.plr", "3 5\n1 2 3 4 5\n2 3 4 5 1\n3 4 5 1 2\n");
    let out = latinlab(&["digraph", "--input", &p, "--row", "2", "--check", "degrees", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["degrees"]["min_out"], 2);
    assert_eq!(v["degrees"]["max_in"], 2);
    let bad = latinlab(&["digraph", "--input", &p, "--row", "4", "--check", "degrees"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn subsquare_witnesses_listed() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "r.plr", "2 4\n1 2 3 4\n2 1 4 3\n");
    let out = latinlab(&["subsquares", "--input", &p, "--order", "2", "--witnesses", "--json"]);
    let v = json(&out);
    assert_eq!(v["count"], "2");
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 2);
    assert_eq!(v["witnesses"][0]["rows"], serde_json::json!([1, 2]));
}

#[test]
fn help_exits_cleanly() {
    let out = latinlab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("census"));
}
