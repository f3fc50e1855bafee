use std::process::{Command, Output};

fn qinterp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qinterp")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn field_tables() {
    let out = qinterp(&["field", "2", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# modulus=x^2+x+1"));
    let traces: Vec<&str> = text.lines().skip(3).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(traces, ["0", "0", "1", "1"]);

    let v = json(&qinterp(&["field", "2", "1", "--format", "json"]));
    let traces: Vec<u64> = v["elements"].as_array().unwrap().iter().map(|e| e["trace"].as_u64().unwrap()).collect();
    assert_eq!(traces, [0, 1]);

    let v = json(&qinterp(&["field", "2", "3", "--format", "json"]));
    assert_eq!(v["modulus_poly"], "x^3+x+1");
}

#[test]
fn field_rejects_composite_characteristic() {
    let out = qinterp(&["field", "4", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not prime"));
}

#[test]
fn bv_records() {
    let out = qinterp(&["bv", "3", "--a", "101", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["a_hat"], "101");
    assert_eq!(v["success"], true);
    assert_eq!(v["queries"], 1);

    let v = json(&qinterp(&["bv", "1", "--a", "0", "--format", "json"]));
    assert_eq!(v["a_hat"], "0");

    assert!(qinterp(&["bv", "8", "--random", "--seed", "5"]).status.success());
}

#[test]
fn bv_bounds_and_malformed_input() {
    assert_eq!(qinterp(&["bv", "13", "--random", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(qinterp(&["bv", "3", "--a", "10"]).status.code(), Some(1));
    assert_eq!(qinterp(&["bv", "3", "--a", "1x1"]).status.code(), Some(1));
    assert_eq!(qinterp(&["bv", "3", "--random"]).status.code(), Some(1));
}

#[test]
fn interpolate_defaults_and_schema() {
    let out = qinterp(&["interpolate", "3", "1", "1", "1", "--trials", "10000", "--seed", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("p_exact"), "7/9");
    let lo: f64 = col("wilson_lo").parse().unwrap();
    let hi: f64 = col("wilson_hi").parse().unwrap();
    assert!(lo <= 7.0 / 9.0 && 7.0 / 9.0 <= hi);

    let v = json(&qinterp(&["interpolate", "3", "1", "1", "2", "--format", "json"]));
    assert_eq!(v["k"], 2);
    assert_eq!(v["D"], 3);
    let v = json(&qinterp(&["interpolate", "5", "1", "2", "1", "--format", "json"]));
    assert_eq!(v["k"], 1);
    let v = json(&qinterp(&["interpolate", "3", "1", "1", "2", "1", "--format", "json"]));
    assert_eq!(v["k"], 1);
}

#[test]
fn interpolate_errors() {
    assert_eq!(qinterp(&["interpolate", "3", "1", "1", "1", "--trials", "5"]).status.code(), Some(1));
    assert_eq!(qinterp(&["interpolate", "101", "1", "3", "3"]).status.code(), Some(2));
    assert_eq!(qinterp(&["interpolate", "3", "1", "1", "3"]).status.code(), Some(1));
}

#[test]
fn interpolate_table_cache_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("table.json");
    let cache = cache.to_str().unwrap();
    let first = qinterp(&["interpolate", "3", "1", "1", "2", "--table", cache]);
    assert!(first.status.success());
    let second = qinterp(&["interpolate", "3", "1", "1", "2", "--table", cache]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn share_interception_destroys_every_session() {
    let dir = tempfile::tempdir().unwrap();
    let tdir = dir.path().join("t");
    let out = qinterp(&[
        "share", "3", "1", "1", "2", "--intercept", "1", "--trials", "50", "--seed", "3", "--format", "json",
        "--transcripts", tdir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["sessions"], 50);
    assert_eq!(v["destroyed"], 50);
    assert_eq!(v["successes"], 0);
    let first = std::fs::read_to_string(tdir.join("session_000000.jsonl")).unwrap();
    assert!(first.contains("\"destroyed\""));
    assert_eq!(std::fs::read_dir(&tdir).unwrap().count(), 50);
}

#[test]
fn share_without_interception_reconstructs() {
    let v = json(&qinterp(&["share", "3", "1", "1", "2", "--trials", "400", "--seed", "9", "--format", "json"]));
    assert_eq!(v["destroyed"], 0);
    assert_eq!(v["reconstructed"], 400);
    assert_eq!(v["p_exact"], "19/27");
    assert_eq!(qinterp(&["share", "3", "1", "1", "2", "--intercept", "3", "--seed", "1"]).status.code(), Some(1));
    assert_eq!(qinterp(&["share", "3", "1", "1", "2"]).status.code(), Some(1));
}

#[test]
fn adversary_reports() {
    let v = json(&qinterp(&["adversary", "--players", "2", "--structure", "[[],[1]]"]));
    assert_eq!(v["self_dual"], true);
    assert_eq!(v["dual"], serde_json::json!([[], [1]]));

    let v = json(&qinterp(&["adversary", "--players", "3", "--threshold", "2"]));
    assert_eq!(v["q2"], false);

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("a.json");
    std::fs::write(&file, "[[], [1], [2]]").unwrap();
    let v = json(&qinterp(&["adversary", "--players", "2", "--structure", file.to_str().unwrap()]));
    assert_eq!(v["q2"], false);
    assert_eq!(v["q2_star"], true);

    let v = json(&qinterp(&["adversary", "--players", "2", "--structure", "[[1,2]]"]));
    assert_eq!(v["downward_closed"], false);
    assert_eq!(v["q2"], serde_json::Value::Null);
}

#[test]
fn adversary_errors() {
    assert_eq!(qinterp(&["adversary", "--players", "2", "--structure", "[[3]]"]).status.code(), Some(1));
    assert_eq!(qinterp(&["adversary", "--players", "2", "--structure", "missing.json"]).status.code(), Some(1));
    assert_eq!(qinterp(&["adversary", "--players", "21", "--threshold", "1"]).status.code(), Some(2));
    assert_eq!(qinterp(&["adversary", "--players", "2"]).status.code(), Some(1));
}

#[test]
fn seeded_output_is_stable() {
    let args = ["interpolate", "3", "1", "1", "2", "--trials", "300", "--seed", "4", "--mode", "circuit"];
    assert_eq!(qinterp(&args).stdout, qinterp(&args).stdout);
    let other = qinterp(&["interpolate", "3", "1", "1", "2", "--trials", "300", "--seed", "5", "--mode", "circuit"]);
    assert_ne!(qinterp(&args).stdout, other.stdout);
}
