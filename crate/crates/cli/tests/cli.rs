use std::process::{Command, Output};

use serde_json::Value;

fn deadend(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deadend"))
        .args(args)
        .env_remove("DEADEND_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = deadend(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "deadend/1");
    v
}

#[test]
fn compare_prints_relation() {
    let out = deadend(&["compare", "{|#1,#2}", "#1+W2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "G > H\n");
    assert_eq!(stdout(&deadend(&["compare", "#1+W2", "{|#1,#2}"])), "G < H\n");
    assert_eq!(stdout(&deadend(&["compare", "{|0,W1}", "W2"])), "G = H\n");
    assert_eq!(stdout(&deadend(&["compare", "#1", "#2"])), "G || H\n");
}

#[test]
fn factor_emits_report() {
    let v = json(&["factor", "#3"]);
    assert_eq!(v["factorisations"], serde_json::json!([["#1", "#1", "#1"]]));
    assert_eq!(v["unique"], true);
    let v = json(&["factor", "W2+W3", "--oracle"]);
    assert_eq!(v["factorisations"], serde_json::json!([["W2", "W3"]]));
    assert_eq!(v["oracle"], "agrees");
    let v = json(&["factor", "W5"]);
    assert_eq!(v["atom"], true);
    assert_eq!(v["atom_rule"], "race1");
}

#[test]
fn census_row() {
    let out = deadend(&["census", "--day", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows, ["day\tends\tatoms\tmolecules\tnontrivial", "4\t52\t41\t10\t1"]);
    let v = json(&["census", "--day", "3", "--from", "2", "--format", "json"]);
    assert_eq!(v["rows"][1]["atoms"], 6);
}

#[test]
fn unavailable_cells_are_marked() {
    let out = deadend(&["census", "--day", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().nth(1), Some("6\t?\t?\t21328\t51"));
}

#[test]
fn every_json_output_is_versioned() {
    json(&["compare", "#1", "W2", "--format", "json"]);
    json(&["canon", "{|0,#1,#2}", "--format", "json"]);
    json(&["measure", "{|W2,#3}", "--format", "json"]);
    json(&["enum", "--day", "2", "--format", "json"]);
    json(&["verify", "--day", "3", "--format", "json"]);
    json(&["oracle", "distinguish", "W2", "#2", "--format", "json"]);
    json(&["oracle", "sample", "--contexts", "20", "--format", "json"]);
}

#[test]
fn measure_and_canon() {
    let v = json(&["measure", "{|W2,#3}", "--format", "json"]);
    assert_eq!(v["terminal"], serde_json::json!([2, 3, 4]));
    assert_eq!(v["race"], 2);
    assert_eq!(v["birthday"], 4);
    assert_eq!(stdout(&deadend(&["canon", "{|0,W1}"])), "W2\n");
}

#[test]
fn parse_errors_exit_one_with_offset() {
    let out = deadend(&["compare", "{|#1,}", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 5"));
    let out = deadend(&["canon", "{#1|}"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(deadend(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(deadend(&["--help"]).status.code(), Some(0));
    assert_eq!(deadend(&["--version"]).status.code(), Some(0));
}

#[test]
fn overflow_is_an_error() {
    let out = deadend(&["hasse", "--day", "4", "--budget-nodes", "50"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn hasse_is_dot() {
    let out = deadend(&["hasse", "--day", "4"]);
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("label=").count(), 51);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("day3.dot");
    let out = deadend(&["enum", "--day", "3", "--hasse", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(path).unwrap();
    assert_eq!(written.matches("label=").count(), 9);
}

#[test]
fn distinguish_reports_witness() {
    let text = stdout(&deadend(&["oracle", "distinguish", "W2", "#2"]));
    assert!(text.starts_with("witness n = 1\n"));
    assert!(text.contains("RightWins") && text.contains("LeftWins"));
    let text = stdout(&deadend(&["oracle", "distinguish", "#2", "W2"]));
    assert_eq!(text, "indistinguishable by terminal lengths\n");
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["enum", "--day", "4", "--jobs", "3"][..],
        &["oracle", "sample", "--seed", "9", "--contexts", "50"][..],
        &["verify", "--day", "4"][..],
    ] {
        let a = deadend(args);
        let b = deadend(args);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.status.code(), Some(0));
    }
    let seq = deadend(&["enum", "--day", "4"]);
    let par = deadend(&["enum", "--day", "4", "--jobs", "4"]);
    assert_eq!(seq.stdout, par.stdout);
}

#[test]
fn cache_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_deadend"))
            .args(["census", "--day", "4"])
            .env("DEADEND_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    let snapshot = dir.path().join("day4.lde");
    let bytes = std::fs::read(&snapshot).unwrap();
    assert_eq!(&bytes[..4], b"LDE1");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 4);
    let second = run();
    assert_eq!(first.stdout, second.stdout);

    std::fs::write(&snapshot, b"LDE1\x04\0\0\0").unwrap();
    let broken = run();
    assert_eq!(broken.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&broken.stderr).contains("snapshot"));
}
