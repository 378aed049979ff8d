use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn liecert(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liecert"))
        .args(args)
        .current_dir(cwd)
        .env_remove("LIECERT_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn minimal_b2_lists_the_eight_subsets() {
    let dir = tempfile::tempdir().unwrap();
    let out = liecert(&["minimal", "--family", "B", "--rank", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let sets: BTreeSet<BTreeSet<Vec<i64>>> =
        serde_json::from_value(doc["verdicts"]["psi_sets"].clone()).unwrap();
    let want: BTreeSet<BTreeSet<Vec<i64>>> = [
        [[1, 0], [2, 1]],
        [[1, 0], [0, -1]],
        [[0, 1], [1, 1]],
        [[0, 1], [-1, 0]],
        [[1, 1], [2, 1]],
        [[-1, 0], [-2, -1]],
        [[0, -1], [-1, -1]],
        [[-1, -1], [-2, -1]],
    ]
    .iter()
    .map(|s| s.iter().map(|r| r.to_vec()).collect())
    .collect();
    assert_eq!(sets, want);
}

#[test]
fn certify_alpha_minus_beta_is_minimal() {
    let dir = tempfile::tempdir().unwrap();
    let out = liecert(&["certify", "--family", "B", "--rank", "2", "--psi", "1,0;0,-1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["verdicts"]["minimal"]["minimal"], Value::Bool(true));
    assert_eq!(doc["convention_id"], "carter-extraspecial-v1");
}

#[test]
fn certify_full_root_system_is_violated() {
    let dir = tempfile::tempdir().unwrap();
    let psi = "1,0;0,1;1,1;2,1;-1,0;0,-1;-1,-1;-2,-1";
    let out = liecert(&["certify", "--psi", psi], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdicts"]["minimal"]["minimal"], Value::Bool(false));
}

#[test]
fn invalid_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["roots", "--family", "Q"],
        vec!["roots", "--family", "E", "--rank", "5"],
        vec!["certify", "--psi", "1,0,0"],
        vec!["certify", "--psi", "3,3"],
        vec!["dij-witness", "--i", "1", "--j", "0", "--x", "h1:0"],
        vec!["dij-witness", "--i", "3", "--j", "1", "--x", "h1:0"],
        vec!["aid", "--diag", "1,2,3"],
        vec!["inner-match", "--window", "2:1", "--dij", "1,1"],
    ] {
        let out = liecert(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["aid", "--family", "A", "--rank", "3", "--psi", "0,1,0;1,1,0;0,1,1;1,1,1", "--diag", "1,0,0,0"];
    let a = liecert(&args, dir.path());
    let b = liecert(&args, dir.path());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(1));
    let doc = json(&a);
    assert_eq!(doc["verdicts"]["aid"]["status"], "not_aid");
    assert!(doc["verdicts"]["random_falsification"].is_array());
}

#[test]
fn certificate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = liecert(&["der", "--psi", "1,0;2,1"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
    assert_eq!(v["verdicts"]["dim_der"], 4);
    assert_eq!(v["verdicts"]["dim_complement"], 0);
}

#[test]
fn seed_flag_beats_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_liecert"));
        cmd.current_dir(dir.path()).env_remove("LIECERT_SEED").args(["roots"]);
        if let Some(e) = env {
            cmd.env("LIECERT_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        json(&cmd.output().unwrap())["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 2024);
    assert_eq!(run(Some("11"), None), 11);
    assert_eq!(run(Some("11"), Some("12")), 12);
}

#[test]
fn json_flag_writes_the_same_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = liecert(&["roots", "--family", "G", "--rank", "2", "--json", path.to_str().unwrap()], dir.path());
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    assert_eq!(json(&out)["verdicts"]["count"], 12);
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let plain = json(&liecert(&["centroid"], dir.path()));
    assert!(plain.get("timings").is_none());
    let timed = json(&liecert(&["centroid", "--timings"], dir.path()));
    assert!(timed["timings"].is_object());
    assert_eq!(plain["verdicts"], timed["verdicts"]);
    assert_eq!(plain["verdicts"]["dim"], 2);
}

#[test]
fn cache_cold_warm_corrupt_and_convention_bump() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache").join("structure-B2-carter-extraspecial-v1.json");
    let cold = liecert(&["certify"], dir.path());
    let table = std::fs::read(&cache).unwrap();
    let warm = liecert(&["certify"], dir.path());
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(std::fs::read(&cache).unwrap(), table);

    std::fs::write(&cache, b"garbage").unwrap();
    let rebuilt = liecert(&["certify"], dir.path());
    assert_eq!(rebuilt.status.code(), Some(0));
    assert_eq!(rebuilt.stdout, cold.stdout);
    assert!(String::from_utf8_lossy(&rebuilt.stderr).contains("corrupt"));
    assert_eq!(std::fs::read(&cache).unwrap(), table);

    let bumped = String::from_utf8(table.clone())
        .unwrap()
        .replace("carter-extraspecial-v1", "carter-extraspecial-v0");
    std::fs::write(&cache, bumped).unwrap();
    let rebuilt = liecert(&["certify"], dir.path());
    assert_eq!(rebuilt.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&rebuilt.stderr).contains("convention"));
    assert_eq!(std::fs::read(&cache).unwrap(), table);
}

#[test]
fn loop_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = liecert(&["dij-witness", "--i", "1", "--j", "1", "--x", "h1:1;h1:2;x1:0"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["verdicts"]["witness"]["path"], "general");
    let y = serde_json::to_string(&doc["verdicts"]["witness"]["y"]).unwrap();
    let br = json(&liecert(&["affine-bracket", "--x", "h1:1;h1:2;x1:0", "--y", &y], dir.path()));
    assert_eq!(br["verdicts"]["bracket"]["central"], "1");
    assert_eq!(br["verdicts"]["bracket"]["support"], serde_json::json!({}));

    let out = liecert(&["aid-check", "--dij", "2,0", "--x", "h2:0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["verdicts"]["aid_check"]["result"], "central_obstruction");
    assert!(doc["verdicts"]["discrepancy"].is_string());

    let out = liecert(&["aid-check", "--dij", "1,-2,3", "--x", "h1:-2;x2:1"], dir.path());
    assert_eq!(out.status.code(), Some(0));

    let out = liecert(&["inner-match", "--dij", "1,1;2,-1,-2", "--window=-3:3"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["verdicts"]["label"], "inconclusive_negative");
    let out = liecert(&["inner-match", "--dij", ""], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn selftest_single_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let out = liecert(&["selftest", "--only", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("PASS criterion  1"));
    let out = liecert(&["selftest", "--only", "2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}
