use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn bdperm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdperm")).current_dir(root()).args(args).output().unwrap()
}

fn words(s: &str) -> Vec<&str> {
    s.split(' ').collect()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = bdperm(&full);
    let value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&out)));
    (out.status.code().unwrap(), value)
}

#[test]
fn shift_sends_three_to_one() {
    let out = bdperm(&["perm", "eval", "--spec", "fixtures/shift.json", "--x", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "1");
    let (code, v) = json(&["perm", "eval", "--spec", "fixtures/shift.json", "--x", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["payload"]["image"], 1);
}

#[test]
fn tower_relation_passes() {
    let out = bdperm(&["verify", "tower", "--n", "2", "--window", "18"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    // 16 is not a multiple of 3! = 6
    let out = bdperm(&["verify", "tower", "--n", "2", "--window", "16"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn interval_cut_point_separates() {
    let args = ["sep", "check", "--space", "fixtures/interval1000.json", "--Y", "[500]", "--r1", "1", "--r2", "2"];
    let mut ok = args.to_vec();
    ok.extend(["--x", "10", "--y", "990"]);
    assert_eq!(bdperm(&ok).status.code(), Some(0));
    let mut wide = args.to_vec();
    wide[7] = "2";
    wide.extend(["--x", "10", "--y", "990"]);
    assert_eq!(bdperm(&wide).status.code(), Some(1));
    let descriptor = ["sep", "check", "--space", "interval 1000", "--Y", "[500]", "--r1", "1", "--r2", "2"];
    let mut d = descriptor.to_vec();
    d.extend(["--x", "10", "--y", "990"]);
    assert_eq!(bdperm(&d).status.code(), Some(0));
}

#[test]
fn invalid_input_exits_two() {
    let cases: [&[&str]; 5] = [
        &["perm", "eval", "--spec", "{not json", "--x", "1"],
        &["perm", "eval", "--spec", "shift", "--x", "0"],
        &words("sep check --space fixtures/bad_triangle.json --Y [] --r1 1 --r2 0 --x a --y c"),
        &["perm", "frobnicate"],
        &["zoo", "tower", "--n", "99"],
    ];
    for args in cases {
        let out = bdperm(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let (code, v) = json(&["perm", "eval", "--spec", "{not json", "--x", "1"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "invalid-input");
}

#[test]
fn payloads_are_deterministic() {
    let commands: [&[&str]; 4] = [
        &["bounds", "verify", "--instance", "fixtures/bounds_tower36.json"],
        &["qi", "verify", "--cert", "fixtures/interval100_halving.json", "--preimage-radius", "3"],
        &["roots", "find", "--spec", "tower:3", "--window", "24", "--n", "2"],
        &["zoo", "combined", "--n", "3"],
    ];
    for args in commands {
        let mut full = vec!["--json"];
        full.extend_from_slice(args);
        let a = bdperm(&full);
        let b = bdperm(&full);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn perm_commands() {
    let (code, v) = json(&["perm", "disp", "--spec", "tower:4", "--window", "96"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["window_sup"], 23);
    assert_eq!(v["payload"]["symbolic"], 23);
    let (code, v) = json(&["perm", "cycles", "--spec", "fixtures/g3.json", "--window", "12"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["order"], "6");
    assert_eq!(v["payload"]["cycles"], "(1 3 5 2 4 6)(7 9 11 8 10 12)");
    let out = bdperm(&["perm", "cycles", "--spec", "shift", "--window", "20", "--x", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let out = bdperm(&["perm", "eval", "--spec", "tower:3", "--x", "2", "--inverse"]);
    assert_eq!(stdout(&out).trim(), "5");
    // non-invariant window for a cycle-type query
    assert_eq!(bdperm(&["perm", "cycles", "--spec", "shift", "--window", "20"]).status.code(), Some(1));
}

#[test]
fn zoo_commands() {
    let out = bdperm(&["zoo", "tower", "--n", "3"]);
    assert!(stdout(&out).contains("(1 3 5 2 4 6)"));
    let (_, v) = json(&["zoo", "shift", "--window", "6"]);
    assert_eq!(v["payload"]["images"], serde_json::json!([2, 4, 1, 6, 3, 8]));
    assert_eq!(v["payload"]["spec"]["kind"], "shift_g");
    let (_, v) = json(&["zoo", "combined", "--n", "2"]);
    assert_eq!(v["payload"]["h"]["kind"], "interleaved");
    assert_eq!(v["payload"]["h_n"]["parity"], "even");
    let out = bdperm(&["verify", "commute", "--a", "combined:h", "--b", "combined:3", "--window", "36"]);
    assert_eq!(out.status.code(), Some(0));
    let out = bdperm(&["verify", "commute", "--a", "shift", "--b", "tower:2", "--window", "36"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn qi_commands() {
    let out = bdperm(&["qi", "verify", "--cert", "fixtures/interval50_identity.json", "--preimage-radius", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("least m for the distance bounds: 1"));
    let (code, v) = json(&["qi", "verify", "--cert", "fixtures/interval100_halving.json"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["minimal_m"], 2);
    let (code, v) =
        json(&words("qi separator --cert fixtures/interval2000_identity.json --x 100 --y 1900 --r1 2 --r2 3"));
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["separates"], true);
    assert_eq!(v["payload"]["separator"]["budget"], "160");
    let out = bdperm(&words("qi separator --cert fixtures/interval2000_identity.json --x 100 --y 105 --r1 2 --r2 3"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bounds_commands() {
    let (code, v) = json(&words("bounds compute --cert fixtures/interval50_identity.json --r1 1 --r2p 1 --n 3"));
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["t"], "80");
    assert_eq!(v["payload"]["r3"], "11");
    assert_eq!(v["payload"]["r2"], "3");
    assert_eq!(v["payload"]["s"], 23);
    assert!(v["summary"].as_str().unwrap().contains("ell^(m·r1 + m + 2)·q"));
    for f in ["bounds_tower240", "bounds_tower36", "bounds_identity"] {
        let path = format!("fixtures/{f}.json");
        let (code, v) = json(&["bounds", "verify", "--instance", &path]);
        assert_eq!(code, 0, "{f}");
        assert_eq!(v["payload"]["verdict"]["conclusion_holds"], true);
        assert_eq!(v["payload"]["verdict"]["all_premises"], false, "n ≥ t + 1 fails at desk scale");
    }
}

#[test]
fn roots_and_demo() {
    let (code, v) = json(&["roots", "find", "--spec", "tower:2", "--window", "8", "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["root"]["kind"], "finite_support");
    assert_eq!(bdperm(&["roots", "find", "--spec", "tower:2", "--window", "6", "--n", "2"]).status.code(), Some(1));
    let (code, v) = json(&["demo", "q-search", "--g", "tower:2", "--n", "3", "--r", "2", "--max-window", "20"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["status"], "FOUND");
    let (code, v) = json(&["demo", "q-search", "--n", "100", "--r", "10", "--max-window", "500"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["status"], "NOT-FOUND");
    assert!(v["summary"].as_str().unwrap().starts_with("NOT-FOUND: demonstration only"));
}
