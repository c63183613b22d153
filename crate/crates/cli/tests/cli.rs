//! End-to-end checks of the command line through `run` and the binary.

use std::process::Command;

use serde_json::Value;
use virtmor_cli::run;

fn call(args: &[&str]) -> (i32, String) {
    let mut v = vec!["virtmor"];
    v.extend_from_slice(args);
    run(v)
}

fn ok(args: &[&str]) -> String {
    let (code, out) = call(args);
    assert_eq!(code, 0, "{args:?} failed: {out}");
    out
}

fn error_kind(out: &str) -> String {
    let v: Value = serde_json::from_str(out).expect("error output is JSON");
    v["error"]["message"].as_str().expect("message");
    v["error"]["kind"].as_str().expect("kind").to_string()
}

#[test]
fn reference_examples() {
    assert_eq!(ok(&["tree", "graft", "--left", "(b(ac))", "--at", "c", "--right", "(de)"]), "(b(a(de)))");
    assert_eq!(ok(&["arnold", "dim", "--n", "4"]), "1 6 11 6");
    assert_eq!(ok(&["braid", "eq", "s1 s2 s1", "s2 s1 s2"]), "equal");
    assert_eq!(ok(&["braid", "eq", "s1", "s1'"]), "different");
}

#[test]
fn binary_exit_codes_and_streams() {
    let bin = env!("CARGO_BIN_EXE_virtmor");
    let out = Command::new(bin).args(["braid", "eq", "s1 s2 s1", "s2 s1 s2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "equal\n");
    let out = Command::new(bin).args(["tree", "parse", "(ab"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(String::from_utf8(out.stderr).unwrap().trim()), "parse");
    let out = Command::new(bin).args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_and_domain_errors() {
    let (code, out) = call(&["nonsense"]);
    assert_eq!((code, error_kind(&out).as_str()), (2, "usage"));
    let (code, out) = call(&["tree", "parse"]);
    assert_eq!((code, error_kind(&out).as_str()), (2, "usage"));
    let (code, out) = call(&["curve", "factor-check", "--outer", "a=1"]);
    assert_eq!((code, error_kind(&out).as_str()), (2, "usage"));
    let (code, out) = call(&["tree", "graft", "--left", "(ab)", "--at", "z", "--right", "(cd)"]);
    assert_eq!(code, 1);
    assert_eq!(error_kind(&out), "label");
    let (code, out) = call(&["arnold", "reduce", "--n", "3", "w(1,9)"]);
    assert_eq!(code, 1, "{out}");
    error_kind(&out);
    let (code, out) = call(&["monoid", "gp", "[[1,0],[1]]"]);
    assert_eq!(code, 1, "{out}");
    error_kind(&out);
    let (code, out) = call(&["--threads", "0", "tree", "enumerate", "--labels", "a,b", "--curves"]);
    assert_eq!((code, error_kind(&out).as_str()), (2, "usage"));
}

#[test]
fn json_envelope() {
    let out = ok(&["--json", "arnold", "dim", "--n", "4"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "arnold dim");
    assert_eq!(v["result"], serde_json::json!([1, 6, 11, 6]));
    let v: Value = serde_json::from_str(&ok(&["--json", "braid", "eq", "s1", "s2"])).unwrap();
    assert_eq!(v["result"]["equal"], false);
}

#[test]
fn canonical_forms_round_trip() {
    for t in ok(&["tree", "enumerate", "--labels", "a,b,c,d"]).lines() {
        assert_eq!(ok(&["tree", "parse", t]), t);
    }
    let e = ok(&["arnold", "reduce", "--n", "4", "w(1,2)^w(2,3) - 2 w(1,3)^w(2,3) + w(3,4)"]);
    assert_eq!(ok(&["arnold", "reduce", "--n", "4", &e]), e);
    let c = ok(&["curve", "compose", "--left", &curve("(ab)"), "--at", "b", "--right", &curve("(cd)")]);
    let again = ok(&["curve", "compose", "--left", &c, "--at", "d", "--right", &curve("(ef)")]);
    let v: Value = serde_json::from_str(&again).unwrap();
    assert_eq!(v["components"].as_array().unwrap().len(), 3);
}

fn curve(tree: &str) -> String {
    let out = ok(&["tree", "enumerate", "--labels", &tree[1..tree.len() - 1].chars().map(String::from).collect::<Vec<_>>().join(","), "--curves"]);
    out.lines().find(|l| l.starts_with(tree)).unwrap().split('\t').nth(1).unwrap().to_string()
}

#[test]
fn arnold_relation_reduces_to_zero() {
    assert_eq!(ok(&["arnold", "reduce", "--n", "3", "w(1,2)^w(2,3) + w(2,3)^w(3,1) + w(3,1)^w(1,2)"]), "0");
    assert_eq!(ok(&["arnold", "cocompose", "--n", "3", "--inner", "2,3", "--nu", "v", "w(2,3)"]), "1 ⊗ w(2,3)");
}

#[test]
fn transport_and_factorization() {
    let c = curve("(ab)");
    let out = ok(&["curve", "transport", &c, "--from", "a", "--to", "b", "--lambda", "3"]);
    let back = ok(&["curve", "transport", &c, "--from", "b", "--to", "a", "--lambda", &out]);
    assert_eq!(back, "3");
    let out = ok(&["curve", "factor-check", "--outer", "a=1,b=3", "--node", "0", "--inner", "x=1,y=2", "--c", "2"]);
    assert_eq!(out.lines().last(), Some("all hold"));
    assert_eq!(ok(&["curve", "factor-check", "--random", "5", "--c", "-3"]).lines().last(), Some("all hold"));
}

#[test]
fn seeds_make_runs_reproducible() {
    let a = ok(&["--seed", "11", "--json", "curve", "factor-check", "--random", "3"]);
    let b = ok(&["--seed", "11", "--json", "curve", "factor-check", "--random", "3"]);
    assert_eq!(a, b);
    let c = ok(&["--seed", "12", "--json", "curve", "factor-check", "--random", "3"]);
    assert_ne!(a, c);
}

#[test]
fn threads_do_not_change_output() {
    let one = ok(&["--threads", "1", "tree", "enumerate", "--labels", "a,b,c,d", "--curves"]);
    let four = ok(&["--threads", "4", "tree", "enumerate", "--labels", "a,b,c,d", "--curves"]);
    assert_eq!(one, four);
    assert_eq!(one.lines().count(), 120);
}

#[test]
fn braids_compose_and_insert() {
    assert_eq!(ok(&["braid", "compose", "s1", "s2"]), "s1 s2");
    let f = r#"{"source":"(ab)","target":"(ba)","word":"s1"}"#;
    let g = r#"{"source":"(ba)","target":"(ab)","word":"s1"}"#;
    let v: Value = serde_json::from_str(&ok(&["braid", "compose", f, g])).unwrap();
    assert_eq!(v["source"], "(ab)");
    assert_eq!(v["target"], "(ab)");
    let h = r#"{"source":"(cd)","target":"(cd)","word":""}"#;
    let v: Value = serde_json::from_str(&ok(&["braid", "insert", "--outer", f, "--at", "a", "--inner", h])).unwrap();
    assert_eq!(v["source"], "((cd)b)");
    let (code, _) = call(&["braid", "compose", f, f]);
    assert_eq!(code, 1);
}

#[test]
fn monoids_and_points() {
    assert_eq!(ok(&["monoid", "gp", "[[2,0],[0,1]]"]), "Z^2");
    assert!(ok(&["monoid", "saturated", "[[2],[3]]"]).starts_with("not saturated"));
    assert!(ok(&["monoid", "saturated", "[[1,0],[0,1]]"]).starts_with("saturated"));
    let pts = ok(&["points", "enumerate"]);
    assert_eq!(pts.lines().filter(|l| !l.starts_with("log point") && l.contains('\t')).count(), 6);
    assert!(ok(&["points", "kn"]).lines().all(|l| l.ends_with(", bijective")));
}

#[test]
fn payload_from_file() {
    let dir = std::env::temp_dir().join(format!("virtmor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("tree.txt");
    std::fs::write(&p, "(a(bc))\n").unwrap();
    assert_eq!(ok(&["--in", p.to_str().unwrap(), "tree", "parse"]), "(a(bc))");
    let (code, out) = call(&["--in", dir.join("missing").to_str().unwrap(), "tree", "parse"]);
    assert_eq!((code, error_kind(&out).as_str()), (1, "io"));
    std::fs::remove_dir_all(&dir).unwrap();
}
