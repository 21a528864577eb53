//! End-to-end checks of the command-line binary.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twoprover"))
}

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name).display().to_string()
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = bin().args(args).args(["--json", "-"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn same_seed_same_bytes() {
    let args = ["--protocol", "leash", "--circuit", &corpus("bell.qc"), "--trials", "50", "--seed", "3"];
    let a = bin().args(args).args(["--json", "-"]).output().unwrap();
    let b = bin().args(args).args(["--json", "-"]).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn report_fields() {
    let v = json(&["--protocol", "epr", "--circuit", &corpus("hh.qc"), "--trials", "30", "--params", "round=computation"]);
    assert_eq!(v["protocol"], "epr");
    assert_eq!(v["input"], "0");
    assert_eq!(v["result"]["stats"]["trials"], 30);
    assert_eq!(v["result"]["stats"]["accepted"], 30);
    assert!((v["result"]["oracle_p"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn game_and_adversary() {
    let v = json(&["--game", "ms", "--trials", "100"]);
    assert_eq!(v["result"]["accepted"], 100);
    let v = json(&["--protocol", "epr", "--circuit", &corpus("ghz_t.qc"), "--trials", "40", "--params", "round=x_test", "--adversary-pp", "pp_flip_cf"]);
    assert_eq!(v["result"]["stats"]["accepted"], 0);
}

#[test]
fn config_errors_exit_nonzero() {
    for args in [
        vec!["--protocol", "bogus", "--circuit", "x.qc"],
        vec!["--protocol", "epr"],
        vec!["--game", "rigid", "--params", "p1=2"],
        vec!["--game", "nope"],
        vec!["--game", "ms", "--adversary-pp", "nope"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert!(!out.status.success(), "{args:?}");
    }
    let out = bin().args(["--protocol", "epr", "--circuit", &corpus("bell.qc"), "--input", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
