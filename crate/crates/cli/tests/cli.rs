use std::process::Command;

use serde_json::Value;

fn fockflow(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fockflow")).args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("fockflow-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn json_report_follows_the_schema_and_is_reproducible() {
    let (a, b) = (tmp("a.json"), tmp("b.json"));
    for p in [&a, &b] {
        let out = fockflow(&["run", "freebasis", "--seed", "11", "--json", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["suite"], "freebasis");
    assert_eq!(v["config"]["seed"], 11);
    for key in ["id", "anchor", "computed", "expected", "provenance", "tol", "pass", "gap", "leakage"] {
        assert!(v["records"][0].get(key).is_some(), "{key}");
    }
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn csv_has_one_row_per_record() {
    let (j, c) = (tmp("s.json"), tmp("s.csv"));
    let out = fockflow(&["run", "semiflow", "--json", j.to_str().unwrap(), "--csv", c.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
    let n = v["records"].as_array().unwrap().len();
    let mut rd = csv::Reader::from_path(&c).unwrap();
    assert_eq!(rd.headers().unwrap().iter().next(), Some("id"));
    assert_eq!(rd.records().count(), n);
}

#[test]
fn index_statements() {
    let out = fockflow(&["run", "indices", "--rank", "2", "--cells", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("car n=2: index = 2"));
    assert!(text.contains("clifford n=2 m=3: coupling index = 0"));
    assert!(text.contains("gauge group trivial"));
}

#[test]
fn usage_and_config_errors_exit_with_two() {
    assert_eq!(fockflow(&["run", "nonsense"]).status.code(), Some(2));
    let cfg = tmp("bad.cfg");
    std::fs::write(&cfg, "residual_tol = 5\n").unwrap();
    assert_eq!(fockflow(&["run", "ito", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(fockflow(&["run", "ito", "--depth", "0"]).status.code(), Some(2));
}

#[test]
fn failing_checks_exit_with_one() {
    // a cap too small for the Clifford models turns every fiber check into a failure
    let cfg = tmp("cap.cfg");
    std::fs::write(&cfg, "max_dim = 4\nkind = clifford\n").unwrap();
    let out = fockflow(&["run", "fibers", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("exceeds max_dim"));
}
