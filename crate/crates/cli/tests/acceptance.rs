//! Acceptance run: every criterion at its stated tolerance, one PASS/FAIL
//! line each.

use std::process::Command;
use std::time::{Duration, Instant};

use fockflow_cli::{criterion, Config};

struct Criterion {
    number: u8,
    name: &'static str,
    limit: Option<Duration>,
}

const CRITERIA: [Criterion; 11] = [
    Criterion { number: 1, name: "CAR and free relations", limit: Some(Duration::from_secs(10)) },
    Criterion { number: 2, name: "intertwiners from the commutant", limit: None },
    Criterion { number: 3, name: "Clifford fibers are even wedge spaces", limit: Some(Duration::from_secs(120)) },
    Criterion { number: 4, name: "free fiber is the vacuum line", limit: None },
    Criterion { number: 5, name: "index table and trivial gauge groups", limit: None },
    Criterion { number: 6, name: "Ito isometry and properties", limit: None },
    Criterion { number: 7, name: "Exp and Log", limit: None },
    Criterion { number: 8, name: "free basis combinatorics", limit: None },
    Criterion { number: 9, name: "parity signs", limit: None },
    Criterion { number: 10, name: "tensor superadditivity", limit: None },
    Criterion { number: 11, name: "tau-semiflow tables", limit: None },
];

#[test]
fn acceptance_criteria() {
    let cfg = Config::default();
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let records = criterion(c.number, &cfg);
        let elapsed = start.elapsed();
        let bad: Vec<_> = records.iter().filter(|r| !r.pass).collect();
        let in_time = c.limit.is_none_or(|l| elapsed < l);
        let ok = !records.is_empty() && bad.is_empty() && in_time;
        println!(
            "criterion {:>2} {}: {} ({} checks, {:.2}s)",
            c.number,
            c.name,
            if ok { "PASS" } else { "FAIL" },
            records.len(),
            elapsed.as_secs_f64()
        );
        for r in bad {
            println!("    {}", r.line());
        }
        if !in_time {
            println!("    over the time limit of {:?}", c.limit.unwrap());
        }
        if !ok {
            failed.push(c.number);
        }
    }

    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_fockflow")).args(["run", "all"]).output().expect("binary runs");
    let elapsed = start.elapsed();
    let ok = status.status.code() == Some(0) && elapsed < Duration::from_secs(300);
    println!(
        "criterion 12 full default suite: {} (exit {:?}, {:.2}s)",
        if ok { "PASS" } else { "FAIL" },
        status.status.code(),
        elapsed.as_secs_f64()
    );
    if !ok {
        failed.push(12);
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
