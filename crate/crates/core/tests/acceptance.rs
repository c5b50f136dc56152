//! The ten acceptance criteria at their pinned sizes and time limits.
//!
//! Prints one line per criterion on stderr.

use std::io::Write;
use std::time::{Duration, Instant};

use katofan::verify::{run_suite, SuiteReport};

const SEED: u64 = 20_240_601;

struct Criterion {
    id: usize,
    name: &'static str,
    suite: &'static str,
    limit: Duration,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "saturation oracle equivalence", suite: "saturation", limit: Duration::from_secs(30) },
    Criterion { id: 2, name: "face oracle equivalence", suite: "faces", limit: Duration::from_secs(30) },
    Criterion { id: 3, name: "fs pushout universal property", suite: "pushout", limit: Duration::from_secs(60) },
    Criterion { id: 4, name: "spec and extended cone stratification", suite: "strata", limit: Duration::from_secs(10) },
    Criterion { id: 5, name: "gauss and arc multiplicativity", suite: "multiplicativity", limit: Duration::from_secs(20) },
    Criterion { id: 6, name: "pullbacks of eta tensor x", suite: "eta", limit: Duration::from_secs(20) },
    Criterion { id: 7, name: "retraction", suite: "retraction", limit: Duration::from_secs(20) },
    Criterion { id: 8, name: "quotient identification", suite: "quotient", limit: Duration::from_secs(30) },
    Criterion { id: 9, name: "twisted quotient", suite: "twisted", limit: Duration::from_secs(10) },
    Criterion { id: 10, name: "toric sanity", suite: "toric", limit: Duration::from_secs(5) },
];

fn run(c: &Criterion) -> (bool, String) {
    let start = Instant::now();
    let result = run_suite(c.suite, SEED);
    let elapsed = start.elapsed();
    let (ok, detail) = match result {
        Ok(r) => summarize(&r),
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = elapsed <= c.limit;
    let pass = ok && in_time;
    let line = format!(
        "[{}] criterion {:>2} {:<40} {:>8.2}s (limit {}s) {}{}",
        if pass { "PASS" } else { "FAIL" },
        c.id,
        c.name,
        elapsed.as_secs_f64(),
        c.limit.as_secs(),
        detail,
        if in_time { "" } else { " [time limit exceeded]" }
    );
    (pass, line)
}

fn summarize(r: &SuiteReport) -> (bool, String) {
    let stats: Vec<String> = r.stats.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut s = format!("cases={}", r.cases);
    if !stats.is_empty() {
        s += &format!(" {}", stats.join(" "));
    }
    if let Some(f) = r.failures.first() {
        s += &format!(" first failure: {f}");
    }
    (r.passed(), s)
}

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for c in CRITERIA {
        let (pass, line) = run(c);
        // straight to stderr so the lines show without --nocapture
        let _ = writeln!(std::io::stderr(), "{line}");
        if !pass {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
