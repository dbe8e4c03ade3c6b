//! Runs the full verification battery and prints one line per criterion.
//! Runs without the libtest harness so the lines are always shown.

use std::collections::BTreeMap;
use std::time::Instant;

use bergman_cli::{run_suite, Check, SuiteOptions, CRITERIA, KNOWN_UNATTAINABLE};

fn summary(checks: &[&Check]) -> String {
    checks
        .iter()
        .map(|c| match &c.error {
            Some(e) => format!("{}: error {e}", c.check_id),
            None => format!("{} = {:.3e}", c.check_id, c.value),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn main() {
    let start = Instant::now();
    let out = run_suite(&SuiteOptions::default(), &[]);
    let mut by_criterion: BTreeMap<&str, Vec<&Check>> = BTreeMap::new();
    for c in &out.checks {
        by_criterion.entry(c.criterion.as_str()).or_default().push(c);
    }
    let mut unexpected = Vec::new();
    for (k, crit) in CRITERIA.iter().enumerate() {
        let checks = by_criterion.get(crit.id).cloned().unwrap_or_default();
        let emitted: Vec<&str> = checks.iter().map(|c| c.check_id.as_str()).collect();
        assert_eq!(emitted, crit.check_ids, "check ids of {}", crit.id);
        let pass = checks.iter().all(|c| c.pass);
        let tag = match (pass, KNOWN_UNATTAINABLE.contains(&crit.id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known unattainable)",
            (false, false) => "FAIL",
        };
        println!("[{:>2}] {tag} {}: {}", k + 1, crit.id, summary(&checks));
        if !pass && !KNOWN_UNATTAINABLE.contains(&crit.id) {
            unexpected.push(crit.id);
        }
    }
    for (name, table) in &out.tables {
        println!("table {name}: {} rows", table.rows.len());
        for row in &table.rows {
            println!("  {}", row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "));
        }
    }
    println!("battery finished in {:.1?}", start.elapsed());
    if out.budget_exhausted {
        eprintln!("a quadrature ran out of budget");
        std::process::exit(1);
    }
    if !unexpected.is_empty() {
        eprintln!("failing criteria: {unexpected:?}");
        std::process::exit(1);
    }
    println!("acceptance: all criteria pass except the known unattainable {KNOWN_UNATTAINABLE:?}");
}
