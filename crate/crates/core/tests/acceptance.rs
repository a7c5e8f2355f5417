//! One PASS/FAIL line per acceptance criterion, at the default tolerances.

use decaylab::verify::{run_all, CheckResult, Tier, Tolerances};

fn line(r: &CheckResult) -> String {
    let status = if r.passed_within(true) { "PASS" } else { "FAIL" };
    let metrics: Vec<String> = r.metrics.iter().take(6).map(|m| format!("{}={:.6e}", m.name, m.value)).collect();
    format!(
        "{status} criterion {:>2} {:<24} {:>8.2}s/{:>4}s {} [{}]",
        r.id,
        r.name,
        r.elapsed.as_secs_f64(),
        r.budget_secs,
        r.summary,
        metrics.join(", ")
    )
}

fn main() {
    let tol = Tolerances::default();
    let results = run_all(Tier::Full, &tol, 0);
    let mut failed = Vec::new();
    for r in &results {
        println!("{}", line(r));
        if !r.passed_within(true) {
            failed.push(r.id);
        }
    }

    let first = serde_json::to_string(&run_all(Tier::Quick, &tol, 0)).unwrap();
    let second = serde_json::to_string(&run_all(Tier::Quick, &tol, 0)).unwrap();
    let deterministic = first == second;
    println!(
        "{} criterion 13 determinism               quick tier twice, seed 0: {} bytes, identical = {deterministic}",
        if deterministic { "PASS" } else { "FAIL" },
        first.len()
    );
    if !deterministic {
        failed.push(13);
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
