//! Acceptance criteria, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Duration;

#[allow(dead_code)]
#[path = "../src/suites.rs"]
mod suites;

use suites::Settings;

const CRITERIA: [(&str, Option<u64>); 9] = [
    ("ghz", Some(5)),
    ("cz", Some(1)),
    ("weaving", None),
    ("exponents", None),
    ("dual", Some(60)),
    ("appendix-a", None),
    ("appendix-b", Some(600)),
    ("montecarlo", None),
    ("properties", None),
];

fn main() -> ExitCode {
    let settings = Settings::default();
    let mut failed = 0;
    for (i, (suite, limit)) in CRITERIA.iter().enumerate() {
        let r = suites::run(suite, &settings).pop().expect("known suite");
        let slow = limit.is_some_and(|s| Duration::from_secs_f64(r.seconds) > Duration::from_secs(s));
        let pass = r.pass && !slow;
        let status = if pass { "PASS" } else { "FAIL" };
        let budget = limit.map_or(String::new(), |s| format!(", limit {s} s"));
        println!("{status} {}: {suite} ({} checks, {:.2} s{budget})", i + 1, r.checks, r.seconds);
        for f in r.failures.iter().take(5) {
            println!("    {f}");
        }
        if slow {
            println!("    over time limit");
        }
        failed += usize::from(!pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
