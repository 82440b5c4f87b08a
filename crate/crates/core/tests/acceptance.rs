//! Acceptance criteria 1-13 at desk scale. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::Path;
use std::time::{Duration, Instant};

use epslab::suites::{run_suite, SuiteOptions, SUITES};

const TIME_LIMIT: Duration = Duration::from_secs(60);

fn main() {
    let mut opts = SuiteOptions::desk_scale();
    opts.reports_dir = Some(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../reports"));
    let mut failed = 0;
    for (i, name) in SUITES.iter().enumerate() {
        let start = Instant::now();
        let result = run_suite(name, &opts);
        let took = start.elapsed();
        let line = match result {
            Ok(r) if r.passed() && r.checks > 0 && took <= TIME_LIMIT => {
                format!("PASS criterion {:2} {name}: {} checks in {:.2?}", i + 1, r.checks, took)
            }
            Ok(_) if took > TIME_LIMIT => {
                format!("FAIL criterion {:2} {name}: took {took:.2?}, limit {TIME_LIMIT:?}", i + 1)
            }
            Ok(r) if r.checks == 0 => format!("FAIL criterion {:2} {name}: no checks ran", i + 1),
            Ok(r) => format!(
                "FAIL criterion {:2} {name}: {} of {} checks failed; first: {}",
                i + 1,
                r.failures.len(),
                r.checks,
                r.failures[0]
            ),
            Err(e) => format!("FAIL criterion {:2} {name}: {e}", i + 1),
        };
        if line.starts_with("FAIL") {
            failed += 1;
        }
        println!("{line}");
    }
    println!("acceptance: {} of {} criteria passed", SUITES.len() - failed, SUITES.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
