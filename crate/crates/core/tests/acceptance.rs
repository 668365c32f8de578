//! One line per acceptance criterion; every check inside a criterion must pass.
//! Runs without the test harness so the lines always print. `MWDKIT_CRITERIA=3,7`
//! restricts the run.

use std::time::Instant;

use mwdkit::verify::{run, Options, Scale, Suite};

fn main() {
    let opts = Options {
        seed: 42,
        scale: Scale::Full,
        break_det: false,
    };
    let only: Option<Vec<u8>> = std::env::var("MWDKIT_CRITERIA")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    for (i, suite) in Suite::EACH.iter().enumerate() {
        let k = i as u8 + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&k)) {
            continue;
        }
        let t = Instant::now();
        let checks = run(*suite, &opts).unwrap_or_else(|e| panic!("criterion {k}: {e}"));
        for c in &checks {
            eprintln!("    {c}");
        }
        let ok = checks.iter().all(|c| c.passed());
        println!(
            "criterion {k:>2} {:<12} {}  ({} checks, {:.1}s)",
            suite.name(),
            if ok { "PASS" } else { "FAIL" },
            checks.len(),
            t.elapsed().as_secs_f64()
        );
        if !ok {
            failed.push(k);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
