// SPDX-License-Identifier: MIT OR Apache-2.0

// One PASS/FAIL line per acceptance criterion. Failures are reported, not
// hidden: the binary exits zero so that known discrepancies with published
// values stay visible without breaking the workspace test run. Set
// K3LAT_ACCEPTANCE_STRICT=1 to exit nonzero on any failure.

use k3lat::definite::Budget;
use k3lat::verify::Suite;

fn main() {
    let budget = Budget::unlimited();
    let suite = Suite::new(&budget);
    let mut failed = 0;
    for id in 1..=11 {
        let start = std::time::Instant::now();
        let r = suite.run(id);
        if !r.pass {
            failed += 1;
        }
        println!("{}  [{:.1}s]", r.line(), start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {} failed", 11 - failed, failed);
    if failed > 0 && std::env::var_os("K3LAT_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
