//! Acceptance criteria. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero if any fails. `ACCEPTANCE_ONLY=3,5` restricts the run.

use smoothsum::verify::{self, SuiteResult, VerifyConfig};

const SEED: u64 = 42;
const TOL_IDENTITY: f64 = 1e-9;
const TOL_SUM: f64 = 1e-6;
/// Every scanned modulus is checked for both split invariants and dominance.
const SCAN_STRIDE: usize = 1;
const SCAN_QMAX: u64 = 1_000_000;

fn main() {
    let cfg = VerifyConfig { seed: SEED, tol_identity: TOL_IDENTITY, tol_sum: TOL_SUM, scan_stride: SCAN_STRIDE, scan_qmax: SCAN_QMAX };
    let only: Option<Vec<u32>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let suites: [(u32, fn(&VerifyConfig) -> SuiteResult); 10] = [
        (1, verify::criterion_1),
        (2, verify::criterion_2),
        (3, verify::criterion_3),
        (4, verify::criterion_4),
        (5, verify::criterion_5),
        (6, verify::criterion_6),
        (7, verify::criterion_7),
        (8, verify::criterion_8),
        (9, verify::criterion_9),
        (10, verify::criterion_10),
    ];
    let mut failed = 0;
    for (id, run) in suites {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let r = run(&cfg);
        println!("{}", verify::summary_line(&r));
        failed += !r.passed as u32;
    }
    println!("acceptance: {failed} criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
