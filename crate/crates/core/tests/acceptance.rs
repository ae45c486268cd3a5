//! Runs every reproduction check and prints one line per check.

use std::process::ExitCode;

use profit_share::claims::Claim;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for claim in Claim::ALL {
        let started = std::time::Instant::now();
        match claim.check() {
            Ok(outcome) => {
                println!("{} [{:.1}s]", outcome.line(), started.elapsed().as_secs_f64());
                for f in &outcome.failures {
                    println!("    {f}");
                }
                if !outcome.passed {
                    failed.push(claim.name());
                }
            }
            Err(e) => {
                println!("[FAIL] {} {}: errored: {e}", claim.number(), claim.name());
                failed.push(claim.name());
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} checks passed", Claim::ALL.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {failed:?}");
        ExitCode::FAILURE
    }
}
