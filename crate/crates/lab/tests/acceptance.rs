//! Runs every acceptance criterion at its stated size and tolerance and
//! prints one PASS/FAIL line per criterion.
//!
//! `cargo test --test acceptance -- --quick` runs the reduced suite.

use std::process::ExitCode;
use std::time::Instant;

use spdelab::acceptance::{run_suite, Scale};
use spdelab::runner::Runner;

fn main() -> ExitCode {
    let quick = std::env::args().any(|a| a == "--quick");
    let scale = if quick { Scale::Quick } else { Scale::Full };
    let runner = Runner::from_settings(None).expect("thread pool");
    let started = Instant::now();
    let mut last = Instant::now();
    let outcomes = run_suite(&runner, scale, 20_240_601, &[], &mut |o| {
        println!("{}  [{:.1}s]", o.line(), last.elapsed().as_secs_f64());
        last = Instant::now();
    });
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria passed in {:.1}s", outcomes.len(), started.elapsed().as_secs_f64());
    if passed == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
