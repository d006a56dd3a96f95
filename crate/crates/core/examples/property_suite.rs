//! Run the randomized property suite and print one line per check.
//!
//! ```text
//! cargo run --release --example property_suite [quick|full]
//! ```

use rpkm::harness::{run_property_suite, SuiteOptions, SuiteScale};

fn main() -> rpkm::Result<()> {
    let scale: SuiteScale = std::env::args().nth(1).as_deref().unwrap_or("quick").parse()?;
    let report = run_property_suite(&SuiteOptions::new(7, scale))?;
    for r in &report.reports {
        let worst = r.samples().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{:<28} {:>4}/{:<4} need {:<4} bound {:<10.4e} worst {:.4e}",
            r.check_name, r.passes, r.trials, r.required_passes, r.bound, worst
        );
    }
    println!("all passed: {}", report.all_passed);
    Ok(())
}
