//! Median-of-5 timings for dense, on-the-fly and mailman sign products.
//!
//! ```text
//! cargo run --release --example bench_multiply
//! ```

use rpkm::harness::{bench_csv, run_bench, BenchImpl, RunManifest};

fn main() -> rpkm::Result<()> {
    // The vector case at t = log2(d), then a small batch of rows.
    let mut records = run_bench(&[1 << 14], &[14], 1, 0, &BenchImpl::ALL)?;
    records.extend(run_bench(&[1024, 4096], &[10, 40, 120], 100, 0, &BenchImpl::ALL)?);
    print!("{}", bench_csv(&RunManifest::new("bench", 0), &records));
    Ok(())
}
