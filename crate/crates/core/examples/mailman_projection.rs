//! Multiply points by a random sign matrix three ways and compare.
//!
//! ```text
//! cargo run --release --example mailman_projection
//! ```

use std::time::Instant;

use rpkm::mailman::{block_row_multiply_counted, block_widths, build_plan, project_mailman, project_on_the_fly};
use rpkm::matrix::Matrix;
use rpkm::projection::{project_naive, sample_sign_matrix};
use rpkm::rng::Domain;

fn main() -> rpkm::Result<()> {
    let (n, d, t, seed) = (200, 4096, 60, 11);
    let a = Matrix::gaussian(n, d, seed, Domain::Instance);

    let plan = build_plan(d, t, seed)?;
    println!("d = {d}, t = {t}: blocks of widths {:?}", block_widths(d, t));

    let (_, ops) = block_row_multiply_counted(&plan.blocks()[0], a.row(0))?;
    let p = plan.blocks()[0].p();
    println!("additions for one row of one block: {ops} (d + 2^(p+1) = {})", d + (1 << (p + 1)));

    let start = Instant::now();
    let naive = project_naive(&a, &sample_sign_matrix(d, t, seed)?)?;
    let naive_ms = start.elapsed().as_secs_f64() * 1e3;

    let start = Instant::now();
    let fast = project_mailman(&a, &plan)?;
    let fast_ms = start.elapsed().as_secs_f64() * 1e3;

    let fly = project_on_the_fly(&a, d, t, seed)?;

    let err = |x: &Matrix| x.sub(&naive).map(|e| e.frobenius_norm() / naive.frobenius_norm());
    println!("naive   {naive_ms:8.2} ms");
    println!("mailman {fast_ms:8.2} ms, relative difference {:.1e}", err(&fast)?);
    println!("on-the-fly relative difference {:.1e}", err(&fly)?);
    Ok(())
}
