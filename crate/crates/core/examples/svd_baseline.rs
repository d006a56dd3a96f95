//! Random projection against the SVD embedding at equal dimension, next to
//! the rank-k lower bound on any k-partition's cost.
//!
//! ```text
//! cargo run --release --example svd_baseline
//! ```

use rpkm::dataio::{generate_mixture, MixtureSpec};
use rpkm::harness::default_init;
use rpkm::kmeans::{project_and_cluster, SolverSpec};
use rpkm::matrix::svd_thin;
use rpkm::projection::{Method, ProjectionConfig};

fn main() -> rpkm::Result<()> {
    let data = generate_mixture(&MixtureSpec { n: 200, d: 512, k: 8, center_scale: 0.7, noise_sigma: 1.0, seed: 9 })?;
    let k = 8;
    let a = &data.points;
    let sigma = svd_thin(a, k + 1)?.sigma;
    let lower = a.frobenius_norm_sq() - sigma[..k].iter().map(|s| s * s).sum::<f64>();
    println!("lower bound ||A - A_k||^2 = {lower:.1}");

    let spec = SolverSpec::lloyd(default_init(&data, k));
    for t in [k, 2 * k, 4 * k, 8 * k] {
        let cfg = ProjectionConfig::new(k, 0.25, 9)?.with_t(t)?;
        let rp = project_and_cluster(a, k, &cfg, &spec, Method::SignMailman)?;
        let svd = project_and_cluster(a, k, &cfg, &spec, Method::SvdEmbed)?;
        println!(
            "t = {t:>3}: rp {:>10.1} (x{:.3})   svd {:>10.1} (x{:.3})",
            rp.original_objective,
            rp.original_objective / lower,
            svd.original_objective,
            svd.original_objective / lower
        );
    }
    Ok(())
}
