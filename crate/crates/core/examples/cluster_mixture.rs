//! Cluster a Gaussian mixture after each projection method and score the
//! partitions on the original points.
//!
//! ```text
//! cargo run --release --example cluster_mixture
//! ```

use rpkm::dataio::{generate_mixture, MixtureSpec};
use rpkm::evaluation::{accuracy, normalized_objective};
use rpkm::harness::default_init;
use rpkm::kmeans::{project_and_cluster, SolverSpec};
use rpkm::projection::{Method, ProjectionConfig};

fn main() -> rpkm::Result<()> {
    let data = generate_mixture(&MixtureSpec { n: 400, d: 1024, k: 40, center_scale: 1.0, noise_sigma: 1.0, seed: 3 })?;
    let k = 40;
    let truth = data.labels.as_deref().expect("mixtures are labelled");
    let spec = SolverSpec::lloyd(default_init(&data, k));

    // c = 0.2 gives t = 0.2 * 40 / 0.25^2 = 128.
    let cfg = ProjectionConfig::new(k, 0.25, 3)?.with_c(0.2)?;
    println!("{:<11} {:>5} {:>8} {:>9} {:>9} {:>9}", "method", "t", "F~", "accuracy", "proj ms", "clust ms");
    for method in Method::ALL {
        let run = project_and_cluster(&data.points, k, &cfg, &spec, method)?;
        println!(
            "{:<11} {:>5} {:>8.4} {:>9.4} {:>9.2} {:>9.2}",
            method.name(),
            run.t,
            normalized_objective(&data.points, run.assignment())?,
            accuracy(run.assignment(), truth)?,
            run.projection_ms,
            run.clustering_ms,
        );
    }
    Ok(())
}
