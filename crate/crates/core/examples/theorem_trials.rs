//! Exact optimum versus the optimum found after projecting, on instances
//! small enough to enumerate every partition.
//!
//! ```text
//! cargo run --release --example theorem_trials
//! ```

use rpkm::evaluation::{theorem_distortion_trial, TrialEmbedding};

fn main() -> rpkm::Result<()> {
    let (n, d, k, eps) = (10, 40, 2, 0.2);
    for (embedding, t) in [
        (TrialEmbedding::Sign, 500),
        (TrialEmbedding::Sign, 20),
        (TrialEmbedding::Sign, 4),
        (TrialEmbedding::Rotation, d),
        (TrialEmbedding::Identity, d),
    ] {
        let r = theorem_distortion_trial(n, d, k, eps, t, 100, 5, embedding)?;
        let worst = r.samples().iter().copied().fold(1.0, f64::max);
        let mean = r.samples().iter().sum::<f64>() / r.trials as f64;
        println!(
            "{embedding:?} t={t:<4} ratio <= {:.1}: {:>3}/{}  mean {mean:.4}  worst {worst:.4}",
            r.bound, r.passes, r.trials
        );
    }
    Ok(())
}
