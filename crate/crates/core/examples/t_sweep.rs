//! Normalized objective and accuracy as the target dimension grows, written
//! as CSV to standard output.
//!
//! ```text
//! cargo run --release --example t_sweep > sweep.csv
//! ```

use rpkm::dataio::{generate_mixture, MixtureSpec};
use rpkm::harness::{default_init, experiment_csv, run_experiment_sweep, RunManifest};
use rpkm::kmeans::SolverSpec;
use rpkm::projection::Method;

fn main() -> rpkm::Result<()> {
    let mixture = MixtureSpec { n: 400, d: 1024, k: 40, center_scale: 1.0, noise_sigma: 1.0, seed: 1 };
    let data = generate_mixture(&mixture)?;
    let ts: Vec<usize> = (5..=300).step_by(5).collect();
    let methods = [Method::SignMailman, Method::Gaussian, Method::SvdEmbed, Method::None];
    let spec = SolverSpec::lloyd(default_init(&data, 40));

    let records = run_experiment_sweep(&data, 40, &ts, &methods, &spec, 1, 0.25)?;
    let manifest = RunManifest::new("experiment", 1).param("mixture", &mixture).param("t", &ts).param("solver", &spec);
    print!("{}", experiment_csv(&manifest, &records));

    let hd = records.last().expect("hd record").f_tilde;
    if let Some(r) = records.iter().find(|r| r.method == "rp_mailman" && r.f_tilde <= 1.01 * hd) {
        eprintln!("rp_mailman reaches within 1% of hd at t = {}", r.t);
    }
    Ok(())
}
