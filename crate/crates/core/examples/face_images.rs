//! Cluster a directory of PGM face images, one subdirectory per person.
//!
//! With no argument a small synthetic set is written to a temporary
//! directory first. Pass a path to use real images instead, e.g. the 40×10
//! layout `s1/1.pgm … s40/10.pgm`.
//!
//! ```text
//! cargo run --release --example face_images [DIR]
//! ```

use std::path::{Path, PathBuf};

use rpkm::dataio::{load_image_dir, write_pgm, GrayImage};
use rpkm::evaluation::{accuracy, normalized_objective};
use rpkm::harness::default_init;
use rpkm::kmeans::{project_and_cluster, SolverSpec};
use rpkm::projection::{Method, ProjectionConfig};
use rpkm::rng::{stream, Domain};

use rand::Rng;

/// `people` faces of 32×32 pixels, each a fixed template plus per-image noise.
fn synthetic_faces(root: &Path, people: usize, per_person: usize) -> rpkm::Result<()> {
    for person in 0..people {
        let dir = root.join(format!("s{}", person + 1));
        std::fs::create_dir_all(&dir).map_err(|e| rpkm::Error::Io { path: dir.clone(), source: e })?;
        let mut template_rng = stream(person as u64, Domain::Instance, 0);
        let template: Vec<f64> = (0..32 * 32).map(|_| template_rng.random_range(40.0..215.0)).collect();
        for shot in 0..per_person {
            let mut rng = stream(person as u64, Domain::Instance, shot as u64 + 1);
            let pixels =
                template.iter().map(|&v| (v + rng.random_range(-40.0..40.0)).clamp(0.0, 255.0) as u8).collect();
            write_pgm(&GrayImage { width: 32, height: 32, pixels }, dir.join(format!("{}.pgm", shot + 1)))?;
        }
    }
    Ok(())
}

fn main() -> rpkm::Result<()> {
    let scratch = tempfile::tempdir().expect("temporary directory");
    let root: PathBuf = match std::env::args().nth(1) {
        Some(dir) => dir.into(),
        None => {
            synthetic_faces(scratch.path(), 40, 10)?;
            scratch.path().to_path_buf()
        }
    };
    let faces = load_image_dir(&root, None)?;
    let k = faces.n_classes().unwrap_or(40);
    let truth = faces.labels.as_deref().expect("one subdirectory per person");
    println!("{} images of {} pixels, {k} people", faces.points.n_rows(), faces.points.n_cols());

    // First image of each person starts each cluster.
    let spec = SolverSpec::lloyd(default_init(&faces, k));
    for (method, t) in [(Method::SignMailman, 50), (Method::SvdEmbed, 50), (Method::None, 0)] {
        let cfg = ProjectionConfig::new(k, 0.25, 1)?.with_t(t.max(1))?;
        let run = project_and_cluster(&faces.points, k, &cfg, &spec, method)?;
        println!(
            "{:<11} t = {:>5}  F~ = {:.4}  accuracy = {:.4}  clustering {:.1} ms",
            method.name(),
            run.t,
            normalized_objective(&faces.points, run.assignment())?,
            accuracy(run.assignment(), truth)?,
            run.clustering_ms
        );
    }
    Ok(())
}
