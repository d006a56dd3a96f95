//! Random-projection dimensionality reduction for k-means clustering.
//!
//! Points (rows of an `n×d` matrix `A`) are multiplied by a `d×t` random
//! matrix with entries `±1/√t`, clustered in `t` dimensions, and the
//! resulting partition is scored back on `A`. With `t` on the order of
//! `k/ε²` the partition costs at most `2 + ε` times the optimum, with
//! constant probability. The product `A·R` is computed with the mailman
//! algorithm in `O(n·d·⌈t/log d⌉)` time.
//!
//! Modules:
//!
//! - [`matrix`]: dense kernels (products, norms, SVD, pseudo-inverse).
//! - [`projection`]: sign and Gaussian projections, the SVD baseline, a
//!   pairwise distortion report.
//! - [`mailman`]: the bucket-and-fold sign-matrix multiplication.
//! - [`kmeans`]: the objective, Lloyd, an exhaustive solver for tiny inputs,
//!   and [`kmeans::project_and_cluster`].
//! - [`evaluation`]: accuracy under optimal label matching and randomized
//!   checks of the projection's guarantees.
//! - [`dataio`]: synthetic mixtures, CSV, PGM image directories.
//! - [`harness`]: sweeps, benchmarks and the property suite behind the `rpkm` tool.
//!
//! ```
//! use rpkm::dataio::{generate_mixture, MixtureSpec};
//! use rpkm::kmeans::{project_and_cluster, Init, SolverSpec};
//! use rpkm::projection::{Method, ProjectionConfig};
//!
//! let data = generate_mixture(&MixtureSpec {
//!     n: 60, d: 256, k: 3, center_scale: 4.0, noise_sigma: 1.0, seed: 7,
//! })?;
//! let cfg = ProjectionConfig::new(3, 0.25, 7)?.with_t(32)?;
//! let spec = SolverSpec::lloyd(Init::FirstOfEachGroup { stride: 1 });
//! let run = project_and_cluster(&data.points, 3, &cfg, &spec, Method::SignMailman)?;
//! assert_eq!(run.t, 32);
//! assert!(run.original_objective >= 0.0);
//! # Ok::<(), rpkm::Error>(())
//! ```

pub mod dataio;
pub mod error;
pub mod evaluation;
pub mod harness;
pub mod kmeans;
pub mod mailman;
pub mod matching;
pub mod matrix;
pub mod projection;
pub mod rng;

pub use error::{Error, Result};
pub use matrix::Matrix;
