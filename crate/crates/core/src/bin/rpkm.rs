use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rpkm::dataio::{csv_string, generate_mixture, load_image_dir, read_csv, Dataset, MixtureSpec};
use rpkm::evaluation::{accuracy, normalized_objective};
use rpkm::harness::{
    bench_csv, default_init, experiment_csv, run_bench, run_experiment_sweep, run_property_suite, BenchImpl,
    RunManifest, SuiteOptions, SuiteScale, CLUSTER_SCHEMA,
};
use rpkm::kmeans::{Init, SolverSpec};
use rpkm::projection::{Method, ProjectionConfig};
use rpkm::{Error, Result};

/// Random-projection k-means: data generation, projection, clustering,
/// dimension sweeps, multiplication benchmarks and property checks.
#[derive(Parser)]
#[command(name = "rpkm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a labelled Gaussian mixture as CSV.
    Generate(GenerateArgs),
    /// Project a dataset and write the projected points as CSV.
    Project(ProjectArgs),
    /// Cluster a projected dataset and report the partition as JSON.
    Cluster(ClusterArgs),
    /// Sweep target dimensions and methods; one CSV row per (method, t).
    Experiment(ExperimentArgs),
    /// Time the sign-matrix product implementations; CSV.
    Bench(BenchArgs),
    /// Run the randomized property suite; JSON. Exit code 1 on any failure.
    Check(CheckArgs),
}

#[derive(Args)]
struct Common {
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct InputArgs {
    /// CSV file, or a directory of PGM images (one subdirectory per class).
    #[arg(long)]
    input: PathBuf,
    /// Divide pixel values by 255.
    #[arg(long)]
    normalize_pixels: bool,
}

#[derive(Args)]
struct DimArgs {
    /// Target dimension; overrides the value derived from k, epsilon and c.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// rp_mailman, rp_naive, gaussian, svd or hd.
    #[arg(long, default_value = "rp_mailman")]
    method: Method,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    /// Comma-separated row indices of the initial centroids.
    #[arg(long, value_delimiter = ',')]
    init_indices: Option<Vec<usize>>,
    /// Independent Lloyd runs from random starts; the best is kept.
    #[arg(long, default_value_t = 1)]
    replicates: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 400)]
    n: usize,
    #[arg(long, default_value_t = 1024)]
    d: usize,
    #[arg(long, default_value_t = 40)]
    k: usize,
    #[arg(long, default_value_t = 10.0)]
    center_scale: f64,
    #[arg(long, default_value_t = 1.0)]
    noise_sigma: f64,
}

#[derive(Args)]
struct ProjectArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    dim: DimArgs,
    /// Number of clusters the projection is sized for.
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    dim: DimArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    k: usize,
    /// Target dimensions (repeatable or comma-separated).
    #[arg(long = "t", value_delimiter = ',', required = true)]
    t: Vec<usize>,
    /// Methods to run (repeatable or comma-separated); all when omitted.
    #[arg(long, value_delimiter = ',')]
    method: Vec<Method>,
    /// Recorded with each row.
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    /// Input dimensions (repeatable or comma-separated).
    #[arg(long = "d", value_delimiter = ',', required = true)]
    d: Vec<usize>,
    /// Target dimensions (repeatable or comma-separated).
    #[arg(long = "t", value_delimiter = ',', required = true)]
    t: Vec<usize>,
    /// Rows of the multiplied matrix.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// naive, on_the_fly or mailman; all when omitted.
    #[arg(long = "impl", value_delimiter = ',')]
    implementation: Vec<BenchImpl>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    /// quick or full.
    #[arg(long, default_value = "quick")]
    scale: SuiteScale,
    #[arg(long, default_value_t = 1.0, hide = true)]
    bound_scale: f64,
}

fn load(input: &InputArgs) -> Result<Dataset> {
    let ds = if input.input.is_dir() { load_image_dir(&input.input, None)? } else { read_csv(&input.input)? };
    Ok(if input.normalize_pixels { ds.normalized_pixels() } else { ds })
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solver_spec(args: &SolverArgs, dataset: &Dataset, k: usize) -> SolverSpec {
    let init = match &args.init_indices {
        Some(idx) => Init::GivenIndices(idx.clone()),
        None => default_init(dataset, k),
    };
    SolverSpec::lloyd(init).with_max_iter(args.max_iter).with_replicates(args.replicates)
}

fn resolve_t(dim: &DimArgs, k: usize, seed: u64, d: usize) -> Result<(ProjectionConfig, usize)> {
    let mut cfg = ProjectionConfig::new(k, dim.epsilon, seed)?.with_c(dim.c)?;
    if let Some(t) = dim.t {
        cfg = cfg.with_t(t)?;
    }
    let t = if dim.method == Method::None { d } else { cfg.resolve_t()? };
    Ok((cfg, t))
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let spec = MixtureSpec {
        n: args.n,
        d: args.d,
        k: args.k,
        center_scale: args.center_scale,
        noise_sigma: args.noise_sigma,
        seed: args.common.seed,
    };
    let mut manifest = RunManifest::new("generate", spec.seed).param("mixture", &spec);
    let start = Instant::now();
    let ds = generate_mixture(&spec)?;
    manifest.time("generation", elapsed_ms(start));
    emit(args.common.output.as_deref(), &(manifest.csv_comment() + &csv_string(&ds)))
}

fn project(args: &ProjectArgs) -> Result<()> {
    let ds = load(&args.input)?;
    let seed = args.common.seed;
    let (_, t) = resolve_t(&args.dim, args.k, seed, ds.points.n_cols())?;
    let mut manifest = RunManifest::new("project", seed)
        .param("input", &args.input.input)
        .param("normalize_pixels", args.input.normalize_pixels)
        .param("method", args.dim.method.name())
        .param("k", args.k)
        .param("epsilon", args.dim.epsilon)
        .param("c", args.dim.c)
        .param("t", t);
    let start = Instant::now();
    let projected = args.dim.method.project(&ds.points, t, seed)?;
    manifest.time("projection", elapsed_ms(start));
    let out = Dataset::new(projected, ds.labels.clone(), ds.source.clone())?;
    emit(args.common.output.as_deref(), &(manifest.csv_comment() + &csv_string(&out)))
}

#[derive(Serialize)]
struct ClusterReport {
    schema_version: &'static str,
    manifest: RunManifest,
    method: String,
    t: usize,
    k: usize,
    labels: Vec<usize>,
    cluster_sizes: Vec<usize>,
    /// Objective in the projected space.
    projected_objective: f64,
    /// Objective of the same partition on the input points.
    original_objective: f64,
    f_tilde: f64,
    accuracy: Option<f64>,
    iterations: usize,
    converged: bool,
    objective_trace: Vec<f64>,
}

fn cluster(args: &ClusterArgs) -> Result<()> {
    let ds = load(&args.input)?;
    let seed = args.common.seed;
    let (cfg, t) = resolve_t(&args.dim, args.k, seed, ds.points.n_cols())?;
    let spec = solver_spec(&args.solver, &ds, args.k);
    let mut manifest = RunManifest::new("cluster", seed)
        .param("input", &args.input.input)
        .param("normalize_pixels", args.input.normalize_pixels)
        .param("method", args.dim.method.name())
        .param("k", args.k)
        .param("epsilon", args.dim.epsilon)
        .param("c", args.dim.c)
        .param("t", t)
        .param("solver", &spec);
    let run = rpkm::kmeans::project_and_cluster(&ds.points, args.k, &cfg, &spec, args.dim.method)?;
    manifest.time("projection", run.projection_ms);
    manifest.time("clustering", run.clustering_ms);

    let start = Instant::now();
    let f_tilde = normalized_objective(&ds.points, run.assignment())?;
    let acc = match &ds.labels {
        Some(truth) => Some(accuracy(run.assignment(), truth)?),
        None => None,
    };
    manifest.time("evaluation", elapsed_ms(start));

    let report = ClusterReport {
        schema_version: CLUSTER_SCHEMA,
        manifest,
        method: run.method.name().to_string(),
        t: run.t,
        k: args.k,
        labels: run.assignment().labels().to_vec(),
        cluster_sizes: run.assignment().cluster_sizes().to_vec(),
        projected_objective: run.projected.objective,
        original_objective: run.original_objective,
        f_tilde,
        accuracy: acc,
        iterations: run.projected.iterations,
        converged: run.projected.converged,
        objective_trace: run.projected.objective_trace.clone(),
    };
    emit(args.common.output.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))
}

fn experiment(args: &ExperimentArgs) -> Result<()> {
    let ds = load(&args.input)?;
    let seed = args.common.seed;
    let methods = if args.method.is_empty() { Method::ALL.to_vec() } else { args.method.clone() };
    let spec = solver_spec(&args.solver, &ds, args.k);
    let mut manifest = RunManifest::new("experiment", seed)
        .param("input", &args.input.input)
        .param("normalize_pixels", args.input.normalize_pixels)
        .param("k", args.k)
        .param("t", &args.t)
        .param("methods", methods.iter().map(|m| m.name()).collect::<Vec<_>>())
        .param("epsilon", args.epsilon)
        .param("solver", &spec);
    let records = run_experiment_sweep(&ds, args.k, &args.t, &methods, &spec, seed, args.epsilon)?;
    for r in &records {
        manifest.time("projection", r.projection_ms);
        manifest.time("clustering", r.clustering_ms);
        manifest.time("evaluation", r.wall_ms - r.projection_ms - r.clustering_ms);
    }
    emit(args.common.output.as_deref(), &experiment_csv(&manifest, &records))
}

fn bench(args: &BenchArgs) -> Result<()> {
    let impls = if args.implementation.is_empty() { BenchImpl::ALL.to_vec() } else { args.implementation.clone() };
    let seed = args.common.seed;
    let mut manifest = RunManifest::new("bench", seed)
        .param("d", &args.d)
        .param("t", &args.t)
        .param("n", args.n)
        .param("impl", &impls);
    let start = Instant::now();
    let records = run_bench(&args.d, &args.t, args.n, seed, &impls)?;
    manifest.time("bench", elapsed_ms(start));
    emit(args.common.output.as_deref(), &bench_csv(&manifest, &records))
}

fn check(args: &CheckArgs) -> Result<bool> {
    let mut options = SuiteOptions::new(args.common.seed, args.scale);
    options.bound_scale = args.bound_scale;
    let report = run_property_suite(&options)?;
    emit(args.common.output.as_deref(), &report.to_json()?)?;
    for r in &report.reports {
        eprintln!(
            "{:<28} {} ({}/{} within {:.4e})",
            r.check_name,
            if r.passed() { "pass" } else { "FAIL" },
            r.passes,
            r.trials,
            r.bound
        );
    }
    Ok(report.all_passed)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Generate(a) => generate(a).map(|_| true),
        Command::Project(a) => project(a).map(|_| true),
        Command::Cluster(a) => cluster(a).map(|_| true),
        Command::Experiment(a) => experiment(a).map(|_| true),
        Command::Bench(a) => bench(a).map(|_| true),
        Command::Check(a) => check(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
