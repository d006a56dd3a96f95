//! Batch drivers behind the command-line tool: dimension sweeps, the
//! multiplication benchmark and the property suite, plus their CSV/JSON
//! output with an embedded run manifest.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::evaluation::{
    accuracy, decomposition_residual_check, jl_check, matmul_moment_check, moment_identity_check, norm_bound_check,
    normalized_objective, pseudo_inverse_bound_check, singular_value_check, theorem_distortion_trial, ExperimentRecord,
    PropertyReport, TrialEmbedding,
};
use crate::kmeans::{Init, SolverSpec};
use crate::mailman::{build_plan, project_mailman, project_on_the_fly};
use crate::matrix::{matmul, svd_thin, Matrix};
use crate::projection::{sample_sign_matrix, Method, ProjectionMatrix};
use crate::rng::Domain;

pub const CHECK_SCHEMA: &str = "rpkm.check/1";
pub const CLUSTER_SCHEMA: &str = "rpkm.cluster/1";
pub const EXPERIMENT_COLUMNS: [&str; 11] = [
    "method",
    "t",
    "k",
    "epsilon",
    "seed",
    "f_tilde",
    "accuracy",
    "iterations",
    "projection_ms",
    "clustering_ms",
    "wall_ms",
];
pub const BENCH_COLUMNS: [&str; 7] = ["impl", "n", "d", "t", "median_ms", "min_ms", "speedup_vs_naive"];

/// Everything needed to rerun a command. Only `timings_ms` varies between
/// identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: u64,
    pub parameters: BTreeMap<String, Value>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            seed,
            parameters: BTreeMap::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn time(&mut self, phase: &str, ms: f64) {
        *self.timings_ms.entry(phase.to_string()).or_insert(0.0) += ms;
    }

    /// `# manifest: {...}` line that heads CSV outputs.
    pub fn csv_comment(&self) -> String {
        format!("# manifest: {}\n", serde_json::to_string(self).expect("manifest serializes"))
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Lloyd start used by the tool when no indices are given: the first point
/// of each class when the labels have exactly `k` classes, else `k` seeded
/// random rows.
pub fn default_init(dataset: &Dataset, k: usize) -> Init {
    match &dataset.labels {
        Some(labels) if dataset.n_classes() == Some(k) => {
            Init::GivenIndices((0..k).map(|c| labels.iter().position(|&l| l == c).unwrap_or(0)).collect())
        }
        _ => Init::RandomRows,
    }
}

/// One record per `(method, t)`; the high-dimensional baseline (`hd`)
/// ignores `t` and yields a single record with `t = d`. `f_tilde` is the
/// clustering's objective on the original points over `‖A‖²_F`.
#[allow(clippy::too_many_arguments)]
pub fn run_experiment_sweep(
    dataset: &Dataset,
    k: usize,
    t_list: &[usize],
    methods: &[Method],
    spec: &SolverSpec,
    seed: u64,
    epsilon: f64,
) -> Result<Vec<ExperimentRecord>> {
    let a = &dataset.points;
    if t_list.contains(&0) {
        return Err(Error::param("t values must be positive"));
    }
    // One SVD serves every t of the svd method; each svd record is charged its full cost.
    let mut svd_ms = 0.0;
    let svd = if methods.contains(&Method::SvdEmbed) {
        let max_t = t_list.iter().copied().max().ok_or_else(|| Error::param("empty t list"))?;
        let start = Instant::now();
        let svd = svd_thin(a, max_t)?;
        svd_ms = elapsed_ms(start);
        Some(svd)
    } else {
        None
    };

    let mut records = Vec::new();
    for &method in methods {
        let ts: Vec<usize> = if method == Method::None { vec![a.n_cols()] } else { t_list.to_vec() };
        for t in ts {
            let start = Instant::now();
            let projected = match (&svd, method) {
                (Some(svd), Method::SvdEmbed) => Matrix::from_fn(a.n_rows(), t, |i, j| svd.u.get(i, j) * svd.sigma[j]),
                _ => method.project(a, t, seed)?,
            };
            let mut projection_ms = elapsed_ms(start);
            if method == Method::SvdEmbed {
                projection_ms += svd_ms;
            }

            let start = Instant::now();
            let result = spec.solve(&projected, k, seed)?;
            let clustering_ms = elapsed_ms(start);

            let start = Instant::now();
            let f_tilde = normalized_objective(a, &result.assignment)?;
            let acc = match &dataset.labels {
                Some(truth) => Some(accuracy(&result.assignment, truth)?),
                None => None,
            };
            let evaluation_ms = elapsed_ms(start);
            records.push(ExperimentRecord {
                method: method.name().to_string(),
                t,
                k,
                epsilon,
                seed,
                f_tilde,
                accuracy: acc,
                iterations: result.iterations,
                projection_ms,
                clustering_ms,
                wall_ms: projection_ms + clustering_ms + evaluation_ms,
            });
        }
    }
    Ok(records)
}

/// CSV with a manifest comment line, a header of [`EXPERIMENT_COLUMNS`] and
/// one row per record. Missing accuracy is an empty field.
pub fn experiment_csv(manifest: &RunManifest, records: &[ExperimentRecord]) -> String {
    let mut out = manifest.csv_comment();
    out.push_str(&EXPERIMENT_COLUMNS.join(","));
    out.push('\n');
    for r in records {
        let acc = r.accuracy.map(|a| format!("{a:?}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{:?},{},{:?},{},{},{:.4},{:.4},{:.4}\n",
            r.method,
            r.t,
            r.k,
            r.epsilon,
            r.seed,
            r.f_tilde,
            acc,
            r.iterations,
            r.projection_ms,
            r.clustering_ms,
            r.wall_ms
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchImpl {
    /// Dense multiplication by a stored sign matrix.
    Naive,
    /// Signed sums from codes regenerated per block, nothing stored.
    OnTheFly,
    Mailman,
}

impl BenchImpl {
    pub const ALL: [BenchImpl; 3] = [BenchImpl::Naive, BenchImpl::OnTheFly, BenchImpl::Mailman];

    pub fn name(self) -> &'static str {
        match self {
            BenchImpl::Naive => "naive",
            BenchImpl::OnTheFly => "on_the_fly",
            BenchImpl::Mailman => "mailman",
        }
    }
}

impl fmt::Display for BenchImpl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchImpl {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(BenchImpl::Naive),
            "on_the_fly" | "on-the-fly" => Ok(BenchImpl::OnTheFly),
            "mailman" => Ok(BenchImpl::Mailman),
            other => Err(Error::param(format!("unknown benchmark implementation '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub implementation: BenchImpl,
    pub n: usize,
    pub d: usize,
    pub t: usize,
    pub median_ms: f64,
    pub min_ms: f64,
    /// Naive median over this median; `None` when naive was not timed.
    pub speedup_vs_naive: Option<f64>,
}

pub const BENCH_REPS: usize = 5;
pub const CROSS_CHECK_TOL: f64 = 1e-10;

fn median_of(mut samples: Vec<f64>) -> (f64, f64) {
    samples.sort_by(f64::total_cmp);
    (samples[samples.len() / 2], samples[0])
}

fn time_reps(mut f: impl FnMut() -> Result<Matrix>) -> Result<(f64, f64)> {
    let mut samples = Vec::with_capacity(BENCH_REPS);
    for _ in 0..BENCH_REPS {
        let start = Instant::now();
        std::hint::black_box(f()?);
        samples.push(elapsed_ms(start));
    }
    Ok(median_of(samples))
}

fn relative_error(x: &Matrix, reference: &Matrix) -> Result<f64> {
    let diff = x.sub(reference)?.frobenius_norm();
    let scale = reference.frobenius_norm();
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

/// Times `a·R` for every `(d, t)` with a seeded `n×d` Gaussian `a`. Before
/// any timing, the mailman and on-the-fly products are checked against the
/// dense product; a disagreement aborts with [`Error::CrossCheck`].
pub fn run_bench(
    d_list: &[usize],
    t_list: &[usize],
    n: usize,
    seed: u64,
    impls: &[BenchImpl],
) -> Result<Vec<BenchRecord>> {
    if t_list.contains(&0) {
        return Err(Error::param("t values must be positive"));
    }
    if n == 0 || d_list.is_empty() || t_list.is_empty() || impls.is_empty() {
        return Err(Error::param("bench needs n >= 1 and nonempty d, t and implementation lists"));
    }
    let mut records = Vec::new();
    for &d in d_list {
        if d < 2 {
            return Err(Error::param(format!("bench needs d >= 2, got {d}")));
        }
        if !d.is_power_of_two() {
            log::warn!("d = {d} is not a power of two; the last mailman bucket level is partly unused");
        }
        let a = Matrix::gaussian(n, d, seed, Domain::Bench);
        for &t in t_list {
            let dense = sample_sign_matrix(d, t, seed)?.dense();
            let plan = build_plan(d, t, seed)?;
            let reference = matmul(&a, &dense)?;
            for (candidate, _) in
                [(project_mailman(&a, &plan)?, "mailman"), (project_on_the_fly(&a, d, t, seed)?, "on_the_fly")]
            {
                let relative_error = relative_error(&candidate, &reference)?;
                if relative_error.is_nan() || relative_error > CROSS_CHECK_TOL {
                    return Err(Error::CrossCheck { d, t, relative_error, tolerance: CROSS_CHECK_TOL });
                }
            }

            let mut cell = Vec::new();
            for &imp in impls {
                let (median_ms, min_ms) = match imp {
                    BenchImpl::Naive => time_reps(|| matmul(&a, &dense))?,
                    BenchImpl::OnTheFly => time_reps(|| project_on_the_fly(&a, d, t, seed))?,
                    BenchImpl::Mailman => time_reps(|| project_mailman(&a, &plan))?,
                };
                cell.push(BenchRecord { implementation: imp, n, d, t, median_ms, min_ms, speedup_vs_naive: None });
            }
            if let Some(naive) = cell.iter().find(|r| r.implementation == BenchImpl::Naive).map(|r| r.median_ms) {
                for r in &mut cell {
                    r.speedup_vs_naive = (r.median_ms > 0.0).then(|| naive / r.median_ms);
                }
            }
            records.extend(cell);
        }
    }
    Ok(records)
}

pub fn bench_csv(manifest: &RunManifest, records: &[BenchRecord]) -> String {
    let mut out = manifest.csv_comment();
    out.push_str(&BENCH_COLUMNS.join(","));
    out.push('\n');
    for r in records {
        let speedup = r.speedup_vs_naive.map(|s| format!("{s:.4}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.6},{}\n",
            r.implementation, r.n, r.d, r.t, r.median_ms, r.min_ms, speedup
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteScale {
    /// Reduced sizes and trial counts; seconds.
    Quick,
    /// The full trial counts.
    Full,
}

impl FromStr for SuiteScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(SuiteScale::Quick),
            "full" => Ok(SuiteScale::Full),
            other => Err(Error::param(format!("unknown scale '{other}' (quick|full)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub scale: SuiteScale,
    /// Multiplies every check's bound. Negative-control hook for tests.
    #[doc(hidden)]
    pub bound_scale: f64,
}

impl SuiteOptions {
    pub fn new(seed: u64, scale: SuiteScale) -> Self {
        SuiteOptions { seed, scale, bound_scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: String,
    pub manifest: RunManifest,
    pub all_passed: bool,
    pub reports: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Runs every randomized check: JL distortion, the moment identity, the
/// Frobenius norm bound, singular value preservation, the matrix product
/// moment, the pseudo-inverse bound, the decomposition residual, and two
/// end-to-end distortion trials.
pub fn run_property_suite(options: &SuiteOptions) -> Result<SuiteReport> {
    let seed = options.seed;
    let full = options.scale == SuiteScale::Full;
    let trials = if full { 100 } else { 20 };
    let mut manifest = RunManifest::new("check", seed).param("scale", options.scale).param("trials", trials);
    if options.bound_scale != 1.0 {
        manifest = manifest.param("bound_scale", options.bound_scale);
    }

    let sub = |i: u64| crate::rng::derive_seed(seed, i);
    let wide_a = Matrix::gaussian(50, 80, sub(1), Domain::Instance);
    let c = Matrix::gaussian(20, 100, sub(2), Domain::Instance);
    let s = Matrix::gaussian(10, 80, sub(3), Domain::Instance);
    let tm = Matrix::gaussian(80, 5, sub(4), Domain::Instance);

    type Check<'a> = (&'a str, Box<dyn Fn() -> Result<PropertyReport> + 'a>);
    let checks: Vec<Check<'_>> = vec![
        (
            "jl_distortion",
            Box::new(|| {
                if full {
                    jl_check(50, 1000, 2000, 0.3, 10, sub(10))
                } else {
                    jl_check(30, 400, 1000, 0.3, 3, sub(10))
                }
            }),
        ),
        ("moment_identity", Box::new(|| moment_identity_check(&c, 100, if full { 200 } else { 50 }, sub(11)))),
        ("norm_bound", Box::new(|| norm_bound_check(&c, 2, 0.5, trials, sub(12)))),
        ("singular_value_preservation", Box::new(|| singular_value_check(&wide_a, 5, 0.5, 2000, trials, sub(13)))),
        ("matmul_moment", Box::new(|| matmul_moment_check(&s, &tm, 200, if full { 200 } else { 50 }, sub(14)))),
        ("pseudo_inverse_bound", Box::new(|| pseudo_inverse_bound_check(&wide_a, 3, 0.5, 2000, trials, sub(15)))),
        ("decomposition_residual", Box::new(|| decomposition_residual_check(&wide_a, 3, 0.5, 2000, trials, sub(15)))),
        (
            "theorem_distortion_k2",
            Box::new(|| theorem_distortion_trial(10, 40, 2, 0.2, 500, trials, sub(16), TrialEmbedding::Sign)),
        ),
        (
            "theorem_distortion_k3",
            Box::new(|| theorem_distortion_trial(9, 30, 3, 0.3, 300, trials, sub(17), TrialEmbedding::Sign)),
        ),
    ];

    let mut reports = Vec::with_capacity(checks.len());
    for (name, run) in &checks {
        let start = Instant::now();
        let mut report = run()?;
        manifest.time(name, elapsed_ms(start));
        report.check_name = name.to_string();
        if options.bound_scale != 1.0 {
            let bound = report.bound * options.bound_scale;
            report.rescore(bound);
        }
        reports.push(report);
    }
    Ok(SuiteReport {
        schema_version: CHECK_SCHEMA.to_string(),
        manifest,
        all_passed: reports.iter().all(PropertyReport::passed),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{generate_mixture, MixtureSpec};

    fn small_dataset() -> Dataset {
        generate_mixture(&MixtureSpec { n: 30, d: 64, k: 3, center_scale: 5.0, noise_sigma: 0.5, seed: 2 }).unwrap()
    }

    #[test]
    fn sweep_emits_one_record_per_method_and_t() {
        let ds = small_dataset();
        let spec = SolverSpec::lloyd(Init::FirstOfEachGroup { stride: 1 });
        let methods = [Method::SignMailman, Method::SvdEmbed, Method::None];
        let recs = run_experiment_sweep(&ds, 3, &[5, 10], &methods, &spec, 1, 0.2).unwrap();
        assert_eq!(recs.len(), 5);
        assert_eq!(recs.last().unwrap().t, 64);
        assert!(recs.iter().all(|r| r.accuracy.is_some() && r.f_tilde >= 0.0));
    }

    #[test]
    fn sweep_without_labels_leaves_accuracy_empty() {
        let mut ds = small_dataset();
        ds.labels = None;
        let spec = SolverSpec::lloyd(Init::FirstOfEachGroup { stride: 1 });
        let recs = run_experiment_sweep(&ds, 3, &[4], &[Method::SignNaive], &spec, 1, 0.2).unwrap();
        assert_eq!(recs[0].accuracy, None);
        let csv = experiment_csv(&RunManifest::new("experiment", 1), &recs);
        let row = csv.lines().nth(2).unwrap();
        assert_eq!(row.split(',').nth(6), Some(""));
    }

    #[test]
    fn default_init_takes_first_member_of_each_class() {
        let ds = small_dataset();
        assert_eq!(default_init(&ds, 3), Init::GivenIndices(vec![0, 1, 2]));
        assert_eq!(default_init(&ds, 4), Init::RandomRows);
    }

    #[test]
    fn bench_rejects_zero_t_and_small_d() {
        assert!(run_bench(&[16], &[0], 1, 0, &BenchImpl::ALL).is_err());
        assert!(run_bench(&[1], &[4], 1, 0, &BenchImpl::ALL).is_err());
    }

    #[test]
    fn bench_reports_every_impl() {
        let recs = run_bench(&[64, 100], &[6, 13], 3, 9, &BenchImpl::ALL).unwrap();
        assert_eq!(recs.len(), 2 * 2 * 3);
        assert!(recs.iter().all(|r| r.speedup_vs_naive.is_some() && r.median_ms >= r.min_ms));
    }
}
