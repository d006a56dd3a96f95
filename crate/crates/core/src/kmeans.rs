//! The k-means objective, Lloyd's heuristic, an exhaustive solver for tiny
//! instances, and the project-then-cluster pipeline.

use std::time::Instant;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{matmul, Matrix};
use crate::projection::{Method, ProjectionConfig};
use crate::rng::{self, Domain};

/// Largest `n` the exhaustive solver accepts.
pub const BRUTE_FORCE_MAX_N: usize = 14;

/// Cluster membership of `n` points among `k` clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    labels: Vec<usize>,
    k: usize,
    cluster_sizes: Vec<usize>,
}

impl Assignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("assignment needs k >= 1"));
        }
        let mut cluster_sizes = vec![0; k];
        for (i, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(Error::param(format!("label {l} of point {i} is not below k = {k}")));
            }
            cluster_sizes[l] += 1;
        }
        Ok(Assignment { labels, k, cluster_sizes })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn cluster_sizes(&self) -> &[usize] {
        &self.cluster_sizes
    }

    pub fn nonempty_clusters(&self) -> usize {
        self.cluster_sizes.iter().filter(|&&z| z > 0).count()
    }

    /// The `n×k` indicator matrix with `X_ij = 1/√z_j` when point `i` is in
    /// cluster `j`. Columns of empty clusters are zero.
    pub fn indicator_matrix(&self) -> Matrix {
        Matrix::from_fn(self.n(), self.k, |i, j| {
            if self.labels[i] == j {
                1.0 / (self.cluster_sizes[j] as f64).sqrt()
            } else {
                0.0
            }
        })
    }

    /// Per-cluster means; rows of empty clusters are zero.
    pub fn centroids(&self, a: &Matrix) -> Result<Matrix> {
        self.check_rows(a)?;
        let d = a.n_cols();
        let mut sums = vec![0.0; self.k * d];
        for (row, &l) in a.row_iter().zip(&self.labels) {
            for (s, &v) in sums[l * d..(l + 1) * d].iter_mut().zip(row) {
                *s += v;
            }
        }
        for (j, &z) in self.cluster_sizes.iter().enumerate() {
            if z > 0 {
                sums[j * d..(j + 1) * d].iter_mut().for_each(|s| *s /= z as f64);
            }
        }
        Ok(Matrix::from_parts_unchecked(self.k, d, sums))
    }

    fn check_rows(&self, a: &Matrix) -> Result<()> {
        if a.n_rows() != self.n() {
            return Err(Error::param(format!(
                "assignment has {} labels but the matrix has {} rows",
                self.n(),
                a.n_rows()
            )));
        }
        Ok(())
    }
}

/// `‖A − XXᵀA‖²_F`, evaluated as the summed squared distance of every point
/// to its cluster mean, in point order.
pub fn objective(a: &Matrix, asg: &Assignment) -> Result<f64> {
    let centroids = asg.centroids(a)?;
    Ok(a.row_iter().zip(asg.labels()).map(|(row, &l)| sq_dist(row, centroids.row(l))).sum())
}

/// `‖A − XXᵀA‖²_F` evaluated literally through the indicator matrix.
pub fn objective_via_indicator(a: &Matrix, asg: &Assignment) -> Result<f64> {
    asg.check_rows(a)?;
    let x = asg.indicator_matrix();
    let xxt_a = matmul(&x, &matmul(&x.transpose(), a)?)?;
    Ok(a.sub(&xxt_a)?.frobenius_norm_sq())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Lloyd,
    BruteForce,
}

/// How Lloyd picks its starting centroids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Rows at these indices, one per cluster.
    GivenIndices(Vec<usize>),
    /// Rows `0, stride, 2·stride, …` (the first point of each group when
    /// the data are stored group by group).
    FirstOfEachGroup { stride: usize },
    /// `k` distinct rows drawn from the seed.
    RandomRows,
}

impl Init {
    fn indices(&self, n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
        let idx = match self {
            Init::GivenIndices(v) => v.clone(),
            Init::FirstOfEachGroup { stride } => {
                if *stride == 0 {
                    return Err(Error::param("init stride must be positive"));
                }
                (0..k).map(|j| j * stride).collect()
            }
            Init::RandomRows => {
                let mut rng = rng::stream(seed, Domain::LloydInit, 0);
                index::sample(&mut rng, n, k).into_vec()
            }
        };
        if idx.len() != k {
            return Err(Error::param(format!("init supplies {} rows for k = {k}", idx.len())));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
            return Err(Error::param(format!("init row {bad} out of range for n = {n}")));
        }
        Ok(idx)
    }
}

/// A k-means solver and its approximation guarantee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub kind: SolverKind,
    /// Approximation factor; 1 for the exhaustive solver. Lloyd has no
    /// worst-case factor, and reports 1 as a nominal value.
    pub gamma: f64,
    /// Failure probability.
    pub delta_gamma: f64,
    pub max_iter: usize,
    /// Lloyd stops once the relative objective decrease falls below this.
    pub tol: f64,
    pub init: Init,
    /// Independent Lloyd runs; the lowest objective wins. Replicate `r`
    /// draws its random init from a seed derived from `(seed, r)`.
    pub replicates: usize,
}

impl SolverSpec {
    pub fn lloyd(init: Init) -> Self {
        SolverSpec {
            kind: SolverKind::Lloyd,
            gamma: 1.0,
            delta_gamma: 0.0,
            max_iter: 100,
            tol: 1e-9,
            init,
            replicates: 1,
        }
    }

    pub fn brute_force() -> Self {
        SolverSpec {
            kind: SolverKind::BruteForce,
            gamma: 1.0,
            delta_gamma: 0.0,
            max_iter: 0,
            tol: 0.0,
            init: Init::RandomRows,
            replicates: 1,
        }
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.gamma.is_nan() || self.gamma < 1.0 {
            return Err(Error::param(format!("gamma must be >= 1, got {}", self.gamma)));
        }
        if !(0.0..1.0).contains(&self.delta_gamma) {
            return Err(Error::param(format!("delta_gamma must lie in [0, 1), got {}", self.delta_gamma)));
        }
        if self.kind == SolverKind::Lloyd && (self.max_iter == 0 || self.replicates == 0) {
            return Err(Error::param("Lloyd needs max_iter >= 1 and replicates >= 1"));
        }
        Ok(())
    }

    /// Runs this solver on `a`.
    pub fn solve(&self, a: &Matrix, k: usize, seed: u64) -> Result<KMeansResult> {
        match self.kind {
            SolverKind::Lloyd => lloyd(a, k, self, seed),
            SolverKind::BruteForce => brute_force_optimal(a, k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub assignment: Assignment,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each assignment step; non-increasing.
    pub objective_trace: Vec<f64>,
}

/// Lloyd's heuristic: alternate nearest-centroid assignment and centroid
/// recomputation.
///
/// Ties go to the lowest cluster index. A cluster left empty by an
/// assignment step receives the point farthest from its current centroid
/// (taken from a cluster with at least two points). Iteration stops when the
/// assignment repeats, the relative objective decrease drops below
/// `spec.tol`, or `spec.max_iter` assignment steps have run.
pub fn lloyd(a: &Matrix, k: usize, spec: &SolverSpec, seed: u64) -> Result<KMeansResult> {
    spec.validate()?;
    let n = a.n_rows();
    if k == 0 || k > n {
        return Err(Error::param(format!("k = {k} must lie in 1..={n}")));
    }
    let mut best: Option<KMeansResult> = None;
    for r in 0..spec.replicates {
        let run_seed = if r == 0 { seed } else { rng::derive_seed(seed, r as u64) };
        let init = spec.init.indices(n, k, run_seed)?;
        let result = lloyd_single(a, k, a.select_rows(&init), spec)?;
        if best.as_ref().is_none_or(|b| result.objective < b.objective) {
            best = Some(result);
        }
    }
    Ok(best.expect("at least one replicate"))
}

fn lloyd_single(a: &Matrix, k: usize, mut centroids: Matrix, spec: &SolverSpec) -> Result<KMeansResult> {
    let mut labels: Option<Vec<usize>> = None;
    let mut trace: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut asg = None;
    while iterations < spec.max_iter {
        iterations += 1;
        let mut next = nearest_centroids(a, &centroids);
        repair_empty_clusters(a, &centroids, &mut next, k);
        if labels.as_ref() == Some(&next) {
            converged = true;
            break;
        }
        let current = Assignment::new(next.clone(), k)?;
        let obj = objective(a, &current)?;
        centroids = current.centroids(a)?;
        let previous = trace.last().copied();
        trace.push(obj);
        labels = Some(next);
        asg = Some(current);
        if let Some(prev) = previous {
            if prev <= 0.0 || (prev - obj) / prev < spec.tol {
                converged = true;
                break;
            }
        }
    }
    let assignment = asg.expect("max_iter >= 1 ensures one assignment step");
    Ok(KMeansResult {
        objective: *trace.last().expect("non-empty trace"),
        assignment,
        iterations,
        converged,
        objective_trace: trace,
    })
}

fn nearest_centroids(a: &Matrix, centroids: &Matrix) -> Vec<usize> {
    let nearest = |row: &[f64]| {
        let mut best = (0, f64::INFINITY);
        for (j, c) in centroids.row_iter().enumerate() {
            let d = sq_dist(row, c);
            if d < best.1 {
                best = (j, d);
            }
        }
        best.0
    };
    if a.n_rows() * centroids.n_rows() * a.n_cols() >= 1 << 15 {
        (0..a.n_rows()).into_par_iter().map(|i| nearest(a.row(i))).collect()
    } else {
        a.row_iter().map(nearest).collect()
    }
}

/// Moves far points into empty clusters until every cluster is used.
fn repair_empty_clusters(a: &Matrix, centroids: &Matrix, labels: &mut [usize], k: usize) {
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    let mut moved = vec![false; labels.len()];
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut far: Option<(usize, f64)> = None;
        for (i, &l) in labels.iter().enumerate() {
            if moved[i] || sizes[l] < 2 {
                continue;
            }
            let d = sq_dist(a.row(i), centroids.row(l));
            if far.is_none_or(|(_, best)| d > best) {
                far = Some((i, d));
            }
        }
        if let Some((i, _)) = far {
            sizes[labels[i]] -= 1;
            labels[i] = empty;
            sizes[empty] += 1;
            moved[i] = true;
        }
    }
}

/// Exhaustive k-means: enumerates every partition of the rows into at most
/// `k` nonempty clusters (restricted-growth strings) and returns the cheapest.
/// Refuses instances with more than [`BRUTE_FORCE_MAX_N`] points.
pub fn brute_force_optimal(a: &Matrix, k: usize) -> Result<KMeansResult> {
    let n = a.n_rows();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge { n, bound: BRUTE_FORCE_MAX_N });
    }
    if k == 0 || k > n {
        return Err(Error::param(format!("k = {k} must lie in 1..={n}")));
    }

    // With G = AAᵀ, cost = Σ_i G_ii − Σ_j (1/z_j) Σ_{i,i'∈j} G_ii'. Candidates
    // within a relative hair of the running minimum are rescored exactly.
    let gram = matmul(a, &a.transpose())?;
    let trace: f64 = (0..n).map(|i| gram.get(i, i)).sum();
    let mut best_fast = f64::INFINITY;
    let mut candidates: Vec<(f64, Vec<usize>)> = Vec::new();
    let slack = |v: f64| v + 1e-9 * trace.abs().max(f64::MIN_POSITIVE);

    let mut rgs = vec![0usize; n];
    let mut block_sum = vec![0.0; k];
    let mut block_size = vec![0usize; k];
    loop {
        block_sum.iter_mut().for_each(|s| *s = 0.0);
        block_size.iter_mut().for_each(|z| *z = 0);
        for i in 0..n {
            let li = rgs[i];
            block_size[li] += 1;
            let mut s = gram.get(i, i);
            for (i2, &l2) in rgs[..i].iter().enumerate() {
                if l2 == li {
                    s += 2.0 * gram.get(i, i2);
                }
            }
            block_sum[li] += s;
        }
        let explained: f64 =
            block_sum.iter().zip(&block_size).filter(|(_, &z)| z > 0).map(|(s, &z)| s / z as f64).sum();
        let cost = trace - explained;
        if cost <= slack(best_fast) {
            if cost < best_fast {
                best_fast = cost;
                candidates.retain(|(c, _)| *c <= slack(best_fast));
            }
            candidates.push((cost, rgs.clone()));
            if candidates.len() > 256 {
                // Degenerate inputs (many coincident points) tie everywhere.
                candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
                candidates.truncate(64);
            }
        }
        if !next_rgs(&mut rgs, k) {
            break;
        }
    }

    let mut best: Option<(f64, Assignment)> = None;
    for (_, labels) in candidates {
        let asg = Assignment::new(labels, k)?;
        let exact = objective(a, &asg)?;
        if best.as_ref().is_none_or(|(b, _)| exact < *b) {
            best = Some((exact, asg));
        }
    }
    let (obj, assignment) = best.expect("at least one partition");
    Ok(KMeansResult { assignment, objective: obj, iterations: 0, converged: true, objective_trace: vec![obj] })
}

/// Advances a restricted-growth string (`s_0 = 0`, `s_i ≤ 1 + max(s_<i)`,
/// values `< k`) to its lexicographic successor.
fn next_rgs(s: &mut [usize], k: usize) -> bool {
    let n = s.len();
    for i in (1..n).rev() {
        let prefix_max = s[..i].iter().copied().max().unwrap_or(0);
        if s[i] <= prefix_max && s[i] + 1 < k {
            s[i] += 1;
            s[i + 1..].iter_mut().for_each(|v| *v = 0);
            return true;
        }
    }
    false
}

/// Outcome of clustering a projection and scoring it on the original points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineResult {
    pub method: Method,
    /// Dimension of the space that was clustered.
    pub t: usize,
    /// Clustering as computed in the projected space.
    pub projected: KMeansResult,
    /// Objective of the same partition evaluated on the original points.
    pub original_objective: f64,
    pub projection_ms: f64,
    pub clustering_ms: f64,
}

impl PipelineResult {
    pub fn assignment(&self) -> &Assignment {
        &self.projected.assignment
    }
}

/// Projects `a` with `method`, clusters the projection with `spec`, and
/// evaluates the resulting partition on `a` itself.
pub fn project_and_cluster(
    a: &Matrix,
    k: usize,
    cfg: &ProjectionConfig,
    spec: &SolverSpec,
    method: Method,
) -> Result<PipelineResult> {
    let t = match method {
        Method::None => a.n_cols(),
        _ => cfg.resolve_t()?,
    };
    let start = Instant::now();
    let projected = method.project(a, t, cfg.seed)?;
    let projection_ms = start.elapsed().as_secs_f64() * 1e3;

    let start = Instant::now();
    let result = spec.solve(&projected, k, cfg.seed)?;
    let clustering_ms = start.elapsed().as_secs_f64() * 1e3;

    let original_objective = objective(a, &result.assignment)?;
    Ok(PipelineResult { method, t, projected: result, original_objective, projection_ms, clustering_ms })
}

#[inline]
pub(crate) fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> Matrix {
        Matrix::from_rows(&points.iter().map(|&p| vec![p]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn assignment_validation() {
        assert!(Assignment::new(vec![0, 2], 2).is_err());
        assert!(Assignment::new(vec![], 0).is_err());
        let asg = Assignment::new(vec![1, 1, 0, 1], 3).unwrap();
        assert_eq!(asg.cluster_sizes(), &[1, 3, 0]);
        assert_eq!(asg.nonempty_clusters(), 2);
    }

    #[test]
    fn indicator_is_orthonormal_on_used_clusters() {
        let asg = Assignment::new(vec![0, 1, 1, 2, 2, 2], 3).unwrap();
        let x = asg.indicator_matrix();
        let xtx = matmul(&x.transpose(), &x).unwrap();
        assert!(xtx.sub(&Matrix::identity(3)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn objective_examples() {
        let same = Matrix::from_rows(&vec![vec![1.0, 2.0]; 4]).unwrap();
        assert_eq!(objective(&same, &Assignment::new(vec![0; 4], 1).unwrap()).unwrap(), 0.0);
        let pts = line(&[0.0, 2.0]);
        assert_eq!(objective(&pts, &Assignment::new(vec![0, 0], 1).unwrap()).unwrap(), 2.0);
        assert!(objective(&pts, &Assignment::new(vec![0], 1).unwrap()).is_err());
    }

    #[test]
    fn objective_matches_indicator_form() {
        let a = Matrix::gaussian(6, 3, 5, Domain::Instance);
        let asg = Assignment::new(vec![0, 1, 1, 0, 1, 0], 2).unwrap();
        let fast = objective(&a, &asg).unwrap();
        let slow = objective_via_indicator(&a, &asg).unwrap();
        assert!((fast - slow).abs() <= 1e-10 * slow);
    }

    #[test]
    fn rgs_enumerates_partitions() {
        // Σ_{j≤k} S(n, j): n=5,k=2 → 1+15; n=5,k=5 → Bell(5) = 52.
        let count = |n: usize, k: usize| {
            let mut s = vec![0; n];
            let mut c = 1;
            while next_rgs(&mut s, k) {
                c += 1;
            }
            c
        };
        assert_eq!(count(5, 2), 16);
        assert_eq!(count(5, 5), 52);
        assert_eq!(count(4, 1), 1);
        assert_eq!(count(1, 3), 1);
    }

    #[test]
    fn brute_force_examples() {
        let r = brute_force_optimal(&line(&[0.0, 1.0, 10.0]), 2).unwrap();
        assert!((r.objective - 0.5).abs() < 1e-12);
        let l = r.assignment.labels();
        assert_eq!(l[0], l[1]);
        assert_ne!(l[0], l[2]);

        let a = Matrix::gaussian(7, 3, 2, Domain::Instance);
        let one = brute_force_optimal(&a, 1).unwrap();
        let scatter = objective(&a, &Assignment::new(vec![0; 7], 1).unwrap()).unwrap();
        assert_eq!(one.objective, scatter);
    }

    #[test]
    fn brute_force_guard() {
        let a = Matrix::zeros(BRUTE_FORCE_MAX_N + 1, 2);
        match brute_force_optimal(&a, 2) {
            Err(Error::TooLarge { n, bound }) => assert_eq!((n, bound), (15, BRUTE_FORCE_MAX_N)),
            other => panic!("expected refusal, got {other:?}"),
        }
        assert!(brute_force_optimal(&Matrix::zeros(3, 2), 4).is_err());
    }

    #[test]
    fn lloyd_k_equals_n() {
        let a = Matrix::gaussian(6, 2, 8, Domain::Instance);
        let r = lloyd(&a, 6, &SolverSpec::lloyd(Init::RandomRows), 1).unwrap();
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.assignment.nonempty_clusters(), 6);
    }

    #[test]
    fn lloyd_two_blobs() {
        let mut rows = Vec::new();
        let noise = Matrix::gaussian(20, 2, 4, Domain::Instance);
        for i in 0..20 {
            let center = if i < 10 { -50.0 } else { 50.0 };
            rows.push(vec![center + noise.get(i, 0), noise.get(i, 1)]);
        }
        let a = Matrix::from_rows(&rows).unwrap();
        let spec = SolverSpec::lloyd(Init::GivenIndices(vec![0, 10]));
        let r = lloyd(&a, 2, &spec, 0).unwrap();
        assert!(r.converged);
        let truth = Assignment::new((0..20).map(|i| i / 10).collect(), 2).unwrap();
        let scatter = objective(&a, &truth).unwrap();
        assert!((r.objective - scatter).abs() <= 1e-12 * scatter);
    }

    #[test]
    fn lloyd_rejects_bad_parameters() {
        let a = Matrix::gaussian(4, 2, 1, Domain::Instance);
        assert!(lloyd(&a, 5, &SolverSpec::lloyd(Init::RandomRows), 0).is_err());
        assert!(lloyd(&a, 2, &SolverSpec::lloyd(Init::GivenIndices(vec![0])), 0).is_err());
        assert!(lloyd(&a, 2, &SolverSpec::lloyd(Init::GivenIndices(vec![0, 9])), 0).is_err());
        assert!(lloyd(&a, 2, &SolverSpec::lloyd(Init::FirstOfEachGroup { stride: 0 }), 0).is_err());
        let mut bad = SolverSpec::lloyd(Init::RandomRows);
        bad.gamma = 0.5;
        assert!(lloyd(&a, 2, &bad, 0).is_err());
    }

    #[test]
    fn empty_cluster_repair_fills_every_cluster() {
        // Both initial centroids coincide, so the second one starts empty.
        let a = line(&[0.0, 0.0, 1.0, 9.0, 10.0]);
        let spec = SolverSpec::lloyd(Init::GivenIndices(vec![0, 1]));
        let r = lloyd(&a, 2, &spec, 0).unwrap();
        assert_eq!(r.assignment.nonempty_clusters(), 2);
        assert!(r.objective_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn lloyd_replicates_never_worse() {
        let a = Matrix::gaussian(30, 3, 12, Domain::Instance);
        let one = lloyd(&a, 4, &SolverSpec::lloyd(Init::RandomRows), 3).unwrap();
        let many = lloyd(&a, 4, &SolverSpec::lloyd(Init::RandomRows).with_replicates(5), 3).unwrap();
        assert!(many.objective <= one.objective);
    }

    #[test]
    fn pipeline_none_matches_direct_lloyd() {
        let a = Matrix::gaussian(20, 6, 3, Domain::Instance);
        let spec = SolverSpec::lloyd(Init::FirstOfEachGroup { stride: 5 });
        let cfg = ProjectionConfig::new(3, 0.2, 7).unwrap();
        let res = project_and_cluster(&a, 3, &cfg, &spec, Method::None).unwrap();
        let direct = lloyd(&a, 3, &spec, 7).unwrap();
        assert_eq!(res.projected, direct);
        assert_eq!(res.original_objective, direct.objective);
    }
}
