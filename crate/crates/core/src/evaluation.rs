//! Clustering quality metrics and randomized checks of the projection's
//! guarantees.
//!
//! Every check runs independent trials, each seeded from `(seed, trial)`,
//! scores a per-trial statistic and counts the trials whose statistic stays
//! at or below the check's bound. The result is a [`PropertyReport`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmeans::{brute_force_optimal, objective, Assignment, BRUTE_FORCE_MAX_N};
use crate::matching::max_weight_matching;
use crate::matrix::{matmul, pseudo_inverse, svd_thin, Matrix};
use crate::projection::{jl_distortion_report, sample_sign_matrix, Method, ProjectionMatrix};
use crate::rng::{self, Domain};

/// `F / ‖A‖²_F`.
pub fn normalized_objective(a: &Matrix, asg: &Assignment) -> Result<f64> {
    let total = a.frobenius_norm_sq();
    if total == 0.0 {
        return Err(Error::param("normalized objective undefined for a zero matrix"));
    }
    Ok(objective(a, asg)? / total)
}

/// Fraction of points whose cluster maps to their true class under the
/// cluster-to-class matching that maximizes the number of matched points.
/// Surplus clusters or classes stay unmatched.
pub fn accuracy(pred: &Assignment, truth: &[usize]) -> Result<f64> {
    if pred.n() != truth.len() {
        return Err(Error::param(format!("prediction has {} labels, truth has {}", pred.n(), truth.len())));
    }
    if truth.is_empty() {
        return Err(Error::param("accuracy of an empty labelling"));
    }
    let k_true = truth.iter().max().map_or(0, |m| m + 1);
    let confusion = confusion_matrix(pred.labels(), pred.k(), truth, k_true);
    Ok(max_weight_matching(&confusion) as f64 / truth.len() as f64)
}

/// `counts[p][c]` = points predicted in cluster `p` whose class is `c`.
pub fn confusion_matrix(pred: &[usize], k_pred: usize, truth: &[usize], k_true: usize) -> Vec<Vec<i64>> {
    let mut counts = vec![vec![0i64; k_true]; k_pred];
    for (&p, &c) in pred.iter().zip(truth) {
        counts[p][c] += 1;
    }
    counts
}

/// One row of a dimension sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub method: String,
    pub t: usize,
    pub k: usize,
    pub epsilon: f64,
    pub seed: u64,
    /// Plug-back objective on the original points over `‖A‖²_F`.
    pub f_tilde: f64,
    /// `None` when the dataset has no labels.
    pub accuracy: Option<f64>,
    pub iterations: usize,
    pub projection_ms: f64,
    pub clustering_ms: f64,
    pub wall_ms: f64,
}

/// Outcome of a randomized check: how many trials kept their statistic
/// within `bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub check_name: String,
    pub trials: usize,
    pub passes: usize,
    /// Passes needed for the check to count as satisfied.
    pub required_passes: usize,
    /// Worst (largest) per-trial statistic.
    pub statistic: f64,
    pub bound: f64,
    pub parameters: BTreeMap<String, f64>,
    #[serde(skip)]
    samples: Vec<f64>,
}

impl PropertyReport {
    pub fn from_samples(
        check_name: impl Into<String>,
        samples: Vec<f64>,
        bound: f64,
        required_passes: usize,
        parameters: BTreeMap<String, f64>,
    ) -> Self {
        let mut report = PropertyReport {
            check_name: check_name.into(),
            trials: samples.len(),
            passes: 0,
            required_passes,
            statistic: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            bound,
            parameters,
            samples,
        };
        report.rescore(bound);
        report
    }

    /// Recounts passes against a different bound.
    pub fn rescore(&mut self, bound: f64) {
        self.bound = bound;
        self.passes = self.samples.iter().filter(|&&s| s <= bound).count();
    }

    pub fn passed(&self) -> bool {
        self.passes >= self.required_passes
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// Required passes at a given fraction of `trials`, rounded up.
pub fn required(trials: usize, fraction: f64) -> usize {
    (trials as f64 * fraction - 1e-9).ceil() as usize
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    rng::derive_seed(seed, trial as u64)
}

fn run_trials<F>(trials: usize, seed: u64, f: F) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    (0..trials).into_par_iter().map(|i| f(trial_seed(seed, i))).collect()
}

/// Replacement for the random sign matrix in [`theorem_distortion_trial`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialEmbedding {
    /// `±1/√t` sign matrix applied with the mailman kernel.
    Sign,
    /// No projection at all.
    Identity,
    /// A random `d×d` orthonormal matrix.
    Rotation,
}

/// Runs the exhaustive solver on a Gaussian `n×d` instance and on its
/// embedding, then checks that the embedded optimum, plugged back into the
/// original points, costs at most `(2 + ε)` times the true optimum.
///
/// The per-trial statistic is that cost ratio.
#[allow(clippy::too_many_arguments)]
pub fn theorem_distortion_trial(
    n: usize,
    d: usize,
    k: usize,
    epsilon: f64,
    t: usize,
    trials: usize,
    seed: u64,
    embedding: TrialEmbedding,
) -> Result<PropertyReport> {
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge { n, bound: BRUTE_FORCE_MAX_N });
    }
    if k == 0 || k > n || d == 0 || t == 0 || epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::param("theorem trial needs 1 <= k <= n, d, t >= 1, epsilon > 0"));
    }
    let ratios = run_trials(trials, seed, |s| {
        let a = Matrix::gaussian(n, d, s, Domain::Instance);
        let opt = brute_force_optimal(&a, k)?.objective;
        let embedded = match embedding {
            TrialEmbedding::Sign => Method::SignMailman.project(&a, t, s)?,
            TrialEmbedding::Identity => a.clone(),
            TrialEmbedding::Rotation => matmul(&a, &random_orthonormal(d, s))?,
        };
        let found = brute_force_optimal(&embedded, k)?;
        let plugged = objective(&a, &found.assignment)?;
        Ok(if opt > 0.0 {
            plugged / opt
        } else if plugged == 0.0 {
            1.0
        } else {
            f64::INFINITY
        })
    })?;
    let t_used = if embedding == TrialEmbedding::Sign { t } else { d };
    Ok(PropertyReport::from_samples(
        "theorem_distortion",
        ratios,
        2.0 + epsilon,
        required(trials, 0.9),
        params(&[("n", n as f64), ("d", d as f64), ("k", k as f64), ("epsilon", epsilon), ("t", t_used as f64)]),
    ))
}

/// Left singular vectors of a Gaussian square matrix.
pub fn random_orthonormal(d: usize, seed: u64) -> Matrix {
    let g = Matrix::gaussian(d, d, seed, Domain::Trial);
    svd_thin(&g, d).expect("square svd").u
}

fn top_right_singular_vectors(a: &Matrix, k: usize) -> Result<Matrix> {
    Ok(svd_thin(a, k)?.v)
}

/// `‖(V_kᵀR)⁺ − (V_kᵀR)ᵀ‖₂` for orthonormal `v_k` (d×k) and `r` (d×t).
pub fn pseudo_inverse_deviation(v_k: &Matrix, r: &Matrix) -> Result<f64> {
    let phi = matmul(&v_k.transpose(), r)?;
    let diff = pseudo_inverse(&phi).sub(&phi.transpose())?;
    // Only k columns, but their top singular values nearly coincide, which stalls power iteration.
    Ok(svd_thin(&diff, 1)?.sigma[0])
}

/// `‖A_k − (AR)(V_kᵀR)⁺V_kᵀ‖_F / ‖A − A_k‖_F` for an explicit `r` (d×t).
pub fn decomposition_residual(a: &Matrix, k: usize, r: &Matrix) -> Result<f64> {
    let svd = svd_thin(a, k)?;
    let a_k = svd.reconstruct();
    let tail = a.sub(&a_k)?.frobenius_norm();
    if tail <= 1e-12 * a.frobenius_norm() {
        return Err(Error::param(format!("matrix is numerically rank {k}; residual ratio undefined")));
    }
    residual_ratio(a, &a_k, &svd.v, r, tail)
}

fn residual_ratio(a: &Matrix, a_k: &Matrix, v_k: &Matrix, r: &Matrix, tail: f64) -> Result<f64> {
    let ar = matmul(a, r)?;
    let phi = matmul(&v_k.transpose(), r)?;
    let approx = matmul(&matmul(&ar, &pseudo_inverse(&phi))?, &v_k.transpose())?;
    Ok(a_k.sub(&approx)?.frobenius_norm() / tail)
}

fn check_residual_preconditions(a: &Matrix, k: usize, epsilon: f64, t: usize) -> Result<()> {
    if k == 0 || k >= a.n_rows().min(a.n_cols()) {
        return Err(Error::param(format!("k = {k} must satisfy 1 <= k < min(n, d)")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) || t == 0 {
        return Err(Error::param("epsilon must lie in (0, 1) and t >= 1"));
    }
    Ok(())
}

/// Per trial, `‖A_k − (AR)(V_kᵀR)⁺V_kᵀ‖_F / ‖A − A_k‖_F` against `4ε`.
pub fn decomposition_residual_check(
    a: &Matrix,
    k: usize,
    epsilon: f64,
    t: usize,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport> {
    check_residual_preconditions(a, k, epsilon, t)?;
    let svd = svd_thin(a, k)?;
    let a_k = svd.reconstruct();
    let tail = a.sub(&a_k)?.frobenius_norm();
    if tail <= 1e-12 * a.frobenius_norm() {
        return Err(Error::param(format!("matrix is numerically rank {k}; residual ratio undefined")));
    }
    let samples = run_trials(trials, seed, |s| {
        let r = sample_sign_matrix(a.n_cols(), t, s)?.dense();
        residual_ratio(a, &a_k, &svd.v, &r, tail)
    })?;
    Ok(PropertyReport::from_samples(
        "decomposition_residual",
        samples,
        4.0 * epsilon,
        required(trials, 0.9),
        params(&[("k", k as f64), ("epsilon", epsilon), ("t", t as f64)]),
    ))
}

/// Per trial, `‖(V_kᵀR)⁺ − (V_kᵀR)ᵀ‖₂` against `3ε`. Uses the same sign
/// matrices as [`decomposition_residual_check`] for equal arguments.
pub fn pseudo_inverse_bound_check(
    a: &Matrix,
    k: usize,
    epsilon: f64,
    t: usize,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport> {
    check_residual_preconditions(a, k, epsilon, t)?;
    let v_k = top_right_singular_vectors(a, k)?;
    let samples = run_trials(trials, seed, |s| {
        let r = sample_sign_matrix(a.n_cols(), t, s)?.dense();
        pseudo_inverse_deviation(&v_k, &r)
    })?;
    Ok(PropertyReport::from_samples(
        "pseudo_inverse_bound",
        samples,
        3.0 * epsilon,
        required(trials, 0.9),
        params(&[("k", k as f64), ("epsilon", epsilon), ("t", t as f64)]),
    ))
}

/// Per trial, `max_i |1 − σ_i(V_kᵀR)|` against `ε`.
pub fn singular_value_check(
    a: &Matrix,
    k: usize,
    epsilon: f64,
    t: usize,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport> {
    if t < k {
        return Err(Error::param(format!("t = {t} must be at least k = {k}")));
    }
    let v_k = top_right_singular_vectors(a, k)?;
    let samples = run_trials(trials, seed, |s| {
        let r = sample_sign_matrix(a.n_cols(), t, s)?.dense();
        let phi = matmul(&v_k.transpose(), &r)?;
        let sigma = svd_thin(&phi, k)?.sigma;
        Ok(sigma.iter().map(|x| (1.0 - x).abs()).fold(0.0, f64::max))
    })?;
    Ok(PropertyReport::from_samples(
        "singular_value_preservation",
        samples,
        epsilon,
        required(trials, 0.95),
        params(&[("k", k as f64), ("epsilon", epsilon), ("t", t as f64)]),
    ))
}

/// Sample mean of `‖CR‖²_F / ‖C‖²_F` over `trials` sign matrices, checked
/// against `1 ± 15/√(trials·t)`. A single aggregate sample.
pub fn moment_identity_check(c: &Matrix, t: usize, trials: usize, seed: u64) -> Result<PropertyReport> {
    let norm_sq = c.frobenius_norm_sq();
    if norm_sq == 0.0 || trials == 0 || t == 0 {
        return Err(Error::param("moment check needs a nonzero matrix, trials >= 1 and t >= 1"));
    }
    let ratios = run_trials(trials, seed, |s| {
        let r = sample_sign_matrix(c.n_cols(), t, s)?;
        Ok(matmul(c, &r.dense())?.frobenius_norm_sq() / norm_sq)
    })?;
    let mean = ratios.iter().sum::<f64>() / trials as f64;
    let band = 15.0 / ((trials * t) as f64).sqrt();
    Ok(PropertyReport::from_samples(
        "moment_identity",
        vec![(mean - 1.0).abs()],
        band,
        1,
        params(&[("t", t as f64), ("samples", trials as f64), ("mean_ratio", mean)]),
    ))
}

/// Per trial, `‖CR‖_F / ‖C‖_F` against `√(1+ε)` at `t = ⌈200k/ε²⌉`.
pub fn norm_bound_check(c: &Matrix, k: usize, epsilon: f64, trials: usize, seed: u64) -> Result<PropertyReport> {
    let norm = c.frobenius_norm();
    if norm == 0.0 || k == 0 || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("norm bound check needs a nonzero matrix, k >= 1, epsilon in (0, 1)"));
    }
    let t = (200.0 * k as f64 / (epsilon * epsilon)).ceil() as usize;
    let samples = run_trials(trials, seed, |s| Ok(Method::SignMailman.project(c, t, s)?.frobenius_norm() / norm))?;
    Ok(PropertyReport::from_samples(
        "norm_bound",
        samples,
        (1.0 + epsilon).sqrt(),
        required(trials, 0.95),
        params(&[("k", k as f64), ("epsilon", epsilon), ("t", t as f64)]),
    ))
}

/// Sample mean of `‖ST − SRRᵀT‖²_F` against `1.5 · (2/t)‖S‖²_F‖T‖²_F`.
/// A single aggregate sample.
pub fn matmul_moment_check(s: &Matrix, tm: &Matrix, t: usize, trials: usize, seed: u64) -> Result<PropertyReport> {
    if s.n_cols() != tm.n_rows() || trials == 0 || t == 0 {
        return Err(Error::param("matmul moment check needs S·T conformable, trials >= 1, t >= 1"));
    }
    let exact = matmul(s, tm)?;
    let errors = run_trials(trials, seed, |sd| {
        let r = sample_sign_matrix(s.n_cols(), t, sd)?.dense();
        let sr = matmul(s, &r)?;
        let rt = matmul(&r.transpose(), tm)?;
        Ok(exact.sub(&matmul(&sr, &rt)?)?.frobenius_norm_sq())
    })?;
    let mean = errors.iter().sum::<f64>() / trials as f64;
    let bound = 1.5 * 2.0 / t as f64 * s.frobenius_norm_sq() * tm.frobenius_norm_sq();
    Ok(PropertyReport::from_samples(
        "matmul_moment",
        vec![mean],
        bound,
        1,
        params(&[("t", t as f64), ("samples", trials as f64)]),
    ))
}

/// Per seed, the fraction of point pairs whose distance leaves `1 ± ε`
/// under a sign projection of `n` Gaussian points. Passes when at most 1%
/// of pairs are distorted.
pub fn jl_check(n: usize, d: usize, t: usize, epsilon: f64, seeds: usize, seed: u64) -> Result<PropertyReport> {
    let samples = run_trials(seeds, seed, |s| {
        let a = Matrix::gaussian(n, d, s, Domain::Instance);
        let embedded = Method::SignMailman.project(&a, t, s)?;
        Ok(1.0 - jl_distortion_report(&a, &embedded, epsilon)?.fraction_ok)
    })?;
    Ok(PropertyReport::from_samples(
        "jl_distortion",
        samples,
        0.01,
        seeds,
        params(&[("n", n as f64), ("d", d as f64), ("t", t as f64), ("epsilon", epsilon)]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn accuracy_examples() {
        let pred = Assignment::new(vec![0, 0, 1, 1, 2, 2], 3).unwrap();
        assert_eq!(accuracy(&pred, &[1, 1, 0, 0, 2, 2]).unwrap(), 1.0);
        let flipped = Assignment::new(vec![0, 0, 1, 1, 2, 0], 3).unwrap();
        assert!((accuracy(&flipped, &[1, 1, 0, 0, 2, 2]).unwrap() - 5.0 / 6.0).abs() < 1e-15);

        let constant = Assignment::new(vec![0; 8], 4).unwrap();
        assert_eq!(accuracy(&constant, &[0, 1, 2, 3, 0, 1, 2, 3]).unwrap(), 0.25);
        assert!(accuracy(&constant, &[0, 1]).is_err());
    }

    #[test]
    fn accuracy_matches_permutation_oracle() {
        let truth = [1, 1, 0, 0, 2, 2];
        let pred = [0, 0, 1, 1, 2, 0];
        let best = perms(3).iter().map(|p| pred.iter().zip(&truth).filter(|(&a, &b)| p[a] == b).count()).max().unwrap();
        let asg = Assignment::new(pred.to_vec(), 3).unwrap();
        assert_eq!(accuracy(&asg, &truth).unwrap(), best as f64 / 6.0);
    }

    #[test]
    fn normalized_objective_examples() {
        let same = Matrix::from_rows(&vec![vec![2.0, 1.0]; 3]).unwrap();
        let one = Assignment::new(vec![0; 3], 1).unwrap();
        assert_eq!(normalized_objective(&same, &one).unwrap(), 0.0);
        assert!(normalized_objective(&Matrix::zeros(3, 2), &one).is_err());

        let a = Matrix::gaussian(6, 4, 1, Domain::Instance);
        let asg = Assignment::new(vec![0, 1, 0, 1, 1, 0], 2).unwrap();
        let direct = objective(&a, &asg).unwrap() / a.frobenius_norm_sq();
        assert!((normalized_objective(&a, &asg).unwrap() - direct).abs() <= 1e-12);
    }

    #[test]
    fn report_rescoring() {
        let mut r = PropertyReport::from_samples("x", vec![0.1, 0.5, 0.9], 0.6, 2, BTreeMap::new());
        assert_eq!((r.passes, r.statistic), (2, 0.9));
        assert!(r.passed());
        r.rescore(0.006);
        assert_eq!(r.passes, 0);
        assert!(!r.passed());
        assert_eq!(required(100, 0.9), 90);
        assert_eq!(required(20, 0.95), 19);
    }

    #[test]
    fn identity_embedding_never_distorts() {
        let rep = theorem_distortion_trial(7, 5, 2, 0.2, 5, 10, 3, TrialEmbedding::Identity).unwrap();
        assert_eq!(rep.passes, 10);
        assert!(rep.samples().iter().all(|&r| r == 1.0));
    }

    #[test]
    fn theorem_trial_guards_size() {
        assert!(matches!(
            theorem_distortion_trial(15, 4, 2, 0.2, 10, 1, 0, TrialEmbedding::Sign),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn orthonormal_square_projection_reconstructs_exactly() {
        let a = Matrix::gaussian(12, 9, 4, Domain::Instance);
        let r = random_orthonormal(9, 5);
        let res = decomposition_residual(&a, 3, &r).unwrap();
        assert!(res < 1e-8, "{res}");
    }

    #[test]
    fn residual_rejects_exact_low_rank() {
        let u = Matrix::gaussian(10, 2, 1, Domain::Instance);
        let v = Matrix::gaussian(2, 7, 2, Domain::Instance);
        let a = matmul(&u, &v).unwrap();
        let r = sample_sign_matrix(7, 20, 0).unwrap().dense();
        assert!(decomposition_residual(&a, 2, &r).is_err());
        assert!(decomposition_residual_check(&a, 2, 0.5, 20, 2, 0).is_err());
        assert!(decomposition_residual_check(&a, 7, 0.5, 20, 2, 0).is_err());
    }

    #[test]
    fn checks_are_deterministic() {
        let a = Matrix::gaussian(20, 30, 9, Domain::Instance);
        let x = pseudo_inverse_bound_check(&a, 3, 0.5, 200, 5, 1).unwrap();
        let y = pseudo_inverse_bound_check(&a, 3, 0.5, 200, 5, 1).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.samples(), y.samples());
    }
}
