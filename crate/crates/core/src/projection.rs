//! Random projection matrices, the SVD embedding baseline and a
//! pairwise-distance distortion report.

use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mailman::{self, block_widths, code_sign};
use crate::matrix::{matmul, svd_thin, Matrix};
use crate::rng::{self, Domain};

/// Parameters of one projection: `t = ⌈c·k/ε²⌉` unless overridden.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionConfig {
    pub k: usize,
    pub epsilon: f64,
    pub c: f64,
    pub t_override: Option<usize>,
    pub seed: u64,
}

impl ProjectionConfig {
    pub fn new(k: usize, epsilon: f64, seed: u64) -> Result<Self> {
        let cfg = ProjectionConfig { k, epsilon, c: 1.0, t_override: None, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_c(mut self, c: f64) -> Result<Self> {
        self.c = c;
        self.validate()?;
        Ok(self)
    }

    pub fn with_t(mut self, t: usize) -> Result<Self> {
        self.t_override = Some(t);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if self.k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::param(format!("c must be positive, got {}", self.c)));
        }
        if self.t_override == Some(0) {
            return Err(Error::param("t must be at least 1"));
        }
        Ok(())
    }

    /// Target dimension: the override when set, else [`target_dimension`].
    pub fn resolve_t(&self) -> Result<usize> {
        match self.t_override {
            Some(t) => Ok(t),
            None => target_dimension(self.k, self.epsilon, self.c),
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
        return Err(Error::param(format!("epsilon must lie in (0, 1/3), got {epsilon}")));
    }
    Ok(())
}

/// `⌈c·k/ε²⌉` for `ε ∈ (0, 1/3)`.
pub fn target_dimension(k: usize, epsilon: f64, c: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param(format!("c must be positive, got {c}")));
    }
    let raw = c * k as f64 / (epsilon * epsilon);
    // Guard against 360.00000000000006 rounding up to 361.
    let nearest = raw.round();
    let t = if (raw - nearest).abs() <= 1e-9 * nearest { nearest } else { raw.ceil() };
    Ok(t as usize)
}

/// Anything that can be materialized as a dense `d×t` projection matrix.
pub trait ProjectionMatrix {
    fn d(&self) -> usize;
    fn t(&self) -> usize;
    /// Effective entries, scaling included.
    fn dense(&self) -> Matrix;
}

/// Random `±1/√t` matrix. Signs are stored unscaled, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SignMatrix {
    d: usize,
    t: usize,
    scale: f64,
    signs: Vec<i8>,
}

impl SignMatrix {
    /// Wraps explicit `±1` signs (row-major, `d×t`).
    pub fn from_signs(d: usize, t: usize, signs: Vec<i8>) -> Result<Self> {
        if d == 0 || t == 0 || signs.len() != d * t {
            return Err(Error::param(format!("{d}x{t} sign matrix needs {} signs", d * t)));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::param("sign entries must be +1 or -1"));
        }
        Ok(SignMatrix { d, t, scale: 1.0 / (t as f64).sqrt(), signs })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn sign(&self, i: usize, j: usize) -> i8 {
        self.signs[i * self.t + j]
    }
}

impl ProjectionMatrix for SignMatrix {
    fn d(&self) -> usize {
        self.d
    }

    fn t(&self) -> usize {
        self.t
    }

    fn dense(&self) -> Matrix {
        let data = self.signs.iter().map(|&s| f64::from(s) * self.scale).collect();
        Matrix::from_parts_unchecked(self.d, self.t, data)
    }
}

/// Samples a `d×t` sign matrix. Column block `j` (of width `⌊log₂ d⌋`)
/// comes from its own stream, so this agrees entrywise with the densified
/// [`mailman::build_plan`] for the same arguments.
pub fn sample_sign_matrix(d: usize, t: usize, seed: u64) -> Result<SignMatrix> {
    if d == 0 || t == 0 {
        return Err(Error::param(format!("sign matrix needs d, t >= 1, got {d}x{t}")));
    }
    let mut signs = vec![0i8; d * t];
    let mut col0 = 0;
    for (blk, p) in block_widths(d, t).into_iter().enumerate() {
        let codes = mailman::sample_block_codes(d, p, seed, blk);
        for (i, &code) in codes.iter().enumerate() {
            for b in 0..p {
                signs[i * t + col0 + b] = code_sign(code, b) as i8;
            }
        }
        col0 += p;
    }
    SignMatrix::from_signs(d, t, signs)
}

/// I.i.d. normal entries with mean 0 and standard deviation `1/√t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMatrix {
    seed: u64,
    values: Matrix,
}

impl GaussianMatrix {
    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl ProjectionMatrix for GaussianMatrix {
    fn d(&self) -> usize {
        self.values.n_rows()
    }

    fn t(&self) -> usize {
        self.values.n_cols()
    }

    fn dense(&self) -> Matrix {
        self.values.clone()
    }
}

pub fn sample_gaussian_matrix(d: usize, t: usize, seed: u64) -> Result<GaussianMatrix> {
    if d == 0 || t == 0 {
        return Err(Error::param(format!("gaussian matrix needs d, t >= 1, got {d}x{t}")));
    }
    let normal = Normal::new(0.0, 1.0 / (t as f64).sqrt()).expect("finite std");
    let mut data = Vec::with_capacity(d * t);
    for i in 0..d {
        let mut rng = rng::stream(seed, Domain::Gaussian, i as u64);
        data.extend((0..t).map(|_| normal.sample(&mut rng)));
    }
    Ok(GaussianMatrix { seed, values: Matrix::from_parts_unchecked(d, t, data) })
}

/// `a · r` by dense multiplication.
pub fn project_naive(a: &Matrix, r: &impl ProjectionMatrix) -> Result<Matrix> {
    if a.n_cols() != r.d() {
        return Err(Error::param(format!("matrix has {} columns, projection expects d = {}", a.n_cols(), r.d())));
    }
    matmul(a, &r.dense())
}

/// `U_k Σ_k`, the rank-`k` SVD embedding of the rows of `a`.
pub fn svd_embed(a: &Matrix, k: usize) -> Result<Matrix> {
    let svd = svd_thin(a, k)?;
    Ok(Matrix::from_fn(a.n_rows(), k, |i, j| svd.u.get(i, j) * svd.sigma[j]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    /// Fraction of pairs `i < j` whose embedded distance is within `1 ± ε`
    /// of the original.
    pub fraction_ok: f64,
    /// Smallest embedded/original distance ratio over pairs at nonzero distance.
    pub worst_low: f64,
    /// Largest such ratio.
    pub worst_high: f64,
    pub pairs: usize,
}

/// Pairwise distance distortion between the rows of `a` and of `a_tilde`.
/// Pairs at distance zero count as preserved iff their embedded distance is
/// at most `1e-12`.
pub fn jl_distortion_report(a: &Matrix, a_tilde: &Matrix, epsilon: f64) -> Result<DistortionReport> {
    if a.n_rows() != a_tilde.n_rows() {
        return Err(Error::param(format!("row counts differ: {} vs {}", a.n_rows(), a_tilde.n_rows())));
    }
    let n = a.n_rows();
    let (mut ok, mut pairs) = (0usize, 0usize);
    let (mut low, mut high) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            pairs += 1;
            let orig = distance(a.row(i), a.row(j));
            let emb = distance(a_tilde.row(i), a_tilde.row(j));
            if orig == 0.0 {
                if emb <= 1e-12 {
                    ok += 1;
                }
                continue;
            }
            let ratio = emb / orig;
            low = low.min(ratio);
            high = high.max(ratio);
            if (1.0 - epsilon) * orig <= emb && emb <= (1.0 + epsilon) * orig {
                ok += 1;
            }
        }
    }
    if !low.is_finite() {
        low = 1.0;
        high = 1.0;
    }
    Ok(DistortionReport {
        fraction_ok: if pairs == 0 { 1.0 } else { ok as f64 / pairs as f64 },
        worst_low: low,
        worst_high: high,
        pairs,
    })
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// How the points are embedded before clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Random sign matrix applied with the mailman kernel.
    SignMailman,
    /// Random sign matrix applied by dense multiplication.
    SignNaive,
    Gaussian,
    /// Top-`t` SVD embedding `U_t Σ_t`.
    SvdEmbed,
    /// No reduction: cluster the original points.
    None,
}

impl Method {
    pub const ALL: [Method; 5] =
        [Method::SignMailman, Method::SignNaive, Method::Gaussian, Method::SvdEmbed, Method::None];

    /// Short name used in reports: `rp_mailman`, `rp_naive`, `gaussian`, `svd`, `hd`.
    pub fn name(self) -> &'static str {
        match self {
            Method::SignMailman => "rp_mailman",
            Method::SignNaive => "rp_naive",
            Method::Gaussian => "gaussian",
            Method::SvdEmbed => "svd",
            Method::None => "hd",
        }
    }

    /// Embeds the rows of `a` into `t` dimensions. `t` is ignored for [`Method::None`].
    pub fn project(self, a: &Matrix, t: usize, seed: u64) -> Result<Matrix> {
        match self {
            Method::SignMailman => {
                if a.n_cols() < 2 {
                    // No block structure for a single column; fall back to dense.
                    return project_naive(a, &sample_sign_matrix(a.n_cols(), t, seed)?);
                }
                mailman::project_mailman(a, &mailman::build_plan(a.n_cols(), t, seed)?)
            }
            Method::SignNaive => project_naive(a, &sample_sign_matrix(a.n_cols(), t, seed)?),
            Method::Gaussian => project_naive(a, &sample_gaussian_matrix(a.n_cols(), t, seed)?),
            Method::SvdEmbed => svd_embed(a, t),
            Method::None => Ok(a.clone()),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rp_mailman" | "sign_mailman" | "rp" | "mailman" => Ok(Method::SignMailman),
            "rp_naive" | "sign_naive" => Ok(Method::SignNaive),
            "gaussian" => Ok(Method::Gaussian),
            "svd" | "svd_embed" => Ok(Method::SvdEmbed),
            "hd" | "none" => Ok(Method::None),
            other => Err(Error::param(format!("unknown method '{other}'"))),
        }
    }
}
