//! Dense row-major matrices and the handful of kernels the rest of the crate
//! needs: products, norms, a thin SVD, best rank-k approximation and the
//! Moore-Penrose pseudo-inverse.
//!
//! Reductions always run left to right in index order, so every result is
//! bit-identical from run to run, including when rows are computed in
//! parallel.

use std::fmt;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Domain};

/// Singular values at or below `PINV_CUTOFF * sigma_max` count as zero.
pub const PINV_CUTOFF: f64 = 1e-12;
pub const POWER_TOL: f64 = 1e-10;
pub const POWER_MAX_ITER: usize = 1000;
/// Seed of the power-iteration start vector.
pub const POWER_SEED: u64 = 0x5eed;

const JACOBI_MAX_SWEEPS: usize = 80;
// Below this many multiply-adds a product is computed on the calling thread.
const PAR_THRESHOLD: usize = 1 << 15;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.row_iter() {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    /// Builds a matrix from row-major values, rejecting empty shapes,
    /// length mismatches and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param(format!("matrix must be nonempty, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::param(format!("{rows}x{cols} matrix needs {} values, got {}", rows * cols, data.len())));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite entry at ({}, {})", pos / cols, pos % cols)));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::param(format!("row {i} has {} entries, expected {cols}", rows[i].len())));
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    /// # Panics
    /// Panics when either dimension is zero or `f` yields a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix::new(rows, cols, data).expect("from_fn: invalid shape or entry")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix must be nonempty");
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Matrix::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    /// Matrix with i.i.d. standard normal entries drawn from `(seed, domain)`.
    pub fn gaussian(rows: usize, cols: usize, seed: u64, domain: Domain) -> Self {
        let mut rng = rng::stream(seed, domain, 0);
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            data.push(StandardNormal.sample(&mut rng));
        }
        Matrix::new(rows, cols, data).expect("gaussian: empty shape")
    }

    pub(crate) fn from_parts_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(value.is_finite(), "non-finite entry");
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Rows `indices` stacked in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix::from_parts_unchecked(indices.len(), self.cols, data)
    }

    /// The first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Matrix {
        assert!(k >= 1 && k <= self.cols);
        Matrix::from_fn(self.rows, k, |i, j| self.get(i, j))
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Matrix::from_parts_unchecked(self.cols, self.rows, data)
    }

    pub fn scaled(&self, c: f64) -> Matrix {
        Matrix::new(self.rows, self.cols, self.data.iter().map(|v| v * c).collect()).expect("scaled: non-finite result")
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::param(format!("shape mismatch: {:?} vs {:?}", self.shape(), other.shape())));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Matrix::from_parts_unchecked(self.rows, self.cols, data))
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn frobenius_norm(a: &Matrix) -> f64 {
    a.frobenius_norm()
}

/// `a * b`. Each output entry accumulates over the inner index in ascending
/// order starting from zero.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::param(format!("cannot multiply {}x{} by {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    let (n, m) = (a.rows, b.cols);
    let mut out = vec![0.0; n * m];
    let row_kernel = |(i, out_row): (usize, &mut [f64])| {
        for (p, &aip) in a.row(i).iter().enumerate() {
            for (o, &bpj) in out_row.iter_mut().zip(b.row(p)) {
                *o += aip * bpj;
            }
        }
    };
    if n * m * a.cols >= PAR_THRESHOLD {
        out.par_chunks_mut(m).enumerate().for_each(row_kernel);
    } else {
        out.chunks_mut(m).enumerate().for_each(row_kernel);
    }
    Ok(Matrix::from_parts_unchecked(n, m, out))
}

/// Largest singular value by power iteration on `aᵀa`.
///
/// Stops once the Rayleigh quotient changes by at most `tol` relative to its
/// current value. The start vector is drawn from [`POWER_SEED`].
pub fn spectral_norm(a: &Matrix, tol: f64, max_iter: usize) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::param("spectral_norm: tol must be positive"));
    }
    let mut rng = rng::stream(POWER_SEED, Domain::PowerIteration, 0);
    let mut v: Vec<f64> = (0..a.cols).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize(&mut v);
    let mut previous = f64::NAN;
    let mut rayleigh = 0.0;
    for _ in 0..max_iter {
        let av = mat_vec(a, &v);
        let w = mat_t_vec(a, &av);
        rayleigh = dot(&v, &w);
        let norm = dot(&w, &w).sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        if (rayleigh - previous).abs() <= tol * rayleigh {
            return Ok(rayleigh.max(0.0).sqrt());
        }
        previous = rayleigh;
        v = w.into_iter().map(|x| x / norm).collect();
    }
    Err(Error::NoConvergence { iterations: max_iter, rayleigh })
}

/// [`spectral_norm`] with the default tolerance and iteration cap.
pub fn spectral_norm_default(a: &Matrix) -> Result<f64> {
    spectral_norm(a, POWER_TOL, POWER_MAX_ITER)
}

/// Thin SVD truncated to the top `k` triplets.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// n×k, orthonormal columns.
    pub u: Matrix,
    /// Non-increasing, non-negative.
    pub sigma: Vec<f64>,
    /// d×k, orthonormal columns.
    pub v: Matrix,
    /// Numerical rank of the input, counted against [`PINV_CUTOFF`].
    pub rank_estimate: usize,
}

impl SvdResult {
    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    /// `U Σ Vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let us = Matrix::from_fn(self.u.rows, self.k(), |i, j| self.u.get(i, j) * self.sigma[j]);
        matmul(&us, &self.v.transpose()).expect("svd factors have matching shapes")
    }
}

/// Top-`k` singular triplets of `a` via one-sided Jacobi.
pub fn svd_thin(a: &Matrix, k: usize) -> Result<SvdResult> {
    let max_k = a.rows.min(a.cols);
    if k == 0 || k > max_k {
        return Err(Error::param(format!("svd rank k = {k} outside 1..={max_k}")));
    }
    let full = svd_full(a);
    Ok(SvdResult {
        u: full.u.leading_columns(k),
        sigma: full.sigma[..k].to_vec(),
        v: full.v.leading_columns(k),
        rank_estimate: full.rank_estimate,
    })
}

fn svd_full(a: &Matrix) -> SvdResult {
    if a.rows >= a.cols {
        let (u, sigma, v) = one_sided_jacobi(a);
        let rank_estimate = numerical_rank(&sigma);
        SvdResult { u, sigma, v, rank_estimate }
    } else {
        let (v, sigma, u) = one_sided_jacobi(&a.transpose());
        let rank_estimate = numerical_rank(&sigma);
        SvdResult { u, sigma, v, rank_estimate }
    }
}

fn numerical_rank(sigma: &[f64]) -> usize {
    let top = sigma.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > PINV_CUTOFF * top).count()
}

/// Hestenes one-sided Jacobi for a tall matrix (`rows >= cols`). Returns
/// `(U, sigma, V)` with `U` rows×cols, `V` cols×cols, sigma sorted
/// non-increasing.
fn one_sided_jacobi(a: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    let (n, d) = a.shape();
    debug_assert!(n >= d);
    // Column-major working copies so that column pairs are contiguous.
    let mut w: Vec<Vec<f64>> = (0..d).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..d).map(|j| (0..d).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in p + 1..d {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = w.split_at_mut(q);
                rotate(&mut left[p], &mut right[0], c, s);
                let (left, right) = v.split_at_mut(q);
                rotate(&mut left[p], &mut right[0], c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, f64)> = w.iter().map(|col| dot(col, col).sqrt()).enumerate().collect();
    // Stable sort keeps the original column order on ties.
    order.sort_by(|x, y| y.1.total_cmp(&x.1));

    let sigma: Vec<f64> = order.iter().map(|&(_, s)| s).collect();
    let rank = numerical_rank(&sigma);
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    for &(j, s) in order.iter().take(rank) {
        u_cols.push(w[j].iter().map(|x| x / s).collect());
    }
    complete_orthonormal(&mut u_cols, n, d);

    let u = Matrix::from_fn(n, d, |i, j| u_cols[j][i]);
    let v_sorted = Matrix::from_fn(d, d, |i, j| v[order[j].0][i]);
    let sigma = sigma.iter().enumerate().map(|(i, &s)| if i < rank { s } else { 0.0 }).collect();
    (u, sigma, v_sorted)
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let a = *xi;
        let b = *yi;
        *xi = c * a - s * b;
        *yi = s * a + c * b;
    }
}

/// Extends `cols` with unit vectors until it holds `target` orthonormal
/// columns of length `n`, using Gram-Schmidt on the standard basis.
fn complete_orthonormal(cols: &mut Vec<Vec<f64>>, n: usize, target: usize) {
    let mut e = 0;
    while cols.len() < target && e < n {
        let mut cand = vec![0.0; n];
        cand[e] = 1.0;
        e += 1;
        for _ in 0..2 {
            for c in cols.iter() {
                let proj = dot(&cand, c);
                for (x, y) in cand.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let norm = dot(&cand, &cand).sqrt();
        if norm > 1e-8 {
            cols.push(cand.into_iter().map(|x| x / norm).collect());
        }
    }
}

/// `A_k = U_k Σ_k V_kᵀ`, the closest rank-`k` matrix in Frobenius norm.
pub fn best_rank_k(a: &Matrix, k: usize) -> Result<Matrix> {
    Ok(svd_thin(a, k)?.reconstruct())
}

/// Moore-Penrose pseudo-inverse, `d×n` for an `n×d` input.
pub fn pseudo_inverse(a: &Matrix) -> Matrix {
    let svd = svd_full(a);
    let (n, d) = a.shape();
    let r = svd.rank_estimate;
    if r == 0 {
        return Matrix::zeros(d, n);
    }
    // V_r Σ_r⁻¹ U_rᵀ
    let v_scaled = Matrix::from_fn(d, r, |i, j| svd.v.get(i, j) / svd.sigma[j]);
    let u_r = svd.u.leading_columns(r);
    matmul(&v_scaled, &u_r.transpose()).expect("pseudo-inverse factors have matching shapes")
}

#[inline]
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn mat_vec(a: &Matrix, x: &[f64]) -> Vec<f64> {
    a.row_iter().map(|row| dot(row, x)).collect()
}

fn mat_t_vec(a: &Matrix, y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.cols];
    for (row, &yi) in a.row_iter().zip(y) {
        for (o, &r) in out.iter_mut().zip(row) {
            *o += r * yi;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded(rows: usize, cols: usize, seed: u64) -> Matrix {
        Matrix::gaussian(rows, cols, seed, Domain::Instance)
    }

    fn assert_orthonormal_columns(m: &Matrix, tol: f64) {
        let gram = matmul(&m.transpose(), m).unwrap();
        let dev = gram.sub(&Matrix::identity(m.n_cols())).unwrap().max_abs();
        assert!(dev <= tol, "orthonormality deviation {dev}");
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(Matrix::new(0, 3, vec![]).is_err());
        assert!(Matrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(Matrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::new(1, 2, vec![f64::INFINITY, 0.0]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn frobenius_examples() {
        assert!((Matrix::identity(2).frobenius_norm() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Matrix::zeros(3, 4).frobenius_norm(), 0.0);
        assert_eq!(Matrix::from_rows(&[vec![3.0, 4.0]]).unwrap().frobenius_norm(), 5.0);
    }

    #[test]
    fn matmul_examples() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(matmul(&a, &b).unwrap(), Matrix::from_rows(&[vec![2.0], vec![4.0]]).unwrap());
        assert_eq!(matmul(&a, &Matrix::identity(2)).unwrap(), a);
        assert!(matmul(&a, &Matrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn matmul_matches_triple_loop_bitwise() {
        let a = seeded(4, 3, 1);
        let b = seeded(3, 2, 2);
        let c = matmul(&a, &b).unwrap();
        for i in 0..4 {
            for j in 0..2 {
                let mut s = 0.0;
                for p in 0..3 {
                    s += a.get(i, p) * b.get(p, j);
                }
                assert_eq!(c.get(i, j).to_bits(), s.to_bits());
            }
        }
    }

    #[test]
    fn spectral_norm_examples() {
        let s = spectral_norm_default(&Matrix::identity(5)).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
        let s = spectral_norm_default(&Matrix::diag(&[3.0, 1.0])).unwrap();
        assert!((s - 3.0).abs() < 1e-9);
        assert_eq!(spectral_norm_default(&Matrix::zeros(3, 2)).unwrap(), 0.0);
    }

    #[test]
    fn spectral_norm_reports_non_convergence() {
        let a = seeded(6, 4, 3);
        match spectral_norm(&a, 1e-300, 2) {
            Err(Error::NoConvergence { iterations, rayleigh }) => {
                assert_eq!(iterations, 2);
                assert!(rayleigh > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
        assert!(spectral_norm(&a, 0.0, 10).is_err());
    }

    #[test]
    fn svd_diagonal() {
        let svd = svd_thin(&Matrix::diag(&[5.0, 2.0, 1.0]), 2).unwrap();
        assert!((svd.sigma[0] - 5.0).abs() < 1e-14 && (svd.sigma[1] - 2.0).abs() < 1e-14);
        for (j, e) in [0usize, 1].iter().enumerate() {
            for i in 0..3 {
                let expected = if i == *e { 1.0 } else { 0.0 };
                assert!((svd.v.get(i, j).abs() - expected).abs() < 1e-14);
            }
        }
        assert_eq!(svd.rank_estimate, 3);
    }

    #[test]
    fn svd_rank_one() {
        let u = [2.0, 0.0, 0.0];
        let v = [0.0, 3.0];
        let a = Matrix::from_fn(3, 2, |i, j| u[i] * v[j]);
        let svd = svd_thin(&a, 1).unwrap();
        assert!((svd.sigma[0] - 6.0).abs() < 1e-13);
        assert_eq!(svd.rank_estimate, 1);
        // Completing U past the numerical rank keeps the columns orthonormal.
        let full = svd_thin(&a, 2).unwrap();
        assert_orthonormal_columns(&full.u, 1e-12);
        assert_eq!(full.sigma[1], 0.0);
    }

    #[test]
    fn svd_rejects_bad_rank() {
        let a = seeded(3, 5, 4);
        assert!(svd_thin(&a, 0).is_err());
        assert!(svd_thin(&a, 4).is_err());
    }

    #[test]
    fn svd_invariants_wide_and_tall() {
        for (r, c, seed) in [(8, 5, 10), (5, 8, 11), (7, 7, 12), (1, 4, 13), (4, 1, 14)] {
            let a = seeded(r, c, seed);
            let k = r.min(c);
            let svd = svd_thin(&a, k).unwrap();
            assert_orthonormal_columns(&svd.u, 1e-8);
            assert_orthonormal_columns(&svd.v, 1e-8);
            assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
            assert!(svd.sigma.iter().all(|&s| s >= 0.0));
            let err = a.sub(&svd.reconstruct()).unwrap().frobenius_norm();
            assert!(err <= 1e-8 * a.frobenius_norm(), "{r}x{c}: {err}");
        }
    }

    #[test]
    fn best_rank_k_examples() {
        let d = Matrix::diag(&[5.0, 2.0, 1.0]);
        let a1 = best_rank_k(&d, 1).unwrap();
        assert!(a1.sub(&Matrix::diag(&[5.0, 0.0, 0.0])).unwrap().max_abs() < 1e-13);
        let a = seeded(8, 5, 20);
        let full = best_rank_k(&a, 5).unwrap();
        assert!(a.sub(&full).unwrap().frobenius_norm() <= 1e-8 * a.frobenius_norm());
    }

    #[test]
    fn pseudo_inverse_examples() {
        let p = pseudo_inverse(&Matrix::diag(&[2.0, 4.0]));
        assert!(p.sub(&Matrix::diag(&[0.5, 0.25])).unwrap().max_abs() < 1e-15);
        let z = pseudo_inverse(&Matrix::zeros(2, 3));
        assert_eq!(z.shape(), (3, 2));
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn pseudo_inverse_full_row_rank() {
        let a = seeded(3, 5, 30);
        let p = pseudo_inverse(&a);
        let aap = matmul(&a, &p).unwrap();
        assert!(aap.sub(&Matrix::identity(3)).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn svd_is_deterministic() {
        let a = seeded(9, 6, 40);
        let x = svd_thin(&a, 4).unwrap();
        let y = svd_thin(&a, 4).unwrap();
        assert_eq!(x.u, y.u);
        assert_eq!(x.v, y.v);
        assert_eq!(x.sigma, y.sigma);
    }
}
