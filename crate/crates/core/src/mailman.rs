//! Mailman multiplication by a random sign matrix.
//!
//! The `d×t` sign matrix is split into column blocks of `p = ⌊log₂ d⌋`
//! columns (the last block may be narrower). Within a block, row `j` of the
//! sign matrix is one of `2^p` sign patterns, stored as a pattern code whose
//! bit `b` is 1 when column `b` of the block holds `+1`. Multiplying a row
//! vector `x` by the block then takes two passes:
//!
//! 1. bucket: `bucket[code_j] += x_j` for every `j` (`d` additions);
//! 2. fold: repeatedly halve the bucket array on its highest bit, reading
//!    off one output per bit (`< 2^(p+1)` additions).
//!
//! Codes are sampled directly instead of being decoded from a given sign
//! matrix, so there is no preprocessing step.

use rand::RngCore;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{self, Domain};

/// Columns per full block for a `d`-row sign matrix: `max(1, ⌊log₂ d⌋)`.
pub fn block_width(d: usize) -> usize {
    assert!(d >= 1);
    (d.ilog2() as usize).max(1)
}

/// Widths of the column blocks covering `t` columns.
pub fn block_widths(d: usize, t: usize) -> Vec<usize> {
    let full = block_width(d);
    let mut widths = vec![full; t / full];
    if !t.is_multiple_of(full) {
        widths.push(t % full);
    }
    widths
}

/// Pattern codes of column block `block` (width `p`) for a `d`-row sign
/// matrix. Both the dense sign sampler and [`build_plan`] draw from here.
pub(crate) fn sample_block_codes(d: usize, p: usize, seed: u64, block: usize) -> Vec<u32> {
    assert!((1..=32).contains(&p), "block width {p} out of range");
    let mask = if p == 32 { u32::MAX } else { (1u32 << p) - 1 };
    let mut rng = rng::stream(seed, Domain::SignBlocks, block as u64);
    (0..d).map(|_| rng.next_u32() & mask).collect()
}

/// Sign (`+1`/`-1`) of column `b` in a block for the given pattern code.
#[inline]
pub fn code_sign(code: u32, b: usize) -> f64 {
    if (code >> b) & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MailmanBlock {
    p: usize,
    codes: Vec<u32>,
    scale: f64,
}

impl MailmanBlock {
    /// Builds a block from explicit codes. Every code must be below `2^p`.
    pub fn new(p: usize, codes: Vec<u32>, scale: f64) -> Result<Self> {
        if !(1..=32).contains(&p) {
            return Err(Error::param(format!("block width p = {p} outside 1..=32")));
        }
        if codes.is_empty() {
            return Err(Error::param("block needs at least one row"));
        }
        if let Some(bad) = codes.iter().find(|&&c| p < 32 && c >> p != 0) {
            return Err(Error::param(format!("code {bad} does not fit in {p} bits")));
        }
        if !scale.is_finite() {
            return Err(Error::param("block scale must be finite"));
        }
        Ok(MailmanBlock { p, codes, scale })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> usize {
        self.codes.len()
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MailmanPlan {
    d: usize,
    t: usize,
    blocks: Vec<MailmanBlock>,
}

impl MailmanPlan {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn blocks(&self) -> &[MailmanBlock] {
        &self.blocks
    }

    /// The scaled `d×t` sign matrix this plan multiplies by. Test and
    /// benchmark use only; the plan never needs it.
    pub fn densify(&self) -> Matrix {
        let mut data = vec![0.0; self.d * self.t];
        let mut col0 = 0;
        for block in &self.blocks {
            for (j, &code) in block.codes.iter().enumerate() {
                for b in 0..block.p {
                    data[j * self.t + col0 + b] = block.scale * code_sign(code, b);
                }
            }
            col0 += block.p;
        }
        Matrix::from_parts_unchecked(self.d, self.t, data)
    }
}

/// Samples the mailman representation of a `d×t` random sign matrix scaled
/// by `1/√t`. Densifying the result gives exactly
/// [`sample_sign_matrix(d, t, seed)`](crate::projection::sample_sign_matrix).
pub fn build_plan(d: usize, t: usize, seed: u64) -> Result<MailmanPlan> {
    if d < 2 {
        return Err(Error::param(format!("mailman plan needs d >= 2, got {d}")));
    }
    if t == 0 {
        return Err(Error::param("mailman plan needs t >= 1"));
    }
    let scale = 1.0 / (t as f64).sqrt();
    let blocks = block_widths(d, t)
        .into_iter()
        .enumerate()
        .map(|(i, p)| MailmanBlock { p, codes: sample_block_codes(d, p, seed, i), scale })
        .collect();
    Ok(MailmanPlan { d, t, blocks })
}

/// `x` times one block: `y_b = scale · Σ_j sign(code_j, b) · x_j`.
pub fn block_row_multiply(block: &MailmanBlock, x: &[f64]) -> Result<Vec<f64>> {
    check_len(block, x)?;
    let mut buckets = vec![0.0; 1 << block.p];
    let mut out = vec![0.0; block.p];
    block_kernel::<false>(block, x, &mut buckets, &mut out);
    Ok(out)
}

/// [`block_row_multiply`] that also returns the number of floating-point
/// additions and subtractions performed.
pub fn block_row_multiply_counted(block: &MailmanBlock, x: &[f64]) -> Result<(Vec<f64>, u64)> {
    check_len(block, x)?;
    let mut buckets = vec![0.0; 1 << block.p];
    let mut out = vec![0.0; block.p];
    let ops = block_kernel::<true>(block, x, &mut buckets, &mut out);
    Ok((out, ops))
}

fn check_len(block: &MailmanBlock, x: &[f64]) -> Result<()> {
    if x.len() != block.d() {
        return Err(Error::param(format!("vector length {} does not match block rows {}", x.len(), block.d())));
    }
    Ok(())
}

/// Bucket-and-fold kernel. `buckets` must hold at least `2^p` entries; its
/// contents on entry are ignored.
#[inline]
fn block_kernel<const COUNT: bool>(block: &MailmanBlock, x: &[f64], buckets: &mut [f64], out: &mut [f64]) -> u64 {
    let mut ops = 0u64;
    let p = block.p;
    let buckets = &mut buckets[..1 << p];
    buckets.fill(0.0);
    for (&code, &xj) in block.codes.iter().zip(x) {
        buckets[code as usize] += xj;
    }
    if COUNT {
        ops += x.len() as u64;
    }

    // At every level the bucket total S is unchanged by merging, so
    // Σhigh − Σlow = 2·Σhigh − S. Only Σhigh is accumulated per level and S
    // falls out of the final two-entry merge.
    let mut len = 1usize << p;
    for b in (1..p).rev() {
        let half = len / 2;
        let (low, high) = buckets[..len].split_at_mut(half);
        let mut high_sum = high[0];
        low[0] += high[0];
        for (l, &h) in low[1..].iter_mut().zip(&high[1..]) {
            high_sum += h;
            *l += h;
        }
        if COUNT {
            ops += 2 * half as u64 - 1;
        }
        out[b] = high_sum;
        len = half;
    }
    out[0] = buckets[1];
    let total = buckets[0] + buckets[1];
    if COUNT {
        ops += 1;
    }
    for y in out.iter_mut() {
        *y = block.scale * (2.0 * *y - total);
    }
    if COUNT {
        ops += p as u64;
    }
    ops
}

/// `a · R` for the sign matrix `R` described by `plan`.
pub fn project_mailman(a: &Matrix, plan: &MailmanPlan) -> Result<Matrix> {
    if a.n_cols() != plan.d {
        return Err(Error::param(format!("matrix has {} columns, plan expects d = {}", a.n_cols(), plan.d)));
    }
    let t = plan.t;
    let bucket_len = 1usize << block_width(plan.d);
    let mut out = vec![0.0; a.n_rows() * t];
    out.par_chunks_mut(t).enumerate().for_each_init(
        || vec![0.0; bucket_len],
        |buckets, (i, out_row)| {
            let x = a.row(i);
            let mut col0 = 0;
            for block in &plan.blocks {
                block_kernel::<false>(block, x, buckets, &mut out_row[col0..col0 + block.p]);
                col0 += block.p;
            }
        },
    );
    Ok(Matrix::from_parts_unchecked(a.n_rows(), t, out))
}

/// `a · R` computed block by block from regenerated codes, without ever
/// materializing `R` or using the bucket trick. Each output is a plain
/// signed sum over the row.
pub fn project_on_the_fly(a: &Matrix, d: usize, t: usize, seed: u64) -> Result<Matrix> {
    if a.n_cols() != d {
        return Err(Error::param(format!("matrix has {} columns, expected d = {d}", a.n_cols())));
    }
    if t == 0 {
        return Err(Error::param("t must be at least 1"));
    }
    let scale = 1.0 / (t as f64).sqrt();
    let mut out = Matrix::zeros(a.n_rows(), t);
    let mut col0 = 0;
    for (blk, p) in block_widths(d, t).into_iter().enumerate() {
        let codes = sample_block_codes(d, p, seed, blk);
        for i in 0..a.n_rows() {
            let x = a.row(i);
            for b in 0..p {
                let mut s = 0.0;
                for (&code, &xj) in codes.iter().zip(x) {
                    s += code_sign(code, b) * xj;
                }
                out.set(i, col0 + b, scale * s);
            }
        }
        col0 += p;
    }
    Ok(out)
}
