//! Generalized Shannon–Fano codes: interval coding of an arbitrary i.i.d.
//! source onto a costly alphabet.
//!
//! The unit interval is split recursively by the output tree, a node of cost
//! `W` owning a sub-interval of width `2^(-mu W)`, with children laid out in
//! symbol order. Since `Σ 2^(-mu C_i) = 1` the children tile their parent.
//! Block `x` owns `[s, s + P(x))` of the cumulative distribution (blocks
//! sorted by descending probability) and is coded by the shallowest node
//! that contains its midpoint and is at most `P(x)/2` wide. That node lies
//! inside `x`'s interval, so codewords never nest, and its parent was wider
//! than `P(x)/2`, which bounds the codeword cost by
//! `(-log2 P(x) + 1)/mu + max C_i`.

use alloc::vec::Vec;

use crate::float::exp2;
use crate::optimizer::solve_mu_capacity;
use crate::{CodeBook, CostVector, Error, Result, SourceSpec};

/// Largest number of source blocks accepted by [`gsf_build`].
pub const MAX_BLOCKS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct GsfCode {
    pub codebook: CodeBook,
    pub mu: f64,
    pub block_len: usize,
}

impl GsfCode {
    /// Upper bound `(-log2 P)/mu + 2 max C_i` on the codeword cost of a
    /// block of probability `p`. Uses `1/mu <= max C_i`.
    pub fn cost_bound(&self, p: f64, c: &CostVector) -> f64 {
        -crate::float::log2(p) / self.mu + 2.0 * c.max()
    }
}

pub fn gsf_build(src: &SourceSpec, c: &CostVector) -> Result<GsfCode> {
    let mu = solve_mu_capacity(c)?;
    match src.block_count() {
        Some(n) if n <= MAX_BLOCKS => {}
        _ => return Err(Error::InvalidArgument("more than 2^20 source blocks")),
    }
    let probs = src.block_probs()?;
    if let Some(index) = probs.iter().position(|&p| p <= 0.0) {
        return Err(Error::ZeroProbability { index });
    }
    let letter_width: Vec<f64> = c.costs().iter().map(|&ci| exp2(-mu * ci)).collect();

    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b)));

    let mut entries = alloc::vec![Vec::new(); probs.len()];
    let mut start = 0.0;
    for &x in &order {
        let p = probs[x];
        let mid = start + 0.5 * p;
        entries[x] = locate(mid, 0.5 * p, &letter_width);
        start += p;
    }
    let codebook = CodeBook::new(src.alphabet(), src.block_len(), c.len(), entries)?;
    Ok(GsfCode {
        codebook,
        mu,
        block_len: src.block_len(),
    })
}

// Path of the shallowest node containing `point` with width <= `max_width`.
fn locate(point: f64, max_width: f64, letter_width: &[f64]) -> Vec<u8> {
    let mut path = Vec::new();
    let mut lo = 0.0;
    let mut width = 1.0;
    while width > max_width {
        let mut chosen = letter_width.len() - 1;
        let mut child_lo = lo;
        for (s, &lw) in letter_width.iter().enumerate() {
            let w = width * lw;
            // The last child absorbs rounding at the parent's right edge.
            if point < child_lo + w || s == letter_width.len() - 1 {
                chosen = s;
                break;
            }
            child_lo += w;
        }
        path.push(chosen as u8);
        lo = child_lo;
        width *= letter_width[chosen];
    }
    path
}

/// Expected codeword cost per source symbol.
pub fn gsf_total_cost(code: &GsfCode, src: &SourceSpec, c: &CostVector) -> Result<f64> {
    let probs = src.block_probs()?;
    if probs.len() != code.codebook.entries().len() {
        return Err(Error::DimensionMismatch {
            expected: code.codebook.entries().len(),
            found: probs.len(),
        });
    }
    let total: f64 = probs
        .iter()
        .zip(code.codebook.entries())
        .map(|(p, e)| p * c.path_cost(e))
        .sum();
    Ok(total / code.block_len as f64)
}
