//! Randomized and grid experiments shared by the CLI and the acceptance
//! suite.

use std::thread;

use rand::Rng as _;
use shapecode_core::metrics::serial_kl;
use shapecode_core::optimizer::{equivalent_cost_vector, min_avg_cost, total_cost_curve, CurvePoint};
use shapecode_core::varn::{varn_build, CodeTree};
use shapecode_core::{CostVector, Pmf};

use crate::rng;
use crate::Result;

/// Concatenated codewords of `words` leaves drawn uniformly from `tree`.
pub fn uniform_codeword_stream(tree: &CodeTree, words: usize, rng: &mut rng::Rng) -> Vec<u8> {
    let n = tree.leaf_count() as u64;
    let mut out = Vec::with_capacity((words as f64 * tree.average_length()) as usize + 64);
    for _ in 0..words {
        let i = rng.random_range(0..n) as usize;
        out.extend_from_slice(&tree.leaves()[i].path);
    }
    out
}

/// One codebook size of a matcher trend run.
#[derive(Debug, Clone, PartialEq)]
pub struct DmRow {
    pub k: usize,
    /// Occurrence probabilities predicted from the tree.
    pub p_hat: Vec<f64>,
    /// Output symbols per `log2 v` bits of uniform input.
    pub f: f64,
    pub gef: f64,
    /// Serial statistics of orders 1..=3 on a sampled stream.
    pub serial_kl: [f64; 3],
    pub stream_len: usize,
}

/// Builds the `k`-leaf Varn code for the self-information costs of `target`
/// and measures it. Input messages are uniform over the `k` leaves, worth
/// `log2 k` bits each.
pub fn dm_row(target: &Pmf, k: usize, words: usize, rng: &mut rng::Rng) -> Result<DmRow> {
    let costs = equivalent_cost_vector(target)?;
    let tree = varn_build(k, &costs)?;
    let v = costs.len() as f64;
    let len = tree.average_length();
    let p_hat: Vec<f64> = tree.letter_counts().iter().map(|n| n / len).collect();
    let f = len * v.log2() / (k as f64).log2();
    let cross: f64 = p_hat.iter().zip(costs.costs()).map(|(p, c)| p * c).sum();
    let gef = f * cross / v.log2();
    let stream = uniform_codeword_stream(&tree, words, rng);
    let mut serial = [0.0; 3];
    for (m, s) in serial.iter_mut().enumerate() {
        *s = serial_kl(&stream, target, m + 1)?;
    }
    Ok(DmRow {
        k,
        p_hat,
        f,
        gef,
        serial_kl: serial,
        stream_len: stream.len(),
    })
}

/// [`dm_row`] for each `k`, one worker thread per size. Worker `i` uses
/// stream `i` of `seed`, so output does not depend on scheduling.
pub fn dm_test(target: &Pmf, ks: &[usize], seed: u64, words: usize) -> Result<Vec<DmRow>> {
    thread::scope(|s| {
        let handles: Vec<_> = ks
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                s.spawn(move || {
                    let mut r = rng::stream(seed, i);
                    dm_row(target, k, words, &mut r)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// True if each serial statistic is strictly lower at the last size than at
/// the first and never rises between consecutive sizes.
pub fn serial_trend_decreasing(rows: &[DmRow]) -> bool {
    (0..3).all(|m| rows.windows(2).all(|w| w[1].serial_kl[m] <= w[0].serial_kl[m]))
}

/// Total-cost curve over a grid of expansion factors.
pub fn curve(c: &CostVector, h_source: f64, grid: &[f64]) -> Result<Vec<CurvePoint>> {
    Ok(total_cost_curve(c, h_source, grid)?)
}

/// `(f, mu, minimum normalized I-divergence)` over a grid.
pub fn divergence_curve(target: &Pmf, h_source: f64, grid: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let costs = equivalent_cost_vector(target)?;
    grid.iter()
        .map(|&f| {
            let s = min_avg_cost(&costs, h_source, f)?;
            Ok((f, s.mu, (s.avg_cost - h_source / f).max(0.0)))
        })
        .collect()
}
