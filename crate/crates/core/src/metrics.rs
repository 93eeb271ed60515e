//! Code evaluation: occurrence probabilities, generalized expansion factor,
//! I-divergence in its raw and normalized forms, the entropy gap, and
//! serial KL statistics of symbol streams.

use alloc::vec::Vec;

use crate::float::log2;
use crate::model::{codebook_stats, entropy};
use crate::{CodeBook, CostVector, Error, Pmf, Result, SourceSpec};

/// Highest pattern order accepted by [`serial_kl`].
pub const MAX_SERIAL_ORDER: usize = 3;

/// Every figure of merit for one code on one source.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub p_hat: Pmf,
    pub f: f64,
    pub avg_cost: f64,
    pub total_cost: f64,
    pub gef: f64,
    pub i_div: f64,
    pub norm_i_div: f64,
    pub kl_gap: f64,
    /// Orders 1, 2, 3 when a stream was supplied, else empty.
    pub serial_kl: Vec<f64>,
}

fn check_target(cb: &CodeBook, target: &Pmf) -> Result<()> {
    if target.len() != cb.output_alphabet() {
        return Err(Error::DimensionMismatch {
            expected: cb.output_alphabet(),
            found: target.len(),
        });
    }
    if let Some(index) = target.first_zero() {
        return Err(Error::ZeroProbability { index });
    }
    Ok(())
}

/// Long-run output letter frequencies, `E(N_i) / E(L)`.
pub fn asymptotic_occurrence(cb: &CodeBook, src: &SourceSpec) -> Result<Pmf> {
    let s = codebook_stats(cb, src)?;
    if s.expected_length <= 0.0 {
        return Err(Error::InvalidArgument("expected codeword length is zero"));
    }
    Pmf::new(
        s.expected_counts
            .iter()
            .map(|n| n / s.expected_length)
            .collect(),
    )
}

/// `-f Σ p_i log2 P_i / log2 v`, with `p` the occurrence probabilities and
/// `P` the target.
pub fn gef(cb: &CodeBook, src: &SourceSpec, target: &Pmf) -> Result<f64> {
    check_target(cb, target)?;
    let s = codebook_stats(cb, src)?;
    // E(N_i)/E(L) * E(L)/q = E(N_i)/q
    let cross: f64 = s
        .expected_counts
        .iter()
        .zip(target.probs())
        .map(|(n, p)| -n * log2(*p))
        .sum();
    Ok(cross / cb.block_len() as f64 / log2(cb.output_alphabet() as f64))
}

/// `Σ_x P(x) log2(P(x) / Π_j P(y_j))` over blocks `x` with codeword `y`.
pub fn i_divergence(cb: &CodeBook, src: &SourceSpec, target: &Pmf) -> Result<f64> {
    check_target(cb, target)?;
    codebook_stats(cb, src)?;
    let log_target: Vec<f64> = target.probs().iter().map(|&p| log2(p)).collect();
    let probs = src.block_probs()?;
    let mut d = 0.0;
    for (p, entry) in probs.iter().zip(cb.entries()) {
        if *p == 0.0 {
            continue;
        }
        let log_leaf: f64 = entry.iter().map(|&s| log_target[s as usize]).sum();
        d += p * (log2(*p) - log_leaf);
    }
    Ok(d)
}

/// I-divergence through the generalized expansion factor:
/// `(F - H(X)/log2 v) q log2 v`.
pub fn i_divergence_via_gef(cb: &CodeBook, src: &SourceSpec, target: &Pmf) -> Result<f64> {
    let lv = log2(cb.output_alphabet() as f64);
    let f = gef(cb, src, target)?;
    Ok((f - src.entropy() / lv) * cb.block_len() as f64 * lv)
}

/// I-divergence per output symbol.
pub fn normalized_i_divergence(cb: &CodeBook, src: &SourceSpec, target: &Pmf) -> Result<f64> {
    let i = i_divergence(cb, src, target)?;
    Ok(i / codebook_stats(cb, src)?.expected_length)
}

/// Normalized I-divergence as `Σ p_i C_i - H(X)/f` with self-information
/// costs `C_i = -log2 P_i`.
pub fn normalized_i_divergence_via_costs(
    cb: &CodeBook,
    src: &SourceSpec,
    target: &Pmf,
) -> Result<f64> {
    check_target(cb, target)?;
    let s = codebook_stats(cb, src)?;
    let p_hat = asymptotic_occurrence(cb, src)?;
    let avg: f64 = p_hat
        .probs()
        .iter()
        .zip(target.probs())
        .map(|(q, p)| -q * log2(*p))
        .sum();
    Ok(avg - src.entropy() / s.expansion)
}

/// `H(p_hat) - q H(X) / E(L)`: how far the output entropy rate falls short
/// of the entropy of its letter frequencies.
pub fn kl_gap(cb: &CodeBook, src: &SourceSpec) -> Result<f64> {
    let s = codebook_stats(cb, src)?;
    let p_hat = asymptotic_occurrence(cb, src)?;
    Ok(entropy(&p_hat) - cb.block_len() as f64 * src.entropy() / s.expected_length)
}

/// Divergence of overlapping `order`-gram frequencies in `stream` from the
/// i.i.d. product of `target`. There are `len - order + 1` windows.
pub fn serial_kl(stream: &[u8], target: &Pmf, order: usize) -> Result<f64> {
    if !(1..=MAX_SERIAL_ORDER).contains(&order) {
        return Err(Error::InvalidArgument("pattern order must be 1, 2 or 3"));
    }
    if stream.len() <= order {
        return Err(Error::StreamTooShort {
            len: stream.len(),
            order,
        });
    }
    if let Some(index) = target.first_zero() {
        return Err(Error::ZeroProbability { index });
    }
    let v = target.len();
    if let Some(&s) = stream.iter().find(|&&s| s as usize >= v) {
        return Err(Error::InvalidSymbol {
            symbol: s,
            alphabet: v,
        });
    }
    let log_target: Vec<f64> = target.probs().iter().map(|&p| log2(p)).collect();
    let mut grams: Vec<u32> = stream
        .windows(order)
        .map(|w| w.iter().fold(0u32, |acc, &s| acc * v as u32 + u32::from(s)))
        .collect();
    grams.sort_unstable();
    let total = grams.len() as f64;
    let mut d = 0.0;
    for run in grams.chunk_by(|a, b| a == b) {
        let freq = run.len() as f64 / total;
        let mut code = run[0];
        let mut log_model = 0.0;
        for _ in 0..order {
            log_model += log_target[(code % v as u32) as usize];
            code /= v as u32;
        }
        d += freq * (log2(freq) - log_model);
    }
    Ok(d.max(0.0))
}

/// Evaluates `cb` on `src` against `target`. Average and total cost use
/// `costs` when given and the self-information costs of `target` otherwise.
/// Serial statistics are computed from `stream` when one is supplied.
pub fn evaluate(
    cb: &CodeBook,
    src: &SourceSpec,
    target: &Pmf,
    costs: Option<&CostVector>,
    stream: Option<&[u8]>,
) -> Result<MetricsReport> {
    check_target(cb, target)?;
    let s = codebook_stats(cb, src)?;
    let p_hat = asymptotic_occurrence(cb, src)?;
    let avg_cost: f64 = match costs {
        Some(c) => {
            if c.len() != cb.output_alphabet() {
                return Err(Error::DimensionMismatch {
                    expected: cb.output_alphabet(),
                    found: c.len(),
                });
            }
            p_hat.probs().iter().zip(c.costs()).map(|(p, ci)| p * ci).sum()
        }
        None => p_hat
            .probs()
            .iter()
            .zip(target.probs())
            .map(|(q, p)| -q * log2(*p))
            .sum(),
    };
    let serial = match stream {
        Some(st) => (1..=MAX_SERIAL_ORDER)
            .map(|m| serial_kl(st, target, m))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    Ok(MetricsReport {
        f: s.expansion,
        avg_cost,
        total_cost: s.expansion * avg_cost,
        gef: gef(cb, src, target)?,
        i_div: i_divergence(cb, src, target)?,
        norm_i_div: normalized_i_divergence(cb, src, target)?,
        kl_gap: kl_gap(cb, src)?,
        serial_kl: serial,
        p_hat,
    })
}
