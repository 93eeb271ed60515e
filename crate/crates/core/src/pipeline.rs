//! Compress-then-shape: LZ78 on the input bytes, then a modified Varn tree
//! over `k_bits`-bit blocks of the compressed stream.
//!
//! Rates are counted in source symbols of `log2 v` bits, so an input of `n`
//! bytes holds `8n / log2 v` source symbols and the expansion factor is the
//! number of output symbols per source symbol.

use alloc::vec::Vec;

use crate::bits::BitBuf;
use crate::float::log2;
use crate::lz78;
use crate::optimizer::{equivalent_cost_vector, min_avg_cost, ShapingSolution};
use crate::varn::{decode_stream, modified_varn_build, CodeTree};
use crate::{CostVector, Error, Pmf, Result};

/// Output symbols of a shaped bit string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shaped {
    pub k_bits: u32,
    /// Length of the bit string before padding to whole blocks.
    pub bit_len: u64,
    pub symbols: Vec<u8>,
}

fn block_bits(tree: &CodeTree) -> Result<u32> {
    let n = tree.leaf_count();
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::InvalidArgument("leaf count must be a power of two"));
    }
    Ok(n.trailing_zeros())
}

/// Maps each `k_bits`-bit block (MSB first, last block zero-padded) to the
/// leaf with that index.
pub fn shape_encode(bits: &BitBuf, tree: &CodeTree) -> Result<Shaped> {
    let k = block_bits(tree)?;
    let mut r = bits.reader();
    let mut leaves = Vec::with_capacity(bits.len().div_ceil(k as usize));
    while r.remaining() > 0 {
        let take = (k as usize).min(r.remaining()) as u32;
        let v = r.read_bits(take).expect("bits remain") << (k - take);
        leaves.push(v as usize);
    }
    Ok(Shaped {
        k_bits: k,
        bit_len: bits.len() as u64,
        symbols: tree.encode(&leaves)?,
    })
}

pub fn shape_decode(s: &Shaped, tree: &CodeTree) -> Result<BitBuf> {
    let k = block_bits(tree)?;
    if k != s.k_bits {
        return Err(Error::CorruptStream("block size does not match tree"));
    }
    let d = decode_stream(tree, &s.symbols)?;
    if !d.residual.is_empty() {
        return Err(Error::CorruptStream("stream ends inside a codeword"));
    }
    let bit_len = usize::try_from(s.bit_len).map_err(|_| Error::CorruptStream("bit length overflows"))?;
    if d.leaves.len() != bit_len.div_ceil(k as usize) {
        return Err(Error::CorruptStream("codeword count does not match bit length"));
    }
    let mut out = BitBuf::new();
    for &leaf in &d.leaves {
        out.push_bits(leaf as u64, k);
    }
    let pad = out.len() - bit_len;
    if out.iter().skip(bit_len).take(pad).any(|b| b) {
        return Err(Error::CorruptStream("non-zero padding"));
    }
    out.truncate(bit_len);
    Ok(out)
}

/// Shaping back-end chosen for one compressed input.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineDesign {
    /// Compressed bits per input bit.
    pub compression_ratio: f64,
    /// Back-end expansion factor `f_target / g`, floored at 1.
    pub back_end_expansion: f64,
    /// True when `f_target / g < 1` and the floor applied.
    pub clamped: bool,
    /// Optimal symbol distribution for the back end.
    pub solution: ShapingSolution,
    /// Self-information costs of that distribution.
    pub equivalent_costs: CostVector,
    pub tree: CodeTree,
}

/// Designs the back end for `compressed_bits` bits of compressor output from
/// `input_bytes` bytes, aiming at overall expansion `f_target`.
pub fn design(
    input_bytes: usize,
    compressed_bits: usize,
    c: &CostVector,
    k_bits: u32,
    f_target: f64,
) -> Result<PipelineDesign> {
    if input_bytes == 0 {
        return Err(Error::InvalidArgument("empty input"));
    }
    if !(f_target > 0.0 && f_target.is_finite()) {
        return Err(Error::InvalidArgument("target expansion must be positive"));
    }
    let g = compressed_bits as f64 / (8.0 * input_bytes as f64);
    let raw = f_target / g;
    let clamped = raw < 1.0;
    let back_end_expansion = raw.max(1.0);
    let h = log2(c.len() as f64);
    let solution = min_avg_cost(c, h, back_end_expansion)?;
    let equivalent_costs = equivalent_cost_vector(&solution.p_hat)?;
    let tree = modified_varn_build(k_bits, &equivalent_costs)?;
    Ok(PipelineDesign {
        compression_ratio: g,
        back_end_expansion,
        clamped,
        solution,
        equivalent_costs,
        tree,
    })
}

/// Measured and analytic figures for one pass of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub input_bytes: usize,
    pub compressed_bits: usize,
    /// `g`, compressed bits per input bit.
    pub compression_ratio: f64,
    /// Back-end target `f'`.
    pub back_end_expansion: f64,
    pub clamped: bool,
    /// Output symbols per back-end input symbol.
    pub achieved_back_end_expansion: f64,
    /// Output symbols per source symbol, i.e. `g * f` achieved.
    pub overall_expansion: f64,
    pub output_symbols: usize,
    /// Channel cost per output symbol, measured.
    pub avg_cost: f64,
    /// Channel cost per output symbol of the optimum at `f'`.
    pub analytic_avg_cost: f64,
    /// Channel cost per output symbol the tree achieves on uniform blocks.
    pub tree_avg_cost: f64,
    /// Channel cost per source symbol, measured.
    pub total_cost: f64,
    pub target_p_hat: Pmf,
    pub empirical_p_hat: Pmf,
    /// `D(empirical || target)`.
    pub p_hat_divergence: f64,
    pub lossless: bool,
}

impl PipelineReport {
    /// `|measured - analytic| / analytic` for the average cost.
    pub fn relative_cost_gap(&self) -> f64 {
        (self.avg_cost - self.analytic_avg_cost).abs() / self.analytic_avg_cost
    }
}

/// Symbol frequencies of `symbols` over `v` letters.
pub fn symbol_frequencies(symbols: &[u8], v: usize) -> Vec<f64> {
    let mut counts = alloc::vec![0u64; v];
    for &s in symbols {
        counts[s as usize] += 1;
    }
    let n = symbols.len().max(1) as f64;
    counts.into_iter().map(|c| c as f64 / n).collect()
}

/// Runs compress, design, shape and the inverse on `data`.
pub fn pipeline_report(
    data: &[u8],
    c: &CostVector,
    k_bits: u32,
    f_target: f64,
) -> Result<PipelineReport> {
    let compressed = lz78::compress(data);
    let d = design(data.len(), compressed.len(), c, k_bits, f_target)?;
    let shaped = shape_encode(&compressed, &d.tree)?;
    let lossless = shape_decode(&shaped, &d.tree)
        .and_then(|b| lz78::decompress(&b))
        .is_ok_and(|out| out == data);

    let v = c.len();
    let h = log2(v as f64);
    let out_len = shaped.symbols.len();
    let freqs = symbol_frequencies(&shaped.symbols, v);
    let empirical_p_hat = Pmf::new(freqs)?;
    let cost_sum: f64 = shaped.symbols.iter().map(|&s| c.cost(s as usize)).sum();
    let avg_cost = cost_sum / out_len as f64;
    let counts = d.tree.letter_counts();
    let tree_avg_cost =
        counts.iter().zip(c.costs()).map(|(n, ci)| n * ci).sum::<f64>() / d.tree.average_length();
    let source_symbols = 8.0 * data.len() as f64 / h;
    let back_end_symbols = compressed.len() as f64 / h;
    let p_hat_divergence = crate::model::kl_divergence(&empirical_p_hat, &d.solution.p_hat)?;
    Ok(PipelineReport {
        input_bytes: data.len(),
        compressed_bits: compressed.len(),
        compression_ratio: d.compression_ratio,
        back_end_expansion: d.back_end_expansion,
        clamped: d.clamped,
        achieved_back_end_expansion: out_len as f64 / back_end_symbols,
        overall_expansion: out_len as f64 / source_symbols,
        output_symbols: out_len,
        avg_cost,
        analytic_avg_cost: d.solution.avg_cost,
        tree_avg_cost,
        total_cost: cost_sum / source_symbols,
        target_p_hat: d.solution.p_hat.clone(),
        empirical_p_hat,
        p_hat_divergence,
        lossless,
    })
}
