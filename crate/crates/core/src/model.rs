//! Value types shared by every other module, plus entropy and divergence.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::float::{log2, self_info};
use crate::{Error, Result};

/// Sum-to-one tolerance accepted as is.
pub const PMF_TOLERANCE: f64 = 1e-9;
/// Largest normalization error that is silently repaired.
pub const PMF_RENORMALIZE_LIMIT: f64 = 1e-6;

/// Per-symbol channel costs `C_0..C_{v-1}` for the output alphabet.
///
/// Costs are kept in the caller's symbol order. The ascending order used by
/// tree construction is available through [`CostVector::by_cost`]; ties are
/// ordered by symbol index.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector {
    costs: Vec<f64>,
    // order[r] = symbol with the r-th smallest cost
    order: Vec<usize>,
}

impl CostVector {
    pub fn new(costs: &[f64]) -> Result<Self> {
        if costs.len() < 2 {
            return Err(Error::InvalidCosts("need at least two symbols"));
        }
        if costs.len() > 255 {
            return Err(Error::InvalidCosts("at most 255 output symbols are supported"));
        }
        if costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidCosts("costs must be finite and non-negative"));
        }
        let mut order: Vec<usize> = (0..costs.len()).collect();
        order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
        Ok(Self {
            costs: costs.to_vec(),
            order,
        })
    }

    /// Costs in symbol order.
    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn cost(&self, symbol: usize) -> f64 {
        self.costs[symbol]
    }

    /// Symbols sorted by ascending cost.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `(symbol, cost)` pairs by ascending cost.
    pub fn by_cost(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.order.iter().map(|&s| (s, self.costs[s]))
    }

    /// Costs sorted ascending.
    pub fn sorted(&self) -> Vec<f64> {
        self.by_cost().map(|(_, c)| c).collect()
    }

    pub fn min(&self) -> f64 {
        self.costs[self.order[0]]
    }

    pub fn max(&self) -> f64 {
        self.costs[*self.order.last().unwrap()]
    }

    /// Number of symbols sharing the minimum cost.
    pub fn min_multiplicity(&self) -> usize {
        let min = self.min();
        self.costs.iter().filter(|&&c| c == min).count()
    }

    /// True when every symbol has the same cost.
    pub fn is_uniform(&self) -> bool {
        self.min() == self.max()
    }

    /// Cost of a sequence of output symbols.
    pub fn path_cost(&self, path: &[u8]) -> f64 {
        path.iter().map(|&s| self.costs[s as usize]).sum()
    }
}

/// A probability mass function over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates `probs`. Sums within 1e-9 of one are kept as given, sums
    /// within 1e-6 are renormalized, anything else is rejected.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidPmf("entries must be finite and non-negative"));
        }
        let sum: f64 = probs.iter().sum();
        let err = (sum - 1.0).abs();
        if err <= PMF_TOLERANCE {
            Ok(Self { probs })
        } else if err <= PMF_RENORMALIZE_LIMIT {
            Ok(Self {
                probs: probs.into_iter().map(|p| p / sum).collect(),
            })
        } else {
            Err(Error::InvalidPmf("entries do not sum to one"))
        }
    }

    /// Normalizes non-negative weights into a pmf.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidPmf("weights must be finite and non-negative"));
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidPmf("weights sum to zero"));
        }
        Pmf::new(weights.iter().map(|w| w / sum).collect())
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform pmf needs at least one symbol");
        Self {
            probs: alloc::vec![1.0 / n as f64; n],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        entropy(self)
    }

    /// Index of the first zero entry, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.probs.iter().position(|&p| p == 0.0)
    }
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(p.probs())
}

pub(crate) fn entropy_of(p: &[f64]) -> f64 {
    p.iter().map(|&x| self_info(x)).sum()
}

/// `D(p || q)` in bits.
pub fn kl_divergence(p: &Pmf, q: &Pmf) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let mut d = 0.0;
    for (i, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(Error::SupportMismatch { index: i });
        }
        d += pi * log2(pi / qi);
    }
    Ok(d.max(0.0))
}

/// An i.i.d. source emitting blocks of `block_len` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pmf: Pmf,
    block_len: usize,
}

impl SourceSpec {
    pub fn new(pmf: Pmf, block_len: usize) -> Result<Self> {
        if block_len == 0 {
            return Err(Error::InvalidArgument("block length must be at least 1"));
        }
        Ok(Self { pmf, block_len })
    }

    /// Uniform source over `alphabet` symbols.
    pub fn uniform(alphabet: usize, block_len: usize) -> Result<Self> {
        Self::new(Pmf::uniform(alphabet), block_len)
    }

    pub fn pmf(&self) -> &Pmf {
        &self.pmf
    }

    pub fn alphabet(&self) -> usize {
        self.pmf.len()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Entropy per source symbol, `H(X)`.
    pub fn entropy(&self) -> f64 {
        self.pmf.entropy()
    }

    /// `u^q`, or `None` on overflow.
    pub fn block_count(&self) -> Option<usize> {
        checked_pow(self.alphabet(), self.block_len)
    }

    /// Probability of the block with lexicographic index `index`.
    pub fn block_prob(&self, mut index: usize) -> f64 {
        let u = self.alphabet();
        let mut p = 1.0;
        for _ in 0..self.block_len {
            p *= self.pmf.get(index % u);
            index /= u;
        }
        p
    }

    /// Probabilities of all `u^q` blocks in lexicographic order.
    pub fn block_probs(&self) -> Result<Vec<f64>> {
        let n = self
            .block_count()
            .ok_or(Error::InvalidArgument("too many source blocks"))?;
        // Extend one symbol at a time; the last symbol varies fastest.
        let mut probs = alloc::vec![1.0];
        probs.reserve(n);
        for _ in 0..self.block_len {
            probs = probs
                .iter()
                .flat_map(|&p| self.pmf.probs().iter().map(move |&s| p * s))
                .collect();
        }
        Ok(probs)
    }
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// A prefix-free map from the `u^q` source blocks (lexicographic order) to
/// output strings over `0..v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeBook {
    source_alphabet: usize,
    block_len: usize,
    output_alphabet: usize,
    entries: Vec<Vec<u8>>,
}

impl CodeBook {
    pub fn new(
        source_alphabet: usize,
        block_len: usize,
        output_alphabet: usize,
        entries: Vec<Vec<u8>>,
    ) -> Result<Self> {
        if source_alphabet < 1 || block_len < 1 {
            return Err(Error::InvalidArgument("empty source alphabet or block"));
        }
        if !(2..=255).contains(&output_alphabet) {
            return Err(Error::InvalidArgument("output alphabet must have 2..=255 symbols"));
        }
        let expected = checked_pow(source_alphabet, block_len)
            .ok_or(Error::InvalidArgument("too many source blocks"))?;
        if entries.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: entries.len(),
            });
        }
        for e in &entries {
            if e.is_empty() {
                return Err(Error::NotPrefixFree);
            }
            if let Some(&s) = e.iter().find(|&&s| s as usize >= output_alphabet) {
                return Err(Error::InvalidSymbol {
                    symbol: s,
                    alphabet: output_alphabet,
                });
            }
        }
        if !check_prefix_free(&entries) {
            return Err(Error::NotPrefixFree);
        }
        Ok(Self {
            source_alphabet,
            block_len,
            output_alphabet,
            entries,
        })
    }

    pub fn source_alphabet(&self) -> usize {
        self.source_alphabet
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn output_alphabet(&self) -> usize {
        self.output_alphabet
    }

    pub fn entries(&self) -> &[Vec<u8>] {
        &self.entries
    }

    pub fn entry(&self, block: usize) -> &[u8] {
        &self.entries[block]
    }

    /// `Σ v^{-len}` over all entries; at most one for a prefix-free set.
    pub fn kraft_sum(&self) -> f64 {
        kraft_sum(&self.entries, self.output_alphabet)
    }

    /// Concatenated codewords for a sequence of block indices.
    pub fn encode(&self, blocks: &[usize]) -> Vec<u8> {
        blocks
            .iter()
            .flat_map(|&b| self.entries[b].iter().copied())
            .collect()
    }

    fn check_source(&self, src: &SourceSpec) -> Result<()> {
        if src.alphabet() != self.source_alphabet {
            return Err(Error::DimensionMismatch {
                expected: self.source_alphabet,
                found: src.alphabet(),
            });
        }
        if src.block_len() != self.block_len {
            return Err(Error::DimensionMismatch {
                expected: self.block_len,
                found: src.block_len(),
            });
        }
        Ok(())
    }
}

/// Expected codeword length, expansion factor and expected symbol counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CodebookStats {
    /// `E(L)`.
    pub expected_length: f64,
    /// `f = E(L) / q`.
    pub expansion: f64,
    /// `E(N_i)` for each output symbol.
    pub expected_counts: Vec<f64>,
}

pub fn codebook_stats(cb: &CodeBook, src: &SourceSpec) -> Result<CodebookStats> {
    cb.check_source(src)?;
    let probs = src.block_probs()?;
    let mut counts = alloc::vec![0.0; cb.output_alphabet()];
    let mut per_word = alloc::vec![0usize; cb.output_alphabet()];
    for (p, entry) in probs.iter().zip(cb.entries()) {
        if *p == 0.0 {
            continue;
        }
        per_word.iter_mut().for_each(|c| *c = 0);
        for &s in entry {
            per_word[s as usize] += 1;
        }
        for (acc, &n) in counts.iter_mut().zip(&per_word) {
            *acc += p * n as f64;
        }
    }
    let expected_length: f64 = counts.iter().sum();
    Ok(CodebookStats {
        expected_length,
        expansion: expected_length / cb.block_len() as f64,
        expected_counts: counts,
    })
}

/// True iff no entry is a prefix of another and there are no duplicates.
pub fn check_prefix_free<E: AsRef<[u8]>>(entries: &[E]) -> bool {
    let mut sorted: Vec<&[u8]> = entries.iter().map(AsRef::as_ref).collect();
    sorted.sort_unstable();
    // In lexicographic order a prefix sorts directly before some extension of
    // itself, so adjacent pairs suffice.
    sorted.windows(2).all(|w| !w[1].starts_with(w[0]))
}

pub fn kraft_sum<E: AsRef<[u8]>>(entries: &[E], alphabet: usize) -> f64 {
    let base = 1.0 / alphabet as f64;
    entries
        .iter()
        .map(|e| libm::pow(base, e.as_ref().len() as f64))
        .sum()
}

/// Canonical leaf order: cost, then shorter path, then lexicographic path.
pub(crate) fn cmp_cost_path(a: (f64, &[u8]), b: (f64, &[u8])) -> Ordering {
    a.0.total_cmp(&b.0)
        .then_with(|| a.1.len().cmp(&b.1.len()))
        .then_with(|| a.1.cmp(b.1))
}
