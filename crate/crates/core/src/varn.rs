//! Minimum-cost prefix trees for equiprobable messages (Varn codes), the
//! power-of-two trimmed variant used behind a compressor, and tree decoding.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use crate::float::log2;
use crate::model::{check_prefix_free, cmp_cost_path, checked_pow};
use crate::optimizer::solve_mu_capacity;
use crate::{CodeBook, CostVector, Error, Result};

/// Largest `k_bits` accepted by [`modified_varn_build`].
pub const MAX_K_BITS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Empty,
    Node(u32),
    Leaf(u32),
}

/// A leaf of a code tree: its output string and the sum of its letter costs.
#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    pub path: Vec<u8>,
    pub cost: f64,
}

/// A prefix code tree over a `v`-letter output alphabet.
///
/// Leaves are kept in canonical order: ascending cost, ties broken by the
/// shorter path and then lexicographically.
/// Leaf indices used by [`CodeTree::encode`] and [`decode_stream`] refer to
/// that order.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeTree {
    costs: CostVector,
    leaves: Vec<Leaf>,
    // `v` slots per internal node; node 0 is the root.
    slots: Vec<Slot>,
}

impl CodeTree {
    /// Builds a tree from explicit leaf paths.
    pub fn from_paths(costs: &CostVector, paths: Vec<Vec<u8>>) -> Result<Self> {
        let v = costs.len();
        if paths.is_empty() {
            return Err(Error::InvalidArgument("a tree needs at least one leaf"));
        }
        for p in &paths {
            if p.is_empty() {
                return Err(Error::NotPrefixFree);
            }
            if let Some(&s) = p.iter().find(|&&s| s as usize >= v) {
                return Err(Error::InvalidSymbol {
                    symbol: s,
                    alphabet: v,
                });
            }
        }
        if !check_prefix_free(&paths) {
            return Err(Error::NotPrefixFree);
        }
        let mut leaves: Vec<Leaf> = paths
            .into_iter()
            .map(|path| Leaf {
                cost: costs.path_cost(&path),
                path,
            })
            .collect();
        leaves.sort_by(|a, b| cmp_cost_path((a.cost, &a.path), (b.cost, &b.path)));

        let mut slots = vec![Slot::Empty; v];
        for (li, leaf) in leaves.iter().enumerate() {
            let mut node = 0usize;
            let (last, inner) = leaf.path.split_last().expect("non-empty path");
            for &s in inner {
                let at = node * v + s as usize;
                node = match slots[at] {
                    Slot::Node(n) => n as usize,
                    Slot::Empty => {
                        let n = slots.len() / v;
                        slots[at] = Slot::Node(n as u32);
                        slots.extend(core::iter::repeat_n(Slot::Empty, v));
                        n
                    }
                    // Excluded by the prefix check.
                    Slot::Leaf(_) => unreachable!("prefix-free paths"),
                };
            }
            slots[node * v + *last as usize] = Slot::Leaf(li as u32);
        }
        Ok(Self {
            costs: costs.clone(),
            leaves,
            slots,
        })
    }

    pub fn output_alphabet(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &CostVector {
        &self.costs
    }

    /// Leaves in canonical order.
    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn internal_count(&self) -> usize {
        self.slots.len() / self.output_alphabet()
    }

    /// Sum of leaf costs.
    pub fn total_leaf_cost(&self) -> f64 {
        self.leaves.iter().map(|l| l.cost).sum()
    }

    /// Average leaf cost, i.e. the expected codeword cost for equiprobable
    /// messages.
    pub fn average_cost(&self) -> f64 {
        self.total_leaf_cost() / self.leaves.len() as f64
    }

    /// Average leaf depth.
    pub fn average_length(&self) -> f64 {
        let total: usize = self.leaves.iter().map(|l| l.path.len()).sum();
        total as f64 / self.leaves.len() as f64
    }

    pub fn max_leaf_cost(&self) -> f64 {
        self.leaves.last().map_or(0.0, |l| l.cost)
    }

    /// `hist[d]` = number of leaves at depth `d`.
    pub fn length_histogram(&self) -> Vec<usize> {
        let max = self.leaves.iter().map(|l| l.path.len()).max().unwrap_or(0);
        let mut hist = vec![0; max + 1];
        for l in &self.leaves {
            hist[l.path.len()] += 1;
        }
        hist
    }

    /// Expected count of each output letter per codeword, messages uniform.
    pub fn letter_counts(&self) -> Vec<f64> {
        let mut counts = vec![0.0; self.output_alphabet()];
        let w = 1.0 / self.leaves.len() as f64;
        for l in &self.leaves {
            for &s in &l.path {
                counts[s as usize] += w;
            }
        }
        counts
    }

    /// Concatenated paths of the given leaves.
    pub fn encode(&self, leaf_indices: &[usize]) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for &i in leaf_indices {
            let leaf = self
                .leaves
                .get(i)
                .ok_or(Error::InvalidArgument("leaf index out of range"))?;
            out.extend_from_slice(&leaf.path);
        }
        Ok(out)
    }

    fn step(&self, node: usize, symbol: u8) -> Result<Slot> {
        let v = self.output_alphabet();
        if symbol as usize >= v {
            return Err(Error::InvalidSymbol {
                symbol,
                alphabet: v,
            });
        }
        match self.slots[node * v + symbol as usize] {
            Slot::Empty => Err(Error::CorruptStream("path leaves the code tree")),
            s => Ok(s),
        }
    }
}

/// Leaves parsed from a symbol stream plus the trailing incomplete path.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Decoded {
    pub leaves: Vec<usize>,
    pub residual: Vec<u8>,
}

/// Parses `symbols` root to leaf, repeatedly.
pub fn decode_stream(tree: &CodeTree, symbols: &[u8]) -> Result<Decoded> {
    let mut out = Decoded::default();
    let mut node = 0usize;
    let mut start = 0usize;
    for (i, &s) in symbols.iter().enumerate() {
        match tree.step(node, s)? {
            Slot::Node(n) => node = n as usize,
            Slot::Leaf(l) => {
                out.leaves.push(l as usize);
                node = 0;
                start = i + 1;
            }
            Slot::Empty => unreachable!(),
        }
    }
    out.residual = symbols[start..].to_vec();
    Ok(out)
}

/// Parses exactly `count` codewords from the front of `symbols` and returns
/// them with the number of symbols consumed. Symbols after that point are
/// not inspected.
pub fn decode_count(tree: &CodeTree, symbols: &[u8], count: usize) -> Result<(Vec<usize>, usize)> {
    let mut leaves = Vec::with_capacity(count);
    let mut node = 0usize;
    let mut used = 0usize;
    while leaves.len() < count {
        let &s = symbols
            .get(used)
            .ok_or(Error::CorruptStream("too few codewords"))?;
        used += 1;
        match tree.step(node, s)? {
            Slot::Node(n) => node = n as usize,
            Slot::Leaf(l) => {
                leaves.push(l as usize);
                node = 0;
            }
            Slot::Empty => unreachable!(),
        }
    }
    Ok((leaves, used))
}

#[derive(Debug, Clone, PartialEq)]
struct Frontier {
    cost: f64,
    path: Vec<u8>,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_cost_path((self.cost, &self.path), (other.cost, &other.path))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Repeatedly splits the cheapest leaf (ties: canonical order) into all `v`
/// children, `splits` times.
fn greedy_paths(c: &CostVector, splits: usize) -> Vec<Vec<u8>> {
    let v = c.len();
    let mut heap = BinaryHeap::with_capacity(splits * (v - 1) + 1);
    heap.push(Reverse(Frontier {
        cost: 0.0,
        path: Vec::new(),
    }));
    for _ in 0..splits {
        let Reverse(leaf) = heap.pop().expect("frontier is never empty");
        for s in 0..v {
            let mut path = Vec::with_capacity(leaf.path.len() + 1);
            path.extend_from_slice(&leaf.path);
            path.push(s as u8);
            heap.push(Reverse(Frontier {
                cost: leaf.cost + c.cost(s),
                path,
            }));
        }
    }
    heap.into_iter().map(|Reverse(f)| f.path).collect()
}

/// Full tree with `leaves` leaves grown by cheapest-leaf splitting. Requires
/// `leaves = 1 + n (v - 1)` for some `n >= 1`.
pub fn exhaustive_varn(leaves: usize, c: &CostVector) -> Result<CodeTree> {
    let v = c.len();
    if leaves < v || !(leaves - 1).is_multiple_of(v - 1) {
        return Err(Error::InvalidArgument(
            "a full tree needs 1 + n(v - 1) leaves with n >= 1",
        ));
    }
    CodeTree::from_paths(c, greedy_paths(c, (leaves - 1) / (v - 1)))
}

/// Tree with exactly `k` leaves of minimum total leaf cost.
///
/// Binary alphabets use cheapest-leaf splitting, which is exact there. Larger
/// alphabets can need trees that no greedy split order produces (a node may
/// be best left with only some of its letters), so they use an exact
/// dynamic program over leaf counts in `O(v k^2)` time.
pub fn varn_build(k: usize, c: &CostVector) -> Result<CodeTree> {
    if k < 2 {
        return Err(Error::InvalidArgument("a Varn tree needs at least two leaves"));
    }
    if c.len() == 2 {
        return CodeTree::from_paths(c, greedy_paths(c, k - 1));
    }
    CodeTree::from_paths(c, optimal_paths(k, c))
}

// best[n] = least total leaf cost of an n-leaf tree, counting each leaf's
// cost from the subtree root. A root using letters of rank 0..=i (the i+1
// cheapest; any other choice costs more) with n_r leaves under rank r costs
// Σ (n_r C_r + best[n_r]). `split[i][n]` is the minimum of that sum over
// the first i+1 ranks sharing n leaves, with each rank getting at least one.
fn optimal_paths(k: usize, c: &CostVector) -> Vec<Vec<u8>> {
    let v = c.len();
    let sorted = c.sorted();
    let mut best = vec![f64::INFINITY; k + 1];
    let mut best_rank = vec![0usize; k + 1];
    let mut split = vec![vec![f64::INFINITY; k + 1]; v];
    let mut take = vec![vec![0usize; k + 1]; v];
    best[1] = 0.0;
    split[0][1] = sorted[0];
    take[0][1] = 1;
    for n in 2..=k {
        for i in 1..v.min(n) {
            let mut m = f64::INFINITY;
            let mut arg = 0;
            // Leave at least one leaf for each lower rank.
            for t in 1..=n - i {
                let x = split[i - 1][n - t] + t as f64 * sorted[i] + best[t];
                if x < m {
                    m = x;
                    arg = t;
                }
            }
            split[i][n] = m;
            take[i][n] = arg;
            if m < best[n] {
                best[n] = m;
                best_rank[n] = i;
            }
        }
        split[0][n] = n as f64 * sorted[0] + best[n];
        take[0][n] = n;
    }

    let order = c.order();
    let mut paths = Vec::with_capacity(k);
    let mut stack = vec![(k, Vec::new())];
    while let Some((n, prefix)) = stack.pop() {
        if n == 1 {
            paths.push(prefix);
            continue;
        }
        let mut left = n;
        for i in (0..=best_rank[n]).rev() {
            let t = take[i][left];
            let mut p = prefix.clone();
            p.push(order[i] as u8);
            stack.push((t, p));
            left -= t;
        }
        debug_assert_eq!(left, 0);
    }
    paths
}

/// The trimming parameters for a `2^k_bits`-leaf modified Varn tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrimPlan {
    /// `(2^k_bits - 1) mod (v - 1)`.
    pub residue: usize,
    /// Leaves removed after growing the full tree.
    pub trimmed: usize,
    /// Leaves of the full tree before trimming.
    pub full_leaves: usize,
}

pub fn trim_plan(k_bits: u32, v: usize) -> TrimPlan {
    let target = 1usize << k_bits;
    let residue = (target - 1) % (v - 1);
    let trimmed = if residue > 0 { v - 1 - residue } else { 0 };
    TrimPlan {
        residue,
        trimmed,
        full_leaves: target + trimmed,
    }
}

/// A `2^k_bits`-leaf tree: the smallest full cheapest-leaf-split tree with at
/// least that many leaves, minus its most expensive leaves (ties: largest
/// path first).
///
/// Every leaf costs at most `log2(M)/mu + max C_i`, with `M` the leaf count
/// before trimming.
pub fn modified_varn_build(k_bits: u32, c: &CostVector) -> Result<CodeTree> {
    if !(1..=MAX_K_BITS).contains(&k_bits) {
        return Err(Error::InvalidArgument("k_bits must be in 1..=20"));
    }
    if c.min() <= 0.0 {
        return Err(Error::ZeroMinCost);
    }
    let plan = trim_plan(k_bits, c.len());
    let full = exhaustive_varn(plan.full_leaves, c)?;
    let keep = full.leaf_count() - plan.trimmed;
    let paths = full.leaves.into_iter().take(keep).map(|l| l.path).collect();
    CodeTree::from_paths(c, paths)
}

/// Per-leaf cost ceiling `log2(M)/mu + max C_i` of a modified Varn tree.
pub fn modified_varn_bound(k_bits: u32, c: &CostVector) -> Result<f64> {
    let mu = solve_mu_capacity(c)?;
    let m = trim_plan(k_bits, c.len()).full_leaves;
    Ok(log2(m as f64) / mu + c.max())
}

/// Lower and upper bounds `log2 k/mu` and `log2 k/mu + max C_i` on the
/// average leaf cost of an optimal `k`-leaf tree.
pub fn average_cost_bounds(k: usize, c: &CostVector) -> Result<(f64, f64)> {
    let mu = solve_mu_capacity(c)?;
    let lo = log2(k as f64) / mu;
    Ok((lo, lo + c.max()))
}

/// Maps source block `i` (lexicographic over `u^q`) to leaf `i`.
pub fn tree_to_codebook(tree: &CodeTree, u: usize, q: usize) -> Result<CodeBook> {
    let expected = checked_pow(u, q).ok_or(Error::InvalidArgument("too many source blocks"))?;
    if expected != tree.leaf_count() {
        return Err(Error::LeafCountMismatch {
            expected,
            found: tree.leaf_count(),
        });
    }
    let entries = tree.leaves.iter().map(|l| l.path.clone()).collect();
    CodeBook::new(u, q, tree.output_alphabet(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(c: &[f64]) -> CostVector {
        CostVector::new(c).unwrap()
    }

    fn paths(t: &CodeTree) -> Vec<Vec<u8>> {
        t.leaves().iter().map(|l| l.path.clone()).collect()
    }

    #[test]
    fn balanced_binary() {
        let t = varn_build(4, &cv(&[1.0, 1.0])).unwrap();
        assert!(t.leaves().iter().all(|l| l.path.len() == 2));
        assert_eq!(t.average_cost(), 2.0);
    }

    #[test]
    fn three_leaves_unequal() {
        let t = varn_build(3, &cv(&[1.0, 2.0])).unwrap();
        assert_eq!(paths(&t), vec![vec![1], vec![0, 0], vec![0, 1]]);
        assert_eq!(t.total_leaf_cost(), 7.0);
        let cb = tree_to_codebook(&t, 3, 1).unwrap();
        assert_eq!(cb.entries(), &[vec![1], vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn greedy_is_beaten_for_ternary() {
        // Splitting the root fully puts a leaf behind the cost-10 letter.
        let t = varn_build(4, &cv(&[1.0, 1.0, 10.0])).unwrap();
        assert_eq!(t.total_leaf_cost(), 8.0);
        let full = CodeTree::from_paths(&cv(&[1.0, 1.0, 10.0]), greedy_paths(&cv(&[1.0, 1.0, 10.0]), 1))
            .unwrap();
        assert_eq!(full.leaf_count(), 3);
    }

    #[test]
    fn dp_matches_greedy_on_full_binary_sizes() {
        let c = cv(&[1.0, 2.3]);
        for k in 2..200 {
            let g = CodeTree::from_paths(&c, greedy_paths(&c, k - 1)).unwrap();
            let d = CodeTree::from_paths(&c, optimal_paths(k, &c)).unwrap();
            assert!((g.total_leaf_cost() - d.total_leaf_cost()).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn english_equivalent_costs() {
        let c = cv(&[0.2167, 3.3378, 4.8983, 7.1585]);
        let t = varn_build(256, &c).unwrap();
        assert_eq!(t.leaf_count(), 256);
        let f = t.average_length() / 4.0;
        assert!((f - 2.768).abs() < 5e-3, "{f}");
        let (lo, hi) = average_cost_bounds(256, &c).unwrap();
        assert!(lo <= t.average_cost() && t.average_cost() <= hi);
    }

    #[test]
    fn trim_arithmetic() {
        assert_eq!(
            trim_plan(8, 4),
            TrimPlan {
                residue: 0,
                trimmed: 0,
                full_leaves: 256
            }
        );
        assert_eq!(
            trim_plan(2, 3),
            TrimPlan {
                residue: 1,
                trimmed: 1,
                full_leaves: 5
            }
        );
        let t = modified_varn_build(2, &cv(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(t.leaf_count(), 4);
    }

    #[test]
    fn modified_bound_binary() {
        let c = cv(&[1.0, 2.0]);
        let t = modified_varn_build(3, &c).unwrap();
        let bound = modified_varn_bound(3, &c).unwrap();
        assert!((bound - 6.32).abs() < 0.01);
        assert_eq!(t.leaf_count(), 8);
        assert!(t.leaves().iter().all(|l| l.cost <= bound));
        assert_eq!(modified_varn_build(3, &cv(&[0.0, 1.0])), Err(Error::ZeroMinCost));
    }

    #[test]
    fn decode_partial_and_errors() {
        let c = cv(&[1.0, 2.0]);
        let t = CodeTree::from_paths(&c, vec![vec![0, 0], vec![0, 1], vec![1]]).unwrap();
        let d = decode_stream(&t, &[0]).unwrap();
        assert!(d.leaves.is_empty());
        assert_eq!(d.residual, vec![0]);
        assert!(matches!(decode_stream(&t, &[2]), Err(Error::InvalidSymbol { .. })));
        let msg = [0usize, 2, 1, 1, 0];
        let s = t.encode(&msg).unwrap();
        let d = decode_stream(&t, &s).unwrap();
        assert_eq!(d.leaves, msg);
        assert!(d.residual.is_empty());

        let (leaves, used) = decode_count(&t, &[1, 0, 1, 1, 1], 2).unwrap();
        assert_eq!((leaves, used), (vec![0, 2], 3));
        assert!(decode_count(&t, &[1, 0], 2).is_err());

        let trimmed = CodeTree::from_paths(&c, vec![vec![0], vec![1, 0]]).unwrap();
        assert_eq!(
            decode_stream(&trimmed, &[1, 1]),
            Err(Error::CorruptStream("path leaves the code tree"))
        );
    }

    #[test]
    fn codebook_mismatch() {
        let t = varn_build(4, &cv(&[1.0, 1.0])).unwrap();
        assert!(tree_to_codebook(&t, 2, 2).is_ok());
        assert_eq!(
            tree_to_codebook(&t, 3, 1),
            Err(Error::LeafCountMismatch {
                expected: 3,
                found: 4
            })
        );
    }
}
