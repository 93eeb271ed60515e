//! JSON shapes for trees, code books and reports.

use std::hash::Hasher;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};
use shapecode_core::metrics::MetricsReport;
use shapecode_core::optimizer::{OptimalExpansion, ShapingSolution};
use shapecode_core::pipeline::PipelineReport;
use shapecode_core::varn::CodeTree;
use shapecode_core::{CodeBook, CostVector};

use crate::Result;

/// Canonical tree form: costs in symbol order and leaf paths sorted
/// lexicographically. Serialized compactly, it is the input of the tree
/// hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeJson {
    pub v: usize,
    pub costs: Vec<f64>,
    pub leaves: Vec<Vec<u8>>,
}

impl TreeJson {
    pub fn from_tree(t: &CodeTree) -> Self {
        let mut leaves: Vec<Vec<u8>> = t.leaves().iter().map(|l| l.path.clone()).collect();
        leaves.sort();
        Self {
            v: t.output_alphabet(),
            costs: t.costs().costs().to_vec(),
            leaves,
        }
    }

    pub fn to_tree(&self) -> Result<CodeTree> {
        let costs = CostVector::new(&self.costs)?;
        if costs.len() != self.v {
            return Err(crate::CliError::usage("tree file: v does not match the cost vector"));
        }
        Ok(CodeTree::from_paths(&costs, self.leaves.clone())?)
    }

    pub fn canonical_string(&self) -> String {
        serde_json::to_string(self).expect("tree serializes")
    }
}

/// 64-bit FNV-1a over the canonical JSON text of `t`.
pub fn tree_hash(t: &CodeTree) -> u64 {
    let mut h = FnvHasher::default();
    h.write(TreeJson::from_tree(t).canonical_string().as_bytes());
    h.finish()
}

/// Code book file: block `i` (lexicographic over `source_alphabet^block_len`)
/// maps to `entries[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeBookJson {
    pub source_alphabet: usize,
    pub block_len: usize,
    pub output_alphabet: usize,
    pub entries: Vec<Vec<u8>>,
}

impl CodeBookJson {
    pub fn to_codebook(&self) -> Result<CodeBook> {
        Ok(CodeBook::new(
            self.source_alphabet,
            self.block_len,
            self.output_alphabet,
            self.entries.clone(),
        )?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionJson {
    pub mu: f64,
    #[serde(rename = "N")]
    pub normalizer: f64,
    pub p_hat: Vec<f64>,
    pub f: f64,
    pub avg_cost: f64,
    pub total_cost: f64,
    pub entropy_h: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
}

impl From<&ShapingSolution> for SolutionJson {
    fn from(s: &ShapingSolution) -> Self {
        Self {
            mu: s.mu,
            normalizer: s.normalizer,
            p_hat: s.p_hat.probs().to_vec(),
            f: s.expansion,
            avg_cost: s.avg_cost,
            total_cost: s.total_cost,
            entropy_h: s.entropy,
            t_min: None,
        }
    }
}

impl From<&OptimalExpansion> for SolutionJson {
    fn from(o: &OptimalExpansion) -> Self {
        Self {
            t_min: Some(o.t_min),
            ..Self::from(&o.solution)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsJson {
    pub p_hat: Vec<f64>,
    pub f: f64,
    pub avg_cost: f64,
    pub total_cost: f64,
    pub gef: f64,
    pub i_div: f64,
    pub norm_i_div: f64,
    pub kl_gap: f64,
    pub serial_kl: Vec<f64>,
}

impl From<&MetricsReport> for MetricsJson {
    fn from(m: &MetricsReport) -> Self {
        Self {
            p_hat: m.p_hat.probs().to_vec(),
            f: m.f,
            avg_cost: m.avg_cost,
            total_cost: m.total_cost,
            gef: m.gef,
            i_div: m.i_div,
            norm_i_div: m.norm_i_div,
            kl_gap: m.kl_gap,
            serial_kl: m.serial_kl.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineJson {
    pub input_bytes: usize,
    pub compressed_bits: usize,
    pub g: f64,
    pub f_back_target: f64,
    pub clamped: bool,
    pub f_back: f64,
    pub f_overall: f64,
    pub output_symbols: usize,
    pub avg_cost: f64,
    pub analytic_avg_cost: f64,
    pub tree_avg_cost: f64,
    pub total_cost: f64,
    pub target_p_hat: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub p_hat_divergence: f64,
    pub lossless: bool,
}

impl From<&PipelineReport> for PipelineJson {
    fn from(r: &PipelineReport) -> Self {
        Self {
            input_bytes: r.input_bytes,
            compressed_bits: r.compressed_bits,
            g: r.compression_ratio,
            f_back_target: r.back_end_expansion,
            clamped: r.clamped,
            f_back: r.achieved_back_end_expansion,
            f_overall: r.overall_expansion,
            output_symbols: r.output_symbols,
            avg_cost: r.avg_cost,
            analytic_avg_cost: r.analytic_avg_cost,
            tree_avg_cost: r.tree_avg_cost,
            total_cost: r.total_cost,
            target_p_hat: r.target_p_hat.probs().to_vec(),
            p_hat: r.empirical_p_hat.probs().to_vec(),
            p_hat_divergence: r.p_hat_divergence,
            lossless: r.lossless,
        }
    }
}

/// Summary printed by `build`.
#[derive(Debug, Clone, Serialize)]
pub struct TreeSummary {
    pub leaves: usize,
    pub avg_cost: f64,
    pub avg_length: f64,
    pub max_leaf_cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_bounds: Option<[f64; 2]>,
    pub hash: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use shapecode_core::varn::varn_build;

    #[test]
    fn canonical_form_is_stable() {
        let c = CostVector::new(&[1.0, 2.0]).unwrap();
        let t = varn_build(3, &c).unwrap();
        let j = TreeJson::from_tree(&t);
        assert_eq!(j.canonical_string(), r#"{"v":2,"costs":[1.0,2.0],"leaves":[[0,0],[0,1],[1]]}"#);
        let back = j.to_tree().unwrap();
        assert_eq!(back, t);
        assert_eq!(tree_hash(&back), tree_hash(&t));
        let other = varn_build(4, &c).unwrap();
        assert_ne!(tree_hash(&other), tree_hash(&t));
    }
}
