//! Run configuration: a JSON file whose values are overridden by flags.

use std::path::Path;

use serde::{Deserialize, Serialize};
use shapecode_core::{CostVector, Pmf};

use crate::{CliError, Result};

/// Every input a command may need. Absent fields are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub costs: Option<Vec<f64>>,
    pub target: Option<Vec<f64>>,
    pub source_pmf: Option<Vec<f64>>,
    pub h_source: Option<f64>,
    pub q: Option<usize>,
    pub f: Option<f64>,
    pub f_target: Option<f64>,
    pub optimal: Option<bool>,
    pub k_bits: Option<u32>,
    #[serde(rename = "K")]
    pub k: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub grid: Option<String>,
    pub messages: Option<usize>,
    pub input: Option<String>,
    pub output: Option<String>,
    pub tree: Option<String>,
    pub codebook: Option<String>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field),)* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Values from `flags` win over values in `self`.
    pub fn overlay(self, flags: RunConfig) -> RunConfig {
        overlay!(
            self, flags, costs, target, source_pmf, h_source, q, f, f_target, optimal, k_bits,
            k, seed, grid, messages, input, output, tree, codebook
        )
    }

    pub fn cost_vector(&self) -> Result<CostVector> {
        let c = self
            .costs
            .as_ref()
            .ok_or_else(|| CliError::usage("--costs is required"))?;
        Ok(CostVector::new(c)?)
    }

    pub fn target_pmf(&self) -> Result<Pmf> {
        let t = self
            .target
            .as_ref()
            .ok_or_else(|| CliError::usage("--target is required"))?;
        Ok(Pmf::new(t.clone())?)
    }

    pub fn source(&self) -> Result<Option<Pmf>> {
        self.source_pmf
            .as_ref()
            .map(|p| Pmf::new(p.clone()).map_err(CliError::from))
            .transpose()
    }

    /// Source entropy: `--hsource`, else the entropy of `--source-pmf`.
    pub fn source_entropy(&self) -> Result<f64> {
        if let Some(h) = self.h_source {
            return Ok(h);
        }
        match self.source()? {
            Some(p) => Ok(p.entropy()),
            None => Err(CliError::usage("--hsource or --source-pmf is required")),
        }
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| CliError::usage("--seed is required for randomized runs"))
    }

    pub fn f_grid(&self) -> Result<Vec<f64>> {
        parse_grid(
            self.grid
                .as_deref()
                .ok_or_else(|| CliError::usage("--grid a:b:n is required"))?,
        )
    }
}

/// `a:b:n` is `n` evenly spaced points from `a` to `b` inclusive.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || CliError::usage(format!("bad grid {spec:?}, expected a:b:n"));
    let mut it = spec.split(':');
    let (Some(a), Some(b), Some(n), None) = (it.next(), it.next(), it.next(), it.next()) else {
        return Err(bad());
    };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}
