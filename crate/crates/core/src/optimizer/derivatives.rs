//! Closed-form derivatives along the optimal cost/rate curve, parametrized
//! by `mu`.
//!
//! All sums over pairs are evaluated on weights shifted by the minimum cost;
//! every ratio below is invariant under that shift.

use super::Gibbs;
use crate::float::LN_2;
use crate::CostVector;

struct Parts {
    // Σ_i w_i
    sum: f64,
    // Σ_{i<j} w_i w_j (C_i - C_j)^2
    pair: f64,
    // Σ_i mu C_i w_i + sum log2 N
    denom: f64,
    log2_n: f64,
    avg: f64,
}

fn parts(c: &CostVector, mu: f64) -> Parts {
    let g = Gibbs::new(c, mu);
    let costs = c.costs();
    let mut pair = 0.0;
    for i in 0..costs.len() {
        for j in i + 1..costs.len() {
            let d = costs[i] - costs[j];
            pair += g.weights[i] * g.weights[j] * d * d;
        }
    }
    let log2_n = g.log2_normalizer(c, mu);
    let weighted: f64 = g.weights.iter().zip(costs).map(|(w, ci)| w * ci).sum();
    Parts {
        sum: g.sum,
        pair,
        denom: mu * weighted + g.sum * log2_n,
        log2_n,
        avg: weighted / g.sum,
    }
}

/// Expansion factor of the Gibbs distribution at `mu`:
/// `N H(X) / (Σ mu C_i 2^(-mu C_i) + N log2 N)`.
pub fn expansion_at_mu(c: &CostVector, h_source: f64, mu: f64) -> f64 {
    let p = parts(c, mu);
    p.sum * h_source / p.denom
}

/// Total cost `f(mu) * Σ p_i C_i` at `mu`.
pub fn total_cost_at_mu(c: &CostVector, h_source: f64, mu: f64) -> f64 {
    let p = parts(c, mu);
    p.sum * h_source / p.denom * p.avg
}

/// `log2 N` at `mu`. Its sign is opposite to that of `dT/dmu`.
pub fn log2_normalizer(c: &CostVector, mu: f64) -> f64 {
    parts(c, mu).log2_n
}

/// `df/dmu = mu ln2 H(X) Σ_{i<j} 2^(-mu(C_i+C_j)) (C_i-C_j)^2 / D^2`.
pub fn d_expansion_d_mu(c: &CostVector, h_source: f64, mu: f64) -> f64 {
    let p = parts(c, mu);
    mu * LN_2 * h_source * p.pair / (p.denom * p.denom)
}

/// `dT/dmu = -ln2 H(X) log2 N Σ_{i<j} (C_i-C_j)^2 2^(-mu(C_i+C_j)) / D^2`.
pub fn d_total_cost_d_mu(c: &CostVector, h_source: f64, mu: f64) -> f64 {
    let p = parts(c, mu);
    -LN_2 * h_source * p.log2_n * p.pair / (p.denom * p.denom)
}

/// `dT/df = -log2 N / mu` along the optimal curve.
pub fn d_total_cost_d_f(c: &CostVector, mu: f64) -> f64 {
    -parts(c, mu).log2_n / mu
}

/// Derivative in `f` of the minimum normalized I-divergence:
/// `H(X)/f^2 (mu - 1)/mu`.
pub fn d_i_min_d_f(h_source: f64, f: f64, mu: f64) -> f64 {
    h_source / (f * f) * (mu - 1.0) / mu
}

/// Derivative in `mu` of the minimum normalized I-divergence:
/// `(mu - 1) ln2 Σ_{i<j} 2^(-mu(C_i+C_j)) (C_i-C_j)^2 / N^2`.
pub fn d_i_min_d_mu(c: &CostVector, mu: f64) -> f64 {
    let p = parts(c, mu);
    (mu - 1.0) * LN_2 * p.pair / (p.sum * p.sum)
}
