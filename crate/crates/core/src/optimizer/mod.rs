//! Cost-minimizing symbol distributions and the rate/cost trade-off.
//!
//! Every optimum here has the Gibbs form `p_i = 2^(-mu C_i) / N`. Weights are
//! evaluated relative to the smallest cost so large `mu` neither overflows nor
//! collapses `N` to zero.

use alloc::vec::Vec;

use crate::float::{exp2, log2};
use crate::model::entropy_of;
use crate::root::{bisect_decreasing, expand_upper};
use crate::{CostVector, Error, Pmf, Result};

pub mod derivatives;

/// A solved optimum on the cost/rate trade-off.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapingSolution {
    pub mu: f64,
    /// `N = Σ 2^(-mu C_i)`.
    pub normalizer: f64,
    /// Optimal symbol distribution, in the cost vector's symbol order.
    pub p_hat: Pmf,
    /// Expansion factor `f`.
    pub expansion: f64,
    /// `Σ p_i C_i`, cost per output symbol.
    pub avg_cost: f64,
    /// `f * avg_cost`, cost per source symbol.
    pub total_cost: f64,
    /// Entropy of `p_hat` in bits.
    pub entropy: f64,
}

/// One sample of a total-cost curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub f: f64,
    pub mu: f64,
    pub normalizer: f64,
    pub entropy: f64,
    pub avg_cost: f64,
    pub total_cost: f64,
}

impl From<&ShapingSolution> for CurvePoint {
    fn from(s: &ShapingSolution) -> Self {
        Self {
            f: s.expansion,
            mu: s.mu,
            normalizer: s.normalizer,
            entropy: s.entropy,
            avg_cost: s.avg_cost,
            total_cost: s.total_cost,
        }
    }
}

/// The cost-minimizing operating point over all expansion factors.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalExpansion {
    pub f_opt: f64,
    /// `H(X) / mu`.
    pub t_min: f64,
    pub solution: ShapingSolution,
}

/// Self-information costs for a target distribution and the expansion factor
/// at which an optimal matcher reproduces it exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct DmDesign {
    pub costs: CostVector,
    pub f_opt: f64,
}

/// Gibbs weights `2^(-mu (C_i - C_min))` and their sum.
pub(crate) struct Gibbs {
    pub weights: Vec<f64>,
    pub sum: f64,
}

impl Gibbs {
    pub fn new(c: &CostVector, mu: f64) -> Self {
        let min = c.min();
        let weights: Vec<f64> = c.costs().iter().map(|&ci| exp2(-mu * (ci - min))).collect();
        let sum = weights.iter().sum();
        Self { weights, sum }
    }

    pub fn probs(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.sum).collect()
    }

    /// `log2 N` for the unshifted normalizer.
    pub fn log2_normalizer(&self, c: &CostVector, mu: f64) -> f64 {
        log2(self.sum) - mu * c.min()
    }
}

fn avg_cost(c: &CostVector, p: &[f64]) -> f64 {
    p.iter().zip(c.costs()).map(|(pi, ci)| pi * ci).sum()
}

fn entropy_at(c: &CostVector, mu: f64) -> f64 {
    entropy_of(&Gibbs::new(c, mu).probs())
}

fn avg_cost_at(c: &CostVector, mu: f64) -> f64 {
    avg_cost(c, &Gibbs::new(c, mu).probs())
}

/// Builds the Gibbs solution at a given `mu` with `f = H(X) / H(p)`.
pub fn solution_at_mu(c: &CostVector, h_source: f64, mu: f64) -> ShapingSolution {
    let g = Gibbs::new(c, mu);
    let probs = g.probs();
    let entropy = entropy_of(&probs);
    let avg = avg_cost(c, &probs);
    let expansion = h_source / entropy;
    ShapingSolution {
        mu,
        normalizer: exp2(g.log2_normalizer(c, mu)),
        // Already normalized up to rounding.
        p_hat: Pmf::new(probs).expect("Gibbs weights form a pmf"),
        expansion,
        avg_cost: avg,
        total_cost: expansion * avg,
        entropy,
    }
}

/// Smallest `mu > 0` with `Σ 2^(-mu C_i) = 1`.
pub fn solve_mu_capacity(c: &CostVector) -> Result<f64> {
    let min = c.min();
    if min <= 0.0 {
        return Err(Error::ZeroMinCost);
    }
    let g = |mu: f64| c.costs().iter().map(|&ci| exp2(-mu * ci)).sum::<f64>() - 1.0;
    // Σ 2^(-mu C_i) <= v 2^(-mu C_min), which is 1 at this upper end.
    let hi = log2(c.len() as f64) / min;
    Ok(bisect_decreasing(g, 0.0, hi))
}

/// Minimum average cost at expansion factor `f`: the Gibbs distribution whose
/// entropy equals `h_source / f`.
///
/// The feasible entropies are `(log2 m, log2 v]`, where `m` counts the
/// symbols of minimum cost. With all costs equal, every entropy in
/// `(0, log2 v]` maps to the uniform distribution.
pub fn min_avg_cost(c: &CostVector, h_source: f64, f: f64) -> Result<ShapingSolution> {
    if !(h_source > 0.0 && h_source.is_finite()) {
        return Err(Error::InvalidArgument("source entropy must be positive"));
    }
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::InvalidArgument("expansion factor must be positive"));
    }
    let h = h_source / f;
    let upper = log2(c.len() as f64);
    let lower = if c.is_uniform() {
        0.0
    } else {
        log2(c.min_multiplicity() as f64)
    };
    // Allow rounding slack at the closed end only.
    let slack = 1e-12 * upper.max(1.0);
    if h <= lower || h > upper + slack {
        return Err(Error::InfeasibleRate {
            entropy: h,
            lower,
            upper,
        });
    }
    if c.is_uniform() || h >= upper {
        return Ok(with_expansion(solution_at_mu(c, h_source, 0.0), f));
    }
    let g = |mu: f64| entropy_at(c, mu) - h;
    let scale = 1.0 / (c.max() - c.min());
    let hi = expand_upper(g, scale).ok_or(Error::InfeasibleRate {
        entropy: h,
        lower,
        upper,
    })?;
    let mu = bisect_decreasing(g, 0.0, hi);
    Ok(with_expansion(solution_at_mu(c, h_source, mu), f))
}

// Pins `f` to the requested value rather than the rounded `h / H(p)`.
fn with_expansion(mut s: ShapingSolution, f: f64) -> ShapingSolution {
    s.expansion = f;
    s.total_cost = f * s.avg_cost;
    s
}

/// The expansion factor minimizing total cost, and that minimum.
pub fn optimal_expansion(c: &CostVector, h_source: f64) -> Result<OptimalExpansion> {
    if !(h_source > 0.0 && h_source.is_finite()) {
        return Err(Error::InvalidArgument("source entropy must be positive"));
    }
    let mu = solve_mu_capacity(c)?;
    let solution = solution_at_mu(c, h_source, mu);
    Ok(OptimalExpansion {
        f_opt: solution.expansion,
        t_min: h_source / mu,
        solution,
    })
}

/// Costs `-log2 p_i` under which `p` is the total-cost optimum (`mu = 1`).
pub fn equivalent_cost_vector(p_hat: &Pmf) -> Result<CostVector> {
    self_information_costs(p_hat)
}

fn self_information_costs(p: &Pmf) -> Result<CostVector> {
    if let Some(index) = p.first_zero() {
        return Err(Error::ZeroProbability { index });
    }
    let costs: Vec<f64> = p.probs().iter().map(|&pi| -log2(pi)).collect();
    CostVector::new(&costs)
}

/// `min_avg_cost` evaluated on each expansion factor of `f_grid`.
pub fn total_cost_curve(c: &CostVector, h_source: f64, f_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    f_grid
        .iter()
        .map(|&f| min_avg_cost(c, h_source, f).map(|s| CurvePoint::from(&s)))
        .collect()
}

/// Minimum total cost at a fixed `f`. Unlike [`optimal_expansion`] this is
/// defined when the cheapest symbol is free, where it decreases in `f`
/// without reaching a minimum.
pub fn total_cost_at(c: &CostVector, h_source: f64, f: f64) -> Result<f64> {
    min_avg_cost(c, h_source, f).map(|s| s.total_cost)
}

/// Self-information costs for `target` and the expansion factor
/// `H(X) / H(target)` of an optimal matcher.
pub fn dm_design(target: &Pmf, h_source: f64) -> Result<DmDesign> {
    if !(h_source > 0.0 && h_source.is_finite()) {
        return Err(Error::InvalidArgument("source entropy must be positive"));
    }
    let costs = self_information_costs(target)?;
    let f_opt = h_source / target.entropy();
    Ok(DmDesign { costs, f_opt })
}

/// Smallest normalized I-divergence reachable at expansion factor `f` when
/// matching `target`: `Σ p_i C_i - H(X)/f` with self-information costs.
pub fn i_min_of_f(target: &Pmf, h_source: f64, f: f64) -> Result<f64> {
    let costs = self_information_costs(target)?;
    let s = min_avg_cost(&costs, h_source, f)?;
    Ok((s.avg_cost - h_source / f).max(0.0))
}

/// Smallest `D(p || target)` over distributions `p` whose average
/// self-information cost is at most `budget`, and the minimizing `p`.
pub fn min_kl_under_cost(target: &Pmf, budget: f64) -> Result<(f64, Pmf)> {
    let costs = self_information_costs(target)?;
    let minimum = costs.min();
    if budget <= minimum || !budget.is_finite() {
        return Err(Error::InfeasibleBudget { budget, minimum });
    }
    if budget >= avg_cost(&costs, target.probs()) {
        return Ok((0.0, target.clone()));
    }
    // Average cost falls from H(target) at mu = 1 toward C_min.
    let g = |mu: f64| avg_cost_at(&costs, mu) - budget;
    let hi = expand_upper(g, 2.0).ok_or(Error::InfeasibleBudget { budget, minimum })?;
    let mu = bisect_decreasing(g, 1.0, hi);
    let probs = Gibbs::new(&costs, mu).probs();
    let d = avg_cost(&costs, &probs) - entropy_of(&probs);
    Ok((d.max(0.0), Pmf::new(probs)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::kl_divergence;

    fn cv(c: &[f64]) -> CostVector {
        CostVector::new(c).unwrap()
    }

    fn pmf(p: &[f64]) -> Pmf {
        Pmf::new(p.to_vec()).unwrap()
    }

    #[test]
    fn capacity_mu_examples() {
        assert!((solve_mu_capacity(&cv(&[1.0, 1.0])).unwrap() - 1.0).abs() < 1e-12);
        let golden = -log2((libm::sqrt(5.0) - 1.0) / 2.0);
        assert!((solve_mu_capacity(&cv(&[1.0, 2.0])).unwrap() - golden).abs() < 1e-12);
        let mu = solve_mu_capacity(&cv(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        assert!((mu - 0.9468).abs() < 1e-4, "{mu}");
        let res: f64 = [1.0, 2.0, 3.0, 4.0].iter().map(|c| exp2(-mu * c)).sum::<f64>() - 1.0;
        assert!(res.abs() <= 1e-12);
        assert_eq!(solve_mu_capacity(&cv(&[0.0, 1.0])), Err(Error::ZeroMinCost));
    }

    #[test]
    fn flash_distribution() {
        let s = min_avg_cost(&cv(&[0.0, 0.58, 0.87, 1.29]), 2.0, 2.740).unwrap();
        let want = [0.8606, 0.0989, 0.0335, 0.0070];
        for (got, want) in s.p_hat.probs().iter().zip(want) {
            assert!((got - want).abs() < 5e-4, "{got} vs {want}");
        }
        assert!((s.entropy - 2.0 / 2.740).abs() < 1e-12);
        assert!((s.mu - 5.382).abs() < 0.01, "{}", s.mu);
        for (p, c) in s.p_hat.probs().iter().zip([0.0, 0.58, 0.87, 1.29]) {
            assert!((p - exp2(-s.mu * c) / s.normalizer).abs() < 1e-9);
        }
    }

    #[test]
    fn entropy_ceiling_gives_uniform() {
        let s = min_avg_cost(&cv(&[1.0, 2.0, 5.0]), log2(3.0), 1.0).unwrap();
        assert_eq!(s.mu, 0.0);
        assert!(s.p_hat.probs().iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
        let s = min_avg_cost(&cv(&[1.0, 1.0]), 1.0, 1.0).unwrap();
        assert_eq!(s.p_hat.probs(), &[0.5, 0.5]);
        assert_eq!(s.avg_cost, 1.0);
    }

    #[test]
    fn infeasible_rates() {
        let c = cv(&[1.0, 2.0]);
        assert!(matches!(min_avg_cost(&c, 1.0, 0.5), Err(Error::InfeasibleRate { .. })));
        // Two cheapest symbols: entropy cannot drop to one bit.
        let c = cv(&[1.0, 1.0, 2.0]);
        assert!(matches!(min_avg_cost(&c, 1.0, 1.0), Err(Error::InfeasibleRate { .. })));
        assert!(min_avg_cost(&c, 1.0, 0.99).is_ok());
    }

    #[test]
    fn optimal_expansion_examples() {
        let o = optimal_expansion(&cv(&[1.0, 1.0]), 1.0).unwrap();
        assert!((o.f_opt - 1.0).abs() < 1e-12 && (o.t_min - 1.0).abs() < 1e-12);
        let o = optimal_expansion(&cv(&[0.4222, 2.6647, 3.7860, 5.4099]), 2.0).unwrap();
        assert!((o.f_opt - 1.759).abs() < 1e-3, "{}", o.f_opt);
        assert!((o.t_min - o.f_opt * o.solution.avg_cost).abs() < 1e-9);
    }

    #[test]
    fn equivalent_costs() {
        let c = equivalent_cost_vector(&pmf(&[0.8606, 0.0989, 0.0335, 0.0070])).unwrap();
        for (got, want) in c.costs().iter().zip([0.2167, 3.3378, 4.8983, 7.1585]) {
            assert!((got - want).abs() < 2e-3);
        }
        assert!((solve_mu_capacity(&c).unwrap() - 1.0).abs() < 1e-9);
        let c = equivalent_cost_vector(&pmf(&[2.0 / 3.0, 1.0 / 3.0])).unwrap();
        assert!((c.cost(0) - 0.585).abs() < 1e-3 && (c.cost(1) - 1.585).abs() < 1e-3);
        assert_eq!(equivalent_cost_vector(&Pmf::uniform(8)).unwrap().costs(), &[3.0; 8]);
        assert_eq!(
            equivalent_cost_vector(&pmf(&[1.0, 0.0])),
            Err(Error::ZeroProbability { index: 1 })
        );
    }

    #[test]
    fn curve_endpoint_and_minimum() {
        let c = cv(&[1.0, 2.0, 3.0, 4.0]);
        let pts = total_cost_curve(&c, 2.0, &[1.0]).unwrap();
        assert!((pts[0].total_cost - 2.5).abs() < 1e-12);
        let o = optimal_expansion(&c, 2.0).unwrap();
        let grid: Vec<f64> = (0..400).map(|i| 1.0 + i as f64 * 0.01).collect();
        let pts = total_cost_curve(&c, 2.0, &grid).unwrap();
        let best = pts.iter().min_by(|a, b| a.total_cost.total_cmp(&b.total_cost)).unwrap();
        assert!((best.f - o.f_opt).abs() < 0.011);
        assert!(best.total_cost >= o.t_min - 1e-12);
    }

    #[test]
    fn dm_design_examples() {
        let d = dm_design(&pmf(&[2.0 / 3.0, 1.0 / 3.0]), 1.0).unwrap();
        assert!((d.f_opt - 1.0890).abs() < 1e-4);
        let d = dm_design(&pmf(&[0.5, 0.25, 0.25]), 1.5).unwrap();
        assert_eq!(d.costs.costs(), &[1.0, 2.0, 2.0]);
        assert!((d.f_opt - 1.0).abs() < 1e-15);
        let o = optimal_expansion(&d.costs, 1.5).unwrap();
        assert!((o.solution.mu - 1.0).abs() < 1e-9);
        assert!((o.f_opt - d.f_opt).abs() < 1e-9);
        let d = dm_design(&Pmf::uniform(4), 2.0).unwrap();
        assert_eq!(d.f_opt, 1.0);
    }

    #[test]
    fn i_min_examples() {
        let t = pmf(&[0.7, 0.2, 0.1]);
        let f_opt = dm_design(&t, 1.0).unwrap().f_opt;
        assert!(i_min_of_f(&t, 1.0, f_opt).unwrap().abs() < 1e-9);
        let u = pmf(&[0.5, 0.5]);
        for f in [1.0, 1.5, 3.0] {
            assert!((i_min_of_f(&u, 1.0, f).unwrap() - (1.0 - 1.0 / f)).abs() < 1e-12);
        }
    }

    #[test]
    fn min_kl_examples() {
        let t = pmf(&[2.0 / 3.0, 1.0 / 3.0]);
        let (d, p) = min_kl_under_cost(&t, 1.0).unwrap();
        assert_eq!((d, p), (0.0, t.clone()));
        let (d, p) = min_kl_under_cost(&pmf(&[0.5, 0.5]), 1.5).unwrap();
        assert_eq!((d, p.probs()), (0.0, &[0.5, 0.5][..]));

        let (d, p) = min_kl_under_cost(&t, 0.9).unwrap();
        let costs = [-log2(2.0 / 3.0), -log2(1.0 / 3.0)];
        let avg: f64 = p.probs().iter().zip(costs).map(|(a, b)| a * b).sum();
        assert!((avg - 0.9).abs() < 1e-12);
        assert!((d - kl_divergence(&p, &t).unwrap()).abs() < 1e-12);
        // Same value through the rate view at the implied expansion factor.
        let f = 1.0 / p.entropy();
        assert!((i_min_of_f(&t, 1.0, f).unwrap() - d).abs() < 1e-9);
        assert!(matches!(min_kl_under_cost(&t, 0.5), Err(Error::InfeasibleBudget { .. })));
    }
}
