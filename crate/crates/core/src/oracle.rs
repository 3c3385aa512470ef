//! Exhaustive ground-truth solvers.
//!
//! [`brute_force_opt`] enumerates every integral price vector in
//! lexicographic order and keeps the first maximum, so its output is the
//! lexicographically smallest optimal vector. A vertex never benefits from a
//! price above its largest incident budget (all its consumers would refuse),
//! and lowering such a price to zero yields a lexicographically smaller vector
//! with at least the same revenue, so the enumeration skips those prices.
//!
//! [`fractional_opt`] is the real-valued optimum: it enumerates which edges
//! pay and solves the pricing LP restricted to them.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::{HyperInstance, Instance, PriceAssignment, Solution};
use crate::lp::{self, LpStatus};
use crate::rational::Rational;

pub const DEFAULT_ENUMERATION_LIMIT: u128 = 100_000_000;

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    /// Maximum number of price vectors the enumeration may evaluate.
    pub limit: u128,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

pub fn brute_force_opt(instance: &Instance, price_cap: u64) -> Result<Solution> {
    brute_force_opt_with(instance, price_cap, OracleOptions::default())
}

pub fn brute_force_opt_with(instance: &Instance, price_cap: u64, options: OracleOptions) -> Result<Solution> {
    let budgets = instance.integral_budgets(price_cap)?;
    let consumers: Vec<(Vec<usize>, u64)> = instance
        .edges()
        .iter()
        .zip(budgets)
        .map(|(e, b)| (vec![e.u, e.v], b))
        .collect();
    let (_, prices) = enumerate(instance.n(), &consumers, price_cap, options.limit)?;
    Solution::evaluated(instance, PriceAssignment::from_ints(&prices), "oracle")
}

pub fn brute_force_opt_smp(hyper: &HyperInstance, price_cap: u64) -> Result<Solution> {
    brute_force_opt_smp_with(hyper, price_cap, OracleOptions::default())
}

pub fn brute_force_opt_smp_with(
    hyper: &HyperInstance,
    price_cap: u64,
    options: OracleOptions,
) -> Result<Solution> {
    let budgets = hyper.integral_budgets(price_cap)?;
    let consumers: Vec<(Vec<usize>, u64)> = hyper
        .hyperedges()
        .iter()
        .zip(budgets)
        .map(|(h, b)| (h.vertices.clone(), b))
        .collect();
    let (_, prices) = enumerate(hyper.n(), &consumers, price_cap, options.limit)?;
    Solution::evaluated_smp(hyper, PriceAssignment::from_ints(&prices), "oracle")
}

fn enumerate(n: usize, consumers: &[(Vec<usize>, u64)], cap: u64, limit: u128) -> Result<(u64, Vec<u64>)> {
    let mut top = vec![0u64; n];
    let mut touched = vec![false; n];
    for (set, budget) in consumers {
        for &v in set {
            top[v] = top[v].max((*budget).min(cap));
            touched[v] = true;
        }
    }
    let states = top
        .iter()
        .try_fold(1u128, |acc, &t| acc.checked_mul(t as u128 + 1))
        .unwrap_or(u128::MAX);
    if states > limit {
        return Err(Error::EnumerationLimit { states, limit });
    }

    let mut prices = vec![0u64; n];
    let mut best_value = revenue_of(consumers, &prices);
    let mut best = prices.clone();
    // Odometer with vertex n-1 as the least significant digit yields
    // lexicographic order; ties keep the earlier vector.
    loop {
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok((best_value, best));
            }
            pos -= 1;
            if prices[pos] < top[pos] {
                prices[pos] += 1;
                break;
            }
            prices[pos] = 0;
        }
        let value = revenue_of(consumers, &prices);
        if value > best_value {
            best_value = value;
            best.copy_from_slice(&prices);
        }
    }
}

fn revenue_of(consumers: &[(Vec<usize>, u64)], prices: &[u64]) -> u64 {
    consumers
        .iter()
        .map(|(set, budget)| {
            let sum: u64 = set.iter().map(|&v| prices[v]).sum();
            if sum <= *budget {
                sum
            } else {
                0
            }
        })
        .sum()
}

/// Largest number of edges [`fractional_opt`] will enumerate subsets of.
pub const FRACTIONAL_EDGE_LIMIT: usize = 20;

/// Real-valued optimum: the best LP over every choice of paying edge set.
///
/// For the optimal prices the set of paying edges `S` makes the restricted
/// LP at least the optimum; conversely every restricted LP solution is a
/// price vector whose revenue is at least its LP value.
pub fn fractional_opt(instance: &Instance) -> Result<Solution> {
    let m = instance.m();
    if m > FRACTIONAL_EDGE_LIMIT {
        return Err(Error::EnumerationLimit {
            states: 1u128 << m,
            limit: 1u128 << FRACTIONAL_EDGE_LIMIT,
        });
    }
    let mut best_value = Rational::zero();
    let mut best = PriceAssignment::zeros(instance.n());
    for mask in 1u64..(1u64 << m) {
        let sub = instance.filter_edges(|i, _| mask >> i & 1 == 1);
        let sol = lp::lp_opt(&sub);
        if sol.status != LpStatus::Optimal {
            return Err(Error::Internal(format!("pricing LP not optimal: {:?}", sol.status)));
        }
        if sol.value > best_value {
            best_value = sol.value;
            best = PriceAssignment(sol.assignment);
        }
    }
    let solution = Solution::evaluated(instance, best, "fractional-oracle")?;
    if solution.revenue != best_value {
        return Err(Error::Internal("fractional oracle prices do not realize the LP value".into()));
    }
    Ok(solution)
}
