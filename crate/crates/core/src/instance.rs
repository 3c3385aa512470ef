//! Instance model, revenue evaluation and the budget-rounding reduction.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, from_u64, Rational};

/// A consumer who wants both endpoints of the edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    #[serde(with = "rational::serde_string")]
    pub budget: Rational,
}

impl Edge {
    pub fn new(u: usize, v: usize, budget: Rational) -> Self {
        Edge { u, v, budget }
    }
}

/// A GVP instance: `n` vertices (`0..n`) and a list of budgeted consumer
/// edges. Parallel edges are distinct consumers; self-loops are rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    edges: Vec<Edge>,
}

impl Instance {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::InvalidInstance(format!(
                    "edge {i} = ({}, {}) references a vertex outside 0..{n}",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidInstance(format!("edge {i} is a self-loop on {}", e.u)));
            }
            if e.budget.is_negative() {
                return Err(Error::InvalidInstance(format!("edge {i} has negative budget {}", e.budget)));
            }
        }
        Ok(Instance { n, edges })
    }

    /// Convenience constructor from integer budgets.
    pub fn from_int_edges(n: usize, edges: &[(usize, usize, i64)]) -> Result<Self> {
        Self::new(
            n,
            edges
                .iter()
                .map(|&(u, v, b)| Edge::new(u, v, rational::int(b)))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|e| (e.u, e.v))
    }

    /// Degree counting parallel edges with multiplicity.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Incidence lists: for each vertex, the indices of its edges.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.u].push(i);
            inc[e.v].push(i);
        }
        inc
    }

    pub fn max_budget(&self) -> Rational {
        self.edges
            .iter()
            .map(|e| e.budget.clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Same vertex set, keeping only the edges selected by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, &Edge) -> bool) -> Instance {
        Instance {
            n: self.n,
            edges: self
                .edges
                .iter()
                .enumerate()
                .filter(|(i, e)| keep(*i, e))
                .map(|(_, e)| e.clone())
                .collect(),
        }
    }

    /// Budgets as machine integers, checking integrality and `<= cap`.
    pub fn integral_budgets(&self, cap: u64) -> Result<Vec<u64>> {
        integral_budgets(self.edges.iter().map(|e| &e.budget), cap)
    }

    /// Views the instance as a hypergraph whose hyperedges all have size 2.
    pub fn to_hyper(&self) -> HyperInstance {
        HyperInstance {
            n: self.n,
            hyperedges: self
                .edges
                .iter()
                .map(|e| HyperEdge {
                    vertices: vec![e.u, e.v],
                    budget: e.budget.clone(),
                })
                .collect(),
        }
    }
}

pub(crate) fn integral_budgets<'a>(
    budgets: impl Iterator<Item = &'a Rational>,
    cap: u64,
) -> Result<Vec<u64>> {
    budgets
        .enumerate()
        .map(|(index, b)| {
            let value = rational::as_u64(b).ok_or_else(|| Error::NonIntegralBudget {
                index,
                budget: b.to_string(),
            })?;
            if value > cap {
                return Err(Error::BudgetExceedsCap {
                    index,
                    budget: b.to_string(),
                    cap,
                });
            }
            Ok(value)
        })
        .collect()
}

/// A single-minded consumer: buys the whole vertex set or nothing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperEdge {
    pub vertices: Vec<usize>,
    #[serde(with = "rational::serde_string")]
    pub budget: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperInstance {
    n: usize,
    hyperedges: Vec<HyperEdge>,
}

impl HyperInstance {
    /// Vertex sets are sorted and deduplicated on construction.
    pub fn new(n: usize, hyperedges: Vec<HyperEdge>) -> Result<Self> {
        let mut clean = Vec::with_capacity(hyperedges.len());
        for (i, mut h) in hyperedges.into_iter().enumerate() {
            h.vertices.sort_unstable();
            h.vertices.dedup();
            if h.vertices.is_empty() {
                return Err(Error::InvalidInstance(format!("hyperedge {i} is empty")));
            }
            if let Some(&v) = h.vertices.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidInstance(format!(
                    "hyperedge {i} references vertex {v} outside 0..{n}"
                )));
            }
            if h.budget.is_negative() {
                return Err(Error::InvalidInstance(format!("hyperedge {i} has negative budget")));
            }
            clean.push(h);
        }
        Ok(HyperInstance { n, hyperedges: clean })
    }

    pub fn from_int(n: usize, hyperedges: &[(&[usize], i64)]) -> Result<Self> {
        Self::new(
            n,
            hyperedges
                .iter()
                .map(|(s, b)| HyperEdge {
                    vertices: s.to_vec(),
                    budget: rational::int(*b),
                })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hyperedges(&self) -> &[HyperEdge] {
        &self.hyperedges
    }

    pub fn max_budget(&self) -> Rational {
        self.hyperedges
            .iter()
            .map(|e| e.budget.clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn integral_budgets(&self, cap: u64) -> Result<Vec<u64>> {
        integral_budgets(self.hyperedges.iter().map(|e| &e.budget), cap)
    }
}

/// Nonnegative price per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceAssignment(#[serde(with = "rational::serde_string_vec")] pub Vec<Rational>);

impl PriceAssignment {
    pub fn zeros(n: usize) -> Self {
        PriceAssignment(vec![Rational::zero(); n])
    }

    pub fn from_ints(prices: &[u64]) -> Self {
        PriceAssignment(prices.iter().map(|&p| from_u64(p)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.0.len(),
            });
        }
        if let Some((vertex, p)) = self.0.iter().enumerate().find(|(_, p)| p.is_negative()) {
            return Err(Error::NegativePrice {
                vertex,
                price: p.to_string(),
            });
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for PriceAssignment {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

/// A priced instance together with the revenue it earns and the algorithm
/// that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub prices: PriceAssignment,
    #[serde(with = "rational::serde_string")]
    pub revenue: Rational,
    pub algorithm: String,
}

impl Solution {
    /// Evaluates `prices` on `instance` and records the revenue.
    pub fn evaluated(instance: &Instance, prices: PriceAssignment, algorithm: &str) -> Result<Self> {
        let revenue = evaluate_revenue(instance, &prices)?;
        Ok(Solution {
            prices,
            revenue,
            algorithm: algorithm.to_string(),
        })
    }

    pub fn evaluated_smp(hyper: &HyperInstance, prices: PriceAssignment, algorithm: &str) -> Result<Self> {
        let revenue = evaluate_revenue_smp(hyper, &prices)?;
        Ok(Solution {
            prices,
            revenue,
            algorithm: algorithm.to_string(),
        })
    }

    pub fn zero(n: usize, algorithm: &str) -> Self {
        Solution {
            prices: PriceAssignment::zeros(n),
            revenue: Rational::zero(),
            algorithm: algorithm.to_string(),
        }
    }
}

/// Revenue of an edge priced at `sum`: the sum if affordable, else nothing.
pub(crate) fn edge_payment(sum: Rational, budget: &Rational) -> Rational {
    if &sum <= budget {
        sum
    } else {
        Rational::zero()
    }
}

pub fn evaluate_revenue(instance: &Instance, prices: &PriceAssignment) -> Result<Rational> {
    prices.check(instance.n)?;
    Ok(instance
        .edges
        .iter()
        .map(|e| edge_payment(&prices[e.u] + &prices[e.v], &e.budget))
        .sum())
}

pub fn evaluate_revenue_smp(hyper: &HyperInstance, prices: &PriceAssignment) -> Result<Rational> {
    prices.check(hyper.n)?;
    Ok(hyper
        .hyperedges
        .iter()
        .map(|h| {
            let sum: Rational = h.vertices.iter().map(|&v| prices[v].clone()).sum();
            edge_payment(sum, &h.budget)
        })
        .sum())
}

/// Output of [`round_budgets`]: an integral instance whose prices, scaled by
/// `scale`, are feasible prices for the original.
#[derive(Clone, Debug)]
pub struct RoundingResult {
    pub rounded: Instance,
    pub scale: Rational,
    pub price_cap: u64,
    /// Every budget was zero; the instance is returned unchanged with scale 1.
    pub degenerate: bool,
}

/// Scales budgets by `M = epsilon * B_max / m` and floors them.
pub fn round_budgets(instance: &Instance, epsilon: &Rational) -> Result<RoundingResult> {
    if !epsilon.is_positive() || *epsilon > rational::int(1) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let b_max = instance.max_budget();
    if b_max.is_zero() {
        return Ok(RoundingResult {
            rounded: instance.clone(),
            scale: rational::int(1),
            price_cap: 0,
            degenerate: true,
        });
    }
    let m = rational::int(instance.m() as i64);
    let scale = epsilon * b_max / m;
    let mut price_cap = 0u64;
    let edges = instance
        .edges
        .iter()
        .map(|e| {
            let floored = (&e.budget / &scale).floor();
            let value = rational::as_u64(&floored)
                .ok_or_else(|| Error::Internal(format!("rounded budget {floored} overflows")))?;
            price_cap = price_cap.max(value);
            Ok(Edge::new(e.u, e.v, floored))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RoundingResult {
        rounded: Instance { n: instance.n, edges },
        scale,
        price_cap,
        degenerate: false,
    })
}

pub fn lift_prices(rounded: &Solution, scale: &Rational) -> PriceAssignment {
    PriceAssignment(rounded.prices.0.iter().map(|p| p * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn prices(p: &[i64]) -> PriceAssignment {
        PriceAssignment(p.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn revenue_examples() {
        let one = Instance::from_int_edges(2, &[(0, 1, 5)]).unwrap();
        assert_eq!(evaluate_revenue(&one, &prices(&[2, 3])).unwrap(), int(5));
        assert_eq!(evaluate_revenue(&one, &prices(&[3, 3])).unwrap(), int(0));
        let tri = Instance::from_int_edges(3, &[(0, 1, 3), (1, 2, 3), (0, 2, 3)]).unwrap();
        assert_eq!(evaluate_revenue(&tri, &prices(&[1, 2, 1])).unwrap(), int(8));
    }

    #[test]
    fn revenue_errors() {
        let one = Instance::from_int_edges(2, &[(0, 1, 5)]).unwrap();
        assert!(matches!(
            evaluate_revenue(&one, &prices(&[1])),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(
            evaluate_revenue(&one, &prices(&[1, -1])),
            Err(Error::NegativePrice { vertex: 1, .. })
        ));
    }

    #[test]
    fn smp_revenue_examples() {
        let h = HyperInstance::from_int(3, &[(&[0, 1, 2], 6)]).unwrap();
        assert_eq!(evaluate_revenue_smp(&h, &prices(&[1, 2, 3])).unwrap(), int(6));
        assert_eq!(evaluate_revenue_smp(&h, &prices(&[3, 3, 3])).unwrap(), int(0));
        let h = HyperInstance::from_int(3, &[(&[0, 1], 2), (&[0, 1, 2], 2)]).unwrap();
        assert_eq!(evaluate_revenue_smp(&h, &prices(&[1, 1, 0])).unwrap(), int(4));
        assert!(evaluate_revenue_smp(&h, &prices(&[1, 1])).is_err());
    }

    #[test]
    fn rejects_bad_instances() {
        assert!(Instance::from_int_edges(2, &[(0, 0, 1)]).is_err());
        assert!(Instance::from_int_edges(2, &[(0, 2, 1)]).is_err());
        assert!(Instance::from_int_edges(2, &[(0, 1, -1)]).is_err());
        assert!(Instance::from_int_edges(0, &[]).is_ok());
        assert!(HyperInstance::from_int(2, &[(&[], 1)]).is_err());
        assert!(HyperInstance::from_int(2, &[(&[0, 5], 1)]).is_err());
    }

    #[test]
    fn rounding_examples() {
        let inst = Instance::from_int_edges(4, &[(0, 1, 10), (1, 2, 20), (2, 3, 30)]).unwrap();
        let r = round_budgets(&inst, &ratio(1, 2)).unwrap();
        assert_eq!(r.scale, int(5));
        let b: Vec<_> = r.rounded.edges().iter().map(|e| e.budget.clone()).collect();
        assert_eq!(b, vec![int(2), int(4), int(6)]);
        assert_eq!(r.price_cap, 6);

        let one = Instance::from_int_edges(2, &[(0, 1, 1)]).unwrap();
        let r = round_budgets(&one, &int(1)).unwrap();
        assert_eq!((r.scale.clone(), r.price_cap), (int(1), 1));

        let seven = Instance::from_int_edges(2, &[(0, 1, 7)]).unwrap();
        let r = round_budgets(&seven, &ratio(1, 2)).unwrap();
        assert_eq!(r.scale, ratio(7, 2));
        assert_eq!(r.rounded.edges()[0].budget, int(2));
        assert_eq!(r.price_cap, 2);
    }

    #[test]
    fn rounding_degenerate_and_bad_epsilon() {
        let zero = Instance::from_int_edges(2, &[(0, 1, 0)]).unwrap();
        let r = round_budgets(&zero, &ratio(1, 2)).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.scale, int(1));
        assert_eq!(r.rounded, zero);
        assert!(round_budgets(&zero, &int(0)).is_err());
        assert!(round_budgets(&zero, &int(2)).is_err());
    }

    #[test]
    fn lifting_examples() {
        let sol = |p: &[i64]| Solution {
            prices: prices(p),
            revenue: int(0),
            algorithm: String::new(),
        };
        assert_eq!(lift_prices(&sol(&[2, 0]), &int(5)), prices(&[10, 0]));
        assert_eq!(lift_prices(&sol(&[0, 0, 0]), &ratio(7, 3)), prices(&[0, 0, 0]));
        assert_eq!(lift_prices(&sol(&[2, 4, 6]), &int(5)), prices(&[10, 20, 30]));
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        (2usize..6).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n, 0i64..40), 1..8).prop_map(move |raw| {
                let edges = raw
                    .into_iter()
                    .map(|(u, v, b)| if u == v { (u, (v + 1) % n, b) } else { (u, v, b) })
                    .collect::<Vec<_>>();
                Instance::from_int_edges(n, &edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rounding_bounds(inst in arb_instance(), den in 1i64..20) {
            let eps = ratio(1, den);
            let r = round_budgets(&inst, &eps).unwrap();
            if !r.degenerate {
                let m = inst.m() as i64;
                let bound = (int(2 * m) / &eps).ceil();
                prop_assert!(from_u64(r.price_cap) <= bound);
                for (orig, new) in inst.edges().iter().zip(r.rounded.edges()) {
                    prop_assert_eq!((orig.u, orig.v), (new.u, new.v));
                    prop_assert_eq!(&new.budget, &(&orig.budget / &r.scale).floor());
                    prop_assert!(&new.budget * &r.scale <= orig.budget);
                }
            }
        }

        #[test]
        fn lifted_revenue_dominates_scaled(inst in arb_instance(), den in 1i64..6, raw in prop::collection::vec(0u64..8, 6)) {
            let r = round_budgets(&inst, &ratio(1, den)).unwrap();
            let p = PriceAssignment::from_ints(&raw[..inst.n()]);
            let sol = Solution::evaluated(&r.rounded, p, "t").unwrap();
            let lifted = lift_prices(&sol, &r.scale);
            let orig = evaluate_revenue(&inst, &lifted).unwrap();
            prop_assert!(&sol.revenue * &r.scale <= orig);
        }

        #[test]
        fn revenue_monotone_in_budgets(inst in arb_instance(), raw in prop::collection::vec(0u64..20, 6), which in 0usize..8, bump in 1i64..10) {
            let p = PriceAssignment::from_ints(&raw[..inst.n()]);
            let before = evaluate_revenue(&inst, &p).unwrap();
            let idx = which % inst.m();
            let mut edges = inst.edges().to_vec();
            edges[idx].budget += int(bump);
            let raised = Instance::new(inst.n(), edges).unwrap();
            prop_assert!(evaluate_revenue(&raised, &p).unwrap() >= before);
        }
    }
}
