use std::collections::BTreeSet;

use num_traits::Zero;

use super::decomposition::{
    build_decomposition_with, owner_in, validate_decomposition, validate_structure, DecompositionOptions,
    TreeDecomposition,
};
use crate::error::{Error, Result};
use crate::instance::{lift_prices, round_budgets, Edge, HyperInstance, Instance, PriceAssignment, Solution};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug)]
pub struct DpOptions {
    /// Largest number of entries a single bag table may have.
    pub table_limit: usize,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions { table_limit: 1 << 24 }
    }
}

pub fn dp_solve(instance: &Instance, td: &TreeDecomposition, price_cap: u64) -> Result<Solution> {
    dp_solve_with(instance, td, price_cap, DpOptions::default())
}

pub fn dp_solve_with(
    instance: &Instance,
    td: &TreeDecomposition,
    price_cap: u64,
    options: DpOptions,
) -> Result<Solution> {
    let budgets = instance.integral_budgets(price_cap)?;
    validate_decomposition(instance, td).map_err(Error::InvalidDecomposition)?;
    let sets: Vec<Vec<usize>> = instance.pairs().map(|(u, v)| vec![u, v]).collect();
    let prices = solve_on_decomposition(instance.n(), td, &sets, &budgets, price_cap, options)?;
    Solution::evaluated(instance, PriceAssignment::from_ints(&prices), "dp")
}

pub fn dp_solve_smp(hyper: &HyperInstance, td: &TreeDecomposition, price_cap: u64) -> Result<Solution> {
    dp_solve_smp_with(hyper, td, price_cap, DpOptions::default())
}

/// Same DP as [`dp_solve`]; each hyperedge is charged at the nearest-root
/// node whose bag contains it, which exists whenever `td` decomposes the
/// primal graph.
pub fn dp_solve_smp_with(
    hyper: &HyperInstance,
    td: &TreeDecomposition,
    price_cap: u64,
    options: DpOptions,
) -> Result<Solution> {
    let budgets = hyper.integral_budgets(price_cap)?;
    validate_structure(hyper.n(), td).map_err(Error::InvalidDecomposition)?;
    let sets: Vec<Vec<usize>> = hyper.hyperedges().iter().map(|h| h.vertices.clone()).collect();
    let prices = solve_on_decomposition(hyper.n(), td, &sets, &budgets, price_cap, options)?;
    Solution::evaluated_smp(hyper, PriceAssignment::from_ints(&prices), "dp-smp")
}

/// Graph on the hypergraph's vertices with one edge per co-occurring pair,
/// deduplicated, sorted, with zero budgets.
pub fn primal_graph(hyper: &HyperInstance) -> Instance {
    let mut pairs = BTreeSet::new();
    for h in hyper.hyperedges() {
        for (i, &u) in h.vertices.iter().enumerate() {
            for &v in &h.vertices[i + 1..] {
                pairs.insert((u.min(v), u.max(v)));
            }
        }
    }
    Instance::new(
        hyper.n(),
        pairs.into_iter().map(|(u, v)| Edge::new(u, v, Rational::zero())).collect(),
    )
    .expect("primal graph of a valid hypergraph is valid")
}

/// Rounds budgets, solves the rounded instance exactly on a decomposition
/// of width at most `max_width`, and scales the prices back.
pub fn fptas(instance: &Instance, epsilon: &Rational, max_width: usize) -> Result<Solution> {
    fptas_with(instance, epsilon, max_width, DecompositionOptions::default(), DpOptions::default())
}

pub fn fptas_with(
    instance: &Instance,
    epsilon: &Rational,
    max_width: usize,
    decomposition: DecompositionOptions,
    dp: DpOptions,
) -> Result<Solution> {
    let rounding = round_budgets(instance, epsilon)?;
    if rounding.degenerate {
        return Ok(Solution::zero(instance.n(), "fptas"));
    }
    let td = build_decomposition_with(instance.n(), instance.pairs(), max_width, decomposition)?;
    let exact = dp_solve_with(&rounding.rounded, &td, rounding.price_cap, dp)?;
    Solution::evaluated(instance, lift_prices(&exact, &rounding.scale), "fptas")
}

/// Best child table entry for each assignment of the vertices the child
/// shares with its parent.
struct Message {
    best: Vec<u64>,
    argmax: Vec<usize>,
}

struct Node {
    bag: Vec<usize>,
    /// Consumers charged here, as positions inside the bag.
    consumers: Vec<(Vec<usize>, u64)>,
    /// Positions (in this bag) of the vertices shared with the parent.
    shared_with_parent: Vec<usize>,
}

fn table_size(base: u64, len: usize, limit: usize) -> Result<usize> {
    let mut size: usize = 1;
    for _ in 0..len {
        size = size
            .checked_mul(base as usize)
            .filter(|s| *s <= limit)
            .ok_or_else(|| Error::SizeCap(format!("bag table {base}^{len} exceeds {limit} entries")))?;
    }
    Ok(size)
}

/// Exact maximum over `{0..cap}^n` of the revenue earned by `sets`, on a
/// structurally valid decomposition. Returns the optimal price vector.
fn solve_on_decomposition(
    n: usize,
    td: &TreeDecomposition,
    sets: &[Vec<usize>],
    budgets: &[u64],
    cap: u64,
    options: DpOptions,
) -> Result<Vec<u64>> {
    let base = cap + 1;
    let order = td.top_down();
    let children = td.children();
    let mut nodes: Vec<Node> = td
        .bags()
        .iter()
        .enumerate()
        .map(|(t, bag)| Node {
            bag: bag.clone(),
            consumers: Vec::new(),
            shared_with_parent: match td.parents()[t] {
                Some(p) => (0..bag.len())
                    .filter(|&i| td.bags()[p].binary_search(&bag[i]).is_ok())
                    .collect(),
                None => Vec::new(),
            },
        })
        .collect();
    for (i, set) in sets.iter().enumerate() {
        let t = owner_in(&order, td.bags(), set).ok_or(Error::UncoveredConsumer(i))?;
        let positions = set
            .iter()
            .map(|v| nodes[t].bag.binary_search(v).expect("owner holds set"))
            .collect();
        nodes[t].consumers.push((positions, budgets[i]));
    }

    let mut messages: Vec<Option<Message>> = (0..td.len()).map(|_| None).collect();
    let mut root_table = Vec::new();
    for &t in order.iter().rev() {
        let node = &nodes[t];
        let size = table_size(base, node.bag.len(), options.table_limit)?;
        // For every child: positions in this bag of the child's shared
        // vertices, in the child's key order.
        let child_keys: Vec<(usize, Vec<usize>)> = children[t]
            .iter()
            .map(|&c| {
                let positions = nodes[c]
                    .shared_with_parent
                    .iter()
                    .map(|&i| node.bag.binary_search(&nodes[c].bag[i]).expect("shared vertex"))
                    .collect();
                (c, positions)
            })
            .collect();

        let mut table = vec![0u64; size];
        let mut digits = vec![0u64; node.bag.len()];
        for entry in table.iter_mut() {
            let mut value = 0u64;
            for (positions, budget) in &node.consumers {
                let sum: u64 = positions.iter().map(|&i| digits[i]).sum();
                if sum <= *budget {
                    value += sum;
                }
            }
            for (c, positions) in &child_keys {
                let key = encode(positions.iter().map(|&i| digits[i]), base);
                value += messages[*c].as_ref().expect("child first").best[key];
            }
            *entry = value;
            increment(&mut digits, base);
        }

        if td.parents()[t].is_some() {
            let key_size = table_size(base, node.shared_with_parent.len(), usize::MAX)?;
            let mut best = vec![0u64; key_size];
            let mut argmax = vec![usize::MAX; key_size];
            let mut digits = vec![0u64; node.bag.len()];
            for (index, &value) in table.iter().enumerate() {
                let key = encode(node.shared_with_parent.iter().map(|&i| digits[i]), base);
                if argmax[key] == usize::MAX || value > best[key] {
                    best[key] = value;
                    argmax[key] = index;
                }
                increment(&mut digits, base);
            }
            messages[t] = Some(Message { best, argmax });
        } else {
            root_table = table;
        }
    }

    // Top-down traceback.
    let mut prices = vec![0u64; n];
    let mut chosen: Vec<Vec<u64>> = vec![Vec::new(); td.len()];
    for &t in &order {
        let node = &nodes[t];
        let index = match td.parents()[t] {
            None => {
                let mut best = 0;
                for (i, &v) in root_table.iter().enumerate() {
                    if v > root_table[best] {
                        best = i;
                    }
                }
                best
            }
            Some(p) => {
                let key = encode(
                    node.shared_with_parent.iter().map(|&i| {
                        let pos = nodes[p].bag.binary_search(&node.bag[i]).expect("shared vertex");
                        chosen[p][pos]
                    }),
                    base,
                );
                messages[t].as_ref().expect("message").argmax[key]
            }
        };
        chosen[t] = decode(index, base, node.bag.len());
        for (i, &v) in node.bag.iter().enumerate() {
            prices[v] = chosen[t][i];
        }
    }
    Ok(prices)
}

/// Mixed-radix index with the first coordinate least significant.
fn encode(digits: impl Iterator<Item = u64>, base: u64) -> usize {
    let mut key = 0usize;
    let mut stride = 1usize;
    for d in digits {
        key += d as usize * stride;
        stride *= base as usize;
    }
    key
}

fn decode(mut index: usize, base: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = (index % base as usize) as u64;
            index /= base as usize;
            d
        })
        .collect()
}

fn increment(digits: &mut [u64], base: u64) {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return;
        }
        *d = 0;
    }
}
