//! Exact solvers for graphs of maximum degree two and the Euler-tour split
//! 2-approximation for maximum degree four.
//!
//! Prices here are real-valued: the path recursion takes, for every
//! subpath, the better of "every edge pays" (the pricing LP) and "some edge
//! is written off" (split at that edge and recurse on both sides).

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::{Instance, PriceAssignment, Solution};
use crate::lp::{self, LpStatus};
use crate::rational::Rational;

/// A walk through a component: `vertices[i]` and `vertices[i + 1]` are the
/// ends of `edges[i]`; for a cycle the last edge returns to `vertices[0]`.
#[derive(Clone, Debug)]
struct Walk {
    vertices: Vec<usize>,
    edges: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Priced {
    value: Rational,
    prices: Vec<(usize, Rational)>,
}

/// Memoizes the all-edges-pay LP by the sorted list of edge ids.
struct LpCache<'a> {
    instance: &'a Instance,
    memo: HashMap<Vec<usize>, Priced>,
}

impl<'a> LpCache<'a> {
    fn new(instance: &'a Instance) -> Self {
        LpCache { instance, memo: HashMap::new() }
    }

    fn solve(&mut self, edge_ids: &[usize]) -> Result<Priced> {
        let mut key = edge_ids.to_vec();
        key.sort_unstable();
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let mut local: Vec<usize> = key
            .iter()
            .flat_map(|&e| [self.instance.edges()[e].u, self.instance.edges()[e].v])
            .collect();
        local.sort_unstable();
        local.dedup();
        let index = |v: usize| local.binary_search(&v).expect("endpoint listed");
        let sub = Instance::new(
            local.len(),
            key.iter()
                .map(|&e| {
                    let edge = &self.instance.edges()[e];
                    crate::Edge::new(index(edge.u), index(edge.v), edge.budget.clone())
                })
                .collect(),
        )?;
        let sol = lp::lp_opt(&sub);
        if sol.status != LpStatus::Optimal {
            return Err(Error::LpNotOptimal(format!("{:?} on edges {key:?}", sol.status)));
        }
        let priced = Priced {
            value: sol.value,
            prices: local.into_iter().zip(sol.assignment).collect(),
        };
        self.memo.insert(key, priced.clone());
        Ok(priced)
    }
}

/// Optimal revenue of the subpath made of `walk.edges[i..j]`.
fn path_recursion(walk: &Walk, cache: &mut LpCache) -> Result<Priced> {
    let len = walk.edges.len();
    // best[i][j] for 0 <= i <= j <= len.
    let mut best: Vec<Vec<Option<Priced>>> = vec![vec![None; len + 1]; len + 1];
    for (i, row) in best.iter_mut().enumerate() {
        row[i] = Some(Priced { value: Rational::zero(), prices: Vec::new() });
    }
    for span in 1..=len {
        for i in 0..=len - span {
            let j = i + span;
            let mut winner = cache.solve(&walk.edges[i..j])?;
            for k in i..j {
                let left = best[i][k].as_ref().expect("shorter span");
                let right = best[k + 1][j].as_ref().expect("shorter span");
                let value = &left.value + &right.value;
                if value > winner.value {
                    let mut prices = left.prices.clone();
                    prices.extend(right.prices.iter().cloned());
                    winner = Priced { value, prices };
                }
            }
            best[i][j] = Some(winner);
        }
    }
    Ok(best[0][len].take().expect("full span"))
}

fn cycle_recursion(walk: &Walk, cache: &mut LpCache) -> Result<Priced> {
    let len = walk.edges.len();
    let mut winner = cache.solve(&walk.edges)?;
    for drop in 0..len {
        let rotated = Walk {
            vertices: (1..=len).map(|s| walk.vertices[(drop + s) % len]).collect(),
            edges: (1..len).map(|s| walk.edges[(drop + s) % len]).collect(),
        };
        let candidate = path_recursion(&rotated, cache)?;
        if candidate.value > winner.value {
            winner = candidate;
        }
    }
    Ok(winner)
}

enum Shape {
    Isolated,
    Path(Walk),
    Cycle(Walk),
}

/// Splits a graph of maximum degree two into its components, each given as
/// a walk. Paths start at their smaller end, cycles at their smallest
/// vertex.
fn components(instance: &Instance) -> Result<Vec<Shape>> {
    let degrees = instance.degrees();
    if let Some(v) = degrees.iter().position(|&d| d > 2) {
        return Err(Error::DegreeTooHigh { vertex: v, degree: degrees[v], max: 2 });
    }
    let incidence = instance.incidence();
    let other = |e: usize, v: usize| {
        let edge = &instance.edges()[e];
        if edge.u == v {
            edge.v
        } else {
            edge.u
        }
    };
    let mut seen = vec![false; instance.n()];
    let walk_from = |start: usize, seen: &mut Vec<bool>| {
        let mut walk = Walk { vertices: vec![start], edges: Vec::new() };
        seen[start] = true;
        let mut current = start;
        loop {
            let last = walk.edges.last().copied();
            let Some(&e) = incidence[current].iter().find(|&&e| Some(e) != last) else { break };
            if walk.edges.contains(&e) {
                break;
            }
            let next = other(e, current);
            walk.edges.push(e);
            if next == start {
                break;
            }
            walk.vertices.push(next);
            seen[next] = true;
            current = next;
        }
        walk
    };
    let mut shapes = Vec::new();
    for v in 0..instance.n() {
        if !seen[v] && degrees[v] <= 1 {
            if degrees[v] == 0 {
                seen[v] = true;
                shapes.push(Shape::Isolated);
            } else {
                shapes.push(Shape::Path(walk_from(v, &mut seen)));
            }
        }
    }
    for v in 0..instance.n() {
        if !seen[v] {
            shapes.push(Shape::Cycle(walk_from(v, &mut seen)));
        }
    }
    Ok(shapes)
}

fn assemble(instance: &Instance, parts: Vec<Priced>, algorithm: &str) -> Result<Solution> {
    let mut prices = vec![Rational::zero(); instance.n()];
    let mut total = Rational::zero();
    for part in parts {
        total += part.value;
        for (v, p) in part.prices {
            prices[v] = p;
        }
    }
    let sol = Solution::evaluated(instance, PriceAssignment(prices), algorithm)?;
    if sol.revenue < total {
        return Err(Error::Internal(format!(
            "{algorithm}: assembled prices earn {} below the recursion value {total}",
            sol.revenue
        )));
    }
    Ok(sol)
}

/// Exact optimum of a single path (a connected graph with `m = n - 1` and
/// maximum degree two).
pub fn solve_path(instance: &Instance) -> Result<Solution> {
    let shapes = components(instance)?;
    let walk = match shapes.as_slice() {
        [Shape::Path(w)] => w.clone(),
        [Shape::Isolated] => return Ok(Solution::zero(instance.n(), "path")),
        _ => return Err(Error::WrongShape { expected: "a single path" }),
    };
    let mut cache = LpCache::new(instance);
    let priced = path_recursion(&walk, &mut cache)?;
    assemble(instance, vec![priced], "path")
}

/// Exact optimum of a single cycle (connected, every degree two). Two
/// parallel edges count as a cycle of length two.
pub fn solve_cycle(instance: &Instance) -> Result<Solution> {
    let shapes = components(instance)?;
    let [Shape::Cycle(walk)] = shapes.as_slice() else {
        return Err(Error::WrongShape { expected: "a single cycle" });
    };
    let mut cache = LpCache::new(instance);
    let priced = cycle_recursion(walk, &mut cache)?;
    assemble(instance, vec![priced], "cycle")
}

/// Exact optimum when every vertex has degree at most two.
pub fn solve_degree2(instance: &Instance) -> Result<Solution> {
    let shapes = components(instance)?;
    let mut cache = LpCache::new(instance);
    let mut parts = Vec::new();
    for shape in shapes {
        match shape {
            Shape::Isolated => {}
            Shape::Path(w) => parts.push(path_recursion(&w, &mut cache)?),
            Shape::Cycle(w) => parts.push(cycle_recursion(&w, &mut cache)?),
        }
    }
    assemble(instance, parts, "degree2")
}

/// Edge ids of the two halves of the Euler-tour split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Degree4Split {
    pub e1: Vec<usize>,
    pub e2: Vec<usize>,
}

/// Pairs odd-degree vertices in ascending order with virtual edges, walks an
/// Euler circuit of every component and colors the tour edges alternately.
/// Each color class of real edges has maximum degree two. A graph that
/// already has maximum degree two is returned whole as `e1`.
pub fn split_degree4(instance: &Instance) -> Result<Degree4Split> {
    let degrees = instance.degrees();
    if let Some(v) = degrees.iter().position(|&d| d > 4) {
        return Err(Error::DegreeTooHigh { vertex: v, degree: degrees[v], max: 4 });
    }
    let n = instance.n();
    let m = instance.m();
    if degrees.iter().all(|&d| d <= 2) {
        return Ok(Degree4Split { e1: (0..m).collect(), e2: Vec::new() });
    }
    let mut ends: Vec<(usize, usize)> = instance.pairs().collect();
    let odd: Vec<usize> = (0..n).filter(|&v| degrees[v] % 2 == 1).collect();
    for pair in odd.chunks(2) {
        ends.push((pair[0], pair[1]));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(u, v)) in ends.iter().enumerate() {
        adj[u].push(e);
        adj[v].push(e);
    }
    let mut used = vec![false; ends.len()];
    let mut next_slot = vec![0usize; n];
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();

    // Visit components in vertex order; start at a degree-two vertex if the
    // component has one, so that an odd tour closes on a vertex with no
    // other passes.
    let mut done = vec![false; n];
    for v in 0..n {
        if done[v] || adj[v].is_empty() {
            continue;
        }
        let mut component = vec![v];
        done[v] = true;
        let mut i = 0;
        while i < component.len() {
            let u = component[i];
            i += 1;
            for &e in &adj[u] {
                let w = if ends[e].0 == u { ends[e].1 } else { ends[e].0 };
                if !done[w] {
                    done[w] = true;
                    component.push(w);
                }
            }
        }
        let start = component
            .iter()
            .copied()
            .filter(|&u| adj[u].len() == 2)
            .min()
            .unwrap_or_else(|| *component.iter().min().expect("nonempty"));

        // Hierholzer: the circuit is the reverse of the pop order of edges.
        let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
        let mut circuit = Vec::new();
        while let Some(&(u, via)) = stack.last() {
            while next_slot[u] < adj[u].len() && used[adj[u][next_slot[u]]] {
                next_slot[u] += 1;
            }
            if next_slot[u] == adj[u].len() {
                stack.pop();
                if let Some(e) = via {
                    circuit.push(e);
                }
            } else {
                let e = adj[u][next_slot[u]];
                used[e] = true;
                let w = if ends[e].0 == u { ends[e].1 } else { ends[e].0 };
                stack.push((w, Some(e)));
            }
        }
        circuit.reverse();
        for (pos, e) in circuit.into_iter().enumerate() {
            if e < m {
                if pos % 2 == 0 {
                    e1.push(e);
                } else {
                    e2.push(e);
                }
            }
        }
    }
    e1.sort_unstable();
    e2.sort_unstable();
    Ok(Degree4Split { e1, e2 })
}

/// Solves both halves of [`split_degree4`] exactly and keeps the better
/// price vector, measured on the whole instance.
pub fn solve_degree4(instance: &Instance) -> Result<Solution> {
    let split = split_degree4(instance)?;
    let mut best: Option<Solution> = None;
    for half in [&split.e1, &split.e2] {
        let sub = instance.filter_edges(|i, _| half.binary_search(&i).is_ok());
        let sol = solve_degree2(&sub)?;
        let candidate = Solution::evaluated(instance, sol.prices, "degree4")?;
        if best.as_ref().is_none_or(|b| candidate.revenue > b.revenue) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("two halves"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::oracle::{brute_force_opt, fractional_opt};
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn path(b: &[i64]) -> Instance {
        generators::path(&b.iter().map(|&x| int(x)).collect::<Vec<_>>())
    }

    fn cycle(b: &[i64]) -> Instance {
        generators::cycle(&b.iter().map(|&x| int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn path_examples() {
        assert_eq!(solve_path(&path(&[1, 1])).unwrap().revenue, int(2));
        assert_eq!(solve_path(&path(&[3, 1, 3])).unwrap().revenue, int(7));
        assert_eq!(solve_path(&path(&[5])).unwrap().revenue, int(5));
        assert_eq!(solve_path(&path(&[])).unwrap().revenue, int(0));
        assert!(matches!(solve_path(&cycle(&[1, 1, 1])), Err(Error::WrongShape { .. })));
        let two = Instance::from_int_edges(4, &[(0, 1, 1), (2, 3, 1)]).unwrap();
        assert!(matches!(solve_path(&two), Err(Error::WrongShape { .. })));
    }

    #[test]
    fn cycle_examples() {
        let tri = solve_cycle(&cycle(&[1, 1, 1])).unwrap();
        assert_eq!(tri.revenue, int(3));
        assert_eq!(tri.prices.as_slice(), &[ratio(1, 2), ratio(1, 2), ratio(1, 2)]);
        let square = cycle(&[1, 1, 1, 1]);
        assert_eq!(solve_cycle(&square).unwrap().revenue, int(4));
        assert_eq!(brute_force_opt(&square, 1).unwrap().revenue, int(4));
        let skew = cycle(&[2, 1, 1]);
        assert_eq!(solve_cycle(&skew).unwrap().revenue, fractional_opt(&skew).unwrap().revenue);
        assert!(solve_cycle(&skew).unwrap().revenue >= brute_force_opt(&skew, 2).unwrap().revenue);
        assert!(matches!(solve_cycle(&path(&[1, 1])), Err(Error::WrongShape { .. })));
        let parallel = Instance::from_int_edges(2, &[(0, 1, 2), (0, 1, 3)]).unwrap();
        assert_eq!(solve_cycle(&parallel).unwrap().revenue, int(4));
    }

    #[test]
    fn degree2_examples() {
        let union = Instance::from_int_edges(7, &[(0, 1, 3), (1, 2, 1), (2, 3, 3), (4, 5, 1), (5, 6, 1), (6, 4, 1)])
            .unwrap();
        assert_eq!(solve_degree2(&union).unwrap().revenue, int(10));
        assert_eq!(solve_degree2(&Instance::from_int_edges(4, &[]).unwrap()).unwrap().revenue, int(0));
        assert_eq!(solve_degree2(&union).unwrap().revenue, fractional_opt(&union).unwrap().revenue);
        assert!(matches!(
            solve_degree2(&generators::star(&[int(1), int(1), int(1)])),
            Err(Error::DegreeTooHigh { vertex: 0, degree: 3, max: 2 })
        ));
    }

    fn assert_split(instance: &Instance) -> Degree4Split {
        let split = split_degree4(instance).unwrap();
        let mut all: Vec<usize> = split.e1.iter().chain(&split.e2).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..instance.m()).collect::<Vec<_>>());
        for half in [&split.e1, &split.e2] {
            let sub = instance.filter_edges(|i, _| half.contains(&i));
            assert!(sub.max_degree() <= 2, "half {half:?} of {:?}", instance.pairs().collect::<Vec<_>>());
        }
        split
    }

    #[test]
    fn degree4_examples() {
        let k4 = generators::complete(4, 1);
        assert_split(&k4);
        let sol = solve_degree4(&k4).unwrap();
        assert!(sol.revenue.clone() * int(2) >= fractional_opt(&k4).unwrap().revenue);
        assert!(sol.revenue >= brute_force_opt(&k4, 1).unwrap().revenue * ratio(1, 2));

        let p = path(&[3, 1, 3]);
        let split = assert_split(&p);
        assert!(split.e2.is_empty());
        assert_eq!(solve_degree4(&p).unwrap().revenue, int(7));

        let bowtie = Instance::from_int_edges(5, &[(0, 1, 2), (1, 2, 1), (2, 0, 3), (0, 3, 1), (3, 4, 2), (4, 0, 2)])
            .unwrap();
        assert_split(&bowtie);
        let sol = solve_degree4(&bowtie).unwrap();
        assert!(sol.revenue.clone() * int(2) >= fractional_opt(&bowtie).unwrap().revenue);
        assert!(matches!(
            solve_degree4(&generators::complete(6, 1)),
            Err(Error::DegreeTooHigh { max: 4, .. })
        ));
    }

    proptest! {
        #[test]
        fn paths_match_fractional_oracle(n in 1usize..8, seed in any::<u64>()) {
            let inst = generators::random_path(n, 0, 5, seed);
            prop_assert_eq!(solve_path(&inst).unwrap().revenue, fractional_opt(&inst).unwrap().revenue);
        }

        #[test]
        fn cycles_match_fractional_oracle(n in 3usize..8, seed in any::<u64>()) {
            let inst = generators::random_cycle(n, 0, 5, seed);
            prop_assert_eq!(solve_cycle(&inst).unwrap().revenue, fractional_opt(&inst).unwrap().revenue);
        }

        #[test]
        fn degree2_beats_integral_oracle(n in 1usize..8, seed in any::<u64>()) {
            let inst = generators::random_bounded_degree(n, 2, 0, 4, seed);
            let sol = solve_degree2(&inst).unwrap();
            prop_assert!(sol.revenue >= brute_force_opt(&inst, 4).unwrap().revenue);
            prop_assert_eq!(sol.revenue, fractional_opt(&inst).unwrap().revenue);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn degree4_split_and_ratio(n in 2usize..8, seed in any::<u64>()) {
            let inst = generators::random_bounded_degree(n, 4, 1, 5, seed);
            assert_split(&inst);
            let sol = solve_degree4(&inst).unwrap();
            prop_assert!(sol.revenue * int(2) >= fractional_opt(&inst).unwrap().revenue);
        }

        #[test]
        fn split_handles_parallel_edges(seed in any::<u64>()) {
            let base = generators::random_bounded_degree(6, 2, 1, 3, seed);
            let mut edges = base.edges().to_vec();
            edges.extend(base.edges().iter().cloned());
            let doubled = Instance::new(6, edges).unwrap();
            assert_split(&doubled);
        }
    }
}
