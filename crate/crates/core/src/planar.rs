//! BFS layering PTAS for planar instances, and the vertex-cover reduction
//! used to generate instances with a known optimum.

use std::collections::VecDeque;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::instance::{Edge, Instance, PriceAssignment, Solution};
use crate::rational::{int, Rational};
use crate::treewidth::{fptas_with, DecompositionOptions, DpOptions};

/// Vertices split by BFS depth modulo `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerPartition {
    pub k: usize,
    pub parts: Vec<Vec<usize>>,
}

impl LayerPartition {
    pub fn part_of(&self, n: usize) -> Vec<usize> {
        let mut part = vec![0; n];
        for (i, vs) in self.parts.iter().enumerate() {
            for &v in vs {
                part[v] = i;
            }
        }
        part
    }
}

/// BFS depth of every vertex, each component rooted at its smallest vertex.
pub fn bfs_depths(instance: &Instance) -> Vec<usize> {
    let n = instance.n();
    let mut adj = vec![Vec::new(); n];
    for (u, v) in instance.pairs() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut depth = vec![usize::MAX; n];
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    depth
}

pub fn baker_partition(instance: &Instance, k: usize) -> Result<LayerPartition> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("layer count k must be at least 3, got {k}")));
    }
    let mut parts = vec![Vec::new(); k];
    for (v, d) in bfs_depths(instance).into_iter().enumerate() {
        parts[d % k].push(v);
    }
    Ok(LayerPartition { k, parts })
}

/// Instance with every edge touching `part` removed; vertex ids are kept.
pub fn without_part(instance: &Instance, partition: &LayerPartition, part: usize) -> Instance {
    let owner = partition.part_of(instance.n());
    instance.filter_edges(|_, e| owner[e.u] != part && owner[e.v] != part)
}

/// Number of layers used for a given epsilon: `ceil(1/epsilon) + 2`.
pub fn layer_count(epsilon: &Rational) -> Result<usize> {
    if *epsilon <= Rational::zero() {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    (int(1) / epsilon)
        .ceil()
        .to_integer()
        .to_usize()
        .map(|c| c + 2)
        .ok_or_else(|| Error::InvalidParameter(format!("epsilon {epsilon} is too small")))
}

/// Deletes each BFS residue class in turn, solves the remainder with the
/// FPTAS and keeps the best full-instance revenue. Deleted vertices get
/// price 0.
pub fn ptas_planar(instance: &Instance, epsilon: &Rational) -> Result<Solution> {
    let k = layer_count(epsilon)?;
    let partition = baker_partition(instance, k)?;
    let options = DecompositionOptions::default();
    let first_width = (3 * (k - 1)).min(options.width_limit);
    let owner = partition.part_of(instance.n());
    let mut best = Solution::zero(instance.n(), "ptas-planar");
    for j in 0..k {
        let h = without_part(instance, &partition, j);
        let mut sol = fptas_with(&h, epsilon, first_width, options, DpOptions::default());
        if matches!(sol, Err(Error::DecompositionNotFound { .. })) && first_width < options.width_limit {
            sol = fptas_with(&h, epsilon, options.width_limit, options, DpOptions::default());
        }
        let sol = sol?;
        let prices = PriceAssignment(
            sol.prices
                .0
                .into_iter()
                .enumerate()
                .map(|(v, p)| if owner[v] == j { Rational::zero() } else { p })
                .collect(),
        );
        let candidate = Solution::evaluated(instance, prices, "ptas-planar")?;
        if candidate.revenue > best.revenue {
            best = candidate;
        }
    }
    Ok(best)
}

/// Builds the pricing instance of the vertex-cover reduction on a simple
/// graph with `n` vertices. Vertex `v + n` is the pendant copy of `v`. Each
/// input edge becomes two rich consumers with budgets `n^2` and `2 n^2`
/// (in input order), followed by one poor consumer `(v, v + n)` of budget 1
/// per vertex. The optimum is `2 |E| n^2 + n - VC`.
pub fn vc_to_gvp(n: usize, edges: &[(usize, usize)]) -> Result<Instance> {
    let sq = int((n * n) as i64);
    let mut out = Vec::with_capacity(2 * edges.len() + n);
    for &(u, v) in edges {
        out.push(Edge::new(u, v, sq.clone()));
        out.push(Edge::new(u, v, &sq * int(2)));
    }
    for v in 0..n {
        out.push(Edge::new(v, v + n, int(1)));
    }
    Instance::new(2 * n, out)
}

/// Minimum vertex cover by exhaustive search over subsets (n ≤ 20).
pub fn min_vertex_cover(n: usize, edges: &[(usize, usize)]) -> Result<usize> {
    if n > 20 {
        return Err(Error::SizeCap(format!("exhaustive vertex cover limited to 20 vertices, got {n}")));
    }
    Ok((0u32..1 << n)
        .filter(|mask| edges.iter().all(|&(u, v)| mask & (1 << u) != 0 || mask & (1 << v) != 0))
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap_or(0))
}

/// `2 |E| |V|^2 + |V| - VC`.
pub fn vc_reduction_opt(n: usize, edges: usize, vc: usize) -> u64 {
    (2 * edges * n * n + n - vc) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::oracle::brute_force_opt;
    use crate::rational::{from_u64, ratio};
    use crate::treewidth::build_decomposition;

    #[test]
    fn partition_examples() {
        let path = generators::path(&vec![int(1); 5]);
        let p = baker_partition(&path, 3).unwrap();
        assert_eq!(p.parts, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);

        let single = Instance::from_int_edges(1, &[]).unwrap();
        let p = baker_partition(&single, 4).unwrap();
        assert_eq!(p.parts, vec![vec![0], vec![], vec![], vec![]]);

        let grid = generators::grid(3, 3, 1);
        let p = baker_partition(&grid, 3).unwrap();
        for (v, part) in p.part_of(9).into_iter().enumerate() {
            assert_eq!(part, (v / 3 + v % 3) % 3);
        }
        assert!(baker_partition(&grid, 2).is_err());
    }

    #[test]
    fn removing_a_part_bounds_layer_span() {
        let grid = generators::grid(4, 5, 1);
        let depth = bfs_depths(&grid);
        for k in 3..6 {
            let p = baker_partition(&grid, k).unwrap();
            for j in 0..k {
                let h = without_part(&grid, &p, j);
                for (u, v) in h.pairs() {
                    // Surviving edges never cross the deleted residue.
                    assert_ne!(depth[u] % k, j);
                    assert_ne!(depth[v] % k, j);
                }
                assert!(build_decomposition(&h, (3 * (k - 1)).min(8)).is_ok());
            }
        }
    }

    #[test]
    fn ptas_examples() {
        let one = Instance::from_int_edges(2, &[(0, 1, 9)]).unwrap();
        assert_eq!(ptas_planar(&one, &ratio(1, 3)).unwrap().revenue, int(9));

        let grid = generators::grid(3, 3, 1);
        let oracle = brute_force_opt(&grid, 1).unwrap().revenue;
        let sol = ptas_planar(&grid, &ratio(1, 3)).unwrap();
        assert!(sol.revenue * int(5) >= oracle * int(3));

        for seed in 0..10 {
            let tree = generators::random_tree(6, 1, 5, seed);
            let oracle = brute_force_opt(&tree, 5).unwrap().revenue;
            let sol = ptas_planar(&tree, &ratio(1, 2)).unwrap();
            assert!(sol.revenue <= oracle);
            // k = 4 layers, so one quarter of the optimum may be lost.
            assert!(sol.revenue * int(4) >= oracle * int(2) * ratio(1, 2), "seed {seed}");
        }
        assert!(layer_count(&int(0)).is_err());
        assert_eq!(layer_count(&ratio(1, 3)).unwrap(), 5);
        assert_eq!(layer_count(&ratio(2, 5)).unwrap(), 5);
    }

    #[test]
    fn reduction_examples() {
        let k2 = vc_to_gvp(2, &[(0, 1)]).unwrap();
        assert_eq!(k2.n(), 4);
        assert_eq!(brute_force_opt(&k2, 8).unwrap().revenue, int(9));

        let tri = [(0, 1), (1, 2), (0, 2)];
        let k3 = vc_to_gvp(3, &tri).unwrap();
        let budgets: Vec<Rational> = k3.edges().iter().map(|e| e.budget.clone()).collect();
        assert_eq!(&budgets[..2], &[int(9), int(18)]);
        assert_eq!(budgets[6..], [int(1), int(1), int(1)]);
        assert_eq!(brute_force_opt(&k3, 18).unwrap().revenue, int(55));
        assert_eq!(min_vertex_cover(3, &tri).unwrap(), 2);
        assert_eq!(vc_reduction_opt(3, 3, 2), 55);

        let empty = vc_to_gvp(4, &[]).unwrap();
        assert_eq!(brute_force_opt(&empty, 1).unwrap().revenue, from_u64(4));
    }
}
