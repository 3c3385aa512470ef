use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Rooted tree of vertex bags. Bags are kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    parents: Vec<Option<usize>>,
}

/// First property of a tree decomposition found to fail, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotATree(String),
    VertexOutOfRange { node: usize, vertex: usize },
    /// Property 1: the vertex lies in no bag.
    UncoveredVertex(usize),
    /// Property 2: no bag holds every vertex of the consumer.
    UncoveredEdge { index: usize, vertices: Vec<usize> },
    /// Property 3: `vertex` is in bags `first` and `second` but not in
    /// `missing`, which lies on the tree path between them.
    Disconnected {
        vertex: usize,
        first: usize,
        second: usize,
        missing: usize,
    },
}

impl Violation {
    /// Which numbered decomposition property the violation breaks (0 for a
    /// malformed tree).
    pub fn property(&self) -> u8 {
        match self {
            Violation::NotATree(_) | Violation::VertexOutOfRange { .. } => 0,
            Violation::UncoveredVertex(_) => 1,
            Violation::UncoveredEdge { .. } => 2,
            Violation::Disconnected { .. } => 3,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotATree(why) => write!(f, "parents do not form a rooted tree: {why}"),
            Violation::VertexOutOfRange { node, vertex } => {
                write!(f, "bag {node} holds vertex {vertex}, which is out of range")
            }
            Violation::UncoveredVertex(v) => write!(f, "property 1: vertex {v} is in no bag"),
            Violation::UncoveredEdge { index, vertices } => {
                write!(f, "property 2: consumer {index} {vertices:?} is in no bag")
            }
            Violation::Disconnected {
                vertex,
                first,
                second,
                missing,
            } => write!(
                f,
                "property 3: vertex {vertex} is in bags {first} and {second} but not in bag {missing} between them"
            ),
        }
    }
}

impl TreeDecomposition {
    pub fn new(bags: Vec<Vec<usize>>, parents: Vec<Option<usize>>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, parents }
    }

    /// Path decomposition: node `i` has parent `i - 1`.
    pub fn path(bags: Vec<Vec<usize>>) -> Self {
        let parents = (0..bags.len()).map(|i| i.checked_sub(1)).collect();
        Self::new(bags, parents)
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parents
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn root(&self) -> Option<usize> {
        self.parents.iter().position(Option::is_none)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.len()];
        for (node, parent) in self.parents.iter().enumerate() {
            if let Some(p) = parent {
                children[*p].push(node);
            }
        }
        children
    }

    /// Nodes in breadth-first order from the root. Only meaningful once
    /// the structure has been validated.
    pub fn top_down(&self) -> Vec<usize> {
        let children = self.children();
        let mut order = Vec::with_capacity(self.len());
        let mut queue: VecDeque<usize> = self.root().into_iter().collect();
        while let Some(t) = queue.pop_front() {
            order.push(t);
            queue.extend(children[t].iter().copied());
        }
        order
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.len()];
        for t in self.top_down() {
            if let Some(p) = self.parents[t] {
                depth[t] = depth[p] + 1;
            }
        }
        depth
    }

    /// The node nearest the root whose bag contains every vertex of `set`.
    pub fn owner(&self, set: &[usize]) -> Option<usize> {
        self.top_down()
            .into_iter()
            .find(|&t| set.iter().all(|v| self.bags[t].binary_search(v).is_ok()))
    }

    /// Owner node of every edge of `instance`, in edge order.
    pub fn edge_assignment(&self, instance: &Instance) -> Result<Vec<usize>> {
        validate_decomposition(instance, self).map_err(Error::InvalidDecomposition)?;
        let order = self.top_down();
        Ok(instance
            .edges()
            .iter()
            .map(|e| owner_in(&order, &self.bags, &[e.u, e.v]).expect("validated"))
            .collect())
    }
}

pub(crate) fn owner_in(order: &[usize], bags: &[Vec<usize>], set: &[usize]) -> Option<usize> {
    order
        .iter()
        .copied()
        .find(|&t| set.iter().all(|v| bags[t].binary_search(v).is_ok()))
}

/// Tree shape, vertex coverage (property 1) and per-vertex connectivity
/// (property 3), without looking at consumers.
pub fn validate_structure(n: usize, td: &TreeDecomposition) -> std::result::Result<(), Violation> {
    let len = td.len();
    if len == 0 {
        return Err(Violation::NotATree("no bags".into()));
    }
    if td.parents.len() != len {
        return Err(Violation::NotATree("parent list length differs from bag count".into()));
    }
    let roots: Vec<usize> = (0..len).filter(|&t| td.parents[t].is_none()).collect();
    if roots.len() != 1 {
        return Err(Violation::NotATree(format!("{} roots", roots.len())));
    }
    for (t, p) in td.parents.iter().enumerate() {
        if let Some(p) = p {
            if *p >= len {
                return Err(Violation::NotATree(format!("node {t} has parent {p} out of range")));
            }
        }
        // Every node must reach the root within `len` steps.
        let (mut cur, mut steps) = (t, 0);
        while let Some(p) = td.parents[cur] {
            cur = p;
            steps += 1;
            if steps > len {
                return Err(Violation::NotATree(format!("node {t} lies on a cycle")));
            }
        }
    }
    for (node, bag) in td.bags.iter().enumerate() {
        if let Some(&vertex) = bag.iter().find(|&&v| v >= n) {
            return Err(Violation::VertexOutOfRange { node, vertex });
        }
    }

    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            holders[v].push(t);
        }
    }
    if let Some(v) = holders.iter().position(Vec::is_empty) {
        return Err(Violation::UncoveredVertex(v));
    }
    for (vertex, nodes) in holders.iter().enumerate() {
        let contains = |t: usize| td.bags[t].binary_search(&vertex).is_ok();
        // Nodes holding the vertex whose parent does not: one per component.
        let tops: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|&t| td.parents[t].is_none_or(|p| !contains(p)))
            .collect();
        if tops.len() > 1 {
            let (first, second) = (tops[0], tops[1]);
            let path = tree_path(td, first, second);
            let missing = *path.iter().find(|&&t| !contains(t)).expect("separate components");
            return Err(Violation::Disconnected {
                vertex,
                first: first.min(second),
                second: first.max(second),
                missing,
            });
        }
    }
    Ok(())
}

fn tree_path(td: &TreeDecomposition, a: usize, b: usize) -> Vec<usize> {
    let ancestors = |mut t: usize| {
        let mut chain = vec![t];
        while let Some(p) = td.parents[t] {
            chain.push(p);
            t = p;
        }
        chain
    };
    let (up_a, up_b) = (ancestors(a), ancestors(b));
    let on_b: HashSet<usize> = up_b.iter().copied().collect();
    let meet = *up_a.iter().find(|t| on_b.contains(t)).expect("common root");
    let mut path: Vec<usize> = up_a.iter().copied().take_while(|&t| t != meet).collect();
    path.push(meet);
    let tail: Vec<usize> = up_b.iter().copied().take_while(|&t| t != meet).collect();
    path.extend(tail.into_iter().rev());
    path
}

/// Checks every decomposition property for `instance`; reports the first
/// violation found.
pub fn validate_decomposition(instance: &Instance, td: &TreeDecomposition) -> std::result::Result<(), Violation> {
    validate_sets(instance.n(), instance.pairs().map(|(u, v)| vec![u, v]), td)
}

pub(crate) fn validate_sets(
    n: usize,
    sets: impl IntoIterator<Item = Vec<usize>>,
    td: &TreeDecomposition,
) -> std::result::Result<(), Violation> {
    let structure = validate_structure(n, td);
    if let Err(v) = &structure {
        if v.property() != 3 {
            return structure;
        }
    }
    for (index, set) in sets.into_iter().enumerate() {
        if td.owner_unchecked(&set).is_none() {
            return Err(Violation::UncoveredEdge { index, vertices: set });
        }
    }
    structure
}

impl TreeDecomposition {
    fn owner_unchecked(&self, set: &[usize]) -> Option<usize> {
        self.bags
            .iter()
            .position(|bag| set.iter().all(|v| bag.binary_search(v).is_ok()))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DecompositionOptions {
    /// Largest `max_width` accepted at all.
    pub width_limit: usize,
    /// Exhaustive elimination-order search runs up to this many vertices.
    pub exhaustive_limit: usize,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        DecompositionOptions {
            width_limit: 8,
            exhaustive_limit: 12,
        }
    }
}

pub fn build_decomposition(instance: &Instance, max_width: usize) -> Result<TreeDecomposition> {
    build_decomposition_with(instance.n(), instance.pairs(), max_width, DecompositionOptions::default())
}

/// Min-degree and min-fill elimination orders first; when both exceed
/// `max_width` and the graph is small, an exhaustive search over
/// elimination orders decides whether the width is attainable at all.
pub fn build_decomposition_with(
    n: usize,
    pairs: impl IntoIterator<Item = (usize, usize)>,
    max_width: usize,
    options: DecompositionOptions,
) -> Result<TreeDecomposition> {
    if max_width > options.width_limit {
        return Err(Error::InvalidParameter(format!(
            "max_width {max_width} exceeds the configured limit {}",
            options.width_limit
        )));
    }
    if n == 0 {
        return Ok(TreeDecomposition::new(vec![Vec::new()], vec![None]));
    }
    let mut adj = vec![BTreeSet::new(); n];
    for (u, v) in pairs {
        if u != v {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }

    let candidates = [greedy_order(&adj, Heuristic::MinDegree), greedy_order(&adj, Heuristic::MinFill)];
    let (order, width) = candidates
        .into_iter()
        .min_by_key(|(_, w)| *w)
        .expect("two candidates");
    if width <= max_width {
        return Ok(from_elimination_order(&adj, &order));
    }
    if n > options.exhaustive_limit {
        return Err(Error::DecompositionNotFound {
            max_width,
            best_width: width,
            exhaustive: false,
        });
    }
    match exhaustive_order(&adj, max_width) {
        Some(order) => Ok(from_elimination_order(&adj, &order)),
        None => Err(Error::DecompositionNotFound {
            max_width,
            best_width: width,
            exhaustive: true,
        }),
    }
}

#[derive(Clone, Copy)]
enum Heuristic {
    MinDegree,
    MinFill,
}

/// Greedy elimination order and the width it induces; ties go to the
/// smallest vertex.
fn greedy_order(adj: &[BTreeSet<usize>], heuristic: Heuristic) -> (Vec<usize>, usize) {
    let n = adj.len();
    let mut graph = adj.to_vec();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut width = 0;
    for _ in 0..n {
        let score = |v: usize| match heuristic {
            Heuristic::MinDegree => graph[v].len(),
            Heuristic::MinFill => {
                let nb: Vec<usize> = graph[v].iter().copied().collect();
                let mut missing = 0;
                for (i, &a) in nb.iter().enumerate() {
                    missing += nb[i + 1..].iter().filter(|b| !graph[a].contains(b)).count();
                }
                missing
            }
        };
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (score(v), v)).expect("vertex left");
        width = width.max(graph[v].len());
        eliminate(&mut graph, v);
        alive[v] = false;
        order.push(v);
    }
    (order, width)
}

fn eliminate(graph: &mut [BTreeSet<usize>], v: usize) {
    let nb: Vec<usize> = graph[v].iter().copied().collect();
    for &a in &nb {
        graph[a].remove(&v);
        for &b in &nb {
            if a != b {
                graph[a].insert(b);
            }
        }
    }
    graph[v].clear();
}

/// Depth-first search over eliminated vertex sets. The graph left after
/// eliminating a set does not depend on the order, so failed sets are
/// memoized by bitmask.
fn exhaustive_order(adj: &[BTreeSet<usize>], max_width: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut failed = HashSet::new();
    let mut order = Vec::with_capacity(n);

    // Neighbours of v once every vertex of `eliminated` is gone: vertices
    // outside the set reachable from v through it.
    let degree_after = |eliminated: u32, v: usize| -> usize {
        let mut seen = 1u32 << v;
        let mut stack = vec![v];
        let mut count = 0;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if seen >> y & 1 == 1 {
                    continue;
                }
                seen |= 1 << y;
                if eliminated >> y & 1 == 1 {
                    stack.push(y);
                } else {
                    count += 1;
                }
            }
        }
        count
    };

    fn search(
        eliminated: u32,
        full: u32,
        n: usize,
        max_width: usize,
        failed: &mut HashSet<u32>,
        order: &mut Vec<usize>,
        degree_after: &dyn Fn(u32, usize) -> usize,
    ) -> bool {
        if eliminated == full {
            return true;
        }
        if failed.contains(&eliminated) {
            return false;
        }
        for v in 0..n {
            if eliminated >> v & 1 == 0 && degree_after(eliminated, v) <= max_width {
                order.push(v);
                if search(eliminated | 1 << v, full, n, max_width, failed, order, degree_after) {
                    return true;
                }
                order.pop();
            }
        }
        failed.insert(eliminated);
        false
    }

    search(0, full, n, max_width, &mut failed, &mut order, &degree_after).then_some(order)
}

/// Builds a decomposition from an elimination order: vertex `v` gets bag
/// `{v} ∪ N(v)` in the filled graph at elimination time, hung below the bag
/// of its earliest-eliminated remaining neighbour. Bags contained in their
/// parent are merged away and nodes are renumbered breadth-first, so the
/// root is node 0.
fn from_elimination_order(adj: &[BTreeSet<usize>], order: &[usize]) -> TreeDecomposition {
    let n = adj.len();
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut graph = adj.to_vec();
    let mut bags = Vec::with_capacity(n);
    let mut parents: Vec<Option<usize>> = Vec::with_capacity(n);
    for &v in order {
        let nb: Vec<usize> = graph[v].iter().copied().collect();
        let mut bag = nb.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        parents.push(nb.iter().copied().min_by_key(|&u| position[u]).map(|u| position[u]));
        eliminate(&mut graph, v);
    }
    // Component roots hang below the last one; their bags are disjoint.
    let last = n - 1;
    for (t, parent) in parents.iter_mut().enumerate() {
        if parent.is_none() && t != last {
            *parent = Some(last);
        }
    }

    // Merge children contained in their parent.
    let mut alive = vec![true; n];
    for t in 0..n {
        if let Some(p) = parents[t] {
            if bags[t].iter().all(|v| bags[p].binary_search(v).is_ok()) {
                alive[t] = false;
                for q in parents.iter_mut() {
                    if *q == Some(t) {
                        *q = Some(p);
                    }
                }
            }
        }
    }

    let mut children = vec![Vec::new(); n];
    for t in 0..n {
        if alive[t] {
            if let Some(p) = parents[t] {
                children[p].push(t);
            }
        }
    }
    let mut new_index = vec![usize::MAX; n];
    let mut new_bags = Vec::new();
    let mut new_parents = Vec::new();
    let mut queue = VecDeque::from([last]);
    while let Some(t) = queue.pop_front() {
        new_index[t] = new_bags.len();
        new_bags.push(bags[t].clone());
        new_parents.push(parents[t].filter(|_| t != last).map(|p| new_index[p]));
        queue.extend(children[t].iter().copied());
    }
    TreeDecomposition::new(new_bags, new_parents)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn path3() -> Instance {
        Instance::from_int_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap()
    }

    #[test]
    fn validates_path_decomposition() {
        let td = TreeDecomposition::path(vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(validate_decomposition(&path3(), &td), Ok(()));
        assert_eq!(td.width(), 1);
        assert_eq!(td.edge_assignment(&path3()).unwrap(), vec![0, 1]);
    }

    #[test]
    fn reports_uncovered_edge() {
        let td = TreeDecomposition::path(vec![vec![0, 1], vec![2]]);
        let err = validate_decomposition(&path3(), &td).unwrap_err();
        assert_eq!(
            err,
            Violation::UncoveredEdge {
                index: 1,
                vertices: vec![1, 2]
            }
        );
        assert_eq!(err.property(), 2);
    }

    #[test]
    fn reports_disconnected_vertex() {
        let tri = Instance::from_int_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let td = TreeDecomposition::path(vec![vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert_eq!(
            validate_decomposition(&tri, &td),
            Err(Violation::Disconnected {
                vertex: 0,
                first: 0,
                second: 2,
                missing: 1
            })
        );
    }

    #[test]
    fn reports_structural_problems() {
        let inst = path3();
        let two_roots = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![None, None]);
        assert!(matches!(validate_decomposition(&inst, &two_roots), Err(Violation::NotATree(_))));
        let cycle = TreeDecomposition::new(vec![vec![0, 1, 2], vec![1], vec![2]], vec![None, Some(2), Some(1)]);
        assert!(matches!(validate_decomposition(&inst, &cycle), Err(Violation::NotATree(_))));
        let missing = TreeDecomposition::path(vec![vec![0, 1]]);
        assert_eq!(validate_decomposition(&inst, &missing), Err(Violation::UncoveredVertex(2)));
        let outside = TreeDecomposition::path(vec![vec![0, 1, 2, 7]]);
        assert!(matches!(
            validate_decomposition(&inst, &outside),
            Err(Violation::VertexOutOfRange { vertex: 7, .. })
        ));
    }

    #[test]
    fn owner_is_nearest_root() {
        let td = TreeDecomposition::new(vec![vec![1, 2], vec![0, 1, 2], vec![0, 1]], vec![Some(1), None, Some(1)]);
        assert_eq!(td.owner(&[1, 2]), Some(1));
        assert_eq!(td.owner(&[0, 1]), Some(1));
        assert_eq!(td.owner(&[3]), None);
    }

    #[test]
    fn trees_get_width_one() {
        for seed in 0..20 {
            let tree = generators::random_tree(9, 1, 5, seed);
            let td = build_decomposition(&tree, 1).unwrap();
            assert_eq!(validate_decomposition(&tree, &td), Ok(()));
            assert_eq!(td.width(), 1);
            assert_eq!(td.root(), Some(0));
        }
    }

    #[test]
    fn k4_fails_exhaustively() {
        let k4 = generators::complete(4, 1);
        match build_decomposition(&k4, 2) {
            Err(Error::DecompositionNotFound { exhaustive, .. }) => assert!(exhaustive),
            other => panic!("unexpected {other:?}"),
        }
        let td = build_decomposition(&k4, 3).unwrap();
        assert_eq!(td.width(), 3);
    }

    #[test]
    fn grid_three_by_three() {
        let grid = generators::grid(3, 3, 1);
        let td = build_decomposition(&grid, 3).unwrap();
        assert_eq!(validate_decomposition(&grid, &td), Ok(()));
        assert!(td.width() <= 3);
        // The 3x3 grid has treewidth 3.
        assert!(build_decomposition(&grid, 2).is_err());
    }

    #[test]
    fn exhaustive_beats_heuristics_when_needed() {
        let adj_pairs = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)];
        let inst = Instance::from_int_edges(5, &adj_pairs.map(|(u, v)| (u, v, 1))).unwrap();
        let td = build_decomposition(&inst, 2).unwrap();
        assert_eq!(td.width(), 2);
        assert_eq!(validate_decomposition(&inst, &td), Ok(()));
    }

    #[test]
    fn empty_and_edgeless_graphs() {
        let empty = Instance::from_int_edges(0, &[]).unwrap();
        let td = build_decomposition(&empty, 1).unwrap();
        assert_eq!(validate_decomposition(&empty, &td), Ok(()));
        let edgeless = Instance::from_int_edges(4, &[]).unwrap();
        let td = build_decomposition(&edgeless, 1).unwrap();
        assert_eq!(validate_decomposition(&edgeless, &td), Ok(()));
        assert_eq!(td.width(), 0);
    }

    #[test]
    fn rejects_width_above_limit() {
        assert!(matches!(build_decomposition(&path3(), 9), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn random_series_parallel_decompose() {
        for seed in 0..30 {
            let g = generators::random_series_parallel(10, 1, 5, seed);
            let td = build_decomposition(&g, 2).unwrap();
            assert_eq!(validate_decomposition(&g, &td), Ok(()));
            assert!(td.width() <= 2);
        }
    }
}
