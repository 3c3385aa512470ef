//! Seeded instance families.
//!
//! Every random generator takes an explicit seed and draws from a ChaCha8
//! stream, so the same arguments always produce the same instance.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Edge, HyperEdge, HyperInstance, Instance};
use crate::kpartite::Coloring;
use crate::rational::{int, Rational};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn budget(rng: &mut ChaCha8Rng, min_b: u64, max_b: u64) -> Rational {
    int(rng.gen_range(min_b..=max_b) as i64)
}

fn build(n: usize, pairs: Vec<(usize, usize, Rational)>) -> Instance {
    Instance::new(n, pairs.into_iter().map(|(u, v, b)| Edge::new(u, v, b)).collect())
        .expect("generated instance is valid")
}

/// Path `0 - 1 - ... - len` with edge `i` joining `i` and `i + 1`.
pub fn path(budgets: &[Rational]) -> Instance {
    let n = if budgets.is_empty() { 1 } else { budgets.len() + 1 };
    build(n, budgets.iter().enumerate().map(|(i, b)| (i, i + 1, b.clone())).collect())
}

/// Cycle on `budgets.len()` vertices; the last edge closes `len - 1` to 0.
/// Needs at least three budgets.
pub fn cycle(budgets: &[Rational]) -> Instance {
    assert!(budgets.len() >= 3, "a simple cycle needs three edges");
    let n = budgets.len();
    build(n, budgets.iter().enumerate().map(|(i, b)| (i, (i + 1) % n, b.clone())).collect())
}

/// Star with center 0 and leaf `i + 1` on edge `i`.
pub fn star(budgets: &[Rational]) -> Instance {
    build(budgets.len() + 1, budgets.iter().enumerate().map(|(i, b)| (0, i + 1, b.clone())).collect())
}

/// `rows x cols` grid, vertex `r * cols + c`, horizontal edges first.
pub fn grid(rows: usize, cols: usize, budget: i64) -> Instance {
    let mut pairs = Vec::new();
    for r in 0..rows {
        for c in 0..cols.saturating_sub(1) {
            pairs.push((r * cols + c, r * cols + c + 1, int(budget)));
        }
    }
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols {
            pairs.push((r * cols + c, (r + 1) * cols + c, int(budget)));
        }
    }
    build(rows * cols, pairs)
}

pub fn complete(n: usize, budget: i64) -> Instance {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            pairs.push((u, v, int(budget)));
        }
    }
    build(n, pairs)
}

pub fn random_path(n: usize, min_b: u64, max_b: u64, seed: u64) -> Instance {
    let mut rng = rng(seed);
    let budgets: Vec<Rational> = (1..n.max(1)).map(|_| budget(&mut rng, min_b, max_b)).collect();
    path(&budgets)
}

pub fn random_cycle(n: usize, min_b: u64, max_b: u64, seed: u64) -> Instance {
    let mut rng = rng(seed);
    let budgets: Vec<Rational> = (0..n).map(|_| budget(&mut rng, min_b, max_b)).collect();
    cycle(&budgets)
}

/// Random recursive tree: vertex `i > 0` hangs off a uniform earlier vertex.
pub fn random_tree(n: usize, min_b: u64, max_b: u64, seed: u64) -> Instance {
    let mut rng = rng(seed);
    let pairs = (1..n)
        .map(|v| (rng.gen_range(0..v), v, budget(&mut rng, min_b, max_b)))
        .collect();
    build(n.max(1), pairs)
}

/// Random partial 2-tree. Each new vertex attaches to both ends of an
/// existing edge (or to one vertex while fewer than two exist); afterwards
/// every edge survives with probability 3/4. The result has treewidth ≤ 2.
pub fn random_series_parallel(n: usize, min_b: u64, max_b: u64, seed: u64) -> Instance {
    let mut rng = rng(seed);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for v in 1..n {
        if pairs.is_empty() {
            pairs.push((0, v));
        } else {
            let (a, b) = pairs[rng.gen_range(0..pairs.len())];
            pairs.push((a, v));
            pairs.push((b, v));
        }
    }
    let kept = pairs
        .into_iter()
        .filter(|_| rng.gen_bool(0.75))
        .collect::<Vec<_>>();
    let edges = kept
        .into_iter()
        .map(|(u, v)| (u, v, budget(&mut rng, min_b, max_b)))
        .collect();
    build(n.max(1), edges)
}

/// Erdős–Rényi graph: each pair is an edge with probability `p`.
pub fn random_graph(n: usize, p: f64, min_b: u64, max_b: u64, seed: u64) -> Instance {
    let mut rng = rng(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                pairs.push((u, v, budget(&mut rng, min_b, max_b)));
            }
        }
    }
    build(n, pairs)
}

/// Simple graph with maximum degree at most `max_degree`: candidate pairs are
/// visited in random order and kept while both endpoints have room.
pub fn random_bounded_degree(n: usize, max_degree: usize, min_b: u64, max_b: u64, seed: u64) -> Instance {
    let mut rng = rng(seed);
    let mut candidates: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    candidates.shuffle(&mut rng);
    let mut degree = vec![0usize; n];
    let mut pairs = Vec::new();
    for (u, v) in candidates {
        if degree[u] < max_degree && degree[v] < max_degree && rng.gen_bool(0.8) {
            degree[u] += 1;
            degree[v] += 1;
            pairs.push((u, v, budget(&mut rng, min_b, max_b)));
        }
    }
    build(n, pairs)
}

/// Random k-partite graph with its coloring. Every vertex gets a uniform
/// class and each cross-class pair is an edge with probability `p`.
pub fn random_kpartite(
    n: usize,
    k: usize,
    p: f64,
    min_b: u64,
    max_b: u64,
    seed: u64,
) -> (Instance, Coloring) {
    let mut rng = rng(seed);
    let class_of: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if class_of[u] != class_of[v] && rng.gen_bool(p) {
                pairs.push((u, v, budget(&mut rng, min_b, max_b)));
            }
        }
    }
    (build(n, pairs), Coloring { k, class_of })
}

/// Random SMP instance with `m` hyperedges of size `1..=max_size`.
pub fn random_hyper(n: usize, m: usize, max_size: usize, min_b: u64, max_b: u64, seed: u64) -> HyperInstance {
    let mut rng = rng(seed);
    let all: Vec<usize> = (0..n).collect();
    let hyperedges = (0..m)
        .map(|_| {
            let size = rng.gen_range(1..=max_size.min(n));
            let vertices = all.choose_multiple(&mut rng, size).copied().collect();
            HyperEdge { vertices, budget: budget(&mut rng, min_b, max_b) }
        })
        .collect();
    HyperInstance::new(n, hyperedges).expect("generated hyperinstance is valid")
}
