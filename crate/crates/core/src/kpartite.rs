//! Cut-based approximations: the bipartite 2-approximation and its
//! extension to k-partite and general graphs through balanced bipartitions
//! of the color classes.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, PriceAssignment, Solution};
use crate::rational::{from_u64, ratio, Rational};

/// Assignment of every vertex to one of `k` color classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub k: usize,
    pub class_of: Vec<usize>,
}

impl Coloring {
    /// Every vertex in its own class.
    pub fn singletons(n: usize) -> Self {
        Coloring { k: n, class_of: (0..n).collect() }
    }

    /// Index of the first edge whose endpoints share a class.
    pub fn monochromatic_edge(&self, instance: &Instance) -> Option<usize> {
        instance
            .pairs()
            .position(|(u, v)| self.class_of.get(u) == self.class_of.get(v))
    }

    pub fn validate(&self, instance: &Instance) -> Result<()> {
        if self.class_of.len() != instance.n() {
            return Err(Error::InvalidColoring(format!(
                "coloring has {} entries for {} vertices",
                self.class_of.len(),
                instance.n()
            )));
        }
        if let Some(v) = self.class_of.iter().position(|&c| c >= self.k) {
            return Err(Error::InvalidColoring(format!(
                "vertex {v} has class {} outside 0..{}",
                self.class_of[v], self.k
            )));
        }
        if let Some(i) = self.monochromatic_edge(instance) {
            let e = &instance.edges()[i];
            return Err(Error::InvalidColoring(format!(
                "edge {i} = ({}, {}) is monochromatic in class {}",
                e.u, e.v, self.class_of[e.u]
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    L,
    R,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Randomized(u64),
    Derandomized,
}

/// Prices one side at zero and lets every vertex on the other side charge
/// the single price that earns most from its incident budgets; returns the
/// better of the two orientations.
pub fn bipartite_2approx(instance: &Instance, side_of: &[Side]) -> Result<Solution> {
    if side_of.len() != instance.n() {
        return Err(Error::DimensionMismatch { expected: instance.n(), got: side_of.len() });
    }
    if let Some((i, (u, _))) = instance.pairs().enumerate().find(|(_, (u, v))| side_of[*u] == side_of[*v]) {
        return Err(Error::InvalidColoring(format!("edge {i} does not cross sides: both ends on {:?}", side_of[u])));
    }
    let incidence = instance.incidence();
    let best_price: Vec<Rational> = incidence
        .iter()
        .map(|edges| {
            let mut budgets: Vec<&Rational> = edges.iter().map(|&e| &instance.edges()[e].budget).collect();
            budgets.sort();
            // Budgets ascending: charging budgets[i] sells to everyone from i on.
            let mut best = (Rational::zero(), Rational::zero());
            for (i, b) in budgets.iter().enumerate() {
                let value = *b * from_u64((budgets.len() - i) as u64);
                if value > best.0 {
                    best = (value, (*b).clone());
                }
            }
            best.1
        })
        .collect();

    let mut best: Option<Solution> = None;
    for free in [Side::L, Side::R] {
        let prices = PriceAssignment(
            (0..instance.n())
                .map(|v| if side_of[v] == free { Rational::zero() } else { best_price[v].clone() })
                .collect(),
        );
        let candidate = Solution::evaluated(instance, prices, "bipartite")?;
        if best.as_ref().is_none_or(|b| candidate.revenue > b.revenue) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("two orientations tried"))
}

/// Probability that two fixed classes end up on different sides of a
/// uniformly random balanced bipartition of `k` classes.
pub fn cut_probability(k: usize) -> Result<Rational> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("cut probability needs k >= 2, got {k}")));
    }
    let k = k as i64;
    Ok(if k % 2 == 0 { ratio(k, 2 * (k - 1)) } else { ratio(k + 1, 2 * k) })
}

/// Sizes the left side may take in a balanced bipartition of `k` classes.
fn left_sizes(k: usize) -> Vec<usize> {
    if k.is_multiple_of(2) {
        vec![k / 2]
    } else {
        vec![k / 2, k / 2 + 1]
    }
}

fn binomial(n: usize, r: isize) -> Rational {
    if r < 0 || r as usize > n {
        return Rational::zero();
    }
    let r = r as usize;
    let mut acc = Rational::one();
    for i in 0..r.min(n - r) {
        acc = acc * from_u64((n - i) as u64) / from_u64((i + 1) as u64);
    }
    acc
}

/// Expected total budget of cut edges over balanced completions of a
/// partial class placement, or `None` when no completion exists.
fn conditional_cut_weight(k: usize, placed: &[Option<Side>], class_weights: &[(usize, usize, Rational)]) -> Option<Rational> {
    let left = placed.iter().filter(|s| **s == Some(Side::L)).count() as isize;
    let free = placed.iter().filter(|s| s.is_none()).count();
    let count = |free: usize, extra_left: isize| -> Rational {
        left_sizes(k)
            .into_iter()
            .map(|l| binomial(free, l as isize - left - extra_left))
            .sum()
    };
    let total = count(free, 0);
    if total.is_zero() {
        return None;
    }
    let mut expected = Rational::zero();
    for (a, b, w) in class_weights {
        let p = match (placed[*a], placed[*b]) {
            (Some(x), Some(y)) => {
                if x != y {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            (Some(s), None) | (None, Some(s)) => {
                let free_on_left = count(free - 1, 1) / &total;
                if s == Side::L {
                    Rational::one() - free_on_left
                } else {
                    free_on_left
                }
            }
            (None, None) => count(free - 2, 1) * from_u64(2) / &total,
        };
        expected += p * w;
    }
    Some(expected)
}

/// Side of every class.
pub fn choose_sides(instance: &Instance, coloring: &Coloring, mode: Mode) -> Result<Vec<Side>> {
    coloring.validate(instance)?;
    let k = coloring.k;
    if k < 2 {
        return Ok(vec![Side::L; k]);
    }
    match mode {
        Mode::Randomized(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<usize> = (0..k).collect();
            order.shuffle(&mut rng);
            let sizes = left_sizes(k);
            let l = sizes[rng.gen_range(0..sizes.len())];
            let mut sides = vec![Side::R; k];
            for &c in &order[..l] {
                sides[c] = Side::L;
            }
            Ok(sides)
        }
        Mode::Derandomized => {
            let class_weights: Vec<(usize, usize, Rational)> = instance
                .edges()
                .iter()
                .map(|e| (coloring.class_of[e.u], coloring.class_of[e.v], e.budget.clone()))
                .collect();
            let mut placed: Vec<Option<Side>> = vec![None; k];
            for c in 0..k {
                let mut best: Option<(Rational, Side)> = None;
                for side in [Side::L, Side::R] {
                    placed[c] = Some(side);
                    if let Some(value) = conditional_cut_weight(k, &placed, &class_weights) {
                        if best.as_ref().is_none_or(|(b, _)| value > *b) {
                            best = Some((value, side));
                        }
                    }
                }
                let (_, side) = best.ok_or_else(|| Error::Internal("no balanced completion".into()))?;
                placed[c] = Some(side);
            }
            Ok(placed.into_iter().map(|s| s.expect("all placed")).collect())
        }
    }
}

/// Total budget of edges whose classes lie on different sides.
pub fn cut_weight(instance: &Instance, coloring: &Coloring, sides: &[Side]) -> Rational {
    instance
        .edges()
        .iter()
        .filter(|e| sides[coloring.class_of[e.u]] != sides[coloring.class_of[e.v]])
        .map(|e| e.budget.clone())
        .sum()
}

/// Splits the classes into two balanced sides, keeps the cut edges and runs
/// [`bipartite_2approx`] on them. Revenue is evaluated on the full instance.
pub fn kpartite_approx(instance: &Instance, coloring: &Coloring, mode: Mode) -> Result<Solution> {
    let sides = choose_sides(instance, coloring, mode)?;
    let side_of: Vec<Side> = coloring.class_of.iter().map(|&c| sides[c]).collect();
    let cut = instance.filter_edges(|_, e| side_of[e.u] != side_of[e.v]);
    let partial = bipartite_2approx(&cut, &side_of)?;
    Solution::evaluated(instance, partial.prices, "kpartite")
}

/// Runs [`kpartite_approx`] with every vertex in its own class.
pub fn general_graph_approx(instance: &Instance, seed: u64) -> Result<Solution> {
    if instance.n() <= 1 {
        return Ok(Solution::zero(instance.n(), "general"));
    }
    let sol = kpartite_approx(instance, &Coloring::singletons(instance.n()), Mode::Randomized(seed))?;
    Solution::evaluated(instance, sol.prices, "general")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::oracle::brute_force_opt;
    use crate::rational::int;
    use proptest::prelude::*;

    fn sides(s: &str) -> Vec<Side> {
        s.chars().map(|c| if c == 'L' { Side::L } else { Side::R }).collect()
    }

    #[test]
    fn bipartite_examples() {
        let one = Instance::from_int_edges(2, &[(0, 1, 5)]).unwrap();
        assert_eq!(bipartite_2approx(&one, &sides("LR")).unwrap().revenue, int(5));

        let star = Instance::from_int_edges(4, &[(0, 1, 1), (0, 2, 2), (0, 3, 3)]).unwrap();
        let sol = bipartite_2approx(&star, &sides("LRRR")).unwrap();
        assert_eq!(sol.revenue, int(6));
        assert_eq!(sol.prices.as_slice(), &[int(0), int(1), int(2), int(3)]);

        // Vertex 0 sees budgets {1, 3}: charging 3 earns 3, charging 1 earns 2.
        let two = Instance::from_int_edges(3, &[(0, 1, 1), (0, 2, 3)]).unwrap();
        let sol = bipartite_2approx(&two, &sides("LRR")).unwrap();
        assert_eq!(sol.revenue, int(4));
        let sol = bipartite_2approx(&two, &sides("RLL")).unwrap();
        assert_eq!(sol.revenue, int(4));
    }

    #[test]
    fn bipartite_rejects_uncut_edges() {
        let one = Instance::from_int_edges(2, &[(0, 1, 5)]).unwrap();
        assert!(matches!(bipartite_2approx(&one, &sides("LL")), Err(Error::InvalidColoring(_))));
        assert!(matches!(bipartite_2approx(&one, &sides("L")), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cut_probability_examples() {
        assert_eq!(cut_probability(2).unwrap(), int(1));
        assert_eq!(cut_probability(4).unwrap(), ratio(2, 3));
        assert_eq!(cut_probability(3).unwrap(), ratio(2, 3));
        assert!(cut_probability(1).is_err());
    }

    /// Enumerates every balanced bipartition of `k` labeled classes.
    fn exhaustive_cut_probability(k: usize) -> Rational {
        let sizes = left_sizes(k);
        let (mut total, mut cut) = (0i64, 0i64);
        for mask in 0u32..(1 << k) {
            if sizes.contains(&(mask.count_ones() as usize)) {
                total += 1;
                if (mask & 1) != ((mask >> 1) & 1) {
                    cut += 1;
                }
            }
        }
        ratio(cut, total)
    }

    #[test]
    fn cut_probability_matches_enumeration() {
        for k in 2..=10 {
            assert_eq!(cut_probability(k).unwrap(), exhaustive_cut_probability(k), "k = {k}");
        }
    }

    #[test]
    fn unconditional_expectation_is_cut_probability_times_total() {
        let (inst, coloring) = generators::random_kpartite(9, 5, 0.7, 1, 9, 3);
        let weights: Vec<_> = inst
            .edges()
            .iter()
            .map(|e| (coloring.class_of[e.u], coloring.class_of[e.v], e.budget.clone()))
            .collect();
        let total: Rational = inst.edges().iter().map(|e| e.budget.clone()).sum();
        let expected = conditional_cut_weight(5, &[None; 5], &weights).unwrap();
        assert_eq!(expected, cut_probability(5).unwrap() * total);
    }

    #[test]
    fn kpartite_examples() {
        let path = Instance::from_int_edges(3, &[(0, 1, 1), (1, 2, 2)]).unwrap();
        let coloring = Coloring { k: 2, class_of: vec![0, 1, 0] };
        let direct = bipartite_2approx(&path, &sides("LRL")).unwrap();
        let via = kpartite_approx(&path, &coloring, Mode::Derandomized).unwrap();
        assert_eq!(via.revenue, direct.revenue);

        let triangle = generators::complete(3, 1);
        let sol = kpartite_approx(&triangle, &Coloring::singletons(3), Mode::Derandomized).unwrap();
        let oracle = brute_force_opt(&triangle, 1).unwrap().revenue;
        assert!(sol.revenue >= oracle * ratio(4, 12));

        let k4 = generators::complete(4, 1);
        let sol = kpartite_approx(&k4, &Coloring::singletons(4), Mode::Derandomized).unwrap();
        let oracle = brute_force_opt(&k4, 1).unwrap().revenue;
        assert!(sol.revenue >= oracle * ratio(4, 12));

        let bad = Coloring { k: 2, class_of: vec![0, 0, 1] };
        assert!(matches!(kpartite_approx(&path, &bad, Mode::Derandomized), Err(Error::InvalidColoring(_))));
    }

    #[test]
    fn general_examples() {
        let one = Instance::from_int_edges(2, &[(0, 1, 7)]).unwrap();
        assert_eq!(general_graph_approx(&one, 0).unwrap().revenue, int(7));
        let triangle = generators::complete(3, 1);
        let best = (0..16)
            .map(|s| general_graph_approx(&triangle, s).unwrap().revenue)
            .max()
            .unwrap();
        assert!(best * int(4) >= int(2));
        assert_eq!(general_graph_approx(&Instance::from_int_edges(1, &[]).unwrap(), 0).unwrap().revenue, int(0));
    }

    proptest! {
        #[test]
        fn bipartite_half_of_oracle(n in 2usize..8, seed in any::<u64>()) {
            let (inst, coloring) = generators::random_kpartite(n, 2, 0.6, 1, 4, seed);
            let side_of: Vec<Side> = coloring.class_of.iter().map(|&c| if c == 0 { Side::L } else { Side::R }).collect();
            let sol = bipartite_2approx(&inst, &side_of).unwrap();
            let oracle = brute_force_opt(&inst, 4).unwrap().revenue;
            prop_assert!(sol.revenue.clone() * int(2) >= oracle.clone());
            prop_assert!(sol.revenue <= oracle);
        }

        #[test]
        fn derandomized_cut_beats_mean(n in 2usize..10, k in 2usize..7, seed in any::<u64>()) {
            let (inst, coloring) = generators::random_kpartite(n, k, 0.6, 1, 9, seed);
            let sides = choose_sides(&inst, &coloring, Mode::Derandomized).unwrap();
            let total: Rational = inst.edges().iter().map(|e| e.budget.clone()).sum();
            prop_assert!(cut_weight(&inst, &coloring, &sides) >= cut_probability(k).unwrap() * total);
        }

        #[test]
        fn randomized_sides_are_balanced(k in 2usize..12, seed in any::<u64>()) {
            let inst = Instance::from_int_edges(k, &[]).unwrap();
            let sides = choose_sides(&inst, &Coloring::singletons(k), Mode::Randomized(seed)).unwrap();
            let left = sides.iter().filter(|s| **s == Side::L).count();
            prop_assert!(left_sizes(k).contains(&left));
        }

        #[test]
        fn outputs_are_feasible(n in 1usize..7, seed in any::<u64>()) {
            let inst = generators::random_graph(n, 0.6, 1, 5, seed);
            let sol = general_graph_approx(&inst, seed).unwrap();
            prop_assert_eq!(&sol.revenue, &crate::evaluate_revenue(&inst, &sol.prices).unwrap());
            prop_assert!(sol.revenue <= brute_force_opt(&inst, 5).unwrap().revenue);
        }
    }
}
