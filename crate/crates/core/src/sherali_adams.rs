//! The level-r lifted pricing LP, its tree-decomposition rounding and an
//! integrality-gap report.
//!
//! A variable `y(S, α)` exists for every vertex set `S` with `|S| ≤ r` and
//! every price vector `α ∈ {0..P}^S`; it stands for the probability that the
//! prices on `S` are exactly `α`. Consistency is imposed by the one-vertex
//! marginalization `y(S, α) = Σ_i y(S + v, α + (v ↦ i))`, which chains to
//! every larger extension.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Instance, PriceAssignment, Solution};
use crate::lp::{solve_lp, LpProgram, LpSolution, LpStatus, Relation};
use crate::oracle::brute_force_opt;
use crate::rational::{from_u64, Rational};
use crate::treewidth::{build_decomposition, validate_decomposition, TreeDecomposition};

/// A set of vertices with a price for each.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AssignmentKey {
    /// Sorted vertices.
    pub set: Vec<usize>,
    /// `alpha[i]` is the price of `set[i]`.
    pub alpha: Vec<u64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SaOptions {
    /// Largest number of LP variables a model may have.
    pub max_variables: usize,
}

impl Default for SaOptions {
    fn default() -> Self {
        SaOptions { max_variables: 4096 }
    }
}

#[derive(Clone, Debug)]
pub struct LpRModel {
    pub r: usize,
    pub price_cap: u64,
    sets: Vec<Vec<usize>>,
    offsets: HashMap<Vec<usize>, usize>,
    pub program: LpProgram,
}

/// Position of `alpha` in the lexicographic order of `{0..=cap}^len`.
fn encode(alpha: &[u64], cap: u64) -> usize {
    alpha.iter().fold(0usize, |acc, &a| acc * (cap as usize + 1) + a as usize)
}

fn decode(mut index: usize, cap: u64, len: usize) -> Vec<u64> {
    let base = cap as usize + 1;
    let mut alpha = vec![0u64; len];
    for slot in alpha.iter_mut().rev() {
        *slot = (index % base) as u64;
        index /= base;
    }
    alpha
}

fn pow(base: u64, exp: usize) -> usize {
    (base as usize).pow(exp as u32)
}

/// All subsets of `0..n` with at most `r` elements, by size then
/// lexicographically.
fn small_subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..r.min(n) {
        let mut next = Vec::new();
        for s in &layer {
            let from = s.last().map_or(0, |&v| v + 1);
            for v in from..n {
                let mut t: Vec<usize> = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn variable_count(n: usize, r: usize, cap: u64) -> u128 {
    let mut total = 0u128;
    let mut choose = 1u128;
    for s in 0..=r.min(n) {
        total = total.saturating_add(choose.saturating_mul((cap as u128 + 1).saturating_pow(s as u32)));
        choose = choose * (n - s) as u128 / (s as u128 + 1);
    }
    total
}

impl LpRModel {
    pub fn num_vars(&self) -> usize {
        self.program.num_vars()
    }

    pub fn index(&self, set: &[usize], alpha: &[u64]) -> Option<usize> {
        if set.len() != alpha.len() || alpha.iter().any(|&a| a > self.price_cap) {
            return None;
        }
        self.offsets.get(set).map(|o| o + encode(alpha, self.price_cap))
    }

    pub fn key(&self, index: usize) -> AssignmentKey {
        let pos = self
            .sets
            .partition_point(|s| self.offsets[s] <= index)
            .checked_sub(1)
            .expect("index in range");
        let set = self.sets[pos].clone();
        let alpha = decode(index - self.offsets[&set], self.price_cap, set.len());
        AssignmentKey { set, alpha }
    }

    pub fn keys(&self) -> impl Iterator<Item = AssignmentKey> + '_ {
        (0..self.num_vars()).map(|i| self.key(i))
    }

    /// The values `y(set, ·)` in lexicographic order of the assignment.
    pub fn distribution<'a>(&self, y: &'a [Rational], set: &[usize]) -> Option<&'a [Rational]> {
        let offset = *self.offsets.get(set)?;
        Some(&y[offset..offset + pow(self.price_cap + 1, set.len())])
    }

    /// The point that puts weight `w` on every integral price vector `p` of
    /// the list: `y(S, α)` is the total weight of vectors agreeing with `α`
    /// on `S`.
    pub fn point_from_distribution(&self, dist: &[(Rational, Vec<u64>)]) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.num_vars()];
        for (weight, prices) in dist {
            for set in &self.sets {
                let alpha: Vec<u64> = set.iter().map(|&v| prices[v]).collect();
                y[self.offsets[set] + encode(&alpha, self.price_cap)] += weight;
            }
        }
        y
    }

    /// Checks that for every set `S′` in the model and every subset `S` of
    /// it, summing `y(S′, ·)` over the coordinates outside `S` gives
    /// `y(S, ·)`.
    pub fn check_marginals(&self, y: &[Rational]) -> std::result::Result<(), String> {
        for big in &self.sets {
            let full = self.distribution(y, big).expect("model set");
            for mask in 0u32..(1 << big.len()) {
                let keep: Vec<usize> = (0..big.len()).filter(|i| mask >> i & 1 == 1).collect();
                let small: Vec<usize> = keep.iter().map(|&i| big[i]).collect();
                let mut summed = vec![Rational::zero(); pow(self.price_cap + 1, small.len())];
                for (index, value) in full.iter().enumerate() {
                    let alpha = decode(index, self.price_cap, big.len());
                    let sub: Vec<u64> = keep.iter().map(|&i| alpha[i]).collect();
                    summed[encode(&sub, self.price_cap)] += value;
                }
                if summed.as_slice() != self.distribution(y, &small).expect("subset in model") {
                    return Err(format!("marginal of {big:?} onto {small:?} disagrees"));
                }
            }
        }
        Ok(())
    }
}

pub fn build_lp_r(instance: &Instance, r: usize, price_cap: u64) -> Result<LpRModel> {
    build_lp_r_with(instance, r, price_cap, SaOptions::default())
}

pub fn build_lp_r_with(instance: &Instance, r: usize, price_cap: u64, options: SaOptions) -> Result<LpRModel> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!("level r must be at least 2, got {r}")));
    }
    if price_cap == 0 {
        return Err(Error::InvalidParameter("price cap must be positive".into()));
    }
    let budgets = instance.integral_budgets(price_cap)?;
    let count = variable_count(instance.n(), r, price_cap);
    if count > options.max_variables as u128 {
        return Err(Error::SizeCap(format!(
            "level-{r} LP needs {count} variables, limit is {}",
            options.max_variables
        )));
    }
    let n = instance.n();
    let sets = small_subsets(n, r);
    let mut offsets = HashMap::new();
    let mut next = 0usize;
    for s in &sets {
        offsets.insert(s.clone(), next);
        next += pow(price_cap + 1, s.len());
    }
    let mut program = LpProgram::new(next);
    let one = Rational::one();
    program.add_constraint(vec![(0, one.clone())], Relation::Eq, one.clone());
    for s in sets.iter().filter(|s| s.len() < r) {
        let width = pow(price_cap + 1, s.len());
        for v in (0..n).filter(|v| s.binary_search(v).is_err()) {
            let mut bigger = s.clone();
            let at = bigger.binary_search(&v).unwrap_err();
            bigger.insert(at, v);
            let base = offsets[&bigger];
            for a in 0..width {
                let alpha = decode(a, price_cap, s.len());
                let mut terms = vec![(offsets[s] + a, one.clone())];
                for i in 0..=price_cap {
                    let mut extended = alpha.clone();
                    extended.insert(at, i);
                    terms.push((base + encode(&extended, price_cap), -one.clone()));
                }
                program.add_constraint(terms, Relation::Eq, Rational::zero());
            }
        }
    }
    for (e, budget) in instance.edges().iter().zip(budgets) {
        let (u, v) = (e.u.min(e.v), e.u.max(e.v));
        let base = offsets[&vec![u, v]];
        for pu in 0..=price_cap {
            for pv in 0..=price_cap {
                if pu + pv <= budget {
                    program.objective[base + encode(&[pu, pv], price_cap)] += from_u64(pu + pv);
                }
            }
        }
    }
    Ok(LpRModel { r, price_cap, sets, offsets, program })
}

pub fn solve_lp_r(model: &LpRModel) -> Result<LpSolution> {
    let sol = solve_lp(&model.program);
    if sol.status != LpStatus::Optimal {
        return Err(Error::LpNotOptimal(format!("level-{} LP is {:?}", model.r, sol.status)));
    }
    Ok(sol)
}

/// The unlifted relaxation: `x(v, i)` per vertex and price, and `z(u, v, i, j)`
/// per edge pair and price pair, with `z ≥ x(u, i) + x(v, j) − 1`.
#[derive(Clone, Debug)]
pub struct BaseLpModel {
    pub price_cap: u64,
    /// Distinct `(u, v)` pairs with `u < v` that carry `z` variables.
    pub pairs: Vec<(usize, usize)>,
    pub program: LpProgram,
}

impl BaseLpModel {
    pub fn x(&self, v: usize, i: u64) -> usize {
        v * (self.price_cap as usize + 1) + i as usize
    }

    pub fn z(&self, pair: usize, i: u64, j: u64) -> usize {
        let base = self.price_cap as usize + 1;
        let n_x = self.program.num_vars() - self.pairs.len() * base * base;
        n_x + pair * base * base + i as usize * base + j as usize
    }
}

pub fn build_base_lp(instance: &Instance, price_cap: u64) -> Result<BaseLpModel> {
    build_base_lp_with(instance, price_cap, SaOptions::default())
}

pub fn build_base_lp_with(instance: &Instance, price_cap: u64, options: SaOptions) -> Result<BaseLpModel> {
    if price_cap == 0 {
        return Err(Error::InvalidParameter("price cap must be positive".into()));
    }
    let budgets = instance.integral_budgets(price_cap)?;
    let mut pairs: Vec<(usize, usize)> = instance.pairs().map(|(u, v)| (u.min(v), u.max(v))).collect();
    pairs.sort_unstable();
    pairs.dedup();
    let base = price_cap as usize + 1;
    let count = instance.n() as u128 * base as u128 + pairs.len() as u128 * (base * base) as u128;
    if count > options.max_variables as u128 {
        return Err(Error::SizeCap(format!(
            "base LP needs {count} variables, limit is {}",
            options.max_variables
        )));
    }
    let mut model = BaseLpModel {
        price_cap,
        pairs: pairs.clone(),
        program: LpProgram::new(count as usize),
    };
    let one = Rational::one();
    let mut rows = Vec::new();
    for v in 0..instance.n() {
        let terms = (0..=price_cap).map(|i| (model.x(v, i), one.clone())).collect();
        rows.push((terms, Relation::Eq, one.clone()));
    }
    for (p, &(u, v)) in pairs.iter().enumerate() {
        let mut sum = Vec::new();
        for i in 0..=price_cap {
            for j in 0..=price_cap {
                sum.push((model.z(p, i, j), one.clone()));
                let terms = vec![
                    (model.z(p, i, j), one.clone()),
                    (model.x(u, i), -one.clone()),
                    (model.x(v, j), -one.clone()),
                ];
                rows.push((terms, Relation::Ge, -one.clone()));
            }
        }
        rows.push((sum, Relation::Eq, one.clone()));
    }
    for (terms, relation, rhs) in rows {
        model.program.add_constraint(terms, relation, rhs);
    }
    for (e, budget) in instance.edges().iter().zip(budgets) {
        let p = pairs.binary_search(&(e.u.min(e.v), e.u.max(e.v))).expect("edge pair");
        let (iu, iv) = if e.u < e.v { (0, 1) } else { (1, 0) };
        for a in 0..=price_cap {
            for b in 0..=price_cap {
                let prices = [a, b];
                if a + b <= budget {
                    let var = model.z(p, prices[iu], prices[iv]);
                    model.program.objective[var] += from_u64(a + b);
                }
            }
        }
    }
    Ok(model)
}

/// Picks an index among `weights` (which sum to `total > 0`).
trait Chooser {
    fn choose(&mut self, weights: &[Rational], total: &Rational) -> usize;
}

struct FirstSupport;

impl Chooser for FirstSupport {
    fn choose(&mut self, weights: &[Rational], _: &Rational) -> usize {
        weights.iter().position(|w| w.is_positive()).expect("positive total")
    }
}

struct Sampler(ChaCha8Rng);

impl Chooser for Sampler {
    /// Draws `u` uniform in `[0, 1)` with 64 bits and returns the first index
    /// whose cumulative weight exceeds `u · total`. Zero-weight entries are
    /// never returned.
    fn choose(&mut self, weights: &[Rational], total: &Rational) -> usize {
        let u = Rational::new(self.0.gen::<u64>().into(), (num_bigint::BigInt::one() << 64u32).clone());
        let target = u * total;
        let mut acc = Rational::zero();
        let mut last = 0;
        for (i, w) in weights.iter().enumerate() {
            if !w.is_positive() {
                continue;
            }
            acc += w;
            last = i;
            if acc > target {
                return i;
            }
        }
        last
    }
}

fn round(
    instance: &Instance,
    td: &TreeDecomposition,
    model: &LpRModel,
    y: &[Rational],
    chooser: &mut dyn Chooser,
    algorithm: &str,
) -> Result<Solution> {
    if y.len() != model.num_vars() {
        return Err(Error::DimensionMismatch { expected: model.num_vars(), got: y.len() });
    }
    validate_decomposition(instance, td).map_err(Error::InvalidDecomposition)?;
    if td.width() + 1 > model.r && !td.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "rounding needs r >= width + 1, got r = {} and width {}",
            model.r,
            td.width()
        )));
    }
    let cap = model.price_cap;
    let mut prices: Vec<Option<u64>> = vec![None; instance.n()];
    for t in td.top_down() {
        let bag = &td.bags()[t];
        let weights = model
            .distribution(y, bag)
            .ok_or_else(|| Error::Internal(format!("bag {bag:?} has no variables")))?;
        // Entries consistent with the prices already fixed by the parent.
        let fixed: Vec<(usize, u64)> = bag
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| prices[v].map(|p| (i, p)))
            .collect();
        let masked: Vec<Rational> = weights
            .iter()
            .enumerate()
            .map(|(index, w)| {
                let alpha = decode(index, cap, bag.len());
                if fixed.iter().all(|&(i, p)| alpha[i] == p) {
                    w.clone()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        let total: Rational = masked.iter().sum();
        if !total.is_positive() {
            return Err(Error::Internal(format!("bag {bag:?} has no mass on the sampled branch")));
        }
        let alpha = decode(chooser.choose(&masked, &total), cap, bag.len());
        for (&v, p) in bag.iter().zip(alpha) {
            prices[v] = Some(p);
        }
    }
    let prices: Vec<u64> = prices.into_iter().map(|p| p.unwrap_or(0)).collect();
    Solution::evaluated(instance, PriceAssignment::from_ints(&prices), algorithm)
}

/// Samples prices bag by bag from the root down, each bag conditioned on
/// the vertices it shares with its parent.
pub fn sa_round(
    instance: &Instance,
    td: &TreeDecomposition,
    model: &LpRModel,
    solution: &LpSolution,
    seed: u64,
) -> Result<Solution> {
    let mut sampler = Sampler(ChaCha8Rng::seed_from_u64(seed));
    round(instance, td, model, &solution.assignment, &mut sampler, "sa-round")
}

/// As [`sa_round`], always taking the lexicographically first assignment
/// with positive weight.
pub fn sa_round_deterministic(
    instance: &Instance,
    td: &TreeDecomposition,
    model: &LpRModel,
    solution: &LpSolution,
) -> Result<Solution> {
    round(instance, td, model, &solution.assignment, &mut FirstSupport, "sa")
}

/// Builds a decomposition of width at most `max_width`, solves the LP at
/// level `width + 1` (at least 2) and rounds deterministically.
pub fn sa_solve(instance: &Instance, price_cap: u64, max_width: usize) -> Result<Solution> {
    let td = build_decomposition(instance, max_width)?;
    let model = build_lp_r(instance, (td.width() + 1).max(2), price_cap)?;
    let solution = solve_lp_r(&model)?;
    sa_round_deterministic(instance, &td, &model, &solution)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapRow {
    pub r: usize,
    pub lp_value: Rational,
    pub integral_opt: Rational,
    /// `lp_value / integral_opt`; `None` when the optimum is zero.
    pub gap: Option<Rational>,
}

pub fn gap_report(instance: &Instance, r_values: &[usize], price_cap: u64) -> Result<Vec<GapRow>> {
    let integral_opt = brute_force_opt(instance, price_cap)?.revenue;
    r_values
        .iter()
        .map(|&r| {
            let model = build_lp_r(instance, r, price_cap)?;
            let lp_value = solve_lp_r(&model)?.value;
            let gap = (!integral_opt.is_zero()).then(|| &lp_value / &integral_opt);
            Ok(GapRow { r, lp_value, integral_opt: integral_opt.clone(), gap })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::rational::{int, ratio};
    use crate::treewidth::dp_solve;
    use proptest::prelude::*;

    fn edge(b: i64) -> Instance {
        Instance::from_int_edges(2, &[(0, 1, b)]).unwrap()
    }

    fn lp_value(instance: &Instance, r: usize, cap: u64) -> Rational {
        solve_lp_r(&build_lp_r(instance, r, cap).unwrap()).unwrap().value
    }

    #[test]
    fn model_sizes() {
        let model = build_lp_r(&edge(1), 2, 1).unwrap();
        assert_eq!(model.num_vars(), 9);
        assert_eq!(model.num_vars() as u128, variable_count(2, 2, 1));
        let lone = build_lp_r(&Instance::from_int_edges(1, &[]).unwrap(), 2, 1).unwrap();
        assert_eq!(lone.num_vars(), 3);
        assert_eq!(solve_lp_r(&lone).unwrap().value, int(0));
        for n in 0..6 {
            for r in 2..5 {
                assert_eq!(small_subsets(n, r).len() as u128, variable_count(n, r, 0));
            }
        }
        let big = generators::complete(6, 1);
        assert!(matches!(
            build_lp_r_with(&big, 4, 3, SaOptions { max_variables: 100 }),
            Err(Error::SizeCap(_))
        ));
        assert!(build_lp_r(&edge(1), 1, 1).is_err());
        assert!(matches!(build_lp_r(&edge(3), 2, 2), Err(Error::BudgetExceedsCap { .. })));
    }

    #[test]
    fn keys_round_trip() {
        let model = build_lp_r(&generators::complete(4, 1), 3, 2).unwrap();
        let mut previous: Option<AssignmentKey> = None;
        for (i, key) in model.keys().enumerate() {
            assert_eq!(model.index(&key.set, &key.alpha), Some(i));
            if let Some(p) = &previous {
                assert!(p.set.len() < key.set.len() || p < &key);
            }
            previous = Some(key);
        }
        assert_eq!(model.index(&[0], &[3]), None);
    }

    #[test]
    fn level_two_examples() {
        assert_eq!(lp_value(&edge(2), 2, 2), int(2));
        let path = Instance::from_int_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(lp_value(&path, 2, 1), int(2));
    }

    #[test]
    fn rounding_examples() {
        let inst = edge(2);
        let model = build_lp_r(&inst, 2, 2).unwrap();
        let sol = solve_lp_r(&model).unwrap();
        let td = TreeDecomposition::path(vec![vec![0, 1]]);
        for seed in 0..20 {
            assert_eq!(sa_round(&inst, &td, &model, &sol, seed).unwrap().revenue, int(2));
        }
        assert_eq!(sa_round_deterministic(&inst, &td, &model, &sol).unwrap().revenue, int(2));

        let star = Instance::from_int_edges(4, &[(0, 1, 1), (0, 2, 2), (0, 3, 3)]).unwrap();
        let model = build_lp_r(&star, 2, 3).unwrap();
        let sol = solve_lp_r(&model).unwrap();
        assert_eq!(sol.value, int(6));
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![0, 2], vec![0, 3]], vec![None, Some(0), Some(0)]);
        assert_eq!(sa_round_deterministic(&star, &td, &model, &sol).unwrap().revenue, int(6));
        assert_eq!(dp_solve(&star, &td, 3).unwrap().revenue, int(6));

        let tri = generators::complete(3, 1);
        let model = build_lp_r(&tri, 3, 1).unwrap();
        let sol = solve_lp_r(&model).unwrap();
        let td = TreeDecomposition::path(vec![vec![0, 1, 2]]);
        assert_eq!(sol.value, int(2));
        assert_eq!(sa_round_deterministic(&tri, &td, &model, &sol).unwrap().revenue, int(2));

        let model2 = build_lp_r(&tri, 2, 1).unwrap();
        let sol2 = solve_lp_r(&model2).unwrap();
        assert!(matches!(
            sa_round_deterministic(&tri, &td, &model2, &sol2),
            Err(Error::InvalidParameter(_))
        ));

        let empty = Instance::from_int_edges(3, &[]).unwrap();
        let model = build_lp_r(&empty, 2, 1).unwrap();
        let sol = solve_lp_r(&model).unwrap();
        let td = TreeDecomposition::path(vec![vec![0], vec![1], vec![2]]);
        assert_eq!(sa_round(&empty, &td, &model, &sol, 9).unwrap().revenue, int(0));
    }

    #[test]
    fn rounding_follows_a_mixture() {
        let path = Instance::from_int_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let model = build_lp_r(&path, 2, 1).unwrap();
        let y = model.point_from_distribution(&[(ratio(1, 3), vec![0, 1, 0]), (ratio(2, 3), vec![1, 0, 1])]);
        model.check_marginals(&y).unwrap();
        assert_eq!(model.program.objective_value(&y), int(2));
        let solution = LpSolution { status: LpStatus::Optimal, value: int(2), assignment: y, dual: Vec::new() };
        let td = TreeDecomposition::path(vec![vec![0, 1], vec![1, 2]]);
        let mut middle = 0;
        for seed in 0..600 {
            let sol = sa_round(&path, &td, &model, &solution, seed).unwrap();
            assert_eq!(sol.revenue, int(2));
            if sol.prices[1] == int(1) {
                middle += 1;
            }
        }
        // 600 draws of a 1/3 coin: mean 200, standard deviation about 11.5.
        assert!((165..=235).contains(&middle), "{middle}");
        assert_eq!(sa_round(&path, &td, &model, &solution, 5).unwrap(), sa_round(&path, &td, &model, &solution, 5).unwrap());
    }

    #[test]
    fn base_lp_examples() {
        let value = |inst: &Instance, cap| {
            let model = build_base_lp(inst, cap).unwrap();
            let sol = solve_lp(&model.program);
            assert_eq!(sol.status, LpStatus::Optimal);
            sol.check_certificate(&model.program).unwrap();
            sol.value
        };
        assert!(value(&edge(1), 1) >= int(1));
        assert!(value(&generators::complete(3, 1), 1) >= int(2));
        assert_eq!(value(&Instance::from_int_edges(2, &[]).unwrap(), 1), int(0));
    }

    #[test]
    fn gap_examples() {
        let rows = gap_report(&edge(2), &[2], 2).unwrap();
        assert_eq!(rows[0].gap, Some(int(1)));
        let rows = gap_report(&generators::complete(3, 1), &[2, 3], 1).unwrap();
        assert_eq!(rows[1].gap, Some(int(1)));
        assert!(rows[0].lp_value >= rows[1].lp_value);
        let square = generators::cycle(&[int(1), int(1), int(1), int(1)]);
        let rows = gap_report(&square, &[2, 3], 1).unwrap();
        assert_eq!(rows[1].gap, Some(int(1)));
        assert_eq!(sa_solve(&square, 1, 3).unwrap().revenue, int(4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn lp_r_relaxes_and_tightens(n in 2usize..5, seed in any::<u64>()) {
            let inst = generators::random_graph(n, 0.7, 0, 2, seed);
            let oracle = brute_force_opt(&inst, 2).unwrap().revenue;
            let m2 = build_lp_r(&inst, 2, 2).unwrap();
            let s2 = solve_lp_r(&m2).unwrap();
            s2.check_certificate(&m2.program).unwrap();
            m2.check_marginals(&s2.assignment).unwrap();
            prop_assert!(s2.assignment.iter().all(|v| *v <= int(1)));
            let m3 = build_lp_r(&inst, 3, 2).unwrap();
            let s3 = solve_lp_r(&m3).unwrap();
            m3.check_marginals(&s3.assignment).unwrap();
            prop_assert!(s2.value >= s3.value);
            prop_assert!(s3.value >= oracle);
            let base = solve_lp(&build_base_lp(&inst, 2).unwrap().program);
            prop_assert!(base.value >= s2.value);
        }

        #[test]
        fn rounding_is_exact_on_trees(n in 2usize..6, seed in any::<u64>()) {
            let inst = generators::random_tree(n, 0, 2, seed);
            let td = build_decomposition(&inst, 1).unwrap();
            let model = build_lp_r(&inst, 2, 2).unwrap();
            let sol = solve_lp_r(&model).unwrap();
            let oracle = brute_force_opt(&inst, 2).unwrap().revenue;
            prop_assert_eq!(&sol.value, &oracle);
            for s in 0..4 {
                prop_assert_eq!(&sa_round(&inst, &td, &model, &sol, seed ^ s).unwrap().revenue, &oracle);
            }
        }
    }
}
