//! Exact rational linear programming.
//!
//! Two-phase tableau simplex with Bland's rule, so it always terminates.
//! Every optimal solution carries a dual vector; [`LpSolution::check_certificate`]
//! verifies primal feasibility, dual feasibility and equal objective values
//! with exact arithmetic.

use std::cell::RefCell;

use num_traits::{One, Signed, Zero};

use crate::instance::Instance;
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    /// Sparse coefficients `(variable, coefficient)`.
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug)]
pub struct Bound {
    pub lower: Rational,
    pub upper: Option<Rational>,
}

impl Default for Bound {
    fn default() -> Self {
        Bound {
            lower: Rational::zero(),
            upper: None,
        }
    }
}

/// `maximize objective · x` subject to the constraints and bounds.
#[derive(Clone, Debug)]
pub struct LpProgram {
    num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bound>,
}

impl LpProgram {
    pub fn new(num_vars: usize) -> Self {
        LpProgram {
            num_vars,
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
            bounds: vec![Bound::default(); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        debug_assert!(terms.iter().all(|(v, _)| *v < self.num_vars));
        self.constraints.push(Constraint { terms, relation, rhs });
    }

    /// Constraints followed by one row per nonzero lower bound and one per
    /// finite upper bound. Dual vectors are indexed by these rows.
    pub fn rows(&self) -> Vec<Constraint> {
        let mut rows = self.constraints.clone();
        for (var, b) in self.bounds.iter().enumerate() {
            if b.lower.is_positive() {
                rows.push(Constraint {
                    terms: vec![(var, Rational::one())],
                    relation: Relation::Ge,
                    rhs: b.lower.clone(),
                });
            }
            if let Some(hi) = &b.upper {
                rows.push(Constraint {
                    terms: vec![(var, Rational::one())],
                    relation: Relation::Le,
                    rhs: hi.clone(),
                });
            }
        }
        rows
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Rational,
    pub assignment: Vec<Rational>,
    /// One multiplier per row of [`LpProgram::rows`]; empty unless optimal.
    pub dual: Vec<Rational>,
}

impl LpSolution {
    /// Checks the optimality certificate exactly: `x` feasible, `y` dual
    /// feasible (sign conditions and `Aᵀy >= c`), and `c·x = b·y`.
    pub fn check_certificate(&self, program: &LpProgram) -> Result<(), String> {
        if self.status != LpStatus::Optimal {
            return Err(format!("status is {:?}", self.status));
        }
        let rows = program.rows();
        let x = &self.assignment;
        if x.len() != program.num_vars || self.dual.len() != rows.len() {
            return Err("dimension mismatch".into());
        }
        if let Some(i) = x.iter().position(|v| v.is_negative()) {
            return Err(format!("variable {i} is negative"));
        }
        let mut aty = vec![Rational::zero(); program.num_vars];
        let mut by = Rational::zero();
        for (i, (row, y)) in rows.iter().zip(&self.dual).enumerate() {
            let lhs: Rational = row.terms.iter().map(|(v, a)| a * &x[*v]).sum();
            let ok = match row.relation {
                Relation::Le => lhs <= row.rhs && !y.is_negative(),
                Relation::Ge => lhs >= row.rhs && !y.is_positive(),
                Relation::Eq => lhs == row.rhs,
            };
            if !ok {
                return Err(format!("row {i} violates primal or dual sign feasibility"));
            }
            for (v, a) in &row.terms {
                aty[*v] += a * y;
            }
            by += &row.rhs * y;
        }
        if let Some(j) = (0..program.num_vars).find(|&j| aty[j] < program.objective[j]) {
            return Err(format!("reduced cost of column {j} is positive"));
        }
        let cx = program.objective_value(x);
        if cx != self.value {
            return Err(format!("reported value {} differs from c·x = {cx}", self.value));
        }
        if by != cx {
            return Err(format!("duality gap: primal {cx}, dual {by}"));
        }
        Ok(())
    }
}

struct Tableau {
    /// Constraint rows over all columns.
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs `c_j - c_B B⁻¹ A_j` of the current phase.
    reduced: Vec<Rational>,
    value: Rational,
    /// Columns that may never enter the basis.
    blocked: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.a[row][col].recip();
        for v in self.a[row].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[row] *= &inv;
        let support: Vec<usize> = (0..self.a[row].len()).filter(|&j| !self.a[row][j].is_zero()).collect();
        let (pivot_row, pivot_rhs) = (self.a[row].clone(), self.rhs[row].clone());
        for i in 0..self.a.len() {
            if i == row || self.a[i][col].is_zero() {
                continue;
            }
            let factor = self.a[i][col].clone();
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                self.a[i][j] -= delta;
            }
            let delta = &factor * &pivot_rhs;
            self.rhs[i] -= delta;
        }
        if !self.reduced[col].is_zero() {
            let factor = self.reduced[col].clone();
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                self.reduced[j] -= delta;
            }
            self.value += &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Runs Bland's rule to optimality. Returns false when unbounded.
    fn optimize(&mut self) -> bool {
        loop {
            let entering = (0..self.reduced.len()).find(|&j| !self.blocked[j] && self.reduced[j].is_positive());
            let Some(col) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                let coef = &self.a[i][col];
                if !coef.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / coef;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }

    fn set_objective(&mut self, costs: &[Rational]) {
        self.reduced = costs.to_vec();
        self.value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.a[i].iter().enumerate() {
                if !a.is_zero() {
                    self.reduced[j] -= cb * a;
                }
            }
            self.value += cb * &self.rhs[i];
        }
    }
}

/// Tally of the LPs solved inside [`audited`].
#[derive(Clone, Debug, Default)]
pub struct LpAudit {
    pub solved: usize,
    pub optimal: usize,
    /// Optimal solves whose certificate did not check, with the reason.
    pub failures: Vec<String>,
}

thread_local! {
    static AUDIT: RefCell<Option<LpAudit>> = const { RefCell::new(None) };
}

/// Runs `f` and verifies the certificate of every optimal LP it solves on
/// this thread.
pub fn audited<T>(f: impl FnOnce() -> T) -> (T, LpAudit) {
    let outer = AUDIT.with(|a| a.replace(Some(LpAudit::default())));
    let out = f();
    let audit = AUDIT.with(|a| a.replace(outer)).unwrap_or_default();
    (out, audit)
}

pub fn solve_lp(program: &LpProgram) -> LpSolution {
    let solution = simplex(program);
    AUDIT.with(|a| {
        if let Some(audit) = a.borrow_mut().as_mut() {
            audit.solved += 1;
            if solution.status == LpStatus::Optimal {
                audit.optimal += 1;
                if let Err(why) = solution.check_certificate(program) {
                    audit.failures.push(why);
                }
            }
        }
    });
    solution
}

fn simplex(program: &LpProgram) -> LpSolution {
    let rows = program.rows();
    let n = program.num_vars;
    let m = rows.len();

    // Normalize every row to a nonnegative right-hand side.
    let mut negated = vec![false; m];
    let mut relations = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        negated[i] = row.rhs.is_negative();
        relations.push(match (row.relation, negated[i]) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        });
    }
    let num_slack = relations.iter().filter(|r| **r != Relation::Eq).count();
    let num_art = relations.iter().filter(|r| **r != Relation::Le).count();
    let cols = n + num_slack + num_art;

    let mut a = vec![vec![Rational::zero(); cols]; m];
    let mut rhs = Vec::with_capacity(m);
    let mut basis = vec![0; m];
    let blocked = vec![false; cols];
    let (mut next_slack, mut next_art) = (n, n + num_slack);
    for (i, row) in rows.iter().enumerate() {
        let sign = if negated[i] { -Rational::one() } else { Rational::one() };
        for (v, coef) in &row.terms {
            a[i][*v] += coef * &sign;
        }
        rhs.push(&row.rhs * &sign);
        match relations[i] {
            Relation::Le => {
                a[i][next_slack] = Rational::one();
                basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                a[i][next_slack] = -Rational::one();
                next_slack += 1;
                a[i][next_art] = Rational::one();
                basis[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                a[i][next_art] = Rational::one();
                basis[i] = next_art;
                next_art += 1;
            }
        }
    }
    let initial_basis = basis.clone();
    let is_art = |j: usize| j >= n + num_slack;

    let mut t = Tableau {
        a,
        rhs,
        basis,
        reduced: Vec::new(),
        value: Rational::zero(),
        blocked,
    };

    // Phase one: maximize minus the sum of artificials.
    if num_art > 0 {
        let costs: Vec<Rational> = (0..cols)
            .map(|j| if is_art(j) { -Rational::one() } else { Rational::zero() })
            .collect();
        t.set_objective(&costs);
        t.optimize();
        if t.value.is_negative() {
            return LpSolution {
                status: LpStatus::Infeasible,
                value: Rational::zero(),
                assignment: vec![Rational::zero(); n],
                dual: Vec::new(),
            };
        }
        // Drive zero-level artificials out; rows with no other support are
        // redundant and keep their artificial, which never moves again.
        for i in 0..m {
            if is_art(t.basis[i]) {
                if let Some(j) = (0..n + num_slack).find(|&j| !t.a[i][j].is_zero()) {
                    t.pivot(i, j);
                }
            }
        }
        for j in n + num_slack..cols {
            t.blocked[j] = true;
        }
    }

    let mut costs = vec![Rational::zero(); cols];
    costs[..n].clone_from_slice(&program.objective);
    t.set_objective(&costs);
    if !t.optimize() {
        return LpSolution {
            status: LpStatus::Unbounded,
            value: Rational::zero(),
            assignment: vec![Rational::zero(); n],
            dual: Vec::new(),
        };
    }

    let mut assignment = vec![Rational::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            assignment[b] = t.rhs[i].clone();
        }
    }
    // y = c_B B⁻¹; column r of B⁻¹ is the current column of row r's initial
    // basic variable.
    let dual = (0..m)
        .map(|r| {
            let col = initial_basis[r];
            let y: Rational = t
                .basis
                .iter()
                .enumerate()
                .filter(|(i, &b)| !costs[b].is_zero() && !t.a[*i][col].is_zero())
                .map(|(i, &b)| &costs[b] * &t.a[i][col])
                .sum();
            if negated[r] {
                -y
            } else {
                y
            }
        })
        .collect();
    let value = program.objective_value(&assignment);
    LpSolution {
        status: LpStatus::Optimal,
        value,
        assignment,
        dual,
    }
}

/// The pricing LP in which every edge is required to pay: maximize
/// `Σ_e p(u)+p(v)` subject to `p(u)+p(v) <= B_e` and `p >= 0`.
pub fn lp_opt_program(instance: &Instance) -> LpProgram {
    let mut program = LpProgram::new(instance.n());
    for e in instance.edges() {
        program.objective[e.u] += rational::int(1);
        program.objective[e.v] += rational::int(1);
        program.add_constraint(
            vec![(e.u, Rational::one()), (e.v, Rational::one())],
            Relation::Le,
            e.budget.clone(),
        );
    }
    program
}

pub fn lp_opt(instance: &Instance) -> LpSolution {
    solve_lp(&lp_opt_program(instance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn one() -> Rational {
        Rational::one()
    }

    #[test]
    fn simple_bound() {
        let mut p = LpProgram::new(1);
        p.objective[0] = one();
        p.add_constraint(vec![(0, one())], Relation::Le, int(3));
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, int(3));
        s.check_certificate(&p).unwrap();
    }

    #[test]
    fn degenerate_face() {
        let mut p = LpProgram::new(2);
        p.objective = vec![one(), one()];
        p.add_constraint(vec![(0, one()), (1, one())], Relation::Le, int(1));
        let s = solve_lp(&p);
        assert_eq!(s.value, int(1));
        s.check_certificate(&p).unwrap();
    }

    #[test]
    fn path_pricing_lp() {
        let mut p = LpProgram::new(3);
        p.objective = vec![int(1), int(2), int(1)];
        p.add_constraint(vec![(0, one()), (1, one())], Relation::Le, int(1));
        p.add_constraint(vec![(1, one()), (2, one())], Relation::Le, int(1));
        let s = solve_lp(&p);
        assert_eq!(s.value, int(2));
        s.check_certificate(&p).unwrap();
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LpProgram::new(1);
        p.add_constraint(vec![(0, one())], Relation::Ge, int(2));
        p.add_constraint(vec![(0, one())], Relation::Le, int(1));
        assert_eq!(solve_lp(&p).status, LpStatus::Infeasible);

        let mut q = LpProgram::new(2);
        q.objective = vec![one(), Rational::zero()];
        q.add_constraint(vec![(0, one()), (1, -one())], Relation::Le, int(1));
        assert_eq!(solve_lp(&q).status, LpStatus::Unbounded);
    }

    #[test]
    fn equalities_bounds_and_negative_rhs() {
        // max x - y  s.t. x + y = 3, x - y >= -1, 1/2 <= x <= 2
        let mut p = LpProgram::new(2);
        p.objective = vec![one(), -one()];
        p.add_constraint(vec![(0, one()), (1, one())], Relation::Eq, int(3));
        p.add_constraint(vec![(0, one()), (1, -one())], Relation::Ge, int(-1));
        p.bounds[0] = Bound {
            lower: ratio(1, 2),
            upper: Some(int(2)),
        };
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, int(1));
        assert_eq!(s.assignment, vec![int(2), int(1)]);
        s.check_certificate(&p).unwrap();
    }

    #[test]
    fn redundant_equalities() {
        // x + y = 1 stated twice plus its double.
        let mut p = LpProgram::new(2);
        p.objective = vec![int(2), int(1)];
        for k in [1, 1, 2] {
            p.add_constraint(vec![(0, int(k)), (1, int(k))], Relation::Eq, int(k));
        }
        let s = solve_lp(&p);
        assert_eq!(s.value, int(2));
        s.check_certificate(&p).unwrap();
    }

    #[test]
    fn pricing_lp_examples() {
        let one = Instance::from_int_edges(2, &[(0, 1, 7)]).unwrap();
        assert_eq!(lp_opt(&one).value, int(7));
        let tri = Instance::from_int_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let s = lp_opt(&tri);
        assert_eq!(s.value, int(3));
        assert_eq!(s.assignment, vec![ratio(1, 2); 3]);
        let path = Instance::from_int_edges(4, &[(0, 1, 3), (1, 2, 1), (2, 3, 3)]).unwrap();
        let s = lp_opt(&path);
        assert_eq!(s.value, int(7));
        s.check_certificate(&lp_opt_program(&path)).unwrap();
    }

    proptest! {
        #[test]
        fn random_programs_certify(
            raw in prop::collection::vec((prop::collection::vec(-3i64..4, 3), 0usize..3, -4i64..6), 1..6),
            obj in prop::collection::vec(-2i64..4, 3),
        ) {
            let mut p = LpProgram::new(3);
            p.objective = obj.iter().map(|&c| int(c)).collect();
            for (coefs, rel, rhs) in raw {
                let relation = [Relation::Le, Relation::Eq, Relation::Ge][rel];
                let terms = coefs.iter().enumerate().map(|(j, &c)| (j, int(c))).collect();
                p.add_constraint(terms, relation, int(rhs));
            }
            for j in 0..3 {
                p.bounds[j].upper = Some(int(5));
            }
            let s = solve_lp(&p);
            if s.status == LpStatus::Optimal {
                prop_assert_eq!(s.check_certificate(&p), Ok(()));
            } else {
                prop_assert_eq!(s.status, LpStatus::Infeasible);
            }
        }
    }
}
