//! Exact rational linear programming.
//!
//! Two-phase primal simplex on a dense tableau with Bland's rule for both the
//! entering and the leaving variable, so every run terminates, degenerate
//! instances included. Variables are free; whenever the system contains a plain
//! sign bound `c·x_k ≥ 0` (`c > 0`) the variable is kept nonnegative directly and
//! the bound row is dropped, otherwise it is split into `x⁺ - x⁻`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::affine::{check_arity, AffineFunc, ArityMismatch, Point};
use crate::rational::Rational;

/// Relation of a constraint `func(x) ⋈ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

impl Relation {
    pub fn holds(self, value: &Rational) -> bool {
        match self {
            Relation::Ge => !value.is_negative(),
            Relation::Le => !value.is_positive(),
            Relation::Eq => value.is_zero(),
        }
    }

    fn flipped(self) -> Relation {
        match self {
            Relation::Ge => Relation::Le,
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub func: AffineFunc,
    pub relation: Relation,
}

impl Constraint {
    pub fn new(func: AffineFunc, relation: Relation) -> Self {
        Constraint { func, relation }
    }

    pub fn ge(func: AffineFunc) -> Self {
        Self::new(func, Relation::Ge)
    }

    pub fn le(func: AffineFunc) -> Self {
        Self::new(func, Relation::Le)
    }

    pub fn satisfied_by(&self, x: &Point) -> Result<bool, ArityMismatch> {
        Ok(self.relation.holds(&self.func.eval(x)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: AffineFunc,
    pub sense: Sense,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(objective: AffineFunc, sense: Sense, constraints: Vec<Constraint>) -> Result<Self, ArityMismatch> {
        let n = objective.arity();
        for c in &constraints {
            check_arity(n, c.func.arity())?;
        }
        Ok(LinearProgram { objective, sense, constraints })
    }

    pub fn minimize(objective: AffineFunc, constraints: Vec<Constraint>) -> Result<Self, ArityMismatch> {
        Self::new(objective, Sense::Minimize, constraints)
    }

    pub fn maximize(objective: AffineFunc, constraints: Vec<Constraint>) -> Result<Self, ArityMismatch> {
        Self::new(objective, Sense::Maximize, constraints)
    }

    pub fn arity(&self) -> usize {
        self.objective.arity()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// `witness` satisfies every constraint and `objective(witness) == optimum`.
    Optimal {
        optimum: Rational,
        witness: Point,
    },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimum(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { optimum, .. } => Some(optimum),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&Point> {
        match self {
            LpOutcome::Optimal { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible)
    }
}

/// Solves `lp` exactly. Deterministic for identical input.
pub fn solve(lp: &LinearProgram) -> LpOutcome {
    let Some(mut tableau) = Tableau::build(lp.arity(), &lp.constraints) else {
        return LpOutcome::Infeasible;
    };
    if !tableau.phase_one() {
        return LpOutcome::Infeasible;
    }
    let objective = match lp.sense {
        Sense::Minimize => lp.objective.clone(),
        Sense::Maximize => lp.objective.neg(),
    };
    if !tableau.phase_two(&objective) {
        return LpOutcome::Unbounded;
    }
    let witness = tableau.primal_point();
    let optimum = lp.objective.eval_unchecked(witness.coords());
    LpOutcome::Optimal { optimum, witness }
}

/// True iff the system has a rational solution. Constraints must share one arity.
pub fn is_feasible(constraints: &[Constraint]) -> bool {
    let n = constraints.first().map_or(0, |c| c.func.arity());
    debug_assert!(constraints.iter().all(|c| c.func.arity() == n));
    match Tableau::build(n, constraints) {
        Some(mut t) => t.phase_one(),
        None => false,
    }
}

/// How an original variable maps onto tableau columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    NonNeg(usize),
    Split(usize, usize),
}

struct Tableau {
    vars: Vec<VarMap>,
    /// Rows `[a_1 … a_cols | rhs]`, kept in canonical form w.r.t. `basis`.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
    /// Columns at or beyond this index are artificial.
    first_artificial: usize,
}

impl Tableau {
    /// Returns `None` when a constant constraint is already violated.
    fn build(n: usize, constraints: &[Constraint]) -> Option<Tableau> {
        let mut nonneg = vec![false; n];
        let mut kept: Vec<&Constraint> = Vec::with_capacity(constraints.len());
        for c in constraints {
            if c.func.is_constant() {
                if !c.relation.holds(c.func.bias()) {
                    return None;
                }
                continue;
            }
            if let Some(k) = sign_bound(c) {
                nonneg[k] = true;
                continue;
            }
            kept.push(c);
        }

        let mut vars = Vec::with_capacity(n);
        let mut cols = 0;
        for &nn in &nonneg {
            if nn {
                vars.push(VarMap::NonNeg(cols));
                cols += 1;
            } else {
                vars.push(VarMap::Split(cols, cols + 1));
                cols += 2;
            }
        }

        // Normalise to rhs ≥ 0: a·x ⋈ -b.
        let mut normalized: Vec<(Vec<Rational>, Relation, Rational)> = Vec::with_capacity(kept.len());
        for c in kept {
            let mut coeffs = c.func.coeffs().to_vec();
            let mut rhs = -c.func.bias();
            let mut rel = c.relation;
            if rhs.is_negative() {
                coeffs.iter_mut().for_each(|a| *a = -&*a);
                rhs = -rhs;
                rel = rel.flipped();
            }
            normalized.push((coeffs, rel, rhs));
        }

        let slack_count = normalized.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let art_count = normalized.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let first_slack = cols;
        let first_artificial = first_slack + slack_count;
        let total = first_artificial + art_count;

        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut next_slack, mut next_art) = (first_slack, first_artificial);
        for (coeffs, rel, rhs) in normalized {
            let mut row = vec![Rational::zero(); total + 1];
            for (k, a) in coeffs.into_iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                match vars[k] {
                    VarMap::NonNeg(c) => row[c] = a,
                    VarMap::Split(p, m) => {
                        row[m] = -&a;
                        row[p] = a;
                    }
                }
            }
            row[total] = rhs;
            match rel {
                Relation::Le => {
                    row[next_slack] = Rational::from_integer(1.into());
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = Rational::from_integer((-1).into());
                    next_slack += 1;
                    row[next_art] = Rational::from_integer(1.into());
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = Rational::from_integer(1.into());
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }
        Some(Tableau { vars, rows, basis, cols: total, first_artificial })
    }

    /// Drives the artificial variables to zero. Returns feasibility.
    fn phase_one(&mut self) -> bool {
        if self.first_artificial == self.cols {
            return true;
        }
        let mut cost = vec![Rational::zero(); self.cols + 1];
        for c in &mut cost[self.first_artificial..self.cols] {
            *c = Rational::from_integer(1.into());
        }
        self.price_out(&mut cost);
        let bounded = self.run(&mut cost, self.cols);
        debug_assert!(bounded, "phase one objective is bounded below by zero");
        // cost[rhs] holds -z.
        if !cost[self.cols].is_zero() {
            return false;
        }
        self.evict_artificials();
        true
    }

    /// Pivots zero-level artificials out of the basis, dropping redundant rows.
    fn evict_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] < self.first_artificial {
                r += 1;
                continue;
            }
            let entering = (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero());
            match entering {
                Some(j) => {
                    self.pivot(r, j, None);
                    r += 1;
                }
                None => {
                    self.rows.swap_remove(r);
                    self.basis.swap_remove(r);
                }
            }
        }
    }

    /// Minimises `objective` from the current feasible basis. Returns false if unbounded.
    fn phase_two(&mut self, objective: &AffineFunc) -> bool {
        let mut cost = vec![Rational::zero(); self.cols + 1];
        for (k, c) in objective.coeffs().iter().enumerate() {
            match self.vars[k] {
                VarMap::NonNeg(col) => cost[col] = c.clone(),
                VarMap::Split(p, m) => {
                    cost[p] = c.clone();
                    cost[m] = -c;
                }
            }
        }
        self.price_out(&mut cost);
        self.run(&mut cost, self.first_artificial)
    }

    /// Turns raw costs into reduced costs relative to the current basis.
    fn price_out(&self, cost: &mut [Rational]) {
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if cost[b].is_zero() {
                continue;
            }
            let factor = cost[b].clone();
            for (c, v) in cost.iter_mut().zip(row) {
                if !v.is_zero() {
                    *c -= &factor * v;
                }
            }
        }
    }

    /// Bland-rule simplex over columns `< allowed`. Returns false if unbounded.
    fn run(&mut self, cost: &mut Vec<Rational>, allowed: usize) -> bool {
        loop {
            let Some(entering) = (0..allowed).find(|&j| cost[j].is_negative()) else {
                return true;
            };
            let rhs = self.cols;
            let mut leaving: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[entering];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / a;
                let better = match &leaving {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio || (ratio == *best_ratio && self.basis[i] < self.basis[*best])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((r, _)) = leaving else {
                return false;
            };
            self.pivot(r, entering, Some(cost));
        }
    }

    fn pivot(&mut self, r: usize, c: usize, cost: Option<&mut Vec<Rational>>) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = core::mem::take(&mut self.rows[r]);
        let support: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            if row[c].is_zero() {
                return;
            }
            let factor = row[c].clone();
            for &j in &support {
                row[j] -= &factor * &pivot_row[j];
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        if let Some(cost) = cost {
            eliminate(cost);
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    fn column_value(&self, col: usize) -> Rational {
        self.basis.iter().position(|&b| b == col).map_or_else(Rational::zero, |i| self.rows[i][self.cols].clone())
    }

    fn primal_point(&self) -> Point {
        let coords = self
            .vars
            .iter()
            .map(|v| match *v {
                VarMap::NonNeg(c) => self.column_value(c),
                VarMap::Split(p, m) => self.column_value(p) - self.column_value(m),
            })
            .collect();
        Point::new(coords)
    }
}

/// Detects `c·x_k ≥ 0` with `c > 0` (or the mirrored `≤` form), i.e. `x_k ≥ 0`.
fn sign_bound(c: &Constraint) -> Option<usize> {
    if !c.func.bias().is_zero() || c.relation == Relation::Eq {
        return None;
    }
    let mut nonzero = c.func.coeffs().iter().enumerate().filter(|(_, a)| !a.is_zero());
    let (k, a) = nonzero.next()?;
    if nonzero.next().is_some() {
        return None;
    }
    let lower = match c.relation {
        Relation::Ge => a.is_positive(),
        Relation::Le => a.is_negative(),
        Relation::Eq => false,
    };
    lower.then_some(k)
}
