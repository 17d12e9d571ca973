//! Exact LP optimum for small instances.
//!
//! `exact_opt` runs a dense exact-rational simplex with Bland's rule on the
//! instance LP. `LpTableau::enumerate_vertices` is a brute-force vertex
//! enumerator used to cross-check the simplex on very small programs.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::instance::ProblemInstance;
use crate::numeric::{uint, Rational};

/// Largest edge count accepted by `exact_opt`.
pub const MAX_ORACLE_EDGES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
}

/// `maximize objective·x` subject to `rows[r]·x (sense) rhs[r]`, `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpTableau {
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
    pub sense: Vec<Sense>,
    pub objective: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for oracle ({0} edges, limit {MAX_ORACLE_EDGES})")]
    TooLarge(usize),
    #[error("instance is invalid: {0}")]
    Invalid(String),
    #[error("oracle LP unexpectedly {0}")]
    Degenerate(&'static str),
}

impl LpTableau {
    pub fn new(vars: usize) -> Self {
        LpTableau { rows: Vec::new(), rhs: Vec::new(), sense: Vec::new(), objective: vec![Rational::zero(); vars] }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    pub fn push_row(&mut self, row: Vec<Rational>, sense: Sense, rhs: Rational) {
        assert_eq!(row.len(), self.vars(), "row width");
        self.rows.push(row);
        self.sense.push(sense);
        self.rhs.push(rhs);
    }

    /// Source rows, sink rows, then one row per finite capacity.
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let k = inst.edges.len();
        let mut lp = LpTableau::new(k);
        lp.objective = inst.edges.iter().map(|e| uint(e.profit)).collect();
        for i in 0..inst.n() {
            let row = inst.edges.iter().map(|e| if e.src == i { Rational::one() } else { Rational::zero() }).collect();
            lp.push_row(row, Sense::Le, uint(inst.supply[i]));
        }
        for j in 0..inst.m() {
            let row = inst.edges.iter().map(|e| if e.dst == j { uint(e.price) } else { Rational::zero() }).collect();
            lp.push_row(row, Sense::Le, uint(inst.budget[j]));
        }
        for (c, e) in inst.edges.iter().enumerate() {
            if let Some(u) = e.capacity {
                let mut row = vec![Rational::zero(); k];
                row[c] = Rational::one();
                lp.push_row(row, Sense::Le, uint(u));
            }
        }
        lp
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.vars()
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().zip(&self.rhs).zip(&self.sense).all(|((row, b), s)| {
                let lhs = dot(row, x);
                match s {
                    Sense::Le => lhs <= *b,
                    Sense::Eq => lhs == *b,
                }
            })
    }

    pub fn value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// Two-phase simplex with Bland's rule.
    pub fn maximize(&self) -> LpOutcome {
        Simplex::build(self).run(&self.objective)
    }

    /// Minimizes by maximizing the negated objective.
    pub fn minimize(&self) -> LpOutcome {
        let neg: Vec<Rational> = self.objective.iter().map(|c| -c).collect();
        match Simplex::build(self).run(&neg) {
            LpOutcome::Optimal { value, x } => LpOutcome::Optimal { value: -value, x },
            other => other,
        }
    }

    /// Every vertex of the feasible region: each choice of `vars()` hyperplanes
    /// among the rows and the `x_j = 0` bounds with a unique feasible solution.
    /// Exponential; intended for programs with a handful of variables.
    pub fn enumerate_vertices(&self) -> Vec<Vec<Rational>> {
        let k = self.vars();
        let mut planes: Vec<(Vec<Rational>, Rational)> =
            self.rows.iter().cloned().zip(self.rhs.iter().cloned()).collect();
        for j in 0..k {
            let mut row = vec![Rational::zero(); k];
            row[j] = Rational::one();
            planes.push((row, Rational::zero()));
        }
        let mut found = BTreeSet::new();
        let mut pick = Vec::with_capacity(k);
        choose(planes.len(), k, 0, &mut pick, &mut |idx| {
            let a: Vec<Vec<Rational>> = idx.iter().map(|&p| planes[p].0.clone()).collect();
            let b: Vec<Rational> = idx.iter().map(|&p| planes[p].1.clone()).collect();
            if let Some(x) = solve_square(a, b) {
                if self.is_feasible(&x) {
                    found.insert(x);
                }
            }
        });
        found.into_iter().collect()
    }
}

fn choose(total: usize, k: usize, start: usize, pick: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if pick.len() == k {
        visit(pick);
        return;
    }
    for p in start..total {
        if total - p < k - pick.len() {
            break;
        }
        pick.push(p);
        choose(total, k, p + 1, pick, visit);
        pick.pop();
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Gaussian elimination; `None` when the system is singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Rational::one() / &a[col][col];
        for c in col..n {
            a[col][c] *= &inv;
        }
        b[col] *= &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..n {
                    let delta = &factor * &a[col][c];
                    a[r][c] -= delta;
                }
                let delta = &factor * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some(b)
}

struct Simplex {
    /// Constraint rows over all columns, followed by the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    structural: usize,
    /// Columns at or past this index are artificial.
    first_artificial: usize,
}

impl Simplex {
    fn build(lp: &LpTableau) -> Self {
        let k = lp.vars();
        let r = lp.rows.len();
        // Normalize to non-negative right-hand sides; a negated `<=` row becomes `>=`.
        let mut rows = Vec::with_capacity(r);
        for ((row, b), s) in lp.rows.iter().zip(&lp.rhs).zip(&lp.sense) {
            let flip = b.is_negative();
            let row: Vec<Rational> = if flip { row.iter().map(|v| -v).collect() } else { row.clone() };
            let b = if flip { -b } else { b.clone() };
            let kind = match (s, flip) {
                (Sense::Eq, _) => 0u8,
                (Sense::Le, false) => 1,
                (Sense::Le, true) => 2,
            };
            rows.push((row, b, kind));
        }
        let slacks = rows.iter().filter(|r| r.2 != 0).count();
        let artificials = rows.iter().filter(|r| r.2 != 1).count();
        let width = k + slacks + artificials;
        let first_artificial = k + slacks;
        let mut t = Vec::with_capacity(r);
        let mut basis = Vec::with_capacity(r);
        let (mut next_slack, mut next_art) = (k, first_artificial);
        for (row, b, kind) in rows {
            let mut line = row;
            line.resize(width + 1, Rational::zero());
            match kind {
                1 => {
                    line[next_slack] = Rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                2 => {
                    line[next_slack] = -Rational::one();
                    next_slack += 1;
                    line[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                _ => {
                    line[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            line[width] = b;
            t.push(line);
        }
        Simplex { t, basis, structural: k, first_artificial }
    }

    fn width(&self) -> usize {
        self.t.first().map_or(self.first_artificial, |r| r.len() - 1)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = Rational::one() / &self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row || line[col].is_zero() {
                continue;
            }
            let factor = line[col].clone();
            for (v, p) in line.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost` over the columns `< limit`; `false` if unbounded.
    fn optimize(&mut self, cost: &[Rational], limit: usize) -> bool {
        loop {
            let entering = (0..limit).find(|&c| {
                if self.basis.contains(&c) {
                    return false;
                }
                let mut d = cost[c].clone();
                for (r, &b) in self.basis.iter().enumerate() {
                    if !self.t[r][c].is_zero() {
                        d -= &cost[b] * &self.t[r][c];
                    }
                }
                d.is_positive()
            });
            let Some(col) = entering else { return true };
            let rhs = self.width();
            let mut best: Option<(Rational, usize, usize)> = None;
            for r in 0..self.t.len() {
                let a = &self.t[r][col];
                if a.is_positive() {
                    let ratio = &self.t[r][rhs] / a;
                    let better = match &best {
                        None => true,
                        Some((q, _, b)) => ratio < *q || (ratio == *q && self.basis[r] < *b),
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            let Some((_, row, _)) = best else { return false };
            self.pivot(row, col);
        }
    }

    fn run(mut self, objective: &[Rational]) -> LpOutcome {
        let width = self.width();
        if self.first_artificial < width {
            let mut phase1 = vec![Rational::zero(); width];
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = -Rational::one();
            }
            self.optimize(&phase1, width);
            let infeasible = self
                .basis
                .iter()
                .enumerate()
                .any(|(r, &b)| b >= self.first_artificial && !self.t[r][width].is_zero());
            if infeasible {
                return LpOutcome::Infeasible;
            }
            // Drive zero-level artificials out of the basis or drop redundant rows.
            let mut r = 0;
            while r < self.t.len() {
                if self.basis[r] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&c| !self.t[r][c].is_zero()) {
                        Some(c) => {
                            self.pivot(r, c);
                            r += 1;
                        }
                        None => {
                            self.t.remove(r);
                            self.basis.remove(r);
                        }
                    }
                } else {
                    r += 1;
                }
            }
        }
        let mut cost = vec![Rational::zero(); width];
        cost[..self.structural].clone_from_slice(objective);
        if !self.optimize(&cost, self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); self.structural];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                x[b] = self.t[r][width].clone();
            }
        }
        let value = dot(objective, &x);
        LpOutcome::Optimal { value, x }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub value: Rational,
    pub flow: Vec<Rational>,
}

/// Exact LP optimum of a BTP/BTS instance with at most `MAX_ORACLE_EDGES` edges.
pub fn exact_opt(inst: &ProblemInstance) -> Result<Optimum, OracleError> {
    if inst.edges.len() > MAX_ORACLE_EDGES {
        return Err(OracleError::TooLarge(inst.edges.len()));
    }
    let report = inst.validate();
    if !report.is_ok() {
        return Err(OracleError::Invalid(report.to_string()));
    }
    match LpTableau::from_instance(inst).maximize() {
        LpOutcome::Optimal { value, x } => Ok(Optimum { value, flow: x }),
        LpOutcome::Infeasible => Err(OracleError::Degenerate("infeasible")),
        LpOutcome::Unbounded => Err(OracleError::Degenerate("unbounded")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApproxFactor {
    Finite(Rational),
    /// The optimum is zero.
    Vacuous,
}

/// `primal / OPT` for a flow vector on an oracle-sized instance.
pub fn approx_factor(inst: &ProblemInstance, flows: &[Rational]) -> Result<ApproxFactor, OracleError> {
    let opt = exact_opt(inst)?;
    if opt.value.is_zero() {
        return Ok(ApproxFactor::Vacuous);
    }
    Ok(ApproxFactor::Finite(inst.profit_of(flows) / opt.value))
}
