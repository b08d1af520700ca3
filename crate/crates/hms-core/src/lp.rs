//! Exact linear programming over big rationals.
//!
//! A dense two-phase simplex with Bland's pivoting rule. Bland's rule makes
//! the solver immune to cycling, so termination needs no perturbation or
//! tolerance tricks, and every pivot is exact rational arithmetic — the
//! returned point and value are exact. Intended for the small systems this
//! crate produces (dozens of rows/columns), not for serious LP workloads.

use crate::arith::Rat;
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rel {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Rel,
    pub rhs: Rat,
}

impl Constraint {
    pub fn le(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Constraint { coeffs, rel: Rel::Le, rhs }
    }
    pub fn eq(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Constraint { coeffs, rel: Rel::Eq, rhs }
    }
    pub fn ge(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Constraint { coeffs, rel: Rel::Ge, rhs }
    }
}

/// Sign restriction of a structural variable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    NonNeg,
    Free,
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub maximize: bool,
    pub objective: Vec<Rat>,
    pub constraints: Vec<Constraint>,
    pub signs: Vec<Sign>,
}

impl LpProblem {
    /// A problem over `n` nonnegative variables with zero objective.
    pub fn feasibility(n: usize) -> Self {
        LpProblem {
            maximize: false,
            objective: vec![Rat::zero(); n],
            constraints: Vec::new(),
            signs: vec![Sign::NonNeg; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.signs.len()
    }

    pub fn push(&mut self, c: Constraint) -> &mut Self {
        self.constraints.push(c);
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.objective.len() != n {
            return Err(Error::invalid(format!(
                "objective has {} coefficients for {n} variables",
                self.objective.len()
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::invalid(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    c.coeffs.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(Vec<Rat>, Rat)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, value)),
            _ => None,
        }
    }
}

struct Tableau {
    /// rows[i] = coefficients, last entry is the right-hand side.
    rows: Vec<Vec<Rat>>,
    /// Objective row in reduced form (same width as rows).
    cost: Vec<Rat>,
    /// Column index of the basic variable of each row.
    basis: Vec<usize>,
    /// Columns barred from entering (retired artificials).
    banned: Vec<bool>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, row: usize) -> &Rat {
        &self.rows[row][self.ncols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = {
            let piv = &self.rows[row][col];
            debug_assert!(!piv.is_zero());
            Rat::one() / piv.clone()
        };
        for v in self.rows[row].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = self.rows[row].clone();
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[r].iter_mut().zip(&pivot_row) {
                *v = v.clone() - factor.clone() * pv.clone();
            }
        }
        let factor = self.cost[col].clone();
        if !factor.is_zero() {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v = v.clone() - factor.clone() * pv.clone();
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex to optimality on the current (minimization) cost row.
    /// Returns false if an improving direction is unbounded.
    fn optimize(&mut self) -> bool {
        loop {
            // Bland: entering column = lowest index with negative reduced cost.
            let entering = (0..self.ncols)
                .find(|&j| !self.banned[j] && self.cost[j].is_negative());
            let Some(col) = entering else {
                return true;
            };
            // Ratio test; ties broken by smallest basic-variable index.
            let mut leave: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r).clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((cur, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*cur])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

/// Solves the LP exactly. Deterministic: Bland's rule with fixed column
/// order, so equal inputs give identical outputs.
pub fn lp_solve(problem: &LpProblem) -> Result<LpOutcome> {
    problem.validate()?;
    let n = problem.num_vars();

    // Column layout: structural columns (free variables split x = x+ - x-),
    // then slack/surplus columns, then artificial columns.
    let mut col_of_var: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut ncols = 0usize;
    for s in &problem.signs {
        match s {
            Sign::NonNeg => {
                col_of_var.push((ncols, None));
                ncols += 1;
            }
            Sign::Free => {
                col_of_var.push((ncols, Some(ncols + 1)));
                ncols += 2;
            }
        }
    }
    let structural_cols = ncols;

    let m = problem.constraints.len();
    let mut slack_col: Vec<Option<(usize, bool)>> = vec![None; m]; // (col, is_le_slack)
    for (i, c) in problem.constraints.iter().enumerate() {
        // Orient each row so its right-hand side is nonnegative.
        let flip = c.rhs.is_negative();
        let rel = match (c.rel, flip) {
            (Rel::Eq, _) => Rel::Eq,
            (Rel::Le, false) | (Rel::Ge, true) => Rel::Le,
            (Rel::Ge, false) | (Rel::Le, true) => Rel::Ge,
        };
        if rel != Rel::Eq {
            slack_col[i] = Some((ncols, rel == Rel::Le));
            ncols += 1;
        }
    }
    let mut artificial_col: Vec<Option<usize>> = vec![None; m];
    for (i, c) in problem.constraints.iter().enumerate() {
        let le_slack = matches!(slack_col[i], Some((_, true)));
        let trivially_zero = c.rhs.is_zero() && c.coeffs.iter().all(Rat::is_zero);
        if !le_slack && !trivially_zero {
            artificial_col[i] = Some(ncols);
            ncols += 1;
        }
    }

    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut keep_rows: Vec<usize> = Vec::new();
    for (i, c) in problem.constraints.iter().enumerate() {
        let flip = c.rhs.is_negative();
        if c.rhs.is_zero() && c.coeffs.iter().all(Rat::is_zero) {
            continue; // 0 = 0 / 0 <= 0 rows carry no information
        }
        let mut row = vec![Rat::zero(); ncols + 1];
        for (v, coeff) in c.coeffs.iter().enumerate() {
            let val = if flip { -coeff.clone() } else { coeff.clone() };
            let (plus, minus) = col_of_var[v];
            row[plus] = val.clone();
            if let Some(mc) = minus {
                row[mc] = -val;
            }
        }
        row[ncols] = if flip { -c.rhs.clone() } else { c.rhs.clone() };
        if let Some((sc, is_le)) = slack_col[i] {
            row[sc] = if is_le { Rat::one() } else { -Rat::one() };
        }
        match (artificial_col[i], slack_col[i]) {
            (Some(ac), _) => {
                row[ac] = Rat::one();
                basis.push(ac);
            }
            (None, Some((sc, true))) => basis.push(sc),
            _ => unreachable!("row without basis column"),
        }
        rows.push(row);
        keep_rows.push(i);
    }

    let banned = vec![false; ncols];
    let mut t = Tableau { rows, cost: vec![Rat::zero(); ncols + 1], basis, banned, ncols };

    // Phase 1: minimize the sum of artificial variables.
    let has_artificial = artificial_col.iter().any(Option::is_some);
    if has_artificial {
        for ac in artificial_col.iter().flatten() {
            t.cost[*ac] = Rat::one();
        }
        // Reduce the cost row against the starting basis.
        for r in 0..t.rows.len() {
            let b = t.basis[r];
            let factor = t.cost[b].clone();
            if factor.is_zero() {
                continue;
            }
            let row = t.rows[r].clone();
            for (v, pv) in t.cost.iter_mut().zip(&row) {
                *v = v.clone() - factor.clone() * pv.clone();
            }
        }
        let bounded = t.optimize();
        debug_assert!(bounded, "phase-1 objective is bounded below by 0");
        // cost[ncols] holds -(current objective value).
        if t.cost[t.ncols].is_negative() {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive any artificial still in the basis out of it, or drop its
        // (redundant) row.
        let is_artificial: Vec<bool> = {
            let mut v = vec![false; t.ncols];
            for ac in artificial_col.iter().flatten() {
                v[*ac] = true;
            }
            v
        };
        let mut r = 0;
        while r < t.rows.len() {
            if is_artificial[t.basis[r]] {
                let col = (0..structural_cols).find(|&j| !t.rows[r][j].is_zero());
                match col {
                    Some(j) => t.pivot(r, j),
                    None => {
                        t.rows.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for (j, art) in is_artificial.iter().enumerate() {
            if *art {
                t.banned[j] = true;
            }
        }
    }

    // Phase 2: the real objective, as minimization.
    t.cost = vec![Rat::zero(); ncols + 1];
    for (v, coeff) in problem.objective.iter().enumerate() {
        let c = if problem.maximize { -coeff.clone() } else { coeff.clone() };
        let (plus, minus) = col_of_var[v];
        t.cost[plus] = c.clone();
        if let Some(mc) = minus {
            t.cost[mc] = -c;
        }
    }
    for r in 0..t.rows.len() {
        let b = t.basis[r];
        let factor = t.cost[b].clone();
        if factor.is_zero() {
            continue;
        }
        let row = t.rows[r].clone();
        for (v, pv) in t.cost.iter_mut().zip(&row) {
            *v = v.clone() - factor.clone() * pv.clone();
        }
    }
    if !t.optimize() {
        return Ok(LpOutcome::Unbounded);
    }

    let mut col_values = vec![Rat::zero(); ncols];
    for (r, b) in t.basis.iter().enumerate() {
        col_values[*b] = t.rows[r][t.ncols].clone();
    }
    let x: Vec<Rat> = col_of_var
        .iter()
        .map(|(plus, minus)| match minus {
            Some(mc) => col_values[*plus].clone() - col_values[*mc].clone(),
            None => col_values[*plus].clone(),
        })
        .collect();
    let value = problem
        .objective
        .iter()
        .zip(&x)
        .fold(Rat::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
    Ok(LpOutcome::Optimal { x, value })
}

/// Convenience: is the constraint system over `n` nonnegative variables
/// satisfiable, and if so at which point?
pub fn feasible_point(n: usize, constraints: Vec<Constraint>) -> Result<Option<Vec<Rat>>> {
    let mut p = LpProblem::feasibility(n);
    p.constraints = constraints;
    match lp_solve(&p)? {
        LpOutcome::Optimal { x, .. } => Ok(Some(x)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::contract(
            "feasibility problem reported unbounded".to_string(),
        )),
    }
}
