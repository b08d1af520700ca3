//! Enumeration of the nonnegative integer solutions of a linear equality
//! system.
//!
//! The solution set of `Ax = b, x >= 0` is walked in lexicographic order by
//! a depth-first search. Before the walk, each coordinate receives an upper
//! bound: either one supplied by the caller or the floor of the coordinate's
//! maximum over the real relaxation (an exact LP). During the walk, every
//! row prunes with interval arithmetic over the remaining coordinates, which
//! in particular pins slack-like coordinates immediately instead of
//! scanning their whole range.

use crate::arith::{ceil_div, floor_div, rat_floor, to_rat, Int};
use crate::guard::Guards;
use crate::lp::{lp_solve, Constraint, LpOutcome, LpProblem, Sign};
use crate::{Error, Result};
use num_traits::{Signed, ToPrimitive, Zero};

/// `{x in Z^n : a x = b, x >= 0}` described by its rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqSystem {
    pub a: Vec<Vec<Int>>,
    pub b: Vec<Int>,
    nvars: usize,
}

impl EqSystem {
    pub fn new(a: Vec<Vec<Int>>, b: Vec<Int>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::invalid(format!(
                "{} rows but {} right-hand sides",
                a.len(),
                b.len()
            )));
        }
        let nvars = a.first().map_or(0, Vec::len);
        for (i, row) in a.iter().enumerate() {
            if row.len() != nvars {
                return Err(Error::invalid(format!(
                    "row {i} has {} entries, expected {nvars}",
                    row.len()
                )));
            }
        }
        Ok(EqSystem { a, b, nvars })
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    /// Largest entry magnitude of the coefficient matrix.
    pub fn delta(&self) -> Int {
        self.a
            .iter()
            .flat_map(|row| row.iter())
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Int::zero)
    }

    fn relaxation(&self, objective: Vec<crate::arith::Rat>, maximize: bool) -> LpProblem {
        LpProblem {
            maximize,
            objective,
            constraints: self
                .a
                .iter()
                .zip(&self.b)
                .map(|(row, rhs)| {
                    Constraint::eq(row.iter().map(to_rat).collect(), to_rat(rhs))
                })
                .collect(),
            signs: vec![Sign::NonNeg; self.nvars],
        }
    }

    /// Floor of each coordinate's maximum over the real relaxation.
    /// `Ok(None)` when the relaxation is empty; an error when some
    /// coordinate is unbounded (the polytope is not a polytope).
    pub fn coordinate_upper_bounds(&self) -> Result<Option<Vec<Int>>> {
        let mut bounds = Vec::with_capacity(self.nvars);
        for j in 0..self.nvars {
            let mut objective = vec![crate::arith::Rat::zero(); self.nvars];
            objective[j] = crate::arith::rat(1, 1);
            match lp_solve(&self.relaxation(objective, true))? {
                LpOutcome::Optimal { value, .. } => bounds.push(rat_floor(&value)),
                LpOutcome::Infeasible => return Ok(None),
                LpOutcome::Unbounded => {
                    return Err(Error::invalid(format!(
                        "coordinate {j} is unbounded over the relaxation"
                    )))
                }
            }
        }
        Ok(Some(bounds))
    }

    /// All nonnegative integer solutions in lexicographic order.
    ///
    /// `bounds`, when given, are trusted upper bounds per coordinate and
    /// skip the LP pass. Guarded by `guards.lattice_points` on emitted
    /// points and a proportional cap on visited search nodes.
    pub fn enumerate(&self, bounds: Option<&[Int]>, guards: &Guards) -> Result<Vec<Vec<Int>>> {
        let ub: Vec<Int> = match bounds {
            Some(b) => {
                if b.len() != self.nvars {
                    return Err(Error::invalid(format!(
                        "{} bounds for {} variables",
                        b.len(),
                        self.nvars
                    )));
                }
                b.to_vec()
            }
            None => match self.coordinate_upper_bounds()? {
                Some(b) => b,
                None => return Ok(Vec::new()),
            },
        };
        if ub.iter().any(|v| v.is_negative()) {
            return Ok(Vec::new());
        }

        let rows = self.a.len();
        // suffix_lo[i][j] / suffix_hi[i][j]: extreme values of
        // sum_{k >= j} a[i][k] * x_k subject to 0 <= x_k <= ub_k.
        let mut suffix_lo = vec![vec![Int::zero(); self.nvars + 1]; rows];
        let mut suffix_hi = vec![vec![Int::zero(); self.nvars + 1]; rows];
        for i in 0..rows {
            for j in (0..self.nvars).rev() {
                let term = &self.a[i][j] * &ub[j];
                let (lo_t, hi_t) = if term.is_negative() {
                    (term, Int::zero())
                } else {
                    (Int::zero(), term)
                };
                suffix_lo[i][j] = &suffix_lo[i][j + 1] + lo_t;
                suffix_hi[i][j] = &suffix_hi[i][j + 1] + hi_t;
            }
        }

        let mut out: Vec<Vec<Int>> = Vec::new();
        let mut current = vec![Int::zero(); self.nvars];
        let mut residual = self.b.clone();
        let mut nodes: u64 = 0;
        let node_cap = guards.lattice_points.saturating_mul(64).max(1 << 16);
        self.walk(
            0,
            &ub,
            &suffix_lo,
            &suffix_hi,
            &mut residual,
            &mut current,
            &mut out,
            &mut nodes,
            node_cap,
            guards.lattice_points,
        )?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        j: usize,
        ub: &[Int],
        suffix_lo: &[Vec<Int>],
        suffix_hi: &[Vec<Int>],
        residual: &mut Vec<Int>,
        current: &mut Vec<Int>,
        out: &mut Vec<Vec<Int>>,
        nodes: &mut u64,
        node_cap: u64,
        point_cap: u64,
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > node_cap {
            return Err(Error::guard(format!(
                "lattice search visited more than {node_cap} nodes"
            )));
        }
        if j == self.nvars {
            if residual.iter().all(Int::is_zero) {
                if out.len() as u64 >= point_cap {
                    return Err(Error::guard(format!(
                        "lattice point count exceeds {point_cap}"
                    )));
                }
                out.push(current.clone());
            }
            return Ok(());
        }
        // Intersect the feasible interval for x_j across rows.
        let mut lo = Int::zero();
        let mut hi = ub[j].clone();
        for i in 0..self.a.len() {
            let coeff = &self.a[i][j];
            // Need residual_i - coeff * v within the reach of later coords.
            let reach_lo = &suffix_lo[i][j + 1];
            let reach_hi = &suffix_hi[i][j + 1];
            let term_lo = &residual[i] - reach_hi; // coeff * v >= term_lo
            let term_hi = &residual[i] - reach_lo; // coeff * v <= term_hi
            if coeff.is_zero() {
                if term_lo.is_positive() || term_hi.is_negative() {
                    return Ok(());
                }
                continue;
            }
            let (vlo, vhi) = if coeff.is_positive() {
                (ceil_div(&term_lo, coeff), floor_div(&term_hi, coeff))
            } else {
                let neg = -coeff;
                (ceil_div(&-term_hi, &neg), floor_div(&-term_lo, &neg))
            };
            if vlo > lo {
                lo = vlo;
            }
            if vhi < hi {
                hi = vhi;
            }
            if lo > hi {
                return Ok(());
            }
        }
        let mut v = lo;
        while v <= hi {
            for i in 0..self.a.len() {
                residual[i] -= &self.a[i][j] * &v;
            }
            current[j] = v.clone();
            self.walk(
                j + 1,
                ub,
                suffix_lo,
                suffix_hi,
                residual,
                current,
                out,
                nodes,
                node_cap,
                point_cap,
            )?;
            for i in 0..self.a.len() {
                residual[i] += &self.a[i][j] * &v;
            }
            v += 1u32;
        }
        current[j] = Int::zero();
        Ok(())
    }

    /// Convenience for membership tests.
    pub fn satisfied_by(&self, x: &[Int]) -> bool {
        x.len() == self.nvars
            && x.iter().all(|v| !v.is_negative())
            && self
                .a
                .iter()
                .zip(&self.b)
                .all(|(row, rhs)| &crate::arith::dot(row, x) == rhs)
    }
}

/// Ceiling of the largest coordinate value that can appear in any
/// enumeration, used by callers sizing downstream structures.
pub fn max_bound(bounds: &[Int]) -> u64 {
    bounds
        .iter()
        .map(|v| v.to_u64().unwrap_or(u64::MAX))
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int_vec;
    use proptest::prelude::*;

    fn system(a: &[&[i64]], b: &[i64]) -> EqSystem {
        EqSystem::new(
            a.iter().map(|row| int_vec(row)).collect(),
            int_vec(b),
        )
        .unwrap()
    }

    #[test]
    fn enumerates_simplex_in_lex_order() {
        let s = system(&[&[1, 1]], &[2]);
        let pts = s.enumerate(None, &Guards::default()).unwrap();
        assert_eq!(pts, vec![int_vec(&[0, 2]), int_vec(&[1, 1]), int_vec(&[2, 0])]);
    }

    #[test]
    fn enumerates_threshold_polytope() {
        // 2a + 3b + t = 4 over nonnegative integers.
        let s = system(&[&[2, 3, 1]], &[4]);
        let pts = s.enumerate(None, &Guards::default()).unwrap();
        assert_eq!(
            pts,
            vec![
                int_vec(&[0, 0, 4]),
                int_vec(&[0, 1, 1]),
                int_vec(&[1, 0, 2]),
                int_vec(&[2, 0, 0]),
            ]
        );
    }

    #[test]
    fn parity_infeasible_system_is_empty() {
        let s = system(&[&[2]], &[3]);
        assert!(s.enumerate(None, &Guards::default()).unwrap().is_empty());
    }

    #[test]
    fn negative_rhs_relaxation_is_empty() {
        let s = system(&[&[1]], &[-1]);
        assert!(s.enumerate(None, &Guards::default()).unwrap().is_empty());
    }

    #[test]
    fn unbounded_coordinate_errors() {
        let s = system(&[&[1, -1]], &[0]);
        assert!(matches!(
            s.enumerate(None, &Guards::default()),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn explicit_bounds_skip_lp() {
        // Unbounded as a polyhedron, but caller-supplied box makes it finite.
        let s = system(&[&[1, -1]], &[0]);
        let pts = s.enumerate(Some(&int_vec(&[2, 2])), &Guards::default()).unwrap();
        assert_eq!(pts, vec![int_vec(&[0, 0]), int_vec(&[1, 1]), int_vec(&[2, 2])]);
    }

    #[test]
    fn point_guard_trips() {
        let guards = Guards { lattice_points: 5, ..Guards::default() };
        let s = system(&[&[1, 1, 1]], &[10]);
        assert!(matches!(s.enumerate(None, &guards), Err(Error::Guard(_))));
    }

    #[test]
    fn zero_variable_system() {
        let s = EqSystem::new(vec![], vec![]).unwrap();
        let pts = s.enumerate(None, &Guards::default()).unwrap();
        assert_eq!(pts, vec![Vec::<Int>::new()]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// The pruned walk agrees with a naive box scan.
        #[test]
        fn matches_naive_enumeration(
            a in proptest::collection::vec(proptest::collection::vec(-3..=3i64, 3), 2),
            b in proptest::collection::vec(-4..=8i64, 2),
        ) {
            let s = EqSystem::new(
                a.iter().map(|r| int_vec(r)).collect(),
                int_vec(&b),
            ).unwrap();
            let ub = int_vec(&[4, 4, 4]);
            let got = s.enumerate(Some(&ub), &Guards::default()).unwrap();
            let mut want = Vec::new();
            for x in 0..=4i64 {
                for y in 0..=4i64 {
                    for z in 0..=4i64 {
                        let v = int_vec(&[x, y, z]);
                        if s.satisfied_by(&v) {
                            want.push(v);
                        }
                    }
                }
            }
            prop_assert_eq!(got, want);
        }
    }
}
