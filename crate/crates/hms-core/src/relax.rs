//! Fractional block relaxation of the decomposition problem, distance
//! budgets, and right-hand-side shifting.
//!
//! A [`PQRep`] asks for `m` integer points of `P` whose sum lies in `Q`.
//! Seen as a block ILP (one block per part plus an aggregate block tied in
//! by the rows of `Q`), its natural relaxation lets every block range over
//! the convex hull of `P`'s integer points while the coupling rows stay
//! exact. All summand blocks share one hull, so averaging the blocks of any
//! feasible solution yields a uniform one, and feasibility collapses to a
//! single exact LP over convex-combination weights of the hull generators.
//!
//! A solvable relaxation pins integer solutions to a box: some integer
//! decomposition lies within a budgeted l1 distance `D` of the fractional
//! solution, where `D` depends only on the two coefficient matrices. The
//! componentwise anchor `max(floor(x) - D, 0)` can therefore be subtracted
//! from the right-hand sides, after which the residual search space fits in
//! `[0, 2D]` per coordinate no matter how large the original right-hand
//! sides were. [`preprocess_pqr`] runs that pipeline end to end and then
//! makes the box explicit with one bound row per coordinate and shrinks
//! every row of `P` to an equivalent row with small coefficients.

use std::collections::BTreeMap;

use crate::arith::{dot, dot_rat_int, int, int_pow, rat_floor, to_rat, Int, Rat};
use crate::ftreduce;
use crate::guard::Guards;
use crate::lp::{feasible_point, Constraint};
use crate::pqrep::PQRep;
use crate::pqsolve::{enumerate_lattice, PQSolution, PartGroup};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Tunable constant of the distance-budget formula; the budget grows with
/// `c` and collapses to `1` at `c = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsProfile {
    /// Multiplier applied to the exponent in [`proximity_bound`].
    pub c: u64,
}

impl Default for ConstantsProfile {
    fn default() -> Self {
        ConstantsProfile { c: 1 }
    }
}

/// Budgeted l1 distance between a fractional block solution and the nearest
/// integer decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProximityBudget {
    /// The distance bound; at least `1`.
    #[serde(with = "crate::io::int_scalar")]
    pub d: Int,
    /// The constants used to evaluate the bound.
    pub profile: ConstantsProfile,
}

/// `count` summand blocks sharing one fractional point, together with an
/// explicit convex-combination certificate over the generator list of the
/// enclosing [`ConvexRelaxSolution`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGroup {
    /// How many of the `m` blocks carry this point.
    pub count: Int,
    /// The fractional block point.
    pub x: Vec<Rat>,
    /// Pairs `(generator index, weight)` with positive weights summing to
    /// one, strictly increasing in the index.
    pub weights: Vec<(usize, Rat)>,
}

/// A certified solution of the relaxed decomposition problem.
///
/// The blocks partition the `m` parts into groups with a common fractional
/// point. Every point is a convex combination of `generators` (integer
/// points of `P`), and the count-weighted sum of the points satisfies every
/// row of `Q` exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexRelaxSolution {
    /// The integer points of `P` referenced by the certificates.
    pub generators: Vec<Vec<Int>>,
    /// Count-weighted block groups; the counts sum to `m`.
    pub blocks: Vec<BlockGroup>,
    /// Value of the solved LP objective (zero for pure feasibility runs).
    pub objective: Rat,
}

impl ConvexRelaxSolution {
    /// Total number of blocks across all groups.
    pub fn block_count(&self) -> Int {
        self.blocks.iter().map(|g| g.count.clone()).sum()
    }

    /// Whether all blocks share one point (at most one group).
    pub fn is_uniform(&self) -> bool {
        self.blocks.len() <= 1
    }

    /// Whether every block point is integral.
    pub fn is_integral(&self) -> bool {
        self.blocks.iter().all(|g| g.x.iter().all(Rat::is_integer))
    }

    /// The fractional aggregate `sum(count * x)` over all groups.
    pub fn aggregate(&self) -> Vec<Rat> {
        let n = self
            .generators
            .first()
            .map(Vec::len)
            .or_else(|| self.blocks.first().map(|g| g.x.len()))
            .unwrap_or(0);
        let mut sum = vec![Rat::zero(); n];
        for g in &self.blocks {
            let c = to_rat(&g.count);
            for (acc, v) in sum.iter_mut().zip(&g.x) {
                *acc += &c * v;
            }
        }
        sum
    }

    /// Re-checks the whole certificate against the model: every generator
    /// is an integer point of `P`, every group's weights form a convex
    /// combination producing its recorded point, the positive counts sum to
    /// `m`, and the aggregate satisfies each row of `Q` exactly.
    pub fn verify(&self, pq: &PQRep) -> Result<()> {
        let n = pq.num_vars();
        for g in &self.generators {
            if !pq.is_part(g) {
                return Err(Error::contract(format!("generator {g:?} is not a point of P")));
            }
        }
        for group in &self.blocks {
            if !group.count.is_positive() {
                return Err(Error::contract(format!(
                    "block multiplicity {} is not positive",
                    group.count
                )));
            }
            if group.x.len() != n {
                return Err(Error::contract(format!(
                    "block point has {} coordinates in a {n}-dimensional model",
                    group.x.len()
                )));
            }
            let mut total = Rat::zero();
            let mut point = vec![Rat::zero(); n];
            let mut last: Option<usize> = None;
            for (idx, w) in &group.weights {
                if *idx >= self.generators.len() {
                    return Err(Error::contract(format!(
                        "certificate references generator {idx} of {}",
                        self.generators.len()
                    )));
                }
                if last.is_some_and(|prev| prev >= *idx) {
                    return Err(Error::contract(
                        "certificate weights are not sorted by generator".to_string(),
                    ));
                }
                last = Some(*idx);
                if !w.is_positive() {
                    return Err(Error::contract(format!("certificate weight {w} is not positive")));
                }
                total += w;
                for (acc, v) in point.iter_mut().zip(&self.generators[*idx]) {
                    *acc += w * to_rat(v);
                }
            }
            if !total.is_one() {
                return Err(Error::contract(format!("certificate weights sum to {total}")));
            }
            if point != group.x {
                return Err(Error::contract(
                    "certified combination differs from the recorded block point".to_string(),
                ));
            }
        }
        if self.block_count() != pq.m {
            return Err(Error::contract(format!(
                "solution has {} blocks, model wants {}",
                self.block_count(),
                pq.m
            )));
        }
        let y = self.aggregate();
        for (row, rhs) in pq.a_q.iter().zip(&pq.b_q) {
            if dot_rat_int(&y, row) != to_rat(rhs) {
                return Err(Error::contract("aggregate violates a coupling row".to_string()));
            }
        }
        Ok(())
    }
}

/// Solves the relaxed decomposition problem.
///
/// Because every summand block ranges over the same hull, restricting the
/// search to solutions where all `m` blocks share one weight vector loses
/// nothing: averaging the blocks of any feasible solution produces such a
/// point. The weights are found by one exact feasibility LP whose rows are
/// the convexity constraint and the coupling rows of `Q` applied to `m`
/// times the shared point. `Ok(None)` means the relaxation, and with it the
/// decomposition problem itself, is infeasible.
pub fn solve_convexified(pq: &PQRep, guards: &Guards) -> Result<Option<ConvexRelaxSolution>> {
    pq.validate()?;
    let generators = enumerate_lattice(pq, guards)?;
    if generators.is_empty() {
        return Ok(None);
    }
    let mut constraints = Vec::with_capacity(pq.num_q_rows() + 1);
    constraints.push(Constraint::eq(vec![Rat::one(); generators.len()], Rat::one()));
    for (row, rhs) in pq.a_q.iter().zip(&pq.b_q) {
        let coeffs = generators.iter().map(|v| to_rat(&(dot(row, v) * &pq.m))).collect();
        constraints.push(Constraint::eq(coeffs, to_rat(rhs)));
    }
    let Some(lambda) = feasible_point(generators.len(), constraints)? else {
        return Ok(None);
    };
    let mut weights = Vec::new();
    let mut x = vec![Rat::zero(); pq.num_vars()];
    for (idx, w) in lambda.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        for (acc, v) in x.iter_mut().zip(&generators[idx]) {
            *acc += w * to_rat(v);
        }
        weights.push((idx, w.clone()));
    }
    let sol = ConvexRelaxSolution {
        generators,
        blocks: vec![BlockGroup { count: pq.m.clone(), x, weights }],
        objective: Rat::zero(),
    };
    sol.verify(pq)?;
    Ok(Some(sol))
}

/// Replaces all blocks by their count-weighted average.
///
/// The average of points of one convex hull stays in the hull, and the
/// aggregate is unchanged, so feasibility is preserved exactly. An already
/// uniform solution comes back as-is.
pub fn uniformize(sol: &ConvexRelaxSolution) -> ConvexRelaxSolution {
    if sol.is_uniform() {
        return sol.clone();
    }
    let m = sol.block_count();
    let m_rat = to_rat(&m);
    let mut merged: BTreeMap<usize, Rat> = BTreeMap::new();
    for g in &sol.blocks {
        let share = to_rat(&g.count) / &m_rat;
        for (idx, w) in &g.weights {
            let entry = merged.entry(*idx).or_insert_with(Rat::zero);
            *entry += &share * w;
        }
    }
    let n = sol.generators.first().map_or(0, Vec::len);
    let mut x = vec![Rat::zero(); n];
    for (idx, w) in &merged {
        for (acc, v) in x.iter_mut().zip(&sol.generators[*idx]) {
            *acc += w * to_rat(v);
        }
    }
    ConvexRelaxSolution {
        generators: sol.generators.clone(),
        blocks: vec![BlockGroup { count: m, x, weights: merged.into_iter().collect() }],
        objective: sol.objective.clone(),
    }
}

/// Evaluates the distance budget
/// `((rows_Q + N) * rows_P * delta)^(c * (rows_Q + N) * rows_P)` with
/// `delta` the largest coefficient magnitude of either matrix, clamped to
/// at least `1`. The budget never depends on the right-hand sides.
pub fn proximity_bound(pq: &PQRep, profile: &ConstantsProfile) -> Result<ProximityBudget> {
    let rows_p = pq.num_p_rows() as u64;
    let coupled = (pq.num_q_rows() + pq.num_vars()) as u64;
    let delta = pq.delta_p().max(pq.delta_q());
    let base = Int::from(coupled) * Int::from(rows_p) * delta;
    let exp = profile
        .c
        .checked_mul(coupled)
        .and_then(|v| v.checked_mul(rows_p))
        .ok_or_else(|| Error::invalid("distance budget exponent overflows"))?;
    let d = int_pow(&base, exp).max(Int::one());
    Ok(ProximityBudget { d, profile: *profile })
}

/// A model with shifted right-hand sides together with the anchor that was
/// subtracted and the budget that sized its box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftedPQRep {
    /// The shifted model; its `var_bounds` box has side length at most
    /// twice the budget.
    pub pq: PQRep,
    /// Componentwise `max(floor(x) - D, 0)` of the uniform block point.
    #[serde(with = "crate::io::int_vec")]
    pub anchor: Vec<Int>,
    pub budget: ProximityBudget,
}

impl ShiftedPQRep {
    /// Maps a part of the shifted model back to original coordinates.
    pub fn lift_part(&self, part: &[Int]) -> Vec<Int> {
        part.iter().zip(&self.anchor).map(|(v, a)| v + a).collect()
    }

    /// Maps a whole decomposition back to the original model: every part
    /// gains the anchor, the aggregate gains `m` anchors.
    pub fn lift_solution(&self, sol: &PQSolution) -> PQSolution {
        let parts = sol
            .parts
            .iter()
            .map(|g| PartGroup { point: self.lift_part(&g.point), count: g.count.clone() })
            .collect();
        let y = sol.y.iter().zip(&self.anchor).map(|(v, a)| v + a * &self.pq.m).collect();
        PQSolution { parts, y }
    }
}

/// Anchors the model at `a = max(floor(x) - D, 0)`, componentwise over the
/// uniform block point `x`, and rewrites it in the residual coordinates:
/// `b_P` loses `A_P a`, `b_Q` loses `m * A_Q a`, and every coordinate gets
/// the explicit upper bound `2D` (intersected with the original bounds
/// shifted by the anchor, when present).
///
/// Decompositions of the shifted model are exactly the decompositions of
/// the original whose parts all lie in the anchored box; adding the anchor
/// to each part recovers an original solution. The budget promises that a
/// feasible model keeps at least one decomposition inside the box.
pub fn shift_rhs(
    pq: &PQRep,
    sol: &ConvexRelaxSolution,
    budget: &ProximityBudget,
) -> Result<ShiftedPQRep> {
    pq.validate()?;
    if !budget.d.is_positive() {
        return Err(Error::invalid(format!("distance budget {} is not positive", budget.d)));
    }
    if !sol.is_uniform() {
        return Err(Error::invalid("shifting requires a uniformized solution".to_string()));
    }
    sol.verify(pq)?;
    let block = sol
        .blocks
        .first()
        .ok_or_else(|| Error::invalid("solution carries no blocks"))?;
    let anchor: Vec<Int> = block
        .x
        .iter()
        .map(|v| (rat_floor(v) - &budget.d).max(Int::zero()))
        .collect();
    let b_p = pq
        .b_p
        .iter()
        .zip(&pq.a_p)
        .map(|(b, row)| b - dot(row, &anchor))
        .collect();
    let b_q = pq
        .b_q
        .iter()
        .zip(&pq.a_q)
        .map(|(b, row)| b - dot(row, &anchor) * &pq.m)
        .collect();
    let two_d = int(2) * &budget.d;
    // A generator within the old bounds keeps its shifted image within the
    // new ones, so intersecting stays lossless.
    let var_bounds = match &pq.var_bounds {
        Some(vb) => vb
            .iter()
            .zip(&anchor)
            .map(|(b, a)| (b - a).min(two_d.clone()))
            .collect(),
        None => vec![two_d; pq.num_vars()],
    };
    let shifted = PQRep {
        a_p: pq.a_p.clone(),
        b_p,
        a_q: pq.a_q.clone(),
        b_q,
        m: pq.m.clone(),
        var_bounds: Some(var_bounds),
    };
    Ok(ShiftedPQRep { pq: shifted, anchor, budget: budget.clone() })
}

/// Output of the full preprocessing pipeline: a model over `2N` coordinates
/// (the original `N` plus one bound slack each) with `rows_P + N` reduced
/// rows, plus everything needed to map its solutions back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessedPQRep {
    pub pq: PQRep,
    /// Anchor in original coordinates (length `N`).
    #[serde(with = "crate::io::int_vec")]
    pub anchor: Vec<Int>,
    pub budget: ProximityBudget,
    /// Number of original coordinates `N`.
    pub original_vars: usize,
}

impl PreprocessedPQRep {
    /// Maps a part of the reduced model back to original coordinates by
    /// dropping the bound slacks and adding the anchor.
    pub fn lift_part(&self, part: &[Int]) -> Vec<Int> {
        part.iter()
            .take(self.original_vars)
            .zip(&self.anchor)
            .map(|(v, a)| v + a)
            .collect()
    }

    /// Maps a whole decomposition back to the original model.
    pub fn lift_solution(&self, sol: &PQSolution) -> PQSolution {
        let parts = sol
            .parts
            .iter()
            .map(|g| PartGroup { point: self.lift_part(&g.point), count: g.count.clone() })
            .collect();
        let y = sol
            .y
            .iter()
            .take(self.original_vars)
            .zip(&self.anchor)
            .map(|(v, a)| v + a * &self.pq.m)
            .collect();
        PQSolution { parts, y }
    }
}

/// Runs the pipeline under the default constants profile. See
/// [`preprocess_pqr_with`].
pub fn preprocess_pqr(pq: &PQRep, guards: &Guards) -> Result<Option<PreprocessedPQRep>> {
    preprocess_pqr_with(pq, &ConstantsProfile::default(), guards)
}

/// Solves the relaxation, uniformizes, sizes the distance budget, shifts
/// the right-hand sides, appends one explicit bound row per coordinate
/// (widening the model by one slack each), and reduces every row of `P` to
/// an equivalent row over the box of side `2D`. The result decides the same
/// question as the input, and its coefficients no longer depend on the
/// original right-hand sides. `Ok(None)` certifies infeasibility.
pub fn preprocess_pqr_with(
    pq: &PQRep,
    profile: &ConstantsProfile,
    guards: &Guards,
) -> Result<Option<PreprocessedPQRep>> {
    let Some(sol) = solve_convexified(pq, guards)? else {
        return Ok(None);
    };
    let uniform = uniformize(&sol);
    let budget = proximity_bound(pq, profile)?;
    let shifted = shift_rhs(pq, &uniform, &budget)?;
    let n = pq.num_vars();
    let bounds = shifted.pq.var_bounds.clone().unwrap_or_default();
    let two_d = int(2) * &budget.d;

    // Widen every row to 2N coordinates and make the box explicit through
    // x_j + s_j = bound_j rows.
    let mut rows: Vec<(Vec<Int>, Int)> = Vec::with_capacity(shifted.pq.num_p_rows() + n);
    for (row, rhs) in shifted.pq.a_p.iter().zip(&shifted.pq.b_p) {
        let mut wide = row.clone();
        wide.resize(2 * n, Int::zero());
        rows.push((wide, rhs.clone()));
    }
    for (j, bound) in bounds.iter().enumerate() {
        let mut wide = vec![Int::zero(); 2 * n];
        wide[j] = Int::one();
        wide[n + j] = Int::one();
        rows.push((wide, bound.clone()));
    }

    // Every feasible coordinate lies in [0, 2D], so a row equivalent over
    // the box of that side decides the same points.
    let mut a_p = Vec::with_capacity(rows.len());
    let mut b_p = Vec::with_capacity(rows.len());
    for (w, b) in &rows {
        let reduced = ftreduce::reduce_row(w, b, &two_d)?;
        a_p.push(reduced.w_bar);
        b_p.push(reduced.b_bar);
    }

    let a_q = shifted
        .pq
        .a_q
        .iter()
        .map(|row| {
            let mut wide = row.clone();
            wide.resize(2 * n, Int::zero());
            wide
        })
        .collect();
    let mut var_bounds = bounds.clone();
    var_bounds.extend(bounds.iter().cloned());
    let reduced = PQRep {
        a_p,
        b_p,
        a_q,
        b_q: shifted.pq.b_q.clone(),
        m: pq.m.clone(),
        var_bounds: Some(var_bounds),
    };
    reduced.validate()?;
    Ok(Some(PreprocessedPQRep {
        pq: reduced,
        anchor: shifted.anchor,
        budget,
        original_vars: n,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::model::{Instance, Objective};
    use crate::pqrep::build_identical;
    use crate::pqsolve::solve_pqr;
    use num_traits::ToPrimitive;

    fn cmax_pq(p: &[i64], n: &[i64], m: i64, u: i64) -> PQRep {
        build_identical(
            &Instance::small(p, n, m, Objective::Cmax)
                .unwrap()
                .with_bounds(None, Some(int(u))),
        )
        .unwrap()
    }

    fn l1(a: &[Rat], b: &[Int]) -> Rat {
        a.iter().zip(b).map(|(x, y)| (x - to_rat(y)).abs()).sum()
    }

    /// Brute force over all decompositions: the smallest stacked distance
    /// (sum over the `m` parts plus the aggregate block) and the smallest
    /// achievable worst per-part distance, or `None` when no decomposition
    /// exists.
    fn nearest_decomposition(pq: &PQRep, sol: &ConvexRelaxSolution) -> Option<(Rat, Rat)> {
        let gens = enumerate_lattice(pq, &Guards::default()).unwrap();
        let m = pq.m.to_usize().expect("brute force needs a small part count");
        let x = &sol.blocks[0].x;
        let mx: Vec<Rat> = x.iter().map(|v| v * to_rat(&pq.m)).collect();
        let mut sum = vec![Int::zero(); pq.num_vars()];
        let mut dists: Vec<Rat> = Vec::new();
        let mut best: Option<(Rat, Rat)> = None;
        fn walk(
            gens: &[Vec<Int>],
            pq: &PQRep,
            x: &[Rat],
            mx: &[Rat],
            start: usize,
            left: usize,
            sum: &mut Vec<Int>,
            dists: &mut Vec<Rat>,
            best: &mut Option<(Rat, Rat)>,
        ) {
            if left == 0 {
                if !pq.aggregate_matches(sum) {
                    return;
                }
                let total = dists.iter().sum::<Rat>() + l1(mx, sum);
                let widest = dists.iter().max().cloned().unwrap_or_else(Rat::zero);
                let (bt, bw) = best.get_or_insert((total.clone(), widest.clone()));
                if total < *bt {
                    *bt = total;
                }
                if widest < *bw {
                    *bw = widest;
                }
                return;
            }
            for idx in start..gens.len() {
                for (acc, v) in sum.iter_mut().zip(&gens[idx]) {
                    *acc += v;
                }
                dists.push(l1(x, &gens[idx]));
                walk(gens, pq, x, mx, idx, left - 1, sum, dists, best);
                dists.pop();
                for (acc, v) in sum.iter_mut().zip(&gens[idx]) {
                    *acc -= v;
                }
            }
        }
        walk(&gens, pq, x, &mx, 0, m, &mut sum, &mut dists, &mut best);
        best
    }

    #[test]
    fn relaxation_matches_the_hand_solved_cap_example() {
        // Two part types under cap 4; the coupling rows force the weights
        // 1/2 on (0,1,1) and 1/2 on (2,0,0), hence the point (1, 1/2, 1/2).
        let pq = cmax_pq(&[2, 3], &[2, 1], 2, 4);
        let sol = solve_convexified(&pq, &Guards::default())
            .unwrap()
            .expect("relaxation feasible");
        sol.verify(&pq).unwrap();
        assert_eq!(sol.blocks.len(), 1);
        let block = &sol.blocks[0];
        assert_eq!(block.count, int(2));
        assert_eq!(block.x, vec![rat(1, 1), rat(1, 2), rat(1, 2)]);
        // Generators in lexicographic order: (0,0,4),(0,1,1),(1,0,2),(2,0,0).
        assert_eq!(block.weights, vec![(1, rat(1, 2)), (3, rat(1, 2))]);
        assert!(sol.objective.is_zero());
    }

    #[test]
    fn integral_relaxation_solutions_come_back_as_is() {
        let pq = cmax_pq(&[2], &[4], 2, 4);
        let sol = solve_convexified(&pq, &Guards::default())
            .unwrap()
            .expect("relaxation feasible");
        assert!(sol.is_integral());
        assert_eq!(sol.blocks[0].x, vec![rat(2, 1), rat(0, 1)]);
        assert_eq!(sol.blocks[0].weights, vec![(2, rat(1, 1))]);
    }

    #[test]
    fn overloaded_demand_is_relaxation_infeasible() {
        // Five unit-2 jobs cannot average into two parts of cap 4.
        let pq = cmax_pq(&[2, 3], &[5, 1], 2, 4);
        assert!(solve_convexified(&pq, &Guards::default()).unwrap().is_none());
        assert!(solve_pqr(&pq, &Guards::default()).unwrap().is_none());
    }

    #[test]
    fn empty_part_polytope_is_relaxation_infeasible() {
        let pq = PQRep {
            a_p: vec![vec![int(1), int(1)]],
            b_p: vec![int(1)],
            a_q: vec![],
            b_q: vec![],
            m: int(2),
            var_bounds: Some(vec![int(0), int(0)]),
        };
        assert!(solve_convexified(&pq, &Guards::default()).unwrap().is_none());
    }

    #[test]
    fn uniformize_averages_two_singleton_blocks() {
        let pq = PQRep {
            a_p: vec![vec![int(1), int(1)]],
            b_p: vec![int(1)],
            a_q: vec![],
            b_q: vec![],
            m: int(2),
            var_bounds: None,
        };
        let generators = enumerate_lattice(&pq, &Guards::default()).unwrap();
        assert_eq!(generators, vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
        let sol = ConvexRelaxSolution {
            generators,
            blocks: vec![
                BlockGroup {
                    count: int(1),
                    x: vec![rat(1, 1), rat(0, 1)],
                    weights: vec![(1, rat(1, 1))],
                },
                BlockGroup {
                    count: int(1),
                    x: vec![rat(0, 1), rat(1, 1)],
                    weights: vec![(0, rat(1, 1))],
                },
            ],
            objective: Rat::zero(),
        };
        sol.verify(&pq).unwrap();
        let uni = uniformize(&sol);
        uni.verify(&pq).unwrap();
        assert_eq!(uni.blocks.len(), 1);
        assert_eq!(uni.blocks[0].count, int(2));
        assert_eq!(uni.blocks[0].x, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(uni.blocks[0].weights, vec![(0, rat(1, 2)), (1, rat(1, 2))]);
        // Independent hull-membership certificate for the averaged point:
        // weights over the generators reproducing each coordinate.
        let membership = vec![
            Constraint::eq(vec![Rat::one(), Rat::one()], Rat::one()),
            Constraint::eq(vec![rat(0, 1), rat(1, 1)], rat(1, 2)),
            Constraint::eq(vec![rat(1, 1), rat(0, 1)], rat(1, 2)),
        ];
        assert!(feasible_point(2, membership).unwrap().is_some());
    }

    #[test]
    fn uniformize_keeps_uniform_solutions_unchanged() {
        let pq = cmax_pq(&[2, 3], &[2, 1], 2, 4);
        let sol = solve_convexified(&pq, &Guards::default()).unwrap().unwrap();
        assert_eq!(uniformize(&sol), sol);
    }

    #[test]
    fn budget_formula_pins_the_worked_values() {
        // One P row with largest entry 3, two Q rows, three coordinates:
        // ((2+3)*1*3)^(5*1) = 759375.
        let pq = PQRep {
            a_p: vec![vec![int(3), int(1), int(1)]],
            b_p: vec![int(3)],
            a_q: vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]],
            b_q: vec![int(1), int(1)],
            m: int(1),
            var_bounds: None,
        };
        let budget = proximity_bound(&pq, &ConstantsProfile::default()).unwrap();
        assert_eq!(budget.d, int(759375));
        // Doubling the exponent constant squares the bound.
        let doubled = proximity_bound(&pq, &ConstantsProfile { c: 2 }).unwrap();
        assert_eq!(doubled.d, int(759375) * int(759375));

        // Unit coefficients and no Q rows collapse to N^N.
        let unit2 = PQRep {
            a_p: vec![vec![int(1), int(1)]],
            b_p: vec![int(1)],
            a_q: vec![],
            b_q: vec![],
            m: int(1),
            var_bounds: None,
        };
        assert_eq!(proximity_bound(&unit2, &ConstantsProfile::default()).unwrap().d, int(4));
        let unit3 = PQRep {
            a_p: vec![vec![int(1), int(1), int(1)]],
            b_p: vec![int(1)],
            a_q: vec![],
            b_q: vec![],
            m: int(1),
            var_bounds: None,
        };
        assert_eq!(proximity_bound(&unit3, &ConstantsProfile::default()).unwrap().d, int(27));
    }

    #[test]
    fn worked_example_distance_stays_within_the_budget() {
        let pq = cmax_pq(&[2, 3], &[2, 1], 2, 4);
        let sol = uniformize(&solve_convexified(&pq, &Guards::default()).unwrap().unwrap());
        let budget = proximity_bound(&pq, &ConstantsProfile::default()).unwrap();
        assert_eq!(budget.d, int(759375));
        let (total, widest) = nearest_decomposition(&pq, &sol).expect("decomposable");
        // The unique decomposition (2,0,0)+(0,1,1) sits two units from the
        // fractional point per part and matches the aggregate exactly.
        assert_eq!(widest, rat(2, 1));
        assert_eq!(total, rat(4, 1));
        assert!(total <= to_rat(&budget.d));
    }

    #[test]
    fn anchor_is_zero_when_the_fractional_point_is_small() {
        let pq = cmax_pq(&[2, 3], &[2, 1], 2, 4);
        let sol = uniformize(&solve_convexified(&pq, &Guards::default()).unwrap().unwrap());
        let budget = proximity_bound(&pq, &ConstantsProfile::default()).unwrap();
        let shifted = shift_rhs(&pq, &sol, &budget).unwrap();
        assert_eq!(shifted.anchor, vec![Int::zero(); 3]);
        assert_eq!(shifted.pq.a_p, pq.a_p);
        assert_eq!(shifted.pq.b_p, pq.b_p);
        assert_eq!(shifted.pq.b_q, pq.b_q);
        let two_d = int(2) * &budget.d;
        assert_eq!(shifted.pq.var_bounds, Some(vec![two_d; 3]));
    }

    #[test]
    fn anchor_can_absorb_the_whole_right_hand_side() {
        // P holds x1 - x2 = 2 below (5,5); the coupling pins x1 = 5, so the
        // fractional point is (5,3). Budget 1 anchors at (4,2), which
        // satisfies the P row by itself.
        let pq = PQRep {
            a_p: vec![vec![int(1), int(-1)]],
            b_p: vec![int(2)],
            a_q: vec![vec![int(1), int(0)]],
            b_q: vec![int(5)],
            m: int(1),
            var_bounds: Some(vec![int(5), int(5)]),
        };
        let sol = uniformize(&solve_convexified(&pq, &Guards::default()).unwrap().unwrap());
        assert_eq!(sol.blocks[0].x, vec![rat(5, 1), rat(3, 1)]);
        let budget = ProximityBudget { d: int(1), profile: ConstantsProfile::default() };
        let shifted = shift_rhs(&pq, &sol, &budget).unwrap();
        assert_eq!(shifted.anchor, vec![int(4), int(2)]);
        assert_eq!(shifted.pq.b_p, vec![Int::zero()]);
        assert_eq!(shifted.pq.b_q, vec![int(1)]);
        assert_eq!(shifted.pq.var_bounds, Some(vec![int(1), int(2)]));
        let inner = solve_pqr(&shifted.pq, &Guards::default())
            .unwrap()
            .expect("shifted model feasible");
        let lifted = shifted.lift_solution(&inner);
        lifted.verify(&pq).unwrap();
        assert_eq!(lifted.y, vec![int(5), int(3)]);
    }

    #[test]
    fn shift_rejects_bad_inputs() {
        let pq = PQRep {
            a_p: vec![vec![int(1), int(1)]],
            b_p: vec![int(1)],
            a_q: vec![],
            b_q: vec![],
            m: int(2),
            var_bounds: None,
        };
        let generators = enumerate_lattice(&pq, &Guards::default()).unwrap();
        let two_blocks = ConvexRelaxSolution {
            generators,
            blocks: vec![
                BlockGroup {
                    count: int(1),
                    x: vec![rat(1, 1), rat(0, 1)],
                    weights: vec![(1, rat(1, 1))],
                },
                BlockGroup {
                    count: int(1),
                    x: vec![rat(0, 1), rat(1, 1)],
                    weights: vec![(0, rat(1, 1))],
                },
            ],
            objective: Rat::zero(),
        };
        let budget = ProximityBudget { d: int(1), profile: ConstantsProfile::default() };
        assert!(matches!(shift_rhs(&pq, &two_blocks, &budget), Err(Error::Invalid(_))));
        let uniform = uniformize(&two_blocks);
        let empty = ProximityBudget { d: int(0), profile: ConstantsProfile::default() };
        assert!(matches!(shift_rhs(&pq, &uniform, &empty), Err(Error::Invalid(_))));
    }

    #[test]
    fn preprocess_keeps_the_worked_example_solvable() {
        let pq = cmax_pq(&[2, 3], &[2, 1], 2, 4);
        let pre = preprocess_pqr(&pq, &Guards::default())
            .unwrap()
            .expect("relaxation feasible");
        assert_eq!(pre.pq.num_p_rows(), pq.num_p_rows() + 3);
        assert_eq!(pre.pq.num_vars(), 6);
        assert_eq!(pre.original_vars, 3);
        assert_eq!(pre.anchor, vec![Int::zero(); 3]);
        // Small coefficients survive the reduction unchanged, padded by the
        // bound slacks.
        assert_eq!(pre.pq.a_p[0], vec![int(2), int(3), int(1), int(0), int(0), int(0)]);
        assert_eq!(pre.pq.b_p[0], int(4));
        let sol = solve_pqr(&pre.pq, &Guards::default())
            .unwrap()
            .expect("reduced model still feasible");
        let lifted = pre.lift_solution(&sol);
        lifted.verify(&pq).unwrap();
    }

    #[test]
    fn preprocess_shrinks_oversized_coefficients() {
        // The load row carries a nine-digit coefficient. Budget 1 (profile
        // c = 0) anchors at (2,0) and leaves the box [0,1]x[0,2], over
        // which the reduction must find a small equivalent row.
        let k: i64 = 100_000_007;
        let pq = PQRep {
            a_p: vec![vec![int(k), int(1)]],
            b_p: vec![int(3 * k + 1)],
            a_q: vec![vec![int(1), int(0)], vec![int(0), int(1)]],
            b_q: vec![int(3), int(1)],
            m: int(1),
            var_bounds: Some(vec![int(3), int(2)]),
        };
        assert!(solve_pqr(&pq, &Guards::default()).unwrap().is_some());
        let pre = preprocess_pqr_with(&pq, &ConstantsProfile { c: 0 }, &Guards::default())
            .unwrap()
            .expect("relaxation feasible");
        assert_eq!(pre.budget.d, Int::one());
        assert_eq!(pre.anchor, vec![int(2), int(0)]);
        assert_eq!(pre.pq.num_p_rows(), 3);
        let widest = pre.pq.a_p[0]
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap()
            .max(pre.pq.b_p[0].abs());
        assert!(widest < int(1000), "load row kept magnitude {widest}");
        let sol = solve_pqr(&pre.pq, &Guards::default())
            .unwrap()
            .expect("reduced model still feasible");
        let lifted = pre.lift_solution(&sol);
        lifted.verify(&pq).unwrap();
        assert_eq!(lifted.y, vec![int(3), int(1)]);
    }

    #[test]
    fn infeasible_relaxation_short_circuits_the_pipeline() {
        let pq = cmax_pq(&[2, 3], &[5, 1], 2, 4);
        assert!(preprocess_pqr(&pq, &Guards::default()).unwrap().is_none());
    }

    #[test]
    fn preprocess_agrees_with_the_direct_solver_across_objectives() {
        let cases: Vec<(PQRep, bool)> = vec![
            (cmax_pq(&[2, 3], &[2, 1], 2, 4), true),
            (cmax_pq(&[2, 3], &[2, 1], 2, 3), false),
            (cmax_pq(&[2, 3], &[2, 1], 2, 2), false),
            (
                build_identical(
                    &Instance::small(&[1, 2], &[3, 1], 2, Objective::Cmin)
                        .unwrap()
                        .with_bounds(Some(int(2)), None),
                )
                .unwrap(),
                true,
            ),
            (
                build_identical(
                    &Instance::small(&[2], &[3], 2, Objective::Cenvy)
                        .unwrap()
                        .with_bounds(Some(int(2)), Some(int(4))),
                )
                .unwrap(),
                true,
            ),
        ];
        for (pq, expect_feasible) in cases {
            let direct = solve_pqr(&pq, &Guards::default()).unwrap();
            assert_eq!(direct.is_some(), expect_feasible);
            match preprocess_pqr(&pq, &Guards::default()).unwrap() {
                None => assert!(direct.is_none(), "pipeline dropped a feasible model"),
                Some(pre) => {
                    let reduced = solve_pqr(&pre.pq, &Guards::default()).unwrap();
                    assert_eq!(direct.is_some(), reduced.is_some());
                    if let Some(sol) = reduced {
                        pre.lift_solution(&sol).verify(&pq).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn enormous_part_counts_stay_cheap() {
        let m: i64 = 1_000_000_000;
        let pq = cmax_pq(&[1], &[m], m, 1);
        let sol = solve_convexified(&pq, &Guards::default())
            .unwrap()
            .expect("relaxation feasible");
        assert_eq!(sol.blocks[0].x, vec![rat(1, 1), rat(0, 1)]);
        let pre = preprocess_pqr(&pq, &Guards::default())
            .unwrap()
            .expect("pipeline feasible");
        let reduced = solve_pqr(&pre.pq, &Guards::default())
            .unwrap()
            .expect("reduced model feasible");
        let lifted = pre.lift_solution(&reduced);
        lifted.verify(&pq).unwrap();
        assert_eq!(lifted.y[0], int(m));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_instance() -> impl Strategy<Value = (Vec<i64>, Vec<i64>, i64)> {
            (1usize..=2).prop_flat_map(|d| {
                (
                    proptest::collection::vec(1i64..=4, d..=d),
                    proptest::collection::vec(0i64..=3, d..=d),
                    1i64..=3,
                )
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn feasible_models_have_proximal_relaxations(
                (mut p, n, m) in arb_instance(),
                u in 0i64..=8,
            ) {
                p.sort_unstable();
                p.dedup();
                let n = &n[..p.len()];
                let pq = cmax_pq(&p, n, m, u);
                let direct = solve_pqr(&pq, &Guards::default()).unwrap();
                let relaxed = solve_convexified(&pq, &Guards::default()).unwrap();
                if direct.is_some() {
                    prop_assert!(relaxed.is_some(), "integer-feasible model lost its relaxation");
                }
                if let (Some(_), Some(sol)) = (&direct, relaxed) {
                    let uniform = uniformize(&sol);
                    uniform.verify(&pq).unwrap();
                    let budget = proximity_bound(&pq, &ConstantsProfile::default()).unwrap();
                    let (total, _) = nearest_decomposition(&pq, &uniform)
                        .expect("direct solver found a decomposition");
                    prop_assert!(
                        total <= to_rat(&budget.d),
                        "distance {} falsifies the budget constant c = 1 (budget {})",
                        total,
                        budget.d
                    );
                }
            }

            #[test]
            fn preprocess_preserves_feasibility_and_lifts_solutions(
                (mut p, n, m) in arb_instance(),
                u in 0i64..=8,
            ) {
                p.sort_unstable();
                p.dedup();
                let n = &n[..p.len()];
                let pq = cmax_pq(&p, n, m, u);
                let direct = solve_pqr(&pq, &Guards::default()).unwrap();
                match preprocess_pqr(&pq, &Guards::default()).unwrap() {
                    None => prop_assert!(direct.is_none()),
                    Some(pre) => {
                        let reduced = solve_pqr(&pre.pq, &Guards::default()).unwrap();
                        prop_assert_eq!(direct.is_some(), reduced.is_some());
                        if let Some(sol) = reduced {
                            pre.lift_solution(&sol).verify(&pq).unwrap();
                        }
                    }
                }
            }
        }
    }
}
