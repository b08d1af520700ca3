//! Two-polytope models of assignment problems and their block-ILP form.
//!
//! A [`PQRep`] couples two polytopes over a shared coordinate space,
//!
//! ```text
//! P = { x >= 0 : A_P x = b_P (, x <= var_bounds) }
//! Q = { x >= 0 : A_Q x = b_Q }
//! ```
//!
//! together with a part count `m`. The encoded question is whether some
//! `y in Q` can be written as the sum of exactly `m` integer points of `P`.
//! Each builder in this module translates a concrete problem into that shape:
//! a part plays the role of one machine (or one bin, or one ILP block) and
//! `Q` ties the parts together, typically by forcing the per-part job counts
//! to sum to the demanded multiplicities.
//!
//! All builders emit equality systems. An input inequality gains a dedicated
//! slack coordinate: a `<=` row keeps its coefficients and its slack enters
//! with `+1`; a `>=` row is negated first so its slack also enters with `+1`.
//! Slack columns sit after the structural columns, first those of `P`'s rows
//! and then those of `Q`'s rows, each set in row order. This fixed layout
//! makes every matrix reproducible byte for byte.
//!
//! Slack coordinates of `Q` rows are unconstrained by `A_P`, so builders that
//! create them also set `var_bounds`, which is an upper-bound vector that is
//! part of `P`'s description. The bounds are chosen so that they never cut
//! off a part of a valid decomposition.

use crate::arith::{int, Int};
use crate::guard::Guards;
use crate::lattice::EqSystem;
use crate::lp::Rel;
use crate::model::{Instance, Objective};
use crate::{Error, Result};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Widest bin/part vector any builder will materialize columns for.
const MAX_MATERIALIZED_PARTS: u64 = 1 << 20;

fn zeros(n: usize) -> Vec<Int> {
    vec![Int::zero(); n]
}

/// A pair of equality-described polytopes plus a part count.
///
/// Feasibility semantics: the modelled instance is positive exactly when
/// there are integer points `y^(1), ..., y^(m)` of `P` whose sum lies in `Q`.
/// When `var_bounds` is present it belongs to `P`'s description (`x <=
/// var_bounds`); it also serves as the enumeration box for the lattice of
/// `P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PQRep {
    /// Row-major equality matrix of `P`.
    #[serde(rename = "A_P", with = "crate::io::int_mat")]
    pub a_p: Vec<Vec<Int>>,
    /// Right-hand side of `P`.
    #[serde(rename = "b_P", with = "crate::io::int_vec")]
    pub b_p: Vec<Int>,
    /// Row-major equality matrix of `Q`.
    #[serde(rename = "A_Q", with = "crate::io::int_mat")]
    pub a_q: Vec<Vec<Int>>,
    /// Right-hand side of `Q`.
    #[serde(rename = "b_Q", with = "crate::io::int_vec")]
    pub b_q: Vec<Int>,
    /// Number of parts the sum must consist of.
    #[serde(with = "crate::io::int_scalar")]
    pub m: Int,
    /// Optional per-coordinate upper bounds completing `P`'s description.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "crate::io::int_vec_opt"
    )]
    pub var_bounds: Option<Vec<Int>>,
}

impl PQRep {
    /// Shared dimension of both polytopes. `0` for a fully empty model.
    pub fn num_vars(&self) -> usize {
        self.a_p
            .first()
            .or_else(|| self.a_q.first())
            .map(|row| row.len())
            .or_else(|| self.var_bounds.as_ref().map(|vb| vb.len()))
            .unwrap_or(0)
    }

    pub fn num_p_rows(&self) -> usize {
        self.a_p.len()
    }

    pub fn num_q_rows(&self) -> usize {
        self.a_q.len()
    }

    /// Largest absolute coefficient of `A_P` (`0` when empty).
    pub fn delta_p(&self) -> Int {
        matrix_max_abs(&self.a_p)
    }

    /// Largest absolute coefficient of `A_Q` (`0` when empty).
    pub fn delta_q(&self) -> Int {
        matrix_max_abs(&self.a_q)
    }

    /// Consistency of all dimensions and signs.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 && self.a_p.is_empty() && self.a_q.is_empty() && self.var_bounds.is_none() {
            return Err(Error::invalid("model has no rows and no bounds; dimension unknown"));
        }
        for (what, mat, rhs) in [("P", &self.a_p, &self.b_p), ("Q", &self.a_q, &self.b_q)] {
            if mat.len() != rhs.len() {
                return Err(Error::invalid(format!(
                    "{what} has {} rows but {} right-hand entries",
                    mat.len(),
                    rhs.len()
                )));
            }
            if let Some(bad) = mat.iter().find(|row| row.len() != n) {
                return Err(Error::invalid(format!(
                    "{what} row of width {} in a {n}-dimensional model",
                    bad.len()
                )));
            }
        }
        if !self.m.is_positive() {
            return Err(Error::invalid(format!("part count {} is not positive", self.m)));
        }
        if let Some(vb) = &self.var_bounds {
            if vb.len() != n {
                return Err(Error::invalid(format!(
                    "var_bounds has {} entries for {n} variables",
                    vb.len()
                )));
            }
            if let Some(bad) = vb.iter().find(|v| v.is_negative()) {
                return Err(Error::invalid(format!("negative variable bound {bad}")));
            }
        }
        Ok(())
    }

    /// The equality system of `P` (without `var_bounds`).
    pub fn p_system(&self) -> Result<EqSystem> {
        if self.a_p.is_empty() {
            return EqSystem::new(vec![zeros(self.num_vars())], vec![Int::zero()]);
        }
        EqSystem::new(self.a_p.clone(), self.b_p.clone())
    }

    /// The equality system of `Q`.
    pub fn q_system(&self) -> Result<EqSystem> {
        if self.a_q.is_empty() {
            return EqSystem::new(vec![zeros(self.num_vars())], vec![Int::zero()]);
        }
        EqSystem::new(self.a_q.clone(), self.b_q.clone())
    }

    /// Per-coordinate upper bounds of `P`: `var_bounds` when present,
    /// otherwise exact coordinate-wise linear maxima. `Ok(None)` means `P`
    /// is empty; an unbounded coordinate is an error.
    pub fn coordinate_bounds(&self) -> Result<Option<Vec<Int>>> {
        if let Some(vb) = &self.var_bounds {
            return Ok(Some(vb.clone()));
        }
        self.p_system()?.coordinate_upper_bounds()
    }

    /// Verifies that `P` is a bounded polytope, via `var_bounds` or one
    /// linear maximization per coordinate direction.
    pub fn check_bounded(&self) -> Result<()> {
        self.validate()?;
        self.coordinate_bounds().map_err(|e| {
            Error::invalid(format!("P is not bounded: {e}"))
        })?;
        Ok(())
    }

    /// Membership of an integer point in `P` (nonnegativity, all rows, and
    /// `var_bounds` when present).
    pub fn is_part(&self, x: &[Int]) -> bool {
        if x.len() != self.num_vars() || x.iter().any(|v| v.is_negative()) {
            return false;
        }
        if let Some(vb) = &self.var_bounds {
            if x.iter().zip(vb).any(|(v, b)| v > b) {
                return false;
            }
        }
        self.a_p
            .iter()
            .zip(&self.b_p)
            .all(|(row, rhs)| &crate::arith::dot(row, x) == rhs)
    }

    /// Whether an aggregate vector satisfies all rows of `Q` and is
    /// nonnegative.
    pub fn aggregate_matches(&self, y: &[Int]) -> bool {
        y.len() == self.num_vars()
            && y.iter().all(|v| !v.is_negative())
            && self
                .a_q
                .iter()
                .zip(&self.b_q)
                .all(|(row, rhs)| &crate::arith::dot(row, y) == rhs)
    }
}

fn matrix_max_abs(mat: &[Vec<Int>]) -> Int {
    mat.iter()
        .flat_map(|row| row.iter())
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(Int::zero)
}

/// Inequality/equality rows over the structural variables of one polytope,
/// collected before slack realization.
struct RowSet {
    width: usize,
    rows: Vec<(Vec<Int>, Rel, Int)>,
}

impl RowSet {
    fn new(width: usize) -> Self {
        RowSet { width, rows: Vec::new() }
    }

    fn push(&mut self, coeffs: Vec<Int>, rel: Rel, rhs: Int) {
        assert_eq!(coeffs.len(), self.width, "row width mismatch");
        self.rows.push((coeffs, rel, rhs));
    }

    fn le(&mut self, coeffs: Vec<Int>, rhs: Int) {
        self.push(coeffs, Rel::Le, rhs);
    }

    fn eq(&mut self, coeffs: Vec<Int>, rhs: Int) {
        self.push(coeffs, Rel::Eq, rhs);
    }

    fn ge(&mut self, coeffs: Vec<Int>, rhs: Int) {
        self.push(coeffs, Rel::Ge, rhs);
    }

    fn slack_count(&self) -> usize {
        self.rows.iter().filter(|(_, rel, _)| *rel != Rel::Eq).count()
    }

    /// Equality realization: widen every row to `total` columns and give
    /// each inequality the next slack column starting at `slack_from`.
    /// `>=` rows are negated so every slack coefficient is `+1`.
    fn realize(&self, slack_from: usize, total: usize) -> (Vec<Vec<Int>>, Vec<Int>) {
        let mut mat = Vec::with_capacity(self.rows.len());
        let mut rhs = Vec::with_capacity(self.rows.len());
        let mut next = slack_from;
        for (coeffs, rel, b) in &self.rows {
            let mut row = zeros(total);
            let negate = *rel == Rel::Ge;
            for (j, v) in coeffs.iter().enumerate() {
                row[j] = if negate { -v } else { v.clone() };
            }
            if *rel != Rel::Eq {
                row[next] = int(1);
                next += 1;
            }
            mat.push(row);
            rhs.push(if negate { -b } else { b.clone() });
        }
        (mat, rhs)
    }
}

/// Assembles the two row sets into a [`PQRep`]. `bounds`, when given, must
/// already cover the full width `structural + slacks(P) + slacks(Q)`;
/// builders produce it as `[structural bounds, P-inequality bounds in row
/// order, Q-inequality bounds in row order]`.
fn assemble(
    structural: usize,
    p_rows: &RowSet,
    q_rows: &RowSet,
    m: Int,
    bounds: Option<Vec<Int>>,
) -> PQRep {
    assert_eq!(p_rows.width, structural);
    assert_eq!(q_rows.width, structural);
    let sp = p_rows.slack_count();
    let sq = q_rows.slack_count();
    let total = structural + sp + sq;
    let (a_p, b_p) = p_rows.realize(structural, total);
    let (a_q, b_q) = q_rows.realize(structural + sp, total);
    if let Some(vb) = &bounds {
        assert_eq!(vb.len(), total, "bounds do not cover all columns");
    }
    PQRep { a_p, b_p, a_q, b_q, m, var_bounds: bounds }
}

fn require_vec(
    v: &Option<Vec<Int>>,
    dim: usize,
    objective: Objective,
    which: &str,
) -> Result<Vec<Int>> {
    let v = v.as_ref().ok_or_else(|| {
        Error::invalid(format!("objective {} requires {which} load bounds", objective.as_str()))
    })?;
    if v.len() != dim {
        return Err(Error::invalid(format!(
            "{which} load bounds have {} entries for {dim} dimensions",
            v.len()
        )));
    }
    if let Some(bad) = v.iter().find(|t| t.is_negative()) {
        return Err(Error::invalid(format!("negative load bound {bad}")));
    }
    Ok(v.clone())
}

/// Resolves the per-dimension load window `[lo, hi]` an objective imposes:
/// `cmax` bounds only from above, `cmin` only from below (with a vacuous
/// finite ceiling to keep `P` bounded), `cenvy` from both sides.
fn load_window(
    objective: Objective,
    lower: &Option<Vec<Int>>,
    upper: &Option<Vec<Int>>,
    vacuous_hi: Vec<Int>,
) -> Result<(Vec<Int>, Vec<Int>)> {
    let dim = vacuous_hi.len();
    match objective {
        Objective::Cmax => Ok((zeros(dim), require_vec(upper, dim, objective, "upper")?)),
        Objective::Cmin => Ok((require_vec(lower, dim, objective, "lower")?, vacuous_hi)),
        Objective::Cenvy => Ok((
            require_vec(lower, dim, objective, "lower")?,
            require_vec(upper, dim, objective, "upper")?,
        )),
    }
}

/// Model for identical machines with scalar load thresholds.
///
/// One part stands for one machine and carries a job-count vector `c` plus
/// the window slack. The window rows are, per objective:
///
/// * `cmax`:  `p·c + t = u`
/// * `cmin`:  `p·c + t1 = l + 2*pmax` and `-p·c + t2 = -l`
/// * `cenvy`: `p·c + t1 = u` and `-p·c + t2 = -l`
///
/// The `cmin` ceiling `l + 2*pmax` is valid because whenever every machine
/// can be loaded to at least `l`, moving single jobs off any machine loaded
/// above `l + pmax` keeps all machines at `l` or more, so some witness uses
/// only part loads below the ceiling.
pub fn build_identical(inst: &Instance) -> Result<PQRep> {
    inst.validate()?;
    let inst = inst.canonicalize();
    let d = inst.d();
    if d == 0 {
        return Err(Error::invalid("at least one job type is required"));
    }
    let need = |o: &Option<Int>, which: &str| {
        o.clone().ok_or_else(|| {
            Error::invalid(format!(
                "objective {} requires {which} threshold",
                inst.objective.as_str()
            ))
        })
    };
    let mut p_rows = RowSet::new(d);
    match inst.objective {
        Objective::Cmax => {
            p_rows.le(inst.p.clone(), need(&inst.upper, "an upper")?);
        }
        Objective::Cmin => {
            let lo = need(&inst.lower, "a lower")?;
            p_rows.le(inst.p.clone(), &lo + int(2) * inst.pmax());
            p_rows.ge(inst.p.clone(), lo);
        }
        Objective::Cenvy => {
            p_rows.le(inst.p.clone(), need(&inst.upper, "an upper")?);
            p_rows.ge(inst.p.clone(), need(&inst.lower, "a lower")?);
        }
    }
    let mut q_rows = RowSet::new(d);
    for (k, nk) in inst.n.iter().enumerate() {
        let mut row = zeros(d);
        row[k] = int(1);
        q_rows.eq(row, nk.clone());
    }
    Ok(assemble(d, &p_rows, &q_rows, inst.m.clone(), None))
}

/// One job kind of a [`ComplexInstance`]: a deadline, a vector-valued
/// processing time, a class label and a multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJobType {
    #[serde(with = "crate::io::int_scalar")]
    pub deadline: Int,
    #[serde(with = "crate::io::int_vec")]
    pub p: Vec<Int>,
    /// Class label, `1`-based.
    pub class: usize,
    #[serde(with = "crate::io::int_scalar")]
    pub n: Int,
}

/// Scheduling input with deadlines, vector loads, class budgets and a
/// per-machine job-count cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexInstance {
    /// One entry per distinct (deadline, processing vector, class) tuple,
    /// sorted by nondecreasing deadline.
    pub types: Vec<ComplexJobType>,
    #[serde(with = "crate::io::int_scalar")]
    pub m: Int,
    pub objective: Objective,
    /// Maximum number of distinct classes per machine.
    #[serde(with = "crate::io::int_scalar")]
    pub class_cap: Int,
    /// Maximum number of jobs per machine.
    #[serde(with = "crate::io::int_scalar")]
    pub size_cap: Int,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::io::int_vec_opt")]
    pub lower: Option<Vec<Int>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::io::int_vec_opt")]
    pub upper: Option<Vec<Int>>,
}

impl ComplexInstance {
    fn validate(&self) -> Result<()> {
        if self.types.is_empty() {
            return Err(Error::invalid("at least one job type is required"));
        }
        let dim = self.types[0].p.len();
        if dim == 0 {
            return Err(Error::invalid("processing vectors must have at least one dimension"));
        }
        for t in &self.types {
            if t.p.len() != dim {
                return Err(Error::invalid("processing vectors have mixed dimensions"));
            }
            if let Some(bad) = t.p.iter().find(|v| !v.is_positive()) {
                return Err(Error::invalid(format!("processing time {bad} is not positive")));
            }
            if t.n.is_negative() {
                return Err(Error::invalid(format!("multiplicity {} is negative", t.n)));
            }
            if t.deadline.is_negative() {
                return Err(Error::invalid(format!("deadline {} is negative", t.deadline)));
            }
            if t.class == 0 {
                return Err(Error::invalid("class labels are 1-based"));
            }
        }
        if self.types.windows(2).any(|w| w[0].deadline > w[1].deadline) {
            return Err(Error::invalid("deadlines must be sorted nondecreasingly"));
        }
        if !self.m.is_positive() {
            return Err(Error::invalid(format!("machine count {} is not positive", self.m)));
        }
        if self.class_cap.is_negative() || self.size_cap.is_negative() {
            return Err(Error::invalid("caps must be nonnegative"));
        }
        Ok(())
    }

    /// Types with identical (deadline, processing vector, class) merged by
    /// summing multiplicities, keeping first-occurrence order.
    fn merged_types(&self) -> Vec<ComplexJobType> {
        let mut out: Vec<ComplexJobType> = Vec::new();
        for t in &self.types {
            match out
                .iter_mut()
                .find(|o| o.deadline == t.deadline && o.p == t.p && o.class == t.class)
            {
                Some(o) => o.n += &t.n,
                None => out.push(t.clone()),
            }
        }
        out
    }
}

/// Indices of the distinct deadline each type belongs to, plus the distinct
/// deadline values in ascending order. Types must already be sorted.
fn deadline_groups(deadlines: &[&Int]) -> (Vec<usize>, Vec<Int>) {
    let mut distinct: Vec<Int> = Vec::new();
    let mut index = Vec::with_capacity(deadlines.len());
    for dl in deadlines {
        if distinct.last() != Some(*dl) {
            distinct.push((*dl).clone());
        }
        index.push(distinct.len() - 1);
    }
    (index, distinct)
}

/// Model for the deadline/vector/class/cap scheduling generalization.
///
/// A part carries the job counts `c`, per-class totals `x`, 0/1 class
/// activations `z`, and slacks. The count rows tie `x_i` to the jobs of
/// class `i` in `c`; the two activation rows with the large constant
/// `nbar = sum(n)` force `z_i = 1` exactly when `x_i > 0` (over the
/// integers); the budget row caps the number of active classes.
pub fn build_complex(ci: &ComplexInstance) -> Result<PQRep> {
    ci.validate()?;
    let types = ci.merged_types();
    let d = types.len();
    let dim = types[0].p.len();
    let classes = types.iter().map(|t| t.class).max().unwrap_or(0);
    let (didx, deadlines) = deadline_groups(&types.iter().map(|t| &t.deadline).collect::<Vec<_>>());
    let d_sharp = deadlines.len();
    let nbar: Int = types.iter().map(|t| t.n.clone()).sum();
    let vacuous_hi: Vec<Int> = (0..dim)
        .map(|i| types.iter().map(|t| &t.p[i] * &t.n).sum())
        .collect();
    let (lo, hi) = load_window(ci.objective, &ci.lower, &ci.upper, vacuous_hi)?;

    let structural = d + 2 * classes;
    let col_x = |i: usize| d + i;
    let col_z = |i: usize| d + classes + i;

    let mut p_rows = RowSet::new(structural);
    // Job-count cap.
    let mut row = zeros(structural);
    for col in row.iter_mut().take(d) {
        *col = int(1);
    }
    p_rows.le(row, ci.size_cap.clone());
    // Deadline prefixes: jobs due by the j-th deadline fit before it, in
    // every dimension, when run in deadline order.
    for (j, dl) in deadlines.iter().enumerate() {
        for i in 0..dim {
            let mut row = zeros(structural);
            for (k, t) in types.iter().enumerate() {
                if didx[k] <= j {
                    row[k] = t.p[i].clone();
                }
            }
            p_rows.le(row, dl.clone());
        }
    }
    // Per-class job totals.
    for i in 0..classes {
        let mut row = zeros(structural);
        for (k, t) in types.iter().enumerate() {
            if t.class == i + 1 {
                row[k] = int(1);
            }
        }
        row[col_x(i)] = int(-1);
        p_rows.eq(row, Int::zero());
    }
    // Activation: nbar*x_i >= z_i kills z_i when the class is unused.
    for i in 0..classes {
        let mut row = zeros(structural);
        row[col_x(i)] = nbar.clone();
        row[col_z(i)] = int(-1);
        p_rows.ge(row, Int::zero());
    }
    // Activation: nbar*z_i >= x_i forces z_i = 1 when the class is used.
    for i in 0..classes {
        let mut row = zeros(structural);
        row[col_z(i)] = nbar.clone();
        row[col_x(i)] = int(-1);
        p_rows.ge(row, Int::zero());
    }
    for i in 0..classes {
        let mut row = zeros(structural);
        row[col_z(i)] = int(1);
        p_rows.le(row, int(1));
    }
    // Class budget.
    let mut row = zeros(structural);
    for i in 0..classes {
        row[col_z(i)] = int(1);
    }
    p_rows.le(row, ci.class_cap.clone());
    // Load window per dimension.
    for i in 0..dim {
        let mut row = zeros(structural);
        for (k, t) in types.iter().enumerate() {
            row[k] = t.p[i].clone();
        }
        p_rows.le(row, hi[i].clone());
    }
    for i in 0..dim {
        let mut row = zeros(structural);
        for (k, t) in types.iter().enumerate() {
            row[k] = t.p[i].clone();
        }
        p_rows.ge(row, lo[i].clone());
    }

    let mut q_rows = RowSet::new(structural);
    for (k, t) in types.iter().enumerate() {
        let mut row = zeros(structural);
        row[k] = int(1);
        q_rows.eq(row, t.n.clone());
    }

    let pq = assemble(structural, &p_rows, &q_rows, ci.m.clone(), None);
    debug_assert_eq!(
        pq.num_vars(),
        d + 2 * classes + (2 + d_sharp * dim + 2 * dim + 3 * classes)
    );
    Ok(pq)
}

/// One job kind of a [`SetupInstance`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetupJobType {
    #[serde(with = "crate::io::int_vec")]
    pub p: Vec<Int>,
    /// Class label, `1`-based index into `setups`.
    pub class: usize,
    #[serde(with = "crate::io::int_scalar")]
    pub n: Int,
}

/// Scheduling input where running any job of a class on a machine adds that
/// class's setup time to the machine load, once per machine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetupInstance {
    pub types: Vec<SetupJobType>,
    #[serde(with = "crate::io::int_scalar")]
    pub m: Int,
    pub objective: Objective,
    /// Setup time per class; its length is the class count.
    #[serde(with = "crate::io::int_vec")]
    pub setups: Vec<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::io::int_vec_opt")]
    pub lower: Option<Vec<Int>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::io::int_vec_opt")]
    pub upper: Option<Vec<Int>>,
}

impl SetupInstance {
    fn validate(&self) -> Result<()> {
        if self.types.is_empty() {
            return Err(Error::invalid("at least one job type is required"));
        }
        if self.setups.is_empty() {
            return Err(Error::invalid("at least one class is required"));
        }
        let dim = self.types[0].p.len();
        if dim == 0 {
            return Err(Error::invalid("processing vectors must have at least one dimension"));
        }
        for t in &self.types {
            if t.p.len() != dim {
                return Err(Error::invalid("processing vectors have mixed dimensions"));
            }
            if let Some(bad) = t.p.iter().find(|v| !v.is_positive()) {
                return Err(Error::invalid(format!("processing time {bad} is not positive")));
            }
            if t.n.is_negative() {
                return Err(Error::invalid(format!("multiplicity {} is negative", t.n)));
            }
            if t.class == 0 || t.class > self.setups.len() {
                return Err(Error::invalid(format!(
                    "class label {} outside 1..={}",
                    t.class,
                    self.setups.len()
                )));
            }
        }
        if let Some(bad) = self.setups.iter().find(|s| s.is_negative()) {
            return Err(Error::invalid(format!("setup time {bad} is negative")));
        }
        if !self.m.is_positive() {
            return Err(Error::invalid(format!("machine count {} is not positive", self.m)));
        }
        Ok(())
    }

    fn merged_types(&self) -> Vec<SetupJobType> {
        let mut out: Vec<SetupJobType> = Vec::new();
        for t in &self.types {
            match out.iter_mut().find(|o| o.p == t.p && o.class == t.class) {
                Some(o) => o.n += &t.n,
                None => out.push(t.clone()),
            }
        }
        out
    }
}

/// Model for class setup times: the activation bookkeeping of
/// [`build_complex`], but the setups enter the load window rows, so a class
/// that appears on a machine pays its setup inside the load bounds.
pub fn build_setup(si: &SetupInstance) -> Result<PQRep> {
    si.validate()?;
    let types = si.merged_types();
    let d = types.len();
    let dim = types[0].p.len();
    let classes = si.setups.len();
    let nbar: Int = types.iter().map(|t| t.n.clone()).sum();
    let setup_total: Int = si.setups.iter().cloned().sum();
    let vacuous_hi: Vec<Int> = (0..dim)
        .map(|i| types.iter().map(|t| &t.p[i] * &t.n).sum::<Int>() + &setup_total)
        .collect();
    let (lo, hi) = load_window(si.objective, &si.lower, &si.upper, vacuous_hi)?;

    let structural = d + 2 * classes;
    let col_x = |i: usize| d + i;
    let col_z = |i: usize| d + classes + i;

    let mut p_rows = RowSet::new(structural);
    for i in 0..classes {
        let mut row = zeros(structural);
        for (k, t) in types.iter().enumerate() {
            if t.class == i + 1 {
                row[k] = int(1);
            }
        }
        row[col_x(i)] = int(-1);
        p_rows.eq(row, Int::zero());
    }
    for i in 0..classes {
        let mut row = zeros(structural);
        row[col_x(i)] = nbar.clone();
        row[col_z(i)] = int(-1);
        p_rows.ge(row, Int::zero());
    }
    for i in 0..classes {
        let mut row = zeros(structural);
        row[col_z(i)] = nbar.clone();
        row[col_x(i)] = int(-1);
        p_rows.ge(row, Int::zero());
    }
    for i in 0..classes {
        let mut row = zeros(structural);
        row[col_z(i)] = int(1);
        p_rows.le(row, int(1));
    }
    // Load window per dimension, with setups of active classes included.
    let loaded_row = |i: usize| {
        let mut row = zeros(structural);
        for (k, t) in types.iter().enumerate() {
            row[k] = t.p[i].clone();
        }
        for (j, s) in si.setups.iter().enumerate() {
            row[col_z(j)] = s.clone();
        }
        row
    };
    for i in 0..dim {
        p_rows.le(loaded_row(i), hi[i].clone());
    }
    for i in 0..dim {
        p_rows.ge(loaded_row(i), lo[i].clone());
    }

    let mut q_rows = RowSet::new(structural);
    for (k, t) in types.iter().enumerate() {
        let mut row = zeros(structural);
        row[k] = int(1);
        q_rows.eq(row, t.n.clone());
    }

    Ok(assemble(structural, &p_rows, &q_rows, si.m.clone(), None))
}

/// One job kind of a [`SumWuInstance`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumWuJobType {
    #[serde(with = "crate::io::int_scalar")]
    pub due: Int,
    #[serde(with = "crate::io::int_vec")]
    pub p: Vec<Int>,
    #[serde(with = "crate::io::int_scalar")]
    pub weight: Int,
    #[serde(with = "crate::io::int_scalar")]
    pub n: Int,
}

/// Input for minimizing the weighted number of late jobs: decide whether the
/// jobs missing their due date can be kept at total weight at most
/// `late_weight_cap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumWuInstance {
    /// One entry per distinct (due date, processing vector, weight) tuple,
    /// sorted by nondecreasing due date.
    pub types: Vec<SumWuJobType>,
    #[serde(with = "crate::io::int_scalar")]
    pub m: Int,
    #[serde(with = "crate::io::int_scalar")]
    pub late_weight_cap: Int,
}

impl SumWuInstance {
    fn validate(&self) -> Result<()> {
        if self.types.is_empty() {
            return Err(Error::invalid("at least one job type is required"));
        }
        let dim = self.types[0].p.len();
        if dim == 0 {
            return Err(Error::invalid("processing vectors must have at least one dimension"));
        }
        for t in &self.types {
            if t.p.len() != dim {
                return Err(Error::invalid("processing vectors have mixed dimensions"));
            }
            if let Some(bad) = t.p.iter().find(|v| !v.is_positive()) {
                return Err(Error::invalid(format!("processing time {bad} is not positive")));
            }
            if t.n.is_negative() || t.weight.is_negative() || t.due.is_negative() {
                return Err(Error::invalid("multiplicities, weights and due dates must be nonnegative"));
            }
        }
        if self.types.windows(2).any(|w| w[0].due > w[1].due) {
            return Err(Error::invalid("due dates must be sorted nondecreasingly"));
        }
        if !self.m.is_positive() {
            return Err(Error::invalid(format!("machine count {} is not positive", self.m)));
        }
        if self.late_weight_cap.is_negative() {
            return Err(Error::invalid("late weight cap must be nonnegative"));
        }
        Ok(())
    }

    fn merged_types(&self) -> Vec<SumWuJobType> {
        let mut out: Vec<SumWuJobType> = Vec::new();
        for t in &self.types {
            match out
                .iter_mut()
                .find(|o| o.due == t.due && o.p == t.p && o.weight == t.weight)
            {
                Some(o) => o.n += &t.n,
                None => out.push(t.clone()),
            }
        }
        out
    }
}

/// Model for the weighted-late-jobs decision.
///
/// A part holds the jobs one machine finishes on time, in due-date order;
/// the prefix rows check every due date in every dimension. The aggregate
/// may select any subset of the jobs (`c <= n` in `Q`), and the selected
/// weight, accumulated through the `x` coordinate, must reach the total
/// weight minus the cap.
pub fn build_sumwu(si: &SumWuInstance) -> Result<PQRep> {
    si.validate()?;
    let types = si.merged_types();
    let d = types.len();
    let dim = types[0].p.len();
    let (didx, dues) = deadline_groups(&types.iter().map(|t| &t.due).collect::<Vec<_>>());
    let total_weight: Int = types.iter().map(|t| &t.weight * &t.n).sum();

    let structural = d + 1;
    let col_x = d;

    let mut p_rows = RowSet::new(structural);
    for (j, due) in dues.iter().enumerate() {
        for i in 0..dim {
            let mut row = zeros(structural);
            for (k, t) in types.iter().enumerate() {
                if didx[k] <= j {
                    row[k] = t.p[i].clone();
                }
            }
            p_rows.le(row, due.clone());
        }
    }
    let mut row = zeros(structural);
    for (k, t) in types.iter().enumerate() {
        row[k] = t.weight.clone();
    }
    row[col_x] = int(-1);
    p_rows.eq(row, Int::zero());

    let mut q_rows = RowSet::new(structural);
    let mut row = zeros(structural);
    row[col_x] = int(1);
    q_rows.ge(row, &total_weight - &si.late_weight_cap);
    for (k, t) in types.iter().enumerate() {
        let mut row = zeros(structural);
        row[k] = int(1);
        q_rows.le(row, t.n.clone());
    }

    // Enumeration box: per-type counts from each type's own prefix row, the
    // weight total they imply, each row's slack by its right-hand side.
    let c_bound: Vec<Int> = types
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let due = &dues[didx[k]];
            t.p.iter().map(|pv| due.div_floor(pv)).min().unwrap()
        })
        .collect();
    let mut bounds: Vec<Int> = c_bound.clone();
    bounds.push(types.iter().zip(&c_bound).map(|(t, b)| &t.weight * b).sum());
    for due in &dues {
        for _ in 0..dim {
            bounds.push(due.clone());
        }
    }
    bounds.push(si.late_weight_cap.clone());
    for t in &types {
        bounds.push(t.n.clone());
    }

    Ok(assemble(structural, &p_rows, &q_rows, si.m.clone(), Some(bounds)))
}

/// A block-structured ILP in which every block repeats the same data: shared
/// linking rows `sum_i C x^(i) = b0` on top, the same local system
/// `B x^(i) = b1` per block, one shared objective `c` and bound vector `u`,
/// and a target `T` for the summed objective.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformNFold {
    /// Linking matrix `C`, applied to every block.
    #[serde(with = "crate::io::int_mat")]
    pub linking: Vec<Vec<Int>>,
    /// Local matrix `B`, applied to every block.
    #[serde(with = "crate::io::int_mat")]
    pub local: Vec<Vec<Int>>,
    /// Right-hand side of the linking rows.
    #[serde(with = "crate::io::int_vec")]
    pub linking_rhs: Vec<Int>,
    /// Right-hand side of each block's local rows.
    #[serde(with = "crate::io::int_vec")]
    pub local_rhs: Vec<Int>,
    /// Per-block objective vector.
    #[serde(with = "crate::io::int_vec")]
    pub objective: Vec<Int>,
    /// Per-block variable upper bounds (finite).
    #[serde(with = "crate::io::int_vec")]
    pub upper: Vec<Int>,
    /// Number of blocks.
    #[serde(with = "crate::io::int_scalar")]
    pub blocks: Int,
    /// The summed objective must reach at least this value.
    #[serde(with = "crate::io::int_scalar")]
    pub target: Int,
}

impl UniformNFold {
    pub fn num_block_vars(&self) -> usize {
        self.upper.len()
    }

    pub fn num_linking_rows(&self) -> usize {
        self.linking.len()
    }

    pub fn num_local_rows(&self) -> usize {
        self.local.len()
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.num_block_vars();
        if t == 0 {
            return Err(Error::invalid("blocks must have at least one variable"));
        }
        for (what, mat) in [("linking", &self.linking), ("local", &self.local)] {
            if let Some(bad) = mat.iter().find(|row| row.len() != t) {
                return Err(Error::invalid(format!(
                    "{what} row of width {} for {t} block variables",
                    bad.len()
                )));
            }
        }
        if self.linking.len() != self.linking_rhs.len() {
            return Err(Error::invalid("linking rows and right-hand side differ in length"));
        }
        if self.local.len() != self.local_rhs.len() {
            return Err(Error::invalid("local rows and right-hand side differ in length"));
        }
        if self.objective.len() != t {
            return Err(Error::invalid("objective width differs from block width"));
        }
        if !self.blocks.is_positive() {
            return Err(Error::invalid(format!("block count {} is not positive", self.blocks)));
        }
        if let Some(bad) = self.upper.iter().find(|v| v.is_negative()) {
            return Err(Error::invalid(format!("negative variable bound {bad}")));
        }
        // The part layout stores C x and c^T x in nonnegative coordinates,
        // so those products must be nonnegative for every candidate block.
        if self.linking.iter().flatten().any(|v| v.is_negative()) {
            return Err(Error::invalid("linking coefficients must be nonnegative"));
        }
        if self.objective.iter().any(|v| v.is_negative()) {
            return Err(Error::invalid("objective coefficients must be nonnegative"));
        }
        if self.linking_rhs.iter().any(|v| v.is_negative()) {
            return Err(Error::invalid("linking right-hand side must be nonnegative"));
        }
        if self.target.is_negative() {
            return Err(Error::invalid("target must be nonnegative"));
        }
        Ok(())
    }

    /// Builds a uniform instance from per-block data, verifying that every
    /// block repeats the same matrices, bounds and objective.
    #[allow(clippy::too_many_arguments)]
    pub fn from_blocks(
        linking: Vec<Vec<Vec<Int>>>,
        local: Vec<Vec<Vec<Int>>>,
        linking_rhs: Vec<Int>,
        local_rhs: Vec<Vec<Int>>,
        objective: Vec<Vec<Int>>,
        upper: Vec<Vec<Int>>,
        target: Int,
    ) -> Result<UniformNFold> {
        let blocks = linking.len();
        if blocks == 0 {
            return Err(Error::invalid("at least one block is required"));
        }
        if [local.len(), local_rhs.len(), objective.len(), upper.len()]
            .iter()
            .any(|l| *l != blocks)
        {
            return Err(Error::invalid("per-block lists have mixed lengths"));
        }
        let uniform = linking.windows(2).all(|w| w[0] == w[1])
            && local.windows(2).all(|w| w[0] == w[1])
            && local_rhs.windows(2).all(|w| w[0] == w[1])
            && objective.windows(2).all(|w| w[0] == w[1])
            && upper.windows(2).all(|w| w[0] == w[1]);
        if !uniform {
            return Err(Error::invalid("blocks are not uniform"));
        }
        let nf = UniformNFold {
            linking: linking.into_iter().next().unwrap(),
            local: local.into_iter().next().unwrap(),
            linking_rhs,
            local_rhs: local_rhs.into_iter().next().unwrap(),
            objective: objective.into_iter().next().unwrap(),
            upper: upper.into_iter().next().unwrap(),
            blocks: Int::from(blocks as u64),
            target,
        };
        nf.validate()?;
        Ok(nf)
    }
}

/// Model for uniform block ILPs. A part is one block's assignment `x`
/// together with its bound slack `z = u - x`, its linking contribution
/// `g = C x`, and its objective value `v = c^T x`; `Q` requires the linking
/// contributions to sum to the linking right-hand side and the values to sum
/// to at least the target.
pub fn build_nfold(nf: &UniformNFold) -> Result<PQRep> {
    nf.validate()?;
    let t = nf.num_block_vars();
    let r = nf.num_linking_rows();
    let structural = 2 * t + r + 1;
    let col_x = |j: usize| j;
    let col_z = |j: usize| t + j;
    let col_g = |k: usize| 2 * t + k;
    let col_v = 2 * t + r;

    let mut p_rows = RowSet::new(structural);
    for (row_b, rhs) in nf.local.iter().zip(&nf.local_rhs) {
        let mut row = zeros(structural);
        for (j, v) in row_b.iter().enumerate() {
            row[col_x(j)] = v.clone();
        }
        p_rows.eq(row, rhs.clone());
    }
    for j in 0..t {
        let mut row = zeros(structural);
        row[col_x(j)] = int(1);
        row[col_z(j)] = int(1);
        p_rows.eq(row, nf.upper[j].clone());
    }
    for (k, row_c) in nf.linking.iter().enumerate() {
        let mut row = zeros(structural);
        for (j, v) in row_c.iter().enumerate() {
            row[col_x(j)] = v.clone();
        }
        row[col_g(k)] = int(-1);
        p_rows.eq(row, Int::zero());
    }
    let mut row = zeros(structural);
    for (j, v) in nf.objective.iter().enumerate() {
        row[col_x(j)] = v.clone();
    }
    row[col_v] = int(-1);
    p_rows.eq(row, Int::zero());

    let mut q_rows = RowSet::new(structural);
    let mut row = zeros(structural);
    row[col_v] = int(1);
    q_rows.ge(row, nf.target.clone());
    for (k, rhs) in nf.linking_rhs.iter().enumerate() {
        let mut row = zeros(structural);
        row[col_g(k)] = int(1);
        q_rows.eq(row, rhs.clone());
    }

    // Enumeration box; the single slack (for the target row) is bounded by
    // the best per-block value, which never cuts off a decomposition.
    let best_value: Int = nf.objective.iter().zip(&nf.upper).map(|(c, u)| c * u).sum();
    let mut bounds = Vec::with_capacity(structural + 1);
    bounds.extend(nf.upper.iter().cloned());
    bounds.extend(nf.upper.iter().cloned());
    for row_c in &nf.linking {
        bounds.push(row_c.iter().zip(&nf.upper).map(|(c, u)| c * u).sum());
    }
    bounds.push(best_value.clone());
    bounds.push(best_value);

    Ok(assemble(structural, &p_rows, &q_rows, nf.blocks.clone(), Some(bounds)))
}

/// Input for min-sum weighted bin packing: all items must be packed into
/// `bins` bins of capacity `capacity`, where the bin with index `i` costs
/// `i` times the total weight it holds, and the packing's total cost may be
/// at most `cost_cap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MswbpInstance {
    /// Distinct item sizes, positive.
    #[serde(with = "crate::io::int_vec")]
    pub p: Vec<Int>,
    /// Multiplicity per item size.
    #[serde(with = "crate::io::int_vec")]
    pub n: Vec<Int>,
    /// Weight per item size.
    #[serde(with = "crate::io::int_vec")]
    pub w: Vec<Int>,
    #[serde(with = "crate::io::int_scalar")]
    pub capacity: Int,
    /// Number of bins to use; at most the item count.
    #[serde(with = "crate::io::int_scalar")]
    pub bins: Int,
    #[serde(with = "crate::io::int_scalar")]
    pub cost_cap: Int,
}

impl MswbpInstance {
    fn validate(&self) -> Result<()> {
        if self.p.is_empty() {
            return Err(Error::invalid("at least one item size is required"));
        }
        if self.p.len() != self.n.len() || self.p.len() != self.w.len() {
            return Err(Error::invalid("sizes, multiplicities and weights differ in length"));
        }
        if let Some(bad) = self.p.iter().find(|v| !v.is_positive()) {
            return Err(Error::invalid(format!("item size {bad} is not positive")));
        }
        if self.n.iter().any(|v| v.is_negative()) || self.w.iter().any(|v| v.is_negative()) {
            return Err(Error::invalid("multiplicities and weights must be nonnegative"));
        }
        if !self.capacity.is_positive() {
            return Err(Error::invalid(format!("bin capacity {} is not positive", self.capacity)));
        }
        if !self.bins.is_positive() {
            return Err(Error::invalid(format!("bin count {} is not positive", self.bins)));
        }
        let items: Int = self.n.iter().cloned().sum();
        if self.bins > items {
            return Err(Error::invalid(format!(
                "bin count {} exceeds item count {items}",
                self.bins
            )));
        }
        if self.cost_cap.is_negative() {
            return Err(Error::invalid("cost cap must be nonnegative"));
        }
        Ok(())
    }

    fn merged(&self) -> (Vec<Int>, Vec<Int>, Vec<Int>) {
        let mut p: Vec<Int> = Vec::new();
        let mut n: Vec<Int> = Vec::new();
        let mut w: Vec<Int> = Vec::new();
        for ((pv, nv), wv) in self.p.iter().zip(&self.n).zip(&self.w) {
            match p.iter().position(|o| o == pv).filter(|&k| &w[k] == wv) {
                Some(k) => n[k] += nv,
                None => {
                    p.push(pv.clone());
                    n.push(nv.clone());
                    w.push(wv.clone());
                }
            }
        }
        (p, n, w)
    }
}

/// Model for min-sum weighted bin packing.
///
/// A part is one bin: item counts `c`, a unit vector `x` selecting the bin
/// index, helper values `t` with `t_i >= v` forced exactly at the selected
/// index (via the big constant `W = wmax * min(capacity, items)`), the bin
/// weight `v`, and the cost bound `z = sum_i i*t_i`. `Q` forces every index
/// to be picked once, all items to be packed, and the costs to sum to at
/// most the cap.
pub fn build_mswbp(bi: &MswbpInstance) -> Result<PQRep> {
    bi.validate()?;
    let (p, n, w) = bi.merged();
    let d = p.len();
    let m = match bi.bins.to_u64() {
        Some(v) if v <= MAX_MATERIALIZED_PARTS => v as usize,
        _ => {
            return Err(Error::invalid(format!(
                "bin count {} is too large to materialize per-bin columns",
                bi.bins
            )))
        }
    };
    let items: Int = n.iter().cloned().sum();
    let wmax: Int = w.iter().max().cloned().unwrap_or_else(Int::zero);
    let big: Int = &wmax * bi.capacity.clone().min(items);

    let structural = d + 2 * m + 2;
    let col_x = |i: usize| d + i;
    let col_t = |i: usize| d + m + i;
    let col_v = d + 2 * m;
    let col_z = d + 2 * m + 1;

    let mut p_rows = RowSet::new(structural);
    // Items fit the bin.
    let mut row = zeros(structural);
    for (k, pv) in p.iter().enumerate() {
        row[k] = pv.clone();
    }
    p_rows.le(row, bi.capacity.clone());
    // Exactly one bin index is selected.
    let mut row = zeros(structural);
    for i in 0..m {
        row[col_x(i)] = int(1);
    }
    p_rows.eq(row, int(1));
    // v is the weight held by the bin.
    let mut row = zeros(structural);
    for (k, wv) in w.iter().enumerate() {
        row[k] = wv.clone();
    }
    row[col_v] = int(-1);
    p_rows.eq(row, Int::zero());
    // t_i >= v at the selected index; vacuous elsewhere since v <= W.
    for i in 0..m {
        let mut row = zeros(structural);
        row[col_t(i)] = int(1);
        row[col_v] = int(-1);
        row[col_x(i)] = -&big;
        p_rows.ge(row, -&big);
    }
    for i in 0..m {
        let mut row = zeros(structural);
        row[col_t(i)] = int(1);
        p_rows.le(row, big.clone());
    }
    // z accumulates index times weight.
    let mut row = zeros(structural);
    for i in 0..m {
        row[col_t(i)] = Int::from((i + 1) as u64);
    }
    row[col_z] = int(-1);
    p_rows.eq(row, Int::zero());

    let mut q_rows = RowSet::new(structural);
    for (k, nv) in n.iter().enumerate() {
        let mut row = zeros(structural);
        row[k] = int(1);
        q_rows.eq(row, nv.clone());
    }
    for i in 0..m {
        let mut row = zeros(structural);
        row[col_x(i)] = int(1);
        q_rows.eq(row, int(1));
    }
    let mut row = zeros(structural);
    row[col_z] = int(1);
    q_rows.le(row, bi.cost_cap.clone());

    // Enumeration box, row-implied except for the cost-cap slack.
    let mut bounds = Vec::new();
    for pv in &p {
        bounds.push(bi.capacity.div_floor(pv));
    }
    for _ in 0..m {
        bounds.push(int(1));
    }
    for _ in 0..m {
        bounds.push(big.clone());
    }
    bounds.push(&wmax * &bi.capacity);
    let index_sum = Int::from((m * (m + 1) / 2) as u64);
    bounds.push(&big * &index_sum);
    bounds.push(bi.capacity.clone()); // capacity-row slack
    for _ in 0..m {
        bounds.push(int(2) * &big); // activation-row slacks
    }
    for _ in 0..m {
        bounds.push(big.clone()); // t-cap slacks
    }
    bounds.push(bi.cost_cap.clone()); // cost-cap slack

    Ok(assemble(structural, &p_rows, &q_rows, bi.bins.clone(), Some(bounds)))
}

/// The block-structured ILP equivalent to a [`PQRep`]: one block of `N`
/// variables per part plus a final block holding their sum. Linking rows
/// check `A_Q y = b_Q` and `sum_i x^(i) - y = 0`; each part block satisfies
/// `A_P x^(i) = b_P`; the sum block has no local rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NFoldILP {
    /// Columns of each part block within the linking rows: `[0; I]`.
    pub linking_main: Vec<Vec<Int>>,
    /// Columns of the final sum block within the linking rows: `[A_Q; -I]`.
    pub linking_last: Vec<Vec<Int>>,
    /// Local rows of each part block: `A_P`.
    pub local: Vec<Vec<Int>>,
    /// Right-hand side of the linking rows: `[b_Q; 0]`.
    pub linking_rhs: Vec<Int>,
    /// Right-hand side of each part block's local rows: `b_P`.
    pub local_rhs: Vec<Int>,
    /// Total number of blocks (parts plus the sum block).
    pub blocks: Int,
    /// Variable bounds within each part block, if the model has them.
    pub bounds_main: Option<Vec<Int>>,
    /// Variable bounds of the sum block (part bounds scaled by the part
    /// count).
    pub bounds_last: Option<Vec<Int>>,
}

impl NFoldILP {
    /// Number of linking rows.
    pub fn num_linking_rows(&self) -> usize {
        self.linking_rhs.len()
    }

    /// Number of local rows per part block.
    pub fn num_local_rows(&self) -> usize {
        self.local_rhs.len()
    }

    /// Number of variables per block.
    pub fn num_block_vars(&self) -> usize {
        self.linking_main.first().map(|r| r.len()).unwrap_or(0)
    }

    /// Total constraint rows: linking rows plus local rows of all part
    /// blocks (the sum block has none).
    pub fn num_rows(&self) -> Int {
        Int::from(self.num_linking_rows() as u64)
            + (&self.blocks - int(1)) * Int::from(self.num_local_rows() as u64)
    }

    /// Total variables over all blocks.
    pub fn num_vars(&self) -> Int {
        &self.blocks * Int::from(self.num_block_vars() as u64)
    }

    /// Materializes the full constraint matrix and right-hand side. Intended
    /// for small block counts; guarded accordingly.
    pub fn to_dense(&self, guards: &Guards) -> Result<(Vec<Vec<Int>>, Vec<Int>)> {
        let blocks = self
            .blocks
            .to_u64()
            .ok_or_else(|| Error::guard(format!("{} blocks cannot be materialized", self.blocks)))?;
        guards.check("n-fold blocks", blocks, guards.expanded_machines)?;
        let blocks = blocks as usize;
        let t = self.num_block_vars();
        let r = self.num_linking_rows();
        let cols = blocks * t;
        let mut mat = Vec::new();
        let mut rhs = Vec::new();
        for k in 0..r {
            let mut row = zeros(cols);
            for b in 0..blocks {
                let src = if b + 1 == blocks { &self.linking_last } else { &self.linking_main };
                for j in 0..t {
                    row[b * t + j] = src[k][j].clone();
                }
            }
            mat.push(row);
            rhs.push(self.linking_rhs[k].clone());
        }
        for b in 0..blocks - 1 {
            for (local_row, local_rhs) in self.local.iter().zip(&self.local_rhs) {
                let mut row = zeros(cols);
                for j in 0..t {
                    row[b * t + j] = local_row[j].clone();
                }
                mat.push(row);
                rhs.push(local_rhs.clone());
            }
        }
        Ok((mat, rhs))
    }
}

/// Rewrites a model as its equivalent block ILP. Solutions correspond one to
/// one: blocks `1..=m` are the parts and the final block is their sum.
pub fn to_nfold_ilp(pq: &PQRep) -> Result<NFoldILP> {
    pq.validate()?;
    let n = pq.num_vars();
    let mq = pq.num_q_rows();
    let mut linking_main = Vec::with_capacity(mq + n);
    let mut linking_last = Vec::with_capacity(mq + n);
    let mut linking_rhs = Vec::with_capacity(mq + n);
    for (row, rhs) in pq.a_q.iter().zip(&pq.b_q) {
        linking_main.push(zeros(n));
        linking_last.push(row.clone());
        linking_rhs.push(rhs.clone());
    }
    for j in 0..n {
        let mut main = zeros(n);
        main[j] = int(1);
        let mut last = zeros(n);
        last[j] = int(-1);
        linking_main.push(main);
        linking_last.push(last);
        linking_rhs.push(Int::zero());
    }
    Ok(NFoldILP {
        linking_main,
        linking_last,
        local: pq.a_p.clone(),
        linking_rhs,
        local_rhs: pq.b_p.clone(),
        blocks: &pq.m + int(1),
        bounds_main: pq.var_bounds.clone(),
        bounds_last: pq.var_bounds.as_ref().map(|vb| vb.iter().map(|v| v * &pq.m).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int_vec;
    use crate::guard::Guards;
    use crate::model::{Instance, Objective};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Int>> {
        rows.iter().map(|r| int_vec(r)).collect()
    }

    fn enumerate_p(pq: &PQRep, guards: &Guards) -> Vec<Vec<Int>> {
        let bounds = pq.coordinate_bounds().unwrap();
        match bounds {
            Some(b) => pq.p_system().unwrap().enumerate(Some(&b), guards).unwrap(),
            None => Vec::new(),
        }
    }

    #[test]
    fn identical_cmax_matches_worked_rows() {
        let inst = Instance::small(&[2, 3], &[2, 1], 2, Objective::Cmax)
            .unwrap()
            .with_bounds(None, Some(int(4)));
        let pq = build_identical(&inst).unwrap();
        assert_eq!(pq.a_p, mat(&[&[2, 3, 1]]));
        assert_eq!(pq.b_p, int_vec(&[4]));
        assert_eq!(pq.a_q, mat(&[&[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(pq.b_q, int_vec(&[2, 1]));
        assert_eq!(pq.m, int(2));
        assert_eq!(pq.var_bounds, None);
        pq.check_bounded().unwrap();
    }

    #[test]
    fn identical_cmin_widens_the_window_by_two_pmax() {
        let inst = Instance::small(&[2, 3], &[2, 1], 2, Objective::Cmin)
            .unwrap()
            .with_bounds(Some(int(3)), None);
        let pq = build_identical(&inst).unwrap();
        assert_eq!(pq.a_p, mat(&[&[2, 3, 1, 0], &[-2, -3, 0, 1]]));
        assert_eq!(pq.b_p, int_vec(&[9, -3]));
        pq.check_bounded().unwrap();
    }

    #[test]
    fn identical_cenvy_uses_both_thresholds() {
        let inst = Instance::small(&[2], &[4], 2, Objective::Cenvy)
            .unwrap()
            .with_bounds(Some(int(3)), Some(int(5)));
        let pq = build_identical(&inst).unwrap();
        assert_eq!(pq.a_p, mat(&[&[2, 1, 0], &[-2, 0, 1]]));
        assert_eq!(pq.b_p, int_vec(&[5, -3]));
    }

    #[test]
    fn identical_missing_threshold_is_rejected() {
        let inst = Instance::small(&[2], &[1], 1, Objective::Cmax).unwrap();
        assert!(build_identical(&inst).is_err());
        let inst = Instance::small(&[2], &[1], 1, Objective::Cenvy)
            .unwrap()
            .with_bounds(None, Some(int(4)));
        assert!(build_identical(&inst).is_err());
    }

    #[test]
    fn identical_zero_threshold_leaves_only_the_origin() {
        let inst = Instance::small(&[1], &[0], 1, Objective::Cmax)
            .unwrap()
            .with_bounds(None, Some(int(0)));
        let pq = build_identical(&inst).unwrap();
        let pts = enumerate_p(&pq, &Guards::default());
        assert_eq!(pts, vec![int_vec(&[0, 0])]);
    }

    #[test]
    fn identical_cmax_lattice_is_the_threshold_simplex() {
        let inst = Instance::small(&[2, 3], &[2, 1], 2, Objective::Cmax)
            .unwrap()
            .with_bounds(None, Some(int(4)));
        let pq = build_identical(&inst).unwrap();
        let pts = enumerate_p(&pq, &Guards::default());
        let expect = mat(&[&[0, 0, 4], &[0, 1, 1], &[1, 0, 2], &[2, 0, 0]]);
        assert_eq!(pts, expect);
        for pt in &pts {
            assert!(pq.is_part(pt));
        }
    }

    fn tiny_complex(objective: Objective) -> ComplexInstance {
        ComplexInstance {
            types: vec![
                ComplexJobType { deadline: int(5), p: int_vec(&[1]), class: 1, n: int(2) },
                ComplexJobType { deadline: int(5), p: int_vec(&[2]), class: 2, n: int(2) },
            ],
            m: int(2),
            objective,
            class_cap: int(1),
            size_cap: int(3),
            lower: Some(int_vec(&[0])),
            upper: Some(int_vec(&[3])),
        }
    }

    #[test]
    fn complex_dimensions_follow_the_closed_form() {
        let pq = build_complex(&tiny_complex(Objective::Cmax)).unwrap();
        let (d, k, d_sharp, m_dim) = (2, 2, 1, 1);
        assert_eq!(pq.num_vars(), d + 2 * k + (2 + d_sharp * m_dim + 2 * m_dim + 3 * k));
        assert_eq!(pq.num_q_rows(), d);
        pq.check_bounded().unwrap();
        assert_eq!(pq.delta_p(), int(4)); // activation constant = total jobs
    }

    #[test]
    fn complex_activation_rows_tie_z_to_class_use() {
        let mut ci = tiny_complex(Objective::Cmax);
        ci.class_cap = int(2);
        let pq = build_complex(&ci).unwrap();
        let pts = enumerate_p(&pq, &Guards::default());
        assert!(!pts.is_empty());
        for pt in &pts {
            // c over types of class 1 is pt[0], class 2 is pt[1];
            // x at 2..4, z at 4..6.
            assert_eq!(pt[2], pt[0]);
            assert_eq!(pt[3], pt[1]);
            for cls in 0..2 {
                let used = pt[cls].is_positive();
                assert_eq!(pt[4 + cls] == int(1), used);
                assert!(pt[4 + cls] <= int(1));
            }
        }
    }

    #[test]
    fn complex_class_budget_excludes_mixed_configurations() {
        let pq = build_complex(&tiny_complex(Objective::Cmax)).unwrap();
        let pts = enumerate_p(&pq, &Guards::default());
        assert!(!pts.is_empty());
        for pt in &pts {
            assert!(
                !(pt[0].is_positive() && pt[1].is_positive()),
                "class budget 1 must forbid mixing: {pt:?}"
            );
        }
    }

    #[test]
    fn complex_single_deadline_mirrors_the_load_row() {
        let ci = ComplexInstance {
            types: vec![ComplexJobType { deadline: int(4), p: int_vec(&[2]), class: 1, n: int(3) }],
            m: int(2),
            objective: Objective::Cmax,
            class_cap: int(1),
            size_cap: int(3),
            lower: None,
            upper: Some(int_vec(&[4])),
        };
        let pq = build_complex(&ci).unwrap();
        // Row 1 is the deadline prefix; after class-count, activations, the
        // unit caps and the budget comes the load ceiling at row 7. They
        // agree on all structural columns.
        let structural = 1 + 2;
        assert_eq!(pq.a_p[1][..structural], pq.a_p[7][..structural]);
        assert_eq!(pq.b_p[1], pq.b_p[7]);
    }

    #[test]
    fn complex_unsorted_deadlines_are_rejected() {
        let ci = ComplexInstance {
            types: vec![
                ComplexJobType { deadline: int(5), p: int_vec(&[1]), class: 1, n: int(1) },
                ComplexJobType { deadline: int(4), p: int_vec(&[1]), class: 1, n: int(1) },
            ],
            m: int(1),
            objective: Objective::Cmax,
            class_cap: int(1),
            size_cap: int(2),
            lower: None,
            upper: Some(int_vec(&[9])),
        };
        assert!(build_complex(&ci).is_err());
    }

    fn tiny_setup(upper: i64) -> SetupInstance {
        SetupInstance {
            types: vec![SetupJobType { p: int_vec(&[2]), class: 1, n: int(4) }],
            m: int(2),
            objective: Objective::Cmax,
            setups: int_vec(&[5]),
            lower: None,
            upper: Some(int_vec(&[upper])),
        }
    }

    #[test]
    fn setup_times_count_against_the_load_window() {
        let pq = build_setup(&tiny_setup(10)).unwrap();
        pq.check_bounded().unwrap();
        let pts = enumerate_p(&pq, &Guards::default());
        let c_values: Vec<&Int> = pts.iter().map(|pt| &pt[0]).collect();
        // c jobs of length 2 plus setup 5 must stay within 10: c <= 2.
        assert!(c_values.contains(&&int(0)));
        assert!(c_values.contains(&&int(2)));
        assert!(!c_values.contains(&&int(3)));
        for pt in &pts {
            // Idle configuration pays no setup.
            if pt[0].is_zero() {
                assert!(pt[2].is_zero());
            }
        }
    }

    #[test]
    fn setup_two_active_classes_pay_both_setups() {
        let make = |upper: i64| SetupInstance {
            types: vec![
                SetupJobType { p: int_vec(&[3]), class: 1, n: int(2) },
                SetupJobType { p: int_vec(&[3]), class: 2, n: int(2) },
            ],
            m: int(2),
            objective: Objective::Cmax,
            setups: int_vec(&[2, 2]),
            lower: None,
            upper: Some(int_vec(&[upper])),
        };
        let mixed = |pq: &PQRep| {
            enumerate_p(pq, &Guards::default())
                .iter()
                .any(|pt| pt[0].is_positive() && pt[1].is_positive())
        };
        // One of each job: load 3+3 plus setups 2+2 = 10.
        assert!(mixed(&build_setup(&make(10)).unwrap()));
        assert!(!mixed(&build_setup(&make(9)).unwrap()));
    }

    #[test]
    fn sumwu_weight_row_and_bounds_line_up() {
        let si = SumWuInstance {
            types: vec![SumWuJobType { due: int(1), p: int_vec(&[1]), weight: int(3), n: int(1) }],
            m: int(1),
            late_weight_cap: int(0),
        };
        let pq = build_sumwu(&si).unwrap();
        // Columns: c, x, prefix slack, threshold slack, cap slack.
        assert_eq!(pq.num_vars(), 5);
        assert_eq!(pq.a_p, mat(&[&[1, 0, 1, 0, 0], &[3, -1, 0, 0, 0]]));
        assert_eq!(pq.b_p, int_vec(&[1, 0]));
        assert_eq!(pq.a_q, mat(&[&[0, -1, 0, 1, 0], &[1, 0, 0, 0, 1]]));
        assert_eq!(pq.b_q, int_vec(&[-3, 1]));
        assert_eq!(pq.var_bounds, Some(int_vec(&[1, 3, 1, 0, 1])));
        pq.check_bounded().unwrap();
        // The only parts are "job early" and "job late".
        let pts = enumerate_p(&pq, &Guards::default());
        assert_eq!(pts, mat(&[&[0, 0, 1, 0, 0], &[0, 0, 1, 0, 1], &[1, 3, 0, 0, 0], &[1, 3, 0, 0, 1]]));
    }

    #[test]
    fn sumwu_prefix_rows_respect_earlier_due_dates() {
        let si = SumWuInstance {
            types: vec![
                SumWuJobType { due: int(2), p: int_vec(&[2]), weight: int(1), n: int(1) },
                SumWuJobType { due: int(3), p: int_vec(&[2]), weight: int(1), n: int(1) },
            ],
            m: int(1),
            late_weight_cap: int(2),
        };
        let pq = build_sumwu(&si).unwrap();
        let pts = enumerate_p(&pq, &Guards::default());
        // Both jobs on one machine would finish at 4 > 3: no part selects
        // both.
        assert!(pts.iter().all(|pt| !(pt[0].is_positive() && pt[1].is_positive())));
        // Each alone fits its own due date.
        assert!(pts.iter().any(|pt| pt[0].is_positive()));
        assert!(pts.iter().any(|pt| pt[1].is_positive()));
    }

    fn tiny_nfold() -> UniformNFold {
        UniformNFold {
            linking: mat(&[&[1]]),
            local: mat(&[&[1]]),
            linking_rhs: int_vec(&[4]),
            local_rhs: int_vec(&[2]),
            objective: int_vec(&[1]),
            upper: int_vec(&[3]),
            blocks: int(2),
            target: int(4),
        }
    }

    #[test]
    fn nfold_rows_follow_the_block_layout() {
        let pq = build_nfold(&tiny_nfold()).unwrap();
        // Columns: x, z, g, v, target slack.
        assert_eq!(
            pq.a_p,
            mat(&[&[1, 0, 0, 0, 0], &[1, 1, 0, 0, 0], &[1, 0, -1, 0, 0], &[1, 0, 0, -1, 0]])
        );
        assert_eq!(pq.b_p, int_vec(&[2, 3, 0, 0]));
        assert_eq!(pq.a_q, mat(&[&[0, 0, 0, -1, 1], &[0, 0, 1, 0, 0]]));
        assert_eq!(pq.b_q, int_vec(&[-4, 4]));
        assert_eq!(pq.m, int(2));
        assert_eq!(pq.var_bounds, Some(int_vec(&[3, 3, 3, 3, 3])));
        pq.check_bounded().unwrap();
        // The local system pins x = 2, so parts differ only in their share
        // of the target slack.
        let pts = enumerate_p(&pq, &Guards::default());
        assert_eq!(pts.len(), 4);
        for pt in &pts {
            assert_eq!(pt[..4], int_vec(&[2, 1, 2, 2]));
        }
    }

    #[test]
    fn nfold_rejects_signs_the_layout_cannot_store() {
        let mut nf = tiny_nfold();
        nf.linking = mat(&[&[-1]]);
        assert!(build_nfold(&nf).is_err());
        let mut nf = tiny_nfold();
        nf.objective = int_vec(&[-1]);
        assert!(build_nfold(&nf).is_err());
        let mut nf = tiny_nfold();
        nf.linking_rhs = int_vec(&[-4]);
        assert!(build_nfold(&nf).is_err());
    }

    #[test]
    fn nfold_from_blocks_requires_uniformity() {
        let ok = UniformNFold::from_blocks(
            vec![mat(&[&[1]]), mat(&[&[1]])],
            vec![mat(&[&[1]]), mat(&[&[1]])],
            int_vec(&[4]),
            vec![int_vec(&[2]), int_vec(&[2])],
            vec![int_vec(&[1]), int_vec(&[1])],
            vec![int_vec(&[3]), int_vec(&[3])],
            int(4),
        )
        .unwrap();
        assert_eq!(ok, tiny_nfold());
        let bad = UniformNFold::from_blocks(
            vec![mat(&[&[1]]), mat(&[&[1]])],
            vec![mat(&[&[1]]), mat(&[&[2]])],
            int_vec(&[4]),
            vec![int_vec(&[2]), int_vec(&[2])],
            vec![int_vec(&[1]), int_vec(&[1])],
            vec![int_vec(&[3]), int_vec(&[3])],
            int(4),
        );
        assert!(bad.is_err());
    }

    fn tiny_mswbp() -> MswbpInstance {
        MswbpInstance {
            p: int_vec(&[1]),
            n: int_vec(&[2]),
            w: int_vec(&[2]),
            capacity: int(5),
            bins: int(2),
            cost_cap: int(10),
        }
    }

    #[test]
    fn mswbp_cost_scales_with_the_bin_index() {
        let pq = build_mswbp(&tiny_mswbp()).unwrap();
        pq.check_bounded().unwrap();
        // W = wmax * min(capacity, items) = 2 * 2 = 4.
        // Columns: c, x1, x2, t1, t2, v, z, then slacks
        // [cap, act1, act2, tcap1, tcap2, cost].
        let part = |c: i64, x: [i64; 2], t: [i64; 2], z: i64| {
            let v = 2 * c;
            let acts = [4 + t[0] - v - 4 * x[0], 4 + t[1] - v - 4 * x[1]];
            int_vec(&[
                c,
                x[0],
                x[1],
                t[0],
                t[1],
                v,
                z,
                5 - c,
                acts[0],
                acts[1],
                4 - t[0],
                4 - t[1],
                0,
            ])
        };
        // One item of weight 2: in bin 1 the part value is 2.
        assert!(pq.is_part(&part(1, [1, 0], [2, 0], 2)));
        // In bin 2 the same content costs 4.
        assert!(pq.is_part(&part(1, [0, 1], [0, 2], 4)));
        // An empty bin costs nothing.
        assert!(pq.is_part(&part(0, [1, 0], [0, 0], 0)));
        // z must equal t1 + 2*t2.
        assert!(!pq.is_part(&part(1, [0, 1], [0, 2], 3)));
    }

    #[test]
    fn mswbp_needs_no_more_bins_than_items() {
        let mut bi = tiny_mswbp();
        bi.bins = int(3);
        assert!(build_mswbp(&bi).is_err());
    }

    #[test]
    fn nfold_conversion_keeps_the_dimension_bookkeeping() {
        let pq = build_identical(
            &Instance::small(&[2, 3], &[2, 1], 2, Objective::Cmax)
                .unwrap()
                .with_bounds(None, Some(int(4))),
        )
        .unwrap();
        // N = 3, one P row, three Q rows, m = 2.
        let ilp = to_nfold_ilp(&pq).unwrap();
        assert_eq!(ilp.num_linking_rows(), 2 + 3);
        assert_eq!(ilp.num_local_rows(), 1);
        assert_eq!(ilp.num_block_vars(), 3);
        assert_eq!(ilp.blocks, int(3));
        assert_eq!(ilp.num_rows(), int(5 + 2));
        assert_eq!(ilp.num_vars(), int(9));
        assert_eq!(ilp.linking_main[0], int_vec(&[0, 0, 0]));
        assert_eq!(ilp.linking_last[0], int_vec(&[1, 0, 0]));
        assert_eq!(ilp.linking_main[2], int_vec(&[1, 0, 0]));
        assert_eq!(ilp.linking_last[2], int_vec(&[-1, 0, 0]));
        assert_eq!(ilp.linking_rhs, int_vec(&[2, 1, 0, 0, 0]));
    }

    #[test]
    fn nfold_conversion_accepts_a_decomposition_by_construction() {
        let pq = build_identical(
            &Instance::small(&[2, 3], &[2, 1], 2, Objective::Cmax)
                .unwrap()
                .with_bounds(None, Some(int(4))),
        )
        .unwrap();
        let ilp = to_nfold_ilp(&pq).unwrap();
        let (dense, rhs) = ilp.to_dense(&Guards::default()).unwrap();
        assert_eq!(dense.len(), 7);
        assert_eq!(dense[0].len(), 9);
        // Parts (2,0,0) and (0,1,1) sum to y = (2,1,1).
        let x = int_vec(&[2, 0, 0, 0, 1, 1, 2, 1, 1]);
        for (row, b) in dense.iter().zip(&rhs) {
            assert_eq!(&crate::arith::dot(row, &x), b);
        }
    }

    #[test]
    fn pqrep_json_uses_the_agreed_keys() {
        let pq = build_identical(
            &Instance::small(&[2, 3], &[2, 1], 2, Objective::Cmax)
                .unwrap()
                .with_bounds(None, Some(int(4))),
        )
        .unwrap();
        let text = serde_json::to_string(&pq).unwrap();
        for key in ["\"A_P\"", "\"b_P\"", "\"A_Q\"", "\"b_Q\"", "\"m\""] {
            assert!(text.contains(key), "missing {key} in {text}");
        }
        assert!(!text.contains("var_bounds"), "absent bounds must be omitted: {text}");
        let back: PQRep = serde_json::from_str(&text).unwrap();
        assert_eq!(back, pq);

        let with_bounds = build_sumwu(&SumWuInstance {
            types: vec![SumWuJobType { due: int(1), p: int_vec(&[1]), weight: int(3), n: int(1) }],
            m: int(1),
            late_weight_cap: int(0),
        })
        .unwrap();
        let text = serde_json::to_string(&with_bounds).unwrap();
        assert!(text.contains("var_bounds"));
        let back: PQRep = serde_json::from_str(&text).unwrap();
        assert_eq!(back, with_bounds);
    }

    #[test]
    fn every_builder_passes_validation_and_boundedness() {
        let reps = vec![
            build_identical(
                &Instance::small(&[2, 3], &[2, 1], 2, Objective::Cenvy)
                    .unwrap()
                    .with_bounds(Some(int(2)), Some(int(5))),
            )
            .unwrap(),
            build_complex(&tiny_complex(Objective::Cenvy)).unwrap(),
            build_complex(&tiny_complex(Objective::Cmin)).unwrap(),
            build_setup(&tiny_setup(10)).unwrap(),
            build_sumwu(&SumWuInstance {
                types: vec![SumWuJobType {
                    due: int(2),
                    p: int_vec(&[1]),
                    weight: int(1),
                    n: int(2),
                }],
                m: int(2),
                late_weight_cap: int(1),
            })
            .unwrap(),
            build_nfold(&tiny_nfold()).unwrap(),
            build_mswbp(&tiny_mswbp()).unwrap(),
        ];
        for pq in &reps {
            pq.validate().unwrap();
            pq.check_bounded().unwrap();
        }
    }

    #[test]
    fn duplicate_types_are_merged_before_building() {
        let si = SumWuInstance {
            types: vec![
                SumWuJobType { due: int(2), p: int_vec(&[1]), weight: int(1), n: int(1) },
                SumWuJobType { due: int(2), p: int_vec(&[1]), weight: int(1), n: int(2) },
            ],
            m: int(1),
            late_weight_cap: int(3),
        };
        let pq = build_sumwu(&si).unwrap();
        // One merged type: columns c, x, one prefix slack, threshold slack,
        // one cap slack.
        assert_eq!(pq.num_vars(), 5);
        assert_eq!(pq.b_q, int_vec(&[0, 3]));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn cmax_lattice_count_matches_direct_enumeration(
                p in proptest::collection::vec(1i64..=4, 1..=3),
                u in 0i64..=8,
                m in 1i64..=3,
            ) {
                let mut dedup = p.clone();
                dedup.sort_unstable();
                dedup.dedup();
                let n = vec![1; dedup.len()];
                let inst = Instance::small(&dedup, &n, m, Objective::Cmax)
                    .unwrap()
                    .with_bounds(None, Some(int(u)));
                let pq = build_identical(&inst).unwrap();
                let pts = enumerate_p(&pq, &Guards::default());
                // Direct count of {c >= 0 : p . c <= u}, one slack value each.
                let mut direct = 0u64;
                let mut stack = vec![(0usize, 0i64)];
                while let Some((idx, used)) = stack.pop() {
                    if idx == dedup.len() {
                        direct += 1;
                        continue;
                    }
                    let mut c = 0;
                    while used + c * dedup[idx] <= u {
                        stack.push((idx + 1, used + c * dedup[idx]));
                        c += 1;
                    }
                }
                prop_assert_eq!(pts.len() as u64, direct);
                for pt in &pts {
                    prop_assert!(pq.is_part(pt));
                }
            }
        }
    }
}
