//! Additive approximation via size classes: slot relaxation plus local
//! search.
//!
//! The exact solvers become expensive when `pmax` grows, so this module
//! trades exactness for an additive error of `eps * pmax`:
//!
//! 1. [`classify`] groups job sizes into `1/eps` classes of width
//!    `eps * pmax` partitioning `(0, pmax]`.
//! 2. [`solve_slot_relaxation`] decides whether jobs can be spread so that
//!    every machine receives an integral number of jobs per class (a slot
//!    vector) while fractional job splits keep every load inside a target
//!    window, widened by a slack of `delta * pmax` on both sides.
//! 3. [`local_search`] deals actual jobs into the slots and repairs the
//!    loads by swapping a job for a strictly smaller (or larger) job of the
//!    same class along BFS paths of a condensed machine graph. Each window
//!    edge is overshot by less than one class width, so integral loads end
//!    up within `eps * pmax` of the window.
//! 4. [`approx_objective`] wraps both phases with the balancing kernel of
//!    [`crate::kernel`] and a grid of guessed load windows, and returns a
//!    schedule whose value is within `eps * pmax` of the instance optimum.
//!
//! Thresholds are exact rationals and job slots are handled explicitly, so
//! the module expects kernel-sized inputs; the per-type multiplicity bound
//! `2 * m * pmax` that the kernel guarantees is enforced wherever the swap
//! budget depends on it.

use crate::arith::{ceil_div, int, to_rat, Int, Rat};
use crate::guard::Guards;
use crate::kernel::preassign_kernel;
use crate::lp::{self, Constraint};
use crate::model::{schedule_value, verify_schedule, Instance, MachineGroup, Objective, Schedule};
use crate::{Error, Result};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, VecDeque};

/// A min-max heap over `i64` keys: the minimum and the maximum are both
/// readable in O(1) and removable in O(log n).
///
/// Even tree levels (the root is level 0) are min levels: a node on a min
/// level is no larger than anything in its subtree. Odd levels mirror this
/// with "no smaller". Duplicates are allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MinMaxHeap {
    data: Vec<i64>,
}

fn on_min_level(i: usize) -> bool {
    (usize::BITS - 1 - (i + 1).leading_zeros()) % 2 == 0
}

impl MinMaxHeap {
    pub fn new() -> Self {
        MinMaxHeap { data: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Unordered view of the stored keys.
    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.data.iter().copied()
    }

    pub fn peek_min(&self) -> Option<i64> {
        self.data.first().copied()
    }

    pub fn peek_max(&self) -> Option<i64> {
        match self.data.len() {
            0 => None,
            1 => Some(self.data[0]),
            2 => Some(self.data[1]),
            _ => Some(self.data[1].max(self.data[2])),
        }
    }

    pub fn push(&mut self, v: i64) {
        self.data.push(v);
        let i = self.data.len() - 1;
        if i == 0 {
            return;
        }
        let parent = (i - 1) / 2;
        if on_min_level(i) {
            if self.data[i] > self.data[parent] {
                self.data.swap(i, parent);
                self.bubble_up_max(parent);
            } else {
                self.bubble_up_min(i);
            }
        } else if self.data[i] < self.data[parent] {
            self.data.swap(i, parent);
            self.bubble_up_min(parent);
        } else {
            self.bubble_up_max(i);
        }
    }

    fn bubble_up_min(&mut self, mut i: usize) {
        while i > 2 {
            let g = ((i - 1) / 2 - 1) / 2;
            if self.data[i] < self.data[g] {
                self.data.swap(i, g);
                i = g;
            } else {
                break;
            }
        }
    }

    fn bubble_up_max(&mut self, mut i: usize) {
        while i > 2 {
            let g = ((i - 1) / 2 - 1) / 2;
            if self.data[i] > self.data[g] {
                self.data.swap(i, g);
                i = g;
            } else {
                break;
            }
        }
    }

    pub fn pop_min(&mut self) -> Option<i64> {
        if self.data.is_empty() {
            return None;
        }
        let last = self.data.len() - 1;
        self.data.swap(0, last);
        let out = self.data.pop();
        if !self.data.is_empty() {
            self.trickle_down_min(0);
        }
        out
    }

    pub fn pop_max(&mut self) -> Option<i64> {
        let i = match self.data.len() {
            0 => return None,
            1 => 0,
            2 => 1,
            _ => {
                if self.data[1] >= self.data[2] {
                    1
                } else {
                    2
                }
            }
        };
        let last = self.data.len() - 1;
        self.data.swap(i, last);
        let out = self.data.pop();
        if i < self.data.len() {
            self.trickle_down_max(i);
        }
        out
    }

    fn trickle_down_min(&mut self, mut i: usize) {
        loop {
            let len = self.data.len();
            let mut m = i;
            for c in [2 * i + 1, 2 * i + 2] {
                if c < len && self.data[c] < self.data[m] {
                    m = c;
                }
            }
            let fg = 4 * i + 3;
            for g in fg..fg + 4 {
                if g < len && self.data[g] < self.data[m] {
                    m = g;
                }
            }
            if m == i {
                return;
            }
            self.data.swap(i, m);
            if m < fg {
                // a child lives on a max level, one swap restores order
                return;
            }
            let parent = (m - 1) / 2;
            if self.data[m] > self.data[parent] {
                self.data.swap(m, parent);
            }
            i = m;
        }
    }

    fn trickle_down_max(&mut self, mut i: usize) {
        loop {
            let len = self.data.len();
            let mut m = i;
            for c in [2 * i + 1, 2 * i + 2] {
                if c < len && self.data[c] > self.data[m] {
                    m = c;
                }
            }
            let fg = 4 * i + 3;
            for g in fg..fg + 4 {
                if g < len && self.data[g] > self.data[m] {
                    m = g;
                }
            }
            if m == i {
                return;
            }
            self.data.swap(i, m);
            if m < fg {
                return;
            }
            let parent = (m - 1) / 2;
            if self.data[m] < self.data[parent] {
                self.data.swap(m, parent);
            }
            i = m;
        }
    }
}

/// Size classes for a reciprocal-integer tolerance: with `eps = 1/q`, class
/// `k` (0-based) covers the half-open interval `(k*eps*pmax, (k+1)*eps*pmax]`
/// and the `q` classes together partition `(0, pmax]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassPartition {
    pub eps: Rat,
    pub pmax: Int,
    /// Job types of the instance per class, ascending type index.
    pub members: Vec<Vec<usize>>,
}

fn class_count(eps: &Rat) -> Result<usize> {
    if eps.numer() != &Int::one() {
        return Err(Error::invalid(format!(
            "tolerance must be the reciprocal of a positive integer, got {eps}"
        )));
    }
    eps.denom()
        .to_usize()
        .filter(|q| (1..=1_000_000).contains(q))
        .ok_or_else(|| Error::invalid("tolerance denominator out of range".to_string()))
}

fn class_index(size: &Int, pmax: &Int, classes: usize) -> Result<usize> {
    if !size.is_positive() || size > pmax {
        return Err(Error::invalid(format!("size {size} outside (0, {pmax}]")));
    }
    let k = ceil_div(&(size * Int::from(classes as u64)), pmax);
    Ok(k.to_usize().expect("class index fits in usize") - 1)
}

impl ClassPartition {
    pub fn class_count(&self) -> usize {
        self.members.len()
    }

    /// Width `eps * pmax` shared by every class.
    pub fn width(&self) -> Rat {
        self.eps.clone() * to_rat(&self.pmax)
    }

    /// Half-open interval `(lo, hi]` covered by class `k`.
    pub fn interval(&self, k: usize) -> (Rat, Rat) {
        let w = self.width();
        (
            w.clone() * Rat::from_integer(Int::from(k as u64)),
            w * Rat::from_integer(Int::from(k as u64 + 1)),
        )
    }

    /// The class whose interval contains `size`.
    pub fn class_of(&self, size: &Int) -> Result<usize> {
        if self.pmax.is_zero() {
            return Err(Error::invalid("a partition over no sizes has no classes".to_string()));
        }
        class_index(size, &self.pmax, self.class_count())
    }
}

/// Groups the job types of `inst` into `1/eps` size classes of width
/// `eps * pmax` partitioning `(0, pmax]`.
pub fn classify(inst: &Instance, eps: &Rat) -> Result<ClassPartition> {
    inst.validate()?;
    let classes = class_count(eps)?;
    let pmax = inst.pmax();
    let mut members = vec![Vec::new(); classes];
    for (j, pj) in inst.p.iter().enumerate() {
        members[class_index(pj, &pmax, classes)?].push(j);
    }
    Ok(ClassPartition { eps: eps.clone(), pmax, members })
}

/// Integral class counts per machine: `y[i][k]` slots of class `k` go to
/// machine `i`. Produced by [`solve_slot_relaxation`] and consumed by
/// [`local_search`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotVector {
    pub y: Vec<Vec<u64>>,
}

impl SlotVector {
    pub fn machine_count(&self) -> usize {
        self.y.len()
    }

    /// Column sums: total slots per class.
    pub fn class_totals(&self) -> Vec<u64> {
        let classes = self.y.first().map_or(0, Vec::len);
        let mut tot = vec![0u64; classes];
        for row in &self.y {
            for (t, v) in tot.iter_mut().zip(row) {
                *t += *v;
            }
        }
        tot
    }
}

/// Shared preprocessing for the relaxation and the local search: the class
/// partition, per-class job totals, and the explicit machine count.
fn classed(inst: &Instance, eps: &Rat, guards: &Guards) -> Result<(ClassPartition, Vec<u64>, usize)> {
    inst.require_distinct_types()?;
    let partition = classify(inst, eps)?;
    let machines = inst
        .m
        .to_usize()
        .ok_or_else(|| Error::guard(format!("machine count {} exceeds the explicit range", inst.m)))?;
    guards.check("relaxation machines", machines as u64, guards.expanded_machines)?;
    guards.check(
        "relaxation class cells",
        (machines as u64).saturating_mul(partition.class_count() as u64),
        guards.lattice_points,
    )?;
    let mut totals = vec![0u64; partition.class_count()];
    let mut slots = 0u64;
    for (k, members) in partition.members.iter().enumerate() {
        for &j in members {
            let nj = inst.n[j]
                .to_u64()
                .ok_or_else(|| Error::guard(format!("multiplicity n_{j} exceeds the explicit range")))?;
            totals[k] = totals[k]
                .checked_add(nj)
                .ok_or_else(|| Error::guard("class total overflows".to_string()))?;
            slots = slots
                .checked_add(nj)
                .ok_or_else(|| Error::guard("job slot total overflows".to_string()))?;
        }
    }
    // job slots are laid out one by one, exactly like expanded machines
    guards.check("relaxation job slots", slots, guards.expanded_machines)?;
    Ok((partition, totals, machines))
}

/// Depth-first assignment of candidate slot rows to machines, with an exact
/// LP feasibility check at complete assignments.
struct RowSearch<'a> {
    inst: &'a Instance,
    partition: &'a ClassPartition,
    rows: Vec<Vec<u64>>,
    /// `suffix_sum[r]` = largest row slot total among `rows[r..]`.
    suffix_sum: Vec<u64>,
    /// `suffix_class[r][k]` = largest `rows[r..][k]`.
    suffix_class: Vec<Vec<u64>>,
    lo: Rat,
    hi: Rat,
    /// Whether an empty machine satisfies the window.
    zero_ok: bool,
    chosen: Vec<(usize, u64)>,
    nodes: u64,
    guards: &'a Guards,
}

impl RowSearch<'_> {
    fn dfs(&mut self, r: usize, machines_left: usize, remaining: &mut [u64]) -> Result<Option<Vec<(usize, u64)>>> {
        self.nodes += 1;
        self.guards.check("relaxation search nodes", self.nodes, self.guards.lattice_points)?;
        let outstanding: u64 = remaining.iter().sum();
        if outstanding == 0 {
            if machines_left > 0 && !self.zero_ok {
                return Ok(None);
            }
            return self.lp_check();
        }
        if r == self.rows.len() || machines_left == 0 {
            return Ok(None);
        }
        let budget = machines_left as u64;
        if outstanding > self.suffix_sum[r].saturating_mul(budget) {
            return Ok(None);
        }
        if remaining
            .iter()
            .enumerate()
            .any(|(k, rem)| *rem > self.suffix_class[r][k].saturating_mul(budget))
        {
            return Ok(None);
        }
        let cap = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0)
            .map(|(k, v)| remaining[k] / *v)
            .min()
            .expect("candidate rows are nonzero")
            .min(budget);
        for count in (0..=cap).rev() {
            for k in 0..remaining.len() {
                remaining[k] -= count * self.rows[r][k];
            }
            if count > 0 {
                self.chosen.push((r, count));
            }
            let hit = self.dfs(r + 1, machines_left - count as usize, remaining)?;
            if count > 0 {
                self.chosen.pop();
            }
            for k in 0..remaining.len() {
                remaining[k] += count * self.rows[r][k];
            }
            if hit.is_some() {
                return Ok(hit);
            }
        }
        Ok(None)
    }

    /// Exact feasibility of fractional job splits for the chosen rows:
    /// per-row class sums and load windows, plus per-type conservation
    /// weighted by how many machines carry each row.
    fn lp_check(&self) -> Result<Option<Vec<(usize, u64)>>> {
        if self.chosen.is_empty() {
            // only possible when there are no jobs at all
            return Ok(Some(Vec::new()));
        }
        let d = self.inst.d();
        let nv = self.chosen.len() * d;
        let mut cons = Vec::new();
        for (idx, (row_id, _)) in self.chosen.iter().enumerate() {
            let row = &self.rows[*row_id];
            for (k, members) in self.partition.members.iter().enumerate() {
                let mut coeffs = vec![Rat::zero(); nv];
                for &j in members {
                    coeffs[idx * d + j] = Rat::one();
                }
                cons.push(Constraint::eq(coeffs, Rat::from_integer(Int::from(row[k]))));
            }
            let mut load = vec![Rat::zero(); nv];
            for j in 0..d {
                load[idx * d + j] = to_rat(&self.inst.p[j]);
            }
            cons.push(Constraint::ge(load.clone(), self.lo.clone()));
            cons.push(Constraint::le(load, self.hi.clone()));
        }
        for j in 0..d {
            let mut coeffs = vec![Rat::zero(); nv];
            for (idx, (_, count)) in self.chosen.iter().enumerate() {
                coeffs[idx * d + j] = Rat::from_integer(Int::from(*count));
            }
            cons.push(Constraint::eq(coeffs, to_rat(&self.inst.n[j])));
        }
        Ok(lp::feasible_point(nv, cons)?.map(|_| self.chosen.clone()))
    }
}

/// Decides whether the jobs of `inst` can be distributed over its machines
/// so that each machine receives an integral number of jobs per size class
/// while jobs may split fractionally across machines, with every machine
/// load inside `[lower - delta*pmax, upper + delta*pmax]`.
///
/// Returns the integral class counts (one row per machine, heaviest class
/// profile first) or `None` when no such distribution exists. Machines
/// beyond the listed rows of a partial cover receive all-zero rows; those
/// are legal only when an empty machine fits the window.
pub fn solve_slot_relaxation(
    inst: &Instance,
    lower: &Rat,
    upper: &Rat,
    eps: &Rat,
    delta: &Rat,
    guards: &Guards,
) -> Result<Option<SlotVector>> {
    inst.validate()?;
    if delta < &Rat::zero() || delta >= &Rat::one() {
        return Err(Error::invalid(format!("load slack must lie in [0, 1), got {delta}")));
    }
    let (partition, totals, machines) = classed(inst, eps, guards)?;
    let classes = partition.class_count();
    let slack = delta.clone() * to_rat(&partition.pmax);
    let lo = lower.clone() - &slack;
    let hi = upper.clone() + &slack;
    if lo > hi {
        return Ok(None);
    }
    let zero_ok = lo <= Rat::zero() && hi >= Rat::zero();

    // the lightest and heaviest member size bound what a row can weigh
    let mut extremes: Vec<Option<(Int, Int)>> = vec![None; classes];
    for (k, members) in partition.members.iter().enumerate() {
        let sizes: Vec<&Int> = members.iter().map(|&j| &inst.p[j]).collect();
        if let (Some(min), Some(max)) = (sizes.iter().min(), sizes.iter().max()) {
            extremes[k] = Some(((*min).clone(), (*max).clone()));
        }
    }

    let mut space = 1u128;
    for t in &totals {
        space = space.saturating_mul(*t as u128 + 1);
    }
    guards.check(
        "relaxation row space",
        space.min(u64::MAX as u128) as u64,
        guards.lattice_points,
    )?;

    // every nonzero class-count vector whose weight range meets the window
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut cur = vec![0u64; classes];
    'odometer: loop {
        let mut pos = classes;
        loop {
            if pos == 0 {
                break 'odometer;
            }
            pos -= 1;
            if cur[pos] < totals[pos] {
                cur[pos] += 1;
                for c in &mut cur[pos + 1..] {
                    *c = 0;
                }
                break;
            }
        }
        let mut wmin = Int::zero();
        let mut wmax = Int::zero();
        for (k, v) in cur.iter().enumerate() {
            if *v > 0 {
                let (min, max) = extremes[k].as_ref().expect("counted classes have members");
                wmin += min * Int::from(*v);
                wmax += max * Int::from(*v);
            }
        }
        if to_rat(&wmin) <= hi && to_rat(&wmax) >= lo {
            rows.push(cur.clone());
        }
    }

    let mut suffix_sum = vec![0u64; rows.len() + 1];
    let mut suffix_class = vec![vec![0u64; classes]; rows.len() + 1];
    for r in (0..rows.len()).rev() {
        suffix_sum[r] = suffix_sum[r + 1].max(rows[r].iter().sum());
        for k in 0..classes {
            suffix_class[r][k] = suffix_class[r + 1][k].max(rows[r][k]);
        }
    }

    let mut search = RowSearch {
        inst,
        partition: &partition,
        rows,
        suffix_sum,
        suffix_class,
        lo,
        hi,
        zero_ok,
        chosen: Vec::new(),
        nodes: 0,
        guards,
    };
    let mut remaining = totals;
    let Some(solution) = search.dfs(0, machines, &mut remaining)? else {
        return Ok(None);
    };

    let mut out: Vec<Vec<u64>> = Vec::with_capacity(machines);
    for (r, count) in &solution {
        for _ in 0..*count {
            out.push(search.rows[*r].clone());
        }
    }
    out.sort();
    out.reverse();
    out.resize(machines, vec![0u64; classes]);
    Ok(Some(SlotVector { y: out }))
}

/// Outcome of [`local_search`]: the integral schedule plus swap counts per
/// repair direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSearchReport {
    pub schedule: Schedule,
    /// Swaps that moved load off machines above the window.
    pub swaps_shed: u64,
    /// Swaps that pulled load onto machines below the window.
    pub swaps_fill: u64,
}

impl LocalSearchReport {
    pub fn swaps(&self) -> u64 {
        self.swaps_shed + self.swaps_fill
    }
}

/// Explicit per-machine job multisets plus the condensed trade graph.
///
/// The graph has one vertex per machine and a labeled edge `(a, b, k)`
/// exactly when the largest class-`k` job on `a` is strictly larger than
/// the smallest class-`k` job on `b`, i.e. when trading those two jobs
/// moves load from `a` to `b`.
struct Search {
    d: usize,
    classes: usize,
    machines: usize,
    /// 1-based rank of each size in ascending order, keyed by size.
    rank_by_size: HashMap<i64, u64>,
    type_by_size: HashMap<i64, usize>,
    heaps: Vec<Vec<MinMaxHeap>>,
    loads: Vec<i128>,
    edges: BTreeSet<(usize, usize, usize)>,
}

impl Search {
    fn rload(&self, i: usize) -> Rat {
        Rat::from_integer(Int::from(self.loads[i]))
    }

    fn edge_holds(&self, a: usize, b: usize, k: usize) -> bool {
        a != b
            && match (self.heaps[a][k].peek_max(), self.heaps[b][k].peek_min()) {
                (Some(hi), Some(lo)) => hi > lo,
                _ => false,
            }
    }

    fn rebuild_edges(&self) -> BTreeSet<(usize, usize, usize)> {
        let mut edges = BTreeSet::new();
        for a in 0..self.machines {
            for b in 0..self.machines {
                for k in 0..self.classes {
                    if self.edge_holds(a, b, k) {
                        edges.insert((a, b, k));
                    }
                }
            }
        }
        edges
    }

    /// Incremental graph maintenance after a swap touched machines `a` and
    /// `b` in class `k`: only edges incident to them in that class can have
    /// changed.
    fn refresh_edges(&mut self, a: usize, b: usize, k: usize) {
        for x in 0..self.machines {
            for (s, t) in [(a, x), (x, a), (b, x), (x, b)] {
                if s == t {
                    continue;
                }
                if self.edge_holds(s, t, k) {
                    self.edges.insert((s, t, k));
                } else {
                    self.edges.remove(&(s, t, k));
                }
            }
        }
        debug_assert_eq!(self.edges, self.rebuild_edges(), "incremental trade graph diverged from a rebuild");
    }

    /// Layered search over the condensed graph, machines entering layers in
    /// index order. The shed direction follows edges forward (toward
    /// strictly smaller same-class jobs); the fill direction follows them
    /// backward. Returns complete layer numbers plus the first machine
    /// discovered whose load already satisfies the window side being
    /// repaired.
    fn bfs(&self, sources: &[usize], shed: bool, win_lo: &Rat, win_hi: &Rat) -> (Vec<Option<usize>>, Option<usize>) {
        let mut dist = vec![None; self.machines];
        let mut queue = VecDeque::new();
        let mut first_target = None;
        for &s in sources {
            dist[s] = Some(0usize);
            queue.push_back(s);
        }
        while let Some(a) = queue.pop_front() {
            let la = dist[a].expect("queued machines are labeled");
            for b in 0..self.machines {
                if dist[b].is_some() {
                    continue;
                }
                let connected = (0..self.classes).any(|k| {
                    let key = if shed { (a, b, k) } else { (b, a, k) };
                    self.edges.contains(&key)
                });
                if !connected {
                    continue;
                }
                // every trade along a layered path targets a fresh size, so
                // layers stay below the number of distinct sizes
                assert!(la + 1 < self.d, "BFS layer {} reached with {} distinct sizes", la + 1, self.d);
                dist[b] = Some(la + 1);
                if first_target.is_none() {
                    let hit = if shed { self.rload(b) <= *win_hi } else { self.rload(b) >= *win_lo };
                    if hit {
                        first_target = Some(b);
                    }
                }
                queue.push_back(b);
            }
        }
        (dist, first_target)
    }

    /// Weighted job-depth sum that strictly increases with every executed
    /// swap. Jobs on unreached machines count with the maximal depth. The
    /// shed direction weighs sizes by ascending rank; the fill direction
    /// mirrors every comparison, so it weighs by descending rank instead.
    fn potential(&self, dist: &[Option<usize>], shed: bool) -> u128 {
        let depth_cap = self.d as u128;
        let mut phi = 0u128;
        for i in 0..self.machines {
            let delta = dist[i].map_or(depth_cap, |v| v as u128);
            if delta == 0 {
                continue;
            }
            for k in 0..self.classes {
                for job in self.heaps[i][k].iter() {
                    let r = self.rank_by_size[&job] as u128;
                    let w = if shed { r } else { self.d as u128 + 1 - r };
                    phi += w * delta;
                }
            }
        }
        phi
    }

    /// Chooses the machine one layer before `t` to trade with, and the
    /// class: the predecessor handing over its largest tradable job in the
    /// shed direction, its smallest in the fill direction; earlier machine
    /// and class indices win ties.
    fn pick_swap(&self, t: usize, dist: &[Option<usize>], shed: bool) -> (usize, usize) {
        let lt = dist[t].expect("targets are discovered");
        let mut best: Option<(i64, usize, usize)> = None;
        for a in 0..self.machines {
            if dist[a] != Some(lt - 1) {
                continue;
            }
            for k in 0..self.classes {
                let key = if shed { (a, t, k) } else { (t, a, k) };
                if !self.edges.contains(&key) {
                    continue;
                }
                let job = if shed {
                    self.heaps[a][k].peek_max().expect("an edge needs jobs on both ends")
                } else {
                    self.heaps[a][k].peek_min().expect("an edge needs jobs on both ends")
                };
                let better = match &best {
                    None => true,
                    Some((bj, _, _)) => {
                        if shed {
                            job > *bj
                        } else {
                            job < *bj
                        }
                    }
                };
                if better {
                    best = Some((job, a, k));
                }
            }
        }
        let (_, a, k) = best.expect("a discovered target has an eligible predecessor");
        (a, k)
    }

    /// Trades the predecessor's job against the target's same-class job.
    /// Shedding moves the bigger job toward the target; filling mirrors the
    /// direction and pulls the bigger job toward the predecessor.
    fn swap(&mut self, a: usize, t: usize, k: usize, shed: bool) {
        let (big, small) = if shed {
            (
                self.heaps[a][k].pop_max().expect("edge end has jobs"),
                self.heaps[t][k].pop_min().expect("edge end has jobs"),
            )
        } else {
            (
                self.heaps[t][k].pop_max().expect("edge end has jobs"),
                self.heaps[a][k].pop_min().expect("edge end has jobs"),
            )
        };
        assert!(big > small, "swapped jobs must differ strictly");
        let shift = (big - small) as i128;
        if shed {
            self.heaps[a][k].push(small);
            self.heaps[t][k].push(big);
            self.loads[a] -= shift;
            self.loads[t] += shift;
        } else {
            self.heaps[t][k].push(small);
            self.heaps[a][k].push(big);
            self.loads[t] -= shift;
            self.loads[a] += shift;
        }
        self.refresh_edges(a, t, k);
    }

    /// One repair direction run to quiescence: BFS from every machine
    /// beyond the band edge, one swap with the first in-window machine
    /// found, restart. Stops when no machine is beyond the band or no swap
    /// is reachable (the final window check decides whether that is fatal).
    #[allow(clippy::too_many_arguments)]
    fn run_stage(
        &mut self,
        shed: bool,
        win_lo: &Rat,
        win_hi: &Rat,
        band_lo: &Rat,
        band_hi: &Rat,
        total: &mut u64,
        cap: u128,
    ) -> u64 {
        let mut here = 0u64;
        let mut prev_phi: Option<u128> = None;
        loop {
            let sources: Vec<usize> = (0..self.machines)
                .filter(|&i| if shed { self.rload(i) > *band_hi } else { self.rload(i) < *band_lo })
                .collect();
            if sources.is_empty() {
                return here;
            }
            let (dist, target) = self.bfs(&sources, shed, win_lo, win_hi);
            let phi = self.potential(&dist, shed);
            if let Some(p) = prev_phi {
                assert!(phi > p, "swap potential must strictly increase, got {p} then {phi}");
            }
            let Some(t) = target else {
                return here;
            };
            let (a, k) = self.pick_swap(t, &dist, shed);
            self.swap(a, t, k, shed);
            prev_phi = Some(phi);
            here += 1;
            *total += 1;
            assert!(
                (*total as u128) <= cap,
                "swap count {total} exceeded the budget 2*d^3*m*pmax = {cap}"
            );
        }
    }
}

/// Turns integral slot counts into an integral schedule whose loads lie in
/// `[lower - eps*pmax, upper + eps*pmax]`.
///
/// Jobs are dealt into the slots largest-first, then repaired: machines
/// with load above `upper + eps*pmax` trade a job for a strictly smaller
/// same-class job along a BFS path ending at a machine with load at most
/// `upper`, restarting after every swap; machines below `lower - eps*pmax`
/// mirror this with all comparisons reversed, pulling strictly larger jobs
/// from machines with load at least `lower`. Each trade moves less than one
/// class width, so repaired machines never leave the band.
///
/// Fails with a contract error when loads still violate the band after both
/// directions; that indicates slot counts without a fractional solution for
/// the window. The swap budget `2*d^3*m*pmax` presumes kernel-sized
/// multiplicities, so `n_j <= 2*m*pmax` is enforced as a guard.
pub fn local_search(
    inst: &Instance,
    slots: &SlotVector,
    lower: &Rat,
    upper: &Rat,
    eps: &Rat,
    guards: &Guards,
) -> Result<LocalSearchReport> {
    inst.validate()?;
    if lower > upper {
        return Err(Error::invalid(format!("window [{lower}, {upper}] is empty")));
    }
    let (partition, totals, machines) = classed(inst, eps, guards)?;
    let classes = partition.class_count();
    if slots.y.len() != machines {
        return Err(Error::invalid(format!(
            "slot vector covers {} machines, instance has {machines}",
            slots.y.len()
        )));
    }
    if slots.y.iter().any(|row| row.len() != classes) {
        return Err(Error::invalid(format!("slot rows must have {classes} classes")));
    }
    if slots.class_totals() != totals {
        return Err(Error::invalid("slot counts do not match the class job totals".to_string()));
    }
    let kernel_cap = int(2) * &inst.m * &partition.pmax;
    for (j, nj) in inst.n.iter().enumerate() {
        if nj > &kernel_cap {
            return Err(Error::guard(format!(
                "multiplicity n_{j} = {nj} exceeds the kernel-scale bound 2*m*pmax = {kernel_cap}"
            )));
        }
    }
    let pmax_i = partition
        .pmax
        .to_i64()
        .ok_or_else(|| Error::guard("job sizes exceed the explicit range".to_string()))?;

    let mut sizes: Vec<i64> = Vec::with_capacity(inst.d());
    for pj in &inst.p {
        sizes.push(
            pj.to_i64()
                .ok_or_else(|| Error::guard("job sizes exceed the explicit range".to_string()))?,
        );
    }
    let mut ascending = sizes.clone();
    ascending.sort_unstable();
    let rank_by_size: HashMap<i64, u64> =
        ascending.iter().enumerate().map(|(i, s)| (*s, i as u64 + 1)).collect();
    let type_by_size: HashMap<i64, usize> = sizes.iter().enumerate().map(|(j, s)| (*s, j)).collect();

    let mut search = Search {
        d: inst.d(),
        classes,
        machines,
        rank_by_size,
        type_by_size,
        heaps: (0..machines).map(|_| (0..classes).map(|_| MinMaxHeap::new()).collect()).collect(),
        loads: vec![0i128; machines],
        edges: BTreeSet::new(),
    };

    // deal each class largest-first: machine 0 fills its slots before
    // machine 1 and so on
    for (k, members) in partition.members.iter().enumerate() {
        let mut pool: Vec<i64> = Vec::new();
        for &j in members {
            let nj = inst.n[j].to_u64().expect("checked in classed");
            pool.extend(std::iter::repeat(sizes[j]).take(nj as usize));
        }
        pool.sort_unstable_by(|a, b| b.cmp(a));
        let mut next = pool.into_iter();
        for i in 0..machines {
            for _ in 0..slots.y[i][k] {
                let s = next.next().expect("totals were checked against the slot counts");
                search.heaps[i][k].push(s);
                search.loads[i] += s as i128;
            }
        }
    }
    search.edges = search.rebuild_edges();

    let width = partition.width();
    let band_lo = lower.clone() - &width;
    let band_hi = upper.clone() + &width;
    let cap = 2u128 * (search.d as u128).pow(3) * machines as u128 * pmax_i as u128;
    let mut total = 0u64;
    let swaps_shed = search.run_stage(true, lower, upper, &band_lo, &band_hi, &mut total, cap);
    let swaps_fill = search.run_stage(false, lower, upper, &band_lo, &band_hi, &mut total, cap);

    for i in 0..machines {
        let l = search.rload(i);
        if l < band_lo || l > band_hi {
            return Err(Error::contract(format!(
                "machine load {l} escaped the window [{band_lo}, {band_hi}]; the slot counts admit no repair"
            )));
        }
    }

    let mut configs = Vec::with_capacity(machines);
    for i in 0..machines {
        let mut config = vec![Int::zero(); inst.d()];
        for k in 0..classes {
            for job in search.heaps[i][k].iter() {
                config[search.type_by_size[&job]] += 1u32;
            }
        }
        configs.push(config);
    }
    let schedule = Schedule::from_machines(configs);
    debug_assert!(verify_schedule(inst, &schedule).ok());
    Ok(LocalSearchReport { schedule, swaps_shed, swaps_fill })
}

/// Result of [`approx_objective`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxResult {
    /// Objective value of `schedule` on the input instance.
    #[serde(with = "crate::io::int_scalar")]
    pub value: Int,
    pub schedule: Schedule,
    /// Total local-search swaps behind the returned schedule.
    pub swaps: u64,
    /// The guessed load window that produced the schedule, in input-instance
    /// load units (kernel preassignment included).
    #[serde(with = "crate::io::rat_scalar")]
    pub window_lower: Rat,
    #[serde(with = "crate::io::rat_scalar")]
    pub window_upper: Rat,
}

fn lift_by_preassignment(sched: &Schedule, pre: &[Int]) -> Schedule {
    let machines = sched
        .machines
        .iter()
        .map(|g| MachineGroup {
            config: g.config.iter().zip(pre).map(|(c, extra)| c + extra).collect(),
            count: g.count.clone(),
        })
        .collect();
    Schedule { machines }
}

fn attempt_window(
    kin: &Instance,
    wl: &Rat,
    wu: &Rat,
    split: &Rat,
    slack: &Rat,
    guards: &Guards,
) -> Result<Option<(LocalSearchReport, Rat, Rat)>> {
    let Some(y) = solve_slot_relaxation(kin, wl, wu, split, split, guards)? else {
        return Ok(None);
    };
    let rl = wl.clone() - slack;
    let ru = wu.clone() + slack;
    let report = local_search(kin, &y, &rl, &ru, split, guards)?;
    Ok(Some((report, wl.clone(), wu.clone())))
}

/// Schedules `inst` with an additive guarantee of `eps * pmax`: at most
/// `OPT + eps*pmax` for the makespan and envy objectives, at least
/// `OPT - eps*pmax` for machine cover.
///
/// The tolerance is split evenly between the relaxation slack, the
/// local-search class width, and the window grid: makespan and cover use
/// `eps/2` for each, envy uses `eps/4` because both window ends move. The
/// kernel preassignment is stripped first and re-added to the result, so
/// the phases only ever see kernel-sized multiplicities. Windows are
/// guessed around the average load `L`: the makespan scans upper bounds
/// ascending from `L` to `L + pmax`, cover scans lower bounds descending
/// from `L` to `L - pmax` against a fixed upper bound `L + pmax` (every
/// schedule worth returning fits under it), and envy scans window pairs by
/// ascending width.
pub fn approx_objective(inst: &Instance, eps: &Rat, guards: &Guards) -> Result<ApproxResult> {
    inst.validate()?;
    inst.require_distinct_types()?;
    let q = class_count(eps)? as u64;
    let kr = preassign_kernel(inst)?;
    let kin = &kr.kernel_instance;
    let avg = Rat::new(kin.total_work(), kin.m.clone());
    let pmax_r = to_rat(&kin.pmax());

    let halves: u64 = match inst.objective {
        Objective::Cmax | Objective::Cmin => 2,
        Objective::Cenvy => 4,
    };
    let steps = halves * q;
    let split = Rat::new(Int::one(), Int::from(steps));
    let slack = split.clone() * &pmax_r;
    let step = slack.clone();
    let at = |t: u64| step.clone() * Rat::from_integer(Int::from(t));

    let mut hit: Option<(LocalSearchReport, Rat, Rat)> = None;
    match inst.objective {
        Objective::Cmax => {
            let wl = Rat::zero();
            for t in 0..=steps {
                let wu = avg.clone() + at(t);
                if let Some(found) = attempt_window(kin, &wl, &wu, &split, &slack, guards)? {
                    hit = Some(found);
                    break;
                }
            }
        }
        Objective::Cmin => {
            let wu = avg.clone() + &pmax_r;
            for t in 0..=steps {
                let wl = avg.clone() - at(t);
                if let Some(found) = attempt_window(kin, &wl, &wu, &split, &slack, guards)? {
                    hit = Some(found);
                    break;
                }
            }
        }
        Objective::Cenvy => {
            'grid: for width in 0..=2 * steps {
                for down in 0..=width.min(steps) {
                    let up = width - down;
                    if up > steps {
                        continue;
                    }
                    let wl = avg.clone() - at(down);
                    let wu = avg.clone() + at(up);
                    if let Some(found) = attempt_window(kin, &wl, &wu, &split, &slack, guards)? {
                        hit = Some(found);
                        break 'grid;
                    }
                }
            }
        }
    }
    let Some((report, wl, wu)) = hit else {
        return Err(Error::contract("window grid exhausted without a feasible relaxation".to_string()));
    };

    let lifted = lift_by_preassignment(&report.schedule, &kr.preassigned_per_machine);
    let verdict = verify_schedule(inst, &lifted);
    if !verdict.ok() {
        return Err(Error::contract(format!("lifted schedule failed verification: {:?}", verdict.violations)));
    }
    let value = schedule_value(inst, &lifted)?;
    let base = to_rat(&kr.base_load);
    Ok(ApproxResult {
        value,
        schedule: lifted,
        swaps: report.swaps(),
        window_lower: wl + &base,
        window_upper: wu + base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::model::brute_force_optimum;

    fn guards() -> Guards {
        Guards::default()
    }

    fn loads_of(inst: &Instance, s: &Schedule) -> Vec<i64> {
        let mut out = Vec::new();
        for (load, count) in s.group_loads(&inst.p).unwrap() {
            for _ in 0..count.to_u64().unwrap() {
                out.push(load.to_i64().unwrap());
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn min_max_heap_tracks_both_ends() {
        let mut h = MinMaxHeap::new();
        assert_eq!(h.peek_min(), None);
        assert_eq!(h.pop_max(), None);
        for v in [5, 1, 9, 1, 7, -3, 9, 4] {
            h.push(v);
        }
        assert_eq!(h.len(), 8);
        assert_eq!(h.peek_min(), Some(-3));
        assert_eq!(h.peek_max(), Some(9));
        assert_eq!(h.pop_max(), Some(9));
        assert_eq!(h.pop_max(), Some(9));
        assert_eq!(h.pop_min(), Some(-3));
        assert_eq!(h.pop_min(), Some(1));
        assert_eq!(h.pop_max(), Some(7));
        assert_eq!(h.pop_min(), Some(1));
        assert_eq!(h.pop_max(), Some(5));
        assert_eq!(h.pop_min(), Some(4));
        assert!(h.is_empty());
    }

    #[test]
    fn classify_splits_sizes_into_half_open_bands() {
        let inst = Instance::small(&[5, 6, 10], &[1, 1, 1], 2, Objective::Cmax).unwrap();
        let part = classify(&inst, &rat(1, 2)).unwrap();
        assert_eq!(part.class_count(), 2);
        assert_eq!(part.interval(0), (rat(0, 1), rat(5, 1)));
        assert_eq!(part.interval(1), (rat(5, 1), rat(10, 1)));
        assert_eq!(part.members, vec![vec![0], vec![1, 2]]);
        assert_eq!(part.class_of(&int(5)).unwrap(), 0);
        assert_eq!(part.class_of(&int(6)).unwrap(), 1);
        assert_eq!(part.class_of(&int(10)).unwrap(), 1);
        assert!(part.class_of(&int(11)).is_err());
        assert!(part.class_of(&int(0)).is_err());

        let inst = Instance::small(&[3, 4, 9], &[1, 1, 1], 2, Objective::Cmax).unwrap();
        let part = classify(&inst, &rat(1, 3)).unwrap();
        assert_eq!(part.interval(0), (rat(0, 1), rat(3, 1)));
        assert_eq!(part.interval(1), (rat(3, 1), rat(6, 1)));
        assert_eq!(part.interval(2), (rat(6, 1), rat(9, 1)));
        assert_eq!(part.members, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn classify_with_unit_tolerance_uses_one_band() {
        let inst = Instance::small(&[4, 1], &[2, 2], 2, Objective::Cmax).unwrap();
        let part = classify(&inst, &rat(1, 1)).unwrap();
        assert_eq!(part.class_count(), 1);
        assert_eq!(part.members, vec![vec![0, 1]]);
        assert_eq!(part.width(), rat(4, 1));
    }

    #[test]
    fn classify_rejects_tolerances_that_are_not_unit_fractions() {
        let inst = Instance::small(&[4], &[1], 1, Objective::Cmax).unwrap();
        for eps in [rat(2, 3), rat(0, 1), rat(3, 1), rat(-1, 2)] {
            assert!(matches!(classify(&inst, &eps), Err(Error::Invalid(_))), "eps = {eps}");
        }
    }

    #[test]
    fn slot_relaxation_pins_the_balanced_split() {
        let inst = Instance::small(&[4, 1], &[2, 2], 2, Objective::Cmax).unwrap();
        let y = solve_slot_relaxation(&inst, &rat(0, 1), &rat(5, 1), &rat(1, 1), &rat(0, 1), &guards())
            .unwrap()
            .expect("a balanced split exists");
        assert_eq!(y.y, vec![vec![2], vec![2]]);
    }

    #[test]
    fn slot_relaxation_reports_impossible_windows() {
        let inst = Instance::small(&[4, 1], &[2, 2], 2, Objective::Cmax).unwrap();
        let res =
            solve_slot_relaxation(&inst, &rat(1, 1), &rat(1, 1), &rat(1, 1), &rat(0, 1), &guards()).unwrap();
        assert!(res.is_none());
    }

    #[test]
    fn empty_job_lists_need_a_nonpositive_window_floor() {
        let inst = Instance::new(vec![], vec![], int(2), Objective::Cmax).unwrap();
        let res =
            solve_slot_relaxation(&inst, &rat(1, 1), &rat(2, 1), &rat(1, 1), &rat(0, 1), &guards()).unwrap();
        assert!(res.is_none());
        let y = solve_slot_relaxation(&inst, &rat(0, 1), &rat(0, 1), &rat(1, 1), &rat(0, 1), &guards())
            .unwrap()
            .expect("idle machines satisfy a zero window");
        assert_eq!(y.y, vec![vec![0], vec![0]]);
    }

    #[test]
    fn slot_slack_widens_the_window() {
        let inst = Instance::small(&[4], &[2], 1, Objective::Cmax).unwrap();
        let tight =
            solve_slot_relaxation(&inst, &rat(0, 1), &rat(7, 1), &rat(1, 1), &rat(0, 1), &guards()).unwrap();
        assert!(tight.is_none());
        let relaxed =
            solve_slot_relaxation(&inst, &rat(0, 1), &rat(7, 1), &rat(1, 1), &rat(1, 4), &guards())
                .unwrap()
                .expect("a quarter of pmax covers the overhang");
        assert_eq!(relaxed.y, vec![vec![2]]);
    }

    #[test]
    fn an_overloaded_machine_sheds_its_largest_job() {
        let inst = Instance::small(&[5, 1], &[2, 2], 2, Objective::Cmax).unwrap();
        let y = SlotVector { y: vec![vec![2], vec![2]] };
        let rep = local_search(&inst, &y, &rat(0, 1), &rat(4, 1), &rat(1, 1), &guards()).unwrap();
        assert_eq!(rep.swaps_shed, 1);
        assert_eq!(rep.swaps_fill, 0);
        assert_eq!(loads_of(&inst, &rep.schedule), vec![6, 6]);
    }

    #[test]
    fn loads_inside_the_tolerance_band_stay_put() {
        // the dealt loads (8, 2) already sit within one class width of the
        // window [0, 5], so no trade is triggered
        let inst = Instance::small(&[4, 1], &[2, 2], 2, Objective::Cmax).unwrap();
        let y = SlotVector { y: vec![vec![2], vec![2]] };
        let rep = local_search(&inst, &y, &rat(0, 1), &rat(5, 1), &rat(1, 1), &guards()).unwrap();
        assert_eq!(rep.swaps(), 0);
        assert_eq!(loads_of(&inst, &rep.schedule), vec![2, 8]);
    }

    #[test]
    fn a_starved_machine_pulls_a_bigger_job() {
        let inst = Instance::small(&[5, 1], &[2, 2], 2, Objective::Cmin).unwrap();
        let y = SlotVector { y: vec![vec![2], vec![2]] };
        let rep = local_search(&inst, &y, &rat(8, 1), &rat(12, 1), &rat(1, 1), &guards()).unwrap();
        assert_eq!(rep.swaps_shed, 0);
        assert_eq!(rep.swaps_fill, 1);
        assert_eq!(loads_of(&inst, &rep.schedule), vec![6, 6]);
    }

    #[test]
    fn repair_chains_run_until_the_band_holds() {
        // two consecutive trades: 15 -> 12 -> 8, each restarting the BFS;
        // exercises the incremental graph and the potential assertions
        let inst = Instance::small(&[5, 2, 1], &[3, 2, 2], 3, Objective::Cmax).unwrap();
        let y = SlotVector { y: vec![vec![3], vec![2], vec![2]] };
        let rep = local_search(&inst, &y, &rat(0, 1), &rat(5, 1), &rat(1, 1), &guards()).unwrap();
        assert_eq!(rep.swaps_shed, 2);
        assert_eq!(rep.swaps_fill, 0);
        assert_eq!(loads_of(&inst, &rep.schedule), vec![6, 7, 8]);
    }

    #[test]
    fn an_unrepairable_overload_reports_a_contract_breach() {
        // the two jobs live in different classes, so nothing can trade
        let inst = Instance::small(&[4, 1], &[1, 1], 2, Objective::Cmax).unwrap();
        let y = SlotVector { y: vec![vec![0, 0, 0, 1], vec![1, 0, 0, 0]] };
        let res = local_search(&inst, &y, &rat(0, 1), &rat(2, 1), &rat(1, 4), &guards());
        assert!(matches!(res, Err(Error::Contract(_))));
    }

    #[test]
    fn slot_counts_must_match_the_class_totals() {
        let inst = Instance::small(&[5, 1], &[2, 2], 2, Objective::Cmax).unwrap();
        let y = SlotVector { y: vec![vec![1], vec![2]] };
        let res = local_search(&inst, &y, &rat(0, 1), &rat(9, 1), &rat(1, 1), &guards());
        assert!(matches!(res, Err(Error::Invalid(_))));
    }

    #[test]
    fn approx_cmax_stays_within_one_band_width() {
        let inst = Instance::small(&[4, 1], &[2, 2], 2, Objective::Cmax).unwrap();
        let res = approx_objective(&inst, &rat(1, 2), &guards()).unwrap();
        let opt = brute_force_optimum(&inst, &guards()).unwrap().value;
        assert_eq!(opt, int(5));
        assert_eq!(res.value, int(6));
        assert!(to_rat(&res.value) <= to_rat(&opt) + rat(1, 2) * to_rat(&inst.pmax()));
        assert!(res.value >= opt);
        assert_eq!(res.swaps, 0);
        assert_eq!(res.window_lower, rat(0, 1));
        assert_eq!(res.window_upper, rat(5, 1));
        assert!(verify_schedule(&inst, &res.schedule).ok());
    }

    #[test]
    fn approx_cmax_is_exact_on_divisible_instances() {
        let inst = Instance::small(&[2], &[4], 2, Objective::Cmax).unwrap();
        let res = approx_objective(&inst, &rat(1, 2), &guards()).unwrap();
        assert_eq!(res.value, int(4));
        assert!(verify_schedule(&inst, &res.schedule).ok());
    }

    #[test]
    fn approx_cmin_never_undershoots_by_more_than_a_band() {
        let inst = Instance::small(&[1], &[4], 2, Objective::Cmin).unwrap();
        let res = approx_objective(&inst, &rat(1, 1), &guards()).unwrap();
        let opt = brute_force_optimum(&inst, &guards()).unwrap().value;
        assert_eq!(opt, int(2));
        assert_eq!(res.value, int(2));
        assert!(to_rat(&res.value) >= to_rat(&opt) - to_rat(&inst.pmax()));
        assert!(verify_schedule(&inst, &res.schedule).ok());
    }

    #[test]
    fn approx_cenvy_handles_a_small_mixed_pair() {
        let inst = Instance::small(&[3, 2], &[1, 1], 2, Objective::Cenvy).unwrap();
        let res = approx_objective(&inst, &rat(1, 1), &guards()).unwrap();
        let opt = brute_force_optimum(&inst, &guards()).unwrap().value;
        assert_eq!(opt, int(1));
        assert_eq!(res.value, int(1));
        assert!(verify_schedule(&inst, &res.schedule).ok());
    }

    #[test]
    fn approx_rejects_non_unit_tolerances() {
        let inst = Instance::small(&[3, 2], &[1, 1], 2, Objective::Cmax).unwrap();
        assert!(matches!(approx_objective(&inst, &rat(2, 3), &guards()), Err(Error::Invalid(_))));
    }

    #[test]
    fn approx_results_are_reproducible() {
        let inst = Instance::small(&[5, 3, 1], &[2, 1, 3], 2, Objective::Cenvy).unwrap();
        let a = approx_objective(&inst, &rat(1, 2), &guards()).unwrap();
        let b = approx_objective(&inst, &rat(1, 2), &guards()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        #[derive(Clone, Debug)]
        enum HeapOp {
            Push(i64),
            PopMin,
            PopMax,
        }

        fn arb_heap_ops() -> impl Strategy<Value = Vec<HeapOp>> {
            proptest::collection::vec(
                prop_oneof![
                    3 => (-20i64..20).prop_map(HeapOp::Push),
                    1 => Just(HeapOp::PopMin),
                    1 => Just(HeapOp::PopMax),
                ],
                0..200,
            )
        }

        fn arb_case() -> impl Strategy<Value = (Vec<i64>, Vec<i64>, i64, usize)> {
            (1usize..=3).prop_flat_map(|d| {
                (
                    proptest::sample::subsequence(vec![1i64, 2, 3, 4, 5, 6], d),
                    proptest::collection::vec(1i64..=3, d),
                    1i64..=3,
                    0usize..3,
                )
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(160))]

            #[test]
            fn min_max_heap_matches_a_multiset_oracle(ops in arb_heap_ops()) {
                let mut heap = MinMaxHeap::new();
                let mut oracle: std::collections::BTreeMap<i64, usize> = Default::default();
                for op in ops {
                    let len: usize = oracle.values().sum();
                    prop_assert_eq!(heap.len(), len);
                    prop_assert_eq!(heap.peek_min(), oracle.keys().next().copied());
                    prop_assert_eq!(heap.peek_max(), oracle.keys().next_back().copied());
                    match op {
                        HeapOp::Push(v) => {
                            heap.push(v);
                            *oracle.entry(v).or_insert(0) += 1;
                        }
                        HeapOp::PopMin => {
                            let want = oracle.keys().next().copied();
                            if let Some(k) = want {
                                let left = oracle[&k] - 1;
                                if left == 0 { oracle.remove(&k); } else { oracle.insert(k, left); }
                            }
                            prop_assert_eq!(heap.pop_min(), want);
                        }
                        HeapOp::PopMax => {
                            let want = oracle.keys().next_back().copied();
                            if let Some(k) = want {
                                let left = oracle[&k] - 1;
                                if left == 0 { oracle.remove(&k); } else { oracle.insert(k, left); }
                            }
                            prop_assert_eq!(heap.pop_max(), want);
                        }
                    }
                }
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn approx_tracks_the_brute_force_optimum_within_one_band(
                (p, n, m, pick) in arb_case()
            ) {
                let eps = [rat(1, 1), rat(1, 2), rat(1, 3)][pick].clone();
                for objective in [Objective::Cmax, Objective::Cmin, Objective::Cenvy] {
                    let inst = Instance::small(&p, &n, m, objective).unwrap();
                    let band = eps.clone() * to_rat(&inst.pmax());
                    let opt = brute_force_optimum(&inst, &guards()).unwrap().value;
                    let res = approx_objective(&inst, &eps, &guards()).unwrap();
                    prop_assert!(verify_schedule(&inst, &res.schedule).ok());
                    prop_assert_eq!(res.schedule.machine_count(), inst.m.clone());
                    let got = to_rat(&res.value);
                    let best = to_rat(&opt);
                    match objective {
                        Objective::Cmax | Objective::Cenvy => {
                            prop_assert!(got >= best, "beat the optimum: {} < {}", got, best);
                            prop_assert!(
                                got <= best.clone() + band.clone(),
                                "value {} above {} + {}", got, best, band
                            );
                        }
                        Objective::Cmin => {
                            prop_assert!(got <= best, "beat the optimum: {} > {}", got, best);
                            prop_assert!(
                                got >= best.clone() - band.clone(),
                                "value {} below {} - {}", got, best, band
                            );
                        }
                    }
                }
            }
        }
    }
}
