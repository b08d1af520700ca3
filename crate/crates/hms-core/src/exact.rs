//! Exact decision and optimization solvers for min-max load, max-min load
//! and envy on identical machines.
//!
//! Every entry point first applies the balancing kernelization from
//! [`crate::kernel`] and shifts thresholds by the preassignment load, then
//! answers the kernel question with a memoized dynamic program over residual
//! job vectors whose transitions are machine configurations. Two greedy
//! shortcuts keep the program honest outside its sweet spot: a list schedule
//! always reaches max load at most `avg + pmax` and min load at least
//! `avg - pmax`, so thresholds beyond those lines need no search at all.
//! The max-min program may restrict configurations to loads at most
//! `lower + 2 * pmax`; that window is only complete for thresholds above
//! `avg - pmax`, which the shortcut guarantees.

use crate::arith::{dot, int, rat_ceil, rat_floor, to_rat, Int};
use crate::guard::Guards;
use crate::kernel::preassign_kernel;
use crate::model::{
    loads_value, verify_schedule, Instance, MachineGroup, Objective, Optimum, Schedule,
};
use crate::{Error, Result};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// A scheduling decision question: does a complete schedule exist whose
/// machine loads all lie in `[lower, upper]`? `upper = None` means
/// unbounded above (the max-min question).
#[derive(Clone, Debug)]
pub struct DecisionProblem {
    pub instance: Instance,
    pub lower: Int,
    pub upper: Option<Int>,
}

impl DecisionProblem {
    /// Reads the thresholds the instance's objective requires: min-max
    /// needs `upper`, max-min needs `lower`, envy needs both.
    pub fn from_instance(inst: &Instance) -> Result<Self> {
        inst.validate()?;
        let missing = |what: &str| {
            Error::invalid(format!(
                "objective {} needs the {what} threshold",
                inst.objective.as_str()
            ))
        };
        let (lower, upper) = match inst.objective {
            Objective::Cmax => (Int::zero(), Some(inst.upper.clone().ok_or_else(|| missing("upper"))?)),
            Objective::Cmin => (inst.lower.clone().ok_or_else(|| missing("lower"))?, None),
            Objective::Cenvy => (
                inst.lower.clone().ok_or_else(|| missing("lower"))?,
                Some(inst.upper.clone().ok_or_else(|| missing("upper"))?),
            ),
        };
        Ok(DecisionProblem { instance: inst.clone(), lower, upper })
    }
}

/// Outcome of [`decide`]: feasibility plus a verifying witness schedule
/// whenever the answer is yes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Decision {
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Schedule>,
}

impl Decision {
    fn no() -> Self {
        Decision { feasible: false, witness: None }
    }
    fn yes(witness: Schedule) -> Self {
        Decision { feasible: true, witness: Some(witness) }
    }
}

/// Decides feasibility of the instance's objective at its recorded
/// thresholds and returns a witness on yes. Duplicate processing times are
/// merged up front and the witness is split back onto the original types.
pub fn decide(inst: &Instance, guards: &Guards) -> Result<Decision> {
    let problem = DecisionProblem::from_instance(inst)?;
    decide_window(&problem, guards)
}

/// Core decision routine on an explicit load window.
pub fn decide_window(problem: &DecisionProblem, guards: &Guards) -> Result<Decision> {
    let inst = problem.instance.canonicalize();
    let kernel = preassign_kernel(&inst)?;
    let k = &kernel.kernel_instance;

    guards.check("job types", k.d() as u64, guards.exact_types)?;
    guards.check(
        "largest processing time",
        k.pmax().to_u64().unwrap_or(u64::MAX),
        guards.exact_pmax,
    )?;
    let mut states: u128 = 1;
    for nj in &k.n {
        let v = (nj + 1u32).to_u128().unwrap_or(u128::MAX);
        states = states.saturating_mul(v);
    }
    guards.check(
        "residual state space",
        states.min(u64::MAX as u128) as u64,
        guards.lattice_points,
    )?;

    // Thresholds move down by the preassignment load; a lower bound below
    // zero is vacuous and an upper bound below zero is unsatisfiable.
    let lower = {
        let shifted = &problem.lower - &kernel.base_load;
        if shifted.is_negative() {
            Int::zero()
        } else {
            shifted
        }
    };
    let upper = match &problem.upper {
        Some(u) => {
            let shifted = u - &kernel.base_load;
            if shifted.is_negative() {
                return Ok(Decision::no());
            }
            Some(shifted)
        }
        None => None,
    };

    let outcome = decide_kernel(k, &lower, upper.as_ref())?;
    Ok(match outcome {
        None => Decision::no(),
        Some(machines) => {
            let lifted = lift_witness(&kernel.preassigned_per_machine, machines);
            let unmerged = unmerge_schedule(&problem.instance, &inst, &lifted);
            debug_assert!(verify_schedule(&problem.instance, &unmerged).ok());
            Decision::yes(unmerged)
        }
    })
}

/// Kernel machine assignments: lexicographically smallest list of
/// (configuration, multiplicity) pairs, or None if infeasible.
fn decide_kernel(
    k: &Instance,
    lower: &Int,
    upper: Option<&Int>,
) -> Result<Option<Vec<(Vec<Int>, Int)>>> {
    let work = k.total_work();
    let jobs = k.total_jobs();
    let pmax = k.pmax();
    let avg = k.avg_load();

    if let Some(u) = upper {
        // Some job type must fit on a machine.
        let max_present = k
            .p
            .iter()
            .zip(&k.n)
            .filter(|(_, nj)| nj.is_positive())
            .map(|(pj, _)| pj)
            .max();
        if let Some(mp) = max_present {
            if u < mp {
                return Ok(None);
            }
        }
    }
    if lower > &work {
        // Even one machine with all the work misses the lower line.
        return Ok(None);
    }
    if to_rat(lower) > avg {
        // The minimum load never exceeds the average.
        return Ok(None);
    }

    let zero_ok = lower.is_zero();
    if !zero_ok && k.m > jobs {
        // Every machine needs at least one job to clear a positive lower
        // threshold.
        return Ok(None);
    }

    // Greedy shortcut: a list schedule keeps every load in
    // [avg - pmax, avg + pmax]; thresholds outside that band are settled
    // without search.
    let lower_easy = to_rat(lower) <= &avg - to_rat(&pmax) || lower.is_zero();
    let upper_easy = match upper {
        Some(u) => to_rat(u) >= &avg + to_rat(&pmax),
        None => true,
    };
    if lower_easy && upper_easy {
        let machines = greedy_assignment(k);
        debug_assert!(window_respected(k, &machines, lower, upper));
        return Ok(Some(machines));
    }

    // Window for configuration loads. Without an upper threshold (max-min)
    // configurations are capped at lower + 2*pmax; complete here because
    // the greedy shortcut already caught lower <= avg - pmax.
    let hi = match upper {
        Some(u) => u.min(&work).clone(),
        None => (lower + int(2) * &pmax).min(work.clone()),
    };
    if lower > &hi {
        return Ok(None);
    }

    let caps: Vec<u64> = k.n.iter().map(|v| v.to_u64().expect("guarded count")).collect();
    let p_small: Vec<u64> = k.p.iter().map(|v| v.to_u64().expect("guarded size")).collect();
    let lo_small = lower.to_u64().expect("window bound below total work");
    let hi_small = hi.to_u64().expect("window bound clamped to total work");

    let mut configs = enumerate_counted(&p_small, &caps, lo_small, hi_small);
    configs.retain(|c| c.iter().any(|&v| v > 0));

    let jobs_small = jobs.to_u64().expect("guarded total jobs");
    let machines_budget = if zero_ok {
        jobs_small.min(k.m.to_u64().unwrap_or(u64::MAX))
    } else {
        k.m.to_u64().expect("machine count at most total jobs here")
    };

    let residual: Vec<u64> = caps.clone();
    let mut dp = Dp {
        configs,
        exact: !zero_ok,
        failed: HashMap::new(),
    };
    let picked = run_with_stack(move || {
        let mut chosen = Vec::new();
        if dp.search(machines_budget, residual, &mut chosen) {
            Some(chosen)
        } else {
            None
        }
    })?;

    let Some(chosen) = picked else {
        return Ok(None);
    };
    // Pad the unused machines with the empty configuration.
    let used = int(chosen.len() as i64);
    let mut groups: Vec<(Vec<Int>, Int)> = Vec::new();
    let spare = &k.m - &used;
    if spare.is_positive() {
        groups.push((vec![Int::zero(); k.d()], spare));
    }
    for c in chosen {
        let cfg: Vec<Int> = c.iter().map(|&v| int(v as i64)).collect();
        match groups.iter_mut().find(|(g, _)| g == &cfg) {
            Some((_, cnt)) => *cnt += 1u32,
            None => groups.push((cfg, Int::one())),
        }
    }
    groups.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Some(groups))
}

struct Dp {
    configs: Vec<Vec<u64>>,
    /// true: every machine must take a (nonzero) configuration;
    /// false: leftover machines may stay empty.
    exact: bool,
    /// residual -> largest machine budget that already failed.
    failed: HashMap<Vec<u64>, u64>,
}

impl Dp {
    fn search(&mut self, machines: u64, residual: Vec<u64>, chosen: &mut Vec<Vec<u64>>) -> bool {
        if residual.iter().all(|&v| v == 0) {
            return !self.exact || machines == 0;
        }
        if machines == 0 {
            return false;
        }
        if let Some(&k) = self.failed.get(&residual) {
            if (!self.exact && machines <= k) || (self.exact && machines == k) {
                return false;
            }
        }
        for i in 0..self.configs.len() {
            let fits = self.configs[i].iter().zip(&residual).all(|(c, r)| c <= r);
            if !fits {
                continue;
            }
            let next: Vec<u64> =
                residual.iter().zip(&self.configs[i]).map(|(r, c)| r - c).collect();
            chosen.push(self.configs[i].clone());
            if self.search(machines - 1, next, chosen) {
                return true;
            }
            chosen.pop();
        }
        let entry = self.failed.entry(residual).or_insert(0);
        if self.exact {
            *entry = machines;
        } else if machines > *entry {
            *entry = machines;
        }
        false
    }
}

/// Deep recursions (one frame per machine) get a dedicated big stack.
pub(crate) fn run_with_stack<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    std::thread::scope(|scope| {
        let handle = std::thread::Builder::new()
            .stack_size(256 << 20)
            .spawn_scoped(scope, f)
            .map_err(|e| Error::contract(format!("worker thread failed to start: {e}")))?;
        handle
            .join()
            .map_err(|_| Error::contract("worker thread panicked".to_string()))
    })
}

/// List schedule over the kernel: jobs in type order, each placed on a
/// currently least-loaded machine. Returns (configuration, multiplicity)
/// groups covering all `m` machines.
fn greedy_assignment(k: &Instance) -> Vec<(Vec<Int>, Int)> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let jobs = k.total_jobs();
    let m_live = jobs.min(k.m.clone()).to_u64().unwrap_or(0) as usize;
    let mut heap: BinaryHeap<Reverse<(Int, usize)>> = (0..m_live)
        .map(|i| Reverse((Int::zero(), i)))
        .collect();
    let mut machines = vec![vec![Int::zero(); k.d()]; m_live];
    for (j, nj) in k.n.iter().enumerate() {
        let mut left = nj.clone();
        while left.is_positive() {
            let Reverse((load, i)) = heap.pop().expect("live machine available");
            machines[i][j] += 1u32;
            heap.push(Reverse((load + &k.p[j], i)));
            left -= 1u32;
        }
    }
    let mut groups: Vec<(Vec<Int>, Int)> = Vec::new();
    let spare = &k.m - int(m_live as i64);
    if spare.is_positive() {
        groups.push((vec![Int::zero(); k.d()], spare));
    }
    for cfg in machines {
        match groups.iter_mut().find(|(g, _)| g == &cfg) {
            Some((_, cnt)) => *cnt += 1u32,
            None => groups.push((cfg, Int::one())),
        }
    }
    groups.sort_by(|a, b| a.0.cmp(&b.0));
    groups
}

fn window_respected(
    k: &Instance,
    groups: &[(Vec<Int>, Int)],
    lower: &Int,
    upper: Option<&Int>,
) -> bool {
    groups.iter().all(|(cfg, _)| {
        let l = dot(&k.p, cfg);
        &l >= lower && upper.map_or(true, |u| &l <= u)
    })
}

/// Adds the preassigned bundle back onto every kernel machine group.
fn lift_witness(preassign: &[Int], groups: Vec<(Vec<Int>, Int)>) -> Schedule {
    let machines: Vec<MachineGroup> = groups
        .into_iter()
        .map(|(cfg, count)| MachineGroup {
            config: cfg.iter().zip(preassign).map(|(c, b)| c + b).collect(),
            count,
        })
        .collect();
    sort_and_merge(machines)
}

fn sort_and_merge(mut machines: Vec<MachineGroup>) -> Schedule {
    machines.retain(|g| g.count.is_positive());
    machines.sort_by(|a, b| a.config.cmp(&b.config));
    let mut merged: Vec<MachineGroup> = Vec::new();
    for g in machines {
        match merged.last_mut() {
            Some(last) if last.config == g.config => last.count += &g.count,
            _ => merged.push(g),
        }
    }
    Schedule { machines: merged }
}

/// Splits a schedule over merged (canonical) types back onto the original
/// type indices, respecting each original type's multiplicity.
///
/// Works column by column: a canonical column's per-machine demand is
/// served from its duplicate types in index order. When a duplicate cannot
/// cover a whole group of identical machines, the group splits; each
/// duplicate is drained at most once per group, so the number of groups
/// stays small and machine counts are never enumerated.
fn unmerge_schedule(original: &Instance, canonical: &Instance, s: &Schedule) -> Schedule {
    if original.p == canonical.p {
        return s.clone();
    }
    let col_of: Vec<usize> = original
        .p
        .iter()
        .map(|pv| canonical.p.iter().position(|q| q == pv).expect("merged type"))
        .collect();
    let mut left: Vec<Int> = original.n.clone();

    struct Batch {
        cfg: Vec<Int>,
        count: Int,
        need: Vec<Int>,
    }
    let mut batches: Vec<Batch> = s
        .machines
        .iter()
        .map(|g| Batch {
            cfg: vec![Int::zero(); original.d()],
            count: g.count.clone(),
            need: g.config.clone(),
        })
        .collect();

    for col in 0..canonical.d() {
        let dups: Vec<usize> = (0..original.d()).filter(|&oj| col_of[oj] == col).collect();
        let mut next: Vec<Batch> = Vec::new();
        for b in batches.drain(..) {
            let need = b.need[col].clone();
            if need.is_zero() || dups.len() == 1 {
                let mut b = b;
                if !need.is_zero() {
                    left[dups[0]] -= &need * &b.count;
                    debug_assert!(!left[dups[0]].is_negative());
                    b.cfg[dups[0]] = need;
                }
                next.push(b);
                continue;
            }
            let mut remaining = b.count.clone();
            while remaining.is_positive() {
                // Assignment pattern for one machine, drawing duplicates in
                // index order from what is left.
                let mut pattern = vec![Int::zero(); original.d()];
                let mut still = need.clone();
                for &oj in &dups {
                    if !still.is_positive() {
                        break;
                    }
                    let take = left[oj].clone().min(still.clone());
                    if take.is_positive() {
                        pattern[oj] = take.clone();
                        still -= &take;
                    }
                }
                debug_assert!(still.is_zero(), "duplicate multiplicities cannot cover demand");
                // Largest machine count this pattern can be repeated for.
                let mut repeat = remaining.clone();
                for &oj in &dups {
                    if pattern[oj].is_positive() {
                        let cap = crate::arith::floor_div(&left[oj], &pattern[oj]);
                        if cap < repeat {
                            repeat = cap;
                        }
                    }
                }
                debug_assert!(repeat.is_positive());
                for &oj in &dups {
                    if pattern[oj].is_positive() {
                        left[oj] -= &pattern[oj] * &repeat;
                    }
                }
                let mut cfg = b.cfg.clone();
                for &oj in &dups {
                    cfg[oj] = pattern[oj].clone();
                }
                next.push(Batch { cfg, count: repeat.clone(), need: b.need.clone() });
                remaining -= &repeat;
            }
        }
        batches = next;
    }
    debug_assert!(left.iter().all(Int::is_zero), "unmerged jobs remain");
    sort_and_merge(
        batches
            .into_iter()
            .map(|b| MachineGroup { config: b.cfg, count: b.count })
            .collect(),
    )
}

/// All configurations `c` with `c <= caps` componentwise and load within
/// `[lo, hi]`, in lexicographic order.
pub fn enumerate_configurations(
    p: &[Int],
    caps: &[Int],
    lo: &Int,
    hi: &Int,
    guards: &Guards,
) -> Result<Vec<Vec<Int>>> {
    if p.len() != caps.len() {
        return Err(Error::invalid(format!(
            "{} processing times vs {} caps",
            p.len(),
            caps.len()
        )));
    }
    for (j, pj) in p.iter().enumerate() {
        if !pj.is_positive() {
            return Err(Error::invalid(format!("processing time of type {j} must be positive")));
        }
        if caps[j].is_negative() {
            return Err(Error::invalid(format!("cap of type {j} is negative")));
        }
    }
    let mut out = Vec::new();
    let mut current = vec![Int::zero(); p.len()];
    // suffix_max[j] = largest load addable from types j.. under the caps.
    let mut suffix_max = vec![Int::zero(); p.len() + 1];
    for j in (0..p.len()).rev() {
        suffix_max[j] = &suffix_max[j + 1] + &p[j] * &caps[j];
    }
    fn walk(
        j: usize,
        load: Int,
        p: &[Int],
        caps: &[Int],
        lo: &Int,
        hi: &Int,
        suffix_max: &[Int],
        current: &mut Vec<Int>,
        out: &mut Vec<Vec<Int>>,
        limit: u64,
    ) -> Result<()> {
        if &load > hi {
            return Ok(());
        }
        if &(&load + &suffix_max[j]) < lo {
            return Ok(());
        }
        if j == p.len() {
            if &load >= lo {
                if out.len() as u64 >= limit {
                    return Err(Error::guard(format!(
                        "configuration enumeration exceeded {limit} entries"
                    )));
                }
                out.push(current.clone());
            }
            return Ok(());
        }
        let mut v = Int::zero();
        while v <= caps[j] {
            current[j] = v.clone();
            walk(
                j + 1,
                &load + &p[j] * &v,
                p,
                caps,
                lo,
                hi,
                suffix_max,
                current,
                out,
                limit,
            )?;
            v += 1u32;
        }
        current[j] = Int::zero();
        Ok(())
    }
    walk(
        0,
        Int::zero(),
        p,
        caps,
        lo,
        hi,
        &suffix_max,
        &mut current,
        &mut out,
        guards.lattice_points,
    )?;
    Ok(out)
}

/// Same enumeration over machine-word domains, used by the decision DP.
fn enumerate_counted(p: &[u64], caps: &[u64], lo: u64, hi: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let d = p.len();
    let mut suffix_max = vec![0u128; d + 1];
    for j in (0..d).rev() {
        suffix_max[j] = suffix_max[j + 1] + (p[j] as u128) * (caps[j] as u128);
    }
    let mut current = vec![0u64; d];
    fn walk(
        j: usize,
        load: u128,
        p: &[u64],
        caps: &[u64],
        lo: u128,
        hi: u128,
        suffix_max: &[u128],
        current: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if load > hi || load + suffix_max[j] < lo {
            return;
        }
        if j == p.len() {
            if load >= lo {
                out.push(current.clone());
            }
            return;
        }
        for v in 0..=caps[j] {
            current[j] = v;
            walk(j + 1, load + (p[j] as u128) * (v as u128), p, caps, lo, hi, suffix_max, current, out);
        }
        current[j] = 0;
    }
    walk(0, 0, p, caps, lo as u128, hi as u128, &suffix_max, &mut current, &mut out);
    out
}

/// Finds the optimal objective value and a witness schedule.
///
/// Min-max: binary search on the upper threshold over
/// `[max(ceil(avg) - pmax, largest present size, 0), floor(avg) + pmax]`.
/// Max-min: binary search on the lower threshold over
/// `[max(ceil(avg - pmax), 0), floor(avg)]`. Envy: for every lower value in
/// the max-min range, binary search the smallest window width `T` in
/// `[0, 2 * pmax]`, keeping the best.
pub fn optimize(inst: &Instance, guards: &Guards) -> Result<Optimum> {
    inst.validate()?;
    let avg = inst.avg_load();
    let pmax = inst.pmax();
    let max_present = inst
        .p
        .iter()
        .zip(&inst.n)
        .filter(|(_, nj)| nj.is_positive())
        .map(|(pj, _)| pj.clone())
        .max()
        .unwrap_or_else(Int::zero);

    let probe = |lower: Int, upper: Option<Int>| -> Result<Option<Schedule>> {
        let problem = DecisionProblem { instance: inst.clone(), lower, upper };
        let d = decide_window(&problem, guards)?;
        Ok(if d.feasible { d.witness } else { None })
    };

    match inst.objective {
        Objective::Cmax => {
            let mut lo = rat_ceil(&avg) - &pmax;
            if lo < max_present {
                lo = max_present;
            }
            if lo.is_negative() {
                lo = Int::zero();
            }
            let hi = rat_floor(&avg) + &pmax;
            let (value, schedule) = binary_search_min(lo, hi, |u| probe(Int::zero(), Some(u.clone())))?;
            finish(inst, value, schedule)
        }
        Objective::Cmin => {
            let mut lo = rat_ceil(&(&avg - to_rat(&pmax)));
            if lo.is_negative() {
                lo = Int::zero();
            }
            let hi = rat_floor(&avg);
            let (value, schedule) = binary_search_max(lo, hi, |l| probe(l.clone(), None))?;
            finish(inst, value, schedule)
        }
        Objective::Cenvy => {
            let mut lo = rat_ceil(&avg) - &pmax;
            if lo.is_negative() {
                lo = Int::zero();
            }
            let hi = rat_floor(&avg);
            let t_cap = int(2) * &pmax;
            let mut best: Option<(Int, Schedule)> = None;
            let mut lower = lo;
            while lower <= hi {
                if probe(lower.clone(), Some(&lower + &t_cap))?.is_some() {
                    let (t, schedule) = binary_search_min(Int::zero(), t_cap.clone(), |t| {
                        probe(lower.clone(), Some(&lower + t))
                    })?;
                    let better = best.as_ref().map_or(true, |(bt, _)| &t < bt);
                    if better {
                        best = Some((t, schedule));
                    }
                }
                lower += 1u32;
            }
            let (value, schedule) = best.ok_or_else(|| {
                Error::contract("no feasible envy window in the completion range".to_string())
            })?;
            finish(inst, value, schedule)
        }
    }
}

fn finish(inst: &Instance, value: Int, schedule: Schedule) -> Result<Optimum> {
    let report = verify_schedule(&strip_thresholds(inst), &schedule);
    if !report.ok() {
        return Err(Error::contract(format!(
            "optimizer witness fails verification: {:?}",
            report.violations
        )));
    }
    let loads: Vec<Int> = schedule
        .group_loads(&inst.p)?
        .into_iter()
        .map(|(l, _)| l)
        .collect();
    let achieved = loads_value(&loads, inst.objective);
    if achieved != value {
        return Err(Error::contract(format!(
            "witness value {achieved} does not match optimum {value}"
        )));
    }
    Ok(Optimum { value, schedule })
}

fn strip_thresholds(inst: &Instance) -> Instance {
    let mut i = inst.clone();
    i.lower = None;
    i.upper = None;
    i
}

/// Smallest `v` in `[lo, hi]` whose probe succeeds; the probe is monotone.
fn binary_search_min(
    lo: Int,
    hi: Int,
    mut probe: impl FnMut(&Int) -> Result<Option<Schedule>>,
) -> Result<(Int, Schedule)> {
    let mut lo = lo;
    let mut hi = hi;
    let mut witness = probe(&hi)?.ok_or_else(|| {
        Error::contract("decision at the guaranteed-feasible end failed".to_string())
    })?;
    let mut best = hi.clone();
    while lo < hi {
        let mid = crate::arith::floor_div(&(&lo + &hi), &int(2));
        match probe(&mid)? {
            Some(w) => {
                witness = w;
                best = mid.clone();
                hi = mid;
            }
            None => lo = mid + 1u32,
        }
    }
    Ok((best, witness))
}

/// Largest `v` in `[lo, hi]` whose probe succeeds; the probe is antitone.
fn binary_search_max(
    lo: Int,
    hi: Int,
    mut probe: impl FnMut(&Int) -> Result<Option<Schedule>>,
) -> Result<(Int, Schedule)> {
    let mut lo = lo;
    let mut hi = hi;
    let mut witness = probe(&lo)?.ok_or_else(|| {
        Error::contract("decision at the guaranteed-feasible end failed".to_string())
    })?;
    let mut best = lo.clone();
    while lo < hi {
        let mid = crate::arith::ceil_div(&(&lo + &hi), &int(2));
        match probe(&mid)? {
            Some(w) => {
                witness = w;
                best = mid.clone();
                lo = mid;
            }
            None => hi = mid - 1u32,
        }
    }
    Ok((best, witness))
}
