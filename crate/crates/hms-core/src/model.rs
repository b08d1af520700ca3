//! Problem instances, configurations, schedules, and the brute-force
//! reference optimizer.
//!
//! An [`Instance`] describes jobs in high-multiplicity encoding: `d` distinct
//! processing times `p` with multiplicities `n`, to be scheduled on `m`
//! identical machines. A machine is described by a *configuration*: the
//! vector of how many jobs of each type it runs. Schedules are multisets of
//! configurations, compressed as `(config, count)` groups so that `m` may be
//! astronomically large even though only a few distinct configurations occur.

use crate::arith::{dot, sum, Int, Rat};
use crate::guard::Guards;
use crate::{Error, Result};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Optimization target over machine loads.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Minimize the maximum load (makespan).
    Cmax,
    /// Maximize the minimum load (machine cover).
    Cmin,
    /// Minimize the difference between maximum and minimum load.
    Cenvy,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Cmax => "cmax",
            Objective::Cmin => "cmin",
            Objective::Cenvy => "cenvy",
        }
    }

    /// True if smaller objective values are better.
    pub fn minimizes(self) -> bool {
        !matches!(self, Objective::Cmin)
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cmax" => Ok(Objective::Cmax),
            "cmin" => Ok(Objective::Cmin),
            "cenvy" => Ok(Objective::Cenvy),
            other => Err(Error::invalid(format!("unknown objective {other:?}"))),
        }
    }
}

/// A scheduling instance in high-multiplicity encoding.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Instance {
    /// Distinct processing times, all positive.
    #[serde(with = "crate::io::int_vec")]
    pub p: Vec<Int>,
    /// Multiplicity of each processing time, nonnegative.
    #[serde(with = "crate::io::int_vec")]
    pub n: Vec<Int>,
    /// Number of identical machines, positive.
    #[serde(with = "crate::io::int_scalar")]
    pub m: Int,
    pub objective: Objective,
    /// Lower load threshold for decision problems (`cmin`, `cenvy`).
    #[serde(default, with = "crate::io::int_opt", skip_serializing_if = "Option::is_none")]
    pub lower: Option<Int>,
    /// Upper load threshold for decision problems (`cmax`, `cenvy`).
    #[serde(default, with = "crate::io::int_opt", skip_serializing_if = "Option::is_none")]
    pub upper: Option<Int>,
}

impl Instance {
    /// Validating constructor; rejects duplicate processing times.
    pub fn new(p: Vec<Int>, n: Vec<Int>, m: Int, objective: Objective) -> Result<Self> {
        let inst = Instance { p, n, m, objective, lower: None, upper: None };
        inst.validate()?;
        inst.require_distinct_types()?;
        Ok(inst)
    }

    /// Constructor without any validation. Used where duplicate type sizes
    /// are deliberate (machine-speed reductions keep colliding dummy types
    /// separate) and in tests.
    pub fn raw(p: Vec<Int>, n: Vec<Int>, m: Int, objective: Objective) -> Self {
        Instance { p, n, m, objective, lower: None, upper: None }
    }

    /// Convenience constructor from machine integers.
    pub fn small(p: &[i64], n: &[i64], m: i64, objective: Objective) -> Result<Self> {
        Instance::new(
            p.iter().copied().map(Int::from).collect(),
            n.iter().copied().map(Int::from).collect(),
            Int::from(m),
            objective,
        )
    }

    pub fn with_bounds(mut self, lower: Option<Int>, upper: Option<Int>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    /// Structural validation: matching lengths, positive processing times,
    /// nonnegative multiplicities and thresholds, at least one machine.
    /// Duplicate processing times are allowed here; see
    /// [`Instance::require_distinct_types`].
    pub fn validate(&self) -> Result<()> {
        if self.p.len() != self.n.len() {
            return Err(Error::invalid(format!(
                "p has {} entries but n has {}",
                self.p.len(),
                self.n.len()
            )));
        }
        if let Some(bad) = self.p.iter().find(|v| !v.is_positive()) {
            return Err(Error::invalid(format!("processing time {bad} is not positive")));
        }
        if let Some(bad) = self.n.iter().find(|v| v.is_negative()) {
            return Err(Error::invalid(format!("multiplicity {bad} is negative")));
        }
        if !self.m.is_positive() {
            return Err(Error::invalid(format!("machine count {} is not positive", self.m)));
        }
        for t in [&self.lower, &self.upper].into_iter().flatten() {
            if t.is_negative() {
                return Err(Error::invalid(format!("threshold {t} is negative")));
            }
        }
        Ok(())
    }

    /// Enforces the canonical-form invariant that processing times are
    /// pairwise distinct.
    pub fn require_distinct_types(&self) -> Result<()> {
        let mut seen = BTreeMap::new();
        for (idx, v) in self.p.iter().enumerate() {
            if let Some(first) = seen.insert(v.clone(), idx) {
                return Err(Error::invalid(format!(
                    "duplicate processing time {v} at type indices {first} and {idx}"
                )));
            }
        }
        Ok(())
    }

    /// Merges duplicate processing times by summing multiplicities, keeping
    /// first-occurrence order. Thresholds and objective carry over.
    pub fn canonicalize(&self) -> Instance {
        let mut order: Vec<Int> = Vec::new();
        let mut counts: BTreeMap<Int, Int> = BTreeMap::new();
        for (pv, nv) in self.p.iter().zip(&self.n) {
            counts
                .entry(pv.clone())
                .and_modify(|c| *c += nv)
                .or_insert_with(|| {
                    order.push(pv.clone());
                    nv.clone()
                });
        }
        Instance {
            p: order.clone(),
            n: order.iter().map(|pv| counts[pv].clone()).collect(),
            m: self.m.clone(),
            objective: self.objective,
            lower: self.lower.clone(),
            upper: self.upper.clone(),
        }
    }

    /// Number of job types.
    pub fn d(&self) -> usize {
        self.p.len()
    }

    /// Largest processing time over all types, `0` for an empty type list.
    pub fn pmax(&self) -> Int {
        self.p.iter().max().cloned().unwrap_or_else(Int::zero)
    }

    /// Total number of jobs.
    pub fn total_jobs(&self) -> Int {
        sum(&self.n)
    }

    /// Total processing volume.
    pub fn total_work(&self) -> Int {
        dot(&self.p, &self.n)
    }

    /// Average machine load `total_work / m`.
    pub fn avg_load(&self) -> Rat {
        Rat::new(self.total_work(), self.m.clone())
    }
}

/// Load of a configuration under processing times `p`.
pub fn load(p: &[Int], config: &[Int]) -> Result<Int> {
    if p.len() != config.len() {
        return Err(Error::invalid(format!(
            "configuration has {} entries for {} job types",
            config.len(),
            p.len()
        )));
    }
    Ok(dot(p, config))
}

/// A group of identical machines running the same configuration.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MachineGroup {
    #[serde(with = "crate::io::int_vec")]
    pub config: Vec<Int>,
    #[serde(with = "crate::io::int_scalar")]
    pub count: Int,
}

/// A complete schedule in multiplicity-compressed form.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Schedule {
    pub machines: Vec<MachineGroup>,
}

impl Schedule {
    pub fn machine_count(&self) -> Int {
        self.machines.iter().fold(Int::zero(), |acc, g| acc + &g.count)
    }

    /// Builds a compressed schedule from explicit machine configurations,
    /// grouping equal configurations and sorting groups lexicographically.
    pub fn from_machines(machines: Vec<Vec<Int>>) -> Schedule {
        let mut groups: BTreeMap<Vec<Int>, Int> = BTreeMap::new();
        for c in machines {
            *groups.entry(c).or_insert_with(Int::zero) += 1u8;
        }
        Schedule {
            machines: groups
                .into_iter()
                .map(|(config, count)| MachineGroup { config, count })
                .collect(),
        }
    }

    /// Expands the compressed form into explicit machine configurations.
    pub fn expand(&self, guards: &Guards) -> Result<Vec<Vec<Int>>> {
        let total = self.machine_count();
        let total_u = total
            .to_u64()
            .ok_or_else(|| Error::guard(format!("cannot expand {total} machines")))?;
        guards.check("expanded machines", total_u, guards.expanded_machines)?;
        let mut out = Vec::with_capacity(total_u as usize);
        for g in &self.machines {
            let c = g
                .count
                .to_u64()
                .ok_or_else(|| Error::invalid(format!("machine count {} out of range", g.count)))?;
            for _ in 0..c {
                out.push(g.config.clone());
            }
        }
        Ok(out)
    }

    /// Per-group `(load, count)` pairs under the given processing times.
    pub fn group_loads(&self, p: &[Int]) -> Result<Vec<(Int, Int)>> {
        self.machines
            .iter()
            .map(|g| Ok((load(p, &g.config)?, g.count.clone())))
            .collect()
    }
}

/// Objective value of a schedule's load profile; `0` for an empty profile.
pub fn loads_value(loads: &[Int], objective: Objective) -> Int {
    let (min, max) = match (loads.iter().min(), loads.iter().max()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Int::zero(),
    };
    match objective {
        Objective::Cmax => max.clone(),
        Objective::Cmin => min.clone(),
        Objective::Cenvy => max - min,
    }
}

/// Objective value of a schedule.
pub fn schedule_value(inst: &Instance, schedule: &Schedule) -> Result<Int> {
    let loads: Vec<Int> = schedule
        .group_loads(&inst.p)?
        .into_iter()
        .filter(|(_, count)| count.is_positive())
        .map(|(l, _)| l)
        .collect();
    Ok(loads_value(&loads, inst.objective))
}

/// Result of checking a schedule against an instance.
#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyReport {
    pub violations: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, msg: String) {
        self.violations.push(msg);
    }
}

/// Checks machine count, dimension, job conservation, and — where the
/// instance carries thresholds relevant to its objective — per-configuration
/// load bounds. Returns a report listing each violation.
pub fn verify_schedule(inst: &Instance, schedule: &Schedule) -> VerifyReport {
    let mut report = VerifyReport::default();
    if let Err(e) = inst.validate() {
        report.push(format!("instance invalid: {e}"));
        return report;
    }
    let d = inst.d();
    let mut used = vec![Int::zero(); d];
    let mut machines = Int::zero();
    for (idx, g) in schedule.machines.iter().enumerate() {
        if g.config.len() != d {
            report.push(format!("group {idx}: configuration has {} entries, expected {d}", g.config.len()));
            continue;
        }
        if !g.count.is_positive() {
            report.push(format!("group {idx}: non-positive machine count {}", g.count));
            continue;
        }
        if let Some(bad) = g.config.iter().find(|v| v.is_negative()) {
            report.push(format!("group {idx}: negative job count {bad}"));
            continue;
        }
        machines += &g.count;
        for (acc, v) in used.iter_mut().zip(&g.config) {
            *acc += v * &g.count;
        }
        let l = dot(&inst.p, &g.config);
        let check_upper = matches!(inst.objective, Objective::Cmax | Objective::Cenvy);
        let check_lower = matches!(inst.objective, Objective::Cmin | Objective::Cenvy);
        if check_upper {
            if let Some(u) = &inst.upper {
                if &l > u {
                    report.push(format!("group {idx}: load {l} exceeds upper threshold {u}"));
                }
            }
        }
        if check_lower {
            if let Some(lo) = &inst.lower {
                if &l < lo {
                    report.push(format!("group {idx}: load {l} below lower threshold {lo}"));
                }
            }
        }
    }
    if machines != inst.m {
        report.push(format!("schedule uses {machines} machines, instance has {}", inst.m));
    }
    for (j, (acc, nj)) in used.iter().zip(&inst.n).enumerate() {
        if acc != nj {
            report.push(format!("type {j}: schedule places {acc} jobs, instance has {nj}"));
        }
    }
    report
}

/// Optimum value plus a witness schedule.
#[derive(Clone, Debug, Serialize)]
pub struct Optimum {
    #[serde(with = "crate::io::int_scalar")]
    pub value: Int,
    pub schedule: Schedule,
}

struct BruteForce<'a> {
    p: Vec<Int>,
    counts: Vec<u64>,
    m: usize,
    objective: Objective,
    loads: Vec<Int>,
    assign: Vec<Vec<u64>>,
    best: Option<(Int, Vec<Vec<u64>>)>,
    window: Option<(&'a Int, &'a Int)>,
    window_hit: bool,
}

impl BruteForce<'_> {
    fn better(&self, candidate: &Int, incumbent: &Int) -> bool {
        if self.objective.minimizes() {
            candidate < incumbent
        } else {
            candidate > incumbent
        }
    }

    fn leaf(&mut self) {
        if let Some((lo, hi)) = self.window {
            if self.loads.iter().all(|l| l >= lo && l <= hi) {
                self.window_hit = true;
            }
            return;
        }
        let value = loads_value(&self.loads, self.objective);
        match &self.best {
            Some((incumbent, _)) if !self.better(&value, incumbent) => {}
            _ => self.best = Some((value, self.assign.clone())),
        }
    }

    fn recurse(&mut self, job_type: usize, machine: usize, remaining: u64) {
        if self.window.is_some() && self.window_hit {
            return;
        }
        if job_type == self.counts.len() {
            self.leaf();
            return;
        }
        let p_t = self.p[job_type].clone();
        if machine + 1 == self.m {
            self.loads[machine] += &p_t * remaining;
            self.assign[machine][job_type] = remaining;
            let (next_type, next_remaining) =
                (job_type + 1, self.counts.get(job_type + 1).copied().unwrap_or(0));
            self.recurse(next_type, 0, next_remaining);
            self.loads[machine] -= &p_t * remaining;
            self.assign[machine][job_type] = 0;
            return;
        }
        for here in 0..=remaining {
            self.loads[machine] += &p_t * here;
            self.assign[machine][job_type] = here;
            self.recurse(job_type, machine + 1, remaining - here);
            self.loads[machine] -= &p_t * here;
            self.assign[machine][job_type] = 0;
        }
    }
}

fn brute_force_setup<'a>(
    inst: &Instance,
    guards: &Guards,
    window: Option<(&'a Int, &'a Int)>,
) -> Result<BruteForce<'a>> {
    inst.validate()?;
    let jobs = inst
        .total_jobs()
        .to_u64()
        .ok_or_else(|| Error::guard("total job count out of range".to_string()))?;
    guards.check("brute-force jobs", jobs, guards.brute_force_jobs)?;
    let m = inst
        .m
        .to_u64()
        .ok_or_else(|| Error::guard("machine count out of range".to_string()))?;
    guards.check("brute-force machines", m, guards.brute_force_machines)?;
    let counts: Vec<u64> = inst.n.iter().map(|v| v.to_u64().unwrap()).collect();
    Ok(BruteForce {
        p: inst.p.clone(),
        counts,
        m: m as usize,
        objective: inst.objective,
        loads: vec![Int::zero(); m as usize],
        assign: vec![vec![0; inst.d()]; m as usize],
        best: None,
        window,
        window_hit: false,
    })
}

/// Exhaustive reference optimizer. Enumerates every distribution of the job
/// multiset over machines (as per-type compositions) and keeps the best
/// objective value together with the first witness attaining it.
pub fn brute_force_optimum(inst: &Instance, guards: &Guards) -> Result<Optimum> {
    let mut bf = brute_force_setup(inst, guards, None)?;
    let first = bf.counts.first().copied().unwrap_or(0);
    bf.recurse(0, 0, first);
    let (value, assign) = bf
        .best
        .take()
        .ok_or_else(|| Error::contract("brute force found no assignment".to_string()))?;
    let machines: Vec<Vec<Int>> = assign
        .into_iter()
        .map(|row| row.into_iter().map(Int::from).collect())
        .collect();
    Ok(Optimum { value, schedule: Schedule::from_machines(machines) })
}

/// Exhaustive check whether some complete schedule keeps every machine load
/// in `[lower, upper]`. Independent of the threshold-comparison shortcut:
/// this enumerates assignments directly, so it can serve as an oracle for
/// window decisions (`cenvy`).
pub fn brute_force_window(inst: &Instance, lower: &Int, upper: &Int, guards: &Guards) -> Result<bool> {
    if lower > upper {
        return Ok(false);
    }
    let mut bf = brute_force_setup(inst, guards, Some((lower, upper)))?;
    let first = bf.counts.first().copied().unwrap_or(0);
    bf.recurse(0, 0, first);
    Ok(bf.window_hit)
}
