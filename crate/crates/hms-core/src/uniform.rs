//! Bridging machines with speed types to identical machines.
//!
//! A [`UniformInstance`] schedules high-multiplicity jobs on machines that
//! come in `tau` speed types; a job of size `p_j` occupies a machine of
//! speed `s_i` for `p_j / s_i` time units. Scaling by the speed turns the
//! completion-time question into a pure load question: a machine of type
//! `i` finishes by `u` exactly when its load is at most `s_i * u`.
//! [`reduce_cmax`] and [`reduce_cmin`] rewrite the instance as an
//! identical-machine instance by adding one *dummy job* per machine whose
//! size encodes the machine's type. The thresholds are picked so that no
//! feasible schedule can place two dummies together (min-max) or leave a
//! machine without one (max-min); with as many dummies as machines, every
//! machine ends up holding exactly one, and that dummy names the machine's
//! type. [`lift_schedule`] reads the types back off the dummies, and
//! [`decide`] / [`optimize`] run the full round trip through the
//! identical-machine solver.
//!
//! The envy objective has no such reduction here: one dummy per machine
//! can enforce a one-sided bound but not both sides at once.

use crate::arith::{ceil_div, dot, floor_div, int, sum, Int, Rat};
use crate::exact;
use crate::guard::Guards;
use crate::model::{load, Instance, Objective, Schedule, VerifyReport};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A scheduling instance over machines that come in speed types.
///
/// Types play the same role as in [`Instance`]: `d` distinct processing
/// times with multiplicities. Machines are grouped the same way, into
/// `tau` types of `m[i]` identical machines of positive integer speed
/// `s[i]`. The decision thresholds bound completion times, not loads: a
/// machine of type `i` with load `L` completes at `L / s[i]`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct UniformInstance {
    /// Distinct processing times, all positive.
    #[serde(with = "crate::io::int_vec")]
    pub p: Vec<Int>,
    /// Multiplicity of each processing time, nonnegative.
    #[serde(with = "crate::io::int_vec")]
    pub n: Vec<Int>,
    /// Machine-type speeds, all positive.
    #[serde(with = "crate::io::int_vec")]
    pub s: Vec<Int>,
    /// Multiplicity of each machine type, positive.
    #[serde(with = "crate::io::int_vec")]
    pub m: Vec<Int>,
    pub objective: Objective,
    /// Completion-time lower threshold for decision problems (`cmin`).
    #[serde(default, with = "crate::io::int_opt", skip_serializing_if = "Option::is_none")]
    pub lower: Option<Int>,
    /// Completion-time upper threshold for decision problems (`cmax`).
    #[serde(default, with = "crate::io::int_opt", skip_serializing_if = "Option::is_none")]
    pub upper: Option<Int>,
}

impl UniformInstance {
    /// Validating constructor; rejects duplicate processing times.
    pub fn new(
        p: Vec<Int>,
        n: Vec<Int>,
        s: Vec<Int>,
        m: Vec<Int>,
        objective: Objective,
    ) -> Result<Self> {
        let qi = UniformInstance { p, n, s, m, objective, lower: None, upper: None };
        qi.validate()?;
        let mut seen = BTreeMap::new();
        for (idx, v) in qi.p.iter().enumerate() {
            if let Some(first) = seen.insert(v.clone(), idx) {
                return Err(Error::invalid(format!(
                    "duplicate processing time {v} at type indices {first} and {idx}"
                )));
            }
        }
        Ok(qi)
    }

    /// Convenience constructor from machine integers.
    pub fn small(
        p: &[i64],
        n: &[i64],
        s: &[i64],
        m: &[i64],
        objective: Objective,
    ) -> Result<Self> {
        UniformInstance::new(
            p.iter().copied().map(Int::from).collect(),
            n.iter().copied().map(Int::from).collect(),
            s.iter().copied().map(Int::from).collect(),
            m.iter().copied().map(Int::from).collect(),
            objective,
        )
    }

    pub fn with_bounds(mut self, lower: Option<Int>, upper: Option<Int>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    /// Structural validation: matching lengths, positive sizes and speeds,
    /// nonnegative multiplicities and thresholds, at least one machine
    /// type with at least one machine each.
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
        if self.s.is_empty() {
            return Err(Error::invalid("no machine types".to_string()));
        }
        if self.s.len() != self.m.len() {
            return Err(Error::invalid(format!(
                "s has {} entries but m has {}",
                self.s.len(),
                self.m.len()
            )));
        }
        if let Some(bad) = self.s.iter().find(|v| !v.is_positive()) {
            return Err(Error::invalid(format!("speed {bad} is not positive")));
        }
        if let Some(bad) = self.m.iter().find(|v| !v.is_positive()) {
            return Err(Error::invalid(format!("machine-type count {bad} is not positive")));
        }
        for t in [&self.lower, &self.upper].into_iter().flatten() {
            if t.is_negative() {
                return Err(Error::invalid(format!("threshold {t} is negative")));
            }
        }
        Ok(())
    }

    /// Number of job types.
    pub fn d(&self) -> usize {
        self.p.len()
    }

    /// Number of machine types.
    pub fn tau(&self) -> usize {
        self.s.len()
    }

    /// Largest machine speed.
    pub fn smax(&self) -> Int {
        self.s.iter().max().cloned().expect("validated instances have a machine type")
    }

    /// Total number of machines over all types.
    pub fn machine_count(&self) -> Int {
        sum(&self.m)
    }

    /// Total processing volume of all jobs.
    pub fn total_work(&self) -> Int {
        dot(&self.p, &self.n)
    }
}

/// How a reduced identical-machine instance maps back to its uniform
/// original.
///
/// Job types `0..d` of the reduced instance are the original job types in
/// order; type `d + i` is the dummy tied to machine type `i`. Positions
/// carry that identity even when dummy sizes collide with each other or
/// with real sizes, which is why the reduced instance deliberately allows
/// duplicate processing times.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ReductionMap {
    /// The uniform instance the reduction started from.
    pub uniform: UniformInstance,
    /// Threshold of the uniform completion-time question.
    #[serde(with = "crate::io::int_scalar")]
    pub threshold: Int,
    /// Threshold of the reduced identical-machine load question.
    #[serde(with = "crate::io::int_scalar")]
    pub reduced_threshold: Int,
    /// Dummy sizes, one per machine type.
    #[serde(with = "crate::io::int_vec")]
    pub dummy_sizes: Vec<Int>,
}

/// Reduced instance skeleton: original job types followed by one dummy
/// type per machine type, with one dummy job per machine of that type.
/// Built without the distinct-size check because dummy sizes may
/// legitimately collide (equal speeds, zero thresholds); the
/// identical-machine solver merges duplicates internally and splits its
/// witnesses back onto the tagged types.
fn assemble(qi: &UniformInstance, dummy_sizes: &[Int]) -> Instance {
    let mut p = qi.p.clone();
    p.extend(dummy_sizes.iter().cloned());
    let mut n = qi.n.clone();
    n.extend(qi.m.iter().cloned());
    Instance::raw(p, n, qi.machine_count(), qi.objective)
}

fn required_threshold(qi: &UniformInstance, which: &str, t: &Option<Int>) -> Result<Int> {
    t.clone().ok_or_else(|| {
        Error::invalid(format!("objective {} needs the {which} threshold", qi.objective.as_str()))
    })
}

/// Rewrites a min-max uniform instance with completion threshold `u` as an
/// identical-machine instance with load threshold `u' = 2 * smax * u + 1`.
/// Machine type `i` contributes `m[i]` dummy jobs of size `u' - s[i] * u`,
/// and the reduced instance has one identical machine per original
/// machine. Every dummy is larger than half of `u'`, so no feasible
/// schedule holds two of them on one machine; as dummies and machines are
/// equinumerous, each machine gets exactly one, leaving exactly `s[i] * u`
/// load capacity next to a type-`i` dummy. The reduced instance is
/// feasible if and only if the uniform one is.
pub fn reduce_cmax(qi: &UniformInstance) -> Result<(Instance, ReductionMap)> {
    qi.validate()?;
    if qi.objective != Objective::Cmax {
        return Err(Error::invalid(format!(
            "reduce_cmax applies to objective cmax, not {}",
            qi.objective.as_str()
        )));
    }
    let u = required_threshold(qi, "upper", &qi.upper)?;
    let u_prime = int(2) * qi.smax() * &u + 1u32;
    let dummy_sizes: Vec<Int> = qi.s.iter().map(|si| &u_prime - si * &u).collect();
    let instance = assemble(qi, &dummy_sizes).with_bounds(None, Some(u_prime.clone()));
    debug_assert!(instance.validate().is_ok());
    let map = ReductionMap {
        uniform: qi.clone(),
        threshold: u,
        reduced_threshold: u_prime,
        dummy_sizes,
    };
    Ok((instance, map))
}

/// Rewrites a max-min uniform instance with completion threshold `l` as an
/// identical-machine instance with load threshold `l' = S + smax * l + 1`,
/// where `S` is the total processing volume. Machine type `i` contributes
/// `m[i]` dummy jobs of size `l' - s[i] * l`. All real jobs together fall
/// short of `l'`, so every machine of a feasible schedule carries at least
/// one dummy, hence exactly one; a machine covers `l'` next to a type-`i`
/// dummy exactly when its real load reaches `s[i] * l`. The reduced
/// instance is feasible if and only if the uniform one is.
pub fn reduce_cmin(qi: &UniformInstance) -> Result<(Instance, ReductionMap)> {
    qi.validate()?;
    if qi.objective != Objective::Cmin {
        return Err(Error::invalid(format!(
            "reduce_cmin applies to objective cmin, not {}",
            qi.objective.as_str()
        )));
    }
    let l = required_threshold(qi, "lower", &qi.lower)?;
    let l_prime = qi.total_work() + qi.smax() * &l + 1u32;
    let dummy_sizes: Vec<Int> = qi.s.iter().map(|si| &l_prime - si * &l).collect();
    let instance = assemble(qi, &dummy_sizes).with_bounds(Some(l_prime.clone()), None);
    debug_assert!(instance.validate().is_ok());
    let map = ReductionMap {
        uniform: qi.clone(),
        threshold: l,
        reduced_threshold: l_prime,
        dummy_sizes,
    };
    Ok((instance, map))
}

/// Machines of one type running one configuration of original job types.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct UniformMachineGroup {
    /// Index into the instance's machine types.
    pub machine_type: usize,
    #[serde(with = "crate::io::int_vec")]
    pub config: Vec<Int>,
    #[serde(with = "crate::io::int_scalar")]
    pub count: Int,
}

/// A complete uniform-machine schedule in multiplicity-compressed form.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct UniformSchedule {
    pub machines: Vec<UniformMachineGroup>,
}

impl UniformSchedule {
    pub fn machine_count(&self) -> Int {
        self.machines.iter().fold(Int::zero(), |acc, g| acc + &g.count)
    }

    /// Per-group `(completion time, count)` pairs: load divided by speed.
    pub fn group_completions(&self, qi: &UniformInstance) -> Result<Vec<(Rat, Int)>> {
        self.machines
            .iter()
            .map(|g| {
                let speed = qi.s.get(g.machine_type).ok_or_else(|| {
                    Error::invalid(format!(
                        "machine type {} out of range for {} types",
                        g.machine_type,
                        qi.tau()
                    ))
                })?;
                let l = load(&qi.p, &g.config)?;
                Ok((Rat::new(l, speed.clone()), g.count.clone()))
            })
            .collect()
    }
}

/// Checks type ranges, dimension, job and machine conservation, and the
/// completion-time threshold the objective reads (`upper` for `cmax`,
/// `lower` for `cmin`; the envy objective is not covered by this bridge).
/// Returns a report listing each violation.
pub fn verify_uniform_schedule(qi: &UniformInstance, schedule: &UniformSchedule) -> VerifyReport {
    let mut report = VerifyReport::default();
    let mut fail = |msg: String| report.violations.push(msg);
    if let Err(e) = qi.validate() {
        fail(format!("instance invalid: {e}"));
        return report;
    }
    let threshold = match qi.objective {
        Objective::Cmax => qi.upper.clone(),
        Objective::Cmin => qi.lower.clone(),
        Objective::Cenvy => {
            fail("objective cenvy is not covered by the machine-type bridge".to_string());
            return report;
        }
    };
    let Some(threshold) = threshold else {
        fail(format!("objective {} carries no threshold", qi.objective.as_str()));
        return report;
    };

    let mut used = vec![Int::zero(); qi.d()];
    let mut machines = vec![Int::zero(); qi.tau()];
    for (gi, g) in schedule.machines.iter().enumerate() {
        if g.machine_type >= qi.tau() {
            fail(format!("group {gi}: machine type {} out of range", g.machine_type));
            continue;
        }
        if g.count.is_negative() {
            fail(format!("group {gi}: negative machine count {}", g.count));
            continue;
        }
        if g.config.len() != qi.d() {
            fail(format!(
                "group {gi}: configuration has {} entries for {} job types",
                g.config.len(),
                qi.d()
            ));
            continue;
        }
        if let Some(bad) = g.config.iter().find(|v| v.is_negative()) {
            fail(format!("group {gi}: negative job count {bad}"));
            continue;
        }
        machines[g.machine_type] += &g.count;
        for (uj, cj) in used.iter_mut().zip(&g.config) {
            *uj += cj * &g.count;
        }
        if g.count.is_zero() {
            continue;
        }
        let l = dot(&qi.p, &g.config);
        let scaled = &qi.s[g.machine_type] * &threshold;
        match qi.objective {
            Objective::Cmax if l > scaled => fail(format!(
                "group {gi}: load {l} exceeds the type-{} capacity {scaled}",
                g.machine_type
            )),
            Objective::Cmin if l < scaled => fail(format!(
                "group {gi}: load {l} misses the type-{} cover requirement {scaled}",
                g.machine_type
            )),
            _ => {}
        }
    }
    for (i, (have, want)) in machines.iter().zip(&qi.m).enumerate() {
        if have != want {
            fail(format!("machine type {i}: schedule uses {have} machines, instance has {want}"));
        }
    }
    for (j, (have, want)) in used.iter().zip(&qi.n).enumerate() {
        if have != want {
            fail(format!("type {j}: schedule places {have} jobs, instance has {want}"));
        }
    }
    report
}

/// Reads a reduced-instance schedule back as a uniform schedule: the
/// single dummy on each machine names the machine's type and the real
/// jobs stay put. Fails on any machine holding more or fewer than one
/// dummy; feasible reduced schedules always hold exactly one.
pub fn lift_schedule(schedule: &Schedule, map: &ReductionMap) -> Result<UniformSchedule> {
    let d = map.uniform.d();
    let tau = map.uniform.tau();
    let mut groups: BTreeMap<(usize, Vec<Int>), Int> = BTreeMap::new();
    for g in &schedule.machines {
        if g.count.is_negative() {
            return Err(Error::invalid(format!("negative machine count {}", g.count)));
        }
        if g.count.is_zero() {
            continue;
        }
        if g.config.len() != d + tau {
            return Err(Error::invalid(format!(
                "configuration has {} entries for {} reduced job types",
                g.config.len(),
                d + tau
            )));
        }
        if let Some(bad) = g.config.iter().find(|v| v.is_negative()) {
            return Err(Error::invalid(format!("negative job count {bad} in a configuration")));
        }
        let dummies = sum(&g.config[d..]);
        if !dummies.is_one() {
            return Err(Error::invalid(format!(
                "a machine holds {dummies} dummy jobs; a schedule within the reduced \
                 thresholds has exactly one per machine"
            )));
        }
        let machine_type = g.config[d..]
            .iter()
            .position(|c| c.is_one())
            .expect("a nonnegative vector summing to one has a one entry");
        let key = (machine_type, g.config[..d].to_vec());
        *groups.entry(key).or_insert_with(Int::zero) += &g.count;
    }
    Ok(UniformSchedule {
        machines: groups
            .into_iter()
            .map(|((machine_type, config), count)| UniformMachineGroup {
                machine_type,
                config,
                count,
            })
            .collect(),
    })
}

/// Outcome of [`decide`]: feasibility plus a lifted witness on yes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniformDecision {
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<UniformSchedule>,
}

/// Decides the uniform completion-time question by reducing to identical
/// machines, deciding there, and lifting the witness back. The lifted
/// witness is re-verified against the uniform instance before it is
/// returned. Only `cmax` and `cmin` reduce; `cenvy` is rejected.
pub fn decide(qi: &UniformInstance, guards: &Guards) -> Result<UniformDecision> {
    let (reduced, map) = match qi.objective {
        Objective::Cmax => reduce_cmax(qi)?,
        Objective::Cmin => reduce_cmin(qi)?,
        Objective::Cenvy => {
            return Err(Error::invalid(
                "the dummy-job reduction does not cover the cenvy objective".to_string(),
            ))
        }
    };
    let decision = exact::decide(&reduced, guards)?;
    if !decision.feasible {
        return Ok(UniformDecision { feasible: false, witness: None });
    }
    let witness = decision
        .witness
        .ok_or_else(|| Error::contract("feasible decision without a witness".to_string()))?;
    let lifted = lift_schedule(&witness, &map)?;
    let report = verify_uniform_schedule(qi, &lifted);
    if !report.ok() {
        return Err(Error::contract(format!(
            "lifted witness fails verification: {:?}",
            report.violations
        )));
    }
    Ok(UniformDecision { feasible: true, witness: Some(lifted) })
}

/// Optimum integer threshold plus a witness uniform schedule.
#[derive(Clone, Debug, Serialize)]
pub struct UniformOptimum {
    #[serde(with = "crate::io::int_scalar")]
    pub value: Int,
    pub schedule: UniformSchedule,
}

/// Finds the best integer completion threshold by binary search over
/// [`decide`]: the smallest feasible `u` for `cmax`, the largest feasible
/// `l` for `cmin`. Completion times are rational, so for `cmax` this is
/// the ceiling of the best completion profile; for `cmin` the floor. Any
/// thresholds already carried by the instance are ignored.
pub fn optimize(qi: &UniformInstance, guards: &Guards) -> Result<UniformOptimum> {
    qi.validate()?;
    let probe = |threshold: &Int| -> Result<Option<UniformSchedule>> {
        let question = match qi.objective {
            Objective::Cmax => qi.clone().with_bounds(None, Some(threshold.clone())),
            Objective::Cmin => qi.clone().with_bounds(Some(threshold.clone()), None),
            Objective::Cenvy => unreachable!("rejected before the search"),
        };
        Ok(decide(&question, guards)?.witness)
    };
    let two = int(2);
    let (mut lo, mut hi) = match qi.objective {
        // All work on one fastest machine meets ceil(S / smax), so the
        // search range is never empty.
        Objective::Cmax => (Int::zero(), ceil_div(&qi.total_work(), &qi.smax())),
        // Every machine covering l means l * (total speed) <= S; l = 0 is
        // always met.
        Objective::Cmin => (Int::zero(), floor_div(&qi.total_work(), &dot(&qi.s, &qi.m))),
        Objective::Cenvy => {
            return Err(Error::invalid(
                "the dummy-job reduction does not cover the cenvy objective".to_string(),
            ))
        }
    };
    if qi.objective == Objective::Cmax {
        while lo < hi {
            let mid = floor_div(&(&lo + &hi), &two);
            if probe(&mid)?.is_some() {
                hi = mid;
            } else {
                lo = mid + 1u32;
            }
        }
    } else {
        while lo < hi {
            let mid = floor_div(&(&lo + &hi + 1u32), &two);
            if probe(&mid)?.is_some() {
                lo = mid;
            } else {
                hi = mid - 1u32;
            }
        }
    }
    let schedule = probe(&lo)?.ok_or_else(|| {
        Error::contract(format!("threshold search settled on infeasible value {lo}"))
    })?;
    Ok(UniformOptimum { value: lo, schedule })
}
