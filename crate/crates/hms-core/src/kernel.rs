//! Balancing kernelization and the swap machinery behind it.
//!
//! The kernelization preassigns an identical bundle of jobs to every machine
//! so that at most `2 * pmax * m` jobs of each type remain. Optimal values
//! for min-max and max-min load shift by exactly the preassignment load;
//! envy is unchanged. The swap routines ([`subset_with_multiple`],
//! [`rebalance`]) are the executable form of the exchange argument that
//! justifies the kernel: any schedule can be rebalanced, without hurting its
//! extreme loads, until no two machines differ by more than `pmax` jobs of
//! any single type.

use crate::arith::{ceil_div, dot, mod_floor, Int};
use crate::guard::Guards;
use crate::model::{Instance, Schedule};
use crate::{io, Error, Result};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Output of [`preassign_kernel`].
///
/// `kernel_instance` keeps the original processing times, machine count and
/// objective but carries no thresholds; callers that reduce a decision
/// problem through the kernel shift their thresholds by `base_load`
/// themselves. The preassignment is stored once because it is identical for
/// every machine and `m` may be astronomically large.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelResult {
    pub kernel_instance: Instance,
    #[serde(with = "io::int_vec")]
    pub preassigned_per_machine: Vec<Int>,
    #[serde(with = "io::int_scalar")]
    pub base_load: Int,
}

/// Preassigns `max(ceil(n_j/m) - pmax, 0)` jobs of each type to every
/// machine and returns the reduced instance together with the per-machine
/// bundle and its load. Runs in `O(d)` big-integer operations.
pub fn preassign_kernel(inst: &Instance) -> Result<KernelResult> {
    inst.validate()?;
    let pmax = inst.pmax();
    let mut pre = Vec::with_capacity(inst.d());
    let mut kernel_n = Vec::with_capacity(inst.d());
    let mut base_load = Int::zero();
    for (pj, nj) in inst.p.iter().zip(&inst.n) {
        let mut take = ceil_div(nj, &inst.m) - &pmax;
        if take.is_negative() {
            take = Int::zero();
        }
        kernel_n.push(nj - &inst.m * &take);
        base_load += pj * &take;
        pre.push(take);
    }
    let kernel_instance = Instance::raw(inst.p.clone(), kernel_n, inst.m.clone(), inst.objective);
    Ok(KernelResult { kernel_instance, preassigned_per_machine: pre, base_load })
}

/// Finds a nonzero sub-multiset of the jobs described by `z` (counts per
/// type, sizes from `p`) whose total size is a positive multiple of `b`.
///
/// Walks the multiset in type order and compares prefix sums modulo `b`;
/// two equal residues bracket a window summing to a multiple of `b`. Only
/// the first `min(|z|, b)` elements are scanned, which keeps the window at
/// most `b` elements long and guarantees a repeat whenever `|z| >= b`. With
/// fewer elements the scan is still attempted and errs only if every
/// residue is distinct.
pub fn subset_with_target(p: &[Int], z: &[Int], b: &Int) -> Result<(Vec<Int>, Int)> {
    if p.len() != z.len() {
        return Err(Error::invalid(format!(
            "sizes/counts length mismatch: {} vs {}",
            p.len(),
            z.len()
        )));
    }
    if !b.is_positive() {
        return Err(Error::invalid("target must be positive".to_string()));
    }
    for (j, (pj, zj)) in p.iter().zip(z).enumerate() {
        if !pj.is_positive() {
            return Err(Error::invalid(format!("size of type {j} must be positive")));
        }
        if zj.is_negative() {
            return Err(Error::invalid(format!("count of type {j} is negative")));
        }
    }
    // Prefix boundaries are recorded as per-type consumption vectors;
    // seen[r] = boundary of the first prefix whose sum has residue r.
    let mut seen: HashMap<Int, Vec<Int>> = HashMap::new();
    seen.insert(Int::zero(), vec![Int::zero(); p.len()]);
    let mut consumed = vec![Int::zero(); p.len()];
    let mut prefix_sum = Int::zero();
    let mut scanned = Int::zero();
    'outer: for j in 0..p.len() {
        let mut left = z[j].clone();
        while left.is_positive() {
            if &scanned >= b {
                break 'outer;
            }
            prefix_sum += &p[j];
            consumed[j] += 1u32;
            scanned += 1u32;
            left -= 1u32;
            let residue = mod_floor(&prefix_sum, b);
            if let Some(start) = seen.get(&residue) {
                let zp: Vec<Int> = consumed.iter().zip(start).map(|(c, s)| c - s).collect();
                let total = dot(p, &zp);
                let alpha = &total / b;
                debug_assert!(alpha.is_positive());
                debug_assert_eq!(&alpha * b, total);
                return Ok((zp, alpha));
            }
            seen.insert(residue, consumed.clone());
        }
    }
    Err(Error::invalid(
        "no nonzero subset with total size a multiple of the target exists in the scanned prefix"
            .to_string(),
    ))
}

/// [`subset_with_target`] with the target taken from type `j` of `p`.
pub fn subset_with_multiple(z: &[Int], p: &[Int], j: usize) -> Result<(Vec<Int>, Int)> {
    let b = p
        .get(j)
        .ok_or_else(|| Error::invalid(format!("type index {j} out of range")))?
        .clone();
    subset_with_target(p, z, &b)
}

/// Largest difference, over machine pairs and job types, in the number of
/// jobs of one type the two machines run. Groups never need expanding:
/// within a group the difference is zero.
pub fn gap_size(s: &Schedule) -> Int {
    if s.machines.is_empty() {
        return Int::zero();
    }
    let d = s.machines[0].config.len();
    let mut gap = Int::zero();
    for j in 0..d {
        let mut lo: Option<&Int> = None;
        let mut hi: Option<&Int> = None;
        for g in &s.machines {
            let v = &g.config[j];
            if lo.map_or(true, |cur| v < cur) {
                lo = Some(v);
            }
            if hi.map_or(true, |cur| v > cur) {
                hi = Some(v);
            }
        }
        if let (Some(lo), Some(hi)) = (lo, hi) {
            let g = hi - lo;
            if g > gap {
                gap = g;
            }
        }
    }
    gap
}

/// Rebalances a complete schedule until its gap size is at most `pmax`.
///
/// Repeatedly picks the lexicographically smallest machine/machine/type
/// triple attaining the gap. When the rich machine's load exceeds the poor
/// machine's by at least the type's size, one job moves over (both new
/// loads stay inside the old pair's load interval, so no extreme load gets
/// worse). Otherwise a load-preserving swap trades a bundle of the poor
/// machine's surplus jobs, found by [`subset_with_target`], against
/// equally much work of the gap type. Each step lowers the potential
/// (gap, number of triples attaining it) lexicographically, which bounds
/// the number of iterations; the decrease is asserted on every step.
pub fn rebalance(s: &Schedule, inst: &Instance, guards: &Guards) -> Result<Schedule> {
    inst.validate()?;
    let mut machines = s.expand(guards)?;
    if machines.len() <= 1 {
        return Ok(s.clone());
    }
    let d = inst.d();
    for x in &machines {
        if x.len() != d {
            return Err(Error::invalid(format!(
                "schedule configuration has {} types, instance has {d}",
                x.len()
            )));
        }
    }
    let pmax = inst.pmax();
    let mut loads: Vec<Int> = machines.iter().map(|x| dot(&inst.p, x)).collect();
    let mut potential = measure(&machines);
    while potential.0 > pmax {
        let (i1, i2, j) = smallest_triple_at(&machines, &potential.0)
            .expect("a positive gap is attained by some triple");
        if (&loads[i1] - &loads[i2]) >= inst.p[j] {
            machines[i1][j] -= 1u32;
            machines[i2][j] += 1u32;
            let pj = inst.p[j].clone();
            loads[i1] -= &pj;
            loads[i2] += &pj;
        } else {
            let surplus: Vec<Int> = (0..d)
                .map(|k| {
                    let diff = &machines[i2][k] - &machines[i1][k];
                    if diff.is_positive() {
                        diff
                    } else {
                        Int::zero()
                    }
                })
                .collect();
            let (zp, alpha) = subset_with_target(&inst.p, &surplus, &inst.p[j])?;
            if machines[i1][j] < alpha {
                return Err(Error::contract(
                    "swap would overdraw the gap type on the rich machine".to_string(),
                ));
            }
            for k in 0..d {
                machines[i1][k] += &zp[k];
                machines[i2][k] -= &zp[k];
            }
            machines[i1][j] -= &alpha;
            machines[i2][j] += &alpha;
        }
        let next = measure(&machines);
        if next >= potential {
            return Err(Error::contract(format!(
                "rebalance potential did not decrease: {potential:?} -> {next:?}"
            )));
        }
        potential = next;
    }
    Ok(Schedule::from_machines(machines))
}

/// (gap size, number of ordered triples attaining it): the termination
/// potential of [`rebalance`].
fn measure(machines: &[Vec<Int>]) -> (Int, u64) {
    let mut mu = Int::zero();
    for i1 in 0..machines.len() {
        for i2 in 0..machines.len() {
            for j in 0..machines[i1].len() {
                let g = &machines[i1][j] - &machines[i2][j];
                if g > mu {
                    mu = g;
                }
            }
        }
    }
    if mu.is_zero() {
        return (mu, 0);
    }
    let mut count = 0u64;
    for i1 in 0..machines.len() {
        for i2 in 0..machines.len() {
            for j in 0..machines[i1].len() {
                if &machines[i1][j] - &machines[i2][j] == mu {
                    count += 1;
                }
            }
        }
    }
    (mu, count)
}

fn smallest_triple_at(machines: &[Vec<Int>], mu: &Int) -> Option<(usize, usize, usize)> {
    for i1 in 0..machines.len() {
        for i2 in 0..machines.len() {
            if i1 == i2 {
                continue;
            }
            for j in 0..machines[i1].len() {
                if &(&machines[i1][j] - &machines[i2][j]) == mu {
                    return Some((i1, i2, j));
                }
            }
        }
    }
    None
}
