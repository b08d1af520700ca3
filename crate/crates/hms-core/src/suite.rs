//! Seeded randomized property suites over the whole toolkit.
//!
//! Each section replays one library contract against an independent oracle
//! on freshly sampled inputs: the exact solver against brute force, the
//! model builders against direct searches over their source problems, the
//! distance budget against the true nearest decomposition, and so on. A
//! section samples from its own deterministic stream, so running a subset
//! of sections reproduces exactly the cases a full run would have seen.
//!
//! Reports are plain data and serialize to stable JSON: the same
//! configuration yields byte-identical output, which is what the CLI's
//! repeated-run determinism check rests on. Every section also folds the
//! JSON form of each sampled input into a digest, so two runs can be
//! compared in depth even when both pass.
//!
//! [`Mutant`] injects a deliberately broken routine variant in place of the
//! real one; the suite must then fail with counterexamples. This guards the
//! suite itself against vacuous checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{dot, int, to_rat, Int, Rat};
use crate::guard::Guards;
use crate::lattice::EqSystem;
use crate::model::{self, Instance, Objective, Schedule};
use crate::pqrep::{
    build_complex, build_identical, build_mswbp, build_nfold, build_setup, build_sumwu,
    ComplexInstance, ComplexJobType, MswbpInstance, PQRep, SetupInstance, SetupJobType,
    SumWuInstance, SumWuJobType, UniformNFold,
};
use crate::pqsolve::{enumerate_lattice, solve_pqr};
use crate::relax::{self, ConvexRelaxSolution};
use crate::uniform::{self, UniformInstance};
use crate::{approx, exact, ftreduce, hull, kernel};
use crate::{Error, Result};
use num_traits::{Signed, Zero};

/// One independently seeded section of the suite.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionKind {
    /// Exact optimizer versus brute-force enumeration, all objectives.
    ExactOracle,
    /// Preassignment kernel: optimum splits into base load plus kernel
    /// optimum, and kernel multiplicities respect their cap.
    Kernel,
    /// Gap repair: rebalanced schedules have gap at most `pmax`, conserve
    /// jobs, and never push a load outside the input's load range.
    Rebalance,
    /// Prefix-residue subset extraction postconditions.
    Subset,
    /// The six model builders against direct searches of their source
    /// problems.
    Builders,
    /// Integer decompositions stay within the declared distance budget of
    /// the uniformized relaxation.
    Proximity,
    /// Coefficient preprocessing preserves feasibility and lifts witnesses.
    Preprocess,
    /// Row reduction: exhaustive inequality equivalence over its box and
    /// magnitudes within the declared budget.
    RowReduction,
    /// Speed-type instances versus their identical-machine reductions.
    SpeedBridge,
    /// Tolerance-band solver lands within one band of the brute-force
    /// optimum under the declared swap budget.
    Approx,
    /// Enumerated vertex counts stay under the profile bound, which must
    /// not move when only the right-hand side does.
    Hull,
}

impl SectionKind {
    /// All sections, in the order [`run_suite`] executes them.
    pub fn all() -> Vec<SectionKind> {
        vec![
            SectionKind::ExactOracle,
            SectionKind::Kernel,
            SectionKind::Rebalance,
            SectionKind::Subset,
            SectionKind::Builders,
            SectionKind::Proximity,
            SectionKind::Preprocess,
            SectionKind::RowReduction,
            SectionKind::SpeedBridge,
            SectionKind::Approx,
            SectionKind::Hull,
        ]
    }

    /// Stable report/CLI name.
    pub fn name(self) -> &'static str {
        match self {
            SectionKind::ExactOracle => "exact-oracle",
            SectionKind::Kernel => "kernel",
            SectionKind::Rebalance => "rebalance",
            SectionKind::Subset => "subset",
            SectionKind::Builders => "builders",
            SectionKind::Proximity => "proximity",
            SectionKind::Preprocess => "preprocess",
            SectionKind::RowReduction => "row-reduction",
            SectionKind::SpeedBridge => "speed-bridge",
            SectionKind::Approx => "approx",
            SectionKind::Hull => "hull",
        }
    }

    /// Inverse of [`SectionKind::name`].
    pub fn parse_name(name: &str) -> Option<SectionKind> {
        SectionKind::all().into_iter().find(|k| k.name() == name)
    }

    /// Case count for a full run.
    pub fn default_cases(self) -> u32 {
        match self {
            SectionKind::ExactOracle => 500,
            SectionKind::Kernel => 500,
            SectionKind::Rebalance => 1000,
            SectionKind::Subset => 1000,
            SectionKind::Builders => 600,
            SectionKind::Proximity => 100,
            SectionKind::Preprocess => 100,
            SectionKind::RowReduction => 200,
            SectionKind::SpeedBridge => 300,
            SectionKind::Approx => 200,
            SectionKind::Hull => 200,
        }
    }

    fn salt(self) -> u64 {
        match self {
            SectionKind::ExactOracle => 1,
            SectionKind::Kernel => 2,
            SectionKind::Rebalance => 3,
            SectionKind::Subset => 4,
            SectionKind::Builders => 5,
            SectionKind::Proximity => 6,
            SectionKind::Preprocess => 7,
            SectionKind::RowReduction => 8,
            SectionKind::SpeedBridge => 9,
            SectionKind::Approx => 10,
            SectionKind::Hull => 11,
        }
    }
}

/// Deliberately broken routine variants. Running the suite with a mutant
/// swaps the named routine for its broken twin; the sections exercising it
/// must then report failures, proving the checks have teeth.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutant {
    /// A rebalancer whose loop trigger comparison is inverted: it grinds on
    /// schedules that are already tight and leaves wide gaps untouched.
    FlippedGapTrigger,
}

impl Mutant {
    /// Stable CLI name.
    pub fn name(self) -> &'static str {
        match self {
            Mutant::FlippedGapTrigger => "flipped-gap-trigger",
        }
    }

    /// Inverse of [`Mutant::name`].
    pub fn parse_name(name: &str) -> Option<Mutant> {
        match name {
            "flipped-gap-trigger" => Some(Mutant::FlippedGapTrigger),
            _ => None,
        }
    }
}

/// Everything a deterministic suite run depends on.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub sections: Vec<SectionKind>,
    /// Cap on every section's case count; `None` runs the full defaults.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cases: Option<u32>,
    pub guards: Guards,
    /// Constants profile for the distance-budget section.
    pub distance_profile: relax::ConstantsProfile,
    /// Constants profile for the hull-bound section.
    pub hull_profile: hull::ConstantsProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutant: Option<Mutant>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            sections: SectionKind::all(),
            max_cases: None,
            guards: recommended_guards(),
            distance_profile: relax::ConstantsProfile::default(),
            hull_profile: hull::ConstantsProfile::default(),
            mutant: None,
        }
    }
}

/// Guard set for full suite runs. The sampled inputs are all desk-scale,
/// but the speed-bridge reductions inflate thresholds past the library's
/// default `exact_pmax`, and the hull sweeps enumerate more points than the
/// default lattice cap charges for its quadratic certification work.
pub fn recommended_guards() -> Guards {
    Guards { exact_pmax: 64, lattice_points: 1_000_000, ..Guards::default() }
}

/// Outcome of one section.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SectionReport {
    pub name: String,
    /// Cases executed.
    pub cases: u32,
    /// Cases that violated the section's property.
    pub failed_cases: u32,
    /// First few counterexamples, one line each.
    pub failures: Vec<String>,
    /// Hash over the JSON form of every sampled input, for comparing runs.
    pub digest: String,
    pub passed: bool,
}

/// Outcome of a whole run.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub sections: Vec<SectionReport>,
    pub passed: bool,
}

/// Runs every configured section and collects the reports. An empty section
/// list passes trivially. Case generation, checking and reporting are pure
/// functions of the configuration.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let mut sections = Vec::with_capacity(config.sections.len());
    for &kind in &config.sections {
        let cases = match config.max_cases {
            Some(cap) => kind.default_cases().min(cap),
            None => kind.default_cases(),
        };
        let report = match kind {
            SectionKind::ExactOracle => run_exact(config, cases)?,
            SectionKind::Kernel => run_kernel(config, cases)?,
            SectionKind::Rebalance => run_rebalance(config, cases)?,
            SectionKind::Subset => run_subset(config, cases)?,
            SectionKind::Builders => run_builders(config, cases)?,
            SectionKind::Proximity => run_proximity(config, cases)?,
            SectionKind::Preprocess => run_preprocess(config, cases)?,
            SectionKind::RowReduction => run_row_reduction(config, cases)?,
            SectionKind::SpeedBridge => run_speed_bridge(config, cases)?,
            SectionKind::Approx => run_approx(config, cases)?,
            SectionKind::Hull => run_hull(config, cases)?,
        };
        sections.push(report);
    }
    let passed = sections.iter().all(|s| s.passed);
    Ok(SuiteReport { seed: config.seed, sections, passed })
}

/// Per-section stream: a fixed function of the seed and the section, so
/// section subsets replay the full run's cases.
fn section_rng(seed: u64, kind: SectionKind) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ kind.salt().wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

const MAX_RECORDED_FAILURES: usize = 5;

/// Accumulates case counts, capped counterexamples and the input digest.
struct Recorder {
    kind: SectionKind,
    cases: u32,
    failed: u32,
    failures: Vec<String>,
    digest: u64,
}

impl Recorder {
    fn new(kind: SectionKind) -> Self {
        Recorder { kind, cases: 0, failed: 0, failures: Vec::new(), digest: 0xcbf2_9ce4_8422_2325 }
    }

    /// Registers a sampled input: bumps the case count and folds the
    /// input's JSON into the digest.
    fn observe<T: Serialize>(&mut self, input: &T) {
        let text = json(input);
        self.observe_raw(&text);
    }

    /// Same as [`Recorder::observe`] for inputs already rendered to text.
    fn observe_raw(&mut self, text: &str) {
        self.cases += 1;
        for byte in text.bytes() {
            self.digest ^= u64::from(byte);
            self.digest = self.digest.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn fail(&mut self, detail: String) {
        self.failed += 1;
        if self.failures.len() < MAX_RECORDED_FAILURES {
            self.failures.push(detail);
        }
    }

    /// Records a failure when `ok` is false; returns `ok`.
    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) -> bool {
        if !ok {
            self.fail(detail());
        }
        ok
    }

    fn finish(self) -> SectionReport {
        SectionReport {
            name: self.kind.name().to_string(),
            cases: self.cases,
            failed_cases: self.failed,
            failures: self.failures,
            digest: format!("{:016x}", self.digest),
            passed: self.failed == 0,
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("suite inputs serialize")
}

/// Splits the routine under test from the suite's own machinery: guard
/// breaches abort the run (the configuration is too tight for the suite),
/// any other error is a counterexample against the routine.
fn under_test<T>(res: Result<T>) -> Result<std::result::Result<T, String>> {
    match res {
        Ok(v) => Ok(Ok(v)),
        Err(Error::Guard(msg)) => Err(Error::Guard(msg)),
        Err(e) => Ok(Err(e.to_string())),
    }
}

fn as_i64(v: &Int) -> i64 {
    i64::try_from(v).expect("suite values fit in i64")
}

const OBJECTIVES: [Objective; 3] = [Objective::Cmax, Objective::Cmin, Objective::Cenvy];

/// Distinct sizes in `1..=max_p`, ascending, between one and `max_d` many.
fn pick_distinct_sizes(rng: &mut ChaCha8Rng, max_d: usize, max_p: i64) -> Vec<i64> {
    let d = rng.gen_range(1..=max_d.min(max_p as usize));
    let mut pool: Vec<i64> = (1..=max_p).collect();
    for i in 0..d {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    let mut p = pool[..d].to_vec();
    p.sort_unstable();
    p
}

/// Instance in the brute-forceable band: multiplicities in `0..=3` trimmed
/// to `max_total` jobs.
fn sample_instance(
    rng: &mut ChaCha8Rng,
    objective: Objective,
    max_d: usize,
    max_p: i64,
    max_m: i64,
    max_total: i64,
) -> Instance {
    let p = pick_distinct_sizes(rng, max_d, max_p);
    let m = rng.gen_range(1..=max_m);
    let mut n: Vec<i64> = p.iter().map(|_| rng.gen_range(0..=3)).collect();
    while n.iter().sum::<i64>() > max_total {
        let j = rng.gen_range(0..n.len());
        if n[j] > 0 {
            n[j] -= 1;
        }
    }
    Instance::small(&p, &n, m, objective).expect("sampled instance is valid")
}

/// Instance plus a complete schedule for it, built machine-first.
fn sample_schedule(
    rng: &mut ChaCha8Rng,
    max_d: usize,
    max_p: i64,
    machines: usize,
    max_count: i64,
) -> (Instance, Schedule) {
    let p = pick_distinct_sizes(rng, max_d, max_p);
    let configs: Vec<Vec<i64>> =
        (0..machines).map(|_| p.iter().map(|_| rng.gen_range(0..=max_count)).collect()).collect();
    schedule_case(&p, &configs)
}

fn schedule_case(p: &[i64], configs: &[Vec<i64>]) -> (Instance, Schedule) {
    let d = p.len();
    let n: Vec<i64> = (0..d).map(|j| configs.iter().map(|c| c[j]).sum()).collect();
    let inst = Instance::small(p, &n, configs.len() as i64, Objective::Cmax)
        .expect("schedule-backed instance is valid");
    let machines = configs.iter().map(|c| c.iter().map(|&v| int(v)).collect()).collect();
    (inst, Schedule::from_machines(machines))
}

fn run_exact(cfg: &SuiteConfig, cases: u32) -> Result<SectionReport> {
    let mut rng = section_rng(cfg.seed, SectionKind::ExactOracle);
    let mut rec = Recorder::new(SectionKind::ExactOracle);
    for case in 0..cases {
        let objective = OBJECTIVES[(case % 3) as usize];
        let inst = sample_instance(&mut rng, objective, 3, 6, 4, 10);
        rec.observe(&inst);
        let brute = model::brute_force_optimum(&inst, &cfg.guards)?;
        let fast = match under_test(exact::optimize(&inst, &cfg.guards))? {
            Ok(opt) => opt,
            Err(msg) => {
                rec.fail(format!("case {case}: optimize failed ({msg}) on {}", json(&inst)));
                continue;
            }
        };
        if !rec.check(fast.value == brute.value, || {
            format!(
                "case {case}: optimize found {} against reference {} on {}",
                fast.value,
                brute.value,
                json(&inst)
            )
        }) {
            continue;
        }
        let verify = model::verify_schedule(&inst, &fast.schedule);
        rec.check(verify.ok(), || {
            format!("case {case}: witness rejected ({:?}) on {}", verify.violations, json(&inst))
        });
    }
    Ok(rec.finish())
}

fn run_kernel(cfg: &SuiteConfig, cases: u32) -> Result<SectionReport> {
    let mut rng = section_rng(cfg.seed, SectionKind::Kernel);
    let mut rec = Recorder::new(SectionKind::Kernel);
    for case in 0..cases {
        let objective = OBJECTIVES[(case % 3) as usize];
        // Every other case shrinks sizes and machine counts so the
        // preassignment actually fires (it needs n_j > m * pmax).
        let inst = if case % 2 == 0 {
            sample_instance(&mut rng, objective, 2, 2, 2, 10)
        } else {
            sample_instance(&mut rng, objective, 3, 6, 4, 10)
        };
        rec.observe(&inst);
        let k = match under_test(kernel::preassign_kernel(&inst))? {
            Ok(k) => k,
            Err(msg) => {
                rec.fail(format!("case {case}: kernel failed ({msg}) on {}", json(&inst)));
                continue;
            }
        };
        let cap = int(2) * inst.pmax() * &inst.m;
        if !rec.check(k.kernel_instance.n.iter().all(|nj| nj <= &cap), || {
            format!(
                "case {case}: kernel multiplicities {:?} exceed cap {cap} on {}",
                k.kernel_instance.n,
                json(&inst)
            )
        }) {
            continue;
        }
        let whole = model::brute_force_optimum(&inst, &cfg.guards)?;
        let part = model::brute_force_optimum(&k.kernel_instance, &cfg.guards)?;
        let recombined = match objective {
            Objective::Cmax | Objective::Cmin => &k.base_load + &part.value,
            Objective::Cenvy => part.value.clone(),
        };
        rec.check(recombined == whole.value, || {
            format!(
                "case {case}: base load {} plus kernel optimum {} gives {recombined}, \
                 whole-instance optimum is {} on {}",
                k.base_load,
                part.value,
                whole.value,
                json(&inst)
            )
        });
    }
    Ok(rec.finish())
}

/// Equal-load schedule with a wide gap: every repair step must then be a
/// load-preserving swap, so the output loads must match the input exactly.
fn equal_load_case(rng: &mut ChaCha8Rng) -> (Instance, Schedule) {
    let q = rng.gen_range(2..=4);
    let a = rng.gen_range(2..=3);
    let machines = rng.gen_range(2..=4usize);
    let configs: Vec<Vec<i64>> =
        (0..machines).map(|i| if i % 2 == 0 { vec![a * q, 0] } else { vec![0, a] }).collect();
    schedule_case(&[1, q], &configs)
}

fn run_rebalance(cfg: &SuiteConfig, cases: u32) -> Result<SectionReport> {
    let mut rng = section_rng(cfg.seed, SectionKind::Rebalance);
    let mut rec = Recorder::new(SectionKind::Rebalance);
    for case in 0..cases {
        let swap_only = case % 4 == 3;
        let (inst, sched) = if swap_only {
            equal_load_case(&mut rng)
        } else {
            let machines = rng.gen_range(2..=4usize);
            sample_schedule(&mut rng, 3, 6, machines, 3)
        };
        rec.observe(&(&inst, &sched));
        let pmax = inst.pmax();
        let before = sched.expand(&cfg.guards)?;
        let loads_before: Vec<Int> = before.iter().map(|c| dot(&inst.p, c)).collect();
        let outcome = match cfg.mutant {
            Some(Mutant::FlippedGapTrigger) => {
                if kernel::gap_size(&sched) > pmax {
                    Ok(sched.clone())
                } else {
                    kernel::rebalance(&sched, &inst, &cfg.guards)
                }
            }
            None => kernel::rebalance(&sched, &inst, &cfg.guards),
        };
        let out = match under_test(outcome)? {
            Ok(out) => out,
            Err(msg) => {
                rec.fail(format!("case {case}: rebalance failed ({msg}) on {}", json(&sched)));
                continue;
            }
        };
        let gap = kernel::gap_size(&out);
        if !rec.check(gap <= pmax, || {
            format!("case {case}: gap {gap} above pmax {pmax} after rebalance on {}", json(&sched))
        }) {
            continue;
        }
        let after = out.expand(&cfg.guards)?;
        let totals: Vec<Int> =
            (0..inst.d()).map(|j| after.iter().map(|c| c[j].clone()).sum()).collect();
        if !rec.check(totals == inst.n && after.len() == before.len(), || {
            format!(
                "case {case}: jobs not conserved ({totals:?} vs {:?}) on {}",
                inst.n,
                json(&sched)
            )
        }) {
            continue;
        }
        let loads_after: Vec<Int> = after.iter().map(|c| dot(&inst.p, c)).collect();
        let hi_before = loads_before.iter().max().expect("machines present");
        let lo_before = loads_before.iter().min().expect("machines present");
        rec.check(
            loads_after.iter().all(|l| l <= hi_before && l >= lo_before),
            || {
                format!(
                    "case {case}: a load left the input range [{lo_before}, {hi_before}] on {}",
                    json(&sched)
                )
            },
        );
        if swap_only {
            // All input loads are equal, so single-job moves can never
            // fire; the swap branch must preserve the load multiset.
            rec.check(loads_after.iter().all(|l| l == hi_before), || {
                format!(
                    "case {case}: swap-only repair changed a load ({loads_after:?} from \
                     {hi_before}) on {}",
                    json(&sched)
                )
            });
        }
    }
    Ok(rec.finish())
}

fn run_subset(cfg: &SuiteConfig, cases: u32) -> Result<SectionReport> {
    let mut rng = section_rng(cfg.seed, SectionKind::Subset);
    let mut rec = Recorder::new(SectionKind::Subset);
    let _ = cfg;
    for case in 0..cases {
        let p64 = pick_distinct_sizes(&mut rng, 3, 6);
        let b64: i64 = rng.gen_range(1..=10);
        let mut z64: Vec<i64> = p64.iter().map(|_| rng.gen_range(0..=6)).collect();
        while z64.iter().sum::<i64>() < b64 {
            let j = rng.gen_range(0..z64.len());
            z64[j] += 1;
        }
        let p: Vec<Int> = p64.iter().map(|&v| int(v)).collect();
        let z: Vec<Int> = z64.iter().map(|&v| int(v)).collect();
        let b = int(b64);
        let input = format!("p {p:?} z {z:?} b {b}");
        rec.observe_raw(&input);
        let (zp, alpha) = match under_test(kernel::subset_with_target(&p, &z, &b))? {
            Ok(found) => found,
            Err(msg) => {
                rec.fail(format!(
                    "case {case}: extraction failed ({msg}) despite enough elements on {input}"
                ));
                continue;
            }
        };
        let in_range = zp.iter().zip(&z).all(|(v, zj)| !v.is_negative() && v <= zj);
        let nonzero = zp.iter().any(|v| v.is_positive());
        let picked: Int = zp.iter().cloned().sum();
        let total = dot(&p, &zp);
        let ok = in_range
            && nonzero
            && alpha.is_positive()
            && total == &alpha * &b
            && picked <= b;
        rec.check(ok, || {
            format!("case {case}: subset {zp:?} (alpha {alpha}) breaks a postcondition on {input}")
        });
    }
    Ok(rec.finish())
}

/// All integer vectors `0 <= c <= limits`, lexicographically.
fn integer_box(limits: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &limit in limits {
        let mut next = Vec::with_capacity(out.len() * (limit as usize + 1));
        for base in &out {
            for v in 0..=limit {
                let mut row = base.clone();
                row.push(v);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Whether `m` of the given configurations (repetition allowed) sum to
/// exactly `n`.
fn covers_exactly(configs: &[Vec<i64>], n: &[i64], m: usize) -> bool {
    fn go(configs: &[Vec<i64>], n: &[i64], left: usize, start: usize, acc: &mut [i64]) -> bool {
        if left == 0 {
            return acc == n;
        }
        for idx in start..configs.len() {
            let fits = acc.iter().zip(&configs[idx]).zip(n).all(|((a, c), t)| a + c <= *t);
            if !fits {
                continue;
            }
            for (a, c) in acc.iter_mut().zip(&configs[idx]) {
                *a += c;
            }
            if go(configs, n, left - 1, idx, acc) {
                return true;
            }
            for (a, c) in acc.iter_mut().zip(&configs[idx]) {
                *a -= c;
            }
        }
        false
    }
    let mut acc = vec![0i64; n.len()];
    go(configs, n, m, 0, &mut acc)
}

/// Load window in plain integers: `cmax` bounds from above, `cmin` from
/// below (anything up to the whole workload is fine), envy from both sides.
fn oracle_window(
    objective: Objective,
    lower: &Option<Vec<Int>>,
    upper: &Option<Vec<Int>>,
    vacuous_hi: Vec<i64>,
) -> (Vec<i64>, Vec<i64>) {
    let dim = vacuous_hi.len();
    let get = |v: &Option<Vec<Int>>| -> Vec<i64> {
        v.as_ref().expect("generator supplies the window").iter().map(as_i64).collect()
    };
    match objective {
        Objective::Cmax => (vec![0; dim], get(upper)),
        Objective::Cmin => (get(lower), vacuous_hi),
        Objective::Cenvy => (get(lower), get(upper)),
    }
}

/// Direct search for the deadline/class/cap scheduling problem: every
/// machine's counts must respect the job cap, the class budget, each
/// deadline prefix per dimension and the load window, and the machines
/// together must run every job.
fn complex_feasible(ci: &ComplexInstance) -> bool {
    let dim = ci.types[0].p.len();
    let n: Vec<i64> = ci.types.iter().map(|t| as_i64(&t.n)).collect();
    let vac: Vec<i64> = (0..dim)
        .map(|i| ci.types.iter().map(|t| as_i64(&t.p[i]) * as_i64(&t.n)).sum())
        .collect();
    let (lo, hi) = oracle_window(ci.objective, &ci.lower, &ci.upper, vac);
    let mut deadlines: Vec<i64> = ci.types.iter().map(|t| as_i64(&t.deadline)).collect();
    deadlines.dedup();
    let size_cap = as_i64(&ci.size_cap);
    let class_cap = as_i64(&ci.class_cap);
    let configs: Vec<Vec<i64>> = integer_box(&n)
        .into_iter()
        .filter(|c| {
            if c.iter().sum::<i64>() > size_cap {
                return false;
            }
            let mut classes: Vec<usize> = ci
                .types
                .iter()
                .zip(c)
                .filter(|(_, &v)| v > 0)
                .map(|(t, _)| t.class)
                .collect();
            classes.sort_unstable();
            classes.dedup();
            if classes.len() as i64 > class_cap {
                return false;
            }
            for &dl in &deadlines {
                for i in 0..dim {
                    let work: i64 = ci
                        .types
                        .iter()
                        .zip(c)
                        .filter(|(t, _)| as_i64(&t.deadline) <= dl)
                        .map(|(t, &v)| as_i64(&t.p[i]) * v)
                        .sum();
                    if work > dl {
                        return false;
                    }
                }
            }
            (0..dim).all(|i| {
                let load: i64 = ci.types.iter().zip(c).map(|(t, &v)| as_i64(&t.p[i]) * v).sum();
                lo[i] <= load && load <= hi[i]
            })
        })
        .collect();
    covers_exactly(&configs, &n, as_i64(&ci.m) as usize)
}

/// Direct search for the class-setup problem: machine loads carry the
/// setups of every class present, and must sit in the window per dimension.
fn setup_feasible(si: &SetupInstance) -> bool {
    let dim = si.types[0].p.len();
    let n: Vec<i64> = si.types.iter().map(|t| as_i64(&t.n)).collect();
    let setup_total: i64 = si.setups.iter().map(as_i64).sum();
    let vac: Vec<i64> = (0..dim)
        .map(|i| {
            si.types.iter().map(|t| as_i64(&t.p[i]) * as_i64(&t.n)).sum::<i64>() + setup_total
        })
        .collect();
    let (lo, hi) = oracle_window(si.objective, &si.lower, &si.upper, vac);
    let configs: Vec<Vec<i64>> = integer_box(&n)
        .into_iter()
        .filter(|c| {
            let mut classes: Vec<usize> = si
                .types
                .iter()
                .zip(c)
                .filter(|(_, &v)| v > 0)
                .map(|(t, _)| t.class)
                .collect();
            classes.sort_unstable();
            classes.dedup();
            let setups: i64 = classes.iter().map(|&cl| as_i64(&si.setups[cl - 1])).sum();
            (0..dim).all(|i| {
                let load: i64 = si.types.iter().zip(c).map(|(t, &v)| as_i64(&t.p[i]) * v).sum::<i64>()
                    + setups;
                lo[i] <= load && load <= hi[i]
            })
        })
        .collect();
    covers_exactly(&configs, &n, as_i64(&si.m) as usize)
}

/// Direct search for the late-weight decision: pick per-machine on-time
/// sets meeting every due-date prefix, so that the weight kept on time
/// reaches the total weight minus the cap.
fn sumwu_feasible(si: &SumWuInstance) -> bool {
    let dim = si.types[0].p.len();
    let n: Vec<i64> = si.types.iter().map(|t| as_i64(&t.n)).collect();
    let total_weight: i64 = si.types.iter().map(|t| as_i64(&t.weight) * as_i64(&t.n)).sum();
    let need = total_weight - as_i64(&si.late_weight_cap);
    if need <= 0 {
        return true;
    }
    let mut dues: Vec<i64> = si.types.iter().map(|t| as_i64(&t.due)).collect();
    dues.dedup();
    let configs: Vec<(Vec<i64>, i64)> = integer_box(&n)
        .into_iter()
        .filter(|c| {
            dues.iter().all(|&due| {
                (0..dim).all(|i| {
                    let work: i64 = si
                        .types
                        .iter()
                        .zip(c)
                        .filter(|(t, _)| as_i64(&t.due) <= due)
                        .map(|(t, &v)| as_i64(&t.p[i]) * v)
                        .sum();
                    work <= due
                })
            })
        })
        .map(|c| {
            let weight = si.types.iter().zip(&c).map(|(t, &v)| as_i64(&t.weight) * v).sum();
            (c, weight)
        })
        .collect();
    fn go(
        configs: &[(Vec<i64>, i64)],
        n: &[i64],
        left: usize,
        start: usize,
        acc: &mut [i64],
        weight: i64,
        need: i64,
    ) -> bool {
        if weight >= need {
            return true;
        }
        if left == 0 {
            return false;
        }
        for idx in start..configs.len() {
            let (c, w) = &configs[idx];
            let fits = acc.iter().zip(c).zip(n).all(|((a, v), t)| a + v <= *t);
            if !fits {
                continue;
            }
            for (a, v) in acc.iter_mut().zip(c) {
                *a += v;
            }
            if go(configs, n, left - 1, idx, acc, weight + w, need) {
                return true;
            }
            for (a, v) in acc.iter_mut().zip(c) {
                *a -= v;
            }
        }
        false
    }
    let mut acc = vec![0i64; n.len()];
    go(&configs, &n, as_i64(&si.m) as usize, 0, &mut acc, 0, need)
}

/// Direct search over repeated blocks: every block solves the local system
/// inside the bounds, the linked sums must match exactly, and the summed
/// objective must reach the target.
fn nfold_feasible(nf: &UniformNFold) -> bool {
    let upper: Vec<i64> = nf.upper.iter().map(as_i64).collect();
    let locals: Vec<Vec<i64>> = integer_box(&upper)
        .into_iter()
        .filter(|x| {
            nf.local.iter().zip(&nf.local_rhs).all(|(row, rhs)| {
                row.iter().zip(x).map(|(a, &v)| as_i64(a) * v).sum::<i64>() == as_i64(rhs)
            })
        })
        .collect();
    let link_rhs: Vec<i64> = nf.linking_rhs.iter().map(as_i64).collect();
    let target = as_i64(&nf.target);
    fn go(
        locals: &[Vec<i64>],
        nf: &UniformNFold,
        link_rhs: &[i64],
        target: i64,
        left: usize,
        start: usize,
        link: &mut [i64],
        value: i64,
    ) -> bool {
        if left == 0 {
            return link == link_rhs && value >= target;
        }
        for idx in start..locals.len() {
            let x = &locals[idx];
            let mut fits = true;
            let gains: Vec<i64> = nf
                .linking
                .iter()
                .map(|row| row.iter().zip(x).map(|(a, &v)| as_i64(a) * v).sum())
                .collect();
            for ((l, g), r) in link.iter().zip(&gains).zip(link_rhs) {
                if l + g > *r {
                    fits = false;
                    break;
                }
            }
            if !fits {
                continue;
            }
            for (l, g) in link.iter_mut().zip(&gains) {
                *l += g;
            }
            let gain: i64 = nf.objective.iter().zip(x).map(|(c, &v)| as_i64(c) * v).sum();
            if go(locals, nf, link_rhs, target, left - 1, idx, link, value + gain) {
                return true;
            }
            for (l, g) in link.iter_mut().zip(&gains) {
                *l -= g;
            }
        }
        false
    }
    let mut link = vec![0i64; link_rhs.len()];
    go(&locals, nf, &link_rhs, target, as_i64(&nf.blocks) as usize, 0, &mut link, 0)
}

/// Direct search for weighted-index bin packing: pack all items under the
/// capacity, then charge each group its best possible index (heaviest
/// weight gets the cheapest index) and compare against the cap.
fn mswbp_feasible(bi: &MswbpInstance) -> bool {
    let mut items: Vec<(i64, i64)> = Vec::new();
    for ((p, n), w) in bi.p.iter().zip(&bi.n).zip(&bi.w) {
        for _ in 0..as_i64(n) {
            items.push((as_i64(p), as_i64(w)));
        }
    }
    let bins = as_i64(&bi.bins) as usize;
    let capacity = as_i64(&bi.capacity);
    let cost_cap = as_i64(&bi.cost_cap);
    fn go(
        t: usize,
        items: &[(i64, i64)],
        sizes: &mut [i64],
        weights: &mut [i64],
        capacity: i64,
        cost_cap: i64,
    ) -> bool {
        if t == items.len() {
            let mut ws = weights.to_vec();
            ws.sort_unstable_by(|a, b| b.cmp(a));
            let cost: i64 = ws.iter().enumerate().map(|(i, w)| (i as i64 + 1) * w).sum();
            return cost <= cost_cap;
        }
        let mut used_empty = false;
        for g in 0..sizes.len() {
            if sizes[g] == 0 && weights[g] == 0 {
                if used_empty {
                    continue;
                }
                used_empty = true;
            }
            if sizes[g] + items[t].0 > capacity {
                continue;
            }
            sizes[g] += items[t].0;
            weights[g] += items[t].1;
            if go(t + 1, items, sizes, weights, capacity, cost_cap) {
                return true;
            }
            sizes[g] -= items[t].0;
            weights[g] -= items[t].1;
        }
        false
    }
    let mut sizes = vec![0i64; bins];
    let mut weights = vec![0i64; bins];
    go(0, &items, &mut sizes, &mut weights, capacity, cost_cap)
}

fn sample_complex(rng: &mut ChaCha8Rng, objective: Objective) -> ComplexInstance {
    let dim = rng.gen_range(1..=2usize);
    let count = rng.gen_range(1..=3usize);
    let mut types: Vec<ComplexJobType> = (0..count)
        .map(|_| ComplexJobType {
            deadline: int(rng.gen_range(1..=6)),
            p: (0..dim).map(|_| int(rng.gen_range(1..=3))).collect(),
            class: rng.gen_range(1..=2usize),
            n: int(rng.gen_range(0..=2)),
        })
        .collect();
    types.sort_by(|a, b| a.deadline.cmp(&b.deadline));
    let (lower, upper) = sample_vector_window(rng, objective, dim);
    ComplexInstance {
        types,
        m: int(rng.gen_range(1..=2)),
        objective,
        class_cap: int(rng.gen_range(0..=2)),
        size_cap: int(rng.gen_range(0..=4)),
        lower,
        upper,
    }
}

fn sample_setup(rng: &mut ChaCha8Rng, objective: Objective) -> SetupInstance {
    let dim = rng.gen_range(1..=2usize);
    let classes = rng.gen_range(1..=2usize);
    let count = rng.gen_range(1..=3usize);
    let types: Vec<SetupJobType> = (0..count)
        .map(|_| SetupJobType {
            p: (0..dim).map(|_| int(rng.gen_range(1..=3))).collect(),
            class: rng.gen_range(1..=classes),
            n: int(rng.gen_range(0..=2)),
        })
        .collect();
    let (lower, upper) = sample_vector_window(rng, objective, dim);
    SetupInstance {
        types,
        m: int(rng.gen_range(1..=2)),
        objective,
        setups: (0..classes).map(|_| int(rng.gen_range(0..=3))).collect(),
        lower,
        upper,
    }
}

/// Per-dimension thresholds as each objective needs them.
fn sample_vector_window(
    rng: &mut ChaCha8Rng,
    objective: Objective,
    dim: usize,
) -> (Option<Vec<Int>>, Option<Vec<Int>>) {
    match objective {
        Objective::Cmax => {
            (None, Some((0..dim).map(|_| int(rng.gen_range(0..=8))).collect()))
        }
        Objective::Cmin => {
            (Some((0..dim).map(|_| int(rng.gen_range(0..=4))).collect()), None)
        }
        Objective::Cenvy => {
            let lo: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..=4)).collect();
            let hi: Vec<Int> = lo.iter().map(|&l| int(l + rng.gen_range(0..=6))).collect();
            (Some(lo.iter().map(|&l| int(l)).collect()), Some(hi))
        }
    }
}

fn sample_sumwu(rng: &mut ChaCha8Rng) -> SumWuInstance {
    let dim = rng.gen_range(1..=2usize);
    let count = rng.gen_range(1..=3usize);
    let mut types: Vec<SumWuJobType> = (0..count)
        .map(|_| SumWuJobType {
            due: int(rng.gen_range(0..=6)),
            p: (0..dim).map(|_| int(rng.gen_range(1..=3))).collect(),
            weight: int(rng.gen_range(0..=3)),
            n: int(rng.gen_range(0..=2)),
        })
        .collect();
    types.sort_by(|a, b| a.due.cmp(&b.due));
    SumWuInstance {
        types,
        m: int(rng.gen_range(1..=2)),
        late_weight_cap: int(rng.gen_range(0..=6)),
    }
}

fn sample_nfold(rng: &mut ChaCha8Rng) -> UniformNFold {
    let t = rng.gen_range(1..=2usize);
    let r = rng.gen_range(1..=2usize);
    let local_rows = rng.gen_range(0..=1usize);
    let upper: Vec<i64> = (0..t).map(|_| rng.gen_range(0..=2)).collect();
    let local: Vec<Vec<Int>> = (0..local_rows)
        .map(|_| (0..t).map(|_| int(rng.gen_range(-2..=2))).collect())
        .collect();
    let local_rhs: Vec<Int> = (0..local_rows).map(|_| int(rng.gen_range(0..=3))).collect();
    let linking: Vec<Vec<Int>> =
        (0..r).map(|_| (0..t).map(|_| int(rng.gen_range(0..=2))).collect()).collect();
    let objective: Vec<Int> = (0..t).map(|_| int(rng.gen_range(0..=2))).collect();
    let blocks = rng.gen_range(1..=3i64);
    // Half the cases aim the right-hand side at an actually reachable sum
    // so both answers appear.
    let (linking_rhs, target) = if rng.gen_bool(0.5) {
        let xs: Vec<Vec<i64>> = (0..blocks)
            .map(|_| upper.iter().map(|&u| rng.gen_range(0..=u)).collect())
            .collect();
        let rhs: Vec<Int> = (0..r)
            .map(|k| {
                int(xs
                    .iter()
                    .map(|x| {
                        linking[k].iter().zip(x).map(|(a, &v)| as_i64(a) * v).sum::<i64>()
                    })
                    .sum::<i64>())
            })
            .collect();
        let value: i64 = xs
            .iter()
            .map(|x| objective.iter().zip(x).map(|(c, &v)| as_i64(c) * v).sum::<i64>())
            .sum();
        (rhs, int(rng.gen_range(0..=value.max(0))))
    } else {
        ((0..r).map(|_| int(rng.gen_range(0..=4))).collect(), int(rng.gen_range(0..=6)))
    };
    UniformNFold {
        linking,
        local,
        linking_rhs,
        local_rhs,
        objective,
        upper: upper.iter().map(|&u| int(u)).collect(),
        blocks: int(blocks),
        target,
    }
}

fn sample_mswbp(rng: &mut ChaCha8Rng) -> MswbpInstance {
    let d = rng.gen_range(1..=2usize);
    let p = pick_distinct_sizes(rng, d, 4);
    let n: Vec<i64> = p.iter().map(|_| rng.gen_range(1..=2)).collect();
    let items: i64 = n.iter().sum();
    MswbpInstance {
        p: p.iter().map(|&v| int(v)).collect(),
        n: n.iter().map(|&v| int(v)).collect(),
        w: p.iter().map(|_| int(rng.gen_range(0..=2))).collect(),
        capacity: int(rng.gen_range(1..=5)),
        bins: int(rng.gen_range(1..=items.min(3))),
        cost_cap: int(rng.gen_range(0..=12)),
    }
}

/// Scalar thresholds for the identical-machine builder, plus the window the
/// built model actually encodes (`cmin` widens its ceiling by `2*pmax`).
fn sample_identical(
    rng: &mut ChaCha8Rng,
    objective: Objective,
) -> (Instance, Int, Int) {
    let base = sample_instance(rng, objective, 2, 4, 3, 6);
    let pmax = base.pmax();
    match objective {
        Objective::Cmax => {
            let u = int(rng.gen_range(0..=8));
            let inst = base.with_bounds(None, Some(u.clone()));
            (inst, Int::zero(), u)
        }
        Objective::Cmin => {
            let l = int(rng.gen_range(0..=6));
            let hi = &l + int(2) * &pmax;
            let inst = base.with_bounds(Some(l.clone()), None);
            (inst, l, hi)
        }
        Objective::Cenvy => {
            let l: i64 = rng.gen_range(0..=5);
            let u = l + rng.gen_range(0..=5);
            let inst = base.with_bounds(Some(int(l)), Some(int(u)));
            (inst, int(l), int(u))
        }
    }
}

fn run_builders(cfg: &SuiteConfig, cases: u32) -> Result<SectionReport> {
    let mut rng = section_rng(cfg.seed, SectionKind::Builders);
    let mut rec = Recorder::new(SectionKind::Builders);
    for case in 0..cases {
        let objective = OBJECTIVES[((case / 6) % 3) as usize];
        let (label, built, want, input) = match case % 6 {
            0 => {
                let (inst, lo, hi) = sample_identical(&mut rng, objective);
                let want = model::brute_force_window(&inst, &lo, &hi, &cfg.guards)?;
                ("identical", build_identical(&inst), want, json(&inst))
            }
            1 => {
                let ci = sample_complex(&mut rng, objective);
                ("complex", build_complex(&ci), complex_feasible(&ci), json(&ci))
            }
            2 => {
                let si = sample_setup(&mut rng, objective);
                ("setup", build_setup(&si), setup_feasible(&si), json(&si))
            }
            3 => {
                let si = sample_sumwu(&mut rng);
                ("late-weight", build_sumwu(&si), sumwu_feasible(&si), json(&si))
            }
            4 => {
                let nf = sample_nfold(&mut rng);
                ("block-ilp", build_nfold(&nf), nfold_feasible(&nf), json(&nf))
            }
            _ => {
                let bi = sample_mswbp(&mut rng);
                ("bin-cost", build_mswbp(&bi), mswbp_feasible(&bi), json(&bi))
            }
        };
        rec.observe(&input);
        let pq = match under_test(built)? {
            Ok(pq) => pq,
            Err(msg) => {
                rec.fail(format!("case {case}: {label} build failed ({msg}) on {input}"));
                continue;
            }
        };
        let sol = match under_test(solve_pqr(&pq, &cfg.guards))? {
            Ok(sol) => sol,
            Err(msg) => {
                rec.fail(format!("case {case}: {label} solve failed ({msg}) on {input}"));
                continue;
            }
        };
        if !rec.check(sol.is_some() == want, || {
            format!(
                "case {case}: {label} model says {}, direct search says {} on {input}",
                if sol.is_some() { "feasible" } else { "infeasible" },
                if want { "feasible" } else { "infeasible" },
            )
        }) {
            continue;
        }
        if let Some(sol) = sol {
            if let Err(e) = sol.verify(&pq) {
                rec.fail(format!("case {case}: {label} witness rejected ({e}) on {input}"));
            }
        }
    }
    Ok(rec.finish())
}

/// Feasible-by-construction polytope pair: sample a schedule, read off its
/// loads, and pose the matching window question.
fn sample_feasible_pq(rng: &mut ChaCha8Rng, objective: Objective) -> Result<PQRep> {
    let machines = rng.gen_range(1..=3usize);
    let (inst, sched) = sample_schedule(rng, 2, 4, machines, 2);
    let loads: Vec<Int> = sched
        .machines
        .iter()
        .map(|g| dot(&inst.p, &g.config))
        .collect();
    let hi = loads.iter().max().expect("machines present").clone();
    let lo = loads.iter().min().expect("machines present").clone();
    let inst = Instance::raw(inst.p, inst.n, inst.m, objective);
    let inst = match objective {
        Objective::Cmax => inst.with_bounds(None, Some(hi)),
        Objective::Cmin => inst.with_bounds(Some(lo), None),
        Objective::Cenvy => inst.with_bounds(Some(lo), Some(hi)),
    };
    build_identical(&inst)
}

/// Smallest stacked distance between the fractional point and any exact
/// decomposition: the sum over the `m` parts of their distance to the
/// point, plus the aggregate's distance to `m` times the point.
fn nearest_total(pq: &PQRep, sol: &ConvexRelaxSolution, guards: &Guards) -> Result<Option<Rat>> {
    let gens = enumerate_lattice(pq, guards)?;
    let m = as_i64(&pq.m) as usize;
    let x = &sol.blocks[0].x;
    let mx: Vec<Rat> = x.iter().map(|v| v * to_rat(&pq.m)).collect();
    fn l1(a: &[Rat], b: &[Int]) -> Rat {
        a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + (x - to_rat(y)).abs())
    }
    fn go(
        gens: &[Vec<Int>],
        pq: &PQRep,
        x: &[Rat],
        mx: &[Rat],
        left: usize,
        start: usize,
        sum: &mut Vec<Int>,
        parts: &Rat,
        best: &mut Option<Rat>,
    ) {
        if left == 0 {
            if !pq.aggregate_matches(sum) {
                return;
            }
            let total = parts + l1(mx, sum);
            if best.as_ref().map_or(true, |b| total < *b) {
                *best = Some(total);
            }
            return;
        }
        for idx in start..gens.len() {
            for (acc, v) in sum.iter_mut().zip(&gens[idx]) {
                *acc += v;
            }
            let parts = parts + l1(x, &gens[idx]);
            go(gens, pq, x, mx, left - 1, idx, sum, &parts, best);
            for (acc, v) in sum.iter_mut().zip(&gens[idx]) {
                *acc -= v;
            }
        }
    }
    let mut best = None;
    let mut sum = vec![Int::zero(); pq.num_vars()];
    go(&gens, pq, x, &mx, m, 0, &mut sum, &Rat::zero(), &mut best);
    Ok(best)
}

fn run_proximity(cfg: &SuiteConfig, cases: u32) -> Result<SectionReport> {
    let mut rng = section_rng(cfg.seed, SectionKind::Proximity);
    let mut rec = Recorder::new(SectionKind::Proximity);
    for case in 0..cases {
        let objective = OBJECTIVES[(case % 3) as usize];
        let pq = sample_feasible_pq(&mut rng, objective)?;
        rec.observe(&pq);
        let sol = match under_test(relax::solve_convexified(&pq, &cfg.guards))? {
            Ok(Some(sol)) => sol,
            Ok(None) => {
                rec.fail(format!(
                    "case {case}: relaxation infeasible on an integrally feasible model {}",
                    json(&pq)
                ));
                continue;
            }
            Err(msg) => {
                rec.fail(format!("case {case}: relaxation failed ({msg}) on {}", json(&pq)));
                continue;
            }
        };
        let uni = relax::uniformize(&sol);
        if let Err(e) = uni.verify(&pq) {
            rec.fail(format!("case {case}: uniformized certificate rejected ({e}) on {}", json(&pq)));
            continue;
        }
        let budget = relax::proximity_bound(&pq, &cfg.distance_profile)?;
        let total = match nearest_total(&pq, &uni, &cfg.guards)? {
            Some(total) => total,
            None => {
                rec.fail(format!(
                    "case {case}: no integer decomposition on a feasible model {}",
                    json(&pq)
                ));
                continue;
            }
        };
        rec.check(total <= to_rat(&budget.d), || {
            format!(
                "case {case}: nearest decomposition at distance {total} exceeds budget {} on {}",
                budget.d,
                json(&pq)
            )
        });
    }
    Ok(rec.finish())
}

fn run_preprocess(cfg: &SuiteConfig, cases: u32) -> Result<SectionReport> {
    let mut rng = section_rng(cfg.seed, SectionKind::Preprocess);
    let mut rec = Recorder::new(SectionKind::Preprocess);
    for case in 0..cases {
        let objective = OBJECTIVES[(case % 3) as usize];
        let (inst, _, _) = sample_identical(&mut rng, objective);
        rec.observe(&inst);
        let pq = build_identical(&inst)?;
        let direct = solve_pqr(&pq, &cfg.guards)?;
        let pre = match under_test(relax::preprocess_pqr(&pq, &cfg.guards))? {
            Ok(pre) => pre,
            Err(msg) => {
                rec.fail(format!("case {case}: preprocessing failed ({msg}) on {}", json(&inst)));
                continue;
            }
        };
        match pre {
            None => {
                rec.check(direct.is_none(), || {
                    format!(
                        "case {case}: preprocessing dropped a feasible model on {}",
                        json(&inst)
                    )
                });
            }
            Some(pre) => {
                let reduced = solve_pqr(&pre.pq, &cfg.guards)?;
                if !rec.check(reduced.is_some() == direct.is_some(), || {
                    format!(
                        "case {case}: reduced model says {}, direct says {} on {}",
                        if reduced.is_some() { "feasible" } else { "infeasible" },
                        if direct.is_some() { "feasible" } else { "infeasible" },
                        json(&inst)
                    )
                }) {
                    continue;
                }
                if let Some(sol) = reduced {
                    if let Err(e) = pre.lift_solution(&sol).verify(&pq) {
                        rec.fail(format!(
                            "case {case}: lifted witness rejected ({e}) on {}",
                            json(&inst)
                        ));
                    }
                }
            }
        }
    }
    Ok(rec.finish())
}

/// A row entry from one of three magnitude bands, so reductions see both
/// already-small rows and rows that genuinely need shrinking.
fn sample_row_entry(rng: &mut ChaCha8Rng) -> Int {
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let magnitude: i64 = match rng.gen_range(0..3) {
        0 => rng.gen_range(0..=9),
        1 => rng.gen_range(10..=999),
        _ => rng.gen_range(1_000_000..=1_000_000_000_000),
    };
    int(sign * magnitude)
}

fn run_row_reduction(cfg: &SuiteConfig, cases: u32) -> Result<SectionReport> {
    let mut rng = section_rng(cfg.seed, SectionKind::RowReduction);
    let mut rec = Recorder::new(SectionKind::RowReduction);
    for case in 0..cases {
        let n = rng.gen_range(1..=3usize);
        let delta = int(rng.gen_range(1..=3));
        let w: Vec<Int> = (0..n).map(|_| sample_row_entry(&mut rng)).collect();
        let b = sample_row_entry(&mut rng);
        let input = format!("w {w:?} b {b} delta {delta}");
        rec.observe_raw(&input);
        let red = match under_test(ftreduce::reduce_row(&w, &b, &delta))? {
            Ok(red) => red,
            Err(msg) => {
                rec.fail(format!("case {case}: reduction failed ({msg}) on {input}"));
                continue;
            }
        };
        let check = ftreduce::verify_row_equivalence(
            &w,
            &b,
            &red.w_bar,
            &red.b_bar,
            &delta,
            &cfg.guards,
        )?;
        if !rec.check(check.holds, || {
            format!(
                "case {case}: reduced row {:?} <= {} disagrees at {:?} on {input}",
                red.w_bar, red.b_bar, check.counterexample
            )
        }) {
            continue;
        }
        let box_delta = int(n as i64) * &delta + 2;
        let budget = ftreduce::declared_budget(n + 1, &box_delta);
        if !rec.check(red.magnitude_bound <= budget, || {
            format!(
                "case {case}: magnitude {} exceeds the declared budget {budget} on {input}",
                red.magnitude_bound
            )
        }) {
            continue;
        }
        if case % 2 == 0 {
            let ball = int(rng.gen_range(2..=4));
            let bar = match under_test(ftreduce::reduce_vector(&w, &ball))? {
                Ok(bar) => bar,
                Err(msg) => {
                    rec.fail(format!("case {case}: vector reduction failed ({msg}) on {input}"));
                    continue;
                }
            };
            let signs = ftreduce::verify_sign_preservation(&w, &bar, &ball, &cfg.guards)?;
            rec.check(signs.holds, || {
                format!(
                    "case {case}: sign flip at {:?} after vector reduction on {input}",
                    signs.counterexample
                )
            });
        }
    }
    Ok(rec.finish())
}

/// Assignment search over explicit jobs and speed-tagged machines. Machines
/// of equal speed and equal current load are interchangeable, so only one
/// of each kind is tried per job.
fn uniform_feasible(qi: &UniformInstance) -> bool {
    let mut jobs: Vec<i64> = Vec::new();
    for (p, n) in qi.p.iter().zip(&qi.n) {
        for _ in 0..as_i64(n) {
            jobs.push(as_i64(p));
        }
    }
    jobs.sort_unstable_by(|a, b| b.cmp(a));
    let mut speeds: Vec<i64> = Vec::new();
    for (s, m) in qi.s.iter().zip(&qi.m) {
        for _ in 0..as_i64(m) {
            speeds.push(as_i64(s));
        }
    }
    let (caps, floors): (Vec<i64>, Vec<i64>) = match qi.objective {
        Objective::Cmax => {
            let u = as_i64(qi.upper.as_ref().expect("cmax threshold"));
            (speeds.iter().map(|s| s * u).collect(), vec![0; speeds.len()])
        }
        Objective::Cmin => {
            let l = as_i64(qi.lower.as_ref().expect("cmin threshold"));
            (vec![i64::MAX; speeds.len()], speeds.iter().map(|s| s * l).collect())
        }
        Objective::Cenvy => unreachable!("the bridge covers the two threshold objectives"),
    };
    fn go(
        t: usize,
        jobs: &[i64],
        remaining: i64,
        loads: &mut [i64],
        speeds: &[i64],
        caps: &[i64],
        floors: &[i64],
    ) -> bool {
        let deficit: i64 = loads.iter().zip(floors).map(|(l, f)| (f - l).max(0)).sum();
        if deficit > remaining {
            return false;
        }
        if t == jobs.len() {
            return true;
        }
        let mut tried: Vec<(i64, i64)> = Vec::new();
        for i in 0..loads.len() {
            let key = (speeds[i], loads[i]);
            if tried.contains(&key) {
                continue;
            }
            tried.push(key);
            if loads[i] + jobs[t] > caps[i] {
                continue;
            }
            loads[i] += jobs[t];
            if go(t + 1, jobs, remaining - jobs[t], loads, speeds, caps, floors) {
                return true;
            }
            loads[i] -= jobs[t];
        }
        false
    }
    let total: i64 = jobs.iter().sum();
    let mut loads = vec![0i64; speeds.len()];
    go(0, &jobs, total, &mut loads, &speeds, &caps, &floors)
}

fn sample_uniform(rng: &mut ChaCha8Rng, objective: Objective) -> UniformInstance {
    let p = pick_distinct_sizes(rng, 2, 4);
    let mut n: Vec<i64> = p.iter().map(|_| rng.gen_range(0..=2)).collect();
    while n.iter().sum::<i64>() > 5 {
        let j = rng.gen_range(0..n.len());
        if n[j] > 0 {
            n[j] -= 1;
        }
    }
    let tau = rng.gen_range(1..=2usize);
    let s: Vec<i64> = (0..tau).map(|_| rng.gen_range(1..=3)).collect();
    let mut m: Vec<i64> = (0..tau).map(|_| rng.gen_range(1..=2)).collect();
    while m.iter().sum::<i64>() > 4 {
        let j = rng.gen_range(0..m.len());
        if m[j] > 1 {
            m[j] -= 1;
        }
    }
    let qi = UniformInstance::new(
        p.iter().map(|&v| int(v)).collect(),
        n.iter().map(|&v| int(v)).collect(),
        s.iter().map(|&v| int(v)).collect(),
        m.iter().map(|&v| int(v)).collect(),
        objective,
    )
    .expect("sampled speed-type instance is valid");
    match objective {
        Objective::Cmax => qi.with_bounds(None, Some(int(rng.gen_range(0..=6)))),
        Objective::Cmin => qi.with_bounds(Some(int(rng.gen_range(0..=4))), None),
        Objective::Cenvy => unreachable!("the bridge covers the two threshold objectives"),
    }
}

fn run_speed_bridge(cfg: &SuiteConfig, cases: u32) -> Result<SectionReport> {
    let mut rng = section_rng(cfg.seed, SectionKind::SpeedBridge);
    let mut rec = Recorder::new(SectionKind::SpeedBridge);
    for case in 0..cases {
        let objective = if case % 2 == 0 { Objective::Cmax } else { Objective::Cmin };
        let qi = sample_uniform(&mut rng, objective);
        rec.observe(&qi);
        let reduction = match objective {
            Objective::Cmax => uniform::reduce_cmax(&qi),
            Objective::Cmin => uniform::reduce_cmin(&qi),
            Objective::Cenvy => unreachable!("generator never emits cenvy"),
        };
        let (reduced, map) = match under_test(reduction)? {
            Ok(pair) => pair,
            Err(msg) => {
                rec.fail(format!("case {case}: reduction failed ({msg}) on {}", json(&qi)));
                continue;
            }
        };
        if !rec.check(reduced.p.len() == qi.p.len() + qi.s.len(), || {
            format!(
                "case {case}: reduced instance has {} types for {} job and {} machine types on {}",
                reduced.p.len(),
                qi.p.len(),
                qi.s.len(),
                json(&qi)
            )
        }) {
            continue;
        }
        let decision = match under_test(exact::decide(&reduced, &cfg.guards))? {
            Ok(decision) => decision,
            Err(msg) => {
                rec.fail(format!(
                    "case {case}: reduced decision failed ({msg}) on {}",
                    json(&qi)
                ));
                continue;
            }
        };
        let want = uniform_feasible(&qi);
        if !rec.check(decision.feasible == want, || {
            format!(
                "case {case}: reduction says {}, assignment search says {} on {}",
                if decision.feasible { "feasible" } else { "infeasible" },
                if want { "feasible" } else { "infeasible" },
                json(&qi)
            )
        }) {
            continue;
        }
        if let Some(witness) = decision.witness {
            let lifted = match under_test(uniform::lift_schedule(&witness, &map))? {
                Ok(lifted) => lifted,
                Err(msg) => {
                    rec.fail(format!("case {case}: lift failed ({msg}) on {}", json(&qi)));
                    continue;
                }
            };
            let verify = uniform::verify_uniform_schedule(&qi, &lifted);
            rec.check(verify.ok(), || {
                format!(
                    "case {case}: lifted witness rejected ({:?}) on {}",
                    verify.violations,
                    json(&qi)
                )
            });
        }
    }
    Ok(rec.finish())
}

fn run_approx(cfg: &SuiteConfig, cases: u32) -> Result<SectionReport> {
    let mut rng = section_rng(cfg.seed, SectionKind::Approx);
    let mut rec = Recorder::new(SectionKind::Approx);
    for case in 0..cases {
        let objective = OBJECTIVES[(case % 3) as usize];
        let q = ((case / 3) % 3) as i64 + 1;
        let eps = Rat::new(Int::from(1), int(q));
        let inst = sample_instance(&mut rng, objective, 3, 6, 3, 9);
        rec.observe(&inst);
        let res = match under_test(approx::approx_objective(&inst, &eps, &cfg.guards))? {
            Ok(res) => res,
            Err(msg) => {
                rec.fail(format!(
                    "case {case}: band solver failed ({msg}) at tolerance 1/{q} on {}",
                    json(&inst)
                ));
                continue;
            }
        };
        let brute = model::brute_force_optimum(&inst, &cfg.guards)?;
        let pmax = inst.pmax();
        let band = &eps * to_rat(&pmax);
        let off = to_rat(&(&res.value - &brute.value)).abs();
        if !rec.check(off <= band, || {
            format!(
                "case {case}: value {} is {off} from optimum {} (band {band}) on {}",
                res.value,
                brute.value,
                json(&inst)
            )
        }) {
            continue;
        }
        let verify = model::verify_schedule(&inst, &res.schedule);
        if !rec.check(verify.ok(), || {
            format!("case {case}: witness rejected ({:?}) on {}", verify.violations, json(&inst))
        }) {
            continue;
        }
        let d = inst.d() as u64;
        let swap_cap = int(2) * int((d * d * d) as i64) * &inst.m * &pmax;
        rec.check(Int::from(res.swaps) <= swap_cap, || {
            format!(
                "case {case}: {} swaps exceed the budget {swap_cap} on {}",
                res.swaps,
                json(&inst)
            )
        });
    }
    Ok(rec.finish())
}

/// Equality system with a positive first row, so the solution set is
/// finite. Wider systems use larger coefficients to keep the vertex
/// certification work modest.
fn sample_hull_system(rng: &mut ChaCha8Rng, max_vars: usize) -> (Vec<Vec<Int>>, Vec<Int>) {
    let nvars = rng.gen_range(1..=max_vars);
    let rows = rng.gen_range(1..=2usize);
    let low = if nvars >= 3 { 2 } else { 1 };
    let mut a: Vec<Vec<Int>> = Vec::with_capacity(rows);
    a.push((0..nvars).map(|_| int(rng.gen_range(low..=5))).collect());
    for _ in 1..rows {
        a.push((0..nvars).map(|_| int(rng.gen_range(0..=5))).collect());
    }
    let b: Vec<Int> = (0..rows).map(|_| int(rng.gen_range(0..=6))).collect();
    (a, b)
}

fn run_hull(cfg: &SuiteConfig, cases: u32) -> Result<SectionReport> {
    let mut rng = section_rng(cfg.seed, SectionKind::Hull);
    let mut rec = Recorder::new(SectionKind::Hull);
    for case in 0..cases {
        let sweep = case % 20 == 0;
        let (a, b) = sample_hull_system(&mut rng, if sweep { 3 } else { 4 });
        let input = format!("a {a:?} b {b:?}");
        rec.observe_raw(&input);
        let sys = EqSystem::new(a.clone(), b.clone())?;
        let report = match under_test(hull::hull_report(&sys, &cfg.hull_profile, &cfg.guards))? {
            Ok(report) => report,
            Err(msg) => {
                rec.fail(format!("case {case}: report failed ({msg}) on {input}"));
                continue;
            }
        };
        if !rec.check(Int::from(report.vertex_count) <= report.bound_new, || {
            format!(
                "case {case}: {} vertices exceed the bound {} on {input}",
                report.vertex_count, report.bound_new
            )
        }) {
            continue;
        }
        if !sweep {
            continue;
        }
        // The bound depends on the matrix alone: recompute the report over
        // a ladder of right-hand sides and demand a constant bound that
        // still dominates every enumeration.
        for rhs in 4i64..=12 {
            let swept = EqSystem::new(a.clone(), vec![int(rhs); b.len()])?;
            let swept_report =
                match under_test(hull::hull_report(&swept, &cfg.hull_profile, &cfg.guards))? {
                    Ok(report) => report,
                    Err(msg) => {
                        rec.fail(format!(
                            "case {case}: sweep report failed ({msg}) at rhs {rhs} on {input}"
                        ));
                        break;
                    }
                };
            if !rec.check(swept_report.bound_new == report.bound_new, || {
                format!(
                    "case {case}: bound moved from {} to {} when the right-hand side became \
                     {rhs} on {input}",
                    report.bound_new, swept_report.bound_new
                )
            }) {
                break;
            }
            if !rec.check(Int::from(swept_report.vertex_count) <= swept_report.bound_new, || {
                format!(
                    "case {case}: {} vertices exceed the bound {} at rhs {rhs} on {input}",
                    swept_report.vertex_count, swept_report.bound_new
                )
            }) {
                break;
            }
        }
    }
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int_vec;

    fn quick(sections: Vec<SectionKind>, seed: u64, cap: u32) -> SuiteConfig {
        SuiteConfig { seed, sections, max_cases: Some(cap), ..SuiteConfig::default() }
    }

    #[test]
    fn the_default_configuration_runs_every_section() {
        let config = SuiteConfig::default();
        assert_eq!(config.sections.len(), 11);
        assert_eq!(config.sections, SectionKind::all());
        assert!(config.mutant.is_none());
        let names: Vec<&str> = SectionKind::all().into_iter().map(SectionKind::name).collect();
        let mut deduped = names.clone();
        deduped.dedup();
        assert_eq!(names, deduped);
    }

    #[test]
    fn a_small_seeded_run_passes_every_section() {
        let report = run_suite(&quick(SectionKind::all(), 11, 6)).unwrap();
        assert!(report.passed, "failures: {:#?}", report.sections);
        assert_eq!(report.sections.len(), 11);
        for section in &report.sections {
            assert!(section.passed, "{}: {:?}", section.name, section.failures);
            assert_eq!(section.cases, 6);
            assert_eq!(section.failed_cases, 0);
        }
    }

    #[test]
    fn an_empty_section_list_passes_trivially() {
        let report = run_suite(&quick(Vec::new(), 3, 10)).unwrap();
        assert!(report.passed);
        assert!(report.sections.is_empty());
    }

    #[test]
    fn the_inverted_gap_trigger_mutant_is_caught() {
        let mut config = quick(vec![SectionKind::Rebalance], 5, 8);
        config.mutant = Some(Mutant::FlippedGapTrigger);
        let report = run_suite(&config).unwrap();
        assert!(!report.passed);
        let section = &report.sections[0];
        assert!(section.failed_cases > 0);
        assert!(section.failures.iter().any(|f| f.contains("gap")), "{:?}", section.failures);
        // The genuine routine passes the identical case stream.
        config.mutant = None;
        assert!(run_suite(&config).unwrap().passed);
    }

    #[test]
    fn equal_seeds_reproduce_byte_identical_reports() {
        let config = quick(
            vec![SectionKind::ExactOracle, SectionKind::Subset, SectionKind::Builders],
            42,
            5,
        );
        let first = serde_json::to_string(&run_suite(&config).unwrap()).unwrap();
        let second = serde_json::to_string(&run_suite(&config).unwrap()).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn different_seeds_sample_different_cases() {
        let a = run_suite(&quick(vec![SectionKind::ExactOracle], 1, 5)).unwrap();
        let b = run_suite(&quick(vec![SectionKind::ExactOracle], 2, 5)).unwrap();
        assert_ne!(a.sections[0].digest, b.sections[0].digest);
    }

    #[test]
    fn section_streams_do_not_depend_on_the_section_list() {
        let alone = run_suite(&quick(vec![SectionKind::Kernel], 9, 4)).unwrap();
        let all = run_suite(&quick(SectionKind::all(), 9, 4)).unwrap();
        let kernel = all.sections.iter().find(|s| s.name == "kernel").unwrap();
        assert_eq!(alone.sections[0], *kernel);
    }

    #[test]
    fn reports_round_trip_as_json() {
        let report = run_suite(&quick(vec![SectionKind::Subset], 7, 4)).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: SuiteReport = serde_json::from_str(&text).unwrap();
        assert_eq!(report, back);
        let config = quick(vec![SectionKind::Hull], 7, 4);
        let config_text = serde_json::to_string(&config).unwrap();
        let config_back: SuiteConfig = serde_json::from_str(&config_text).unwrap();
        assert_eq!(config, config_back);
    }

    #[test]
    fn the_bin_cost_search_matches_hand_arithmetic() {
        // Two unit items of weight 2 into two bins: separate bins cost
        // 1*2 + 2*2 = 6, sharing the cheap bin costs 1*(2+2) = 4.
        let base = MswbpInstance {
            p: int_vec(&[1]),
            n: int_vec(&[2]),
            w: int_vec(&[2]),
            capacity: int(5),
            bins: int(2),
            cost_cap: int(4),
        };
        assert!(mswbp_feasible(&base));
        assert!(!mswbp_feasible(&MswbpInstance { cost_cap: int(3), ..base.clone() }));
        let split = MswbpInstance { capacity: int(1), cost_cap: int(6), ..base.clone() };
        assert!(mswbp_feasible(&split));
        assert!(!mswbp_feasible(&MswbpInstance { cost_cap: int(5), ..split }));
    }

    #[test]
    fn the_class_cap_search_matches_hand_analysis() {
        // Two classes, one job each, one machine holding at most one class:
        // no single machine may run both jobs.
        let ci = ComplexInstance {
            types: vec![
                ComplexJobType { deadline: int(4), p: int_vec(&[2]), class: 1, n: int(1) },
                ComplexJobType { deadline: int(4), p: int_vec(&[2]), class: 2, n: int(1) },
            ],
            m: int(1),
            objective: Objective::Cmax,
            class_cap: int(1),
            size_cap: int(4),
            lower: None,
            upper: Some(int_vec(&[4])),
        };
        assert!(!complex_feasible(&ci));
        let relaxed = ComplexInstance { class_cap: int(2), ..ci.clone() };
        assert!(complex_feasible(&relaxed));
        let two_machines = ComplexInstance { m: int(2), ..ci };
        assert!(complex_feasible(&two_machines));
    }

    #[test]
    fn the_setup_search_charges_setups_into_the_window() {
        // One job of length 2 in a class with setup 3: the machine needs
        // room for 5, not 2.
        let si = SetupInstance {
            types: vec![SetupJobType { p: int_vec(&[2]), class: 1, n: int(1) }],
            m: int(1),
            objective: Objective::Cmax,
            setups: int_vec(&[3]),
            lower: None,
            upper: Some(int_vec(&[4])),
        };
        assert!(!setup_feasible(&si));
        let wider = SetupInstance { upper: Some(int_vec(&[5])), ..si };
        assert!(setup_feasible(&wider));
    }

    #[test]
    fn the_assignment_search_understands_speeds() {
        // Three unit jobs, threshold 1: a speed-2 machine and a speed-1
        // machine fit them, two speed-1 machines do not.
        let fast = UniformInstance::small(&[1], &[3], &[1, 2], &[1, 1], Objective::Cmax)
            .unwrap()
            .with_bounds(None, Some(int(1)));
        assert!(uniform_feasible(&fast));
        let slow = UniformInstance::small(&[1], &[3], &[1], &[2], Objective::Cmax)
            .unwrap()
            .with_bounds(None, Some(int(1)));
        assert!(!uniform_feasible(&slow));
        // Covering floor 2 on both machines needs all four units split.
        let cover = UniformInstance::small(&[1], &[4], &[1, 2], &[1, 1], Objective::Cmin)
            .unwrap()
            .with_bounds(Some(int(1)), None);
        assert!(uniform_feasible(&cover));
        let starved = UniformInstance::small(&[1], &[2], &[1, 2], &[1, 1], Objective::Cmin)
            .unwrap()
            .with_bounds(Some(int(1)), None);
        assert!(!uniform_feasible(&starved));
    }

    #[test]
    fn the_block_search_tracks_linked_sums_and_the_target() {
        let nf = UniformNFold {
            linking: vec![int_vec(&[1])],
            local: vec![int_vec(&[1])],
            linking_rhs: int_vec(&[4]),
            local_rhs: int_vec(&[2]),
            objective: int_vec(&[1]),
            upper: int_vec(&[3]),
            blocks: int(2),
            target: int(4),
        };
        assert!(nfold_feasible(&nf));
        assert!(!nfold_feasible(&UniformNFold { target: int(5), ..nf }));
    }

    #[test]
    fn the_late_weight_search_respects_due_prefixes() {
        // A length-2 job due at 1 is always late; its weight 5 exceeds cap 4.
        let si = SumWuInstance {
            types: vec![SumWuJobType {
                due: int(1),
                p: int_vec(&[2]),
                weight: int(5),
                n: int(1),
            }],
            m: int(1),
            late_weight_cap: int(4),
        };
        assert!(!sumwu_feasible(&si));
        assert!(sumwu_feasible(&SumWuInstance { late_weight_cap: int(5), ..si }));
    }
}
