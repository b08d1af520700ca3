//! Single-binary command-line surface over the scheduling toolkit.
//!
//! Subcommands map one-to-one onto the library: `solve` decides or
//! optimizes a threshold objective exactly, `approx` answers within an
//! additive tolerance band, `kernelize` splits off the preassigned load,
//! `pq build`/`pq solve`/`pq preprocess` handle two-block counting models,
//! `ftreduce` shrinks row coefficients, `reduce-q` turns a speed-typed
//! instance into an identical-machine one, `hull report` compares
//! enumerated vertices against profile bounds, and `suite` runs the seeded
//! property suites.
//!
//! Inputs are JSON documents from `--input` (stdin when omitted); results
//! are JSON on stdout (or `--output`); diagnostics go to stderr. Exit
//! codes: 0 success, 1 failed suite or broken internal contract, 2 guard
//! breach, 3 malformed input, covering bad flags, unparseable JSON, and
//! documents that fail validation.
//!
//! All randomness flows from `--seed` through one generator family, so a
//! fixed command line on fixed inputs produces byte-identical output. The
//! `HMS_GUARD_OVERRIDE` environment variable rewrites guard caps last,
//! after flags, so CI can clamp any invocation without editing commands.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use hms_core::arith::{int, Int, Rat};
use hms_core::guard::{Guards, GUARD_ENV_VAR};
use hms_core::lattice::EqSystem;
use hms_core::model::Instance;
use hms_core::pqrep::{
    build_complex, build_identical, build_mswbp, build_nfold, build_setup, build_sumwu,
    ComplexInstance, MswbpInstance, PQRep, SetupInstance, SumWuInstance, UniformNFold,
};
use hms_core::pqsolve::{solve_pqr, PQSolution};
use hms_core::relax::PreprocessedPQRep;
use hms_core::suite::{self, Mutant, SectionKind, SuiteConfig};
use hms_core::uniform::{self, ReductionMap, UniformInstance};
use hms_core::{approx, exact, ftreduce, hull, kernel, model, relax};
use hms_core::{Error, Result};

pub const EXIT_OK: i32 = 0;
/// A computed negative outcome: failing suite or broken internal contract.
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_GUARD_BREACH: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;

/// Everything one invocation depends on. Fixed configuration plus fixed
/// input documents means bit-identical output.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub guards: Guards,
    pub distance_profile: relax::ConstantsProfile,
    pub hull_profile: hull::ConstantsProfile,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Flags first, then the environment override, so CI wins.
    fn from_flags(flags: &RunFlags) -> Self {
        let mut guards = suite::recommended_guards();
        if let Some(v) = flags.guard_jobs {
            guards.brute_force_jobs = v;
        }
        if let Some(v) = flags.guard_points {
            guards.lattice_points = v;
        }
        if let Ok(spec) = std::env::var(GUARD_ENV_VAR) {
            guards.apply_overrides(&spec);
        }
        let c = flags.profile_c.unwrap_or(1);
        RunConfig {
            seed: flags.seed,
            guards,
            distance_profile: relax::ConstantsProfile { c },
            hull_profile: hull::ConstantsProfile { c },
            input: flags.input.clone(),
            output: flags.output.clone(),
        }
    }
}

#[derive(Parser)]
#[command(name = "hms", version, about = "High-multiplicity scheduling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: RunFlags,
}

#[derive(Args)]
struct RunFlags {
    /// Seed for every randomized component.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on expanded job counts in reference searches.
    #[arg(long, global = true)]
    guard_jobs: Option<u64>,
    /// Cap on enumerated lattice points.
    #[arg(long, global = true)]
    guard_points: Option<u64>,
    /// Constants-profile scale for distance budgets and hull bounds.
    #[arg(long, global = true)]
    profile_c: Option<u64>,
    /// Input document; stdin when omitted.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a load window or optimize an objective exactly.
    Solve(SolveArgs),
    /// Optimize within an additive tolerance band.
    Approx(ApproxArgs),
    /// Split an instance into preassigned load plus a bounded kernel.
    Kernelize,
    /// Build, solve, or preprocess two-block counting models.
    #[command(subcommand)]
    Pq(PqCommand),
    /// Reduce row coefficients while preserving box semantics.
    Ftreduce(FtreduceArgs),
    /// Reduce a speed-typed instance to an identical-machine one.
    ReduceQ,
    /// Polytope vertex reports.
    #[command(subcommand)]
    Hull(HullCommand),
    /// Run the seeded randomized property suites.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Objective override: cmax, cmin, or cenvy.
    #[arg(long)]
    objective: Option<String>,
    /// optimize (default) or decide.
    #[arg(long, default_value = "optimize")]
    mode: String,
    /// Load floor override for decide mode.
    #[arg(long)]
    lower: Option<i64>,
    /// Load ceiling override for decide mode.
    #[arg(long)]
    upper: Option<i64>,
}

#[derive(Args)]
struct ApproxArgs {
    /// Objective override: cmax, cmin, or cenvy.
    #[arg(long)]
    objective: Option<String>,
    /// Tolerance as a unit fraction, e.g. 1, 1/2, 1/3.
    #[arg(long, default_value = "1/2")]
    eps: String,
}

#[derive(Subcommand)]
enum PqCommand {
    /// Build a counting model from a problem description.
    Build(PqBuildArgs),
    /// Decide feasibility and emit a witness.
    Solve,
    /// Shrink model coefficients around a relaxation anchor.
    Preprocess,
}

#[derive(Args)]
struct PqBuildArgs {
    /// Source problem: identical, complex, setup, late-weight, nfold, mswbp.
    #[arg(long)]
    problem: String,
}

#[derive(Args)]
struct FtreduceArgs {
    /// row (inequality over the box, default) or vector (signs over the
    /// 1-norm ball).
    #[arg(long, default_value = "row")]
    mode: String,
    /// Box radius the reduction must stay faithful on.
    #[arg(long, default_value_t = 2)]
    delta: i64,
}

#[derive(Subcommand)]
enum HullCommand {
    /// Enumerate vertices and compare against the profile bounds.
    Report,
}

#[derive(Args)]
struct SuiteArgs {
    /// Comma-separated section names; every section when omitted.
    #[arg(long, value_delimiter = ',')]
    sections: Option<Vec<String>>,
    /// Cap on each section's case count.
    #[arg(long)]
    max_cases: Option<u32>,
    /// Inject a deliberately broken routine; the run must then fail.
    #[arg(long)]
    mutant: Option<String>,
}

/// Parses argv, executes, and reports through real stdio.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    run(argv, &mut out, &mut err)
}

/// [`dispatch`] against caller-supplied streams.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(err, "{e}");
                EXIT_MALFORMED
            } else {
                // help and version requests land here
                let _ = write!(out, "{e}");
                EXIT_OK
            };
        }
    };
    let config = RunConfig::from_flags(&cli.flags);
    match execute(&cli.command, &config, err) {
        Ok((json, code)) => match emit(&config, &json, out) {
            Ok(()) => code,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                exit_code_for(&e)
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Guard(_) => EXIT_GUARD_BREACH,
        Error::Invalid(_) => EXIT_MALFORMED,
        Error::Contract(_) => EXIT_FAILED,
    }
}

fn emit(config: &RunConfig, json: &str, out: &mut dyn Write) -> Result<()> {
    match &config.output {
        Some(path) => std::fs::write(path, format!("{json}\n"))
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display()))),
        None => writeln!(out, "{json}").map_err(|e| Error::contract(format!("stdout: {e}"))),
    }
}

fn read_input(config: &RunConfig) -> Result<String> {
    match &config.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display()))),
        None => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Error::invalid(format!("cannot read stdin: {e}")))?;
            Ok(text)
        }
    }
}

/// Parse and immediately check the parse-serialize-parse fixpoint, so
/// every input path proves its JSON round-trips.
fn parse_checked<T>(text: &str) -> Result<T>
where
    T: DeserializeOwned + Serialize + PartialEq,
{
    let value: T = serde_json::from_str(text)
        .map_err(|e| Error::invalid(format!("malformed input: {e}")))?;
    let echo = serde_json::to_string(&value)
        .map_err(|e| Error::contract(format!("serialization failed: {e}")))?;
    let back: T = serde_json::from_str(&echo)
        .map_err(|e| Error::contract(format!("round-trip reparse failed: {e}")))?;
    if back != value {
        return Err(Error::contract("input does not round-trip through JSON"));
    }
    Ok(value)
}

fn pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Error::contract(format!("serialization failed: {e}")))
}

/// Rebuild through the validating constructor so semantic problems exit 3.
fn revalidated_instance(text: &str) -> Result<Instance> {
    let inst: Instance = parse_checked(text)?;
    Ok(Instance::new(inst.p, inst.n, inst.m, inst.objective)?.with_bounds(inst.lower, inst.upper))
}

fn revalidated_uniform(text: &str) -> Result<UniformInstance> {
    let qi: UniformInstance = parse_checked(text)?;
    Ok(UniformInstance::new(qi.p, qi.n, qi.s, qi.m, qi.objective)?.with_bounds(qi.lower, qi.upper))
}

fn parse_eps(text: &str) -> Result<Rat> {
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a, b),
        None => (text, "1"),
    };
    let num: i64 = num
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad tolerance numerator {num:?}")))?;
    let den: i64 = den
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad tolerance denominator {den:?}")))?;
    if den == 0 {
        return Err(Error::invalid("tolerance denominator is zero"));
    }
    Ok(Rat::new(int(num), int(den)))
}

fn execute(command: &Command, config: &RunConfig, err: &mut dyn Write) -> Result<(String, i32)> {
    match command {
        Command::Solve(args) => cmd_solve(args, config, err),
        Command::Approx(args) => cmd_approx(args, config),
        Command::Kernelize => cmd_kernelize(config),
        Command::Pq(PqCommand::Build(args)) => cmd_pq_build(args, config),
        Command::Pq(PqCommand::Solve) => cmd_pq_solve(config),
        Command::Pq(PqCommand::Preprocess) => cmd_pq_preprocess(config),
        Command::Ftreduce(args) => cmd_ftreduce(args, config),
        Command::ReduceQ => cmd_reduce_q(config),
        Command::Hull(HullCommand::Report) => cmd_hull_report(config),
        Command::Suite(args) => cmd_suite(args, config, err),
    }
}

fn cmd_solve(args: &SolveArgs, config: &RunConfig, err: &mut dyn Write) -> Result<(String, i32)> {
    let mut inst = revalidated_instance(&read_input(config)?)?;
    if let Some(name) = &args.objective {
        inst.objective = name.parse()?;
    }
    if args.lower.is_some() {
        inst.lower = args.lower.map(int);
    }
    if args.upper.is_some() {
        inst.upper = args.upper.map(int);
    }
    match args.mode.as_str() {
        "optimize" => {
            let opt = exact::optimize(&inst, &config.guards)?;
            let _ = writeln!(err, "objective {} optimum {}", inst.objective.as_str(), opt.value);
            Ok((pretty(&opt)?, EXIT_OK))
        }
        "decide" => {
            let decision = exact::decide(&inst, &config.guards)?;
            let verdict = if decision.feasible { "feasible" } else { "infeasible" };
            let _ = writeln!(err, "objective {} {verdict}", inst.objective.as_str());
            Ok((pretty(&decision)?, EXIT_OK))
        }
        other => Err(Error::invalid(format!(
            "unknown mode {other:?}, expected decide or optimize"
        ))),
    }
}

fn cmd_approx(args: &ApproxArgs, config: &RunConfig) -> Result<(String, i32)> {
    let mut inst = revalidated_instance(&read_input(config)?)?;
    if let Some(name) = &args.objective {
        inst.objective = name.parse()?;
    }
    let eps = parse_eps(&args.eps)?;
    let result = approx::approx_objective(&inst, &eps, &config.guards)?;
    Ok((pretty(&result)?, EXIT_OK))
}

fn cmd_kernelize(config: &RunConfig) -> Result<(String, i32)> {
    let inst = revalidated_instance(&read_input(config)?)?;
    let kernel = kernel::preassign_kernel(&inst)?;
    Ok((pretty(&kernel)?, EXIT_OK))
}

fn cmd_pq_build(args: &PqBuildArgs, config: &RunConfig) -> Result<(String, i32)> {
    let text = read_input(config)?;
    let pq = match args.problem.as_str() {
        "identical" => build_identical(&revalidated_instance(&text)?)?,
        "complex" => build_complex(&parse_checked::<ComplexInstance>(&text)?)?,
        "setup" => build_setup(&parse_checked::<SetupInstance>(&text)?)?,
        "late-weight" => build_sumwu(&parse_checked::<SumWuInstance>(&text)?)?,
        "nfold" => build_nfold(&parse_checked::<UniformNFold>(&text)?)?,
        "mswbp" => build_mswbp(&parse_checked::<MswbpInstance>(&text)?)?,
        other => {
            return Err(Error::invalid(format!(
                "unknown problem {other:?}, expected identical, complex, setup, late-weight, \
                 nfold, or mswbp"
            )))
        }
    };
    Ok((pretty(&pq)?, EXIT_OK))
}

#[derive(Serialize)]
struct PqSolveOutput {
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    solution: Option<PQSolution>,
}

fn cmd_pq_solve(config: &RunConfig) -> Result<(String, i32)> {
    let pq: PQRep = parse_checked(&read_input(config)?)?;
    pq.validate()?;
    let solution = solve_pqr(&pq, &config.guards)?;
    let out = PqSolveOutput { feasible: solution.is_some(), solution };
    Ok((pretty(&out)?, EXIT_OK))
}

#[derive(Serialize)]
struct PqPreprocessOutput {
    relaxation_feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reduced: Option<PreprocessedPQRep>,
}

fn cmd_pq_preprocess(config: &RunConfig) -> Result<(String, i32)> {
    let pq: PQRep = parse_checked(&read_input(config)?)?;
    pq.validate()?;
    let reduced = relax::preprocess_pqr_with(&pq, &config.distance_profile, &config.guards)?;
    let out = PqPreprocessOutput { relaxation_feasible: reduced.is_some(), reduced };
    Ok((pretty(&out)?, EXIT_OK))
}

/// Input document for `ftreduce`: a coefficient row and an optional
/// right-hand side (row mode needs it, vector mode ignores it).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RowInput {
    #[serde(with = "hms_core::io::int_vec")]
    pub w: Vec<Int>,
    #[serde(with = "hms_core::io::int_opt", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Int>,
}

#[derive(Serialize)]
struct VectorOutput {
    #[serde(with = "hms_core::io::int_vec")]
    w_bar: Vec<Int>,
}

fn cmd_ftreduce(args: &FtreduceArgs, config: &RunConfig) -> Result<(String, i32)> {
    let input: RowInput = parse_checked(&read_input(config)?)?;
    let delta = int(args.delta);
    match args.mode.as_str() {
        "row" => {
            let b = input
                .b
                .ok_or_else(|| Error::invalid("row mode needs a right-hand side b"))?;
            let reduced = ftreduce::reduce_row(&input.w, &b, &delta)?;
            Ok((pretty(&reduced)?, EXIT_OK))
        }
        "vector" => {
            let w_bar = ftreduce::reduce_vector(&input.w, &delta)?;
            Ok((pretty(&VectorOutput { w_bar })?, EXIT_OK))
        }
        other => Err(Error::invalid(format!(
            "unknown mode {other:?}, expected row or vector"
        ))),
    }
}

#[derive(Serialize)]
struct ReduceQOutput {
    reduced: Instance,
    map: ReductionMap,
}

fn cmd_reduce_q(config: &RunConfig) -> Result<(String, i32)> {
    let qi = revalidated_uniform(&read_input(config)?)?;
    let (reduced, map) = match qi.objective {
        model::Objective::Cmax => uniform::reduce_cmax(&qi)?,
        model::Objective::Cmin => uniform::reduce_cmin(&qi)?,
        model::Objective::Cenvy => {
            return Err(Error::invalid(
                "the speed reduction covers the threshold objectives cmax and cmin",
            ))
        }
    };
    Ok((pretty(&ReduceQOutput { reduced, map })?, EXIT_OK))
}

/// Input document for `hull report`: an equality system `a x = b`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct HullInput {
    #[serde(with = "hms_core::io::int_mat")]
    pub a: Vec<Vec<Int>>,
    #[serde(with = "hms_core::io::int_vec")]
    pub b: Vec<Int>,
}

fn cmd_hull_report(config: &RunConfig) -> Result<(String, i32)> {
    let input: HullInput = parse_checked(&read_input(config)?)?;
    let sys = EqSystem::new(input.a, input.b)?;
    let report = hull::hull_report(&sys, &config.hull_profile, &config.guards)?;
    Ok((pretty(&report)?, EXIT_OK))
}

fn cmd_suite(args: &SuiteArgs, config: &RunConfig, err: &mut dyn Write) -> Result<(String, i32)> {
    let sections = match &args.sections {
        None => SectionKind::all(),
        Some(names) => names
            .iter()
            .filter(|name| !name.is_empty())
            .map(|name| {
                SectionKind::parse_name(name)
                    .ok_or_else(|| Error::invalid(format!("unknown section {name:?}")))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let mutant = args
        .mutant
        .as_deref()
        .map(|name| {
            Mutant::parse_name(name)
                .ok_or_else(|| Error::invalid(format!("unknown mutant {name:?}")))
        })
        .transpose()?;
    let suite_config = SuiteConfig {
        seed: config.seed,
        sections,
        max_cases: args.max_cases,
        guards: config.guards.clone(),
        distance_profile: config.distance_profile,
        hull_profile: config.hull_profile.clone(),
        mutant,
    };
    let report = suite::run_suite(&suite_config)?;
    for section in &report.sections {
        let tag = if section.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            err,
            "[{tag}] {}: {} cases, {} failed",
            section.name, section.cases, section.failed_cases
        );
        for failure in &section.failures {
            let _ = writeln!(err, "  {failure}");
        }
    }
    let code = if report.passed { EXIT_OK } else { EXIT_FAILED };
    Ok((pretty(&report)?, code))
}
