use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use chorefair::bench::{bench, parse_sizes};
use chorefair::generate::{generate, Family, Params};
use chorefair::io::{allocation_to_json, instance_to_json, parse_allocation, read_file, read_instance, write_file};
use chorefair::parallel::analyze_parallel;
use chorefair::Error;
use chorefair_core::class::{check_class, sample_class, DEFAULT_SAMPLE_TRIALS, EXHAUSTIVE_LIMIT};
use chorefair_core::fairness::{
    allocation_count, fairness_report, is_alpha_ef, is_alpha_efx, is_po_bruteforce, social_cost, Violation,
    PO_ENUMERATION_LIMIT,
};
use chorefair_core::oracle::{efx_exists_search, AnalyzeOptions, DEFAULT_LIST_LIMIT, ENUMERATION_LIMIT};
use chorefair_core::solve::{solve, Algorithm, GuaranteeTag, SolveOptions, SolveReport};
use chorefair_core::{builtin, Allocation, FairnessReport, Instance, Ratio};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

const EXIT_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "chorefair", version, about = "Fair allocation of chores with binary marginal costs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an allocation.
    Solve(SolveArgs),
    /// Check an allocation against fairness and efficiency criteria.
    Verify(VerifyArgs),
    /// Report which function classes each agent belongs to.
    CheckClass(CheckClassArgs),
    /// Enumerate every complete allocation of a small instance.
    Enumerate(EnumerateArgs),
    /// Write a random or built-in instance.
    Generate(GenerateArgs),
    /// Time a solver on generated instances.
    Bench(BenchArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Instance file.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Built-in instance name.
    #[arg(long)]
    builtin: Option<String>,
}

impl Source {
    fn load(&self) -> Result<Instance, Error> {
        match (&self.input, &self.builtin) {
            (Some(path), _) => read_instance(path),
            (None, Some(name)) => Ok(builtin::builtin(name)?),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, short, default_value = "auto", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    /// Write the allocation here.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Re-check the output with the independent checkers.
    #[arg(long)]
    verify: bool,
    /// Include the step-by-step trace.
    #[arg(long)]
    trace: bool,
    /// Maintain the envy graph incrementally.
    #[arg(long)]
    incremental: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    /// Allocation file.
    #[arg(long)]
    allocation: PathBuf,
    /// Comma-separated: ef, efx, po, alpha-ef:P/Q, alpha-efx:P/Q, social-cost.
    #[arg(long, default_value = "ef,efx,social-cost", value_delimiter = ',', value_parser = parse_criterion)]
    criteria: Vec<Criterion>,
}

#[derive(Args)]
struct CheckClassArgs {
    #[command(flatten)]
    source: Source,
    /// Only this agent.
    #[arg(long)]
    agent: Option<usize>,
    /// Random trials for domains too large for the exhaustive check.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportKind {
    Efx,
    Frontier,
    EfxPo,
    All,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "all")]
    report: ReportKind,
    /// Worker threads; the report does not depend on it.
    #[arg(long, short)]
    jobs: Option<usize>,
    /// Refuse instances with more than this many allocations.
    #[arg(long, default_value_t = ENUMERATION_LIMIT)]
    limit: u128,
    /// Allocations kept per list.
    #[arg(long, default_value_t = DEFAULT_LIST_LIMIT)]
    list_limit: usize,
    /// Only look for one complete EFX allocation.
    #[arg(long)]
    search: bool,
    /// If no complete EFX allocation exists, write the instance here.
    #[arg(long)]
    dump_counterexample: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_family, required_unless_present = "builtin")]
    family: Option<Family>,
    #[arg(long, short, default_value_t = 2)]
    n: usize,
    #[arg(long, short, default_value_t = 6)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    cap: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value_t = 3)]
    groups: usize,
    #[arg(long, default_value_t = 0.5)]
    p_one: f64,
    /// Write a built-in instance instead.
    #[arg(long, conflicts_with = "family")]
    builtin: Option<String>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_parser = parse_family, default_value = "binary_additive")]
    family: Family,
    #[arg(long, short, default_value = "auto", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    /// `N0xM0..N1xM1` or a list like `2x8,3x16`.
    #[arg(long, default_value = "2x8..6x24")]
    sizes: String,
    /// Step between item counts in a range.
    #[arg(long, default_value_t = 8)]
    m_step: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability that an item costs one.
    #[arg(long, default_value_t = 0.5)]
    p_one: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug)]
enum Criterion {
    Ef,
    Efx,
    Po,
    AlphaEf(Ratio),
    AlphaEfx(Ratio),
    SocialCost,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: chorefair_core::Error| e.to_string())
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

fn parse_criterion(s: &str) -> Result<Criterion, String> {
    let ratio = |r: &str| r.parse::<Ratio>().map_err(|e| e.to_string());
    match s.trim() {
        "ef" => Ok(Criterion::Ef),
        "efx" => Ok(Criterion::Efx),
        "po" => Ok(Criterion::Po),
        "social-cost" => Ok(Criterion::SocialCost),
        other => match other.split_once(':') {
            Some(("alpha-ef", r)) => Ok(Criterion::AlphaEf(ratio(r)?)),
            Some(("alpha-efx", r)) => Ok(Criterion::AlphaEfx(ratio(r)?)),
            _ => Err(format!("unknown criterion {other:?}")),
        },
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CHOREFAIR_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Verify(a) => run_verify(a),
        Command::CheckClass(a) => run_check_class(a),
        Command::Enumerate(a) => run_enumerate(a),
        Command::Generate(a) => run_generate(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { EXIT_INPUT } else { EXIT_FAILED })
        }
    }
}

fn print_json(v: &Value) {
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

fn bundles_line(inst: &Instance, x: &Allocation) -> String {
    let parts: Vec<String> =
        x.bundles().iter().enumerate().map(|(i, &b)| format!("{i}: {b:?} (cost {})", inst.cost(i, b))).collect();
    parts.join(", ")
}

fn po_checkable(inst: &Instance, x: &Allocation) -> bool {
    x.is_complete() && allocation_count(inst.n(), inst.m()) <= PO_ENUMERATION_LIMIT
}

/// Re-checks a solver output without looking at its own verdicts.
fn independent_check(inst: &Instance, report: &SolveReport) -> Result<(bool, FairnessReport), Error> {
    let x = &report.allocation;
    let alpha = match report.guarantee {
        GuaranteeTag::TwoEf | GuaranteeTag::TwoEfx => Ratio::TWO,
        _ => Ratio::ONE,
    };
    let check = fairness_report(inst, x, alpha, po_checkable(inst, x))?;
    let ok = match report.guarantee {
        GuaranteeTag::EfxAndPo => check.complete && check.efx && check.po != Some(false),
        GuaranteeTag::Efx => check.complete && check.efx,
        GuaranteeTag::PartialEf => check.ef && x.unallocated().len() < inst.n(),
        GuaranteeTag::TwoEf => check.complete && check.alpha_ef && check.alpha_efx,
        GuaranteeTag::TwoEfx => check.complete && check.alpha_efx,
    };
    Ok((ok, check))
}

fn run_solve(a: SolveArgs) -> Result<u8, Error> {
    let inst = a.source.load()?;
    info!("solving n = {}, m = {} with {}", inst.n(), inst.m(), a.algorithm.name());
    let opts = SolveOptions { trace: a.trace, incremental_graph: a.incremental };
    let report = solve(&inst, a.algorithm, &opts)?;
    debug!("counters: {:?}", report.counters);
    if let Some(path) = &a.output {
        write_file(path, &allocation_to_json(&report.allocation))?;
    }
    let verified = if a.verify { Some(independent_check(&inst, &report)?) } else { None };

    if a.json {
        let mut out = json!({
            "algorithm": report.algorithm,
            "guarantee": report.guarantee,
            "case": report.case,
            "allocation": report.allocation,
            "counters": report.counters,
        });
        if a.trace {
            out["trace"] = json!(report.trace);
        }
        if let Some((ok, check)) = &verified {
            out["verified"] = json!(ok);
            out["verification"] = json!(check);
        }
        print_json(&out);
    } else {
        out!("algorithm: {}", report.algorithm.name());
        if let Some(case) = report.case {
            out!("case: {case}");
        }
        out!("bundles: {}", bundles_line(&inst, &report.allocation));
        if !report.allocation.is_complete() {
            out!("unallocated: {:?}", report.allocation.unallocated());
        }
        if a.trace {
            for event in &report.trace {
                out!("  {event:?}");
            }
        }
        match &verified {
            Some((ok, _)) => out!("guarantee: {} ({})", report.guarantee, if *ok { "verified" } else { "FAILED" }),
            None => out!("guarantee: {}", report.guarantee),
        }
    }
    let Some((ok, check)) = verified else { return Ok(0) };
    match check.po {
        Some(false) => eprintln!("note: not PO"),
        None if report.allocation.is_complete() => eprintln!("note: PO not checked (instance too large)"),
        _ => {}
    }
    if !ok {
        for v in &check.violations {
            eprintln!("violation: {v:?}");
        }
        return Ok(EXIT_FAILED);
    }
    Ok(0)
}

fn witnesses(found: &[Violation]) -> Value {
    json!(found.iter().map(|v| json!({"i": v.i, "j": v.j, "item": v.item})).collect::<Vec<_>>())
}

fn run_verify(a: VerifyArgs) -> Result<u8, Error> {
    let inst = a.source.load()?;
    let x = parse_allocation(&read_file(&a.allocation)?, &inst)?;
    let mut results = Vec::new();
    let mut all_pass = true;
    let mut first_alpha = None;
    for c in &a.criteria {
        let (name, pass, detail) = match *c {
            Criterion::Ef => {
                let r = is_alpha_ef(&inst, &x, Ratio::ONE)?;
                ("ef".to_string(), r.holds, witnesses(&r.violations))
            }
            Criterion::Efx => {
                let r = is_alpha_efx(&inst, &x, Ratio::ONE)?;
                ("efx".to_string(), r.holds, witnesses(&r.violations))
            }
            Criterion::AlphaEf(alpha) => {
                first_alpha.get_or_insert(alpha);
                let r = is_alpha_ef(&inst, &x, alpha)?;
                (format!("alpha-ef:{alpha}"), r.holds, witnesses(&r.violations))
            }
            Criterion::AlphaEfx(alpha) => {
                first_alpha.get_or_insert(alpha);
                let r = is_alpha_efx(&inst, &x, alpha)?;
                (format!("alpha-efx:{alpha}"), r.holds, witnesses(&r.violations))
            }
            Criterion::Po => {
                let r = is_po_bruteforce(&inst, &x)?;
                ("po".to_string(), r.pareto_optimal, json!(r.dominated_by))
            }
            Criterion::SocialCost => ("social-cost".to_string(), true, json!(social_cost(&inst, &x)?)),
        };
        if !pass {
            eprintln!("{name}: fails; {detail}");
        }
        all_pass &= pass;
        results.push(json!({"criterion": name, "pass": pass, "detail": detail}));
    }
    let check_po = a.criteria.iter().any(|c| matches!(c, Criterion::Po));
    let report = fairness_report(&inst, &x, first_alpha.unwrap_or(Ratio::ONE), check_po)?;
    print_json(&json!({"pass": all_pass, "criteria": results, "report": report}));
    Ok(if all_pass { 0 } else { EXIT_FAILED })
}

fn run_check_class(a: CheckClassArgs) -> Result<u8, Error> {
    let inst = a.source.load()?;
    let agents: Vec<usize> = match a.agent {
        Some(i) if i < inst.n() => vec![i],
        Some(i) => {
            return Err(
                chorefair_core::Error::InvalidInput(format!("agent {i} out of range for n = {}", inst.n())).into()
            )
        }
        None => (0..inst.n()).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut out = Vec::new();
    for i in agents {
        let f = inst.agent(i);
        let report = if f.m() <= EXHAUSTIVE_LIMIT { check_class(f)? } else { sample_class(f, &mut rng, a.trials) };
        if !a.json {
            out!(
                "agent {i} ({}): binary_marginal={} monotone={} additive={} cancelable={} submodular={}{}",
                f.kind_name(),
                report.binary_marginal,
                report.monotone,
                report.additive,
                report.cancelable,
                report.submodular,
                if report.exhaustive { "" } else { " (sampled)" }
            );
            for w in &report.witnesses {
                out!("  {:?} fails: S={:?} T={:?} e={:?}", w.property, w.s, w.t, w.e);
            }
        }
        out.push(json!({"agent": i, "kind": f.kind_name(), "report": report}));
    }
    if a.json {
        print_json(&json!(out));
    }
    Ok(0)
}

fn run_enumerate(a: EnumerateArgs) -> Result<u8, Error> {
    let inst = a.source.load()?;
    let jobs = a.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let dump = |inst: &Instance| -> Result<(), Error> {
        if let Some(path) = &a.dump_counterexample {
            write_file(path, &instance_to_json(inst))?;
            eprintln!("no complete EFX allocation; instance written to {}", path.display());
        }
        Ok(())
    };
    if a.search {
        let found = efx_exists_search(&inst, a.limit)?;
        if found.is_none() {
            dump(&inst)?;
        }
        print_json(&json!({"efx_exists": found.is_some(), "witness": found}));
        return Ok(0);
    }
    info!("enumerating {} allocations on {jobs} threads", allocation_count(inst.n(), inst.m()));
    let opts = AnalyzeOptions { limit: a.limit, list_limit: a.list_limit };
    let r = analyze_parallel(&inst, &opts, jobs)?;
    if r.efx_count == 0 {
        dump(&inst)?;
    }
    let value = match a.report {
        ReportKind::Efx => json!({
            "total_allocations": r.total_allocations,
            "efx_count": r.efx_count,
            "efx_allocations": r.efx_allocations,
            "truncated": r.truncated,
        }),
        ReportKind::Frontier => json!({
            "total_allocations": r.total_allocations,
            "frontier_costs": r.frontier_costs,
            "pareto_frontier": r.pareto_frontier,
            "truncated": r.truncated,
        }),
        ReportKind::EfxPo => json!({
            "total_allocations": r.total_allocations,
            "exists": r.efx_and_po_exists,
        }),
        ReportKind::All => json!(r),
    };
    if a.json || a.report != ReportKind::All {
        print_json(&value);
    } else {
        out!("allocations: {}", r.total_allocations);
        out!("minimum social cost: {}", r.min_social_cost);
        out!("EFX allocations: {}", r.efx_count);
        out!("Pareto frontier:");
        for p in &r.frontier_costs {
            out!("  costs {:?}: {} allocation(s), EFX among them: {}", p.costs, p.count, p.any_efx);
        }
        out!("EFX and PO allocation exists: {}", r.efx_and_po_exists);
    }
    Ok(0)
}

fn run_generate(a: GenerateArgs) -> Result<u8, Error> {
    let inst = match (&a.builtin, a.family) {
        (Some(name), _) => builtin::builtin(name)?,
        (None, Some(family)) => {
            let params = Params { p_one: a.p_one, cap: a.cap, k: a.k, groups: a.groups };
            generate(family, a.n, a.m, a.seed, &params)?
        }
        (None, None) => unreachable!("clap requires --family or --builtin"),
    };
    let text = instance_to_json(&inst);
    match &a.output {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn run_bench(a: BenchArgs) -> Result<u8, Error> {
    let sizes = parse_sizes(&a.sizes, a.m_step).map_err(chorefair_core::Error::InvalidInput)?;
    let params = Params { p_one: a.p_one, ..Params::default() };
    let r = bench(a.family, a.algorithm, &sizes, a.seed, &params)?;
    if a.json {
        print_json(&json!(r));
        return Ok(0);
    }
    out!("{:>4} {:>4} {:>10} {:>12} {:>10} {:>10}", "n", "m", "iterations", "operations", "ops/nm^2", "micros");
    for row in &r.rows {
        out!(
            "{:>4} {:>4} {:>10} {:>12} {:>10.4} {:>10}",
            row.n,
            row.m,
            row.iterations,
            row.basic_operations,
            row.ratio,
            row.micros
        );
    }
    out!("fitted C = {:.4}; all rows within C*n*m^2: {}", r.fitted_c, r.within_bound);
    Ok(0)
}
