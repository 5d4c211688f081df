//! Command-line front end: derive two-sided approximations, validate point
//! sets, construct upper shells, run grid oracles, probe objective
//! replacements, and time the dose-score pair.
//!
//! Exit codes: 0 success, 1 usage or IO error, 2 a validator failed (the
//! witnesses are in the written report).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twoshell::{
    candidates_from_csv, candidates_to_csv, check_invariance, check_lower_shell,
    check_upper_approximation, check_upper_shell, check_upper_shell_oracle,
    construct_upper_shell_budget, dominance_agreement, geud_timing, grid_enumerate,
    no_upper_shell_certificate, parse_expr, parse_problem, run_two_sided, same_linear_order_probe,
    sample_run, shift_candidates, BoxRelaxation, CandidateSolution, DominanceAgreement,
    GeudTiming, Interval, ObjectivePair, OrderProbe, ProblemSpec, RelaxationDescriptor,
    SamplerConfig, ShellRole, ShiftSchedule, TwoSidedMetrics, ValidationReport,
};

#[derive(Parser)]
#[command(name = "twoshell", version, about = "Two-sided discrete approximations of Pareto fronts")]
struct Cli {
    /// Worker threads for parallel evaluation (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory; falls back to $TWOSHELL_OUT, then the working directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the problem and a relaxation of it, then emit the lower shell,
    /// the outer candidate set, and a validation report.
    Derive(DeriveArgs),
    /// Check a point set against the conditions of its claimed role.
    Validate(ValidateArgs),
    /// Build an upper shell from feasible seeds by monotone shifting.
    Construct(ConstructArgs),
    /// Enumerate the efficient set on a lattice; optionally certify that no
    /// upper shell exists under a relaxation.
    Oracle(OracleArgs),
    /// Probe an objective replacement for order agreement and re-validate
    /// shells under both formulations.
    Invariance(InvarianceArgs),
    /// Time the generalized-mean dose score against its linear surrogate
    /// (informational; never gated).
    Bench(BenchArgs),
}

#[derive(Args)]
struct RelaxArgs {
    /// Box relaxation: a width factor ("1.5") or an explicit interval
    /// ("0:6") applied to every variable.
    #[arg(long)]
    relax_box: Option<String>,
    /// Right-hand-side factor applied to every inequality constraint.
    #[arg(long)]
    relax_constraints: Option<f64>,
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(long)]
    problem: PathBuf,
    #[command(flatten)]
    relax: RelaxArgs,
    /// Evaluation budget per side.
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Role {
    LowerShell,
    UpperShell,
    UpperApproximation,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, value_enum)]
    role: Role,
    /// CSV of the set under test.
    #[arg(long)]
    set: PathBuf,
    /// CSV of the lower shell (upper_approximation only).
    #[arg(long)]
    lower: Option<PathBuf>,
    /// CSV of the efficient reference set (upper_shell only).
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Dominance tolerance.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
}

#[derive(Copy, Clone, ValueEnum)]
enum ConstructMode {
    /// Probe monotonicity, then shift each seed along budget-style rays.
    Budget,
    /// Raw single shifts of the given seeds, no probing.
    Shift,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, value_enum, default_value_t = ConstructMode::Budget)]
    mode: ConstructMode,
    /// Trials for the pre-construction monotonicity probes.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV of feasible seed points; sampled from the problem when absent.
    #[arg(long)]
    seeds: Option<PathBuf>,
    /// Evaluation budget for seed sampling when --seeds is absent.
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    /// Lattice step for an exhaustive cross-check of the result.
    #[arg(long)]
    oracle_step: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    problem: PathBuf,
    /// Lattice step per axis.
    #[arg(long)]
    step: f64,
    #[command(flatten)]
    relax: RelaxArgs,
    /// Scan every lattice point outside the feasible set and certify that
    /// none can join an upper shell.
    #[arg(long)]
    certify_no_upper_shell: bool,
}

#[derive(Args)]
struct InvarianceArgs {
    #[arg(long)]
    problem: PathBuf,
    /// Replacement as INDEX=EXPR with a 1-based objective index,
    /// e.g. --replace "2=-(x1+x2)^3".
    #[arg(long)]
    replace: String,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV of a shell to re-validate under both formulations.
    #[arg(long)]
    set: Option<PathBuf>,
    #[arg(long, value_enum)]
    role: Option<Role>,
    /// CSV of the lower shell companion (upper_approximation only).
    #[arg(long)]
    lower: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Dose vector length.
    #[arg(long, default_value_t = 100)]
    vector_len: usize,
    /// Generalized-mean exponent.
    #[arg(long, default_value_t = 3.0)]
    alpha: f64,
    #[arg(long, default_value_t = 20_000)]
    calls: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Outcome {
    Clean,
    ValidationFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            // Usage problems share the IO exit code; 2 is reserved for
            // validators that ran and failed.
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::FAILURE,
            };
        }
    };
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let dir = out_dir(cli.out)?;
    match cli.command {
        Command::Derive(args) => cmd_derive(args, &dir),
        Command::Validate(args) => cmd_validate(args, &dir),
        Command::Construct(args) => cmd_construct(args, &dir),
        Command::Oracle(args) => cmd_oracle(args, &dir),
        Command::Invariance(args) => cmd_invariance(args, &dir),
        Command::Bench(args) => cmd_bench(args, &dir),
    }
}

fn out_dir(flag: Option<PathBuf>) -> Result<PathBuf> {
    let dir = flag
        .or_else(|| std::env::var_os("TWOSHELL_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir)
}

fn load_problem(path: &Path) -> Result<ProblemSpec> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_problem(&text).with_context(|| format!("parsing problem {}", path.display()))
}

fn load_set(path: &Path, p: &ProblemSpec) -> Result<Vec<CandidateSolution>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    candidates_from_csv(&text, p).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(dir, name, &text)
}

fn relaxation(args: &RelaxArgs, p: &ProblemSpec) -> Result<RelaxationDescriptor> {
    let box_relax = match &args.relax_box {
        Some(text) => parse_box_relax(text, p)?,
        None => BoxRelaxation::Scale(1.5),
    };
    let constraint_scale = if p.constraints().is_empty() {
        Vec::new()
    } else {
        vec![args.relax_constraints.unwrap_or(1.2)]
    };
    Ok(RelaxationDescriptor {
        box_relax,
        constraint_scale,
        dropped_constraints: Default::default(),
    })
}

fn parse_box_relax(text: &str, p: &ProblemSpec) -> Result<BoxRelaxation> {
    if let Some((lo, hi)) = text.split_once(':') {
        let lo: f64 = lo.trim().parse().context("box relaxation lower bound")?;
        let hi: f64 = hi.trim().parse().context("box relaxation upper bound")?;
        let interval = Interval::closed(lo, hi)?;
        Ok(BoxRelaxation::Explicit(vec![interval; p.n()]))
    } else {
        let factor: f64 = text.trim().parse().context("box relaxation factor")?;
        Ok(BoxRelaxation::Scale(factor))
    }
}

#[derive(Serialize)]
struct DeriveReport<'a> {
    problem: &'a str,
    seed: u64,
    budget: usize,
    metrics: &'a TwoSidedMetrics,
    lower_shell: &'a ValidationReport,
    /// Absent when no outer candidate survived extraction.
    upper_approximation: Option<&'a ValidationReport>,
    passed: bool,
}

fn cmd_derive(args: DeriveArgs, dir: &Path) -> Result<Outcome> {
    let p = load_problem(&args.problem)?;
    let relax = relaxation(&args.relax, &p)?;
    let out = run_two_sided(&p, &relax, args.budget, args.seed)?;

    write_file(dir, "S_L.csv", &candidates_to_csv(&out.lower_shell, &p))?;
    write_file(dir, "theta.csv", &candidates_to_csv(&out.theta.theta, &p))?;

    let lower_report = check_lower_shell(&out.lower_shell, &p, 0.0)?;
    let theta_report = if out.theta.theta.is_empty() {
        None
    } else {
        Some(check_upper_approximation(
            &out.theta.theta,
            &out.lower_shell,
            &p,
            0.0,
            false,
        )?)
    };
    let passed =
        lower_report.passed() && theta_report.as_ref().map_or(true, ValidationReport::passed);
    write_json(
        dir,
        "report.json",
        &DeriveReport {
            problem: p.name(),
            seed: args.seed,
            budget: args.budget,
            metrics: &out.metrics,
            lower_shell: &lower_report,
            upper_approximation: theta_report.as_ref(),
            passed,
        },
    )?;
    println!(
        "derive {}: lower {} points, outer {} points, validation {}",
        p.name(),
        out.metrics.lower_size,
        out.metrics.theta_size,
        if passed { "PASS" } else { "FAIL" }
    );
    Ok(if passed { Outcome::Clean } else { Outcome::ValidationFailed })
}

#[derive(Serialize)]
struct ValidateReport<'a> {
    problem: &'a str,
    set: String,
    elements: usize,
    report: &'a ValidationReport,
    passed: bool,
}

fn cmd_validate(args: ValidateArgs, dir: &Path) -> Result<Outcome> {
    let p = load_problem(&args.problem)?;
    let set = load_set(&args.set, &p)?;
    let report = match args.role {
        Role::LowerShell => check_lower_shell(&set, &p, args.tau)?,
        Role::UpperShell => {
            let Some(reference) = &args.reference else {
                bail!("--reference is required for role upper_shell");
            };
            let reference = load_set(reference, &p)?;
            check_upper_shell(&set, &reference, &p, args.tau, false)?
        }
        Role::UpperApproximation => {
            let Some(lower) = &args.lower else {
                bail!("--lower is required for role upper_approximation");
            };
            let lower = load_set(lower, &p)?;
            check_upper_approximation(&set, &lower, &p, args.tau, false)?
        }
    };
    let passed = report.passed();
    write_json(
        dir,
        "report.json",
        &ValidateReport {
            problem: p.name(),
            set: args.set.display().to_string(),
            elements: set.len(),
            report: &report,
            passed,
        },
    )?;
    println!(
        "validate {}: {} elements, {}{}",
        p.name(),
        set.len(),
        if passed { "PASS" } else { "FAIL" },
        if passed {
            String::new()
        } else {
            format!(" (failed: {})", report.failed_conditions().join(", "))
        }
    );
    Ok(if passed { Outcome::Clean } else { Outcome::ValidationFailed })
}

#[derive(Serialize)]
struct ConstructReport<'a> {
    problem: &'a str,
    mode: &'static str,
    seeds: usize,
    shell: usize,
    /// Exhaustive cross-check, present only with --oracle-step.
    oracle: Option<&'a ValidationReport>,
    passed: bool,
}

fn cmd_construct(args: ConstructArgs, dir: &Path) -> Result<Outcome> {
    let p = load_problem(&args.problem)?;
    let mut schedule = ShiftSchedule::default();
    if let Some(trials) = args.trials {
        schedule.probe_trials = trials;
    }
    let seeds = match &args.seeds {
        Some(path) => load_set(path, &p)?,
        None => sample_run(&p, &SamplerConfig::new(args.budget, args.seed))?.shell,
    };
    let shell = match args.mode {
        ConstructMode::Budget => construct_upper_shell_budget(&p, &seeds, &schedule, args.seed)?,
        ConstructMode::Shift => shift_candidates(&seeds, &p, &schedule, args.seed)?,
    };
    write_file(dir, "shell.csv", &candidates_to_csv(&shell, &p))?;

    let oracle_report = match args.oracle_step {
        Some(step) => {
            let oracle = grid_enumerate(&p, step)?;
            Some(check_upper_shell_oracle(&shell, &oracle, &p)?)
        }
        None => None,
    };
    let passed = oracle_report.as_ref().map_or(true, ValidationReport::passed);
    write_json(
        dir,
        "report.json",
        &ConstructReport {
            problem: p.name(),
            mode: match args.mode {
                ConstructMode::Budget => "budget",
                ConstructMode::Shift => "shift",
            },
            seeds: seeds.len(),
            shell: shell.len(),
            oracle: oracle_report.as_ref(),
            passed,
        },
    )?;
    println!(
        "construct {}: {} seeds -> {} shell points{}",
        p.name(),
        seeds.len(),
        shell.len(),
        match (&oracle_report, passed) {
            (None, _) => String::new(),
            (Some(_), true) => ", oracle cross-check PASS".into(),
            (Some(_), false) => ", oracle cross-check FAIL".into(),
        }
    );
    Ok(if passed { Outcome::Clean } else { Outcome::ValidationFailed })
}

#[derive(Serialize)]
struct OracleReport<'a> {
    problem: &'a str,
    resolution: f64,
    tau_grid: f64,
    lipschitz: f64,
    evaluations: usize,
    eval_failures: usize,
    feasible_points: usize,
    efficient_size: usize,
    front_size: usize,
}

fn cmd_oracle(args: OracleArgs, dir: &Path) -> Result<Outcome> {
    let p = load_problem(&args.problem)?;
    let oracle = grid_enumerate(&p, args.step)?;
    write_file(dir, "front.csv", &candidates_to_csv(&oracle.efficient_set, &p))?;
    write_json(
        dir,
        "report.json",
        &OracleReport {
            problem: p.name(),
            resolution: oracle.resolution,
            tau_grid: oracle.tau_grid,
            lipschitz: oracle.lipschitz,
            evaluations: oracle.evaluations,
            eval_failures: oracle.eval_failures,
            feasible_points: oracle.feasible_points.len(),
            efficient_size: oracle.efficient_set.len(),
            front_size: oracle.front.len(),
        },
    )?;
    println!(
        "oracle {}: {} feasible lattice points, {} efficient",
        p.name(),
        oracle.feasible_points.len(),
        oracle.efficient_set.len()
    );
    if !args.certify_no_upper_shell {
        return Ok(Outcome::Clean);
    }
    let relax = relaxation(&args.relax, &p)?;
    let certificate = no_upper_shell_certificate(&p, &relax, args.step)?;
    let granted = certificate.granted;
    write_json(dir, "certificate.json", &certificate)?;
    // A refusal is a legitimate result (survivors exist), not a failure.
    println!(
        "certificate {}: {} ({} outside points scanned, {} survivors)",
        p.name(),
        if granted { "granted" } else { "refused" },
        certificate.outside_checked,
        certificate.survivor_count
    );
    Ok(Outcome::Clean)
}

#[derive(Serialize)]
struct InvarianceReport<'a> {
    problem: &'a str,
    objective: usize,
    replacement: String,
    trials: usize,
    order_probe: &'a OrderProbe,
    dominance: &'a DominanceAgreement,
    shell: Option<&'a ValidationReport>,
    passed: bool,
}

fn cmd_invariance(args: InvarianceArgs, dir: &Path) -> Result<Outcome> {
    let p = load_problem(&args.problem)?;
    let Some((index, expr_text)) = args.replace.split_once('=') else {
        bail!("--replace expects INDEX=EXPR, e.g. 2=-(x1+x2)^3");
    };
    let index: usize = index.trim().parse().context("replacement objective index")?;
    if index == 0 || index > p.k() {
        bail!("objective index {index} out of range 1..={}", p.k());
    }
    let replacement = parse_expr(expr_text.trim())?;
    let mut swapped = p.clone();
    swapped.replace_objective(index - 1, replacement.clone())?;

    let pair = ObjectivePair::new(
        p.objectives()[index - 1].clone(),
        replacement,
        p.bounds().to_vec(),
    )?;
    let probe = same_linear_order_probe(&pair, args.trials, args.seed)?;
    let agreement = dominance_agreement(&p, &swapped, args.trials, args.seed)?;

    let shell_report = match &args.set {
        Some(path) => {
            let Some(role) = args.role else {
                bail!("--role is required when --set is given");
            };
            let set = load_set(path, &p)?;
            let role = match role {
                Role::LowerShell => ShellRole::LowerShell,
                Role::UpperShell => ShellRole::UpperShell,
                Role::UpperApproximation => ShellRole::UpperApproximation,
            };
            let companion = match &args.lower {
                Some(lower) => Some(load_set(lower, &p)?),
                None => None,
            };
            Some(check_invariance(&set, role, &p, &swapped, companion.as_deref())?)
        }
        None => None,
    };

    let passed = probe.consistent
        && agreement.agreement_fraction == 1.0
        && shell_report.as_ref().map_or(true, ValidationReport::passed);
    write_json(
        dir,
        "invariance.json",
        &InvarianceReport {
            problem: p.name(),
            objective: index,
            replacement: expr_text.trim().to_string(),
            trials: args.trials,
            order_probe: &probe,
            dominance: &agreement,
            shell: shell_report.as_ref(),
            passed,
        },
    )?;
    println!(
        "invariance {}: order agreement {}/{}, verdict agreement {}/{}, {}",
        p.name(),
        probe.compared - probe.disagreements,
        probe.compared,
        agreement.agreements,
        agreement.compared,
        if passed { "PASS" } else { "FAIL" }
    );
    Ok(if passed { Outcome::Clean } else { Outcome::ValidationFailed })
}

#[derive(Serialize)]
struct BenchReport {
    timing: GeudTiming,
    /// Published reference ratio for the same protocol; informational.
    reference_speedup: f64,
}

fn cmd_bench(args: BenchArgs, dir: &Path) -> Result<Outcome> {
    let timing = geud_timing(args.vector_len, args.alpha, args.calls, args.seed)?;
    println!(
        "bench: power mean {:.1} ns/call, linear {:.1} ns/call, speedup x{:.1} \
         (informational; reference x23)",
        timing.power_ns_per_call, timing.linear_ns_per_call, timing.speedup
    );
    write_json(
        dir,
        "bench.json",
        &BenchReport {
            timing,
            reference_speedup: 23.0,
        },
    )?;
    Ok(Outcome::Clean)
}
