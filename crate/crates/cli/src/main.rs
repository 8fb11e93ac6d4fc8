//! Command-line surface for the sepdyn toolkit.
//!
//! Exit codes: 0 on success, 2 on user or validation errors (bad flags,
//! missing files, schema or metric violations), 3 when a computed result
//! violates one of its own invariants or a differential check finds a
//! mismatch.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sepdyn::{
    chain_partition, chain_partition_oracle, classify, gamma_oracle, gamma_profile,
    gen_double_circle, gen_identity_space, gen_power_witness, gen_wine, quantile_etas,
    random_suite, random_system, recurrence_profile, resolve_epsilon, ChainPartition,
    ClassificationReport, DynSystem, Error, RecurrenceProfile, WineParams, DEFAULT_SPACING_RULE,
};

#[derive(Parser)]
#[command(
    name = "sepdyn",
    version,
    about = "Analyze finite metric dynamical systems: dynamical balls, expansivity verdicts, \
             chain partitions, recurrence, and example families."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an example system and write it as system JSON.
    Generate(GenerateArgs),
    /// Classify a system file and emit classification, chain, and recurrence reports.
    Analyze(AnalyzeArgs),
    /// Sweep a family parameter and emit one CSV/JSON row per member.
    Family(FamilyArgs),
    /// Build and verify a power-witness pair inside the tube family.
    WitnessPowers(WitnessArgs),
    /// Differentially test the fixed-point and union-find paths against
    /// brute-force oracles on seeded random systems.
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// One of: wine, double-circle, identity, random.
    #[arg(long)]
    family: String,
    /// Truncation level M for the wine family.
    #[arg(long)]
    levels: Option<u32>,
    /// Spacing rule for the wine family (only the default is accepted here).
    #[arg(long)]
    spacing: Option<String>,
    /// Add the fixed point at infinity (wine family, chordal metric).
    #[arg(long)]
    include_fixed_point: bool,
    /// Point count (identity, random) or angle count (double-circle).
    #[arg(long)]
    n: Option<usize>,
    /// Radial gap for the double circle.
    #[arg(long)]
    rho: Option<f64>,
    /// Seed for the random family.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    system: PathBuf,
    /// Ball resolution.
    #[arg(long)]
    eta: f64,
    /// Chain resolution; resolved from eta when omitted.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyArgs {
    /// One of: wine, double-circle.
    #[arg(long)]
    family: String,
    /// Inclusive parameter range, e.g. 2..10.
    #[arg(long)]
    range: String,
    #[arg(long)]
    eta: f64,
    /// Chain resolution used for the per-member classification.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Radial gap for the double-circle family.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    spacing: Option<String>,
    /// csv (default) or json.
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    m: u32,
    /// Truncation level; defaults to k*m.
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 48)]
    max_n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Resolutions per system, drawn from its distance quantiles.
    #[arg(long, default_value_t = 5)]
    etas: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    User(String),
    Invariant(String),
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::WitnessInvariant(_) | Error::InvariantViolation(_) => {
                CliError::Invariant(err.to_string())
            }
            _ => CliError::User(err.to_string()),
        }
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Family(args) => cmd_family(args),
        Command::WitnessPowers(args) => cmd_witness_powers(args),
        Command::OracleCheck(args) => cmd_oracle_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Invariant(msg)) => {
            eprintln!("invariant violation: {msg}");
            ExitCode::from(3)
        }
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::User(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

fn check_spacing(spacing: &Option<String>) -> CliResult {
    match spacing {
        Some(rule) if rule != DEFAULT_SPACING_RULE => Err(CliError::User(format!(
            "only the default spacing rule \"{DEFAULT_SPACING_RULE}\" is available on the \
             command line; custom rules are a library feature"
        ))),
        _ => Ok(()),
    }
}

fn require<T>(value: Option<T>, flag: &str, context: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::User(format!("--{flag} is required for {context}")))
}

fn cmd_generate(args: GenerateArgs) -> CliResult {
    check_spacing(&args.spacing)?;
    let system = match args.family.as_str() {
        "wine" => {
            let levels = require(args.levels, "levels", "the wine family")?;
            gen_wine(&WineParams {
                max_level: levels,
                spacing: sepdyn::Spacing::Default,
                include_fixed_point: args.include_fixed_point,
            })?
        }
        "double-circle" => {
            let n = require(args.n, "n", "the double-circle family")?;
            let rho = require(args.rho, "rho", "the double-circle family")?;
            gen_double_circle(n, rho)?
        }
        "identity" => {
            let n = require(args.n, "n", "the identity family")?;
            gen_identity_space(n)?
        }
        "random" => {
            let n = require(args.n, "n", "random systems")?;
            if n == 0 {
                return Err(CliError::User("--n must be at least 1".into()));
            }
            random_system(n, args.seed.unwrap_or(1))
        }
        other => {
            return Err(CliError::User(format!(
                "unknown family \"{other}\"; expected wine, double-circle, identity, or random"
            )))
        }
    };
    write_output(&args.out, &system.to_json())
}

#[derive(Serialize)]
struct AnalyzeReport {
    eta: f64,
    epsilon: f64,
    classification: ClassificationReport,
    chains: ChainPartition,
    recurrence: RecurrenceProfile,
}

fn cmd_analyze(args: AnalyzeArgs) -> CliResult {
    if !args.eta.is_finite() || args.eta <= 0.0 {
        return Err(CliError::User(format!(
            "--eta must be positive and finite, got {}",
            args.eta
        )));
    }
    let system = DynSystem::load_path(&args.system)?;
    let epsilon = match args.epsilon {
        Some(e) => e,
        None => resolve_epsilon(system.space(), args.eta)?,
    };

    // The profile backing the verdicts must satisfy its own invariants.
    let profile = gamma_profile(&system, args.eta)?;
    profile
        .check_invariants(&system)
        .map_err(|e| CliError::Invariant(e.to_string()))?;

    let classification = classify(&system, args.eta, epsilon)?;
    let chains = chain_partition(system.space(), epsilon)?;
    let mut eps_list = vec![epsilon, args.eta];
    eps_list.sort_by(f64::total_cmp);
    eps_list.dedup();
    let recurrence = recurrence_profile(&system, &eps_list)?;

    let report = AnalyzeReport {
        eta: args.eta,
        epsilon,
        classification,
        chains,
        recurrence,
    };
    write_output(&args.out, &pretty_json(&report))
}

#[derive(Serialize)]
struct FamilyRow {
    parameter: u32,
    n_points: usize,
    max_card: usize,
    separating_at: bool,
    #[serde(rename = "min_N")]
    min_n: usize,
    runtime_ms: u128,
}

fn parse_range(range: &str) -> Result<(u32, u32), CliError> {
    let (a, b) = range
        .split_once("..")
        .ok_or_else(|| CliError::User(format!("range \"{range}\" must look like A..B")))?;
    let lo: u32 = a
        .trim()
        .parse()
        .map_err(|_| CliError::User(format!("bad range start \"{a}\"")))?;
    let hi: u32 = b
        .trim()
        .parse()
        .map_err(|_| CliError::User(format!("bad range end \"{b}\"")))?;
    if lo > hi {
        return Err(CliError::User(format!(
            "range start {lo} exceeds range end {hi}"
        )));
    }
    Ok((lo, hi))
}

fn cmd_family(args: FamilyArgs) -> CliResult {
    check_spacing(&args.spacing)?;
    let (lo, hi) = parse_range(&args.range)?;
    let mut rows = Vec::with_capacity((hi - lo + 1) as usize);
    for parameter in lo..=hi {
        let started = Instant::now();
        let system = match args.family.as_str() {
            "wine" => gen_wine(&WineParams::new(parameter))?,
            "double-circle" => {
                let rho = require(args.rho, "rho", "the double-circle family")?;
                gen_double_circle(parameter as usize, rho)?
            }
            other => {
                return Err(CliError::User(format!(
                    "unknown family \"{other}\"; expected wine or double-circle"
                )))
            }
        };
        let epsilon = match args.epsilon {
            Some(e) => e,
            None => resolve_epsilon(system.space(), args.eta)?,
        };
        let report = classify(&system, args.eta, epsilon)?;
        rows.push(FamilyRow {
            parameter,
            n_points: system.len(),
            max_card: report.min_n,
            separating_at: report.separating_at,
            min_n: report.min_n,
            runtime_ms: started.elapsed().as_millis(),
        });
    }

    let content = match args.format.as_str() {
        "csv" => {
            let mut csv =
                String::from("parameter,n_points,max_card,separating_at,min_N,runtime_ms\n");
            for row in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row.parameter,
                    row.n_points,
                    row.max_card,
                    row.separating_at,
                    row.min_n,
                    row.runtime_ms
                ));
            }
            csv
        }
        "json" => pretty_json(&rows),
        other => {
            return Err(CliError::User(format!(
                "unknown format \"{other}\"; expected csv or json"
            )))
        }
    };
    write_output(&args.out, &content)
}

#[derive(Serialize)]
struct WitnessChecks {
    period: bool,
    shift: bool,
    distinct_power_cycles: bool,
}

#[derive(Serialize)]
struct WitnessReport {
    k: u32,
    m: u32,
    level: u32,
    x_id: usize,
    y_id: usize,
    claimed_period: u64,
    claimed_shift: u64,
    sup_orbit_distance: f64,
    checks: WitnessChecks,
}

fn cmd_witness_powers(args: WitnessArgs) -> CliResult {
    check_spacing(&args.spacing)?;
    if args.k < 2 {
        return Err(CliError::User(format!(
            "--k must be at least 2, got {}",
            args.k
        )));
    }
    if args.m < 1 {
        return Err(CliError::User(format!(
            "--m must be at least 1, got {}",
            args.m
        )));
    }
    let level = args.k * args.m;
    let levels = args.levels.unwrap_or(level);
    // Verification happens inside the generator; any failed claim comes
    // back as a witness-invariant error and exits with code 3.
    let case = gen_power_witness(args.k, args.m, &WineParams::new(levels))?;
    let report = WitnessReport {
        k: case.k,
        m: case.m,
        level,
        x_id: case.x_id,
        y_id: case.y_id,
        claimed_period: case.claimed_period,
        claimed_shift: case.claimed_shift,
        sup_orbit_distance: case.sup_orbit_distance,
        checks: WitnessChecks {
            period: true,
            shift: true,
            distinct_power_cycles: true,
        },
    };
    write_output(&args.out, &pretty_json(&report))
}

#[derive(Serialize)]
struct OracleSummary {
    systems: usize,
    max_n: usize,
    seed: u64,
    etas_per_system: usize,
    gamma_comparisons: usize,
    chain_comparisons: usize,
    mismatches: usize,
}

fn cmd_oracle_check(args: OracleArgs) -> CliResult {
    if args.max_n < 2 {
        return Err(CliError::User(format!(
            "--max-n must be at least 2, got {}",
            args.max_n
        )));
    }
    let systems = random_suite(args.count, args.max_n, args.seed);
    let mut gamma_comparisons = 0usize;
    let mut chain_comparisons = 0usize;
    for (index, system) in systems.iter().enumerate() {
        for eta in quantile_etas(system.space(), args.etas) {
            let fixed = gamma_profile(system, eta)?;
            let brute = gamma_oracle(system, eta)?;
            if fixed != brute {
                eprintln!("failing system (index {index}, eta {eta}):");
                eprintln!("{}", system.to_json());
                return Err(CliError::Invariant(format!(
                    "gamma profile disagrees with oracle on system {index} at eta {eta}"
                )));
            }
            fixed
                .check_invariants(system)
                .map_err(|e| CliError::Invariant(e.to_string()))?;
            gamma_comparisons += 1;

            let uf = chain_partition(system.space(), eta)?;
            let bfs = chain_partition_oracle(system.space(), eta)?;
            if uf != bfs {
                eprintln!("failing system (index {index}, epsilon {eta}):");
                eprintln!("{}", system.to_json());
                return Err(CliError::Invariant(format!(
                    "chain partition disagrees with BFS oracle on system {index} at epsilon {eta}"
                )));
            }
            chain_comparisons += 1;
        }
    }
    let summary = OracleSummary {
        systems: args.count,
        max_n: args.max_n,
        seed: args.seed,
        etas_per_system: args.etas,
        gamma_comparisons,
        chain_comparisons,
        mismatches: 0,
    };
    write_output(&args.out, &pretty_json(&summary))
}
