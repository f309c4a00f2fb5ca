//! `znseq`: orderings of subsets of `Z_n \ {0}` with distinct partial sums.
//!
//! Exit status: 0 on success / all checks passing, 1 on a domain failure
//! (no ordering found, a bound violated, invalid certificates), 2 on usage
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use znseq::counting::{
    bad_subset_bound_check, max_sum_probability, nk_closed_form, nk_star_pair, sum_count_table,
    BoundCheck, BoundCheckReport, PrimeModulus,
};
use znseq::harness::{
    sweep, sweep_resumable, verify_certificates, SweepConfig, SweepProgress, SweepReport,
    TRIES_BUCKETS,
};
use znseq::solvers::{
    constructive_small_traced, exhaustive_sequencing_budgeted, greedy_prefix, random_sequencing,
    SolveMethod, SolveOutcome, SolverError, DEFAULT_NODE_BUDGET,
};
use znseq::zn::{Modulus, Subset, ValidationMode};

#[derive(Parser)]
#[command(
    name = "znseq",
    version,
    about = "Sequencing solvers, subset-sum counting, and sweep verification over Z_n"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find an ordering of a subset whose partial sums are distinct
    Order(OrderArgs),
    /// Verify every subset of Z_n \ {0} and aggregate retry statistics
    Sweep(SweepArgs),
    /// Re-validate a certificate file
    Verify(VerifyArgs),
    /// Subset-sum count table and closed forms over a prime field
    Count(CountArgs),
    /// Check the 2/n sum-probability and k(k-1)/n bad-subset bounds
    BoundCheck(BoundCheckArgs),
    /// Print retry histograms from a sweep report file
    Stats(StatsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    /// Constructive for k <= 6, then random, then exhaustive
    Auto,
    Constructive,
    Exhaustive,
    Random,
    Greedy,
}

fn parse_mode(s: &str) -> Result<ValidationMode, String> {
    s.parse()
}

#[derive(Args)]
struct OrderArgs {
    /// Ring size n (at least 2)
    #[arg(long)]
    n: u64,
    /// Comma-separated nonzero residues, e.g. 1,6,3
    #[arg(long, value_delimiter = ',', required = true)]
    set: Vec<u64>,
    /// distinct: all partial sums distinct; nonzero: distinct and nonzero
    #[arg(long, default_value = "distinct", value_parser = parse_mode)]
    mode: ValidationMode,
    #[arg(long, value_enum, default_value_t = Strategy::Auto)]
    strategy: Strategy,
    /// Seed for the random strategy
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Permutations the random strategy may draw
    #[arg(long, default_value_t = 500_000)]
    max_tries: u64,
    /// Search nodes the exhaustive strategy may expand
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// Ring size n (2..=64)
    #[arg(long)]
    n: u64,
    #[arg(long, default_value = "distinct", value_parser = parse_mode)]
    mode: ValidationMode,
    /// Smallest subset size to examine
    #[arg(long)]
    k_min: Option<usize>,
    /// Largest subset size to examine
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 500_000)]
    max_tries: u64,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    /// Parallel workers over contiguous rank ranges
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write one certificate line per solved subset
    #[arg(long)]
    certificates: Option<PathBuf>,
    /// Persist progress here; rerunning resumes after the last epoch
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Process at most this many ranks, then checkpoint (needs --checkpoint)
    #[arg(long)]
    limit: Option<u64>,
    /// Write the report JSON here
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate file to re-validate
    file: PathBuf,
}

#[derive(Args)]
struct CountArgs {
    /// Prime modulus
    #[arg(long)]
    p: u64,
    /// Subset size, 1..=p-1
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct BoundCheckArgs {
    /// Ring size n; taken from the report when --report is given
    #[arg(long)]
    n: Option<u64>,
    /// Check the sum-probability bound for this subset size only
    #[arg(long)]
    l: Option<usize>,
    /// Check the bad-subset bound for this subset size (needs --bad-count)
    #[arg(long)]
    k: Option<usize>,
    /// Number of unorderable k-subsets measured by a sweep
    #[arg(long)]
    bad_count: Option<u64>,
    /// Check the bad-subset bound for every k using a sweep report's failures
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Sweep report JSON file
    file: PathBuf,
}

fn main() -> ExitCode {
    // die quietly on SIGPIPE like other unix filters instead of panicking
    // when stdout closes early (e.g. piped into `head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Order(args) => cmd_order(args, cli.json),
        Command::Sweep(args) => cmd_sweep(args, cli.json),
        Command::Verify(args) => cmd_verify(args, cli.json),
        Command::Count(args) => cmd_count(args, cli.json),
        Command::BoundCheck(args) => cmd_bound_check(args, cli.json),
        Command::Stats(args) => cmd_stats(args, cli.json),
    };
    ExitCode::from(code)
}

fn usage_error(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    2
}

fn cmd_order(args: OrderArgs, json: bool) -> u8 {
    let modulus = match Modulus::new(args.n) {
        Ok(m) => m,
        Err(e) => return usage_error(&e.to_string()),
    };
    let subset = match Subset::from_elements(modulus, args.set.iter().copied()) {
        Ok(s) => s,
        Err(e) => return usage_error(&e.to_string()),
    };
    let k = subset.len();

    let constructive = |s: &Subset| -> Result<SolveOutcome, SolverError> {
        constructive_small_traced(s).map(|(ordering, tries)| SolveOutcome {
            ordering: Some(ordering),
            tries,
            method: SolveMethod::Constructive,
        })
    };

    let outcome: Result<SolveOutcome, SolverError> = match args.strategy {
        Strategy::Constructive => {
            if args.mode.requires_nonzero() {
                return usage_error("the constructive strategy only targets --mode distinct");
            }
            if k > 6 {
                return usage_error("the constructive strategy handles at most 6 elements");
            }
            constructive(&subset)
        }
        Strategy::Exhaustive => {
            exhaustive_sequencing_budgeted(&subset, args.mode, args.node_budget)
        }
        Strategy::Random => Ok(random_sequencing(
            &subset,
            args.mode,
            args.seed,
            args.max_tries,
        )),
        Strategy::Greedy => {
            if args.mode.requires_nonzero() {
                return usage_error("the greedy strategy only targets --mode distinct");
            }
            let result = greedy_prefix(&subset);
            let ordering = if result.ordering.len() == k {
                Some(result.ordering)
            } else {
                eprintln!(
                    "greedy ordered only {} of {} elements: {}",
                    result.ordering.len(),
                    k,
                    result.ordering
                );
                None
            };
            Ok(SolveOutcome {
                ordering,
                tries: 1,
                method: SolveMethod::Greedy,
            })
        }
        Strategy::Auto => {
            // same cascade as the sweep harness
            if k <= 6 {
                if args.mode.requires_nonzero() {
                    exhaustive_sequencing_budgeted(&subset, args.mode, args.node_budget)
                } else {
                    constructive(&subset)
                }
            } else {
                let randomized = random_sequencing(&subset, args.mode, args.seed, args.max_tries);
                if randomized.ordering.is_some() {
                    Ok(randomized)
                } else {
                    exhaustive_sequencing_budgeted(&subset, args.mode, args.node_budget)
                }
            }
        }
    };

    match outcome {
        Ok(SolveOutcome {
            ordering: Some(ordering),
            tries,
            method,
        }) => {
            let sums = ordering.partial_sums();
            if json {
                println!(
                    "{}",
                    json!({
                        "n": args.n,
                        "mode": args.mode.as_str(),
                        "set": subset.elements(),
                        "found": true,
                        "ordering": ordering.sequence(),
                        "sums": sums.sums(),
                        "method": method.as_str(),
                        "tries": tries,
                    })
                );
            } else {
                println!("ordering: {ordering}");
                println!("sums:     {sums}");
                println!("method:   {method}");
                println!("tries:    {tries}");
            }
            0
        }
        Ok(SolveOutcome { tries, .. }) => {
            if json {
                println!(
                    "{}",
                    json!({
                        "n": args.n,
                        "mode": args.mode.as_str(),
                        "set": subset.elements(),
                        "found": false,
                        "tries": tries,
                    })
                );
            } else {
                eprintln!("no valid ordering found (tries: {tries})");
            }
            1
        }
        Err(e) => {
            if json {
                println!(
                    "{}",
                    json!({
                        "n": args.n,
                        "mode": args.mode.as_str(),
                        "set": subset.elements(),
                        "found": false,
                        "error": e.to_string(),
                    })
                );
            } else {
                eprintln!("solver gave up: {e}");
            }
            1
        }
    }
}

fn cmd_sweep(args: SweepArgs, json: bool) -> u8 {
    let mut config = SweepConfig::new(args.n, args.mode);
    config.seed = args.seed;
    config.max_tries = args.max_tries;
    config.node_budget = args.node_budget;
    config.worker_count = args.workers;
    config.certificate_path = args.certificates.clone();
    if args.k_min.is_some() || args.k_max.is_some() {
        let lo = args.k_min.unwrap_or(1);
        let hi = args.k_max.unwrap_or((args.n.max(2) - 1) as usize);
        config.k_range = Some((lo, hi));
    }
    if let Err(e) = config.validate() {
        return usage_error(&e.to_string());
    }
    if args.limit.is_some() && args.checkpoint.is_none() {
        return usage_error("--limit requires --checkpoint");
    }

    let report = match &args.checkpoint {
        Some(ckpt) => match sweep_resumable(&config, ckpt, args.limit) {
            Ok(SweepProgress::Complete(report)) => report,
            Ok(SweepProgress::Checkpointed { next_rank }) => {
                if json {
                    println!("{}", json!({"checkpointed": true, "next_rank": next_rank}));
                } else {
                    println!("checkpointed at rank {next_rank}; rerun to resume");
                }
                return 0;
            }
            Err(e) => {
                eprintln!("sweep failed: {e}");
                return 1;
            }
        },
        None => match sweep(&config) {
            Ok(report) => report,
            Err(e) => {
                eprintln!("sweep failed: {e}");
                return 1;
            }
        },
    };

    if let Some(path) = &args.report {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("cannot write report: {e}");
            return 1;
        }
    }
    if json {
        println!("{}", report.to_json());
    } else {
        print_report_summary(&report);
    }
    u8::from(!report.failures.is_empty())
}

fn print_report_summary(report: &SweepReport) {
    println!(
        "n={} mode={} seed={} total={} solved={} exempt={} failures={} duration_ms={}",
        report.n,
        report.mode,
        report.seed,
        report.total,
        report.solved,
        report.exempt,
        report.failures.len(),
        report.duration_ms
    );
    for stats in &report.histogram {
        println!(
            "k={}: examined={} solved={} exempt={} failed={} max_tries={}",
            stats.k, stats.examined, stats.solved, stats.exempt, stats.failed, stats.max_tries
        );
    }
    for failure in &report.failures {
        println!("FAILED: set={:?} reason={:?}", failure.set, failure.reason);
    }
    println!("digest={}", report.digest);
}

fn cmd_verify(args: VerifyArgs, json: bool) -> u8 {
    let report = match verify_certificates(&args.file) {
        Ok(report) => report,
        Err(e) => return usage_error(&format!("cannot read {}: {e}", args.file.display())),
    };
    if json {
        let invalid: Vec<_> = report
            .invalid
            .iter()
            .map(|r| json!({"line": r.line, "reason": r.reason}))
            .collect();
        println!(
            "{}",
            json!({
                "records": report.records,
                "invalid": invalid,
                "valid": report.all_valid(),
            })
        );
    } else {
        println!("records: {}", report.records);
        for bad in &report.invalid {
            println!("line {}: {}", bad.line, bad.reason);
        }
        println!(
            "result: {}",
            if report.all_valid() {
                "all valid"
            } else {
                "INVALID"
            }
        );
    }
    u8::from(!report.all_valid())
}

fn cmd_count(args: CountArgs, json: bool) -> u8 {
    let prime = match PrimeModulus::new(args.p) {
        Ok(p) => p,
        Err(e) => return usage_error(&e.to_string()),
    };
    let closed = match nk_closed_form(prime, args.k) {
        Ok(v) => v,
        Err(e) => return usage_error(&e.to_string()),
    };
    let (star_zero, star_nonzero) =
        nk_star_pair(prime, args.k).expect("same domain as the closed form");

    let modulus = prime.modulus();
    let full = sum_count_table(modulus, args.k, true);
    let star = sum_count_table(modulus, args.k, false);
    let oracle_full_flat = full.counts().iter().all(|c| c == full.count(0));
    let oracle_star_flat = (1..args.p).all(|alpha| star.count(alpha) == star.count(1));
    let agreement = oracle_full_flat
        && oracle_star_flat
        && full.count(0) == &closed
        && star.count(0) == &star_zero
        && star.count(1) == &star_nonzero;

    if json {
        println!(
            "{}",
            json!({
                "p": args.p,
                "k": args.k,
                "n_k": closed.to_string(),
                "n_k_star_zero": star_zero.to_string(),
                "n_k_star_nonzero": star_nonzero.to_string(),
                "oracle_n_k": full.count(0).to_string(),
                "oracle_star_zero": star.count(0).to_string(),
                "oracle_star_nonzero": star.count(1).to_string(),
                "agreement": agreement,
            })
        );
    } else {
        println!("p={} k={}", args.p, args.k);
        println!(
            "N_k(alpha)      closed form: {closed:>12}  brute force: {}",
            full.count(0)
        );
        println!(
            "N_k*(0)         closed form: {star_zero:>12}  brute force: {}",
            star.count(0)
        );
        println!(
            "N_k*(alpha!=0)  closed form: {star_nonzero:>12}  brute force: {}",
            star.count(1)
        );
        println!("agreement: {}", if agreement { "OK" } else { "MISMATCH" });
    }
    u8::from(!agreement)
}

fn bound_report_json(report: &BoundCheckReport) -> serde_json::Value {
    let mut value = json!({
        "n": report.n,
        "max_observed": report.max_observed.to_string(),
        "bound": report.bound.to_string(),
        "pass": report.pass,
    });
    let obj = value.as_object_mut().expect("object literal");
    match &report.check {
        BoundCheck::SumProbability { l } => {
            obj.insert("check".into(), json!("sum_probability"));
            obj.insert("l".into(), json!(l));
        }
        BoundCheck::BadSubsetFraction { k, bad_count } => {
            obj.insert("check".into(), json!("bad_subset_fraction"));
            obj.insert("k".into(), json!(k));
            obj.insert("bad_count".into(), json!(bad_count));
        }
    }
    value
}

fn cmd_bound_check(args: BoundCheckArgs, json: bool) -> u8 {
    let mut reports: Vec<BoundCheckReport> = Vec::new();

    if let Some(path) = &args.report {
        let raw = match std::fs::read_to_string(path) {
            Ok(raw) => raw,
            Err(e) => return usage_error(&format!("cannot read {}: {e}", path.display())),
        };
        let sweep_report = match SweepReport::from_json(&raw) {
            Ok(r) => r,
            Err(e) => return usage_error(&format!("malformed report: {e}")),
        };
        let modulus = match Modulus::new(sweep_report.n) {
            Ok(m) => m,
            Err(e) => return usage_error(&e.to_string()),
        };
        for k in 1..sweep_report.n as usize {
            let bad = sweep_report.failure_count_for_k(k);
            reports.push(bad_subset_bound_check(modulus, k, bad));
        }
    } else {
        let n = match args.n {
            Some(n) => n,
            None => return usage_error("--n is required unless --report is given"),
        };
        let modulus = match Modulus::new(n) {
            Ok(m) => m,
            Err(e) => return usage_error(&e.to_string()),
        };
        match (args.l, args.k, args.bad_count) {
            (Some(l), None, None) => match max_sum_probability(modulus, l) {
                Ok(report) => reports.push(report),
                Err(e) => return usage_error(&e.to_string()),
            },
            (None, Some(k), Some(bad)) => reports.push(bad_subset_bound_check(modulus, k, bad)),
            (None, Some(_), None) => return usage_error("--k needs --bad-count"),
            (None, None, Some(_)) => return usage_error("--bad-count needs --k"),
            (None, None, None) => {
                // all valid l for this n
                for l in 1..=(n.max(3) - 2) as usize {
                    match max_sum_probability(modulus, l) {
                        Ok(report) => reports.push(report),
                        Err(e) => return usage_error(&e.to_string()),
                    }
                }
            }
            _ => return usage_error("--l cannot be combined with --k/--bad-count"),
        }
    }

    let all_pass = reports.iter().all(|r| r.pass);
    if json {
        let items: Vec<_> = reports.iter().map(bound_report_json).collect();
        println!("{}", json!({"checks": items, "pass": all_pass}));
    } else {
        for report in &reports {
            println!("{report}");
        }
        println!("overall: {}", if all_pass { "PASS" } else { "FAIL" });
    }
    u8::from(!all_pass)
}

fn cmd_stats(args: StatsArgs, json: bool) -> u8 {
    let raw = match std::fs::read_to_string(&args.file) {
        Ok(raw) => raw,
        Err(e) => return usage_error(&format!("cannot read {}: {e}", args.file.display())),
    };
    let report = match SweepReport::from_json(&raw) {
        Ok(r) => r,
        Err(e) => return usage_error(&format!("malformed report: {e}")),
    };
    let digest_ok = report.compute_digest() == report.digest;
    if json {
        println!(
            "{}",
            json!({
                "n": report.n,
                "mode": report.mode.as_str(),
                "seed": report.seed,
                "total": report.total,
                "solved": report.solved,
                "exempt": report.exempt,
                "failures": report.failures.len(),
                "digest_ok": digest_ok,
                "histogram": serde_json::to_value(&report.histogram).expect("histogram serializes"),
            })
        );
    } else {
        print_report_summary(&report);
        println!(
            "digest check: {}",
            if digest_ok { "ok" } else { "MISMATCH" }
        );
        let labels: Vec<&str> = TRIES_BUCKETS.iter().map(|&(_, label)| label).collect();
        println!("tries buckets: {}", labels.join(" | "));
        for stats in &report.histogram {
            let cells: Vec<String> = stats.tries_buckets.iter().map(|c| c.to_string()).collect();
            println!("k={:>2}: {}", stats.k, cells.join(" | "));
        }
    }
    u8::from(!digest_ok)
}
