//! Batch verification engine: enumerate every nonempty subset of
//! `Z_n \ {0}`, solve each with a strategy cascade, persist certificates,
//! and aggregate retry statistics.
//!
//! Subsets are enumerated by rank: rank `r` (a bitmask in
//! `1..=2^(n-1)-1`, increasing) contains element `i` iff bit `i-1` of `r` is
//! set. Each subset's random stage is seeded from `(sweep seed, rank)`, so a
//! report is bit-identical for any worker count and for checkpointed or
//! uninterrupted runs.

mod certificate;
mod report;

pub use certificate::{verify_certificates, Certificate, InvalidRecord, VerificationReport};
pub use report::{
    merge_reports, tries_bucket, Failure, FailureReason, KStats, SweepReport, TRIES_BUCKETS,
};

use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::derive_subset_seed;
use crate::solvers::{
    constructive_small_traced, exhaustive_sequencing_budgeted, random_sequencing, SolveMethod,
    SolveOutcome, SolverError, DEFAULT_NODE_BUDGET,
};
use crate::zn::{Modulus, Subset, ValidationMode};

use certificate::CertificateWriter;

/// Random-stage permutation budget per subset.
pub const DEFAULT_MAX_TRIES: u64 = 500_000;

/// Default sweep seed.
pub const DEFAULT_SWEEP_SEED: u64 = 1;

/// Ranks processed between checkpoint writes.
const CHECKPOINT_EPOCH: u64 = 8192;

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("certificate I/O failed at rank {rank}: {source}")]
    CertificateIo { rank: u64, source: io::Error },
    #[error("solver defect during sweep: {0}")]
    Solver(#[from] SolverError),
    #[error("cannot merge reports: {0}")]
    MergeMismatch(String),
    #[error("checkpoint does not match this configuration: {0}")]
    CheckpointMismatch(String),
    #[error("malformed checkpoint: {0}")]
    CheckpointCorrupt(String),
}

/// Configuration of one sweep.
///
/// The solving cascade is fixed: the bounded constructive solver for
/// `k <= 6` in distinct mode (the exhaustive oracle in nonzero mode, where
/// the constructive tree does not apply), then seeded random search with
/// `max_tries` permutations, then the exhaustive oracle with `node_budget`
/// nodes as the final word.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub n: u64,
    pub mode: ValidationMode,
    /// Inclusive subset-size bounds; `None` means all of `1..=n-1`.
    pub k_range: Option<(usize, usize)>,
    pub seed: u64,
    pub max_tries: u64,
    pub node_budget: u64,
    pub worker_count: usize,
    /// Where to persist one certificate line per solved subset.
    pub certificate_path: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(n: u64, mode: ValidationMode) -> Self {
        SweepConfig {
            n,
            mode,
            k_range: None,
            seed: DEFAULT_SWEEP_SEED,
            max_tries: DEFAULT_MAX_TRIES,
            node_budget: DEFAULT_NODE_BUDGET,
            worker_count: 1,
            certificate_path: None,
        }
    }

    fn k_bounds(&self) -> (usize, usize) {
        self.k_range.unwrap_or((1, (self.n - 1) as usize))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        Modulus::new(self.n).map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        if self.n > 64 {
            return Err(HarnessError::InvalidConfig(format!(
                "sweeps enumerate 2^(n-1)-1 subsets; n = {} is out of reach",
                self.n
            )));
        }
        let (lo, hi) = self.k_bounds();
        if lo < 1 || hi > (self.n - 1) as usize || lo > hi {
            return Err(HarnessError::InvalidConfig(format!(
                "k range {lo}..={hi} must lie within 1..={}",
                self.n - 1
            )));
        }
        if self.max_tries < 1 {
            return Err(HarnessError::InvalidConfig(
                "max_tries must be at least 1".into(),
            ));
        }
        if self.worker_count < 1 {
            return Err(HarnessError::InvalidConfig(
                "worker_count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Largest rank of the subset universe for modulus `n`.
pub fn universe_max_rank(n: u64) -> u64 {
    (1u64 << (n - 1)) - 1
}

/// The subset encoded by `rank` (bit `i-1` set means element `i` present).
pub fn subset_from_rank(modulus: Modulus, rank: u64) -> Subset {
    let n = modulus.get();
    debug_assert!(rank >= 1 && rank <= universe_max_rank(n));
    let elements: Vec<u64> = (1..n).filter(|i| rank >> (i - 1) & 1 == 1).collect();
    Subset::new(modulus, elements).expect("mask bits map to valid ascending elements")
}

/// Result of a resumable sweep invocation.
#[derive(Debug)]
pub enum SweepProgress {
    Complete(SweepReport),
    /// The rank limit stopped the run; state is saved in the checkpoint.
    Checkpointed {
        next_rank: u64,
    },
}

/// Sweeps the whole configured universe.
pub fn sweep(config: &SweepConfig) -> Result<SweepReport, HarnessError> {
    sweep_rank_range(config, 1, universe_max_rank(config.n))
}

/// Sweeps the ranks `lo..=hi` (clamped to the universe; an inverted range
/// yields an empty report, the merge identity).
pub fn sweep_rank_range(
    config: &SweepConfig,
    lo: u64,
    hi: u64,
) -> Result<SweepReport, HarnessError> {
    config.validate()?;
    let start = Instant::now();
    let lo = lo.max(1);
    let hi = hi.min(universe_max_rank(config.n));
    let mut writer = open_writer(config, None)?;
    let mut acc = empty_report(config);
    let mut next = lo;
    while next <= hi {
        let epoch_hi = (next + CHECKPOINT_EPOCH - 1).min(hi);
        let tally = run_partitioned(config, next, epoch_hi)?;
        write_certificates(&mut writer, &tally.certs)?;
        let epoch = tally.into_report(config, Some((next, epoch_hi)));
        acc = merge_reports(&acc, &epoch)?;
        next = epoch_hi + 1;
    }
    flush_writer(&mut writer)?;
    acc.duration_ms = start.elapsed().as_millis() as u64;
    Ok(acc)
}

/// Sweeps with persisted progress. `rank_limit` bounds how many ranks this
/// invocation processes (for scheduling long runs in slices); `None` runs to
/// completion. A later call with the same configuration and checkpoint file
/// resumes after the last completed epoch and produces a report identical to
/// an uninterrupted run. The checkpoint file is removed on completion.
pub fn sweep_resumable(
    config: &SweepConfig,
    checkpoint: &Path,
    rank_limit: Option<u64>,
) -> Result<SweepProgress, HarnessError> {
    config.validate()?;
    let start = Instant::now();
    let max = universe_max_rank(config.n);
    let (mut acc, mut next, cert_bytes) = match load_checkpoint(config, checkpoint)? {
        Some(state) => state,
        None => (empty_report(config), 1, 0),
    };
    let prior_duration = acc.duration_ms;
    let resuming = next > 1;
    let mut writer = open_writer(config, if resuming { Some(cert_bytes) } else { None })?;
    let mut remaining = rank_limit.unwrap_or(u64::MAX);
    while next <= max && remaining > 0 {
        let step = CHECKPOINT_EPOCH.min(remaining);
        let epoch_hi = (next + step - 1).min(max);
        let tally = run_partitioned(config, next, epoch_hi)?;
        write_certificates(&mut writer, &tally.certs)?;
        let bytes = flush_writer(&mut writer)?;
        let epoch = tally.into_report(config, Some((next, epoch_hi)));
        acc = merge_reports(&acc, &epoch)?;
        remaining = remaining.saturating_sub(epoch_hi - next + 1);
        next = epoch_hi + 1;
        acc.duration_ms = prior_duration + start.elapsed().as_millis() as u64;
        save_checkpoint(config, checkpoint, &acc, next, bytes)?;
    }
    if next > max {
        let _ = std::fs::remove_file(checkpoint);
        Ok(SweepProgress::Complete(acc))
    } else {
        Ok(SweepProgress::Checkpointed { next_rank: next })
    }
}

fn empty_report(config: &SweepConfig) -> SweepReport {
    let mut report = SweepReport {
        n: config.n,
        mode: config.mode,
        seed: config.seed,
        total: 0,
        solved: 0,
        exempt: 0,
        failures: Vec::new(),
        histogram: Vec::new(),
        duration_ms: 0,
        digest: String::new(),
        spans: Vec::new(),
    };
    report.finalize();
    report
}

fn open_writer(
    config: &SweepConfig,
    resume_bytes: Option<u64>,
) -> Result<Option<CertificateWriter>, HarnessError> {
    match config.certificate_path.as_deref() {
        Some(path) => Ok(Some(CertificateWriter::open(path, resume_bytes)?)),
        None => Ok(None),
    }
}

fn write_certificates(
    writer: &mut Option<CertificateWriter>,
    certs: &[(u64, Certificate)],
) -> Result<(), HarnessError> {
    if let Some(writer) = writer {
        for (rank, cert) in certs {
            writer
                .write(cert)
                .map_err(|source| HarnessError::CertificateIo {
                    rank: *rank,
                    source,
                })?;
        }
    }
    Ok(())
}

fn flush_writer(writer: &mut Option<CertificateWriter>) -> Result<u64, HarnessError> {
    match writer {
        Some(writer) => Ok(writer.flush()?),
        None => Ok(0),
    }
}

/// Per-range tallies; workers produce these and the engine folds them in
/// rank order.
struct Tally {
    total: u64,
    solved: u64,
    exempt: u64,
    failures: Vec<Failure>,
    per_k: std::collections::BTreeMap<u64, KStats>,
    certs: Vec<(u64, Certificate)>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            total: 0,
            solved: 0,
            exempt: 0,
            failures: Vec::new(),
            per_k: std::collections::BTreeMap::new(),
            certs: Vec::new(),
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.total += other.total;
        self.solved += other.solved;
        self.exempt += other.exempt;
        self.failures.extend(other.failures);
        for (k, stats) in other.per_k {
            match self.per_k.get_mut(&k) {
                Some(mine) => {
                    mine.examined += stats.examined;
                    mine.solved += stats.solved;
                    mine.exempt += stats.exempt;
                    mine.failed += stats.failed;
                    mine.max_tries = mine.max_tries.max(stats.max_tries);
                    for (into, from) in mine.tries_buckets.iter_mut().zip(stats.tries_buckets) {
                        *into += from;
                    }
                }
                None => {
                    self.per_k.insert(k, stats);
                }
            }
        }
        self.certs.extend(other.certs);
    }

    fn into_report(self, config: &SweepConfig, span: Option<(u64, u64)>) -> SweepReport {
        let mut report = SweepReport {
            n: config.n,
            mode: config.mode,
            seed: config.seed,
            total: self.total,
            solved: self.solved,
            exempt: self.exempt,
            failures: self.failures,
            histogram: self.per_k.into_values().collect(),
            duration_ms: 0,
            digest: String::new(),
            spans: span.into_iter().collect(),
        };
        report.finalize();
        report
    }

    fn record(&mut self, config: &SweepConfig, rank: u64, subset: &Subset, outcome: RankOutcome) {
        let k = subset.len() as u64;
        let stats = self.per_k.entry(k).or_insert_with(|| KStats::new(k));
        stats.examined += 1;
        self.total += 1;
        match outcome {
            RankOutcome::Exempt => {
                stats.exempt += 1;
                self.exempt += 1;
            }
            RankOutcome::Solved(solve) => {
                let ordering = solve.ordering.expect("solved outcomes carry an ordering");
                // soundness gate on every solver return
                assert!(
                    ordering.is_sequencing(config.mode),
                    "solver returned an invalid ordering {ordering} mod {}",
                    config.n
                );
                stats.solved += 1;
                stats.max_tries = stats.max_tries.max(solve.tries);
                stats.tries_buckets[tries_bucket(solve.tries)] += 1;
                self.solved += 1;
                if config.certificate_path.is_some() {
                    self.certs.push((
                        rank,
                        Certificate {
                            n: config.n,
                            mode: config.mode,
                            set: subset.elements().to_vec(),
                            ordering: ordering.sequence().to_vec(),
                            method: solve.method,
                            tries: solve.tries,
                        },
                    ));
                }
            }
            RankOutcome::Failed(reason) => {
                stats.failed += 1;
                self.failures.push(Failure {
                    set: subset.elements().to_vec(),
                    reason,
                    rank,
                });
            }
        }
    }
}

enum RankOutcome {
    Solved(SolveOutcome),
    Exempt,
    Failed(FailureReason),
}

fn run_partitioned(config: &SweepConfig, lo: u64, hi: u64) -> Result<Tally, HarnessError> {
    if lo > hi {
        return Ok(Tally::new());
    }
    let count = hi - lo + 1;
    let workers = (config.worker_count as u64).min(count).max(1);
    if workers == 1 {
        return run_range(config, lo, hi);
    }
    let chunk = count.div_ceil(workers);
    let ranges: Vec<(u64, u64)> = (0..workers)
        .filter_map(|w| {
            let clo = lo + w * chunk;
            (clo <= hi).then(|| (clo, (clo + chunk - 1).min(hi)))
        })
        .collect();
    let results: Vec<Result<Tally, HarnessError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(clo, chi)| scope.spawn(move || run_range(config, clo, chi)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    let mut acc = Tally::new();
    for result in results {
        acc.absorb(result?);
    }
    Ok(acc)
}

fn run_range(config: &SweepConfig, lo: u64, hi: u64) -> Result<Tally, HarnessError> {
    let modulus = Modulus::new(config.n).expect("validated configuration");
    let (k_lo, k_hi) = config.k_bounds();
    let mut tally = Tally::new();
    for rank in lo..=hi {
        let k = rank.count_ones() as usize;
        if k < k_lo || k > k_hi {
            continue;
        }
        let subset = subset_from_rank(modulus, rank);
        let outcome = solve_rank(config, &subset, rank)?;
        tally.record(config, rank, &subset, outcome);
    }
    Ok(tally)
}

fn solve_rank(
    config: &SweepConfig,
    subset: &Subset,
    rank: u64,
) -> Result<RankOutcome, HarnessError> {
    if config.mode.requires_nonzero() && subset.sum() == 0 {
        // the strong condition makes no claim about zero-sum subsets
        return Ok(RankOutcome::Exempt);
    }
    let k = subset.len();
    if k <= 6 {
        if config.mode == ValidationMode::DistinctOnly {
            let (ordering, tries) = constructive_small_traced(subset)?;
            return Ok(RankOutcome::Solved(SolveOutcome {
                ordering: Some(ordering),
                tries,
                method: SolveMethod::Constructive,
            }));
        }
        // nonzero mode: the constructive tree only targets distinct sums,
        // and k! is tiny here, so go straight to the oracle
        return exhaustive_stage(config, subset);
    }
    let seed = derive_subset_seed(config.seed, rank);
    let randomized = random_sequencing(subset, config.mode, seed, config.max_tries);
    if randomized.ordering.is_some() {
        return Ok(RankOutcome::Solved(randomized));
    }
    exhaustive_stage(config, subset)
}

fn exhaustive_stage(config: &SweepConfig, subset: &Subset) -> Result<RankOutcome, HarnessError> {
    match exhaustive_sequencing_budgeted(subset, config.mode, config.node_budget) {
        Ok(outcome) if outcome.ordering.is_some() => Ok(RankOutcome::Solved(outcome)),
        Ok(_) => Ok(RankOutcome::Failed(FailureReason::NoneExists)),
        Err(SolverError::BudgetExhausted { .. }) => {
            Ok(RankOutcome::Failed(FailureReason::BudgetExhausted))
        }
        Err(defect) => Err(defect.into()),
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    version: u32,
    n: u64,
    mode: ValidationMode,
    seed: u64,
    k_lo: u64,
    k_hi: u64,
    max_tries: u64,
    node_budget: u64,
    next_rank: u64,
    cert_bytes: u64,
    spans: Vec<(u64, u64)>,
    report: SweepReport,
}

fn load_checkpoint(
    config: &SweepConfig,
    path: &Path,
) -> Result<Option<(SweepReport, u64, u64)>, HarnessError> {
    if !path.exists() {
        return Ok(None);
    }
    let raw = std::fs::read_to_string(path)?;
    let file: CheckpointFile =
        serde_json::from_str(&raw).map_err(|e| HarnessError::CheckpointCorrupt(e.to_string()))?;
    if file.version != CHECKPOINT_VERSION {
        return Err(HarnessError::CheckpointCorrupt(format!(
            "unsupported checkpoint version {}",
            file.version
        )));
    }
    let (k_lo, k_hi) = config.k_bounds();
    let matches = file.n == config.n
        && file.mode == config.mode
        && file.seed == config.seed
        && file.k_lo == k_lo as u64
        && file.k_hi == k_hi as u64
        && file.max_tries == config.max_tries
        && file.node_budget == config.node_budget;
    if !matches {
        return Err(HarnessError::CheckpointMismatch(format!(
            "checkpoint was written for n={} mode={} seed={} k={}..={} max_tries={} node_budget={}",
            file.n, file.mode, file.seed, file.k_lo, file.k_hi, file.max_tries, file.node_budget
        )));
    }
    let mut report = file.report;
    report.spans = file.spans;
    Ok(Some((report, file.next_rank, file.cert_bytes)))
}

fn save_checkpoint(
    config: &SweepConfig,
    path: &Path,
    report: &SweepReport,
    next_rank: u64,
    cert_bytes: u64,
) -> Result<(), HarnessError> {
    let (k_lo, k_hi) = config.k_bounds();
    let file = CheckpointFile {
        version: CHECKPOINT_VERSION,
        n: config.n,
        mode: config.mode,
        seed: config.seed,
        k_lo: k_lo as u64,
        k_hi: k_hi as u64,
        max_tries: config.max_tries,
        node_budget: config.node_budget,
        next_rank,
        cert_bytes,
        spans: report.spans.clone(),
        report: report.clone(),
    };
    let tmp = path.with_extension("tmp");
    std::fs::write(
        &tmp,
        serde_json::to_string(&file).expect("checkpoint serializes"),
    )?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{binomial, sum_count_table};

    #[test]
    fn sweep_n3_by_hand() {
        let report = sweep(&SweepConfig::new(3, ValidationMode::DistinctOnly)).unwrap();
        assert_eq!(report.total, 3); // {1}, {2}, {1,2}
        assert_eq!(report.solved, 3);
        assert!(report.failures.is_empty());
        assert_eq!(report.exempt, 0);
    }

    #[test]
    fn sweep_n8_all_solved() {
        let report = sweep(&SweepConfig::new(8, ValidationMode::DistinctOnly)).unwrap();
        assert_eq!(report.total, 127);
        assert_eq!(report.solved, 127);
        assert!(report.failures.is_empty());
        // completeness: per-k examined counts are binomials
        for stats in &report.histogram {
            assert_eq!(u64::try_from(binomial(7, stats.k)).unwrap(), stats.examined);
        }
        let examined: u64 = report.histogram.iter().map(|h| h.examined).sum();
        assert_eq!(examined, report.total);
    }

    #[test]
    fn k_range_limits_the_universe() {
        let mut config = SweepConfig::new(10, ValidationMode::DistinctOnly);
        config.k_range = Some((2, 4));
        let report = sweep(&config).unwrap();
        let expected: u64 = (2..=4u64)
            .map(|k| u64::try_from(binomial(9, k)).unwrap())
            .sum();
        assert_eq!(report.total, expected);
        assert_eq!(report.solved, expected);
    }

    #[test]
    fn nonzero_mode_exempts_exactly_zero_sum_subsets() {
        let n = 10u64;
        let report = sweep(&SweepConfig::new(n, ValidationMode::DistinctNonzero)).unwrap();
        let modulus = Modulus::new(n).unwrap();
        let mut expected_exempt = 0u64;
        for k in 1..n as usize {
            let zero_sum = sum_count_table(modulus, k, false).count(0).clone();
            expected_exempt += u64::try_from(zero_sum).unwrap();
        }
        assert_eq!(report.exempt, expected_exempt);
        assert_eq!(
            report.total,
            report.solved + report.exempt + report.failures.len() as u64
        );
        assert!(report.failures.is_empty());
    }

    #[test]
    fn worker_count_does_not_change_the_report() {
        let mut config = SweepConfig::new(10, ValidationMode::DistinctOnly);
        let one = sweep(&config).unwrap();
        config.worker_count = 4;
        let four = sweep(&config).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.digest, four.digest);
    }

    #[test]
    fn split_sweeps_merge_to_the_full_report() {
        let config = SweepConfig::new(8, ValidationMode::DistinctOnly);
        let full = sweep(&config).unwrap();
        let max = universe_max_rank(8);
        let first = sweep_rank_range(&config, 1, max / 2).unwrap();
        let second = sweep_rank_range(&config, max / 2 + 1, max).unwrap();
        let merged = merge_reports(&first, &second).unwrap();
        assert_eq!(merged, full);
        let commuted = merge_reports(&second, &first).unwrap();
        assert_eq!(commuted, full);
    }

    #[test]
    fn merged_halves_reject_overlap() {
        let config = SweepConfig::new(6, ValidationMode::DistinctOnly);
        let a = sweep_rank_range(&config, 1, 20).unwrap();
        let b = sweep_rank_range(&config, 20, 31).unwrap();
        assert!(matches!(
            merge_reports(&a, &b),
            Err(HarnessError::MergeMismatch(_))
        ));
    }

    #[test]
    fn certificates_round_trip_through_verify() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("certs.txt");
        let mut config = SweepConfig::new(8, ValidationMode::DistinctOnly);
        config.certificate_path = Some(path.clone());
        let report = sweep(&config).unwrap();
        let verification = verify_certificates(&path).unwrap();
        assert_eq!(verification.records, report.solved);
        assert!(verification.all_valid());
    }

    #[test]
    fn resumable_sweep_matches_uninterrupted() {
        let dir = tempfile::tempdir().unwrap();
        let ckpt = dir.path().join("sweep.ckpt");
        let cert_resumed = dir.path().join("resumed.txt");
        let cert_direct = dir.path().join("direct.txt");

        let mut config = SweepConfig::new(10, ValidationMode::DistinctOnly);
        config.certificate_path = Some(cert_resumed.clone());
        // 511 ranks total; stop after 100
        match sweep_resumable(&config, &ckpt, Some(100)).unwrap() {
            SweepProgress::Checkpointed { next_rank } => assert_eq!(next_rank, 101),
            SweepProgress::Complete(_) => panic!("should have checkpointed"),
        }
        assert!(ckpt.exists());
        let resumed = match sweep_resumable(&config, &ckpt, None).unwrap() {
            SweepProgress::Complete(report) => report,
            SweepProgress::Checkpointed { .. } => panic!("should have completed"),
        };
        assert!(!ckpt.exists());

        config.certificate_path = Some(cert_direct.clone());
        let direct = sweep(&config).unwrap();
        assert_eq!(resumed, direct);
        assert_eq!(resumed.digest, direct.digest);
        assert_eq!(
            std::fs::read(&cert_resumed).unwrap(),
            std::fs::read(&cert_direct).unwrap()
        );
    }

    #[test]
    fn checkpoint_rejects_other_configs() {
        let dir = tempfile::tempdir().unwrap();
        let ckpt = dir.path().join("sweep.ckpt");
        let config = SweepConfig::new(10, ValidationMode::DistinctOnly);
        match sweep_resumable(&config, &ckpt, Some(50)).unwrap() {
            SweepProgress::Checkpointed { .. } => {}
            SweepProgress::Complete(_) => panic!("should have checkpointed"),
        }
        let mut other = config.clone();
        other.seed = 999;
        assert!(matches!(
            sweep_resumable(&other, &ckpt, None),
            Err(HarnessError::CheckpointMismatch(_))
        ));
    }

    #[test]
    fn budget_exhaustion_is_a_listed_hard_failure() {
        // zero node budget, nonzero mode: {1} and {2} go to the oracle and
        // immediately exhaust; {1,2} has sum 0 and is exempt
        let mut config = SweepConfig::new(3, ValidationMode::DistinctNonzero);
        config.node_budget = 0;
        let report = sweep(&config).unwrap();
        assert_eq!(report.exempt, 1);
        assert_eq!(report.solved, 0);
        assert_eq!(report.failures.len(), 2);
        assert!(report
            .failures
            .iter()
            .all(|f| f.reason == FailureReason::BudgetExhausted));
    }

    #[test]
    fn certificate_io_failure_aborts() {
        let mut config = SweepConfig::new(6, ValidationMode::DistinctOnly);
        config.certificate_path = Some(PathBuf::from("/nonexistent-dir/certs.txt"));
        assert!(matches!(sweep(&config), Err(HarnessError::Io(_))));
    }

    #[test]
    fn config_validation() {
        let mut config = SweepConfig::new(1, ValidationMode::DistinctOnly);
        assert!(config.validate().is_err());
        config.n = 10;
        config.k_range = Some((0, 3));
        assert!(config.validate().is_err());
        config.k_range = Some((3, 12));
        assert!(config.validate().is_err());
        config.k_range = Some((2, 5));
        config.max_tries = 0;
        assert!(config.validate().is_err());
        config.max_tries = 10;
        config.worker_count = 0;
        assert!(config.validate().is_err());
        config.worker_count = 2;
        assert!(config.validate().is_ok());
    }

    #[test]
    fn rank_encoding() {
        let modulus = Modulus::new(8).unwrap();
        assert_eq!(subset_from_rank(modulus, 1).elements(), &[1]);
        assert_eq!(subset_from_rank(modulus, 0b0100110).elements(), &[2, 3, 6]);
        assert_eq!(universe_max_rank(8), 127);
        assert_eq!(universe_max_rank(2), 1);
    }
}
