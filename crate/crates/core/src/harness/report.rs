//! Aggregated sweep results with a pinned JSON schema and a content digest.
//!
//! The report serializes as a single JSON document with fixed key order
//! `(n, mode, seed, total, solved, exempt, failures, histogram, duration_ms,
//! digest)`. The digest is the lowercase-hex SHA-256 of the canonical
//! serialization of everything except the `digest` and `duration_ms` fields;
//! wall-clock time is observability metadata, never content. Report equality
//! likewise ignores `duration_ms`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::harness::HarnessError;
use crate::zn::ValidationMode;

/// Upper bounds (inclusive) and labels of the per-k retry histogram buckets.
pub const TRIES_BUCKETS: [(u64, &str); 11] = [
    (1, "1"),
    (2, "2"),
    (3, "3"),
    (4, "4"),
    (5, "5"),
    (10, "6-10"),
    (100, "11-100"),
    (1_000, "101-1000"),
    (10_000, "1001-10000"),
    (100_000, "10001-100000"),
    (u64::MAX, ">100000"),
];

/// Index of the bucket a try count falls into.
pub fn tries_bucket(tries: u64) -> usize {
    TRIES_BUCKETS
        .iter()
        .position(|&(upper, _)| tries <= upper)
        .expect("the last bucket is unbounded")
}

/// Why a subset was recorded as a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureReason {
    /// The exhaustive fallback proved no valid ordering exists.
    #[serde(rename = "none_exists")]
    NoneExists,
    /// The exhaustive fallback ran out of node budget: a hard failure, the
    /// subset's status is unknown.
    #[serde(rename = "budget_exhausted")]
    BudgetExhausted,
}

/// One unsolved subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub set: Vec<u64>,
    pub reason: FailureReason,
    /// Rank in the canonical enumeration; kept for ordering and resumption,
    /// not part of the wire format.
    #[serde(skip)]
    pub rank: u64,
}

/// Per-subset-size tallies. `examined = solved + exempt + failed`;
/// `tries_buckets` and `max_tries` cover the solved subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KStats {
    pub k: u64,
    pub examined: u64,
    pub solved: u64,
    pub exempt: u64,
    pub failed: u64,
    pub max_tries: u64,
    pub tries_buckets: [u64; TRIES_BUCKETS.len()],
}

impl KStats {
    pub(crate) fn new(k: u64) -> Self {
        KStats {
            k,
            examined: 0,
            solved: 0,
            exempt: 0,
            failed: 0,
            max_tries: 0,
            tries_buckets: [0; TRIES_BUCKETS.len()],
        }
    }

    fn absorb(&mut self, other: &KStats) {
        debug_assert_eq!(self.k, other.k);
        self.examined += other.examined;
        self.solved += other.solved;
        self.exempt += other.exempt;
        self.failed += other.failed;
        self.max_tries = self.max_tries.max(other.max_tries);
        for (into, from) in self.tries_buckets.iter_mut().zip(other.tries_buckets) {
            *into += from;
        }
    }
}

/// The aggregated result of verifying a range of the subset universe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub n: u64,
    pub mode: ValidationMode,
    pub seed: u64,
    pub total: u64,
    pub solved: u64,
    pub exempt: u64,
    pub failures: Vec<Failure>,
    pub histogram: Vec<KStats>,
    pub duration_ms: u64,
    pub digest: String,
    /// Inclusive rank intervals this report covers. In-memory bookkeeping
    /// for disjointness checks when merging; not part of the wire format, so
    /// reports parsed back from JSON cannot be merged.
    #[serde(skip)]
    pub(crate) spans: Vec<(u64, u64)>,
}

/// View of the digest-covered fields, serialized canonically.
#[derive(Serialize)]
struct DigestView<'a> {
    n: u64,
    mode: ValidationMode,
    seed: u64,
    total: u64,
    solved: u64,
    exempt: u64,
    failures: &'a [Failure],
    histogram: &'a [KStats],
}

impl SweepReport {
    /// Recomputes the content digest from the current fields.
    pub fn compute_digest(&self) -> String {
        let view = DigestView {
            n: self.n,
            mode: self.mode,
            seed: self.seed,
            total: self.total,
            solved: self.solved,
            exempt: self.exempt,
            failures: &self.failures,
            histogram: &self.histogram,
        };
        let canonical = serde_json::to_vec(&view).expect("report fields serialize");
        let mut hasher = Sha256::new();
        hasher.update(&canonical);
        let digest = hasher.finalize();
        let mut out = String::with_capacity(digest.len() * 2);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    /// The canonical single-document JSON form.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn from_json(json: &str) -> Result<SweepReport, serde_json::Error> {
        serde_json::from_str(json)
    }

    /// Failures of one subset size, for bound checks.
    pub fn failure_count_for_k(&self, k: usize) -> u64 {
        self.failures.iter().filter(|f| f.set.len() == k).count() as u64
    }

    pub(crate) fn finalize(&mut self) {
        self.failures.sort_by_key(|f| f.rank);
        self.histogram.sort_by_key(|h| h.k);
        self.spans = normalize_spans(&self.spans);
        self.digest = self.compute_digest();
    }
}

impl PartialEq for SweepReport {
    /// Content equality; `duration_ms` is wall-clock noise and is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.mode == other.mode
            && self.seed == other.seed
            && self.total == other.total
            && self.solved == other.solved
            && self.exempt == other.exempt
            && self.failures == other.failures
            && self.histogram == other.histogram
            && self.digest == other.digest
    }
}

impl Eq for SweepReport {}

fn normalize_spans(spans: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut spans: Vec<(u64, u64)> = spans.iter().copied().filter(|(lo, hi)| lo <= hi).collect();
    spans.sort_unstable();
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(spans.len());
    for (lo, hi) in spans {
        match out.last_mut() {
            Some((_, prev_hi)) if lo <= prev_hi.saturating_add(1) => {
                *prev_hi = (*prev_hi).max(hi);
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn spans_overlap(a: &[(u64, u64)], b: &[(u64, u64)]) -> bool {
    // both sides are normalized (sorted, disjoint)
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (alo, ahi) = a[i];
        let (blo, bhi) = b[j];
        if alo <= bhi && blo <= ahi {
            return true;
        }
        if ahi < bhi {
            i += 1;
        } else {
            j += 1;
        }
    }
    false
}

/// Associative, commutative merge of two reports over disjoint rank ranges
/// of the same `(n, mode, seed)` sweep. The digest is recomputed over the
/// merged canonical form, so merge order never changes the result.
pub fn merge_reports(a: &SweepReport, b: &SweepReport) -> Result<SweepReport, HarnessError> {
    if a.n != b.n || a.mode != b.mode || a.seed != b.seed {
        return Err(HarnessError::MergeMismatch(format!(
            "(n={}, mode={}, seed={}) vs (n={}, mode={}, seed={})",
            a.n, a.mode, a.seed, b.n, b.mode, b.seed
        )));
    }
    for (report, name) in [(a, "left"), (b, "right")] {
        if report.total > 0 && report.spans.is_empty() {
            return Err(HarnessError::MergeMismatch(format!(
                "{name} report carries no coverage information (was it parsed from JSON?)"
            )));
        }
    }
    if spans_overlap(&a.spans, &b.spans) {
        return Err(HarnessError::MergeMismatch(format!(
            "rank ranges overlap: {:?} vs {:?}",
            a.spans, b.spans
        )));
    }
    let mut merged = SweepReport {
        n: a.n,
        mode: a.mode,
        seed: a.seed,
        total: a.total + b.total,
        solved: a.solved + b.solved,
        exempt: a.exempt + b.exempt,
        failures: a.failures.iter().chain(&b.failures).cloned().collect(),
        histogram: Vec::new(),
        duration_ms: a.duration_ms + b.duration_ms,
        digest: String::new(),
        spans: a.spans.iter().chain(&b.spans).copied().collect(),
    };
    let mut per_k: std::collections::BTreeMap<u64, KStats> = std::collections::BTreeMap::new();
    for stats in a.histogram.iter().chain(&b.histogram) {
        per_k
            .entry(stats.k)
            .or_insert_with(|| KStats::new(stats.k))
            .absorb(stats);
    }
    merged.histogram = per_k.into_values().collect();
    merged.finalize();
    Ok(merged)
}
