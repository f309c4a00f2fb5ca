//! Sequencing strategies: the exhaustive backtracking oracle, randomized
//! permutation search, the bounded constructive solver for `k <= 6`, and the
//! greedy prefix builder, plus the strong-to-plain reduction and the
//! orderable-subset census.
//!
//! Every solver is a pure function of its declared inputs; orderings returned
//! by any of them satisfy `is_sequencing` for the requested mode.

mod constructive;

pub use constructive::{constructive_small, constructive_small_traced};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;
use crate::zn::{valid_partial_sums, Ordering, Subset, SumSeen, ValidationMode};

/// Default node budget for the exhaustive oracle.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    /// The exhaustive search gave up before proving or disproving existence.
    /// Distinct from "no ordering exists".
    #[error("node budget of {budget} exhausted before the search completed")]
    BudgetExhausted { budget: u64 },
    #[error("constructive solver handles subsets of size at most 6, got {0}")]
    SizeTooLarge(usize),
    /// The constructive case analysis reached a state it rules out. This is
    /// an implementation defect, never a legitimate runtime outcome.
    #[error("constructive case analysis violated: {0}")]
    InternalCaseViolation(String),
    #[error("base ordering must have distinct nonzero partial sums")]
    NotStrongSequencing,
    #[error("extra element {0} is already present in the ordering")]
    ExtraAlreadyPresent(u64),
    #[error("extra element {value} is outside [1, {}] for modulus {n}", n - 1)]
    ExtraOutOfRange { value: u64, n: u64 },
    #[error("ordering sum {sum} plus extra {extra} is {total} mod {n}, expected 0")]
    SumNotZero {
        sum: u64,
        extra: u64,
        total: u64,
        n: u64,
    },
}

/// Which strategy produced an ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveMethod {
    #[serde(rename = "exhaustive")]
    Exhaustive,
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "constructive")]
    Constructive,
    #[serde(rename = "greedy")]
    Greedy,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMethod::Exhaustive => "exhaustive",
            SolveMethod::Random => "random",
            SolveMethod::Constructive => "constructive",
            SolveMethod::Greedy => "greedy",
        }
    }
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolveMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(SolveMethod::Exhaustive),
            "random" => Ok(SolveMethod::Random),
            "constructive" => Ok(SolveMethod::Constructive),
            "greedy" => Ok(SolveMethod::Greedy),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

/// Result of one solve attempt. `tries` counts candidates examined: search
/// nodes for the exhaustive solver, permutations for the random solver,
/// candidate orderings for the constructive decision tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub ordering: Option<Ordering>,
    pub tries: u64,
    pub method: SolveMethod,
}

/// Finds the lexicographically smallest valid ordering by backtracking, or
/// proves none exists. Prefixes whose partial sums already violate `mode` are
/// pruned.
pub fn exhaustive_sequencing(
    subset: &Subset,
    mode: ValidationMode,
) -> Result<SolveOutcome, SolverError> {
    exhaustive_sequencing_budgeted(subset, mode, DEFAULT_NODE_BUDGET)
}

/// As [`exhaustive_sequencing`], with an explicit node budget. Exceeding the
/// budget yields [`SolverError::BudgetExhausted`], which is distinct from a
/// definite "no ordering exists" answer.
pub fn exhaustive_sequencing_budgeted(
    subset: &Subset,
    mode: ValidationMode,
    node_budget: u64,
) -> Result<SolveOutcome, SolverError> {
    let n = subset.modulus().get();
    let elems = subset.elements();
    let mut used = vec![false; elems.len()];
    let mut prefix = Vec::with_capacity(elems.len());
    let mut seen = SumSeen::for_modulus(n);
    let mut nodes = 0u64;
    let found = dfs(
        elems,
        n,
        mode,
        &mut used,
        &mut prefix,
        0,
        &mut seen,
        &mut nodes,
        node_budget,
    )?;
    let ordering = if found {
        Some(Ordering::new(subset.modulus(), prefix).expect("search emits valid sequences"))
    } else {
        None
    };
    Ok(SolveOutcome {
        ordering,
        tries: nodes,
        method: SolveMethod::Exhaustive,
    })
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    elems: &[u64],
    n: u64,
    mode: ValidationMode,
    used: &mut [bool],
    prefix: &mut Vec<u64>,
    sum: u64,
    seen: &mut SumSeen,
    nodes: &mut u64,
    budget: u64,
) -> Result<bool, SolverError> {
    if prefix.len() == elems.len() {
        return Ok(true);
    }
    for idx in 0..elems.len() {
        if used[idx] {
            continue;
        }
        *nodes += 1;
        if *nodes > budget {
            return Err(SolverError::BudgetExhausted { budget });
        }
        let mut s = sum + elems[idx];
        if s >= n {
            s -= n;
        }
        if s == 0 && mode.requires_nonzero() {
            continue;
        }
        if !seen.insert(s) {
            continue;
        }
        used[idx] = true;
        prefix.push(elems[idx]);
        if dfs(elems, n, mode, used, prefix, s, seen, nodes, budget)? {
            return Ok(true);
        }
        prefix.pop();
        used[idx] = false;
        seen.remove(s);
    }
    Ok(false)
}

/// Draws uniform permutations from a seeded SplitMix64 stream until one
/// satisfies `mode`, or `max_tries` is exhausted. Identical inputs give
/// identical outcomes.
pub fn random_sequencing(
    subset: &Subset,
    mode: ValidationMode,
    seed: u64,
    max_tries: u64,
) -> SolveOutcome {
    assert!(max_tries >= 1, "max_tries must be at least 1");
    let n = subset.modulus().get();
    let mut scratch: Vec<u64> = subset.elements().to_vec();
    let mut rng = SplitMix64::new(seed);
    for tries in 1..=max_tries {
        rng.shuffle(&mut scratch);
        if valid_partial_sums(&scratch, n, mode) {
            let ordering = Ordering::new(subset.modulus(), scratch)
                .expect("shuffle preserves element validity");
            return SolveOutcome {
                ordering: Some(ordering),
                tries,
                method: SolveMethod::Random,
            };
        }
    }
    SolveOutcome {
        ordering: None,
        tries: max_tries,
        method: SolveMethod::Random,
    }
}

/// Greedy prefix with distinct partial sums over a subset `B` of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyResult {
    pub ordering: Ordering,
    /// The guaranteed lower bound `ceil((k+1)/2)` on the prefix length.
    pub guaranteed_floor: usize,
}

/// Extends a sequence one element at a time, always picking the smallest
/// unused element that keeps the partial sums distinct, and stops only when
/// no unused element extends. The result is always at least
/// `ceil((k+1)/2)` long.
pub fn greedy_prefix(subset: &Subset) -> GreedyResult {
    let n = subset.modulus().get();
    let elems = subset.elements();
    let k = elems.len();
    let mut used = vec![false; k];
    let mut sequence = Vec::with_capacity(k);
    let mut seen = SumSeen::for_modulus(n);
    let mut sum = 0u64;
    loop {
        let mut extended = false;
        for idx in 0..k {
            if used[idx] {
                continue;
            }
            let mut s = sum + elems[idx];
            if s >= n {
                s -= n;
            }
            if seen.contains(s) {
                continue;
            }
            seen.insert(s);
            used[idx] = true;
            sequence.push(elems[idx]);
            sum = s;
            extended = true;
            break;
        }
        if !extended {
            break;
        }
    }
    let guaranteed_floor = (k + 1).div_ceil(2);
    assert!(
        sequence.len() >= guaranteed_floor,
        "greedy prefix of length {} fell below the floor {} for |A| = {}",
        sequence.len(),
        guaranteed_floor,
        k
    );
    let ordering =
        Ordering::new(subset.modulus(), sequence).expect("greedy picks valid distinct elements");
    debug_assert!(ordering.is_sequencing(ValidationMode::DistinctOnly));
    GreedyResult {
        ordering,
        guaranteed_floor,
    }
}

/// Exact count of `t`-subsets `B` of `A` that admit at least one ordering
/// with distinct partial sums, by brute force over all `t`-subsets.
pub fn count_orderable_subsets(subset: &Subset, t: usize) -> Result<u64, SolverError> {
    count_orderable_subsets_budgeted(subset, t, DEFAULT_NODE_BUDGET)
}

/// As [`count_orderable_subsets`], with an explicit per-subset node budget
/// for the underlying exhaustive searches.
pub fn count_orderable_subsets_budgeted(
    subset: &Subset,
    t: usize,
    node_budget: u64,
) -> Result<u64, SolverError> {
    let k = subset.len();
    assert!(t <= k, "t must satisfy t <= |A|, got t={t}, |A|={k}");
    if t == 0 {
        // the empty subset is vacuously orderable
        return Ok(1);
    }
    let elems = subset.elements();
    let mut idx: Vec<usize> = (0..t).collect();
    let mut count = 0u64;
    loop {
        let chosen: Vec<u64> = idx.iter().map(|&i| elems[i]).collect();
        let b = Subset::new(subset.modulus(), chosen).expect("combination of valid elements");
        let outcome =
            exhaustive_sequencing_budgeted(&b, ValidationMode::DistinctOnly, node_budget)?;
        if outcome.ordering.is_some() {
            count += 1;
        }
        if !next_combination(&mut idx, k) {
            return Ok(count);
        }
    }
}

/// Appends `extra` to an ordering whose partial sums are distinct and
/// nonzero, where `extra` completes the total to 0 mod n. The final sum 0
/// cannot collide with the earlier (nonzero) sums, so the result has distinct
/// partial sums.
pub fn alspach_reduction(strong_ordering: &Ordering, extra: u64) -> Result<Ordering, SolverError> {
    let modulus = strong_ordering.modulus();
    let n = modulus.get();
    if extra == 0 || extra >= n {
        return Err(SolverError::ExtraOutOfRange { value: extra, n });
    }
    if strong_ordering.sequence().contains(&extra) {
        return Err(SolverError::ExtraAlreadyPresent(extra));
    }
    if !strong_ordering.is_sequencing(ValidationMode::DistinctNonzero) {
        return Err(SolverError::NotStrongSequencing);
    }
    let sum = strong_ordering.partial_sums().last();
    let total = modulus.add(sum, extra);
    if total != 0 {
        return Err(SolverError::SumNotZero {
            sum,
            extra,
            total,
            n,
        });
    }
    let mut sequence = strong_ordering.sequence().to_vec();
    sequence.push(extra);
    let ordering = Ordering::new(modulus, sequence).expect("append of a fresh valid element");
    debug_assert!(ordering.is_sequencing(ValidationMode::DistinctOnly));
    Ok(ordering)
}

/// Advances `idx` to the next `t`-combination of `0..k` in lexicographic
/// order; returns false after the last one.
fn next_combination(idx: &mut [usize], k: usize) -> bool {
    let t = idx.len();
    let mut i = t;
    while i > 0 {
        i -= 1;
        if idx[i] < k - (t - i) {
            idx[i] += 1;
            for j in i + 1..t {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Advances `xs` to its next lexicographic permutation in place; returns
/// false if `xs` was already the last one.
pub(crate) fn next_permutation(xs: &mut [u64]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zn::Modulus;

    fn subset(n: u64, elems: &[u64]) -> Subset {
        Subset::new(Modulus::new(n).unwrap(), elems.to_vec()).unwrap()
    }

    #[test]
    fn exhaustive_finds_lex_smallest() {
        let out = exhaustive_sequencing(&subset(3, &[1, 2]), ValidationMode::DistinctOnly).unwrap();
        assert_eq!(out.ordering.unwrap().sequence(), &[1, 2]);
        assert!(out.tries >= 1);
        assert_eq!(out.method, SolveMethod::Exhaustive);
    }

    #[test]
    fn exhaustive_proves_absence() {
        // both orderings of {1,2} mod 3 hit a zero partial sum
        let out =
            exhaustive_sequencing(&subset(3, &[1, 2]), ValidationMode::DistinctNonzero).unwrap();
        assert!(out.ordering.is_none());
    }

    #[test]
    fn exhaustive_singleton() {
        for mode in [
            ValidationMode::DistinctOnly,
            ValidationMode::DistinctNonzero,
        ] {
            let out = exhaustive_sequencing(&subset(9, &[4]), mode).unwrap();
            assert_eq!(out.ordering.unwrap().sequence(), &[4]);
        }
    }

    #[test]
    fn exhaustive_respects_budget() {
        let s = subset(12, &[1, 2, 3, 4, 5, 6, 7, 8]);
        let err = exhaustive_sequencing_budgeted(&s, ValidationMode::DistinctOnly, 3).unwrap_err();
        assert_eq!(err, SolverError::BudgetExhausted { budget: 3 });
    }

    #[test]
    fn exhaustive_lex_first_on_larger_set() {
        // smallest ordering must start with the smallest extendable element
        let out = exhaustive_sequencing(
            &subset(8, &[1, 2, 3, 4, 5, 6]),
            ValidationMode::DistinctOnly,
        )
        .unwrap();
        let o = out.ordering.unwrap();
        assert!(o.is_sequencing(ValidationMode::DistinctOnly));
        // verify minimality against plain enumeration
        let mut perm = vec![1, 2, 3, 4, 5, 6];
        let expected = loop {
            if valid_partial_sums(&perm, 8, ValidationMode::DistinctOnly) {
                break perm.clone();
            }
            assert!(next_permutation(&mut perm));
        };
        assert_eq!(o.sequence(), expected.as_slice());
    }

    #[test]
    fn random_finds_example_ordering() {
        let s = subset(8, &[1, 2, 3, 4, 5, 6]);
        let out = random_sequencing(&s, ValidationMode::DistinctOnly, 7, 1_000_000);
        let o = out.ordering.expect("an ordering exists for this set");
        assert!(o.is_sequencing(ValidationMode::DistinctOnly));
        assert!(out.tries >= 1);
    }

    #[test]
    fn random_is_deterministic() {
        let s = subset(11, &[1, 3, 4, 7, 9, 10]);
        let a = random_sequencing(&s, ValidationMode::DistinctOnly, 1234, 100_000);
        let b = random_sequencing(&s, ValidationMode::DistinctOnly, 1234, 100_000);
        assert_eq!(a, b);
    }

    #[test]
    fn random_reports_exhaustion() {
        let out = random_sequencing(&subset(3, &[1, 2]), ValidationMode::DistinctNonzero, 5, 100);
        assert!(out.ordering.is_none());
        assert_eq!(out.tries, 100);
    }

    #[test]
    fn greedy_examples() {
        let r = greedy_prefix(&subset(4, &[1, 2, 3]));
        assert_eq!(r.ordering.sequence(), &[1, 2, 3]);
        assert_eq!(r.guaranteed_floor, 2);

        let r = greedy_prefix(&subset(9, &[5]));
        assert_eq!(r.ordering.sequence(), &[5]);
        assert_eq!(r.guaranteed_floor, 1);
    }

    #[test]
    fn greedy_floor_small_exhaustive() {
        for n in 2..=10u64 {
            let m = Modulus::new(n).unwrap();
            for mask in 1u64..(1 << (n - 1)) {
                let elems: Vec<u64> = (1..n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                let s = Subset::new(m, elems).unwrap();
                let r = greedy_prefix(&s);
                assert!(r.ordering.len() >= (s.len() + 1).div_ceil(2));
                assert!(r.ordering.is_sequencing(ValidationMode::DistinctOnly));
            }
        }
    }

    #[test]
    fn count_orderable_examples() {
        assert_eq!(
            count_orderable_subsets(&subset(5, &[1, 2, 3, 4]), 2).unwrap(),
            6
        );
        assert_eq!(
            count_orderable_subsets(&subset(5, &[1, 2, 3, 4]), 0).unwrap(),
            1
        );
        // every 3-subset of Z_7 \ {0} is orderable; 20 = C(6,3) >= 2^3
        let c = count_orderable_subsets(&subset(7, &[1, 2, 3, 4, 5, 6]), 3).unwrap();
        assert_eq!(c, 20);
        assert!(c >= 8);
    }

    #[test]
    fn alspach_reduction_examples() {
        let m = Modulus::new(6).unwrap();
        let strong = Ordering::new(m, vec![1, 2]).unwrap(); // sums 1, 3
        let full = alspach_reduction(&strong, 3).unwrap();
        assert_eq!(full.sequence(), &[1, 2, 3]);
        assert!(full.is_sequencing(ValidationMode::DistinctOnly));

        // k = 1 base case: (x) + (n - x)
        let one = Ordering::new(m, vec![2]).unwrap();
        let two = alspach_reduction(&one, 4).unwrap();
        assert_eq!(two.partial_sums().sums(), &[2, 0]);
    }

    #[test]
    fn alspach_reduction_rejects_bad_inputs() {
        let m = Modulus::new(6).unwrap();
        let strong = Ordering::new(m, vec![1, 2]).unwrap();
        assert_eq!(
            alspach_reduction(&strong, 2),
            Err(SolverError::ExtraAlreadyPresent(2))
        );
        assert_eq!(
            alspach_reduction(&strong, 0),
            Err(SolverError::ExtraOutOfRange { value: 0, n: 6 })
        );
        assert_eq!(
            alspach_reduction(&strong, 4),
            Err(SolverError::SumNotZero {
                sum: 3,
                extra: 4,
                total: 1,
                n: 6
            })
        );
        // (3, 1) mod 6 has sums 3, 4 (fine) but (1, 5) mod 6 has sums 1, 0
        let weak = Ordering::new(m, vec![1, 5]).unwrap();
        assert_eq!(
            alspach_reduction(&weak, 3),
            Err(SolverError::NotStrongSequencing)
        );
    }

    #[test]
    fn next_combination_enumerates_all() {
        let mut idx = vec![0usize, 1, 2];
        let mut seen = vec![idx.clone()];
        while next_combination(&mut idx, 5) {
            seen.push(idx.clone());
        }
        assert_eq!(seen.len(), 10); // C(5,3)
        assert_eq!(seen.first().unwrap(), &[0, 1, 2]);
        assert_eq!(seen.last().unwrap(), &[2, 3, 4]);
    }

    #[test]
    fn next_permutation_is_lexicographic() {
        let mut xs = vec![1u64, 2, 3];
        let mut all = vec![xs.clone()];
        while next_permutation(&mut xs) {
            all.push(xs.clone());
        }
        assert_eq!(all.len(), 6);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
}
