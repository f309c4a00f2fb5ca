//! Residue arithmetic over `Z_n`, subsets of the nonzero residues, and the
//! partial-sum validators.
//!
//! Residues are kept in canonical form `0..n-1` and every sum is reduced
//! eagerly, so distinctness checks are plain equality checks.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest accepted modulus; keeps `a + b` of two reduced residues inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZnError {
    #[error("modulus must satisfy 2 <= n <= 2^63, got {0}")]
    InvalidModulus(u64),
    #[error("element {value} is outside [1, {}] for modulus {n}", n - 1)]
    ElementOutOfRange { value: u64, n: u64 },
    #[error("subset elements must be strictly increasing")]
    NotStrictlyIncreasing,
    #[error("element {0} appears more than once")]
    DuplicateElement(u64),
    #[error("a subset or ordering needs at least one element")]
    Empty,
    #[error("sequence is not a permutation of the subset")]
    NotAPermutation,
}

/// The ring size `n`. Always at least 2 so that `Z_n \ {0}` is nonempty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(n: u64) -> Result<Self, ZnError> {
        if !(2..=MAX_MODULUS).contains(&n) {
            return Err(ZnError::InvalidModulus(n));
        }
        Ok(Modulus(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `(a + b) mod n` for already-reduced operands.
    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.0 && b < self.0);
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    /// Additive inverse of a reduced residue.
    #[inline]
    pub fn negate(self, a: u64) -> u64 {
        debug_assert!(a < self.0);
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which partial-sum condition an ordering is held to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ValidationMode {
    /// All partial sums pairwise distinct.
    #[serde(rename = "distinct")]
    DistinctOnly,
    /// All partial sums pairwise distinct and nonzero.
    #[serde(rename = "nonzero")]
    DistinctNonzero,
}

impl ValidationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ValidationMode::DistinctOnly => "distinct",
            ValidationMode::DistinctNonzero => "nonzero",
        }
    }

    #[inline]
    pub fn requires_nonzero(self) -> bool {
        matches!(self, ValidationMode::DistinctNonzero)
    }
}

impl fmt::Display for ValidationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ValidationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "distinct" => Ok(ValidationMode::DistinctOnly),
            "nonzero" => Ok(ValidationMode::DistinctNonzero),
            other => Err(format!(
                "unknown mode {other:?}, expected \"distinct\" or \"nonzero\""
            )),
        }
    }
}

/// A set `A` of distinct nonzero residues, stored strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    modulus: Modulus,
    elements: Vec<u64>,
}

impl Subset {
    /// `elements` must already be strictly increasing residues in `[1, n-1]`.
    pub fn new(modulus: Modulus, elements: Vec<u64>) -> Result<Self, ZnError> {
        if elements.is_empty() {
            return Err(ZnError::Empty);
        }
        let n = modulus.get();
        for &e in &elements {
            if e == 0 || e >= n {
                return Err(ZnError::ElementOutOfRange { value: e, n });
            }
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ZnError::NotStrictlyIncreasing);
        }
        Ok(Subset { modulus, elements })
    }

    /// Accepts elements in any order; sorts them and rejects duplicates.
    pub fn from_elements(
        modulus: Modulus,
        elements: impl IntoIterator<Item = u64>,
    ) -> Result<Self, ZnError> {
        let mut elements: Vec<u64> = elements.into_iter().collect();
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(ZnError::DuplicateElement(w[0]));
        }
        Subset::new(modulus, elements)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// `Σ_{a in A} a mod n`.
    pub fn sum(&self) -> u64 {
        let n = self.modulus.get();
        self.elements.iter().fold(0u64, |acc, &a| {
            let s = acc + a;
            if s >= n {
                s - n
            } else {
                s
            }
        })
    }

    /// Number of unordered pairs `{x, n-x}` contained in the set with `x != n-x`.
    ///
    /// A self-inverse element (`x = n/2` for even `n`) contributes nothing.
    pub fn inverse_pair_count(&self) -> usize {
        let n = self.modulus.get();
        self.elements
            .iter()
            .filter(|&&x| {
                let neg = n - x;
                x < neg && self.contains(neg)
            })
            .count()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_comma_separated(f, &self.elements)
    }
}

/// A candidate sequencing: some subset's elements in a particular order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ordering {
    modulus: Modulus,
    sequence: Vec<u64>,
}

impl Ordering {
    /// `sequence` must be distinct nonzero residues; any order.
    pub fn new(modulus: Modulus, sequence: Vec<u64>) -> Result<Self, ZnError> {
        if sequence.is_empty() {
            return Err(ZnError::Empty);
        }
        let n = modulus.get();
        for &e in &sequence {
            if e == 0 || e >= n {
                return Err(ZnError::ElementOutOfRange { value: e, n });
            }
        }
        let mut sorted = sequence.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(ZnError::DuplicateElement(w[0]));
        }
        Ok(Ordering { modulus, sequence })
    }

    /// An ordering that must use exactly the elements of `subset`.
    pub fn of_subset(subset: &Subset, sequence: Vec<u64>) -> Result<Self, ZnError> {
        let ordering = Ordering::new(subset.modulus(), sequence)?;
        let mut sorted = ordering.sequence.clone();
        sorted.sort_unstable();
        if sorted != subset.elements() {
            return Err(ZnError::NotAPermutation);
        }
        Ok(ordering)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn sequence(&self) -> &[u64] {
        &self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    /// The underlying set, forgetting the order.
    pub fn subset(&self) -> Subset {
        let mut elements = self.sequence.clone();
        elements.sort_unstable();
        Subset::new(self.modulus, elements).expect("ordering elements form a valid subset")
    }

    /// The partial sums `s_1..s_k` with `s_j = a_1 + ... + a_j mod n`.
    pub fn partial_sums(&self) -> PartialSumProfile {
        let n = self.modulus.get();
        let mut sums = Vec::with_capacity(self.sequence.len());
        let mut acc = 0u64;
        for &a in &self.sequence {
            acc += a;
            if acc >= n {
                acc -= n;
            }
            sums.push(acc);
        }
        PartialSumProfile { sums }
    }

    /// The run `r_{i,j} = a_i + ... + a_j mod n`, with 1-based inclusive
    /// indices.
    ///
    /// Panics if `1 <= i <= j <= k` does not hold; out-of-range indices are a
    /// caller bug, not a recoverable condition.
    pub fn run(&self, i: usize, j: usize) -> u64 {
        let k = self.sequence.len();
        assert!(
            1 <= i && i <= j && j <= k,
            "run indices must satisfy 1 <= i <= j <= k, got i={i}, j={j}, k={k}"
        );
        let n = self.modulus.get();
        self.sequence[i - 1..j].iter().fold(0u64, |acc, &a| {
            let s = acc + a;
            if s >= n {
                s - n
            } else {
                s
            }
        })
    }

    /// Whether the partial sums satisfy `mode`.
    pub fn is_sequencing(&self, mode: ValidationMode) -> bool {
        valid_partial_sums(&self.sequence, self.modulus.get(), mode)
    }

    /// The same predicate expressed through runs: distinct sums iff no run
    /// `r_{i,j}` with `i >= 2` vanishes, and additionally no run `r_{1,j}`
    /// vanishes in the nonzero mode.
    pub fn is_sequencing_via_runs(&self, mode: ValidationMode) -> bool {
        let n = self.modulus.get();
        let k = self.sequence.len();
        let lo = if mode.requires_nonzero() { 1 } else { 2 };
        for i in lo..=k {
            let mut acc = 0u64;
            for &a in &self.sequence[i - 1..] {
                acc += a;
                if acc >= n {
                    acc -= n;
                }
                if acc == 0 {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_comma_separated(f, &self.sequence)
    }
}

/// The partial sums of one ordering, reduced to `0..n-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSumProfile {
    sums: Vec<u64>,
}

impl PartialSumProfile {
    pub fn sums(&self) -> &[u64] {
        &self.sums
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    /// `s_k`, the sum of the whole sequence.
    pub fn last(&self) -> u64 {
        *self.sums.last().expect("profiles are never empty")
    }

    pub fn all_distinct(&self) -> bool {
        let mut sorted = self.sums.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    pub fn contains_zero(&self) -> bool {
        self.sums.contains(&0)
    }
}

impl fmt::Display for PartialSumProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_comma_separated(f, &self.sums)
    }
}

fn write_comma_separated(f: &mut fmt::Formatter<'_>, xs: &[u64]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// Membership set for partial sums, specialized by modulus size so the hot
/// `n <= 64` path is a single bitmask.
pub(crate) enum SumSeen {
    Mask(u64),
    Table(Vec<bool>),
    Hash(HashSet<u64>),
}

impl SumSeen {
    pub(crate) fn for_modulus(n: u64) -> Self {
        if n <= 64 {
            SumSeen::Mask(0)
        } else if n <= (1 << 22) {
            SumSeen::Table(vec![false; n as usize])
        } else {
            SumSeen::Hash(HashSet::new())
        }
    }

    /// Inserts `s`; returns false (and leaves the set unchanged) if present.
    #[inline]
    pub(crate) fn insert(&mut self, s: u64) -> bool {
        match self {
            SumSeen::Mask(m) => {
                let bit = 1u64 << s;
                if *m & bit != 0 {
                    return false;
                }
                *m |= bit;
                true
            }
            SumSeen::Table(t) => {
                let slot = &mut t[s as usize];
                if *slot {
                    return false;
                }
                *slot = true;
                true
            }
            SumSeen::Hash(h) => h.insert(s),
        }
    }

    #[inline]
    pub(crate) fn contains(&self, s: u64) -> bool {
        match self {
            SumSeen::Mask(m) => m & (1u64 << s) != 0,
            SumSeen::Table(t) => t[s as usize],
            SumSeen::Hash(h) => h.contains(&s),
        }
    }

    #[inline]
    pub(crate) fn remove(&mut self, s: u64) {
        match self {
            SumSeen::Mask(m) => *m &= !(1u64 << s),
            SumSeen::Table(t) => t[s as usize] = false,
            SumSeen::Hash(h) => {
                h.remove(&s);
            }
        }
    }
}

/// Allocation-light check that a raw sequence's partial sums satisfy `mode`.
/// Elements must already be reduced residues.
pub(crate) fn valid_partial_sums(seq: &[u64], n: u64, mode: ValidationMode) -> bool {
    let mut seen = SumSeen::for_modulus(n);
    let mut acc = 0u64;
    for &a in seq {
        acc += a;
        if acc >= n {
            acc -= n;
        }
        if acc == 0 && mode.requires_nonzero() {
            return false;
        }
        if !seen.insert(acc) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ordering(n: u64, seq: &[u64]) -> Ordering {
        Ordering::new(Modulus::new(n).unwrap(), seq.to_vec()).unwrap()
    }

    fn subset(n: u64, elems: &[u64]) -> Subset {
        Subset::new(Modulus::new(n).unwrap(), elems.to_vec()).unwrap()
    }

    #[test]
    fn modulus_bounds() {
        assert!(Modulus::new(2).is_ok());
        assert_eq!(Modulus::new(1), Err(ZnError::InvalidModulus(1)));
        assert_eq!(Modulus::new(0), Err(ZnError::InvalidModulus(0)));
        assert!(Modulus::new(MAX_MODULUS).is_ok());
        assert!(Modulus::new(MAX_MODULUS + 1).is_err());
    }

    #[test]
    fn subset_rejects_invalid_elements() {
        let m = Modulus::new(8).unwrap();
        assert_eq!(
            Subset::new(m, vec![0, 1]),
            Err(ZnError::ElementOutOfRange { value: 0, n: 8 })
        );
        assert_eq!(
            Subset::new(m, vec![1, 8]),
            Err(ZnError::ElementOutOfRange { value: 8, n: 8 })
        );
        assert_eq!(
            Subset::new(m, vec![2, 1]),
            Err(ZnError::NotStrictlyIncreasing)
        );
        assert_eq!(
            Subset::new(m, vec![1, 1]),
            Err(ZnError::NotStrictlyIncreasing)
        );
        assert_eq!(Subset::new(m, vec![]), Err(ZnError::Empty));
        assert_eq!(
            Subset::from_elements(m, vec![3, 1, 3]),
            Err(ZnError::DuplicateElement(3))
        );
        assert_eq!(
            Subset::from_elements(m, vec![3, 1]).unwrap().elements(),
            &[1, 3]
        );
    }

    #[test]
    fn partial_sums_example_mod_8() {
        // final sum is 21 mod 8 = 5, matching run(o, 1, 6) and the set sum
        let o = ordering(8, &[1, 6, 3, 4, 5, 2]);
        assert_eq!(o.partial_sums().sums(), &[1, 7, 2, 6, 3, 5]);
    }

    #[test]
    fn partial_sums_single_and_wraparound() {
        assert_eq!(ordering(9, &[7]).partial_sums().sums(), &[7]);
        assert_eq!(ordering(5, &[2, 3]).partial_sums().sums(), &[2, 0]);
    }

    #[test]
    fn run_examples() {
        let o = ordering(8, &[1, 6, 3, 4, 5, 2]);
        assert_eq!(o.run(1, 6), 5); // 21 mod 8
        for i in 1..=6 {
            assert_eq!(o.run(i, i), o.sequence()[i - 1]);
        }
        assert_eq!(ordering(5, &[2, 3]).run(1, 2), 0);
    }

    #[test]
    #[should_panic(expected = "run indices")]
    fn run_rejects_bad_indices() {
        ordering(8, &[1, 2]).run(2, 1);
    }

    #[test]
    #[should_panic(expected = "run indices")]
    fn run_rejects_zero_index() {
        ordering(8, &[1, 2]).run(0, 1);
    }

    #[test]
    fn is_sequencing_examples() {
        let good = ordering(8, &[1, 6, 3, 4, 5, 2]);
        assert!(good.is_sequencing(ValidationMode::DistinctOnly));

        let repeat = ordering(6, &[3, 1, 5]); // sums 3, 4, 3
        assert!(!repeat.is_sequencing(ValidationMode::DistinctOnly));

        let zero_sum = ordering(3, &[1, 2]); // sums 1, 0
        assert!(zero_sum.is_sequencing(ValidationMode::DistinctOnly));
        assert!(!zero_sum.is_sequencing(ValidationMode::DistinctNonzero));
    }

    #[test]
    fn runs_view_matches_examples() {
        assert!(
            ordering(8, &[1, 6, 3, 4, 5, 2]).is_sequencing_via_runs(ValidationMode::DistinctOnly)
        );
        assert!(ordering(9, &[5]).is_sequencing_via_runs(ValidationMode::DistinctOnly));
        // r_{2,3} = 1 + 5 = 6 = 0 mod 6
        assert!(!ordering(6, &[3, 1, 5]).is_sequencing_via_runs(ValidationMode::DistinctOnly));
    }

    #[test]
    fn validators_agree_exhaustively_small() {
        // every ordering of every subset for n <= 8
        for n in 2..=8u64 {
            let m = Modulus::new(n).unwrap();
            for mask in 1u64..(1 << (n - 1)) {
                let elems: Vec<u64> = (1..n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                let mut perm = elems.clone();
                loop {
                    let o = Ordering::new(m, perm.clone()).unwrap();
                    for mode in [
                        ValidationMode::DistinctOnly,
                        ValidationMode::DistinctNonzero,
                    ] {
                        assert_eq!(
                            o.is_sequencing(mode),
                            o.is_sequencing_via_runs(mode),
                            "{o} mod {n}"
                        );
                    }
                    if !crate::solvers::next_permutation(&mut perm) {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn subset_sum_examples() {
        assert_eq!(subset(8, &[1, 2, 3, 4, 5, 6]).sum(), 5);
        assert_eq!(subset(9, &[7]).sum(), 7);
        assert_eq!(subset(3, &[1, 2]).sum(), 0);
    }

    #[test]
    fn inverse_pair_count_examples() {
        assert_eq!(subset(4, &[1, 3]).inverse_pair_count(), 1);
        assert_eq!(subset(8, &[1, 2]).inverse_pair_count(), 0);
        // direct enumeration: {2,6} and {3,5} are the only inverse pairs;
        // 7 is absent and 4 is self-inverse
        assert_eq!(subset(8, &[1, 2, 3, 4, 5, 6]).inverse_pair_count(), 2);
    }

    #[test]
    fn inverse_pair_count_matches_pair_enumeration() {
        for n in 2..=12u64 {
            let m = Modulus::new(n).unwrap();
            for mask in 1u64..(1 << (n - 1)) {
                let elems: Vec<u64> = (1..n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                let s = Subset::new(m, elems.clone()).unwrap();
                let mut expected = 0;
                for (i, &x) in elems.iter().enumerate() {
                    for &y in &elems[i + 1..] {
                        if (x + y) % n == 0 {
                            expected += 1;
                        }
                    }
                }
                assert_eq!(s.inverse_pair_count(), expected, "A={elems:?} mod {n}");
            }
        }
    }

    #[test]
    fn edge_cases_are_legal() {
        // n = 2 has the single subset {1}; k = 1 is trivially sequenceable
        let s = subset(2, &[1]);
        let o = Ordering::of_subset(&s, vec![1]).unwrap();
        assert!(o.is_sequencing(ValidationMode::DistinctOnly));
        assert!(o.is_sequencing(ValidationMode::DistinctNonzero));
    }

    #[test]
    fn ordering_of_subset_checks_permutation() {
        let s = subset(8, &[1, 2, 3]);
        assert!(Ordering::of_subset(&s, vec![3, 1, 2]).is_ok());
        assert_eq!(
            Ordering::of_subset(&s, vec![3, 1, 4]),
            Err(ZnError::NotAPermutation)
        );
        assert_eq!(
            Ordering::of_subset(&s, vec![1, 2]),
            Err(ZnError::NotAPermutation)
        );
    }

    #[test]
    fn last_partial_sum_is_subset_sum() {
        let s = subset(8, &[1, 2, 3, 4, 5, 6]);
        let o = Ordering::of_subset(&s, vec![4, 2, 6, 1, 3, 5]).unwrap();
        assert_eq!(o.partial_sums().last(), s.sum());
    }

    #[test]
    fn sum_seen_large_modulus_paths() {
        for n in [100u64, (1 << 22) + 1] {
            let mut seen = SumSeen::for_modulus(n);
            assert!(seen.insert(99));
            assert!(!seen.insert(99));
            assert!(seen.contains(99));
            seen.remove(99);
            assert!(!seen.contains(99));
        }
    }

    #[test]
    fn mode_strings_round_trip() {
        for mode in [
            ValidationMode::DistinctOnly,
            ValidationMode::DistinctNonzero,
        ] {
            assert_eq!(mode.as_str().parse::<ValidationMode>().unwrap(), mode);
        }
        assert!("both".parse::<ValidationMode>().is_err());
    }
}
