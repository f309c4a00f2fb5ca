//! Property-based invariants over randomly generated subsets and orderings.

use proptest::prelude::*;

use znseq::harness::{merge_reports, sweep_rank_range, universe_max_rank, SweepConfig};
use znseq::rng::SplitMix64;
use znseq::zn::{Modulus, Ordering, Subset, ValidationMode};
use znseq::Certificate;

/// A random modulus, a random subset of its nonzero residues, and a shuffle
/// seed for ordering the elements.
fn subset_strategy() -> impl Strategy<Value = (u64, Vec<u64>, u64)> {
    (2u64..=64)
        .prop_flat_map(|n| {
            let max_len = ((n - 1) as usize).min(10);
            (
                Just(n),
                proptest::collection::btree_set(1..n, 1..=max_len),
                any::<u64>(),
            )
        })
        .prop_map(|(n, set, seed)| (n, set.into_iter().collect(), seed))
}

fn make_ordering(n: u64, elements: &[u64], seed: u64) -> Ordering {
    let mut sequence = elements.to_vec();
    SplitMix64::new(seed).shuffle(&mut sequence);
    Ordering::new(Modulus::new(n).unwrap(), sequence).unwrap()
}

proptest! {
    #[test]
    fn validators_agree((n, elements, seed) in subset_strategy()) {
        let ordering = make_ordering(n, &elements, seed);
        for mode in [ValidationMode::DistinctOnly, ValidationMode::DistinctNonzero] {
            prop_assert_eq!(
                ordering.is_sequencing(mode),
                ordering.is_sequencing_via_runs(mode)
            );
        }
    }

    #[test]
    fn final_partial_sum_is_the_subset_sum((n, elements, seed) in subset_strategy()) {
        let ordering = make_ordering(n, &elements, seed);
        let subset = Subset::new(Modulus::new(n).unwrap(), elements).unwrap();
        prop_assert_eq!(ordering.partial_sums().last(), subset.sum());
    }

    #[test]
    fn runs_from_position_one_are_partial_sums((n, elements, seed) in subset_strategy()) {
        let ordering = make_ordering(n, &elements, seed);
        let sums = ordering.partial_sums();
        for j in 1..=ordering.len() {
            prop_assert_eq!(ordering.run(1, j), sums.sums()[j - 1]);
        }
    }

    #[test]
    fn single_element_orderings_always_pass(n in 2u64..=1000, pick in any::<u64>()) {
        let element = 1 + pick % (n - 1);
        let ordering = Ordering::new(Modulus::new(n).unwrap(), vec![element]).unwrap();
        prop_assert!(ordering.is_sequencing(ValidationMode::DistinctOnly));
        prop_assert!(ordering.is_sequencing(ValidationMode::DistinctNonzero));
    }

    #[test]
    fn certificate_lines_round_trip((n, elements, seed) in subset_strategy(), tries in 1u64..10_000) {
        let ordering = make_ordering(n, &elements, seed);
        let cert = Certificate {
            n,
            mode: ValidationMode::DistinctOnly,
            set: elements,
            ordering: ordering.sequence().to_vec(),
            method: znseq::SolveMethod::Random,
            tries,
        };
        let parsed = Certificate::parse_line(&cert.to_line()).unwrap();
        prop_assert_eq!(parsed, cert);
    }

    #[test]
    fn report_merge_commutes_on_random_splits(split in 1u64..127, seed in any::<u64>()) {
        let mut config = SweepConfig::new(8, ValidationMode::DistinctOnly);
        config.seed = seed;
        let max = universe_max_rank(8);
        let left = sweep_rank_range(&config, 1, split).unwrap();
        let right = sweep_rank_range(&config, split + 1, max).unwrap();
        let ab = merge_reports(&left, &right).unwrap();
        let ba = merge_reports(&right, &left).unwrap();
        prop_assert_eq!(&ab, &ba);
        prop_assert_eq!(&ab.digest, &ba.digest);
        prop_assert_eq!(ab.total, max);
    }

    #[test]
    fn report_merge_is_associative(cuts in proptest::collection::btree_set(1u64..126, 2)) {
        let config = SweepConfig::new(8, ValidationMode::DistinctOnly);
        let max = universe_max_rank(8);
        let cuts: Vec<u64> = cuts.into_iter().collect();
        let (a, b) = (cuts[0], cuts[1]);
        let first = sweep_rank_range(&config, 1, a).unwrap();
        let second = sweep_rank_range(&config, a + 1, b).unwrap();
        let third = sweep_rank_range(&config, b + 1, max).unwrap();
        let left_heavy = merge_reports(&merge_reports(&first, &second).unwrap(), &third).unwrap();
        let right_heavy = merge_reports(&first, &merge_reports(&second, &third).unwrap()).unwrap();
        prop_assert_eq!(&left_heavy, &right_heavy);
        prop_assert_eq!(left_heavy.total, max);
    }
}
