//! Orderings of subsets of `Z_n \ {0}` whose partial sums are all distinct.
//!
//! The crate is organized around four concerns:
//!
//! - [`zn`]: the data model (modulus, subset, ordering, partial sums) and the
//!   validators for the plain (distinct sums) and strong (distinct nonzero
//!   sums) conditions;
//! - [`solvers`]: four ways to produce a sequencing — an exhaustive
//!   backtracking oracle, seeded random permutation search, a bounded
//!   constructive procedure for subsets of size at most 6, and a greedy
//!   prefix builder with a guaranteed `ceil((k+1)/2)` floor — plus the
//!   append-one-element reduction from strong to plain sequencings and a
//!   census of orderable sub-subsets;
//! - [`counting`]: exact subset-sum count tables over `Z_n` and prime
//!   fields, their closed forms, and the `2/n` and `k(k-1)/n` bound checks,
//!   all in big-integer/rational arithmetic;
//! - [`harness`]: sweeps that verify every subset of `Z_n \ {0}` with a
//!   strategy cascade, persist re-checkable certificates, aggregate retry
//!   histograms into digestable reports, and support deterministic
//!   parallelism and checkpointed resumption.
//!
//! All types are immutable after construction and all operations are pure,
//! so values can be shared freely across workers.

pub mod counting;
pub mod harness;
pub mod rng;
pub mod solvers;
pub mod zn;

pub use counting::{
    bad_subset_bound_check, binomial, max_sum_probability, nk_closed_form, nk_star_pair,
    sum_count_table, BoundCheck, BoundCheckReport, CountingError, PrimeModulus, SumCountTable,
};
pub use harness::{
    merge_reports, sweep, sweep_rank_range, sweep_resumable, universe_max_rank,
    verify_certificates, Certificate, HarnessError, SweepConfig, SweepProgress, SweepReport,
};
pub use solvers::{
    alspach_reduction, constructive_small, count_orderable_subsets, exhaustive_sequencing,
    greedy_prefix, random_sequencing, GreedyResult, SolveMethod, SolveOutcome, SolverError,
};
pub use zn::{Modulus, Ordering, PartialSumProfile, Subset, ValidationMode, ZnError};
