//! Exact subset-sum counting over `Z_n` and prime fields, and the
//! sum-probability bounds.
//!
//! Everything here is exact: counts are big integers, probabilities and
//! bounds are big rationals. No floating point.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use thiserror::Error;

use crate::zn::Modulus;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountingError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("k must satisfy 1 <= k <= {max}, got {k}")]
    KOutOfRange { k: usize, max: u64 },
    #[error("l must satisfy 1 <= l <= n-2 = {max}, got {l}")]
    LOutOfRange { l: usize, max: u64 },
}

/// A prime modulus `p`; primality is checked deterministically on
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self, CountingError> {
        if is_prime_u64(p) {
            Ok(PrimeModulus(p))
        } else {
            Err(CountingError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn modulus(self) -> Modulus {
        Modulus::new(self.0).expect("primes are valid moduli")
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic Miller-Rabin for `u64`; the witness set below is known to be
/// exact for every 64-bit integer.
fn is_prime_u64(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if p == small {
            return true;
        }
        if p.is_multiple_of(small) {
            return false;
        }
    }
    let mut d = p - 1;
    let mut r = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, p);
        if x == 1 || x == p - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, p);
            if x == p - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Exact counts of `k`-subsets by their element sum mod `n`.
///
/// With `include_zero` the universe is all of `Z_n`, otherwise `Z_n \ {0}`.
/// The counts always total `C(n, k)` respectively `C(n-1, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumCountTable {
    n: u64,
    k: usize,
    include_zero: bool,
    counts: Vec<BigUint>,
}

impl SumCountTable {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn include_zero(&self) -> bool {
        self.include_zero
    }

    /// The number of `k`-subsets whose sum is `alpha`.
    pub fn count(&self, alpha: u64) -> &BigUint {
        &self.counts[alpha as usize]
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn max_count(&self) -> &BigUint {
        self.counts.iter().max().expect("n >= 2 residues")
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

/// Builds the exact table by dynamic programming over the elements in
/// increasing order, with state (number chosen, sum residue). Runs in
/// `O(n^2 k)` big-integer additions instead of enumerating subsets.
pub fn sum_count_table(n: Modulus, k: usize, include_zero: bool) -> SumCountTable {
    let n_val = n.get();
    let size = n_val as usize;
    let zero = BigUint::from(0u32);
    // dp[c][r]: subsets of size c with sum r among the elements seen so far
    let mut dp: Vec<Vec<BigUint>> = vec![vec![zero.clone(); size]; k + 1];
    dp[0][0] = BigUint::from(1u32);
    let first = if include_zero { 0 } else { 1 };
    for e in first..n_val {
        for c in (1..=k).rev() {
            for r in 0..size {
                let from = &dp[c - 1][r];
                if *from == zero {
                    continue;
                }
                let to = (r as u64 + e) % n_val;
                let add = from.clone();
                dp[c][to as usize] += add;
            }
        }
    }
    let counts = dp.pop().expect("k+1 layers");
    let table = SumCountTable {
        n: n_val,
        k,
        include_zero,
        counts,
    };
    let universe = if include_zero { n_val } else { n_val - 1 };
    assert_eq!(
        table.total(),
        binomial(universe, k as u64),
        "table totals must match the binomial coefficient"
    );
    table
}

/// Closed form `N_k(alpha) = C(p, k) / p` for the count of `k`-subsets of the
/// whole field with a given sum. The quotient is exact for `1 <= k <= p-1`
/// (asserted); `k = p` is rejected as the degenerate whole-set case.
pub fn nk_closed_form(p: PrimeModulus, k: usize) -> Result<BigUint, CountingError> {
    let pv = p.get();
    if k < 1 || k as u64 > pv - 1 {
        return Err(CountingError::KOutOfRange { k, max: pv - 1 });
    }
    let c = binomial(pv, k as u64);
    let p_big = BigUint::from(pv);
    assert_eq!(
        &c % &p_big,
        BigUint::from(0u32),
        "C(p,k) must be divisible by p for 1 <= k <= p-1"
    );
    Ok(c / p_big)
}

/// Exact pair `(N_k*(0), N_k*(alpha))` for `alpha != 0`: the counts of
/// `k`-subsets of the nonzero residues summing to zero and to any fixed
/// nonzero value.
///
/// Derived from the linear system
///
/// ```text
/// N_k*(0) + (p-1) N_k*(alpha) = C(p-1, k)
/// N_k*(0) - N_k*(alpha)       = +1 if k even, -1 if k odd
/// ```
///
/// which gives `N_k*(0) = (C(p-1,k) + (p-1))/p` for even `k` and
/// `(C(p-1,k) - (p-1))/p` for odd `k`. The often-quoted variant with a
/// constant of 1 instead of `p-1` is wrong: at `p=5, k=2` it yields the
/// non-integer 7/5 while direct enumeration gives `N_2*(0) = 2`.
pub fn nk_star_pair(p: PrimeModulus, k: usize) -> Result<(BigUint, BigUint), CountingError> {
    let pv = p.get();
    if k < 1 || k as u64 > pv - 1 {
        return Err(CountingError::KOutOfRange { k, max: pv - 1 });
    }
    let c = binomial(pv - 1, k as u64);
    let p_big = BigUint::from(pv);
    let p_minus_1 = BigUint::from(pv - 1);
    let one = BigUint::from(1u32);
    let (at_zero, at_nonzero) = if k.is_multiple_of(2) {
        // N*(0) = N*(alpha) + 1
        let num = &c + &p_minus_1;
        assert_eq!(&num % &p_big, BigUint::from(0u32));
        let at_zero = num / &p_big;
        let at_nonzero = &at_zero - &one;
        (at_zero, at_nonzero)
    } else {
        // N*(0) = N*(alpha) - 1
        let num = &c + &one;
        assert_eq!(&num % &p_big, BigUint::from(0u32));
        let at_nonzero = num / &p_big;
        let at_zero = &at_nonzero - &one;
        (at_zero, at_nonzero)
    };
    debug_assert_eq!(
        &at_zero + BigUint::from(pv - 1) * &at_nonzero,
        c,
        "pair must account for every k-subset"
    );
    Ok((at_zero, at_nonzero))
}

/// What a [`BoundCheckReport`] verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundCheck {
    /// Max over targets t of P[sum of a random l-subset = t], against 2/n.
    SumProbability { l: usize },
    /// Fraction of k-subsets with no valid ordering, against k(k-1)/n.
    BadSubsetFraction { k: usize, bad_count: u64 },
}

/// An exact-rational bound verification: the maximum observed value, the
/// bound it must stay under, and whether it does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheckReport {
    pub n: u64,
    pub check: BoundCheck,
    pub max_observed: BigRational,
    pub bound: BigRational,
    pub pass: bool,
}

impl fmt::Display for BoundCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match &self.check {
            BoundCheck::SumProbability { l } => format!("sum-probability n={} l={l}", self.n),
            BoundCheck::BadSubsetFraction { k, bad_count } => {
                format!("bad-subset-fraction n={} k={k} bad={bad_count}", self.n)
            }
        };
        write!(
            f,
            "{what}: max {} vs bound {} -> {}",
            self.max_observed,
            self.bound,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Checks that no target sum is hit by more than a `2/n` fraction of the
/// `l`-subsets of `Z_n \ {0}`, exactly. Valid for `1 <= l <= n-2`.
pub fn max_sum_probability(n: Modulus, l: usize) -> Result<BoundCheckReport, CountingError> {
    let n_val = n.get();
    if l < 1 || l as u64 > n_val - 2 {
        return Err(CountingError::LOutOfRange {
            l,
            max: n_val.saturating_sub(2),
        });
    }
    let table = sum_count_table(n, l, false);
    let max_observed = ratio(table.max_count().clone(), binomial(n_val - 1, l as u64));
    let bound = ratio(BigUint::from(2u32), BigUint::from(n_val));
    let pass = max_observed <= bound;
    Ok(BoundCheckReport {
        n: n_val,
        check: BoundCheck::SumProbability { l },
        max_observed,
        bound,
        pass,
    })
}

/// Checks a sweep-measured count of unorderable `k`-subsets against the
/// `k(k-1)/n` bound, exactly.
pub fn bad_subset_bound_check(n: Modulus, k: usize, bad_count: u64) -> BoundCheckReport {
    let n_val = n.get();
    let total = binomial(n_val - 1, k as u64);
    let max_observed = if total == BigUint::from(0u32) {
        // no k-subsets at all; the fraction is vacuously 0
        BigRational::from(BigInt::from(0))
    } else {
        ratio(BigUint::from(bad_count), total)
    };
    let k_u64 = k as u64;
    let bound_numerator = if k_u64 == 0 {
        BigUint::from(0u32)
    } else {
        BigUint::from(k_u64) * BigUint::from(k_u64 - 1)
    };
    let bound = ratio(bound_numerator, BigUint::from(n_val));
    let pass = max_observed <= bound;
    BoundCheckReport {
        n: n_val,
        check: BoundCheck::BadSubsetFraction { k, bad_count },
        max_observed,
        bound,
        pass,
    }
}
