//! Bounded constructive solver for subsets of size at most 6.
//!
//! The solver branches on the number `p` of inverse pairs `{x, -x}` in the
//! subset. Each branch fixes an initial arrangement (found by scanning
//! permutations in lexicographic order for the branch's entry condition),
//! computes which partial-sum collisions are present, checks that the
//! collision pattern is one the case analysis allows, and applies the
//! prescribed reordering for that pattern. Every branch terminates after a
//! bounded number of candidate orderings (at most `6!` scan steps plus two
//! reorderings); there is no unbounded search.
//!
//! Any state outside the case analysis (an illegal collision pattern, an
//! exhausted scan, or a final ordering that fails validation) is reported as
//! [`SolverError::InternalCaseViolation`]: it would mean the analysis was
//! transcribed wrongly, never a legitimate runtime outcome.

use crate::solvers::{next_permutation, SolverError};
use crate::zn::{valid_partial_sums, Ordering, Subset, ValidationMode};

/// Returns an ordering of `subset` with distinct partial sums, for
/// `|subset| <= 6`, in a bounded number of steps.
pub fn constructive_small(subset: &Subset) -> Result<Ordering, SolverError> {
    constructive_small_traced(subset).map(|(ordering, _)| ordering)
}

/// As [`constructive_small`], also reporting how many candidate orderings the
/// decision tree evaluated (always at least 1).
pub fn constructive_small_traced(subset: &Subset) -> Result<(Ordering, u64), SolverError> {
    let k = subset.len();
    if k > 6 {
        return Err(SolverError::SizeTooLarge(k));
    }
    let n = subset.modulus().get();
    let elems = subset.elements();
    let p = subset.inverse_pair_count();
    let mut tries = 0u64;
    let sequence = match (k, p) {
        (1..=3, _) => tiny(elems, n, &mut tries)?,
        (4, 0) => k4_p0(elems, n, &mut tries)?,
        (4, 1) => k4_p1(elems, n, &mut tries)?,
        (4, 2) => k4_p2(elems, n, &mut tries)?,
        (5, 0) => k5_p0(elems, n, &mut tries)?,
        (5, 1) => k5_p1(elems, n, &mut tries)?,
        (5, 2) => k5_p2(elems, n, &mut tries)?,
        (6, 0) => k6_p0(elems, n, &mut tries)?,
        (6, 1) => k6_p1(elems, n, &mut tries)?,
        (6, 2) => k6_p2(elems, n, &mut tries)?,
        (6, 3) => k6_p3(elems, n, &mut tries)?,
        _ => {
            return Err(internal(format!(
                "impossible inverse-pair count {p} for k={k}"
            )))
        }
    };
    let ordering = Ordering::of_subset(subset, sequence)
        .map_err(|e| internal(format!("result is not a permutation of the input: {e}")))?;
    if !ordering.is_sequencing(ValidationMode::DistinctOnly) {
        return Err(internal(format!(
            "final ordering {ordering} mod {n} has colliding partial sums"
        )));
    }
    Ok((ordering, tries.max(1)))
}

fn internal(msg: impl Into<String>) -> SolverError {
    SolverError::InternalCaseViolation(msg.into())
}

/// First permutation of `elems` in lexicographic order satisfying `pred`;
/// each inspected permutation counts as one evaluated candidate.
fn scan(elems: &[u64], tries: &mut u64, mut pred: impl FnMut(&[u64]) -> bool) -> Option<Vec<u64>> {
    let mut perm = elems.to_vec();
    loop {
        *tries += 1;
        if pred(&perm) {
            return Some(perm);
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

fn psums(seq: &[u64], n: u64) -> Vec<u64> {
    let mut acc = 0u64;
    seq.iter()
        .map(|&a| {
            acc += a;
            if acc >= n {
                acc -= n;
            }
            acc
        })
        .collect()
}

/// First `m` partial sums pairwise distinct.
fn prefix_distinct(seq: &[u64], n: u64, m: usize) -> bool {
    let sums = psums(&seq[..m], n);
    for i in 0..m {
        for j in i + 1..m {
            if sums[i] == sums[j] {
                return false;
            }
        }
    }
    true
}

fn reorder(o: &[u64], idx: &[usize]) -> Vec<u64> {
    idx.iter().map(|&i| o[i]).collect()
}

/// All colliding partial-sum pairs `(i, j)` (1-based, `i < j`), ascending.
fn collision_set(sums: &[u64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..sums.len() {
        for j in i + 1..sums.len() {
            if sums[i] == sums[j] {
                out.push((i + 1, j + 1));
            }
        }
    }
    out
}

/// The case analyses allow only specific collision patterns; anything else
/// is a violated exclusivity claim.
fn ensure_legal(
    cols: &[(usize, usize)],
    legal: &[&[(usize, usize)]],
    ctx: &str,
) -> Result<(), SolverError> {
    if legal.contains(&cols) {
        Ok(())
    } else {
        Err(internal(format!(
            "{ctx}: unexpected collision pattern {cols:?}"
        )))
    }
}

#[inline]
fn inverses(n: u64, a: u64, b: u64) -> bool {
    (a + b).is_multiple_of(n)
}

/// k <= 3: every such subset has a valid ordering; take the first among at
/// most 3! candidates.
fn tiny(elems: &[u64], n: u64, tries: &mut u64) -> Result<Vec<u64>, SolverError> {
    scan(elems, tries, |perm| {
        valid_partial_sums(perm, n, ValidationMode::DistinctOnly)
    })
    .ok_or_else(|| {
        internal(format!(
            "k={}: scan exhausted without a valid ordering",
            elems.len()
        ))
    })
}

/// k = 4, no inverse pairs: with s1..s3 distinct only s1 = s4 can fail, and
/// swapping the first two elements repairs it.
fn k4_p0(elems: &[u64], n: u64, tries: &mut u64) -> Result<Vec<u64>, SolverError> {
    let o = scan(elems, tries, |perm| prefix_distinct(perm, n, 3))
        .ok_or_else(|| internal("k=4 p=0: no arrangement with s1..s3 distinct"))?;
    let cols = collision_set(&psums(&o, n));
    ensure_legal(&cols, &[&[], &[(1, 4)]], "k=4 p=0")?;
    if cols.is_empty() {
        Ok(o)
    } else {
        *tries += 1;
        Ok(reorder(&o, &[1, 0, 2, 3]))
    }
}

/// k = 4, one pair {x,-x}: the arrangement (z, x, y, -x) always works.
fn k4_p1(elems: &[u64], n: u64, tries: &mut u64) -> Result<Vec<u64>, SolverError> {
    let o = scan(elems, tries, |p| inverses(n, p[1], p[3]))
        .ok_or_else(|| internal("k=4 p=1: cannot place the inverse pair at positions 2 and 4"))?;
    ensure_legal(&collision_set(&psums(&o, n)), &[&[]], "k=4 p=1")?;
    Ok(o)
}

/// k = 4, two pairs: the arrangement (x, y, -x, -y) always works.
fn k4_p2(elems: &[u64], n: u64, tries: &mut u64) -> Result<Vec<u64>, SolverError> {
    let o = scan(elems, tries, |p| {
        inverses(n, p[0], p[2]) && inverses(n, p[1], p[3])
    })
    .ok_or_else(|| internal("k=4 p=2: cannot interleave the two inverse pairs"))?;
    ensure_legal(&collision_set(&psums(&o, n)), &[&[]], "k=4 p=2")?;
    Ok(o)
}

/// k = 5, no inverse pairs: only s1=s4, s2=s5 or s1=s5 can fail, and they are
/// mutually exclusive. Each has a prescribed repair; the s1=s5 repair has one
/// follow-up case.
fn k5_p0(elems: &[u64], n: u64, tries: &mut u64) -> Result<Vec<u64>, SolverError> {
    let o = scan(elems, tries, |perm| prefix_distinct(perm, n, 3))
        .ok_or_else(|| internal("k=5 p=0: no arrangement with s1..s3 distinct"))?;
    let cols = collision_set(&psums(&o, n));
    ensure_legal(&cols, &[&[], &[(1, 4)], &[(2, 5)], &[(1, 5)]], "k=5 p=0")?;
    match cols.as_slice() {
        [] => Ok(o),
        [(1, 4)] => {
            // a2+a3+a4 = 0: move a4 behind a5
            *tries += 1;
            Ok(reorder(&o, &[0, 1, 2, 4, 3]))
        }
        [(2, 5)] => {
            *tries += 1;
            Ok(reorder(&o, &[0, 2, 1, 3, 4]))
        }
        [(1, 5)] => {
            // a2+..+a5 = 0: swap the first two; s1'=s4' may then need one
            // more swap of a1 and a3
            *tries += 1;
            let a1 = reorder(&o, &[1, 0, 2, 3, 4]);
            let s1 = psums(&a1, n);
            if s1[0] == s1[3] {
                *tries += 1;
                Ok(reorder(&o, &[2, 1, 0, 3, 4]))
            } else {
                Ok(a1)
            }
        }
        _ => unreachable!("legality was checked"),
    }
}

/// k = 5, one pair {x,-x}: in (z, x, y, -x, w) only s2 = s5 (x = y+w) can
/// fail, and swapping x with -x repairs it.
fn k5_p1(elems: &[u64], n: u64, tries: &mut u64) -> Result<Vec<u64>, SolverError> {
    let o = scan(elems, tries, |p| inverses(n, p[1], p[3]))
        .ok_or_else(|| internal("k=5 p=1: cannot place the inverse pair at positions 2 and 4"))?;
    let cols = collision_set(&psums(&o, n));
    ensure_legal(&cols, &[&[], &[(2, 5)]], "k=5 p=1")?;
    if cols.is_empty() {
        Ok(o)
    } else {
        *tries += 1;
        Ok(reorder(&o, &[0, 3, 2, 1, 4]))
    }
}

/// k = 5, two pairs: (x, y, z, -y, -x) fails only when x = z-y, and then
/// (-x, y, z, -y, x) cannot fail too.
fn k5_p2(elems: &[u64], n: u64, tries: &mut u64) -> Result<Vec<u64>, SolverError> {
    let o = scan(elems, tries, |p| {
        inverses(n, p[0], p[4]) && inverses(n, p[1], p[3])
    })
    .ok_or_else(|| internal("k=5 p=2: cannot nest the two inverse pairs"))?;
    let cols = collision_set(&psums(&o, n));
    ensure_legal(&cols, &[&[], &[(2, 5)]], "k=5 p=2")?;
    if cols.is_empty() {
        Ok(o)
    } else {
        *tries += 1;
        Ok(reorder(&o, &[4, 1, 2, 3, 0]))
    }
}

/// k = 6, no inverse pairs, entry arrangement (u,v,w,x,y,z) with s1..s4
/// distinct. Possible collision patterns and their repairs:
///
/// 1. s1=s5 and s3=s6 -> (u,v,x,w,z,y)
/// 2. s1=s5           -> (u,v,w,x,z,y), then s2'=s5' -> (u,w,v,x,z,y)
/// 3. s3=s6           -> (u,v,x,w,y,z)
/// 4. s1=s6           -> (v,u,w,x,y,z), then s1'=s4' -> (v,u,w,y,x,z)
///    or s1'=s5' -> (v,u,w,y,z,x) (mutually exclusive)
/// 5. s2=s5           -> (u,v,w,x,z,y), then s1'=s5' -> (u,v,w,z,y,x)
/// 6. s2=s6           -> (u,w,v,x,y,z), then s2'=s5' -> (u,w,v,x,z,y)
fn k6_p0(elems: &[u64], n: u64, tries: &mut u64) -> Result<Vec<u64>, SolverError> {
    let o = scan(elems, tries, |perm| prefix_distinct(perm, n, 4))
        .ok_or_else(|| internal("k=6 p=0: no arrangement with s1..s4 distinct"))?;
    let cols = collision_set(&psums(&o, n));
    ensure_legal(
        &cols,
        &[
            &[],
            &[(1, 5), (3, 6)],
            &[(1, 5)],
            &[(3, 6)],
            &[(1, 6)],
            &[(2, 5)],
            &[(2, 6)],
        ],
        "k=6 p=0",
    )?;
    match cols.as_slice() {
        [] => Ok(o),
        [(1, 5), (3, 6)] => {
            *tries += 1;
            Ok(reorder(&o, &[0, 1, 3, 2, 5, 4]))
        }
        [(1, 5)] => {
            *tries += 1;
            let a1 = reorder(&o, &[0, 1, 2, 3, 5, 4]);
            let s1 = psums(&a1, n);
            if s1[1] == s1[4] {
                *tries += 1;
                Ok(reorder(&o, &[0, 2, 1, 3, 5, 4]))
            } else {
                Ok(a1)
            }
        }
        [(3, 6)] => {
            *tries += 1;
            Ok(reorder(&o, &[0, 1, 3, 2, 4, 5]))
        }
        [(1, 6)] => {
            *tries += 1;
            let a1 = reorder(&o, &[1, 0, 2, 3, 4, 5]);
            let s1 = psums(&a1, n);
            let hits_s4 = s1[0] == s1[3];
            let hits_s5 = s1[0] == s1[4];
            if hits_s4 && hits_s5 {
                return Err(internal(
                    "k=6 p=0 case s1=s6: follow-up collisions must be exclusive",
                ));
            }
            if hits_s4 {
                *tries += 1;
                Ok(reorder(&o, &[1, 0, 2, 4, 3, 5]))
            } else if hits_s5 {
                *tries += 1;
                Ok(reorder(&o, &[1, 0, 2, 4, 5, 3]))
            } else {
                Ok(a1)
            }
        }
        [(2, 5)] => {
            *tries += 1;
            let a1 = reorder(&o, &[0, 1, 2, 3, 5, 4]);
            let s1 = psums(&a1, n);
            if s1[0] == s1[4] {
                *tries += 1;
                Ok(reorder(&o, &[0, 1, 2, 5, 4, 3]))
            } else {
                Ok(a1)
            }
        }
        [(2, 6)] => {
            *tries += 1;
            let a1 = reorder(&o, &[0, 2, 1, 3, 4, 5]);
            let s1 = psums(&a1, n);
            if s1[1] == s1[4] {
                *tries += 1;
                Ok(reorder(&o, &[0, 2, 1, 3, 5, 4]))
            } else {
                Ok(a1)
            }
        }
        _ => unreachable!("legality was checked"),
    }
}

/// k = 6, one pair, entry arrangement (x,v,-x,w,y,z). Nine collision
/// patterns can occur; each has a prescribed repair, three with a follow-up.
fn k6_p1(elems: &[u64], n: u64, tries: &mut u64) -> Result<Vec<u64>, SolverError> {
    // positions: x=0, v=1, -x=2, w=3, y=4, z=5
    let o = scan(elems, tries, |p| inverses(n, p[0], p[2]))
        .ok_or_else(|| internal("k=6 p=1: cannot place the inverse pair at positions 1 and 3"))?;
    let cols = collision_set(&psums(&o, n));
    ensure_legal(
        &cols,
        &[
            &[],
            &[(1, 4), (2, 6)],
            &[(1, 4), (3, 6)],
            &[(1, 4)],
            &[(2, 6)],
            &[(3, 6)],
            &[(1, 5), (3, 6)],
            &[(1, 5)],
            &[(1, 6)],
            &[(2, 5)],
        ],
        "k=6 p=1",
    )?;
    match cols.as_slice() {
        [] => Ok(o),
        // s1=s4 and s2=s6: (x,w,y,v,-x,z)
        [(1, 4), (2, 6)] => {
            *tries += 1;
            Ok(reorder(&o, &[0, 3, 4, 1, 2, 5]))
        }
        // s1=s4 and s3=s6: (x,v,w,y,-x,z)
        [(1, 4), (3, 6)] => {
            *tries += 1;
            Ok(reorder(&o, &[0, 1, 3, 4, 2, 5]))
        }
        // s1=s4 alone: (x,v,w,y,-x,z), then s3'=s6' -> (x,w,y,v,-x,z)
        [(1, 4)] => {
            *tries += 1;
            let a1 = reorder(&o, &[0, 1, 3, 4, 2, 5]);
            let s1 = psums(&a1, n);
            if s1[2] == s1[5] {
                *tries += 1;
                Ok(reorder(&o, &[0, 3, 4, 1, 2, 5]))
            } else {
                Ok(a1)
            }
        }
        // s2=s6: (x,w,v,-x,y,z), then s2'=s5' -> (x,w,v,-x,z,y)
        [(2, 6)] => {
            *tries += 1;
            let a1 = reorder(&o, &[0, 3, 1, 2, 4, 5]);
            let s1 = psums(&a1, n);
            if s1[1] == s1[4] {
                *tries += 1;
                Ok(reorder(&o, &[0, 3, 1, 2, 5, 4]))
            } else {
                Ok(a1)
            }
        }
        // s3=s6 with s1 clear: (x,v,w,-x,y,z)
        [(3, 6)] => {
            *tries += 1;
            Ok(reorder(&o, &[0, 1, 3, 2, 4, 5]))
        }
        // s1=s5 and s3=s6: (x,v,w,-x,z,y)
        [(1, 5), (3, 6)] => {
            *tries += 1;
            Ok(reorder(&o, &[0, 1, 3, 2, 5, 4]))
        }
        // s1=s5 alone: (x,v,-x,w,z,y), then s2'=s5' -> (x,v,z,-x,y,w)
        [(1, 5)] => {
            *tries += 1;
            let a1 = reorder(&o, &[0, 1, 2, 3, 5, 4]);
            let s1 = psums(&a1, n);
            if s1[1] == s1[4] {
                *tries += 1;
                Ok(reorder(&o, &[0, 1, 5, 2, 4, 3]))
            } else {
                Ok(a1)
            }
        }
        // s1=s6: (v,x,w,-x,y,z)
        [(1, 6)] => {
            *tries += 1;
            Ok(reorder(&o, &[1, 0, 3, 2, 4, 5]))
        }
        // s2=s5: (x,v,-x,w,z,y), then s1'=s5' -> (v,x,w,-x,z,y)
        [(2, 5)] => {
            *tries += 1;
            let a1 = reorder(&o, &[0, 1, 2, 3, 5, 4]);
            let s1 = psums(&a1, n);
            if s1[0] == s1[4] {
                *tries += 1;
                Ok(reorder(&o, &[1, 0, 3, 2, 5, 4]))
            } else {
                Ok(a1)
            }
        }
        _ => unreachable!("legality was checked"),
    }
}

/// k = 6, two pairs, entry arrangement (x,y,-x,-y,w,z). Only s1=s6, s2=s5,
/// s2=s6 or s3=s6 can occur, mutually exclusively.
fn k6_p2(elems: &[u64], n: u64, tries: &mut u64) -> Result<Vec<u64>, SolverError> {
    // positions: x=0, y=1, -x=2, -y=3, w=4, z=5
    let o = scan(elems, tries, |p| {
        inverses(n, p[0], p[2]) && inverses(n, p[1], p[3])
    })
    .ok_or_else(|| internal("k=6 p=2: cannot interleave the two inverse pairs"))?;
    let cols = collision_set(&psums(&o, n));
    ensure_legal(
        &cols,
        &[&[], &[(1, 6)], &[(2, 5)], &[(2, 6)], &[(3, 6)]],
        "k=6 p=2",
    )?;
    match cols.as_slice() {
        [] => Ok(o),
        // s1=s6 (x = w+z): (w,x,y,-x,z,-y)
        [(1, 6)] => {
            *tries += 1;
            Ok(reorder(&o, &[4, 0, 1, 2, 5, 3]))
        }
        // s2=s5 (w = x+y): (x,y,-x,-y,z,w)
        [(2, 5)] => {
            *tries += 1;
            Ok(reorder(&o, &[0, 1, 2, 3, 5, 4]))
        }
        // s2=s6: (x,z,-y,w,y,-x), then s3'=s6' -> (x,w,y,z,-x,-y)
        [(2, 6)] => {
            *tries += 1;
            let a1 = reorder(&o, &[0, 5, 3, 4, 1, 2]);
            let s1 = psums(&a1, n);
            if s1[2] == s1[5] {
                *tries += 1;
                Ok(reorder(&o, &[0, 4, 1, 5, 2, 3]))
            } else {
                Ok(a1)
            }
        }
        // s3=s6 (y = w+z): (w,x,y,-x,z,-y), then s2'=s5' -> (x,y,w,-x,z,-y)
        [(3, 6)] => {
            *tries += 1;
            let a1 = reorder(&o, &[4, 0, 1, 2, 5, 3]);
            let s1 = psums(&a1, n);
            if s1[1] == s1[4] {
                *tries += 1;
                Ok(reorder(&o, &[0, 1, 4, 2, 5, 3]))
            } else {
                Ok(a1)
            }
        }
        _ => unreachable!("legality was checked"),
    }
}

/// k = 6, three pairs, entry arrangement (x,y,z,-x,-y,-z). Only s1=s4, s2=s5
/// or s3=s6 can occur, mutually exclusively; each has a one-step repair.
fn k6_p3(elems: &[u64], n: u64, tries: &mut u64) -> Result<Vec<u64>, SolverError> {
    // positions: x=0, y=1, z=2, -x=3, -y=4, -z=5
    let o = scan(elems, tries, |p| {
        inverses(n, p[0], p[3]) && inverses(n, p[1], p[4]) && inverses(n, p[2], p[5])
    })
    .ok_or_else(|| internal("k=6 p=3: cannot arrange the three inverse pairs"))?;
    let cols = collision_set(&psums(&o, n));
    ensure_legal(&cols, &[&[], &[(1, 4)], &[(2, 5)], &[(3, 6)]], "k=6 p=3")?;
    match cols.as_slice() {
        [] => Ok(o),
        // s1=s4 (x = y+z): (x,y,z,-y,-x,-z)
        [(1, 4)] => {
            *tries += 1;
            Ok(reorder(&o, &[0, 1, 2, 4, 3, 5]))
        }
        // s2=s5 (z = x+y): (x,-y,z,y,-x,-z)
        [(2, 5)] => {
            *tries += 1;
            Ok(reorder(&o, &[0, 4, 2, 1, 3, 5]))
        }
        // s3=s6 (x+y+z = 0): (x,y,-z,-x,z,-y)
        [(3, 6)] => {
            *tries += 1;
            Ok(reorder(&o, &[0, 1, 5, 3, 2, 4]))
        }
        _ => unreachable!("legality was checked"),
    }
}
