//! Exact ranking and unranking of the combinatorial objects the codec sends.
//!
//! Orders:
//! - subsets of `[0, k)`: colexicographic,
//! - positive compositions of `n`: lexicographic,
//! - arrangements of a multiset (sequences of a fixed type): lexicographic.
//!
//! All ranks are 0-based and exact; nothing in this module touches floating point.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

/// An exact count of combinatorial objects.
pub type BigCount = BigUint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RankError {
    #[error("subset must be strictly increasing with elements below {k}")]
    MalformedSubset { k: usize },
    #[error("composition parts must be positive")]
    ZeroPart,
    #[error("composition of {n} into {d} positive parts does not exist")]
    NoComposition { n: usize, d: usize },
    #[error("sequence does not have the declared type")]
    TypeMismatch,
    #[error("rank {rank} out of range (count {count})")]
    RankOutOfRange { rank: BigUint, count: BigUint },
}

/// `C(n, r)`, zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigCount {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 1..=r {
        acc *= n - r + i;
        acc /= i;
    }
    acc
}

/// `n! / prod_j counts_j!` with `n = sum counts`.
pub fn multinomial(counts: &[usize]) -> BigCount {
    let mut total = 0u64;
    let mut acc = BigUint::one();
    for &c in counts {
        total += c as u64;
        acc *= binomial(total, c as u64);
    }
    acc
}

/// Number of bits needed to index `[0, count)`: `ceil(log2(count))`, 0 for `count <= 1`.
pub fn index_bits(count: &BigUint) -> u64 {
    if count <= &BigUint::one() {
        0
    } else {
        (count - 1u32).bits()
    }
}

fn check_rank(rank: &BigUint, count: &BigUint) -> Result<(), RankError> {
    if rank >= count {
        return Err(RankError::RankOutOfRange {
            rank: rank.clone(),
            count: count.clone(),
        });
    }
    Ok(())
}

/// Colex rank of a strictly increasing subset of `[0, k)`: `sum_i C(s_i, i+1)`.
pub fn subset_rank(subset: &[usize], k: usize) -> Result<BigCount, RankError> {
    let malformed = subset.windows(2).any(|w| w[0] >= w[1]) || subset.last().is_some_and(|&s| s >= k);
    if malformed {
        return Err(RankError::MalformedSubset { k });
    }
    Ok(subset
        .iter()
        .enumerate()
        .map(|(i, &s)| binomial(s as u64, i as u64 + 1))
        .sum())
}

/// Inverse of [`subset_rank`] for `d`-subsets of `[0, k)`.
pub fn subset_unrank(rank: &BigUint, d: usize, k: usize) -> Result<Vec<usize>, RankError> {
    let count = binomial(k as u64, d as u64);
    check_rank(rank, &count)?;
    let mut out = vec![0usize; d];
    if d == 0 {
        return Ok(out);
    }
    let mut r = rank.clone();
    let mut i = d;
    let mut c = k - 1;
    // invariant: block == C(c, i)
    let mut block = binomial(c as u64, i as u64);
    loop {
        if block <= r {
            r -= &block;
            out[i - 1] = c;
            if i == 1 {
                break;
            }
            // C(c-1, i-1) = C(c, i) * i / c
            block = block * i / c;
            i -= 1;
        } else {
            // C(c-1, i) = C(c, i) * (c - i) / c
            block = block * (c - i) / c;
        }
        c -= 1;
    }
    debug_assert!(r.is_zero());
    Ok(out)
}

/// Lex rank of a composition of `n = sum parts` into `parts.len()` positive parts.
pub fn composition_rank(parts: &[usize]) -> Result<BigCount, RankError> {
    if parts.contains(&0) {
        return Err(RankError::ZeroPart);
    }
    let d = parts.len();
    let mut rem: usize = parts.iter().sum();
    if d == 0 {
        return Err(RankError::NoComposition { n: rem, d });
    }
    let mut rank = BigUint::zero();
    for (i, &c) in parts.iter().enumerate() {
        let left = d - i;
        if left == 1 {
            break;
        }
        if c > 1 {
            // sum_{j=1}^{c-1} C(rem-j-1, left-2), by the hockey-stick identity
            let m = (left - 1) as u64;
            rank += binomial(rem as u64 - 1, m) - binomial((rem - c) as u64, m);
        }
        rem -= c;
    }
    Ok(rank)
}

/// Inverse of [`composition_rank`].
pub fn composition_unrank(rank: &BigUint, n: usize, d: usize) -> Result<Vec<usize>, RankError> {
    if d == 0 || d > n {
        return Err(RankError::NoComposition { n, d });
    }
    let count = binomial(n as u64 - 1, d as u64 - 1);
    check_rank(rank, &count)?;
    let mut r = rank.clone();
    let mut rem = n;
    let mut parts = Vec::with_capacity(d);
    for i in 0..d {
        let left = d - i;
        if left == 1 {
            parts.push(rem);
            break;
        }
        let m = left - 2;
        let mut t = rem - 2; // C(t, m) counts completions when this part is 1
        let mut block = binomial(t as u64, m as u64);
        let mut part = 1;
        while block <= r {
            r -= &block;
            part += 1;
            // C(t-1, m) = C(t, m) * (t - m) / t
            block = block * (t - m) / t;
            t -= 1;
        }
        parts.push(part);
        rem -= part;
    }
    Ok(parts)
}

/// Lex rank of `sequence` among all sequences with symbol counts `counts`.
///
/// Symbols are 0-based indices into `counts`.
pub fn arrangement_rank(sequence: &[usize], counts: &[usize]) -> Result<BigCount, RankError> {
    let mut left = counts.to_vec();
    let mut seen = vec![0usize; counts.len()];
    for &s in sequence {
        if s >= counts.len() {
            return Err(RankError::TypeMismatch);
        }
        seen[s] += 1;
    }
    if seen != counts {
        return Err(RankError::TypeMismatch);
    }
    let mut remaining = sequence.len();
    let mut total = multinomial(counts);
    let mut rank = BigUint::zero();
    for &s in sequence {
        let before: usize = left[..s].iter().sum();
        if before > 0 {
            // each smaller symbol b opens total * left[b] / remaining sequences
            rank += &total * before / remaining;
        }
        total = total * left[s] / remaining;
        left[s] -= 1;
        remaining -= 1;
    }
    Ok(rank)
}

/// Inverse of [`arrangement_rank`].
pub fn arrangement_unrank(rank: &BigUint, counts: &[usize]) -> Result<Vec<usize>, RankError> {
    let mut total = multinomial(counts);
    check_rank(rank, &total)?;
    let mut left = counts.to_vec();
    let mut remaining: usize = counts.iter().sum();
    let mut r = rank.clone();
    let mut out = Vec::with_capacity(remaining);
    while remaining > 0 {
        for (s, slot) in left.iter_mut().enumerate() {
            if *slot == 0 {
                continue;
            }
            let (block, exact) = (&total * *slot).div_rem(&BigUint::from(remaining));
            debug_assert!(exact.is_zero());
            if r < block {
                out.push(s);
                total = block;
                *slot -= 1;
                break;
            }
            r -= block;
        }
        remaining -= 1;
    }
    Ok(out)
}
