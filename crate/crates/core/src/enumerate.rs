//! Deterministic enumeration of types and sorted multiplicity profiles.

use crate::combinatorics::binomial;
use num_traits::ToPrimitive;

/// Upper limit on objects any exhaustive engine will enumerate.
pub const MAX_ENUMERATION: u64 = 10_000_000;

/// Number of type vectors of length-`n` sequences over `[k]`: `C(n+k-1, k-1)`.
pub fn type_count(k: usize, n: usize) -> u64 {
    binomial((n + k - 1) as u64, k as u64 - 1).to_u64().unwrap_or(u64::MAX)
}

/// `k^n`, saturating.
pub fn sequence_count(k: usize, n: usize) -> u64 {
    (k as u64).checked_pow(n as u32).unwrap_or(u64::MAX)
}

/// Calls `f` on every type vector `(mu_1, ..., mu_k)` with `sum mu = n`, in
/// lexicographically decreasing order of `mu`.
pub fn for_each_type(k: usize, n: usize, mut f: impl FnMut(&[usize])) {
    fn rec(mu: &mut Vec<usize>, pos: usize, rem: usize, f: &mut dyn FnMut(&[usize])) {
        if pos + 1 == mu.len() {
            mu[pos] = rem;
            f(mu);
            return;
        }
        for m in (0..=rem).rev() {
            mu[pos] = m;
            rec(mu, pos + 1, rem - m, f);
        }
    }
    if k == 0 {
        return;
    }
    let mut mu = vec![0usize; k];
    rec(&mut mu, 0, n, &mut f);
}

/// Calls `f` on every partition of `n` into at most `max_parts` positive
/// parts, given as a nonincreasing slice, in reverse lexicographic order.
pub fn for_each_partition(n: usize, max_parts: usize, mut f: impl FnMut(&[usize])) {
    fn rec(parts: &mut Vec<usize>, rem: usize, cap: usize, max_parts: usize, f: &mut dyn FnMut(&[usize])) {
        if rem == 0 {
            f(parts);
            return;
        }
        if parts.len() == max_parts {
            return;
        }
        for p in (1..=cap.min(rem)).rev() {
            parts.push(p);
            rec(parts, rem - p, p, max_parts, f);
            parts.pop();
        }
    }
    let mut parts = Vec::new();
    rec(&mut parts, n, n, max_parts, &mut f);
}

/// Calls `f` on every sequence in `[0, k)^n`, in lexicographic order.
pub fn for_each_sequence(k: usize, n: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 {
        return;
    }
    let mut seq = vec![0usize; n];
    loop {
        f(&seq);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            seq[i] += 1;
            if seq[i] < k {
                break;
            }
            seq[i] = 0;
        }
    }
}
