//! Worst-case redundancy: exact Shtarkov sums `S(P) = sum_x max_{p in P} p(x)`
//! for permutation and unordered envelope classes.
//!
//! The maximum likelihood over a permutation-invariant class depends on a
//! sequence only through its sorted multiplicities, so the grouped engine sums
//! over partitions of `n` weighted by how many sequences share each one. The
//! exhaustive engine walks every sequence and serves as a cross-check.

use serde::Serialize;
use thiserror::Error;

use crate::enumerate::{for_each_partition, for_each_sequence, sequence_count, MAX_ENUMERATION};
use crate::model::{Distribution, EnvelopeClass, ModelError, TypeVector, ZipfClass};
use crate::scalar::{ln_factorials, log2_sum_exp2, KahanSum, Real};

pub const ANCHOR_SHTARKOV: &str = "S(P) = Σ_x max_{p∈P} p(x)";

#[derive(Debug, Error)]
pub enum ShtarkovError {
    #[error("instance too large: {count} objects exceed the enumeration limit {limit}")]
    TooLarge { count: u64, limit: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShtarkovMethod {
    Exhaustive,
    ProfileGrouped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShtarkovReport<T> {
    pub class: String,
    pub n: usize,
    #[serde(rename = "log2_S")]
    pub log_sum: T,
    pub method: ShtarkovMethod,
    /// `n log2((k-n) / (n^alpha C_{k,alpha}))`, present for Zipf permutation classes.
    pub worst_case_lower_bound: Option<T>,
    /// `log2 k!`.
    pub upper_bound_logkfact: T,
    /// Envelope classes only: `log2 sum_x prod_i f(i)^{mu_(i)}`, the unnormalized ceiling.
    #[serde(rename = "log2_S_envelope_upper", skip_serializing_if = "Option::is_none")]
    pub envelope_upper: Option<T>,
    /// Number of summands (partitions or sequences) visited.
    pub terms: u64,
    pub anchor: String,
}

/// `log2 k!`.
pub fn log2_factorial<T: Real>(k: usize) -> T {
    let mut acc = KahanSum::new();
    for i in 2..=k {
        acc.add(T::from_count(i as u64).log2());
    }
    acc.value()
}

fn check_dims(t: &TypeVector, k: usize) -> Result<(), ModelError> {
    if t.k() != k {
        return Err(ModelError::DimensionMismatch {
            expected: k,
            found: t.k(),
        });
    }
    Ok(())
}

/// `log2 p_hat(x^n)` over the permutation class of `sorted` given the
/// sequence's multiplicities in nonincreasing order.
fn log2_ml_sorted<T: Real>(sorted_probs: &[T], sorted_mu: &[usize]) -> T {
    let mut acc = T::zero();
    for (&p, &m) in sorted_probs.iter().zip(sorted_mu) {
        if m > 0 {
            acc = acc + T::from_count(m as u64) * p.log2();
        }
    }
    acc
}

/// `max_sigma prod_i p_sigma(i)^mu_i`, attained by pairing sorted
/// probabilities with sorted multiplicities.
pub fn max_likelihood_permutation<T: Real>(t: &TypeVector, base: &Distribution<T>) -> Result<T, ModelError> {
    Ok(log2_max_likelihood_permutation(t, base)?.exp2())
}

pub fn log2_max_likelihood_permutation<T: Real>(t: &TypeVector, base: &Distribution<T>) -> Result<T, ModelError> {
    check_dims(t, base.k())?;
    Ok(log2_ml_sorted(&base.sorted(), &t.sorted_desc()))
}

/// The member of the unordered envelope class maximizing `sum_i w_i log p_i`
/// for nonincreasing weights `w` paired with the nonincreasing envelope `f`.
///
/// Positive-weight entries get `min(f_i, w_i / theta)` with `theta` chosen so
/// the mass sums to one; leftover mass goes to zero-weight entries in order.
/// The result is nonincreasing and dominated by `f` pointwise.
pub fn envelope_water_fill<T: Real>(f: &[T], weights: &[usize]) -> Vec<T> {
    let k = f.len();
    let mut p = vec![T::zero(); k];
    let mut capped = vec![false; k];
    let active: Vec<usize> = (0..k).filter(|&i| weights.get(i).copied().unwrap_or(0) > 0).collect();
    let w = |i: usize| T::from_count(weights[i] as u64);
    loop {
        let capped_mass: T = active.iter().filter(|&&i| capped[i]).map(|&i| f[i]).sum();
        let free_weight: T = active.iter().filter(|&&i| !capped[i]).map(|&i| w(i)).sum();
        if free_weight == T::zero() {
            break;
        }
        let theta = free_weight / (T::one() - capped_mass);
        let newly: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&i| !capped[i] && w(i) / theta > f[i])
            .collect();
        for &i in &newly {
            capped[i] = true;
        }
        if newly.is_empty() {
            for &i in active.iter().filter(|&&i| !capped[i]) {
                p[i] = w(i) / theta;
            }
            break;
        }
    }
    for &i in active.iter().filter(|&&i| capped[i]) {
        p[i] = f[i];
    }
    let mut leftover = T::one() - p.iter().copied().sum::<T>();
    for i in 0..k {
        if leftover <= T::zero() {
            break;
        }
        if weights.get(i).copied().unwrap_or(0) == 0 {
            p[i] = f[i].min(leftover);
            leftover = leftover - p[i];
        }
    }
    p
}

/// Number of sequences whose sorted multiplicities equal `parts`:
/// (type vectors with that profile) x (arrangements per type), as `log2`.
fn log2_sequences_with_profile<T: Real>(parts: &[usize], k: usize, n: usize, ln_fact: &[T]) -> T {
    // k! / (prod_m phi_m! (k - phi_+)!) * n! / prod_j mu_j!
    let mut ln = ln_fact[k] - ln_fact[k - parts.len()] + ln_fact[n];
    let mut run = 1usize;
    for i in 0..parts.len() {
        ln = ln - ln_fact[parts[i]];
        if i + 1 < parts.len() && parts[i + 1] == parts[i] {
            run += 1;
        } else {
            ln = ln - ln_fact[run];
            run = 1;
        }
    }
    ln * T::LOG2_E()
}

/// Block-wise log-sum-exp with a fixed reduction order.
struct LogSumAccumulator<T> {
    block: Vec<T>,
    partials: Vec<T>,
    count: u64,
}

impl<T: Real> LogSumAccumulator<T> {
    const BLOCK: usize = 4096;

    fn new() -> Self {
        Self {
            block: Vec::with_capacity(Self::BLOCK),
            partials: Vec::new(),
            count: 0,
        }
    }

    fn push(&mut self, log_term: T) {
        self.count += 1;
        self.block.push(log_term);
        if self.block.len() == Self::BLOCK {
            self.partials.push(log2_sum_exp2(&self.block));
            self.block.clear();
        }
    }

    fn finish(mut self) -> (T, u64) {
        if !self.block.is_empty() {
            self.partials.push(log2_sum_exp2(&self.block));
        }
        (log2_sum_exp2(&self.partials), self.count)
    }
}

fn guard(count: u64) -> Result<(), ShtarkovError> {
    if count > MAX_ENUMERATION {
        return Err(ShtarkovError::TooLarge {
            count,
            limit: MAX_ENUMERATION,
        });
    }
    Ok(())
}

fn partition_count_capped(n: usize, max_parts: usize) -> u64 {
    // p(n, <= k parts) by the standard recurrence, saturating
    let mut table = vec![vec![0u64; max_parts + 1]; n + 1];
    for row in table[0].iter_mut() {
        *row = 1;
    }
    for m in 1..=n {
        for j in 1..=max_parts {
            let without = table[m][j - 1];
            let with = if m >= j { table[m - j][j] } else { 0 };
            table[m][j] = without.saturating_add(with);
        }
    }
    table[n][max_parts]
}

/// Shared driver: sums `2^{log_ml(sorted_mu)}` over all sequences.
fn shtarkov_sum_by<T: Real>(
    k: usize,
    n: usize,
    method: ShtarkovMethod,
    log_ml: impl Fn(&[usize]) -> T,
) -> Result<(T, u64), ShtarkovError> {
    match method {
        ShtarkovMethod::ProfileGrouped => {
            guard(partition_count_capped(n, k))?;
            let ln_fact = ln_factorials::<T>(n.max(k));
            let mut acc = LogSumAccumulator::new();
            for_each_partition(n, k, |parts| {
                acc.push(log2_sequences_with_profile(parts, k, n, &ln_fact) + log_ml(parts));
            });
            Ok(acc.finish())
        }
        ShtarkovMethod::Exhaustive => {
            guard(sequence_count(k, n))?;
            let mut acc = LogSumAccumulator::new();
            let mut mu = vec![0usize; k];
            for_each_sequence(k, n, |seq| {
                mu.iter_mut().for_each(|m| *m = 0);
                seq.iter().for_each(|&s| mu[s] += 1);
                let mut sorted = mu.clone();
                sorted.sort_unstable_by(|a, b| b.cmp(a));
                acc.push(log_ml(&sorted));
            });
            Ok(acc.finish())
        }
    }
}

/// `S(P_(p)^n)` for the permutation class of `base`.
pub fn shtarkov_sum_permutation_class<T: Real>(
    base: &Distribution<T>,
    n: usize,
    method: ShtarkovMethod,
) -> Result<ShtarkovReport<T>, ShtarkovError> {
    let sorted = base.sorted();
    let (log_sum, terms) = shtarkov_sum_by(base.k(), n, method, |mu| log2_ml_sorted(&sorted, mu))?;
    Ok(ShtarkovReport {
        class: format!("permutation(k={})", base.k()),
        n,
        log_sum,
        method,
        worst_case_lower_bound: None,
        upper_bound_logkfact: log2_factorial(base.k()),
        envelope_upper: None,
        terms,
        anchor: ANCHOR_SHTARKOV.to_owned(),
    })
}

/// `S(P_(zipf(alpha,k))^n)` with the matching worst-case lower bound attached
/// when `n <= k^{1/alpha}`.
pub fn shtarkov_sum_zipf<T: Real>(
    zipf: &ZipfClass<T>,
    n: usize,
    method: ShtarkovMethod,
) -> Result<ShtarkovReport<T>, ShtarkovError> {
    let mut report = shtarkov_sum_permutation_class(&zipf.distribution(), n, method)?;
    report.class = format!("permutation(zipf(alpha={}, k={}))", zipf.alpha(), zipf.k());
    report.worst_case_lower_bound = crate::bounds::worst_case_lower_bound_zipf(zipf.alpha(), zipf.k(), n)
        .ok()
        .map(|b| b.value);
    Ok(report)
}

/// `S(E_(f)^n)` for an unordered envelope class.
///
/// `log_sum` is exact: the per-profile maximizer is the water-filled member of
/// [`envelope_water_fill`]. `envelope_upper` replaces it by the unnormalized
/// product `prod f(i)^{mu_(i)}`.
pub fn shtarkov_sum_envelope_class<T: Real>(
    env: &EnvelopeClass<T>,
    n: usize,
    method: ShtarkovMethod,
) -> Result<ShtarkovReport<T>, ShtarkovError> {
    env.check_nonempty()?;
    let f = env.envelope();
    let k = env.k();
    let (log_sum, terms) = shtarkov_sum_by(k, n, method, |mu| {
        let member = envelope_water_fill(f, mu);
        log2_ml_sorted(&member, mu)
    })?;
    let (upper, _) = shtarkov_sum_by(k, n, method, |mu| log2_ml_sorted(f, mu))?;
    Ok(ShtarkovReport {
        class: format!("envelope(k={k})"),
        n,
        log_sum,
        method,
        worst_case_lower_bound: None,
        upper_bound_logkfact: log2_factorial(k),
        envelope_upper: Some(upper),
        terms,
        anchor: ANCHOR_SHTARKOV.to_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::zipf_distribution;

    #[test]
    fn ml_permutation_examples() {
        let base = Distribution::new(vec![0.8f64, 0.2]).unwrap();
        let t = TypeVector::new(vec![2, 1]).unwrap();
        assert!((max_likelihood_permutation(&t, &base).unwrap() - 0.128).abs() < 1e-15);
        let t = TypeVector::new(vec![1, 2]).unwrap();
        assert!((max_likelihood_permutation(&t, &base).unwrap() - 0.128).abs() < 1e-15);

        let uniform = Distribution::<f64>::uniform(4).unwrap();
        for mu in [vec![3, 0, 0, 0], vec![1, 1, 1, 0], vec![0, 2, 0, 1]] {
            let t = TypeVector::new(mu).unwrap();
            assert!((max_likelihood_permutation(&t, &uniform).unwrap() - 4f64.powi(-3)).abs() < 1e-15);
        }
        let bad = TypeVector::new(vec![1, 1, 1]).unwrap();
        assert!(max_likelihood_permutation(&bad, &base).is_err());
    }

    #[test]
    fn uniform_class_has_zero_redundancy() {
        let u = Distribution::<f64>::uniform(3).unwrap();
        for n in 1..=5 {
            let r = shtarkov_sum_permutation_class(&u, n, ShtarkovMethod::ProfileGrouped).unwrap();
            assert!(r.log_sum.abs() < 1e-12, "n={n}: {}", r.log_sum);
        }
    }

    #[test]
    fn grouped_matches_exhaustive_on_zipf() {
        let z = zipf_distribution(1.5f64, 4).unwrap();
        for n in 1..=4 {
            let a = shtarkov_sum_permutation_class(&z, n, ShtarkovMethod::ProfileGrouped).unwrap();
            let b = shtarkov_sum_permutation_class(&z, n, ShtarkovMethod::Exhaustive).unwrap();
            assert!((a.log_sum - b.log_sum).abs() <= 1e-10 * b.log_sum.abs().max(1.0));
            assert_eq!(b.terms, 4u64.pow(n as u32));
        }
    }

    #[test]
    fn zipf_report_carries_worst_case_bound() {
        let z = ZipfClass::new(2.0f64, 16).unwrap();
        let r = shtarkov_sum_zipf(&z, 2, ShtarkovMethod::ProfileGrouped).unwrap();
        let c = z.c_norm();
        let bound = 2.0 * (14.0 / (4.0 * c)).log2();
        assert!((r.worst_case_lower_bound.unwrap() - bound).abs() < 1e-12);
        assert!(r.log_sum >= bound);
        assert!(r.log_sum <= r.upper_bound_logkfact);
        let r5 = shtarkov_sum_zipf(&z, 5, ShtarkovMethod::ProfileGrouped).unwrap();
        assert!(r5.worst_case_lower_bound.is_none());
    }

    #[test]
    fn water_fill_respects_envelope() {
        let f = [0.5f64, 0.4, 0.3, 0.2];
        let p = envelope_water_fill(&f, &[3, 1, 0, 0]);
        let total: f64 = p.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(p.iter().zip(&f).all(|(a, b)| a <= b));
        assert!(p.windows(2).all(|w| w[0] >= w[1]));
        // unconstrained optimum would be (0.75, 0.25); first entry capped at 0.5
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn envelope_collapses_to_permutation_class() {
        let base = zipf_distribution(2.0f64, 5).unwrap();
        let env = EnvelopeClass::new(base.sorted()).unwrap();
        for n in 1..=4 {
            let a = shtarkov_sum_envelope_class(&env, n, ShtarkovMethod::ProfileGrouped).unwrap();
            let b = shtarkov_sum_permutation_class(&base, n, ShtarkovMethod::ProfileGrouped).unwrap();
            assert!((a.log_sum - b.log_sum).abs() < 1e-10);
            assert!((a.envelope_upper.unwrap() - b.log_sum).abs() < 1e-10);
        }
    }

    #[test]
    fn all_ones_envelope_is_the_simplex() {
        let k = 4;
        let env = EnvelopeClass::new(vec![1.0f64; k]).unwrap();
        let r = shtarkov_sum_envelope_class(&env, k, ShtarkovMethod::ProfileGrouped).unwrap();
        let uniform = shtarkov_sum_permutation_class(
            &Distribution::<f64>::uniform(k).unwrap(),
            k,
            ShtarkovMethod::ProfileGrouped,
        )
        .unwrap();
        assert!(r.log_sum >= uniform.log_sum - 1e-12);
        assert!(r.log_sum <= k as f64 * (k as f64).log2());
        // classical value: sum over types of multinomial * prod (mu/n)^mu
        let mut s = 0.0;
        crate::enumerate::for_each_type(k, k, |mu| {
            let coef = crate::combinatorics::multinomial(mu);
            let ml: f64 = mu
                .iter()
                .filter(|&&m| m > 0)
                .map(|&m| (m as f64 / k as f64).powi(m as i32))
                .product();
            s += crate::scalar::log2_big(&coef).exp2() * ml;
        });
        assert!((r.log_sum - s.log2()).abs() < 1e-10);
    }

    #[test]
    fn infeasible_envelope_is_rejected() {
        let env = EnvelopeClass::new(vec![0.3f64, 0.3]).unwrap();
        assert!(matches!(
            shtarkov_sum_envelope_class(&env, 2, ShtarkovMethod::ProfileGrouped),
            Err(ShtarkovError::Model(ModelError::EnvelopeInfeasible { .. }))
        ));
    }

    #[test]
    fn guard_rejects_huge_instances() {
        let u = Distribution::<f64>::uniform(64).unwrap();
        assert!(matches!(
            shtarkov_sum_permutation_class(&u, 8, ShtarkovMethod::Exhaustive),
            Err(ShtarkovError::TooLarge { .. })
        ));
    }
}
