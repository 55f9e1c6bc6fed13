//! Expected-redundancy laboratory.
//!
//! - exact redundancy achieved by the enumerative codec against a known source,
//! - a minimax oracle for finite classes (the redundancy–capacity identity
//!   solved by Blahut–Arimoto iteration), over sequences, types, or
//!   Poisson-length types,
//! - Poisson entropy tools and a Monte Carlo check of the lower-tail
//!   concentration of the distinct count under Poisson sampling.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, Poisson};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::codec::{codeword_length, log2_normalizer, CodecParams};
use crate::enumerate::{for_each_sequence, for_each_type, sequence_count, type_count, MAX_ENUMERATION};
use crate::model::{poisson_prevalences, Distribution, ModelError, TypeVector};
use crate::scalar::{ln_factorials, KahanSum, Real};

pub const ANCHOR_ACHIEVED: &str = "log p(x^n)/q(x^n) ≤ log N_{φ₊^n} + n Σ (μ_i/n) log(p_i/(μ_i/n)) ≤ log N_{φ₊^n}";
pub const ANCHOR_MINIMAX: &str = "min_q max_{p∈P} Σ p(x) log p(x)/q(x)";
pub const ANCHOR_TYPE_REDUNDANCY: &str = "R̄(τ(P^n)) = R̄(P^n)";
pub const ANCHOR_POISSON_HALVING: &str = "R̄(P^n) ≥ ½ R̄(P^{poi(n)})";
pub const ANCHOR_POISSON_ENTROPY: &str = "H(X) ≤ λ[1−log λ] + e^{−λ} λ²/(1−λ)";
pub const ANCHOR_TYPE_ENTROPY: &str = "H(τ^k) = Σ H(μ_i)";
pub const ANCHOR_CONCENTRATION: &str = "Pr[φ₊^{poi(n)} < d^{poi(n)} − √(2vs)] ≤ e^{−s}";
pub const ANCHOR_BOUND_ON_Q: &str = "q(τ^k) ≤ 1/(k choose d′)";

/// Iteration cap of the minimax oracle.
pub const MAX_ITERATIONS: usize = 100_000;
/// Default convergence tolerance of the minimax oracle, in bits.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Poisson-length truncation may drop at most this much probability.
pub const MAX_TRUNCATED_MASS: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum RedundancyError {
    #[error("instance too large: {count} outcomes exceed the enumeration limit {limit}")]
    TooLarge { count: u64, limit: u64 },
    #[error("minimax iteration did not converge: gap {gap} after {iterations} iterations")]
    NotConverged { gap: f64, iterations: usize },
    #[error("class must contain at least one distribution")]
    EmptyClass,
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("poisson rate must be positive, got {0}")]
    BadRate(f64),
    #[error("entropy bound needs 0 < lambda < 1, got {0}")]
    BoundOutOfRange(f64),
    #[error("poisson truncation drops mass {0}")]
    TruncationMass(f64),
    #[error("at least {min} trials required, got {got}")]
    TooFewTrials { min: usize, got: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn guard(count: u64) -> Result<(), RedundancyError> {
    if count > MAX_ENUMERATION {
        return Err(RedundancyError::TooLarge {
            count,
            limit: MAX_ENUMERATION,
        });
    }
    Ok(())
}

/// Redundancy of the enumerative codec against a fixed i.i.d. source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedundancyReport<T> {
    pub n: usize,
    pub k: usize,
    /// `n H(p)` in bits.
    pub entropy: T,
    /// `E_p[-log2 q(x^n)]` for the ideal coding distribution.
    pub expected_codelength: T,
    /// `E_p[log2 p(x^n)/q(x^n)] = expected_codelength - entropy`.
    pub achieved: T,
    /// `E_p[|encode(x^n)|]` for the concrete bitstream.
    pub expected_codeword_bits: T,
    /// `E_p[phi_+^n]`.
    pub expected_distinct: T,
    pub types: u64,
    pub anchor: String,
}

/// Exact expected redundancy of the codec's coding distribution, summed over types.
pub fn achieved_redundancy<T: Real>(p: &Distribution<T>, n: usize) -> Result<RedundancyReport<T>, RedundancyError> {
    let k = p.k();
    let params = CodecParams::new(k, n).map_err(|_| ModelError::EmptySequence)?;
    guard(type_count(k, n))?;
    let ln_fact = ln_factorials::<T>(n);
    let log2_p: Vec<T> = p.probs().iter().map(|&x| x.log2()).collect();
    let log2_norm: Vec<T> = (0..=n.min(k))
        .map(|d| {
            if d == 0 {
                T::zero()
            } else {
                T::lit(log2_normalizer(k, n, d))
            }
        })
        .collect();
    let nf = T::from_count(n as u64);

    let mut ideal = KahanSum::new();
    let mut concrete = KahanSum::new();
    let mut mass = KahanSum::new();
    let mut types = 0u64;
    for_each_type(k, n, |mu| {
        types += 1;
        if mu.iter().zip(p.probs()).any(|(&m, &pi)| m > 0 && pi == T::zero()) {
            return;
        }
        let mut ln_coef = ln_fact[n];
        let mut log2_seq = T::zero();
        let mut empirical = T::zero();
        let mut d = 0;
        for (i, &m) in mu.iter().enumerate() {
            if m > 0 {
                let mf = T::from_count(m as u64);
                ln_coef = ln_coef - ln_fact[m];
                log2_seq = log2_seq + mf * log2_p[i];
                empirical = empirical + mf * (nf / mf).log2();
                d += 1;
            }
        }
        let prob = (ln_coef * T::LOG2_E() + log2_seq).exp2();
        let t = TypeVector::new(mu.to_vec()).expect("nonempty type");
        let bits = codeword_length(&t, &params).expect("type matches params");
        ideal.add(prob * (log2_norm[d] + empirical));
        concrete.add(prob * T::from_count(bits));
        mass.add(prob);
    });
    debug_assert!((mass.value() - T::one()).abs() < T::lit(1e-6));

    let entropy = nf * p.entropy_bits();
    let expected_codelength = ideal.value();
    Ok(RedundancyReport {
        n,
        k,
        entropy,
        expected_codelength,
        achieved: expected_codelength - entropy,
        expected_codeword_bits: concrete.value(),
        expected_distinct: crate::model::expected_distinct(p, n),
        types,
        anchor: ANCHOR_ACHIEVED.to_owned(),
    })
}

/// Outcome of the minimax oracle on a finite class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimaxResult<T> {
    /// Mutual information of the returned prior; within `capacity_gap` of the minimax value.
    pub value: T,
    /// `max_m D(p_m || q) - value`, where `q` is the returned mixture.
    pub capacity_gap: T,
    /// Mixture weights over class members.
    pub prior: Vec<T>,
    pub iterations: usize,
    pub outcomes: usize,
    pub tol: T,
    pub anchor: String,
}

impl<T: Real> MinimaxResult<T> {
    /// Upper end of the certified interval `[value, value + capacity_gap]`.
    pub fn upper(&self) -> T {
        self.value + self.capacity_gap
    }
}

/// Minimax expected redundancy `min_q max_m D(W_m || q)` over the rows of a
/// channel matrix, by Blahut–Arimoto iteration on the prior.
pub fn minimax_over_channel<T: Real>(rows: &[Vec<T>], tol: T) -> Result<MinimaxResult<T>, RedundancyError> {
    if rows.is_empty() {
        return Err(RedundancyError::EmptyClass);
    }
    if !(tol > T::zero()) {
        return Err(RedundancyError::BadTolerance);
    }
    let m = rows.len();
    let outcomes = rows[0].len();
    let mut prior = vec![T::one() / T::from_count(m as u64); m];
    let mut mixture = vec![T::zero(); outcomes];
    let mut div = vec![T::zero(); m];
    let mut iterations = 0;
    loop {
        iterations += 1;
        mixture.iter_mut().for_each(|q| *q = T::zero());
        for (w, row) in prior.iter().zip(rows) {
            for (q, &x) in mixture.iter_mut().zip(row) {
                *q = *q + *w * x;
            }
        }
        for (d, row) in div.iter_mut().zip(rows) {
            let mut acc = KahanSum::new();
            for (&x, &q) in row.iter().zip(&mixture) {
                if x > T::zero() {
                    acc.add(x * (x / q).log2());
                }
            }
            *d = acc.value().max(T::zero());
        }
        let lower: T = prior.iter().zip(&div).map(|(&w, &d)| w * d).sum();
        let upper = div.iter().copied().fold(T::zero(), T::max);
        let gap = (upper - lower).max(T::zero());
        if gap <= tol {
            return Ok(MinimaxResult {
                value: lower,
                capacity_gap: gap,
                prior,
                iterations,
                outcomes,
                tol,
                anchor: ANCHOR_MINIMAX.to_owned(),
            });
        }
        if iterations >= MAX_ITERATIONS {
            return Err(RedundancyError::NotConverged {
                gap: gap.to_f64().unwrap_or(f64::NAN),
                iterations,
            });
        }
        let shift = upper;
        let mut total = T::zero();
        for (w, &d) in prior.iter_mut().zip(&div) {
            *w = *w * (d - shift).exp2();
            total = total + *w;
        }
        prior.iter_mut().for_each(|w| *w = *w / total);
    }
}

fn check_class<T: Real>(members: &[Distribution<T>]) -> Result<usize, RedundancyError> {
    let first = members.first().ok_or(RedundancyError::EmptyClass)?;
    let k = first.k();
    if let Some(bad) = members.iter().find(|d| d.k() != k) {
        return Err(ModelError::DimensionMismatch {
            expected: k,
            found: bad.k(),
        }
        .into());
    }
    Ok(k)
}

/// Channel rows `p_m(x^n)` over all `k^n` sequences.
pub fn sequence_likelihoods<T: Real>(members: &[Distribution<T>], n: usize) -> Result<Vec<Vec<T>>, RedundancyError> {
    let k = check_class(members)?;
    guard(sequence_count(k, n).saturating_mul(members.len() as u64))?;
    Ok(members
        .iter()
        .map(|p| {
            let mut row = Vec::new();
            for_each_sequence(k, n, |seq| {
                row.push(seq.iter().map(|&s| p.probs()[s]).fold(T::one(), |a, b| a * b));
            });
            row
        })
        .collect())
}

fn type_log_prob<T: Real>(mu: &[usize], p: &Distribution<T>, ln_fact: &[T], n: usize) -> T {
    let mut ln = ln_fact[n];
    for (&m, &pi) in mu.iter().zip(p.probs()) {
        if m > 0 {
            if pi == T::zero() {
                return T::neg_infinity();
            }
            ln = ln - ln_fact[m] + T::from_count(m as u64) * pi.ln();
        }
    }
    ln
}

/// Channel rows `p_m(tau)` over all types of length `n`.
pub fn type_likelihoods<T: Real>(members: &[Distribution<T>], n: usize) -> Result<Vec<Vec<T>>, RedundancyError> {
    let k = check_class(members)?;
    guard(type_count(k, n).saturating_mul(members.len() as u64))?;
    let ln_fact = ln_factorials::<T>(n);
    Ok(members
        .iter()
        .map(|p| {
            let mut row = Vec::new();
            for_each_type(k, n, |mu| row.push(type_log_prob(mu, p, &ln_fact, n).exp()));
            row
        })
        .collect())
}

/// Poisson-length truncation `n + ceil(10 sqrt n)` and the mass it keeps.
pub fn poisson_truncation(n: usize) -> (usize, f64) {
    let max_len = n + (10.0 * (n as f64).sqrt()).ceil() as usize;
    let lambda = n as f64;
    let mut ln_pmf = -lambda;
    let mut kept = KahanSum::new();
    for j in 0..=max_len {
        if j > 0 {
            ln_pmf += lambda.ln() - (j as f64).ln();
        }
        kept.add(ln_pmf.exp());
    }
    (max_len, kept.value().min(1.0))
}

/// Channel rows over types of every length `0..=L` under Poisson(n)
/// sampling, plus one lumped outcome for the truncated tail (identical for
/// all members, so it carries no divergence).
pub fn poisson_type_likelihoods<T: Real>(
    members: &[Distribution<T>],
    n: usize,
) -> Result<(Vec<Vec<T>>, f64), RedundancyError> {
    let k = check_class(members)?;
    let (max_len, kept) = poisson_truncation(n);
    let dropped = 1.0 - kept;
    if dropped > MAX_TRUNCATED_MASS {
        return Err(RedundancyError::TruncationMass(dropped));
    }
    let total: u64 = (0..=max_len).map(|l| if l == 0 { 1 } else { type_count(k, l) }).sum();
    guard(total.saturating_mul(members.len() as u64))?;
    let ln_fact = ln_factorials::<T>(max_len);
    let nf = T::from_count(n as u64);
    let rows = members
        .iter()
        .map(|p| {
            let lambdas: Vec<T> = p.probs().iter().map(|&x| nf * x).collect();
            let mut row = Vec::new();
            let mut add_type = |mu: &[usize]| {
                let mut ln = T::zero();
                for (&m, &l) in mu.iter().zip(&lambdas) {
                    if m > 0 && l == T::zero() {
                        ln = T::neg_infinity();
                        break;
                    }
                    ln = ln - l - ln_fact[m];
                    if m > 0 {
                        ln = ln + T::from_count(m as u64) * l.ln();
                    }
                }
                row.push(ln.exp());
            };
            add_type(&vec![0; k]);
            for len in 1..=max_len {
                for_each_type(k, len, &mut add_type);
            }
            row.push(T::lit(dropped));
            row
        })
        .collect();
    Ok((rows, dropped))
}

/// Minimax expected redundancy of `members^n`, over sequences.
pub fn minimax_expected_redundancy<T: Real>(
    members: &[Distribution<T>],
    n: usize,
    tol: T,
) -> Result<MinimaxResult<T>, RedundancyError> {
    minimax_over_channel(&sequence_likelihoods(members, n)?, tol)
}

/// Minimax expected redundancy of the induced type distributions.
pub fn minimax_type_redundancy<T: Real>(
    members: &[Distribution<T>],
    n: usize,
    tol: T,
) -> Result<MinimaxResult<T>, RedundancyError> {
    minimax_over_channel(&type_likelihoods(members, n)?, tol)
}

/// Minimax expected redundancy under Poisson(n) sampling.
pub fn minimax_poisson_redundancy<T: Real>(
    members: &[Distribution<T>],
    n: usize,
    tol: T,
) -> Result<MinimaxResult<T>, RedundancyError> {
    let (rows, _) = poisson_type_likelihoods(members, n)?;
    minimax_over_channel(&rows, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceCheck<T> {
    pub sequence: MinimaxResult<T>,
    pub types: MinimaxResult<T>,
    pub difference: T,
    pub holds: bool,
    pub anchor: String,
}

/// Sequence-level and type-level minimax redundancy agree within `2 tol`.
pub fn type_redundancy_equivalence_check<T: Real>(
    members: &[Distribution<T>],
    n: usize,
    tol: T,
) -> Result<EquivalenceCheck<T>, RedundancyError> {
    let sequence = minimax_expected_redundancy(members, n, tol)?;
    let types = minimax_type_redundancy(members, n, tol)?;
    let difference = (sequence.value - types.value).abs();
    Ok(EquivalenceCheck {
        holds: difference <= T::lit(2.0) * tol,
        difference,
        sequence,
        types,
        anchor: ANCHOR_TYPE_REDUNDANCY.to_owned(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonHalvingCheck<T> {
    pub fixed_length: MinimaxResult<T>,
    pub poisson: MinimaxResult<T>,
    pub truncated_mass: f64,
    /// `fixed_length.value - poisson.upper() / 2`; the check passes when `>= -tol`.
    pub margin: T,
    pub holds: bool,
    pub anchor: String,
}

/// Compares fixed-length redundancy with half the Poisson-sampled redundancy.
///
/// Uses the lower end of the fixed-length interval and the upper end of the
/// Poisson interval so oracle error cannot manufacture a pass.
pub fn lower_bound_poisson_halving_check<T: Real>(
    members: &[Distribution<T>],
    n: usize,
    tol: T,
) -> Result<PoissonHalvingCheck<T>, RedundancyError> {
    let fixed_length = minimax_type_redundancy(members, n, tol)?;
    let (rows, truncated_mass) = poisson_type_likelihoods(members, n)?;
    let poisson = minimax_over_channel(&rows, tol)?;
    let margin = fixed_length.value - poisson.upper() / T::lit(2.0);
    Ok(PoissonHalvingCheck {
        holds: margin >= -tol,
        margin,
        fixed_length,
        poisson,
        truncated_mass,
        anchor: ANCHOR_POISSON_HALVING.to_owned(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundOnQCheck<T> {
    /// `max_tau q(tau) * C(k, nnz(tau))`; the bound holds when this is `<= 1`.
    pub worst_ratio: T,
    pub holds: bool,
    pub anchor: String,
}

/// Checks `q(tau) <= 1 / C(k, nnz(tau))` for the oracle's mixture over types.
///
/// Meaningful for permutation-closed classes, where the optimal mixture is
/// symmetric under relabeling.
pub fn bound_on_q_check<T: Real>(
    members: &[Distribution<T>],
    n: usize,
    tol: T,
) -> Result<BoundOnQCheck<T>, RedundancyError> {
    let k = check_class(members)?;
    let rows = type_likelihoods(members, n)?;
    let result = minimax_over_channel(&rows, tol)?;
    let mut nnz = Vec::new();
    for_each_type(k, n, |mu| nnz.push(mu.iter().filter(|&&m| m > 0).count()));
    let mut worst = T::zero();
    for (j, &d) in nnz.iter().enumerate() {
        let q: T = result.prior.iter().zip(&rows).map(|(&w, row)| w * row[j]).sum();
        let count = T::lit(crate::scalar::log2_big(&crate::combinatorics::binomial(k as u64, d as u64)).exp2());
        worst = worst.max(q * count);
    }
    Ok(BoundOnQCheck {
        holds: worst <= T::one() + T::lit(1e-9),
        worst_ratio: worst,
        anchor: ANCHOR_BOUND_ON_Q.to_owned(),
    })
}

/// Entropy of Poisson(lambda) in bits, summed until the remaining tail mass
/// is below `1e-15`.
pub fn poisson_entropy<T: Real>(lambda: T) -> Result<T, RedundancyError> {
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(RedundancyError::BadRate(lambda.to_f64().unwrap_or(f64::NAN)));
    }
    let ln_lambda = lambda.ln();
    let cutoff = T::lit(1e-15);
    let mut ln_pmf = -lambda;
    let mut acc = KahanSum::new();
    let mut i = 0usize;
    loop {
        let pmf = ln_pmf.exp();
        if pmf > T::zero() {
            acc.add(-pmf * ln_pmf);
        }
        let next = T::from_count(i as u64 + 1);
        if next > lambda {
            // tail after i is at most pmf * r / (1 - r) with r = lambda / (i + 1)
            let r = lambda / next;
            if pmf * r / (T::one() - r) < cutoff {
                break;
            }
        }
        ln_pmf = ln_pmf + ln_lambda - next.ln();
        i += 1;
    }
    Ok(acc.value() * T::LOG2_E())
}

/// Upper bound on the Poisson(lambda) entropy in bits for `0 < lambda < 1`:
/// `lambda (log2 e - log2 lambda) + e^{-lambda} lambda^2 / (1 - lambda)`.
pub fn poisson_entropy_bound<T: Real>(lambda: T) -> Result<T, RedundancyError> {
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(RedundancyError::BoundOutOfRange(lambda.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(lambda * (T::log2_e() - lambda.log2()) + (-lambda).exp() * lambda * lambda / (T::one() - lambda))
}

/// `1/2 log2(2 pi e (lambda + 1/12))`.
pub fn gaussian_entropy_cap<T: Real>(lambda: T) -> T {
    T::lit(0.5) * (T::lit(2.0) * T::PI() * T::E() * (lambda + T::lit(1.0 / 12.0))).log2()
}

/// Entropy of the type vector under Poisson(n) sampling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonEntropyReport<T> {
    pub lambdas: Vec<T>,
    /// `H(tau) = sum_i H(poi(lambda_i))`.
    pub h_type: T,
    /// Exact entropy from coordinates with `lambda < 0.7`.
    pub low_part: T,
    /// Exact entropy from coordinates with `lambda >= 0.7`.
    pub high_part: T,
    /// `sum_{lambda < 0.7} (3 lambda - lambda log2 lambda)`.
    pub low_cap: T,
    /// `sum_{lambda >= 0.7} 1/2 log2(2 pi e (lambda + 1/12))`.
    pub high_cap: T,
    pub anchor: String,
}

pub fn type_entropy_poisson<T: Real>(
    p: &Distribution<T>,
    n: usize,
) -> Result<PoissonEntropyReport<T>, RedundancyError> {
    let nf = T::from_count(n as u64);
    let threshold = T::lit(0.7);
    let lambdas: Vec<T> = p.probs().iter().map(|&x| nf * x).collect();
    let (mut low, mut high) = (KahanSum::new(), KahanSum::new());
    let mut high_cap = KahanSum::new();
    for &l in lambdas.iter().filter(|&&l| l > T::zero()) {
        let h = poisson_entropy(l)?;
        if l < threshold {
            low.add(h);
        } else {
            high.add(h);
            high_cap.add(gaussian_entropy_cap(l));
        }
    }
    Ok(PoissonEntropyReport {
        h_type: low.value() + high.value(),
        low_part: low.value(),
        high_part: high.value(),
        low_cap: crate::bounds::small_lambda_entropy_cap(&lambdas),
        high_cap: high_cap.value(),
        lambdas,
        anchor: ANCHOR_TYPE_ENTROPY.to_owned(),
    })
}

/// Monte Carlo estimate of the lower tail of the distinct count under
/// Poisson sampling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub s: f64,
    pub trials: usize,
    pub seed: u64,
    /// `d^{poi(n)}`.
    pub expected_distinct: f64,
    /// `v = E[phi_1^{poi(n)}]`.
    pub singletons: f64,
    /// `d^{poi(n)} - sqrt(2 v s)`.
    pub threshold: f64,
    pub hits: u64,
    pub frequency: f64,
    /// `e^{-s}`.
    pub bound: f64,
    /// `sqrt(b (1 - b) / trials)` with `b = e^{-s}`.
    pub std_error: f64,
    pub passed: bool,
    pub anchor: String,
}

/// Trials per independently seeded partition.
const CHUNK: usize = 8192;

pub fn concentration_check<T: Real>(
    p: &Distribution<T>,
    n: usize,
    s: f64,
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport, RedundancyError> {
    const MIN_TRIALS: usize = 10_000;
    if trials < MIN_TRIALS {
        return Err(RedundancyError::TooFewTrials {
            min: MIN_TRIALS,
            got: trials,
        });
    }
    let stats = poisson_prevalences(p, n);
    let d_poi = stats.distinct.to_f64().unwrap_or(f64::NAN);
    let v = stats.singletons.to_f64().unwrap_or(f64::NAN);
    let threshold = d_poi - (2.0 * v * s).sqrt();
    let probs: Vec<f64> = p.probs().iter().map(|x| x.to_f64().unwrap_or(0.0)).collect();
    let hits = poisson_distinct_tally(&probs, n, trials, seed, |distinct| (distinct as f64) < threshold);
    let bound = (-s).exp();
    let std_error = (bound * (1.0 - bound) / trials as f64).sqrt();
    let frequency = hits as f64 / trials as f64;
    Ok(ConcentrationReport {
        n,
        s,
        trials,
        seed,
        expected_distinct: d_poi,
        singletons: v,
        threshold,
        hits,
        frequency,
        bound,
        std_error,
        passed: frequency <= bound + 3.0 * std_error,
        anchor: ANCHOR_CONCENTRATION.to_owned(),
    })
}

/// Counts Poisson-sampled trials whose distinct count satisfies `event`.
///
/// Each trial draws a length `N ~ Poisson(n)` and then `N` i.i.d. symbols.
/// Trials are split into fixed-size partitions, each with its own ChaCha
/// stream, so the tally is independent of thread scheduling.
pub fn poisson_distinct_tally(
    probs: &[f64],
    n: usize,
    trials: usize,
    seed: u64,
    event: impl Fn(usize) -> bool + Sync,
) -> u64 {
    let chunks = trials.div_ceil(CHUNK);
    let sampler = WeightedIndex::new(probs).expect("valid weights");
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len_dist = Poisson::new(n as f64).expect("positive rate");
            let mut stamp = vec![usize::MAX; probs.len()];
            let mut hits = 0u64;
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(trials);
            for trial in lo..hi {
                let len = len_dist.sample(&mut rng) as usize;
                let mut distinct = 0;
                for _ in 0..len {
                    let s = sampler.sample(&mut rng);
                    if stamp[s] != trial {
                        stamp[s] = trial;
                        distinct += 1;
                    }
                }
                if event(distinct) {
                    hits += 1;
                }
            }
            hits
        })
        .sum()
}

/// A draw from the symmetric Dirichlet(concentration) on `k` symbols.
pub fn dirichlet_distribution<T: Real, R: rand::Rng + ?Sized>(
    k: usize,
    concentration: f64,
    rng: &mut R,
) -> Result<Distribution<T>, ModelError> {
    let gamma = Gamma::new(concentration, 1.0).map_err(|_| ModelError::InvalidScale(concentration))?;
    let weights: Vec<T> = (0..k).map(|_| T::lit(gamma.sample(rng).max(1e-300))).collect();
    Distribution::from_weights(&weights)
}

/// `count` Dirichlet draws from a fixed seed.
pub fn seeded_dirichlet<T: Real>(
    k: usize,
    concentration: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<Distribution<T>>, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| dirichlet_distribution(k, concentration, &mut rng))
        .collect()
}
