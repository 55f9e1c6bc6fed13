//! Probability-model layer.
//!
//! Finite distributions with a cached sorted view, Zipf construction, the
//! unordered envelope / permutation / bounded-distinct classes, and the
//! sequence statistics (types, profiles, prevalences) that every other module
//! is phrased in.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("distribution must have at least one symbol")]
    EmptySupport,
    #[error("probability at index {index} is negative or not finite")]
    InvalidProbability { index: usize },
    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("zipf power must exceed 1, got {0}")]
    InvalidAlpha(f64),
    #[error("support size must be positive")]
    ZeroSupport,
    #[error("symbol {symbol} outside alphabet [1, {k}]")]
    SymbolOutOfRange { symbol: usize, k: usize },
    #[error("sequence must be nonempty")]
    EmptySequence,
    #[error("envelope must be nonnegative and nonincreasing (violated at index {index})")]
    EnvelopeNotMonotone { index: usize },
    #[error("envelope admits no distribution: total mass {total} < 1")]
    EnvelopeInfeasible { total: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid decimal value {0:?}")]
    BadDecimal(String),
    #[error("scale constant must be positive, got {0}")]
    InvalidScale(f64),
}

/// A probability vector over `[k]` with its nonincreasing view cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    probs: Vec<T>,
    order: Vec<usize>,
}

impl<T: Real> Distribution<T> {
    pub fn new(probs: Vec<T>) -> Result<Self, ModelError> {
        if probs.is_empty() {
            return Err(ModelError::EmptySupport);
        }
        if let Some(index) = probs.iter().position(|p| !p.is_finite() || *p < T::zero()) {
            return Err(ModelError::InvalidProbability { index });
        }
        let sum: T = probs.iter().copied().sum();
        if (sum - T::one()).abs() > T::prob_tol() {
            return Err(ModelError::NotNormalized {
                sum: sum.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut order: Vec<usize> = (0..probs.len()).collect();
        // stable: ties keep ascending original index
        order.sort_by(|&a, &b| probs[b].partial_cmp(&probs[a]).unwrap());
        Ok(Self { probs, order })
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(weights: &[T]) -> Result<Self, ModelError> {
        if weights.is_empty() {
            return Err(ModelError::EmptySupport);
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite() || *w < T::zero()) {
            return Err(ModelError::InvalidProbability { index });
        }
        let total: T = weights.iter().copied().sum();
        if total <= T::zero() {
            return Err(ModelError::NotNormalized { sum: 0.0 });
        }
        Self::new(weights.iter().map(|&w| w / total).collect())
    }

    pub fn uniform(k: usize) -> Result<Self, ModelError> {
        if k == 0 {
            return Err(ModelError::ZeroSupport);
        }
        let p = T::one() / T::from_count(k as u64);
        Self::new(vec![p; k])
    }

    /// Point mass on the 0-based `symbol`.
    pub fn point_mass(k: usize, symbol: usize) -> Result<Self, ModelError> {
        if symbol >= k {
            return Err(ModelError::SymbolOutOfRange { symbol: symbol + 1, k });
        }
        let mut probs = vec![T::zero(); k];
        probs[symbol] = T::one();
        Self::new(probs)
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Indices of `probs` in nonincreasing probability order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `p_(1) >= p_(2) >= ... >= p_(k)`.
    pub fn sorted(&self) -> Vec<T> {
        self.order.iter().map(|&i| self.probs[i]).collect()
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> T {
        -self.probs.iter().map(|&p| crate::scalar::xlog2x(p)).sum::<T>()
    }

    /// Relabels symbols: the result assigns `probs[perm[i]]` to symbol `i`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, ModelError> {
        if perm.len() != self.k() {
            return Err(ModelError::DimensionMismatch {
                expected: self.k(),
                found: perm.len(),
            });
        }
        Self::new(perm.iter().map(|&j| self.probs[j]).collect())
    }
}

/// `zipf(alpha, k)`: the power law `i^-alpha / C_{k,alpha}` on `[k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZipfClass<T> {
    alpha: T,
    k: usize,
    c_norm: T,
}

impl<T: Real> ZipfClass<T> {
    pub fn new(alpha: T, k: usize) -> Result<Self, ModelError> {
        if !(alpha > T::one()) || !alpha.is_finite() {
            return Err(ModelError::InvalidAlpha(alpha.to_f64().unwrap_or(f64::NAN)));
        }
        if k == 0 {
            return Err(ModelError::ZeroSupport);
        }
        Ok(Self {
            alpha,
            k,
            c_norm: zipf_normalizer(alpha, k),
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `C_{k,alpha} = sum_{i=1}^k i^-alpha`.
    pub fn c_norm(&self) -> T {
        self.c_norm
    }

    pub fn prob(&self, rank: usize) -> T {
        T::from_count(rank as u64).powf(-self.alpha) / self.c_norm
    }

    pub fn distribution(&self) -> Distribution<T> {
        let probs = (1..=self.k).map(|i| self.prob(i)).collect();
        Distribution::new(probs).expect("zipf weights normalize")
    }

    /// The power-law envelope `c * i^-alpha` on `[k]`.
    pub fn envelope(&self, c: T) -> Result<EnvelopeClass<T>, ModelError> {
        power_law_envelope(self.alpha, c, self.k)
    }
}

/// `sum_{i=1}^k i^-alpha`, accumulated from the smallest term upward.
pub fn zipf_normalizer<T: Real>(alpha: T, k: usize) -> T {
    let mut acc = crate::scalar::KahanSum::new();
    for i in (1..=k).rev() {
        acc.add(T::from_count(i as u64).powf(-alpha));
    }
    acc.value()
}

pub fn zipf_distribution<T: Real>(alpha: T, k: usize) -> Result<Distribution<T>, ModelError> {
    Ok(ZipfClass::new(alpha, k)?.distribution())
}

pub fn power_law_envelope<T: Real>(alpha: T, c: T, k: usize) -> Result<EnvelopeClass<T>, ModelError> {
    if !(c > T::zero()) {
        return Err(ModelError::InvalidScale(c.to_f64().unwrap_or(f64::NAN)));
    }
    if k == 0 {
        return Err(ModelError::ZeroSupport);
    }
    let f = (1..=k).map(|i| c * T::from_count(i as u64).powf(-alpha)).collect();
    EnvelopeClass::new(f)
}

/// Unordered envelope class: all `p` with `p_(i) <= f(i)` for every `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeClass<T> {
    envelope: Vec<T>,
}

impl<T: Real> EnvelopeClass<T> {
    pub fn new(envelope: Vec<T>) -> Result<Self, ModelError> {
        if envelope.is_empty() {
            return Err(ModelError::ZeroSupport);
        }
        for (i, &f) in envelope.iter().enumerate() {
            if !f.is_finite() || f < T::zero() || (i > 0 && f > envelope[i - 1]) {
                return Err(ModelError::EnvelopeNotMonotone { index: i });
            }
        }
        Ok(Self { envelope })
    }

    pub fn k(&self) -> usize {
        self.envelope.len()
    }

    pub fn envelope(&self) -> &[T] {
        &self.envelope
    }

    /// Fails when no distribution fits under the envelope.
    pub fn check_nonempty(&self) -> Result<(), ModelError> {
        let total: T = self.envelope.iter().copied().sum();
        if total < T::one() - T::prob_tol() {
            return Err(ModelError::EnvelopeInfeasible {
                total: total.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    pub fn contains(&self, d: &Distribution<T>) -> bool {
        d.k() == self.k()
            && d.sorted()
                .iter()
                .zip(&self.envelope)
                .all(|(&p, &f)| p <= f + T::prob_tol())
    }
}

/// All relabelings of a fixed distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationClass<T> {
    base: Distribution<T>,
}

impl<T: Real> PermutationClass<T> {
    pub fn new(base: Distribution<T>) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &Distribution<T> {
        &self.base
    }

    pub fn contains(&self, d: &Distribution<T>) -> bool {
        d.k() == self.base.k()
            && d.sorted()
                .iter()
                .zip(self.base.sorted())
                .all(|(&a, b)| (a - b).abs() <= T::prob_tol())
    }
}

/// Distributions whose expected distinct count at length `n` is at most `d_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinctBoundedClass<T> {
    pub d_max: T,
    pub k: usize,
    pub n: usize,
}

impl<T: Real> DistinctBoundedClass<T> {
    pub fn contains(&self, p: &Distribution<T>) -> bool {
        p.k() == self.k && expected_distinct(p, self.n) <= self.d_max + T::prob_tol()
    }
}

/// Multiplicities of each symbol of `[k]` in a sequence of length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeVector {
    mu: Vec<usize>,
    n: usize,
}

impl TypeVector {
    pub fn new(mu: Vec<usize>) -> Result<Self, ModelError> {
        if mu.is_empty() {
            return Err(ModelError::ZeroSupport);
        }
        let n = mu.iter().sum();
        if n == 0 {
            return Err(ModelError::EmptySequence);
        }
        Ok(Self { mu, n })
    }

    pub fn mu(&self) -> &[usize] {
        &self.mu
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.mu.len()
    }

    /// `phi_+`: number of symbols that occur.
    pub fn distinct_count(&self) -> usize {
        self.mu.iter().filter(|&&m| m > 0).count()
    }

    /// 0-based symbols that occur, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.mu.len()).filter(|&i| self.mu[i] > 0).collect()
    }

    /// Multiplicities in nonincreasing order (zeros included).
    pub fn sorted_desc(&self) -> Vec<usize> {
        let mut v = self.mu.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    pub fn profile(&self) -> Profile {
        profile_of(self)
    }
}

/// Type of a sequence of 1-based symbols over `[k]`.
pub fn type_of(sequence: &[usize], k: usize) -> Result<TypeVector, ModelError> {
    if k == 0 {
        return Err(ModelError::ZeroSupport);
    }
    if sequence.is_empty() {
        return Err(ModelError::EmptySequence);
    }
    let mut mu = vec![0usize; k];
    for &s in sequence {
        if s == 0 || s > k {
            return Err(ModelError::SymbolOutOfRange { symbol: s, k });
        }
        mu[s - 1] += 1;
    }
    Ok(TypeVector { mu, n: sequence.len() })
}

/// Prevalences `phi_mu` for every multiplicity `mu >= 1` that occurs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Profile {
    prevalences: BTreeMap<usize, usize>,
    n: usize,
}

impl Profile {
    pub fn prevalences(&self) -> &BTreeMap<usize, usize> {
        &self.prevalences
    }

    pub fn prevalence(&self, mu: usize) -> usize {
        self.prevalences.get(&mu).copied().unwrap_or(0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `phi_+ = sum_mu phi_mu`.
    pub fn distinct(&self) -> usize {
        self.prevalences.values().sum()
    }
}

pub fn profile_of(t: &TypeVector) -> Profile {
    let mut prevalences = BTreeMap::new();
    for &m in t.mu.iter().filter(|&&m| m > 0) {
        *prevalences.entry(m).or_insert(0) += 1;
    }
    Profile { prevalences, n: t.n }
}

/// `1 - (1-p)^n`, the probability that a symbol of mass `p` appears in `n` draws.
pub fn prob_seen<T: Real>(p: T, n: usize) -> T {
    let nf = T::from_count(n as u64);
    if p < T::lit(0.5) {
        -(nf * (-p).ln_1p()).exp_m1()
    } else {
        T::one() - (T::one() - p).powf(nf)
    }
}

/// `E[phi_+^n] = sum_i 1 - (1-p_i)^n`.
pub fn expected_distinct<T: Real>(p: &Distribution<T>, n: usize) -> T {
    p.probs().iter().map(|&pi| prob_seen(pi, n)).sum()
}

/// Expected prevalence statistics under Poisson(n) sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonPrevalences<T> {
    /// `d^{poi(n)} = sum_i 1 - e^{-lambda_i}`.
    pub distinct: T,
    /// `v = E[phi_1] = sum_i lambda_i e^{-lambda_i}`.
    pub singletons: T,
    /// `E[phi_2] = sum_i lambda_i^2 e^{-lambda_i} / 2`.
    pub doubletons: T,
}

pub fn poisson_prevalences<T: Real>(p: &Distribution<T>, n: usize) -> PoissonPrevalences<T> {
    let nf = T::from_count(n as u64);
    let half = T::lit(0.5);
    let mut out = PoissonPrevalences {
        distinct: T::zero(),
        singletons: T::zero(),
        doubletons: T::zero(),
    };
    for &pi in p.probs() {
        let lambda = nf * pi;
        let decay = (-lambda).exp();
        out.distinct = out.distinct - (-lambda).exp_m1();
        out.singletons = out.singletons + lambda * decay;
        out.doubletons = out.doubletons + lambda * lambda * decay * half;
    }
    out
}

pub fn expected_distinct_poisson<T: Real>(p: &Distribution<T>, n: usize) -> T {
    poisson_prevalences(p, n).distinct
}

/// A real number carried as a decimal string in class files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Decimal {
    Text(String),
    Number(f64),
}

impl Decimal {
    pub fn parse<T: Real>(&self) -> Result<T, ModelError> {
        match self {
            Decimal::Text(s) => s.trim().parse::<T>().map_err(|_| ModelError::BadDecimal(s.clone())),
            Decimal::Number(x) => T::from_f64(*x).ok_or_else(|| ModelError::BadDecimal(x.to_string())),
        }
    }
}

impl From<f64> for Decimal {
    fn from(x: f64) -> Self {
        Decimal::Text(format!("{x:?}"))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decimal::Text(s) => f.write_str(s),
            Decimal::Number(x) => write!(f, "{x:?}"),
        }
    }
}

/// Serialized class description consumed by the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassSpec {
    Zipf { alpha: Decimal, k: usize },
    Envelope { envelope: Vec<Decimal> },
    Permutation { probs: Vec<Decimal> },
    Explicit { probs: Vec<Decimal> },
}

/// A class description resolved to a concrete scalar type.
#[derive(Debug, Clone, PartialEq)]
pub enum ResolvedClass<T> {
    Zipf(ZipfClass<T>),
    Envelope(EnvelopeClass<T>),
    Permutation(PermutationClass<T>),
    Explicit(Distribution<T>),
}

impl ClassSpec {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn resolve<T: Real>(&self) -> Result<ResolvedClass<T>, ModelError> {
        let parse_all = |v: &[Decimal]| v.iter().map(Decimal::parse::<T>).collect::<Result<Vec<_>, _>>();
        Ok(match self {
            ClassSpec::Zipf { alpha, k } => ResolvedClass::Zipf(ZipfClass::new(alpha.parse()?, *k)?),
            ClassSpec::Envelope { envelope } => ResolvedClass::Envelope(EnvelopeClass::new(parse_all(envelope)?)?),
            ClassSpec::Permutation { probs } => {
                ResolvedClass::Permutation(PermutationClass::new(Distribution::new(parse_all(probs)?)?))
            }
            ClassSpec::Explicit { probs } => ResolvedClass::Explicit(Distribution::new(parse_all(probs)?)?),
        })
    }

    /// Short human-readable label used in reports.
    pub fn label(&self) -> String {
        match self {
            ClassSpec::Zipf { alpha, k } => format!("zipf(alpha={alpha}, k={k})"),
            ClassSpec::Envelope { envelope } => format!("envelope(k={})", envelope.len()),
            ClassSpec::Permutation { probs } => format!("permutation(k={})", probs.len()),
            ClassSpec::Explicit { probs } => format!("explicit(k={})", probs.len()),
        }
    }
}

impl<T: Real> ResolvedClass<T> {
    /// A representative member: the distribution itself, or for an envelope
    /// the water-filled member closest to uniform.
    pub fn representative(&self) -> Result<Distribution<T>, ModelError> {
        match self {
            ResolvedClass::Zipf(z) => Ok(z.distribution()),
            ResolvedClass::Permutation(p) => Ok(p.base().clone()),
            ResolvedClass::Explicit(d) => Ok(d.clone()),
            ResolvedClass::Envelope(e) => {
                e.check_nonempty()?;
                let k = e.k();
                let weights = vec![1usize; k];
                let member = crate::shtarkov::envelope_water_fill(e.envelope(), &weights);
                Distribution::new(member)
            }
        }
    }
}
