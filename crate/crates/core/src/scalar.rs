//! Scalar abstraction shared by every floating-point routine in the crate.
//!
//! The probability, bound and redundancy layers are written once against
//! [`Real`] and instantiated for `f64` (the default, see the aliases at the
//! crate root) or `f32`. Exact quantities such as ranks and Kraft sums never
//! go through this trait; they use big integers and big rationals.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar usable by the model, bound and redundancy layers.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for probability comparisons and class membership.
    fn prob_tol() -> Self {
        let floor = Self::from_f64(1e-12).unwrap();
        floor.max(Self::epsilon() * Self::from_f64(64.0).unwrap())
    }

    /// Converts an `f64` constant, panicking only if the target cannot hold it.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    #[inline]
    fn from_count(x: u64) -> Self {
        Self::from_u64(x).expect("count representable in scalar type")
    }

    /// `log2(e)`.
    #[inline]
    fn log2_e() -> Self {
        <Self as FloatConst>::LOG2_E()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `x * log2(x)` with the convention `0 log 0 = 0`.
#[inline]
pub fn xlog2x<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x * x.log2()
    }
}

/// Base-2 logarithm of an arbitrary-precision integer, `-inf` for zero.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit prefix");
    top.log2() + shift as f64
}

/// Natural-log factorial table `ln(0!) ..= ln(max!)`.
pub fn ln_factorials<T: Real>(max: usize) -> Vec<T> {
    let mut table = Vec::with_capacity(max + 1);
    let mut acc = 0.0f64;
    table.push(T::zero());
    for i in 1..=max {
        acc += (i as f64).ln();
        table.push(T::lit(acc));
    }
    table
}

/// Compensated (Kahan–Babuška) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

/// `log2(Σ 2^terms)` evaluated stably; empty or all `-inf` input yields `-inf`.
pub fn log2_sum_exp2<T: Real>(terms: &[T]) -> T {
    let max = terms.iter().copied().fold(T::neg_infinity(), |a, b| a.max(b));
    if max == T::neg_infinity() {
        return max;
    }
    let mut acc = KahanSum::new();
    for &t in terms {
        if t > T::neg_infinity() {
            acc.add((t - max).exp2());
        }
    }
    max + acc.value().log2()
}
