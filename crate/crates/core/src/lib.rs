//! Universal compression of i.i.d. sources over large alphabets.
//!
//! The crate provides an enumerative pattern/profile codec, exact Shtarkov
//! sums for permutation, Zipf and envelope classes, closed-form redundancy
//! bounds, and a small laboratory for expected redundancy under fixed-length
//! and Poisson sampling.
//!
//! Numerical code is generic over [`Real`] (implemented for `f32` and `f64`);
//! the aliases below fix the scalar to `f64`. Counts, ranks and Kraft sums are
//! exact.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod codec;
pub mod combinatorics;
pub mod enumerate;
pub mod model;
pub mod redundancy;
pub mod scalar;
pub mod shtarkov;

pub use scalar::Real;

pub type Distribution64 = model::Distribution<f64>;
pub type Distribution32 = model::Distribution<f32>;
pub type ZipfClass64 = model::ZipfClass<f64>;
pub type EnvelopeClass64 = model::EnvelopeClass<f64>;
pub type ShtarkovReport64 = shtarkov::ShtarkovReport<f64>;
pub type BoundReport64 = bounds::BoundReport<f64>;
pub type RedundancyReport64 = redundancy::RedundancyReport<f64>;
pub type MinimaxResult64 = redundancy::MinimaxResult<f64>;
