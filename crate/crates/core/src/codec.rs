//! Enumerative block codec.
//!
//! A length-`n` sequence over `[k]` is sent as four fixed-width big-endian
//! fields, in order:
//!
//! | field        | value                              | width (bits)                     |
//! |--------------|------------------------------------|----------------------------------|
//! | distinct     | `d - 1`                            | `ceil(log2 min(n, k))`           |
//! | support      | colex rank of the occurring symbols| `ceil(log2 C(k, d))`             |
//! | multiplicity | lex rank of the composition        | `ceil(log2 C(n-1, d-1))`         |
//! | arrangement  | lex rank within the type class     | `ceil(log2 n!/prod mu_j!)`       |
//!
//! Every width depends only on `(k, n)` and fields already decoded, so a
//! codeword is self-delimiting once the block header is known.

use std::fmt;
use std::io::{self, Read, Write};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{
    arrangement_rank, arrangement_unrank, binomial, composition_rank, composition_unrank, index_bits, multinomial,
    subset_rank, subset_unrank, BigCount, RankError,
};
use crate::model::{type_of, ModelError, TypeVector};
use crate::scalar::{log2_big, Real};

pub const MAGIC: &[u8; 4] = b"UEC1";

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("alphabet size and block length must be positive (k={k}, n={n})")]
    InvalidParams { k: usize, n: usize },
    #[error("sequence length {found} does not match block length {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("truncated codeword: needed {needed} bits, have {available}")]
    Truncated { needed: u64, available: u64 },
    #[error("codeword has {extra} trailing bits")]
    TrailingBits { extra: u64 },
    #[error("corrupt {field} field: {source}")]
    Corrupt {
        field: &'static str,
        #[source]
        source: RankError,
    },
    #[error("corrupt distinct field: d={d} exceeds min(n, k)={max}")]
    DistinctOutOfRange { d: usize, max: usize },
    #[error("bad magic bytes")]
    BadMagic,
    #[error("nonzero padding bits")]
    BadPadding,
    #[error("header: {0}")]
    Header(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A bit string, stored MSB-first in bytes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits {
    bytes: Vec<u8>,
    len: u64,
}

impl Bits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let byte = (self.len / 8) as usize;
        if byte == self.bytes.len() {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[byte] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    pub fn get(&self, i: u64) -> bool {
        assert!(i < self.len, "bit index out of range");
        self.bytes[(i / 8) as usize] & (0x80 >> (i % 8)) != 0
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: &BigUint, width: u64) {
        debug_assert!(value.bits() <= width);
        for i in (0..width).rev() {
            self.push(value.bit(i));
        }
    }

    /// Bytes with the final partial byte zero-padded.
    pub fn as_padded_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Interprets `bytes` as exactly `len` bits; trailing bits must be zero.
    pub fn from_padded_bytes(bytes: &[u8], len: u64) -> Result<Self, CodecError> {
        let needed = len.div_ceil(8) as usize;
        if bytes.len() < needed {
            return Err(CodecError::Truncated {
                needed: len,
                available: bytes.len() as u64 * 8,
            });
        }
        let mut out = Bits {
            bytes: bytes[..needed].to_vec(),
            len,
        };
        if bytes.len() > needed {
            return Err(CodecError::TrailingBits {
                extra: (bytes.len() - needed) as u64 * 8,
            });
        }
        if !len.is_multiple_of(8) {
            let mask = 0xffu8 >> (len % 8);
            if out.bytes[needed - 1] & mask != 0 {
                return Err(CodecError::BadPadding);
            }
            out.bytes[needed - 1] &= !mask;
        }
        Ok(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut b = Bits::new();
        iter.into_iter().for_each(|bit| b.push(bit));
        b
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.iter().try_for_each(|b| f.write_str(if b { "1" } else { "0" }))
    }
}

struct BitReader<'a> {
    bits: &'a Bits,
    pos: u64,
}

impl BitReader<'_> {
    fn read_uint(&mut self, width: u64) -> Result<BigUint, CodecError> {
        if self.pos + width > self.bits.len() {
            return Err(CodecError::Truncated {
                needed: self.pos + width,
                available: self.bits.len(),
            });
        }
        let mut v = BigUint::zero();
        for _ in 0..width {
            v <<= 1u32;
            if self.bits.get(self.pos) {
                v.set_bit(0, true);
            }
            self.pos += 1;
        }
        Ok(v)
    }
}

/// Alphabet size and block length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodecParams {
    k: usize,
    n: usize,
}

impl CodecParams {
    pub fn new(k: usize, n: usize) -> Result<Self, CodecError> {
        if k == 0 || n == 0 {
            return Err(CodecError::InvalidParams { k, n });
        }
        Ok(Self { k, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_distinct(&self) -> usize {
        self.n.min(self.k)
    }

    /// Width of the distinct-count field.
    pub fn distinct_bits(&self) -> u64 {
        index_bits(&BigUint::from(self.max_distinct()))
    }

    fn check_type(&self, t: &TypeVector) -> Result<(), CodecError> {
        if t.k() != self.k {
            return Err(ModelError::DimensionMismatch {
                expected: self.k,
                found: t.k(),
            }
            .into());
        }
        if t.n() != self.n {
            return Err(CodecError::LengthMismatch {
                expected: self.n,
                found: t.n(),
            });
        }
        Ok(())
    }
}

/// The four field values of a codeword and their widths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodewordLayout {
    pub d: usize,
    pub d_bits: u64,
    pub subset_rank: BigCount,
    pub subset_bits: u64,
    pub composition_rank: BigCount,
    pub composition_bits: u64,
    pub arrangement_rank: BigCount,
    pub arrangement_bits: u64,
}

impl CodewordLayout {
    pub fn total_bits(&self) -> u64 {
        self.d_bits + self.subset_bits + self.composition_bits + self.arrangement_bits
    }
}

/// Field widths `(subset, composition, arrangement)` for a type.
fn field_widths(params: &CodecParams, t: &TypeVector) -> (u64, u64, u64) {
    let d = t.distinct_count() as u64;
    let k = params.k as u64;
    let n = params.n as u64;
    let parts: Vec<usize> = t.mu().iter().copied().filter(|&m| m > 0).collect();
    (
        index_bits(&binomial(k, d)),
        index_bits(&binomial(n - 1, d - 1)),
        index_bits(&multinomial(&parts)),
    )
}

/// Computes the codeword fields for a sequence of 1-based symbols.
pub fn layout(sequence: &[usize], params: &CodecParams) -> Result<CodewordLayout, CodecError> {
    if sequence.len() != params.n {
        return Err(CodecError::LengthMismatch {
            expected: params.n,
            found: sequence.len(),
        });
    }
    let t = type_of(sequence, params.k)?;
    let support = t.support();
    let parts: Vec<usize> = support.iter().map(|&s| t.mu()[s]).collect();
    let mut local = vec![usize::MAX; params.k];
    for (j, &s) in support.iter().enumerate() {
        local[s] = j;
    }
    let local_seq: Vec<usize> = sequence.iter().map(|&s| local[s - 1]).collect();
    let rank_err = |field| move |source| CodecError::Corrupt { field, source };

    let (subset_bits, composition_bits, arrangement_bits) = field_widths(params, &t);
    Ok(CodewordLayout {
        d: support.len(),
        d_bits: params.distinct_bits(),
        subset_rank: subset_rank(&support, params.k).map_err(rank_err("support"))?,
        subset_bits,
        composition_rank: composition_rank(&parts).map_err(rank_err("multiplicity"))?,
        composition_bits,
        arrangement_rank: arrangement_rank(&local_seq, &parts).map_err(rank_err("arrangement"))?,
        arrangement_bits,
    })
}

/// Encodes a sequence of 1-based symbols in `[1, k]`.
pub fn encode(sequence: &[usize], params: &CodecParams) -> Result<Bits, CodecError> {
    if sequence.is_empty() {
        return Err(ModelError::EmptySequence.into());
    }
    let l = layout(sequence, params)?;
    let mut bits = Bits::new();
    bits.push_uint(&BigUint::from(l.d - 1), l.d_bits);
    bits.push_uint(&l.subset_rank, l.subset_bits);
    bits.push_uint(&l.composition_rank, l.composition_bits);
    bits.push_uint(&l.arrangement_rank, l.arrangement_bits);
    Ok(bits)
}

/// Decodes a codeword that must occupy `bits` exactly.
pub fn decode(bits: &Bits, params: &CodecParams) -> Result<Vec<usize>, CodecError> {
    let mut reader = BitReader { bits, pos: 0 };
    let (seq, used) = decode_prefix(&mut reader, params)?;
    if used != bits.len() {
        return Err(CodecError::TrailingBits {
            extra: bits.len() - used,
        });
    }
    Ok(seq)
}

fn decode_prefix(reader: &mut BitReader<'_>, params: &CodecParams) -> Result<(Vec<usize>, u64), CodecError> {
    let k = params.k as u64;
    let n = params.n as u64;
    let d_field = reader.read_uint(params.distinct_bits())?;
    let d = usize::try_from(&d_field).unwrap_or(usize::MAX).saturating_add(1);
    if d > params.max_distinct() {
        return Err(CodecError::DistinctOutOfRange {
            d,
            max: params.max_distinct(),
        });
    }
    let corrupt = |field| move |source| CodecError::Corrupt { field, source };

    let subset_width = index_bits(&binomial(k, d as u64));
    let support = subset_unrank(&reader.read_uint(subset_width)?, d, params.k).map_err(corrupt("support"))?;

    let composition_width = index_bits(&binomial(n - 1, d as u64 - 1));
    let parts =
        composition_unrank(&reader.read_uint(composition_width)?, params.n, d).map_err(corrupt("multiplicity"))?;

    let arrangement_width = index_bits(&multinomial(&parts));
    let local = arrangement_unrank(&reader.read_uint(arrangement_width)?, &parts).map_err(corrupt("arrangement"))?;

    Ok((local.iter().map(|&j| support[j] + 1).collect(), reader.pos))
}

/// Codeword length for any sequence of type `t`, without encoding.
pub fn codeword_length(t: &TypeVector, params: &CodecParams) -> Result<u64, CodecError> {
    params.check_type(t)?;
    let (a, b, c) = field_widths(params, t);
    Ok(params.distinct_bits() + a + b + c)
}

/// `log2 N_d = log2(n * C(k, d) * C(n-1, d-1))`.
pub fn log2_normalizer(k: usize, n: usize, d: usize) -> f64 {
    (n as f64).log2() + log2_big(&binomial(k as u64, d as u64)) + log2_big(&binomial(n as u64 - 1, d as u64 - 1))
}

/// `-log2 q(x^n)` for the ideal coding distribution
/// `q(x^n) = prod_j (mu_j/n)^mu_j / N_d`, for any `x^n` of type `t`.
pub fn implied_log_prob<T: Real>(t: &TypeVector, params: &CodecParams) -> Result<T, CodecError> {
    params.check_type(t)?;
    let n = T::from_count(params.n as u64);
    let empirical: T = t
        .mu()
        .iter()
        .filter(|&&m| m > 0)
        .map(|&m| {
            let m = T::from_count(m as u64);
            m * (n / m).log2()
        })
        .sum();
    Ok(T::lit(log2_normalizer(params.k, params.n, t.distinct_count())) + empirical)
}

fn write_varint<W: Write>(w: &mut W, v: usize) -> io::Result<()> {
    leb128::write::unsigned(w, v as u64).map(|_| ())
}

fn read_varint<R: Read>(r: &mut R) -> Result<usize, CodecError> {
    let v = leb128::read::unsigned(r).map_err(|e| match e {
        leb128::read::Error::IoError(e) => CodecError::Io(e),
        leb128::read::Error::Overflow => CodecError::Header("varint overflow".into()),
    })?;
    usize::try_from(v).map_err(|_| CodecError::Header("varint too large".into()))
}

/// Writes one `UEC1` frame: magic, `n` and `k` as LEB128, then the payload
/// packed MSB-first and zero-padded to a byte boundary.
pub fn write_frame<W: Write>(w: &mut W, params: &CodecParams, payload: &Bits) -> io::Result<()> {
    w.write_all(MAGIC)?;
    write_varint(w, params.n)?;
    write_varint(w, params.k)?;
    w.write_all(payload.as_padded_bytes())
}

/// Encodes `sequence` and serializes it as a standalone `UEC1` file.
pub fn encode_file(sequence: &[usize], params: &CodecParams) -> Result<Vec<u8>, CodecError> {
    let bits = encode(sequence, params)?;
    let mut out = Vec::new();
    write_frame(&mut out, params, &bits)?;
    Ok(out)
}

/// Decodes one `UEC1` frame from the front of `data`, returning the
/// parameters, the sequence and the number of bytes consumed.
pub fn read_frame(data: &[u8]) -> Result<(CodecParams, Vec<usize>, usize), CodecError> {
    if data.len() < MAGIC.len() || &data[..4] != MAGIC {
        return Err(CodecError::BadMagic);
    }
    let mut cursor = &data[4..];
    let n = read_varint(&mut cursor)?;
    let k = read_varint(&mut cursor)?;
    let params = CodecParams::new(k, n)?;
    let header = data.len() - cursor.len();

    // The payload length is only known after decoding the leading fields,
    // so decode against everything available and then check the padding.
    let avail = Bits::from_padded_bytes(cursor, cursor.len() as u64 * 8)?;
    let mut reader = BitReader { bits: &avail, pos: 0 };
    let (seq, used) = decode_prefix(&mut reader, &params)?;
    let payload_bytes = used.div_ceil(8) as usize;
    // exact payload bit count: padding bits must be zero
    Bits::from_padded_bytes(&cursor[..payload_bytes], used)?;
    Ok((params, seq, header + payload_bytes))
}

/// Decodes a file holding exactly one `UEC1` frame.
pub fn decode_file(data: &[u8]) -> Result<(CodecParams, Vec<usize>), CodecError> {
    let (params, seq, used) = read_frame(data)?;
    if used != data.len() {
        return Err(CodecError::TrailingBits {
            extra: (data.len() - used) as u64 * 8,
        });
    }
    Ok((params, seq))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BANANA: [usize; 6] = [2, 1, 3, 1, 3, 1];

    #[test]
    fn singleton_alphabet_is_free() {
        let p = CodecParams::new(1, 9).unwrap();
        let bits = encode(&[1; 9], &p).unwrap();
        assert!(bits.is_empty());
        assert_eq!(decode(&bits, &p).unwrap(), vec![1; 9]);
    }

    #[test]
    fn banana_layout() {
        let p = CodecParams::new(4, 6).unwrap();
        let l = layout(&BANANA, &p).unwrap();
        assert_eq!(l.d, 3);
        assert_eq!(
            (l.d_bits, l.subset_bits, l.composition_bits, l.arrangement_bits),
            (2, 2, 4, 6)
        );
        let bits = encode(&BANANA, &p).unwrap();
        assert_eq!(bits.len(), 14);
        assert_eq!(decode(&bits, &p).unwrap(), BANANA.to_vec());
        let t = type_of(&BANANA, 4).unwrap();
        assert_eq!(codeword_length(&t, &p).unwrap(), 14);
    }

    #[test]
    fn fourteen_zero_bits_do_not_decode() {
        let p = CodecParams::new(4, 6).unwrap();
        let zeros: Bits = std::iter::repeat_n(false, 14).collect();
        assert!(matches!(
            decode(&zeros, &p),
            Err(CodecError::TrailingBits { extra: 10 })
        ));
    }

    #[test]
    fn encode_rejects_bad_input() {
        let p = CodecParams::new(3, 2).unwrap();
        assert!(matches!(
            encode(&[], &p),
            Err(CodecError::Model(ModelError::EmptySequence))
        ));
        assert!(matches!(
            encode(&[1, 4], &p),
            Err(CodecError::Model(ModelError::SymbolOutOfRange { .. }))
        ));
        assert!(matches!(encode(&[1, 2, 3], &p), Err(CodecError::LengthMismatch { .. })));
        assert!(CodecParams::new(0, 3).is_err());
    }

    #[test]
    fn truncated_and_corrupt_codewords() {
        let p = CodecParams::new(4, 6).unwrap();
        let bits = encode(&BANANA, &p).unwrap();
        let short: Bits = bits.iter().take(10).collect();
        assert!(matches!(decode(&short, &p), Err(CodecError::Truncated { .. })));
        // d = 4 over k = 4: support width 0; composition width 4 bits covers 10 values
        let mut bad = Bits::new();
        bad.push_uint(&BigUint::from(3u32), 2);
        bad.push_uint(&BigUint::from(15u32), 4);
        assert!(matches!(
            decode(&bad, &p),
            Err(CodecError::Corrupt {
                field: "multiplicity",
                ..
            })
        ));
    }

    #[test]
    fn implied_log_prob_examples() {
        let p = CodecParams::new(1, 8).unwrap();
        let t = TypeVector::new(vec![8]).unwrap();
        assert!((implied_log_prob::<f64>(&t, &p).unwrap() - 3.0).abs() < 1e-12);

        let p = CodecParams::new(4, 6).unwrap();
        let t = TypeVector::new(vec![3, 1, 2, 0]).unwrap();
        let h = -(0.5f64 * 0.5f64.log2() + (1.0 / 6.0) * (1.0f64 / 6.0).log2() + (1.0 / 3.0) * (1.0f64 / 3.0).log2());
        let expected = (6.0f64 * 4.0 * 10.0).log2() + 6.0 * h;
        assert!((implied_log_prob::<f64>(&t, &p).unwrap() - expected).abs() < 1e-12);
        assert!(implied_log_prob::<f64>(&t, &p).unwrap() + 4.0 >= 14.0);
    }

    #[test]
    fn file_round_trip_and_validation() {
        let p = CodecParams::new(4, 6).unwrap();
        let file = encode_file(&BANANA, &p).unwrap();
        assert_eq!(&file[..4], b"UEC1");
        assert_eq!(file.len(), 4 + 1 + 1 + 2);
        let (q, seq) = decode_file(&file).unwrap();
        assert_eq!(q, p);
        assert_eq!(seq, BANANA.to_vec());

        let mut bad = file.clone();
        bad[0] = b'X';
        assert!(matches!(decode_file(&bad), Err(CodecError::BadMagic)));
        let mut padded = file.clone();
        *padded.last_mut().unwrap() |= 1;
        assert!(matches!(decode_file(&padded), Err(CodecError::BadPadding)));
        let mut long = file.clone();
        long.push(0);
        assert!(matches!(decode_file(&long), Err(CodecError::TrailingBits { .. })));
        assert!(decode_file(&file[..file.len() - 1]).is_err());
    }
}
