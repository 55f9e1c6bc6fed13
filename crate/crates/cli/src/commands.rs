//! Implementations of the encode, decode, bounds, shtarkov and redundancy commands.

use std::path::Path;

use serde::Serialize;
use uec::bounds::{
    distinct_lower_bound, distinct_upper_bound, envelope_distinct_bound, worst_case_lower_bound_zipf,
    zipf_envelope_bounds, BoundError, BoundReport,
};
use uec::codec::{self, CodecParams};
use uec::model::{expected_distinct, type_of, zipf_distribution, ClassSpec, Decimal, Distribution, ResolvedClass};
use uec::redundancy::{
    achieved_redundancy, minimax_type_redundancy, type_entropy_poisson, MinimaxResult, PoissonEntropyReport,
    RedundancyReport,
};
use uec::shtarkov::{
    shtarkov_sum_envelope_class, shtarkov_sum_permutation_class, shtarkov_sum_zipf, ShtarkovMethod, ShtarkovReport,
};

use crate::config::{CommonArgs, DecodeArgs, EncodeArgs, Format, MethodArg, RedundancyArgs, RunConfig, ShtarkovArgs};
use crate::error::CliError;
use crate::output::{emit, to_json, write_bytes};
use crate::tokens::{detokenize, tokenize, Alphabet};

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))
}

fn single<T: Copy>(values: &[T], name: &str) -> Result<T, CliError> {
    match values {
        [v] => Ok(*v),
        [] => Err(CliError::Usage(format!("--{name} is required"))),
        _ => Err(CliError::Usage(format!(
            "--{name} takes a single value for this command"
        ))),
    }
}

/// Field widths and ideal length of one encoded block.
#[derive(Debug, Clone, Serialize)]
pub struct BlockReport {
    pub n: usize,
    pub distinct: usize,
    pub distinct_bits: u64,
    pub subset_bits: u64,
    pub composition_bits: u64,
    pub arrangement_bits: u64,
    pub payload_bits: u64,
    /// `-log2 q(x^n)` under the ideal coding distribution.
    pub ideal_bits: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CodecReport {
    pub config: RunConfig,
    pub k: usize,
    pub tokens: usize,
    pub blocks: Vec<BlockReport>,
    pub payload_bits: u64,
    pub file_bytes: usize,
}

fn block_report(seq: &[usize], params: &CodecParams) -> Result<BlockReport, CliError> {
    let l = codec::layout(seq, params)?;
    let t = type_of(seq, params.k())?;
    Ok(BlockReport {
        n: params.n(),
        distinct: l.d,
        distinct_bits: l.d_bits,
        subset_bits: l.subset_bits,
        composition_bits: l.composition_bits,
        arrangement_bits: l.arrangement_bits,
        payload_bits: l.total_bits(),
        ideal_bits: codec::implied_log_prob(&t, params)?,
    })
}

fn codec_config(command: &str, n: Option<usize>, k: usize, output: &Path, mode: crate::tokens::TokenMode) -> RunConfig {
    RunConfig {
        command: command.to_owned(),
        class_file: None,
        n: n.into_iter().collect(),
        k: vec![k],
        alpha: Vec::new(),
        c: Vec::new(),
        seed: crate::config::DEFAULT_SEED,
        trials: crate::config::DEFAULT_TRIALS,
        tol: crate::config::DEFAULT_TOL,
        format: Format::Json,
        output: Some(output.display().to_string()),
        options: Vec::new(),
    }
    .with_option("tokens", format!("{mode:?}").to_lowercase())
}

pub fn encode(args: &EncodeArgs) -> Result<(), CliError> {
    let alphabet = Alphabet::parse(&read_text(&args.alphabet)?)?;
    let k = alphabet.len();
    if let Some(expected) = args.k {
        if expected != k {
            return Err(CliError::Usage(format!(
                "--k {expected} does not match alphabet size {k}"
            )));
        }
    }
    let tokens = tokenize(&read_text(&args.input)?, args.tokens);
    if tokens.is_empty() {
        return Err(CliError::Usage("input contains no tokens".into()));
    }
    let seq = tokens.iter().map(|t| alphabet.rank(t)).collect::<Result<Vec<_>, _>>()?;
    let block = args.n.unwrap_or(seq.len());
    if block == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let mut file = Vec::new();
    let mut blocks = Vec::new();
    for chunk in seq.chunks(block) {
        let params = CodecParams::new(k, chunk.len())?;
        let bits = codec::encode(chunk, &params)?;
        codec::write_frame(&mut file, &params, &bits).map_err(CliError::io("assembling frame"))?;
        blocks.push(block_report(chunk, &params)?);
    }
    write_bytes(&file, Some(&args.output))?;
    let report = CodecReport {
        config: codec_config("encode", args.n, k, &args.output, args.tokens),
        k,
        tokens: seq.len(),
        payload_bits: blocks.iter().map(|b| b.payload_bits).sum(),
        blocks,
        file_bytes: file.len(),
    };
    write_bytes(&to_json(&report)?, args.report.as_deref())
}

pub fn decode(args: &DecodeArgs) -> Result<(), CliError> {
    let alphabet = Alphabet::parse(&read_text(&args.alphabet)?)?;
    let k = alphabet.len();
    if let Some(expected) = args.k {
        if expected != k {
            return Err(CliError::Usage(format!(
                "--k {expected} does not match alphabet size {k}"
            )));
        }
    }
    let data = std::fs::read(&args.input).map_err(CliError::io(format!("reading {}", args.input.display())))?;
    if data.is_empty() {
        return Err(CliError::Usage("input contains no frames".into()));
    }
    let mut pos = 0;
    let mut seq = Vec::new();
    let mut blocks = Vec::new();
    while pos < data.len() {
        let (params, block, consumed) = codec::read_frame(&data[pos..])?;
        if params.k() != k {
            return Err(CliError::Usage(format!(
                "frame header has k={} but the alphabet has {k} symbols",
                params.k()
            )));
        }
        if let Some(n) = args.n {
            let last = pos + consumed == data.len();
            if params.n() > n || (!last && params.n() != n) {
                return Err(CliError::Usage(format!(
                    "frame header has n={} but blocks of n={n} were expected",
                    params.n()
                )));
            }
        }
        blocks.push(block_report(&block, &params)?);
        seq.extend(block);
        pos += consumed;
    }
    let tokens: Vec<&str> = seq.iter().map(|&s| alphabet.symbol(s)).collect();
    write_bytes(detokenize(&tokens, args.tokens).as_bytes(), Some(&args.output))?;
    let report = CodecReport {
        config: codec_config("decode", args.n, k, &args.output, args.tokens),
        k,
        tokens: seq.len(),
        payload_bits: blocks.iter().map(|b| b.payload_bits).sum(),
        blocks,
        file_bytes: data.len(),
    };
    write_bytes(&to_json(&report)?, args.report.as_deref())
}

/// One row of the bounds table.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub alpha: f64,
    pub c: f64,
    pub k: usize,
    pub n: usize,
    pub claim: &'static str,
    pub status: &'static str,
    pub value: Option<f64>,
    pub normalized: Option<f64>,
    pub note: String,
    pub anchor: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub config: RunConfig,
    pub rows: Vec<BoundRow>,
}

pub const BOUND_CLAIMS: [&str; 6] = [
    "worst_case_zipf",
    "distinct_upper",
    "distinct_lower",
    "envelope_distinct",
    "zipf_envelope_upper",
    "zipf_envelope_lower",
];

fn bound_anchor(claim: &str) -> &'static str {
    use uec::bounds::*;
    match claim {
        "worst_case_zipf" => ANCHOR_WORST_CASE,
        "distinct_upper" => ANCHOR_DISTINCT_UPPER,
        "distinct_lower" => ANCHOR_DISTINCT_LOWER,
        "envelope_distinct" => ANCHOR_ENVELOPE_DISTINCT,
        _ => ANCHOR_ZIPF_ENVELOPE,
    }
}

fn evaluate_point(alpha: f64, c: f64, k: usize, n: usize) -> Vec<(&'static str, Result<BoundReport<f64>, String>)> {
    let err = |e: BoundError| e.to_string();
    let zipf = zipf_distribution(alpha, k).map_err(|e| e.to_string());
    let distinct = |lower: bool| -> Result<BoundReport<f64>, String> {
        let p = zipf.clone()?;
        let d = expected_distinct(&p, n);
        if lower {
            let lambdas: Vec<f64> = p.probs().iter().map(|x| x * n as f64).collect();
            distinct_lower_bound(k, n, d, &lambdas).map_err(err)
        } else {
            distinct_upper_bound(k, n, d).map_err(err)
        }
    };
    let envelope = zipf_envelope_bounds(alpha, c, k, n).map_err(err);
    vec![
        ("worst_case_zipf", worst_case_lower_bound_zipf(alpha, k, n).map_err(err)),
        ("distinct_upper", distinct(false)),
        ("distinct_lower", distinct(true)),
        (
            "envelope_distinct",
            envelope_distinct_bound(alpha, c, k, n).map_err(err),
        ),
        ("zipf_envelope_upper", envelope.clone().map(|b| b.upper)),
        ("zipf_envelope_lower", envelope.map(|b| b.lower)),
    ]
}

pub fn bound_rows(alphas: &[f64], cs: &[f64], ks: &[usize], ns: &[usize]) -> Vec<BoundRow> {
    let mut rows = Vec::new();
    for &alpha in alphas {
        for &c in cs {
            for &k in ks {
                for &n in ns {
                    let scale = (n as f64).powf(1.0 / alpha) * (k as f64).log2();
                    for (claim, result) in evaluate_point(alpha, c, k, n) {
                        let (status, value, note) = match result {
                            Ok(b) => ("ok", Some(b.value), b.margin.clone().unwrap_or_default()),
                            Err(e) => ("infeasible", None, e),
                        };
                        rows.push(BoundRow {
                            alpha,
                            c,
                            k,
                            n,
                            claim,
                            status,
                            value,
                            normalized: value.filter(|_| scale > 0.0 && scale.is_finite()).map(|v| v / scale),
                            note,
                            anchor: bound_anchor(claim).to_owned(),
                        });
                    }
                }
            }
        }
    }
    rows
}

pub fn bounds(args: &CommonArgs) -> Result<(), CliError> {
    if args.k.is_empty() || args.n.is_empty() {
        return Err(CliError::Usage("bounds needs --k and --n".into()));
    }
    let alphas = if args.alpha.is_empty() {
        vec![2.0]
    } else {
        args.alpha.clone()
    };
    let cs = if args.c.is_empty() { vec![1.0] } else { args.c.clone() };
    let mut config = RunConfig::from_common("bounds", args);
    config.alpha = alphas.clone();
    config.c = cs.clone();
    let report = BoundsReport {
        rows: bound_rows(&alphas, &cs, &args.k, &args.n),
        config,
    };
    emit(&report, Some(&report.rows), args.format, args.output.as_deref())
}

/// Reads `--class`, or builds a Zipf class from `--alpha` and `--k`.
pub fn class_spec(args: &CommonArgs) -> Result<ClassSpec, CliError> {
    match &args.class {
        Some(path) => ClassSpec::from_json(&read_text(path)?)
            .map_err(|e| CliError::Usage(format!("class file {}: {e}", path.display()))),
        None => Ok(ClassSpec::Zipf {
            alpha: Decimal::from(single(&args.alpha, "alpha")?),
            k: single(&args.k, "k")?,
        }),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ShtarkovOutput {
    pub config: RunConfig,
    pub class: String,
    pub report: ShtarkovReport<f64>,
}

pub fn shtarkov(args: &ShtarkovArgs) -> Result<(), CliError> {
    let common = &args.common;
    let spec = class_spec(common)?;
    let n = single(&common.n, "n")?;
    let method = match args.method {
        MethodArg::Grouped => ShtarkovMethod::ProfileGrouped,
        MethodArg::Exhaustive => ShtarkovMethod::Exhaustive,
    };
    let report = match spec.resolve::<f64>()? {
        ResolvedClass::Zipf(z) => shtarkov_sum_zipf(&z, n, method)?,
        ResolvedClass::Envelope(e) => shtarkov_sum_envelope_class(&e, n, method)?,
        ResolvedClass::Permutation(p) => shtarkov_sum_permutation_class(p.base(), n, method)?,
        ResolvedClass::Explicit(_) => {
            return Err(CliError::Usage(
                "an explicit class has a single member and Shtarkov sum 1; use kind \"permutation\"".into(),
            ))
        }
    };
    let out = ShtarkovOutput {
        config: RunConfig::from_common("shtarkov", common)
            .with_option("method", format!("{:?}", args.method).to_lowercase()),
        class: spec.label(),
        report,
    };
    emit::<_, ()>(&out, None, common.format, common.output.as_deref())
}

/// Distinct relabelings of `base`, in lexicographic order of the permutation.
pub fn relabelings(base: &Distribution<f64>) -> Result<Vec<Distribution<f64>>, CliError> {
    let k = base.k();
    if k > 8 {
        return Err(CliError::Infeasible(format!(
            "{k}! relabelings exceed the minimax oracle's range"
        )));
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut out: Vec<Distribution<f64>> = Vec::new();
    loop {
        let d = base.permuted(&perm)?;
        if !out.iter().any(|o| o.probs() == d.probs()) {
            out.push(d);
        }
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return Ok(out);
        };
        let j = (i..k).rev().find(|&j| perm[j] > perm[i - 1]).expect("successor exists");
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RedundancyOutput {
    pub config: RunConfig,
    pub class: String,
    pub achieved: RedundancyReport<f64>,
    pub distinct_upper: Option<BoundReport<f64>>,
    pub poisson_type_entropy: PoissonEntropyReport<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimax: Option<MinimaxResult<f64>>,
}

pub fn redundancy(args: &RedundancyArgs) -> Result<(), CliError> {
    let common = &args.common;
    let spec = class_spec(common)?;
    let n = single(&common.n, "n")?;
    let p = spec.resolve::<f64>()?.representative()?;
    let achieved = achieved_redundancy(&p, n)?;
    let distinct_upper = distinct_upper_bound(p.k(), n, achieved.expected_distinct).ok();
    let minimax = if args.minimax {
        Some(minimax_type_redundancy(&relabelings(&p)?, n, common.tol)?)
    } else {
        None
    };
    let out = RedundancyOutput {
        config: RunConfig::from_common("redundancy", common).with_option("minimax", args.minimax),
        class: spec.label(),
        achieved,
        distinct_upper,
        poisson_type_entropy: type_entropy_poisson(&p, n)?,
        minimax,
    };
    emit::<_, ()>(&out, None, common.format, common.output.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabelings_are_distinct() {
        let p = Distribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert_eq!(relabelings(&p).unwrap().len(), 3);
        let q = Distribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        assert_eq!(relabelings(&q).unwrap().len(), 6);
    }

    #[test]
    fn bound_rows_follow_grid_order() {
        let rows = bound_rows(&[2.0], &[1.0], &[8, 64], &[16]);
        assert_eq!(rows.len(), 2 * BOUND_CLAIMS.len());
        assert_eq!(rows[0].k, 8);
        // n > k rules out the envelope bounds at k = 8
        let upper = rows
            .iter()
            .find(|r| r.k == 8 && r.claim == "zipf_envelope_upper")
            .unwrap();
        assert_eq!(upper.status, "infeasible");
        let ok = rows
            .iter()
            .find(|r| r.k == 64 && r.claim == "zipf_envelope_upper")
            .unwrap();
        assert_eq!(ok.status, "ok");
        assert!(ok.normalized.unwrap() > 0.0);
    }
}
