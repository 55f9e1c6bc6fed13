use std::path::Path;
use std::process::{Command, Output};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn uec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn banana_payload_is_fourteen_bits() {
    let dir = tempfile::tempdir().unwrap();
    let alphabet = dir.path().join("alphabet.txt");
    let input = dir.path().join("banana.txt");
    let packed = dir.path().join("banana.uec");
    let back = dir.path().join("back.txt");
    std::fs::write(&alphabet, "a\nb\nn\nx\n").unwrap();
    std::fs::write(&input, "banana").unwrap();

    let out = uec(&[
        "encode",
        "--alphabet",
        p(&alphabet),
        "--input",
        p(&input),
        "--output",
        p(&packed),
        "--tokens",
        "chars",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["payload_bits"], 14);
    let block = &report["blocks"][0];
    assert_eq!(
        [
            &block["distinct_bits"],
            &block["subset_bits"],
            &block["composition_bits"],
            &block["arrangement_bits"]
        ],
        [2, 2, 4, 6]
    );
    // magic, one-byte varints for n and k, two payload bytes
    let bytes = std::fs::read(&packed).unwrap();
    assert_eq!(&bytes[..4], b"UEC1");
    assert_eq!(bytes.len(), 4 + 1 + 1 + 2);

    let out = uec(&[
        "decode",
        "--alphabet",
        p(&alphabet),
        "--input",
        p(&packed),
        "--output",
        p(&back),
        "--tokens",
        "chars",
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&back).unwrap(), b"banana");
}

#[test]
fn empty_alphabet_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let alphabet = dir.path().join("empty.txt");
    let input = dir.path().join("in.txt");
    std::fs::write(&alphabet, "").unwrap();
    std::fs::write(&input, "a").unwrap();
    let out = uec(&[
        "encode",
        "--alphabet",
        p(&alphabet),
        "--input",
        p(&input),
        "--output",
        p(&dir.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
}

#[test]
fn unknown_token_and_header_mismatch_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let small = dir.path().join("small.txt");
    let large = dir.path().join("large.txt");
    let input = dir.path().join("in.txt");
    let packed = dir.path().join("in.uec");
    std::fs::write(&small, "a\nb\n").unwrap();
    std::fs::write(&large, "a\nb\nc\n").unwrap();
    std::fs::write(&input, "a b c").unwrap();
    let out = uec(&[
        "encode",
        "--alphabet",
        p(&small),
        "--input",
        p(&input),
        "--output",
        p(&packed),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = uec(&[
        "encode",
        "--alphabet",
        p(&large),
        "--input",
        p(&input),
        "--output",
        p(&packed),
    ]);
    assert!(out.status.success());
    let out = uec(&[
        "decode",
        "--alphabet",
        p(&small),
        "--input",
        p(&packed),
        "--output",
        p(&dir.path().join("x")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k=3"));
}

#[test]
fn zipf_stream_round_trips_in_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let k = 512;
    let symbols: Vec<String> = (1..=k).map(|i| format!("s{i}")).collect();
    let alphabet = dir.path().join("alphabet.txt");
    std::fs::write(&alphabet, symbols.join("\n") + "\n").unwrap();

    let weights: Vec<f64> = (1..=k).map(|i| (i as f64).powi(-2)).collect();
    let sampler = WeightedIndex::new(&weights).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let tokens: Vec<&str> = (0..10_000)
        .map(|_| symbols[sampler.sample(&mut rng)].as_str())
        .collect();
    let input = dir.path().join("stream.txt");
    std::fs::write(&input, tokens.join(" ") + "\n").unwrap();

    let packed = dir.path().join("stream.uec");
    let back = dir.path().join("back.txt");
    let out = uec(&[
        "encode",
        "--alphabet",
        p(&alphabet),
        "--input",
        p(&input),
        "--output",
        p(&packed),
        "--n",
        "256",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    let blocks = report["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 40);
    assert_eq!(blocks.last().unwrap()["n"], 10_000 - 39 * 256);

    let out = uec(&[
        "decode",
        "--alphabet",
        p(&alphabet),
        "--input",
        p(&packed),
        "--output",
        p(&back),
        "--n",
        "256",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&back).unwrap(), std::fs::read(&input).unwrap());
}

#[test]
fn bounds_rows_per_claim_and_infeasible_marking() {
    let out = uec(&["bounds", "--alpha", "2", "--c", "1", "--k", "64", "--n", "16"]);
    assert!(out.status.success());
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r["anchor"].as_str().is_some_and(|a| !a.is_empty())));

    let out = uec(&["bounds", "--alpha", "2", "--k", "8", "--n", "16", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha,c,k,n,claim,status,value,normalized,note,anchor"
    );
    let upper = lines.find(|l| l.contains("zipf_envelope_upper")).unwrap();
    assert!(upper.contains("infeasible"));
}

#[test]
fn shtarkov_and_redundancy_reports() {
    let out = uec(&["shtarkov", "--alpha", "2", "--k", "8", "--n", "2"]);
    assert!(out.status.success());
    let r = json(&out);
    let s = r["report"]["log2_S"].as_f64().unwrap();
    assert!(s >= r["report"]["worst_case_lower_bound"].as_f64().unwrap());
    assert!(s <= r["report"]["upper_bound_logkfact"].as_f64().unwrap());
    assert_eq!(r["config"]["seed"], 0xC0FFEE);

    let dir = tempfile::tempdir().unwrap();
    let class = dir.path().join("class.json");
    std::fs::write(&class, r#"{"kind":"permutation","probs":["0.5","0.3","0.2"]}"#).unwrap();
    let out = uec(&["redundancy", "--class", p(&class), "--n", "3", "--minimax"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    let minimax = r["minimax"]["value"].as_f64().unwrap();
    assert!(minimax > 0.0 && minimax <= 6f64.log2());
    assert!(r["achieved"]["achieved"].as_f64().unwrap() <= r["distinct_upper"]["value"].as_f64().unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(uec(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(uec(&["shtarkov", "--alpha", "2", "--n", "2"]).status.code(), Some(2));
    let huge = uec(&[
        "shtarkov",
        "--alpha",
        "2",
        "--k",
        "200",
        "--n",
        "60",
        "--method",
        "exhaustive",
    ]);
    assert_eq!(huge.status.code(), Some(3));
}

#[test]
fn verify_codec_suite_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("codec.json");
    let out = uec(&["verify", "--suite", "codec", "--output", p(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(r["summary"]["passed"], true);
    let claims = r["claims"].as_array().unwrap();
    for name in [
        "round_trip_exhaustive",
        "round_trip_random",
        "kraft_sum",
        "implied_q_mass",
        "length_over_ideal",
    ] {
        assert!(claims.iter().any(|c| c["claim"] == name), "{name}");
    }
}
