use uec::bounds::*;
use uec::model::{expected_distinct, zipf_distribution, zipf_normalizer};

#[test]
fn envelope_distinct_bound_dominates_zipf_distinct_count() {
    for alpha in [1.2f64, 1.5, 2.0, 3.0] {
        for k in [8usize, 64, 1024] {
            let c = zipf_normalizer(alpha, k).recip();
            let p = zipf_distribution(alpha, k).unwrap();
            for n in [1usize, 4, 16, 256, 4096] {
                let b = envelope_distinct_bound(alpha, c, k, n).unwrap();
                let d = expected_distinct(&p, n);
                assert!(b.value >= d, "alpha={alpha} k={k} n={n}: {} < {d}", b.value);
            }
        }
    }
}

#[test]
fn envelope_upper_exceeds_lower_on_grid() {
    for alpha in [1.5f64, 2.0, 3.0] {
        for ratio in [2usize, 8, 64] {
            for n in [16usize, 256] {
                let b = zipf_envelope_bounds(alpha, 1.0, ratio * n, n).unwrap();
                assert!(b.upper.value >= b.lower.value, "alpha={alpha} k={} n={n}", ratio * n);
                for r in [&b.upper, &b.lower] {
                    assert!((r.value - r.recombined()).abs() <= 1e-12 * r.value.abs().max(1.0));
                }
            }
        }
    }
}

#[test]
fn envelope_upper_scales_like_root_n_log_k() {
    let ratios: Vec<f64> = [16usize, 64, 256]
        .iter()
        .map(|&n| {
            let k = 8 * n;
            let b = zipf_envelope_bounds(2.0f64, 1.0, k, n).unwrap();
            b.upper.value / ((n as f64).sqrt() * (k as f64).log2())
        })
        .collect();
    let max = ratios.iter().copied().fold(f64::MIN, f64::max);
    let min = ratios.iter().copied().fold(f64::MAX, f64::min);
    println!("ratios {ratios:?}");
    assert!(max / min < 4.0, "{ratios:?}");
}

#[test]
fn small_lambda_sums_track_their_approximations() {
    let s = zipf_small_lambda_sums(2.0f64, 10_000, 100).unwrap();
    assert!((0.5..=2.0).contains(&s.n_minus_ratio));
    assert!(s.n_minus_exact < 0.7 * 10_000.0);
    for alpha in [1.5f64, 2.0, 3.0] {
        for (k, n) in [(1000usize, 10usize), (10_000, 100), (100_000, 1000)] {
            let s = zipf_small_lambda_sums(alpha, k, n).unwrap();
            assert!(
                s.neg_lambda_log_exact <= s.neg_lambda_log_chain,
                "alpha={alpha} k={k} n={n}"
            );
        }
    }
}

#[test]
fn distinct_upper_bound_grows_with_alphabet() {
    let mut last = f64::MIN;
    for k in [4usize, 16, 64, 256] {
        let v = distinct_upper_bound(k, 8, 3.0f64).unwrap().value;
        assert!(v > last);
        last = v;
    }
}
