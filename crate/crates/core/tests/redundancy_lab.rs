use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uec::bounds::{distinct_lower_bound, distinct_upper_bound};
use uec::model::{expected_distinct, expected_distinct_poisson, poisson_prevalences, zipf_distribution, Distribution};
use uec::redundancy::*;

fn d(p: &[f64]) -> Distribution<f64> {
    Distribution::new(p.to_vec()).unwrap()
}

fn all_permutations(base: &Distribution<f64>) -> Vec<Distribution<f64>> {
    let k = base.k();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..k).collect();
    fn heap(n: usize, perm: &mut Vec<usize>, base: &Distribution<f64>, out: &mut Vec<Distribution<f64>>) {
        if n == 1 {
            out.push(base.permuted(perm).unwrap());
            return;
        }
        for i in 0..n {
            heap(n - 1, perm, base, out);
            let j = if n.is_multiple_of(2) { i } else { 0 };
            perm.swap(j, n - 1);
        }
    }
    heap(k, &mut perm, base, &mut out);
    out
}

fn tiny_classes() -> Vec<(Vec<Distribution<f64>>, usize)> {
    vec![
        (
            vec![
                Distribution::point_mass(2, 0).unwrap(),
                Distribution::point_mass(2, 1).unwrap(),
            ],
            2,
        ),
        (vec![d(&[0.8, 0.2]), d(&[0.2, 0.8])], 3),
        (all_permutations(&zipf_distribution(2.0, 3).unwrap()), 2),
        (vec![d(&[0.5, 0.3, 0.2]), Distribution::uniform(3).unwrap()], 2),
        (vec![d(&[0.9, 0.1]), d(&[0.5, 0.5])], 2),
        (vec![zipf_distribution(1.5, 3).unwrap()], 2),
    ]
}

#[test]
fn zipf_permutations_are_six_distinct_members() {
    let perms = all_permutations(&zipf_distribution(2.0, 3).unwrap());
    assert_eq!(perms.len(), 6);
    for (i, a) in perms.iter().enumerate() {
        for b in &perms[i + 1..] {
            assert_ne!(a.probs(), b.probs());
        }
    }
}

#[test]
fn type_and_sequence_minimax_agree() {
    for (members, n) in tiny_classes() {
        let check = type_redundancy_equivalence_check(&members, n, 1e-7).unwrap();
        assert!(check.holds, "difference {}", check.difference);
        let log_members = (members.len() as f64).log2();
        assert!(check.sequence.value <= log_members + 1e-9);
    }
}

#[test]
fn fixed_length_dominates_half_poisson() {
    for (members, n) in tiny_classes() {
        let check = lower_bound_poisson_halving_check(&members, n, 1e-7).unwrap();
        assert!(check.holds, "margin {}", check.margin);
        assert!(check.truncated_mass <= MAX_TRUNCATED_MASS);
    }
}

#[test]
fn symmetric_mixture_respects_subset_bound() {
    let classes = [
        all_permutations(&zipf_distribution(2.0, 3).unwrap()),
        all_permutations(&d(&[0.7, 0.3])),
        all_permutations(&d(&[0.5, 0.3, 0.2])),
    ];
    for members in &classes {
        for n in 1..=3 {
            let check = bound_on_q_check(members, n, 1e-8).unwrap();
            assert!(check.holds, "ratio {}", check.worst_ratio);
        }
    }
}

#[test]
fn achieved_redundancy_below_distinct_upper_bound() {
    for k in [2usize, 4, 8] {
        let mut dists = vec![
            Distribution::uniform(k).unwrap(),
            zipf_distribution(1.5, k).unwrap(),
            zipf_distribution(2.0, k).unwrap(),
        ];
        dists.extend(seeded_dirichlet(k, 1.0, 3, 0xC0FFEE + k as u64).unwrap());
        for p in &dists {
            for n in [2usize, 4, 8] {
                let r = achieved_redundancy(p, n).unwrap();
                assert!(r.achieved >= -1e-12);
                assert!(r.expected_codelength >= r.entropy - 1e-12);
                let bound = distinct_upper_bound(k, n, r.expected_distinct).unwrap();
                assert!(
                    r.achieved <= bound.value,
                    "k={k} n={n}: {} > {}",
                    r.achieved,
                    bound.value
                );
                // concrete stream costs at most four rounding bits more than the ideal length
                assert!(r.expected_codeword_bits <= r.expected_codelength + 4.0 + 1e-9);
            }
        }
    }
}

#[test]
fn minimax_is_at_most_achieved_redundancy_of_any_member_codec() {
    let members = all_permutations(&d(&[0.6, 0.3, 0.1]));
    let n = 3;
    let minimax = minimax_type_redundancy(&members, n, 1e-8).unwrap();
    let worst_codec = members
        .iter()
        .map(|p| achieved_redundancy(p, n).unwrap().achieved)
        .fold(f64::MIN, f64::max);
    assert!(minimax.value <= worst_codec + 1e-9);
}

#[test]
fn distinct_lower_bound_margin_is_reported() {
    // The lower bound carries (1 + o(1)) factors; at desk scale only the margin is recorded.
    let zipf = zipf_distribution(2.0f64, 3).unwrap();
    let members = all_permutations(&zipf);
    for n in 1..=3 {
        let minimax = minimax_type_redundancy(&members, n, 1e-8).unwrap();
        let lambdas: Vec<f64> = zipf.probs().iter().map(|p| p * n as f64).collect();
        let dd = expected_distinct(&zipf, n);
        if let Ok(b) = distinct_lower_bound(3, n, dd, &lambdas) {
            println!(
                "n={n} minimax={:.6} distinct_lower={:.6} margin={:.6}",
                minimax.value,
                b.value,
                minimax.value - b.value
            );
            assert!(b.value.is_finite());
        }
    }
}

#[test]
fn poisson_entropy_bound_holds_on_grid() {
    for i in 1..=69 {
        let lambda = i as f64 / 100.0;
        let h = poisson_entropy(lambda).unwrap();
        assert!(h <= poisson_entropy_bound(lambda).unwrap(), "lambda={lambda}");
        assert!(h <= 3.0 * lambda - lambda * lambda.log2());
    }
    for i in 0..=200 {
        let lambda = 0.7 + i as f64 * 0.5;
        assert!(poisson_entropy(lambda).unwrap() <= gaussian_entropy_cap(lambda));
    }
}

#[test]
fn zipf_type_entropy_below_caps() {
    let p = zipf_distribution(2.0f64, 32).unwrap();
    let r = type_entropy_poisson(&p, 8).unwrap();
    assert!((r.h_type - r.low_part - r.high_part).abs() < 1e-12);
    assert!(r.h_type <= r.low_cap + r.high_cap);
}

#[test]
fn poissonized_distinct_count_close_to_fixed_length() {
    let mut pairs = Vec::new();
    for k in [2usize, 5, 16, 64] {
        for n in [1usize, 3, 10, 40, 200] {
            pairs.push((zipf_distribution(1.5f64, k).unwrap(), n));
        }
    }
    assert_eq!(pairs.len(), 20);
    for (p, n) in &pairs {
        let gap = (expected_distinct_poisson(p, *n) - expected_distinct(p, *n)).abs();
        let bound = 2.0 * poisson_prevalences(p, *n).doubletons / *n as f64;
        assert!(gap < bound, "k={} n={n}: {gap} >= {bound}", p.k());
    }
}

#[test]
fn concentration_examples_pass() {
    let uniform = Distribution::<f64>::uniform(16).unwrap();
    assert!(
        concentration_check(&uniform, 16, 2.0, 100_000, 0xC0FFEE)
            .unwrap()
            .passed
    );
    let zipf = zipf_distribution(2.0f64, 64).unwrap();
    assert!(concentration_check(&zipf, 32, 3.0, 100_000, 0xC0FFEE).unwrap().passed);
}

#[test]
fn poisson_distinct_expectation_matches_simulation() {
    let p = zipf_distribution(2.0f64, 8).unwrap();
    let n = 4;
    let exact = expected_distinct_poisson(&p, n);
    let trials = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let lengths = rand_distr::Poisson::new(n as f64).unwrap();
    let symbols = WeightedIndex::new(p.probs()).unwrap();
    let mut total = 0u64;
    let mut seen = [false; 8];
    for _ in 0..trials {
        seen.fill(false);
        let len: f64 = lengths.sample(&mut rng);
        for _ in 0..len as usize {
            seen[symbols.sample(&mut rng)] = true;
        }
        total += seen.iter().filter(|&&s| s).count() as u64;
    }
    let mean = total as f64 / trials as f64;
    assert!((mean - exact).abs() < 5e-3, "simulated {mean} exact {exact}");
}
