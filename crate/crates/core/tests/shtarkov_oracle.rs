use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uec::enumerate::{for_each_sequence, for_each_type};
use uec::model::{type_of, zipf_distribution, Distribution, TypeVector, ZipfClass};
use uec::redundancy::seeded_dirichlet;
use uec::shtarkov::{
    log2_factorial, max_likelihood_permutation, shtarkov_sum_permutation_class, shtarkov_sum_zipf, ShtarkovMethod,
};

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

fn brute_force_ml(t: &TypeVector, base: &Distribution<f64>, perms: &[Vec<usize>]) -> f64 {
    perms
        .iter()
        .map(|sigma| {
            t.mu()
                .iter()
                .enumerate()
                .map(|(i, &m)| base.probs()[sigma[i]].powi(m as i32))
                .product::<f64>()
        })
        .fold(0.0, f64::max)
}

/// `S = sum_x max_sigma p_sigma(x)`, one sequence at a time.
fn naive_log2_sum(base: &Distribution<f64>, n: usize) -> f64 {
    let k = base.k();
    let perms = permutations(k);
    let mut total = 0.0;
    for_each_sequence(k, n, |s| {
        let seq: Vec<usize> = s.iter().map(|&x| x + 1).collect();
        total += brute_force_ml(&type_of(&seq, k).unwrap(), base, &perms);
    });
    total.log2()
}

#[test]
fn rearrangement_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for k in 1..=5 {
        let perms = permutations(k);
        for _ in 0..20 {
            let base = uec::redundancy::dirichlet_distribution::<f64, _>(k, 0.7, &mut rng).unwrap();
            for n in 1..=4 {
                for_each_type(k, n, |mu| {
                    let t = TypeVector::new(mu.to_vec()).unwrap();
                    let fast = max_likelihood_permutation(&t, &base).unwrap();
                    let slow = brute_force_ml(&t, &base, &perms);
                    assert!((fast - slow).abs() <= 1e-12 * slow.max(1e-300), "{fast} vs {slow}");
                });
            }
        }
    }
}

#[test]
fn grouped_sum_matches_naive_enumeration() {
    let mut bases = vec![
        zipf_distribution(1.5f64, 4).unwrap(),
        Distribution::new(vec![0.6, 0.4]).unwrap(),
    ];
    bases.extend(seeded_dirichlet::<f64>(3, 1.0, 3, 5).unwrap());
    bases.extend(seeded_dirichlet::<f64>(4, 0.5, 3, 6).unwrap());
    for base in &bases {
        for n in 1..=4 {
            let grouped = shtarkov_sum_permutation_class(base, n, ShtarkovMethod::ProfileGrouped).unwrap();
            let exhaustive = shtarkov_sum_permutation_class(base, n, ShtarkovMethod::Exhaustive).unwrap();
            let naive = naive_log2_sum(base, n);
            let s_grouped = grouped.log_sum.exp2();
            assert!((s_grouped - naive.exp2()).abs() <= 1e-10 * naive.exp2());
            assert!((exhaustive.log_sum.exp2() - naive.exp2()).abs() <= 1e-10 * naive.exp2());
        }
    }
}

#[test]
fn worst_case_bounds_bracket_zipf_sums() {
    for alpha in [1.5f64, 2.0, 3.0] {
        for k in [8usize, 16] {
            let zipf = ZipfClass::new(alpha, k).unwrap();
            let max_n = (k as f64).powf(1.0 / alpha).floor() as usize;
            for n in 1..=max_n {
                let r = shtarkov_sum_zipf(&zipf, n, ShtarkovMethod::ProfileGrouped).unwrap();
                let lower = r.worst_case_lower_bound.expect("bound applies for n <= k^(1/alpha)");
                assert!(r.log_sum >= lower, "alpha={alpha} k={k} n={n}");
                assert!(r.log_sum <= log2_factorial::<f64>(k) + 1e-9);
            }
        }
    }
}
