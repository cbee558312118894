use std::collections::BTreeSet;

use dg_operad::perm::{block_sum, coset_factorize, is_shuffle, multinomial, shuffles};
use dg_operad::Permutation;
use proptest::prelude::*;

/// Every size vector with at most `parts` entries and total at most `max`.
fn size_vectors(max: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..parts {
        let mut next = Vec::new();
        for v in &frontier {
            let used: usize = v.iter().sum();
            for s in 0..=max - used {
                let mut w: Vec<usize> = v.clone();
                w.push(s);
                next.push(w);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn count_by_factorials(sizes: &[usize]) -> u128 {
    let fact = |k: usize| (1..=k as u128).product::<u128>();
    fact(sizes.iter().sum()) / sizes.iter().map(|&s| fact(s)).product::<u128>()
}

#[test]
fn shuffle_counts_are_multinomial() {
    for sizes in size_vectors(5, 5) {
        let n: usize = sizes.iter().sum();
        let sh = shuffles(&sizes);
        let brute = Permutation::all(n).into_iter().filter(|s| is_shuffle(s, &sizes)).count() as u128;
        assert_eq!(sh.members.len() as u128, brute, "{sizes:?}");
        assert_eq!(multinomial(&sizes), brute, "{sizes:?}");
        assert_eq!(count_by_factorials(&sizes), brute, "{sizes:?}");
        let distinct: BTreeSet<Vec<usize>> = sh.members.iter().map(Permutation::one_line).collect();
        assert_eq!(distinct.len(), sh.members.len());
        assert!(sh.members.iter().all(|s| is_shuffle(s, &sizes)));
    }
}

#[test]
fn coset_factorization_is_a_bijection() {
    for sizes in size_vectors(5, 5) {
        let n: usize = sizes.iter().sum();
        let sh: BTreeSet<Vec<usize>> = shuffles(&sizes).members.iter().map(Permutation::one_line).collect();
        let mut seen = BTreeSet::new();
        for sigma in Permutation::all(n) {
            let (s, taus) = coset_factorize(&sigma, &sizes).unwrap();
            assert!(sh.contains(&s.one_line()));
            for (t, &k) in taus.iter().zip(&sizes) {
                assert_eq!(t.size(), k);
            }
            assert_eq!(s.compose(&block_sum(&taus)).unwrap(), sigma, "{sizes:?}");
            assert!(seen.insert((s.one_line(), taus.iter().map(Permutation::one_line).collect::<Vec<_>>())));
        }
        let young: u128 = sizes.iter().map(|&k| (1..=k as u128).product::<u128>()).product();
        assert_eq!(seen.len() as u128, sh.len() as u128 * young);
    }
}

#[test]
fn factorization_rejects_wrong_size() {
    assert!(coset_factorize(&Permutation::identity(3), &[1, 1]).is_err());
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

proptest! {
    #[test]
    fn factorization_recomposes(sigma in (1usize..8).prop_flat_map(permutation), cut in 0usize..8) {
        let n = sigma.size();
        let a = cut.min(n);
        let sizes = [a, n - a];
        let (s, taus) = coset_factorize(&sigma, &sizes).unwrap();
        prop_assert!(is_shuffle(&s, &sizes));
        prop_assert_eq!(s.compose(&block_sum(&taus)).unwrap(), sigma);
    }

    #[test]
    fn inverse_and_sign(sigma in (1usize..8).prop_flat_map(permutation)) {
        let id = sigma.compose(&sigma.inverse()).unwrap();
        prop_assert!(id.is_identity());
        prop_assert_eq!(sigma.sign(), sigma.inverse().sign());
        prop_assert_eq!(sigma.sign() == -1, sigma.inversions().len() % 2 == 1);
    }
}
