mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use zerosum::group::{enumerate_automorphisms, Element, GroupCtx, DEFAULT_AUT_GUARD};
use zerosum::subsums::{find_zero_sum_le, has_zero_sum_le, sigma_le, sigma_t, WitnessMode};

fn as_set(v: Vec<Element>) -> BTreeSet<Pair> {
    v.into_iter().map(|e| (e.a, e.b)).collect()
}

fn seq_strategy() -> impl Strategy<Value = (u32, Vec<Pair>)> {
    (2u32..=5).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=10)))
}

proptest! {
    #[test]
    fn layers_match_naive((n, terms) in seq_strategy()) {
        let s = to_seq(n, &terms);
        for t in 1..=terms.len() {
            prop_assert_eq!(as_set(sigma_t(&s, t).to_vec()), naive_sigma_t(n, &terms, t), "t = {}", t);
        }
        for ell in 0..=terms.len() {
            prop_assert_eq!(as_set(sigma_le(&s, ell).to_vec()), naive_sigma_le(n, &terms, ell));
            prop_assert_eq!(has_zero_sum_le(&s, ell), naive_sigma_le(n, &terms, ell).contains(&(0, 0)));
        }
    }

    /// `Σ_t(S) = σ(S) - Σ_{|S|-t}(S)` for `0 < t < |S|`.
    #[test]
    fn complement_identity((n, terms) in seq_strategy()) {
        let s = to_seq(n, &terms);
        let ctx = s.ctx();
        let total = s.sigma();
        for t in 1..terms.len() {
            let direct = as_set(sigma_t(&s, t).to_vec());
            let mirrored: BTreeSet<Pair> = sigma_t(&s, terms.len() - t)
                .iter()
                .map(|g| ctx.sub(total, g))
                .map(|e| (e.a, e.b))
                .collect();
            prop_assert_eq!(direct, mirrored);
        }
    }

    #[test]
    fn monotone_in_bound_and_sequence((n, terms) in seq_strategy(), cut in 0usize..=10) {
        let s = to_seq(n, &terms);
        let prefix = to_seq(n, &terms[..cut.min(terms.len())]);
        for ell in 0..terms.len() {
            prop_assert!(sigma_le(&s, ell).is_subset(&sigma_le(&s, ell + 1)));
            prop_assert!(sigma_le(&prefix, ell).is_subset(&sigma_le(&s, ell)));
        }
    }

    #[test]
    fn automorphisms_commute_with_layers((n, terms) in seq_strategy(), pick in any::<prop::sample::Index>()) {
        let ctx = GroupCtx::new(n).unwrap();
        let auts = enumerate_automorphisms(ctx, DEFAULT_AUT_GUARD).unwrap();
        let aut = &auts[pick.index(auts.len())];
        let s = to_seq(n, &terms);
        let image = s.map_aut(aut);
        for t in 1..=terms.len() {
            let pushed: BTreeSet<Pair> = sigma_t(&s, t).iter().map(|g| aut.apply(g)).map(|e| (e.a, e.b)).collect();
            prop_assert_eq!(as_set(sigma_t(&image, t).to_vec()), pushed);
        }
    }

    #[test]
    fn witnesses_are_genuine((n, terms) in seq_strategy(), ell in 1usize..=10) {
        let s = to_seq(n, &terms);
        let naive = naive_has_zero_sum_le(n, &terms, ell);
        for mode in [WitnessMode::Any, WitnessMode::Shortest] {
            match find_zero_sum_le(&s, ell, mode) {
                Some(w) => {
                    prop_assert!(naive);
                    prop_assert!(!w.is_empty() && w.len() <= ell);
                    prop_assert!(w.divides(&s));
                    prop_assert_eq!(w.sigma(), Element::ZERO);
                }
                None => prop_assert!(!naive),
            }
        }
    }
}

/// Shortest witnesses have the least possible length.
#[test]
fn shortest_witness_is_minimal() {
    let terms = [(1, 0), (1, 0), (1, 0), (2, 1), (1, 2), (0, 2)];
    let s = to_seq(3, &terms);
    let w = find_zero_sum_le(&s, 6, WitnessMode::Shortest).unwrap();
    let least = (1..=6).find(|&l| naive_has_zero_sum_le(3, &terms, l)).unwrap();
    assert_eq!(w.len(), least);
}

/// Every sequence of length `3n-2` has a zero-sum of length at most `n`;
/// checked over all multisets for `n = 2` and by sampling for `n = 3, 4`.
#[test]
fn short_zero_sums_are_forced_at_3n_minus_2() {
    for s in all_multisets(2, 4) {
        assert!(has_zero_sum_le(&to_seq(2, &s), 2));
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for n in [3u32, 4] {
        for _ in 0..300 {
            let terms = random_terms(&mut rng, n, (3 * n - 2) as usize);
            assert!(has_zero_sum_le(&to_seq(n, &terms), n as usize), "{terms:?}");
        }
    }
}
