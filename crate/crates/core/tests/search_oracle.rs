mod common;

use common::*;
use zerosum::search::{compute_davenport, compute_s_le, enumerate_extremal, SearchConfig};
use zerosum::structure::Canonicalizer;
use zerosum::group::{GroupCtx, DEFAULT_AUT_GUARD};

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

#[test]
fn invariants_match_brute_force() {
    for n in [2u32, 3] {
        // D is s_≤ℓ for ℓ at least the group order
        let d = compute_davenport(n, &cfg()).unwrap();
        assert_eq!(d.value, naive_s_le(n, (n * n) as usize), "D, n = {n}");
        for ell in n..=2 * n - 1 {
            let v = compute_s_le(n, ell, &cfg()).unwrap();
            assert_eq!(v.value, naive_s_le(n, ell as usize), "n = {n}, ell = {ell}");
        }
    }
}

#[test]
fn s_le_witnesses_avoid_short_zero_sums() {
    for (n, ell) in [(2u32, 2u32), (3, 3), (3, 4), (3, 5), (4, 4), (4, 6)] {
        let v = compute_s_le(n, ell, &cfg()).unwrap();
        let w = pairs(&v.witness);
        assert_eq!(w.len() as u32, v.value - 1);
        assert!(!naive_has_zero_sum_le(n, &w, ell as usize), "n = {n}, ell = {ell}: {}", v.witness);
    }
}

#[test]
fn orbit_counts_match_brute_force() {
    for n in [2u32, 3] {
        for k in 0..n {
            let e = enumerate_extremal(n, k, &cfg()).unwrap();
            assert_eq!(e.reps.len(), naive_extremal_orbits(n, k), "n = {n}, k = {k}");
        }
    }
    for k in [2u32, 3] {
        let e = enumerate_extremal(4, k, &cfg()).unwrap();
        assert_eq!(e.reps.len(), naive_extremal_orbits(4, k), "n = 4, k = {k}");
    }
}

#[test]
fn representatives_are_canonical_extremal_and_distinct() {
    let n = 4;
    let canon = Canonicalizer::new(GroupCtx::new(n).unwrap(), DEFAULT_AUT_GUARD).unwrap();
    let gl = naive_gl2(n);
    for k in 0..n {
        let reps = enumerate_extremal(n, k, &cfg()).unwrap().reps;
        let mut orbits = std::collections::BTreeSet::new();
        for r in &reps {
            assert!(canon.is_canonical(r));
            let t = pairs(r);
            assert_eq!(t.len(), (2 * n - 2 + k) as usize);
            assert!(!naive_has_zero_sum_le(n, &t, (2 * n - 1 - k) as usize));
            let least = gl.iter().map(|&m| act(n, m, &t)).min().unwrap();
            assert!(orbits.insert(least), "two representatives of one orbit at k = {k}");
        }
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let one = SearchConfig { threads: Some(1), ..cfg() };
    let two = SearchConfig { threads: Some(2), split_depth: 2, ..cfg() };
    for k in 0..4 {
        assert_eq!(enumerate_extremal(4, k, &one).unwrap().reps, enumerate_extremal(4, k, &two).unwrap().reps);
    }
}
