//! Brute-force oracles that share no code with the library's engines.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use zerosum::group::{Element, GroupCtx};
use zerosum::sequence::Sequence;

pub type Pair = (u32, u32);

pub fn pairs(s: &Sequence) -> Vec<Pair> {
    s.terms().map(|e| (e.a, e.b)).collect()
}

pub fn to_seq(n: u32, terms: &[Pair]) -> Sequence {
    let ctx = GroupCtx::new(n).unwrap();
    Sequence::from_terms(ctx, terms.iter().map(|&(a, b)| Element::new(a, b))).unwrap()
}

/// `(length, sum)` of every nonempty subsequence, enumerated term by term
/// over all `2^|S|` index subsets.
pub fn naive_subsums(n: u32, terms: &[Pair]) -> BTreeSet<(usize, Pair)> {
    let mut out = BTreeSet::new();
    let len = terms.len();
    assert!(len <= 20, "naive enumeration is exponential");
    for mask in 1u32..(1 << len) {
        let (mut a, mut b) = (0, 0);
        for (i, &(x, y)) in terms.iter().enumerate() {
            if mask >> i & 1 == 1 {
                a = (a + x) % n;
                b = (b + y) % n;
            }
        }
        out.insert((mask.count_ones() as usize, (a, b)));
    }
    out
}

pub fn naive_sigma_t(n: u32, terms: &[Pair], t: usize) -> BTreeSet<Pair> {
    naive_subsums(n, terms).into_iter().filter(|&(l, _)| l == t).map(|(_, g)| g).collect()
}

pub fn naive_sigma_le(n: u32, terms: &[Pair], ell: usize) -> BTreeSet<Pair> {
    naive_subsums(n, terms).into_iter().filter(|&(l, _)| l <= ell).map(|(_, g)| g).collect()
}

/// Zero-sum of length `≤ ell`, over multiplicity vectors rather than index
/// subsets so longer sequences stay cheap.
pub fn naive_has_zero_sum_le(n: u32, terms: &[Pair], ell: usize) -> bool {
    let mut counts: BTreeMap<Pair, u32> = BTreeMap::new();
    for &t in terms {
        *counts.entry(t).or_default() += 1;
    }
    let items: Vec<(Pair, u32)> = counts.into_iter().collect();
    fn go(n: u32, items: &[(Pair, u32)], i: usize, len: usize, sum: Pair, ell: usize) -> bool {
        if len > ell {
            return false;
        }
        if i == items.len() {
            return len > 0 && sum == (0, 0);
        }
        let ((x, y), v) = items[i];
        (0..=v).any(|c| {
            let s = ((sum.0 + c * x) % n, (sum.1 + c * y) % n);
            go(n, items, i + 1, len + c as usize, s, ell)
        })
    }
    go(n, &items, 0, 0, (0, 0), ell)
}

/// Every multiset of `len` elements of `C_n ⊕ C_n`, as sorted pair lists.
pub fn all_multisets(n: u32, len: usize) -> Vec<Vec<Pair>> {
    let elems: Vec<Pair> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn go(elems: &[Pair], start: usize, len: usize, cur: &mut Vec<Pair>, out: &mut Vec<Vec<Pair>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..elems.len() {
            cur.push(elems[i]);
            go(elems, i, len, cur, out);
            cur.pop();
        }
    }
    go(&elems, 0, len, &mut cur, &mut out);
    out
}

/// Smallest `L` such that every length-`L` sequence has a zero-sum of
/// length `≤ ell`. Lengths are scanned upward from 1.
pub fn naive_s_le(n: u32, ell: usize) -> u32 {
    let mut len = 1;
    loop {
        if all_multisets(n, len).iter().all(|s| naive_has_zero_sum_le(n, s, ell)) {
            return len as u32;
        }
        len += 1;
    }
}

/// 2x2 matrices over `Z_n` with unit determinant.
pub fn naive_gl2(n: u32) -> Vec<[u32; 4]> {
    let gcd = |mut a: u32, mut b: u32| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let mut out = Vec::new();
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let det = (p * s + n * n - (q * r) % n) % n;
                    if gcd(det, n) == 1 {
                        out.push([p, q, r, s]);
                    }
                }
            }
        }
    }
    out
}

pub fn act(n: u32, m: [u32; 4], terms: &[Pair]) -> Vec<Pair> {
    let [p, q, r, s] = m;
    let mut v: Vec<Pair> = terms.iter().map(|&(a, b)| ((p * a + q * b) % n, (r * a + s * b) % n)).collect();
    v.sort_unstable();
    v
}

/// Orbit count of the extremal sequences of length `2n-2+k`, by listing
/// every multiset and collapsing orbits under the naive matrix action.
pub fn naive_extremal_orbits(n: u32, k: u32) -> usize {
    let len = (2 * n - 2 + k) as usize;
    let ell = (2 * n - 1 - k) as usize;
    let gl = naive_gl2(n);
    let mut seen: BTreeSet<Vec<Pair>> = BTreeSet::new();
    let mut orbits = 0;
    for s in all_multisets(n, len) {
        if seen.contains(&s) || naive_has_zero_sum_le(n, &s, ell) {
            continue;
        }
        orbits += 1;
        for &m in &gl {
            seen.insert(act(n, m, &s));
        }
    }
    orbits
}

pub fn random_terms<R: Rng>(rng: &mut R, n: u32, len: usize) -> Vec<Pair> {
    (0..len).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
}
