//! Bounded-length subsums `Σ_t(S)` and zero-sum detection.
//!
//! Sets of group elements are bitsets with one `u64` word per first
//! coordinate: bit `b` of word `a` stands for `(a, b)`, i.e. bit `a·n + b` of
//! the flat layout. Translating a set by `g` rotates the rows by `g.a` and the
//! bits inside each row by `g.b`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::group::{Element, GroupCtx};
use crate::sequence::Sequence;

#[inline]
fn row_mask(n: u32) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
fn rotate(w: u64, by: u32, n: u32, mask: u64) -> u64 {
    if by == 0 {
        w
    } else {
        ((w << by) | (w >> (n - by))) & mask
    }
}

/// `dst |= src + g` on raw row words.
#[inline]
pub(crate) fn or_translated(src: &[u64], g: Element, n: u32, dst: &mut [u64]) {
    let mask = row_mask(n);
    let n_us = n as usize;
    let mut target = g.a as usize;
    for &w in src {
        if w != 0 {
            dst[target] |= rotate(w, g.b, n, mask);
        }
        target += 1;
        if target == n_us {
            target = 0;
        }
    }
}

#[inline]
pub(crate) fn rows_contain(rows: &[u64], x: Element) -> bool {
    rows[x.a as usize] >> x.b & 1 == 1
}

/// A subset of `C_n ⊕ C_n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SumSet {
    n: u32,
    rows: Vec<u64>,
}

impl SumSet {
    pub fn empty(ctx: GroupCtx) -> SumSet {
        SumSet {
            n: ctx.n(),
            rows: vec![0; ctx.n() as usize],
        }
    }

    pub fn singleton(ctx: GroupCtx, x: Element) -> SumSet {
        let mut s = SumSet::empty(ctx);
        s.insert(x);
        s
    }

    pub fn ctx(&self) -> GroupCtx {
        GroupCtx::new(self.n).expect("valid modulus")
    }

    pub fn insert(&mut self, x: Element) {
        self.rows[x.a as usize] |= 1 << x.b;
    }

    pub fn contains(&self, x: Element) -> bool {
        rows_contain(&self.rows, x)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &SumSet) {
        for (d, s) in self.rows.iter_mut().zip(&other.rows) {
            *d |= s;
        }
    }

    pub fn is_subset(&self, other: &SumSet) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    /// `{x + g : x ∈ self}`.
    pub fn translate(&self, g: Element) -> SumSet {
        let mut out = SumSet {
            n: self.n,
            rows: vec![0; self.rows.len()],
        };
        or_translated(&self.rows, g, self.n, &mut out.rows);
        out
    }

    /// Elements in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.rows.iter().enumerate().flat_map(|(a, &w)| {
            (0..self.n)
                .filter(move |&b| w >> b & 1 == 1)
                .map(move |b| Element::new(a as u32, b))
        })
    }

    pub fn to_vec(&self) -> Vec<Element> {
        self.iter().collect()
    }
}

impl fmt::Debug for SumSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// `reach[t] = Σ_t(S)` for every `t ≤ L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsumTable {
    ctx: GroupCtx,
    reach: Vec<SumSet>,
}

impl SubsumTable {
    /// Largest length `L` covered.
    pub fn max_len(&self) -> usize {
        self.reach.len() - 1
    }

    pub fn layer(&self, t: usize) -> &SumSet {
        &self.reach[t]
    }

    pub fn layers(&self) -> &[SumSet] {
        &self.reach
    }

    /// `Σ_{≤ℓ}`, lengths `1..=min(ℓ, L)`.
    pub fn up_to(&self, ell: usize) -> SumSet {
        let mut out = SumSet::empty(self.ctx);
        for t in 1..=ell.min(self.max_len()) {
            out.union_with(&self.reach[t]);
        }
        out
    }
}

/// Errors for [`build_table`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("length bound {bound} exceeds sequence length {len}")]
pub struct BoundTooLarge {
    pub bound: usize,
    pub len: usize,
}

/// Multiplicity-aware layered DP: each support element is processed once
/// and contributes `0..=v_g(S)` copies.
pub fn build_table(s: &Sequence, bound: usize) -> Result<SubsumTable, BoundTooLarge> {
    if bound > s.len() {
        return Err(BoundTooLarge {
            bound,
            len: s.len(),
        });
    }
    Ok(layered(s, bound, false).0)
}

/// Shared DP; with `stop_on_zero` it returns as soon as some layer `t ≥ 1`
/// contains 0.
fn layered(s: &Sequence, bound: usize, stop_on_zero: bool) -> (SubsumTable, bool) {
    let ctx = s.ctx();
    let n = ctx.n();
    let w = n as usize;
    let mut cur = vec![0u64; (bound + 1) * w];
    cur[0] = 1;
    let mut next = cur.clone();
    let mut used = 0usize;
    let mut found = false;
    for (g, v) in s.counts() {
        next.copy_from_slice(&cur);
        let v = v as usize;
        let top = (used + v).min(bound);
        for t in 1..=top {
            let mut shift = Element::ZERO;
            for j in 1..=v.min(t) {
                shift = ctx.add(shift, g);
                let (lo, hi) = (t - j, t);
                if lo > used {
                    continue;
                }
                let (src, dst) = split_layers(&cur, &mut next, lo, hi, w);
                or_translated(src, shift, n, dst);
            }
        }
        used += v;
        std::mem::swap(&mut cur, &mut next);
        if stop_on_zero && (1..=bound.min(used)).any(|t| cur[t * w] & 1 == 1) {
            found = true;
            break;
        }
    }
    if !stop_on_zero {
        found = (1..=bound).any(|t| cur[t * w] & 1 == 1);
    }
    let reach = cur
        .chunks(w)
        .map(|rows| SumSet {
            n,
            rows: rows.to_vec(),
        })
        .collect();
    (SubsumTable { ctx, reach }, found)
}

fn split_layers<'a>(
    cur: &'a [u64],
    next: &'a mut [u64],
    lo: usize,
    hi: usize,
    w: usize,
) -> (&'a [u64], &'a mut [u64]) {
    (&cur[lo * w..(lo + 1) * w], &mut next[hi * w..(hi + 1) * w])
}

/// `Σ_t(S)`; empty when `t > |S|`.
pub fn sigma_t(s: &Sequence, t: usize) -> SumSet {
    if t > s.len() {
        return SumSet::empty(s.ctx());
    }
    layered(s, t, false).0.reach.swap_remove(t)
}

/// `Σ_{≤ℓ}(S)`; `ℓ` is clamped to `|S|`.
pub fn sigma_le(s: &Sequence, ell: usize) -> SumSet {
    let bound = ell.min(s.len());
    layered(s, bound, false).0.up_to(bound)
}

/// `Σ(S)`, all nonempty subsums.
pub fn sigma_all(s: &Sequence) -> SumSet {
    sigma_le(s, s.len())
}

/// `0 ∈ Σ_{≤ℓ}(S)`, stopping at the first support element that creates a
/// zero-sum.
pub fn has_zero_sum_le(s: &Sequence, ell: usize) -> bool {
    let bound = ell.min(s.len());
    if bound == 0 {
        return false;
    }
    if s.contains(Element::ZERO) {
        return true;
    }
    layered(s, bound, true).1
}

pub fn is_zero_sum_free(s: &Sequence) -> bool {
    !has_zero_sum_le(s, s.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMode {
    /// Lexicographically least zero-sum (as a sorted term list) of length ≤ ℓ.
    Any,
    /// Minimal length; lexicographically least among those.
    Shortest,
}

/// Returns a nontrivial `T | S` with `σ(T) = 0` and `|T| ≤ ℓ`.
///
/// Terms are scanned in sorted order against suffix tables, taking the
/// smallest term that still extends to a witness, so results are
/// deterministic.
pub fn find_zero_sum_le(s: &Sequence, ell: usize, mode: WitnessMode) -> Option<Sequence> {
    let ctx = s.ctx();
    let bound = ell.min(s.len());
    if bound == 0 {
        return None;
    }
    let terms: Vec<Element> = s.terms().collect();
    let len = terms.len();
    let n = ctx.n();
    let w = n as usize;
    let stride = (bound + 1) * w;
    // suffix[p] = Σ_t of terms[p..], t ≤ bound
    let mut suffix = vec![0u64; (len + 1) * stride];
    suffix[len * stride] = 1;
    for p in (0..len).rev() {
        let (head, tail) = suffix.split_at_mut((p + 1) * stride);
        let src = &tail[..stride];
        let dst = &mut head[p * stride..];
        dst[..stride].copy_from_slice(src);
        for t in 1..=bound {
            or_translated(&src[(t - 1) * w..t * w], terms[p], n, &mut dst[t * w..(t + 1) * w]);
        }
    }
    let layer = |p: usize, t: usize| &suffix[p * stride + t * w..p * stride + (t + 1) * w];
    let neg = |x: Element| ctx.neg(x);

    let mut picked = Vec::new();
    match mode {
        WitnessMode::Shortest => {
            let t0 = (1..=bound).find(|&t| layer(0, t)[0] & 1 == 1)?;
            let mut t = t0;
            let mut target = Element::ZERO;
            let mut p = 0;
            while t > 0 {
                let g = terms[p];
                let rest = ctx.add(target, neg(g));
                if rows_contain(layer(p + 1, t - 1), rest) {
                    picked.push(g);
                    target = rest;
                    t -= 1;
                }
                p += 1;
            }
        }
        WitnessMode::Any => {
            // union[p][b] = ∪_{t ≤ b} Σ_t(terms[p..]), including the empty sum
            let mut union = suffix.clone();
            for p in 0..=len {
                for t in 1..=bound {
                    let base = p * stride;
                    for i in 0..w {
                        union[base + t * w + i] |= union[base + (t - 1) * w + i];
                    }
                }
            }
            let ulayer = |p: usize, b: usize| &union[p * stride + b * w..p * stride + (b + 1) * w];
            if !(1..=bound).any(|t| layer(0, t)[0] & 1 == 1) {
                return None;
            }
            let mut budget = bound;
            let mut target = Element::ZERO;
            let mut p = 0;
            loop {
                if !picked.is_empty() && target == Element::ZERO {
                    break;
                }
                let g = terms[p];
                let rest = ctx.add(target, neg(g));
                if budget >= 1 && rows_contain(ulayer(p + 1, budget - 1), rest) {
                    picked.push(g);
                    target = rest;
                    budget -= 1;
                }
                p += 1;
            }
        }
    }
    Some(Sequence::from_terms(ctx, picked).expect("terms come from S"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroSumClass {
    ZeroSumFree,
    MinimalZeroSum,
    ZeroSumReducible,
    NonzeroSum,
}

impl fmt::Display for ZeroSumClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZeroSumClass::ZeroSumFree => "zero_sum_free",
            ZeroSumClass::MinimalZeroSum => "minimal_zero_sum",
            ZeroSumClass::ZeroSumReducible => "zero_sum_reducible",
            ZeroSumClass::NonzeroSum => "nonzero_sum",
        })
    }
}

/// Minimality is decided by checking `S·g^{[-1]}` zero-sum free for every
/// `g ∈ supp(S)`.
pub fn zero_sum_classify(s: &Sequence) -> ZeroSumClass {
    if is_zero_sum_free(s) {
        return ZeroSumClass::ZeroSumFree;
    }
    if s.sigma() != Element::ZERO {
        return ZeroSumClass::NonzeroSum;
    }
    let minimal = s.support().all(|g| {
        let rest = s.remove_term(g, 1).expect("g in support");
        is_zero_sum_free(&rest)
    });
    if minimal {
        ZeroSumClass::MinimalZeroSum
    } else {
        ZeroSumClass::ZeroSumReducible
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ctx(n: u32) -> GroupCtx {
        GroupCtx::new(n).unwrap()
    }

    fn e(a: u32, b: u32) -> Element {
        Element::new(a, b)
    }

    fn seq(n: u32, s: &str) -> Sequence {
        Sequence::parse(ctx(n), s).unwrap()
    }

    fn set(v: &[(u32, u32)]) -> Vec<Element> {
        let mut out: Vec<_> = v.iter().map(|&(a, b)| e(a, b)).collect();
        out.sort();
        out
    }

    /// (length, sum) for every subset of term positions.
    fn brute(s: &Sequence) -> BTreeSet<(usize, Element)> {
        let c = s.ctx();
        let terms: Vec<_> = s.terms().collect();
        (0u32..1 << terms.len())
            .map(|mask| {
                let mut sum = Element::ZERO;
                let mut k = 0;
                for (i, &g) in terms.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        sum = c.add(sum, g);
                        k += 1;
                    }
                }
                (k, sum)
            })
            .collect()
    }

    #[test]
    fn translate_wraps_both_coordinates() {
        let c = ctx(5);
        let s = SumSet::singleton(c, e(4, 3)).translate(e(2, 4));
        assert_eq!(s.to_vec(), vec![e(1, 2)]);
        let c = ctx(64);
        let s = SumSet::singleton(c, e(63, 63)).translate(e(1, 1));
        assert_eq!(s.to_vec(), vec![e(0, 0)]);
    }

    #[test]
    fn table_examples() {
        let s = seq(3, "(1,0)^2 (0,1)^2");
        let t = build_table(&s, 2).unwrap();
        assert_eq!(t.layer(1).to_vec(), set(&[(1, 0), (0, 1)]));
        assert_eq!(t.layer(2).to_vec(), set(&[(2, 0), (1, 1), (0, 2)]));

        let t = build_table(&s, 0).unwrap();
        assert_eq!(t.layer(0).to_vec(), vec![e(0, 0)]);

        let t = build_table(&seq(2, "(1,1)^2"), 2).unwrap();
        assert_eq!(t.layer(2).to_vec(), vec![e(0, 0)]);

        assert!(build_table(&s, 5).is_err());
    }

    #[test]
    fn table_matches_enumeration() {
        let s = seq(3, "(1,0)^2 (0,1)^2");
        let all = brute(&s);
        let t = build_table(&s, 4).unwrap();
        for k in 0..=4 {
            let want: Vec<_> = all.iter().filter(|(l, _)| *l == k).map(|&(_, x)| x).collect();
            assert_eq!(t.layer(k).to_vec(), want, "t={k}");
        }
    }

    #[test]
    fn sigma_le_examples() {
        let got = sigma_le(&seq(3, "(1,0)^2 (0,1)^2"), 2);
        assert_eq!(got.to_vec(), set(&[(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]));
        assert!(!got.contains(Element::ZERO));
        assert!(sigma_le(&Sequence::empty(ctx(3)), 4).is_empty());
        assert_eq!(sigma_le(&seq(2, "(1,0)^2"), 2).to_vec(), set(&[(0, 0), (1, 0)]));
    }

    #[test]
    fn zero_sum_detection_examples() {
        assert!(!has_zero_sum_le(&seq(4, "(1,0)^3 (0,1)^3 (1,1)^2"), 5));
        assert!(has_zero_sum_le(&seq(4, "(1,0)^3 (0,1)^3 (1,1)^2"), 6));
        assert!(has_zero_sum_le(&seq(2, "(1,0) (0,1) (1,1) (1,0)"), 2));
        assert!(!has_zero_sum_le(&seq(3, "(1,0)^2 (0,1)^2"), 4));
        assert!(has_zero_sum_le(&seq(3, "(0,0)"), 1));
        assert!(!has_zero_sum_le(&seq(3, "(0,0)"), 0));
    }

    #[test]
    fn witness_examples() {
        let w = find_zero_sum_le(&seq(2, "(1,0)^2 (0,1)"), 2, WitnessMode::Shortest).unwrap();
        assert_eq!(w, seq(2, "(1,0)^2"));
        assert!(find_zero_sum_le(&seq(4, "(1,0)^3 (0,1)^3 (1,1)^2"), 5, WitnessMode::Shortest).is_none());
        assert!(find_zero_sum_le(&seq(4, "(1,0)^3 (0,1)^3 (1,1)^2"), 5, WitnessMode::Any).is_none());
        let w = find_zero_sum_le(&seq(3, "(1,0) (2,0) (0,1)"), 2, WitnessMode::Shortest).unwrap();
        assert_eq!(w, seq(3, "(1,0) (2,0)"));
    }

    #[test]
    fn any_mode_prefers_small_terms() {
        let s = seq(3, "(0,1)^3 (1,0)^3");
        let any = find_zero_sum_le(&s, 6, WitnessMode::Any).unwrap();
        assert_eq!(any, seq(3, "(0,1)^3"));
        let s = seq(3, "(0,1) (0,2) (1,0)^3");
        assert_eq!(find_zero_sum_le(&s, 3, WitnessMode::Shortest).unwrap(), seq(3, "(0,1) (0,2)"));
        assert_eq!(find_zero_sum_le(&s, 3, WitnessMode::Any).unwrap(), seq(3, "(0,1) (0,2)"));
        let s = seq(5, "(0,1) (1,0)^5 (0,4)");
        assert_eq!(find_zero_sum_le(&s, 5, WitnessMode::Any).unwrap(), seq(5, "(0,1) (0,4)"));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(zero_sum_classify(&seq(3, "(1,0)^2 (0,1)^2 (1,1)")), ZeroSumClass::MinimalZeroSum);
        assert_eq!(zero_sum_classify(&Sequence::empty(ctx(3))), ZeroSumClass::ZeroSumFree);
        assert_eq!(zero_sum_classify(&seq(2, "(1,0)^2 (0,1)^2")), ZeroSumClass::ZeroSumReducible);
        assert_eq!(zero_sum_classify(&seq(2, "(1,0)^2 (0,1)")), ZeroSumClass::NonzeroSum);
    }

    #[test]
    fn minimal_zero_sum_proper_scan() {
        let s = seq(3, "(1,0)^2 (0,1)^2 (1,1)");
        let all = brute(&s);
        let zero_lengths: Vec<_> = all.iter().filter(|(_, x)| *x == Element::ZERO).map(|p| p.0).collect();
        assert_eq!(zero_lengths, vec![0, 5]);
    }
}
