//! Structural predicates on sequences and the matcher for the conjectured
//! extremal forms.
//!
//! For `|S| = 2n - 2 + k` with no short zero-sum, the expected shapes are
//! (relative to some basis `(e1, e2)`):
//!
//! * `k = 0`: `S·(-σ(S))` has the `k = 1` shape,
//! * `k = 1`: `e1^{n-1} · ∏_{i=1}^{n} (x_i e1 + e2)` with `Σ x_i ≡ 1 (mod n)`,
//! * `2 ≤ k ≤ n-2`: `e1^{n-1} · e2^{n-1} · (e1 + e2)^k`,
//! * `k = n-1`: `e1^{n-1} · e2^{n-1} · (x e1 + e2)^{n-1}` with `gcd(x, n) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{enumerate_automorphisms, gcd, AutMatrix, Element, GroupCtx, DEFAULT_AUT_GUARD};
use crate::sequence::Sequence;

/// Smallest `x ∈ [0, n)` with `x·e = d`, if `d ∈ ⟨e⟩`.
fn multiple_of(ctx: GroupCtx, e: Element, d: Element) -> Option<u32> {
    (0..ctx.n()).find(|&x| ctx.scale(x as i64, e) == d)
}

/// Least element of the coset `r + ⟨e⟩`.
fn coset_min(ctx: GroupCtx, e: Element, r: Element) -> Element {
    (0..ctx.n())
        .map(|y| ctx.add(r, ctx.scale(y as i64, e)))
        .min()
        .expect("n >= 1")
}

/// A basis `(e1, e2)` with `supp(S) ⊆ {e1} ∪ (⟨e1⟩ + e2)`.
///
/// `e1` runs over all elements in lexicographic order; `e2` is the least
/// element of the coset holding `supp(S) \ {e1}` (or the least basis
/// complement of `e1` when that set is empty).
pub fn has_property_a(s: &Sequence) -> Option<(Element, Element)> {
    let ctx = s.ctx();
    for e1 in ctx.elements() {
        if ctx.element_order(e1) != ctx.n() {
            continue;
        }
        if let Some(e2) = property_a_complement(s, e1) {
            return Some((e1, e2));
        }
    }
    None
}

fn property_a_complement(s: &Sequence, e1: Element) -> Option<Element> {
    let ctx = s.ctx();
    let mut rest = s.support().filter(|&x| x != e1);
    match rest.next() {
        None => ctx.elements().find(|&e2| ctx.is_basis(e1, e2)),
        Some(r0) => {
            if !ctx.is_basis(e1, r0) {
                return None;
            }
            if rest.any(|r| multiple_of(ctx, e1, ctx.sub(r, r0)).is_none()) {
                return None;
            }
            Some(coset_min(ctx, e1, r0))
        }
    }
}

/// Both readings of "some term has multiplicity n-1".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyB {
    /// Some term has multiplicity exactly `n - 1`.
    pub exact: bool,
    /// `h(S) ≥ n - 1`.
    pub at_least: bool,
    /// `h(S) ≥ n`: `S` contains `g^{[n]}`, an `n`-term zero-sum.
    pub overfull: bool,
}

pub fn property_b(s: &Sequence) -> PropertyB {
    let n = s.ctx().n();
    let h = s.height();
    PropertyB {
        exact: s.counts().any(|(_, k)| k == n - 1),
        at_least: h + 1 >= n,
        overfull: h >= n,
    }
}

/// The exact reading, and false whenever the height reaches `n`.
pub fn has_property_b(s: &Sequence) -> bool {
    let b = property_b(s);
    b.exact && !b.overfull
}

pub fn has_property_c(s: &Sequence) -> bool {
    let n = s.ctx().n();
    s.counts().all(|(_, k)| k == n - 1)
}

/// Which item of the conjectured classification applies to `k`.
pub fn conjecture_item(n: u32, k: u32) -> u8 {
    match k {
        0 => 1,
        1 => 2,
        _ if k + 1 == n => 4,
        _ => 3,
    }
}

/// Item-specific parameters of a conjectured form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ConjectureParams {
    /// `S = T·g^{[-1]}` with `T` of item-2 shape and `g = -σ(S)`.
    Item1 { appended: Element, xs: Vec<u32> },
    /// Coset coefficients `x_i` (sorted) and their sum mod `n`.
    Item2 { xs: Vec<u32>, sum_class: u32 },
    Item3,
    Item4 { x: u32 },
}

impl ConjectureParams {
    pub fn item(&self) -> u8 {
        match self {
            ConjectureParams::Item1 { .. } => 1,
            ConjectureParams::Item2 { .. } => 2,
            ConjectureParams::Item3 => 3,
            ConjectureParams::Item4 { .. } => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub matched: bool,
    pub item: u8,
    pub n: u32,
    pub k: u32,
    pub basis: Option<(Element, Element)>,
    pub params: Option<ConjectureParams>,
    pub canonical_form: Option<String>,
}

impl ConjectureReport {
    /// Rebuilds the matched sequence from basis and parameters.
    pub fn synthesize(&self) -> Option<Sequence> {
        let ctx = GroupCtx::new(self.n).ok()?;
        let params = self.params.as_ref()?;
        construct_conjectured(ctx, self.k, self.basis?, params).ok()
    }
}

/// Builds the sequence of a conjectured form.
pub fn construct_conjectured(
    ctx: GroupCtx,
    k: u32,
    basis: (Element, Element),
    params: &ConjectureParams,
) -> Result<Sequence> {
    let n = ctx.n();
    let (e1, e2) = (ctx.check(basis.0)?, ctx.check(basis.1)?);
    if n < 2 {
        return Err(Error::InvalidArgument("conjectured forms need n >= 2".into()));
    }
    if k >= n {
        return Err(Error::InvalidArgument(format!("k = {k} not in [0, {}]", n - 1)));
    }
    if !ctx.is_basis(e1, e2) {
        return Err(Error::InvalidArgument(format!("({e1},{e2}) is not a basis")));
    }
    let want = conjecture_item(n, k);
    let item = params.item();
    // for n = 2 the k = 1 shapes of items 2 and 4 coincide
    let allowed = item == want || (n == 2 && k == 1 && item == 4);
    if !allowed {
        return Err(Error::InvalidArgument(format!(
            "item {item} does not apply to n = {n}, k = {k} (expected item {want})"
        )));
    }
    let item2 = |xs: &[u32]| -> Result<Sequence> {
        if xs.len() != n as usize {
            return Err(Error::InvalidArgument(format!(
                "item 2 needs exactly {n} coefficients, got {}",
                xs.len()
            )));
        }
        if let Some(&x) = xs.iter().find(|&&x| x >= n) {
            return Err(Error::InvalidArgument(format!("coefficient {x} not in [0, {}]", n - 1)));
        }
        let sum: u64 = xs.iter().map(|&x| x as u64).sum();
        if sum % n as u64 != 1 % n as u64 {
            return Err(Error::InvalidArgument(format!(
                "coefficients sum to {} mod {n}, need 1",
                sum % n as u64
            )));
        }
        let mut s = Sequence::empty(ctx).with(e1, n - 1)?;
        for &x in xs {
            s = s.with(ctx.combine(x as i64, e1, 1, e2), 1)?;
        }
        Ok(s)
    };
    match params {
        ConjectureParams::Item1 { appended, xs } => {
            let t = item2(xs)?;
            t.remove_term(*appended, 1).map_err(|_| {
                Error::InvalidArgument(format!("appended term {appended} is not a term of the item-2 form"))
            })
        }
        ConjectureParams::Item2 { xs, .. } => item2(xs),
        ConjectureParams::Item3 => Sequence::empty(ctx)
            .with(e1, n - 1)?
            .with(e2, n - 1)?
            .with(ctx.add(e1, e2), k),
        ConjectureParams::Item4 { x } => {
            if *x == 0 || *x >= n || gcd(*x as u64, n as u64) != 1 {
                return Err(Error::InvalidArgument(format!(
                    "x = {x} must lie in [1, {}] with gcd(x, {n}) = 1",
                    n - 1
                )));
            }
            Sequence::empty(ctx)
                .with(e1, n - 1)?
                .with(e2, n - 1)?
                .with(ctx.combine(*x as i64, e1, 1, e2), n - 1)
        }
    }
}

/// Splits `S` as `e1^{n-1} · ∏ (x_i e1 + e2)` with `Σ x_i ≡ 1`, trying
/// support elements of multiplicity `n - 1` as `e1` in order.
fn match_item2(s: &Sequence) -> Option<((Element, Element), Vec<u32>)> {
    let ctx = s.ctx();
    let n = ctx.n();
    if s.len() != 2 * n as usize - 1 {
        return None;
    }
    for e1 in s.support() {
        if s.multiplicity(e1) != n - 1 {
            continue;
        }
        let rest = s.remove_term(e1, n - 1).expect("multiplicity checked");
        let r0 = rest.support().next()?;
        if !ctx.is_basis(e1, r0) {
            continue;
        }
        let e2 = coset_min(ctx, e1, r0);
        let xs: Option<Vec<u32>> = rest
            .terms()
            .map(|r| multiple_of(ctx, e1, ctx.sub(r, e2)))
            .collect();
        let Some(mut xs) = xs else { continue };
        let sum: u64 = xs.iter().map(|&x| x as u64).sum();
        if sum % n as u64 == 1 % n as u64 {
            xs.sort_unstable();
            return Some(((e1, e2), xs));
        }
    }
    None
}

fn match_item3(s: &Sequence, k: u32) -> Option<(Element, Element)> {
    let ctx = s.ctx();
    let n = ctx.n();
    if s.support_len() != 3 {
        return None;
    }
    let heavy: Vec<Element> = s.support().filter(|&x| s.multiplicity(x) == n - 1).collect();
    let [e1, e2] = heavy[..] else { return None };
    let sum = ctx.add(e1, e2);
    (ctx.is_basis(e1, e2) && s.multiplicity(sum) == k).then_some((e1, e2))
}

fn match_item4(s: &Sequence) -> Option<((Element, Element), u32)> {
    let ctx = s.ctx();
    let n = ctx.n();
    if s.support_len() != 3 || !has_property_c(s) {
        return None;
    }
    let supp: Vec<Element> = s.support().collect();
    let mut best: Option<((Element, Element), u32)> = None;
    for &e1 in &supp {
        for &e2 in &supp {
            if e1 == e2 || !ctx.is_basis(e1, e2) {
                continue;
            }
            let third = supp.iter().copied().find(|&c| c != e1 && c != e2)?;
            let Some(x) = multiple_of(ctx, e1, ctx.sub(third, e2)) else { continue };
            if x == 0 || gcd(x as u64, n as u64) != 1 {
                continue;
            }
            let better = match best {
                None => true,
                Some((b, bx)) => (x, (e1, e2)) < (bx, b),
            };
            if better {
                best = Some(((e1, e2), x));
            }
        }
    }
    best
}

/// Decides whether `S` has the conjectured shape for `k`.
///
/// Only the shape is checked; extremality (`0 ∉ Σ_{≤2n-1-k}(S)`) is the
/// caller's hypothesis.
pub fn match_conjecture(s: &Sequence, k: u32) -> Result<ConjectureReport> {
    let ctx = s.ctx();
    let n = ctx.n();
    if n < 2 {
        return Err(Error::InvalidArgument("conjecture needs n >= 2".into()));
    }
    if k >= n {
        return Err(Error::InvalidArgument(format!("k = {k} not in [0, {}]", n - 1)));
    }
    let want_len = (2 * n - 2 + k) as usize;
    if s.len() != want_len {
        return Err(Error::InvalidArgument(format!(
            "|S| = {} but k = {k} needs length {want_len}",
            s.len()
        )));
    }
    let item = conjecture_item(n, k);
    let found: Option<((Element, Element), ConjectureParams)> = match item {
        1 => {
            let g = ctx.neg(s.sigma());
            let t = s.with(g, 1)?;
            match_item2(&t).map(|(basis, xs)| (basis, ConjectureParams::Item1 { appended: g, xs }))
        }
        2 => match_item2(s).map(|(basis, xs)| (basis, ConjectureParams::Item2 { xs, sum_class: 1 % n })),
        3 => match_item3(s, k).map(|basis| (basis, ConjectureParams::Item3)),
        _ => match_item4(s).map(|(basis, x)| (basis, ConjectureParams::Item4 { x })),
    };
    let canonical_form = Canonicalizer::new(ctx, DEFAULT_AUT_GUARD)
        .ok()
        .map(|c| c.canonicalize(s).to_string());
    let (basis, params) = match found {
        Some((b, p)) => (Some(b), Some(p)),
        None => (None, None),
    };
    Ok(ConjectureReport {
        matched: basis.is_some(),
        item,
        n,
        k,
        basis,
        params,
        canonical_form,
    })
}

/// Basis `(e1, e2)` with `S = e1^{n-1} · e2^{n-1} · (e1+e2)^k` and
/// `e1 + e2 = g`. Covers `k = n - 1` as well.
pub fn match_sum_form(s: &Sequence, k: u32, g: Element) -> Option<(Element, Element)> {
    let ctx = s.ctx();
    let n = ctx.n();
    if s.len() != (2 * n - 2 + k) as usize || s.multiplicity(g) != k {
        return None;
    }
    let rest = s.remove_term(g, k).ok()?;
    let heavy: Vec<Element> = rest.support().collect();
    let [e1, e2] = heavy[..] else { return None };
    let ok = rest.multiplicity(e1) == n - 1
        && rest.multiplicity(e2) == n - 1
        && ctx.add(e1, e2) == g
        && ctx.is_basis(e1, e2);
    ok.then_some((e1, e2))
}

/// Which branch of the dichotomy for zero-sum `S` with `|S| = sn - 1` and
/// `0 ∉ Σ_{≤n-1}(S)` a sequence falls in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "item", rename_all = "snake_case")]
pub enum FixedSumShape {
    /// `supp(S) ⊆ {e1} ∪ (⟨e1⟩ + e2)` and `v_{e1}(S) ≡ -1 (mod n)`.
    CosetSupport { basis: (Element, Element) },
    /// `e1^{an} · e2^{bn-1} · (x e1 + e2)^{cn-1} · (x e1 + 2 e2)`.
    FourTerm {
        basis: (Element, Element),
        x: u32,
        a: u32,
        b: u32,
        c: u32,
    },
}

/// First branch: `e1` runs over elements with `v_{e1}(S) ≡ -1 (mod n)`.
pub fn match_coset_support(s: &Sequence) -> Option<(Element, Element)> {
    let ctx = s.ctx();
    let n = ctx.n();
    s.support()
        .filter(|&e1| (s.multiplicity(e1) + 1).is_multiple_of(n) && ctx.element_order(e1) == n)
        .find_map(|e1| property_a_complement(s, e1).map(|e2| (e1, e2)))
}

/// Second branch; needs `x ∈ [2, n-2]` coprime to `n`, so never matches for
/// `n ≤ 4`.
pub fn match_four_term(s: &Sequence) -> Option<FixedSumShape> {
    let ctx = s.ctx();
    let n = ctx.n();
    if s.support_len() != 4 || n < 5 {
        return None;
    }
    let counts: Vec<(Element, u32)> = s.counts().collect();
    let single: Vec<Element> = counts.iter().filter(|c| c.1 == 1).map(|c| c.0).collect();
    let full: Vec<Element> = counts.iter().filter(|c| c.1 % n == 0).map(|c| c.0).collect();
    let short: Vec<Element> = counts.iter().filter(|c| (c.1 + 1) % n == 0).map(|c| c.0).collect();
    let ([f], [e1], [p, q]) = (&single[..], &full[..], &short[..]) else { return None };
    for (e2, y) in [(*p, *q), (*q, *p)] {
        if !ctx.is_basis(*e1, e2) {
            continue;
        }
        let Some(x) = multiple_of(ctx, *e1, ctx.sub(y, e2)) else { continue };
        if x < 2 || x + 2 > n || gcd(x as u64, n as u64) != 1 {
            continue;
        }
        if ctx.combine(x as i64, *e1, 2, e2) != *f {
            continue;
        }
        return Some(FixedSumShape::FourTerm {
            basis: (*e1, e2),
            x,
            a: s.multiplicity(*e1) / n,
            b: (s.multiplicity(e2) + 1) / n,
            c: (s.multiplicity(y) + 1) / n,
        });
    }
    None
}

pub fn match_fixed_sum_shape(s: &Sequence) -> Option<FixedSumShape> {
    match_coset_support(s)
        .map(|basis| FixedSumShape::CosetSupport { basis })
        .or_else(|| match_four_term(s))
}

/// Orbit representatives under `Aut(C_n ⊕ C_n)`.
///
/// Sequences are compared as sorted lists of element indices (`a·n + b`),
/// which is the order of their text forms' terms; the canonical form is the
/// least image.
#[derive(Debug, Clone)]
pub struct Canonicalizer {
    ctx: GroupCtx,
    auts: Vec<AutMatrix>,
    perms: Vec<Vec<u16>>,
}

impl Canonicalizer {
    pub fn new(ctx: GroupCtx, guard: u32) -> Result<Canonicalizer> {
        let auts = enumerate_automorphisms(ctx, guard)?;
        let perms = auts
            .iter()
            .map(|a| ctx.elements().map(|x| ctx.index(a.apply(x)) as u16).collect())
            .collect();
        Ok(Canonicalizer { ctx, auts, perms })
    }

    pub fn ctx(&self) -> GroupCtx {
        self.ctx
    }

    pub fn automorphisms(&self) -> &[AutMatrix] {
        &self.auts
    }

    /// Least sorted image of a sorted index list.
    pub fn canonical_indices(&self, idx: &[u16]) -> Vec<u16> {
        let mut best = idx.to_vec();
        let mut img = Vec::with_capacity(idx.len());
        for perm in &self.perms {
            img.clear();
            img.extend(idx.iter().map(|&i| perm[i as usize]));
            img.sort_unstable();
            if img < best {
                std::mem::swap(&mut best, &mut img);
            }
        }
        best
    }

    /// No image of the sorted list `idx` sorts strictly below it.
    ///
    /// Applied to a prefix of a sorted sequence this is a sound pruning test:
    /// the first `|P|` sorted terms of `ψ(S)` are bounded termwise by
    /// `sort(ψ(P))`, so a failing prefix cannot extend to a canonical sequence.
    pub fn is_canonical_indices(&self, idx: &[u16], scratch: &mut Vec<u16>) -> bool {
        for perm in &self.perms {
            scratch.clear();
            scratch.extend(idx.iter().map(|&i| perm[i as usize]));
            scratch.sort_unstable();
            if scratch.as_slice() < idx {
                return false;
            }
        }
        true
    }

    pub fn canonicalize(&self, s: &Sequence) -> Sequence {
        Sequence::from_indices(self.ctx, &self.canonical_indices(&s.indices()))
    }

    pub fn is_canonical(&self, s: &Sequence) -> bool {
        self.is_canonical_indices(&s.indices(), &mut Vec::new())
    }
}

/// Canonical representative with the default automorphism guard.
pub fn canonicalize(s: &Sequence) -> Result<Sequence> {
    Ok(Canonicalizer::new(s.ctx(), DEFAULT_AUT_GUARD)?.canonicalize(s))
}
