//! Block decompositions of sequences over `C_{mn} ⊕ C_{mn}` along
//! `φ(x) = m·x`, their associated sequences in `ker φ ≅ C_m ⊕ C_m`, and the
//! checks that an extremal input forces on them.
//!
//! Two schemes are carried, selected by `k_n`:
//!
//! * `k_n ≤ 1`: `S* = W_0 · W_1 ⋯ W_{2m-2+k_m}` where `S* = S` for `k_n = 1`
//!   and `S* = S·g_0` with `g_0 ∈ -σ(S) + ker φ` for `k_n = 0`;
//! * `k_n ≥ 2`: `S = W · W_1 ⋯ W_{2m-2+k_m}` with an unindexed head `W`.
//!
//! Parts are indexed with the head at 0 and `blocks[i - 1]` at `i`. In the
//! augmented kind `blocks[0]` is the extra block `W_0` split off the head.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Element, GroupCtx, MulHom};
use crate::sequence::{Projection, Sequence};
use crate::subsums::{find_zero_sum_le, has_zero_sum_le, zero_sum_classify, WitnessMode, ZeroSumClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionKind {
    Block,
    Weak,
    Augmented,
}

/// Which factorization shape applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `k_n ∈ {0, 1}`: indexed head `W_0`, decomposes `S*`.
    IndexedHead,
    /// `k_n ≥ 2`: unindexed head `W`, decomposes `S`.
    FreeHead,
}

impl Scheme {
    pub fn for_kn(k_n: u32) -> Scheme {
        if k_n <= 1 {
            Scheme::IndexedHead
        } else {
            Scheme::FreeHead
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub kind: DecompositionKind,
    pub hom: MulHom,
    /// The input `S`.
    pub source: Sequence,
    /// `S*` for the indexed scheme, else `S`.
    pub decomposed: Sequence,
    pub head: Sequence,
    pub blocks: Vec<Sequence>,
    pub k_m: u32,
    pub k_n: u32,
    pub assoc_index: Option<usize>,
    pub g0: Option<Element>,
}

impl BlockDecomposition {
    pub fn m(&self) -> u32 {
        self.hom.m()
    }

    pub fn n(&self) -> u32 {
        self.hom.n()
    }

    pub fn scheme(&self) -> Scheme {
        Scheme::for_kn(self.k_n)
    }

    /// Head followed by the blocks.
    pub fn parts(&self) -> Vec<&Sequence> {
        std::iter::once(&self.head).chain(&self.blocks).collect()
    }

    pub fn part(&self, i: usize) -> Option<&Sequence> {
        if i == 0 {
            Some(&self.head)
        } else {
            self.blocks.get(i - 1)
        }
    }

    fn part_mut(&mut self, i: usize) -> Option<&mut Sequence> {
        if i == 0 {
            Some(&mut self.head)
        } else {
            self.blocks.get_mut(i - 1)
        }
    }

    /// Number of blocks the scheme asks for after the head.
    pub fn blocks_needed(&self) -> usize {
        let base = (2 * self.m() - 2 + self.k_m) as usize;
        base + usize::from(self.kind == DecompositionKind::Augmented)
    }

    /// Assembles a decomposition from explicit parts.
    ///
    /// Nothing beyond group membership is validated here; run
    /// [`verify_decomposition`] for the structural checks.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        kind: DecompositionKind,
        source: Sequence,
        m: u32,
        k_m: u32,
        k_n: u32,
        g0: Option<Element>,
        head: Sequence,
        blocks: Vec<Sequence>,
    ) -> Result<BlockDecomposition> {
        let ctx = source.ctx();
        let hom = MulHom::new(ctx, m)?;
        for p in std::iter::once(&head).chain(&blocks) {
            ctx.same_as(p.ctx())?;
        }
        let decomposed = match g0 {
            Some(g) => source.with(ctx.check(g)?, 1)?,
            None => source.clone(),
        };
        let mut d = BlockDecomposition {
            kind,
            hom,
            source,
            decomposed,
            head,
            blocks,
            k_m,
            k_n,
            assoc_index: None,
            g0,
        };
        d.assoc_index = d.compute_assoc_index();
        Ok(d)
    }

    /// The index the associated sequence omits (indexed scheme only).
    ///
    /// `k_n = 1`: first part longer than `n`. `k_n = 0`: the part holding
    /// `g_0`, the head first.
    fn compute_assoc_index(&self) -> Option<usize> {
        if self.scheme() != Scheme::IndexedHead {
            return None;
        }
        let n = self.n() as usize;
        let parts = self.parts();
        match self.g0 {
            Some(g) => parts.iter().position(|p| p.contains(g)),
            None => parts.iter().position(|p| p.len() > n),
        }
    }

    /// Relabels a block decomposition as weak.
    pub fn to_weak(&self) -> Result<BlockDecomposition> {
        if self.kind != DecompositionKind::Block {
            return Err(Error::InvalidArgument(format!("expected a block decomposition, got {:?}", self.kind)));
        }
        let mut d = self.clone();
        d.kind = DecompositionKind::Weak;
        Ok(d)
    }

    /// Splits a nontrivial `W_0 | W` with `φ(W_0)` zero-sum and
    /// `|W_0| ≤ 2n - k_n` off the head (free-head scheme only).
    pub fn to_augmented(&self) -> Result<BlockDecomposition> {
        if self.kind != DecompositionKind::Block || self.scheme() != Scheme::FreeHead {
            return Err(Error::InvalidArgument(
                "augmentation needs a block decomposition with k_n >= 2".into(),
            ));
        }
        let bound = (2 * self.n() - self.k_n) as usize;
        let Some(w0) = extract_block(&self.head, &self.hom, bound, None) else {
            return Err(Error::DecompositionFailed {
                blocks_found: self.blocks.len(),
                blocks_needed: self.blocks.len() + 1,
                remainder: self.head.to_string(),
                blocks: self.blocks.iter().map(|b| b.to_string()).collect(),
            });
        };
        let mut d = self.clone();
        d.head = self.head.remove(&w0)?;
        d.blocks.insert(0, w0);
        d.kind = DecompositionKind::Augmented;
        Ok(d)
    }

    /// Exchanges `g` in part `i` with `h` in part `j`; needs `φ(g) = φ(h)`.
    ///
    /// The associated index is kept, as the exchange preserves the length of
    /// every part.
    pub fn swap_terms(&self, i: usize, g: Element, j: usize, h: Element) -> Result<BlockDecomposition> {
        if i == j {
            return Err(Error::InvalidArgument("swap needs two distinct parts".into()));
        }
        if self.hom.apply(g) != self.hom.apply(h) {
            return Err(Error::InvalidArgument(format!("φ({g}) != φ({h})")));
        }
        let mut d = self.clone();
        let pi = d.part_mut(i).ok_or_else(|| Error::InvalidArgument(format!("no part {i}")))?;
        *pi = pi.remove_term(g, 1)?.with(h, 1)?;
        let pj = d.part_mut(j).ok_or_else(|| Error::InvalidArgument(format!("no part {j}")))?;
        *pj = pj.remove_term(h, 1)?.with(g, 1)?;
        Ok(d)
    }
}

/// Lifts the shortest `φ`-zero-sum of length `≤ bound` in `rem` back to terms
/// of `rem`, taking the least preimages and leaving one copy of `keep` alone
/// when possible.
fn extract_block(rem: &Sequence, hom: &MulHom, bound: usize, keep: Option<Element>) -> Option<Sequence> {
    let image = rem.apply_map(&Projection(hom)).ok()?;
    let witness = find_zero_sum_le(&image, bound, WitnessMode::Shortest)?;
    let lift = |avail: &Sequence| -> Option<Sequence> {
        let mut avail = avail.clone();
        let mut out = Sequence::empty(rem.ctx());
        for t in witness.terms() {
            let x = avail.support().find(|&x| hom.project(x) == t)?;
            avail = avail.remove_term(x, 1).ok()?;
            out = out.with(x, 1).ok()?;
        }
        Some(out)
    };
    match keep.filter(|&g| rem.contains(g)) {
        Some(g) => lift(&rem.remove_term(g, 1).ok()?).or_else(|| lift(rem)),
        None => lift(rem),
    }
}

fn check_params(ctx: GroupCtx, m: u32, n: u32, k_m: u32, k_n: u32) -> Result<()> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidArgument(format!("need m, n >= 2, got m = {m}, n = {n}")));
    }
    if ctx.n() != m * n {
        return Err(Error::InvalidArgument(format!(
            "sequence lives in C_{}², not C_{}²",
            ctx.n(),
            m * n
        )));
    }
    if k_m >= m || k_n >= n {
        return Err(Error::InvalidArgument(format!(
            "need k_m in [0, {}] and k_n in [0, {}]",
            m - 1,
            n - 1
        )));
    }
    Ok(())
}

/// Greedy block decomposition.
///
/// Repeatedly removes the shortest nontrivial `T` with `|T| ≤ n` and `φ(T)`
/// zero-sum (least preimages first) until `2m - 2 + k_m` blocks are found;
/// the remainder is the head. For `k_n = 0` the appended `g_0` is the least
/// element of `-σ(S) + ker φ` and one copy of it is kept out of the blocks
/// when possible.
///
/// The length of `S` is not checked up front: an input too short for the
/// scheme shows up as a [`Error::DecompositionFailed`], and lengths that
/// merely differ from `2mn - 2 + k` show up in [`verify_decomposition`].
pub fn block_decompose(s: &Sequence, m: u32, n: u32, k_m: u32, k_n: u32) -> Result<BlockDecomposition> {
    let ctx = s.ctx();
    check_params(ctx, m, n, k_m, k_n)?;
    let hom = MulHom::new(ctx, m)?;
    let g0 = (k_n == 0).then(|| {
        let t = ctx.neg(s.sigma());
        Element::new(t.a % n, t.b % n)
    });
    let decomposed = match g0 {
        Some(g) => s.with(g, 1)?,
        None => s.clone(),
    };
    let needed = (2 * m - 2 + k_m) as usize;
    let mut rem = decomposed.clone();
    let mut blocks = Vec::with_capacity(needed);
    while blocks.len() < needed {
        let Some(block) = extract_block(&rem, &hom, n as usize, g0) else {
            return Err(Error::DecompositionFailed {
                blocks_found: blocks.len(),
                blocks_needed: needed,
                remainder: rem.to_string(),
                blocks: blocks.iter().map(|b: &Sequence| b.to_string()).collect(),
            });
        };
        rem = rem.remove(&block)?;
        blocks.push(block);
    }
    let mut d = BlockDecomposition {
        kind: DecompositionKind::Block,
        hom,
        source: s.clone(),
        decomposed,
        head: rem,
        blocks,
        k_m,
        k_n,
        assoc_index: None,
        g0,
    };
    d.assoc_index = d.compute_assoc_index();
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub checks: Vec<Check>,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name, passed, detail: detail.into() });
    }
}

/// Structural checks of the kind, then the length and short-zero-sum
/// conditions an extremal input forces.
pub fn verify_decomposition(d: &BlockDecomposition) -> DecompositionReport {
    let mut r = DecompositionReport { checks: Vec::new() };
    let (m, n) = (d.m(), d.n());
    let nu = n as usize;
    let scheme = d.scheme();
    let proj = |s: &Sequence| s.apply_map(&Projection(&d.hom)).expect("same context");

    let params_ok = m >= 2 && n >= 2 && d.k_m < m && d.k_n < n;
    r.push(
        "parameters",
        params_ok && d.blocks.len() == d.blocks_needed(),
        format!(
            "m = {m}, n = {n}, k_m = {}, k_n = {}, {} blocks for {} needed",
            d.k_m,
            d.k_n,
            d.blocks.len(),
            d.blocks_needed()
        ),
    );

    let expected = match (scheme, d.g0) {
        (Scheme::IndexedHead, Some(g)) if d.k_n == 0 => d.source.with(g, 1).ok(),
        (Scheme::IndexedHead, None) if d.k_n == 1 => Some(d.source.clone()),
        (Scheme::FreeHead, None) => Some(d.source.clone()),
        _ => None,
    };
    let joined = d
        .blocks
        .iter()
        .try_fold(d.head.clone(), |acc, b| acc.concat(b))
        .ok();
    let recomposes = expected.is_some() && joined == expected && joined.as_ref() == Some(&d.decomposed);
    r.push("recomposition", recomposes, "head and blocks multiply to the decomposed sequence");

    let bad_blocks: Vec<usize> = d
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.is_empty() || proj(b).sigma() != Element::ZERO)
        .map(|(i, _)| i + 1)
        .collect();
    r.push(
        "blocks_phi_zero_sum",
        bad_blocks.is_empty(),
        format!("parts failing a nontrivial φ-zero-sum: {bad_blocks:?}"),
    );

    let (bounds_ok, bounds_detail) = match (d.kind, scheme) {
        (DecompositionKind::Block, _) => (
            d.blocks.iter().all(|b| (1..=nu).contains(&b.len())),
            format!("1 <= |W_i| <= {n}"),
        ),
        (DecompositionKind::Weak, Scheme::IndexedHead) => (
            !d.head.is_empty() && proj(&d.head).sigma() == Element::ZERO,
            "φ(W_0) is a nontrivial zero-sum".to_string(),
        ),
        (DecompositionKind::Weak, Scheme::FreeHead) => (
            d.head.len() >= (n - 1 + 2 * d.k_n) as usize,
            format!("|W| = {} >= {}", d.head.len(), n - 1 + 2 * d.k_n),
        ),
        (DecompositionKind::Augmented, Scheme::FreeHead) => (
            d.blocks.first().is_some_and(|w0| w0.len() <= (3 * n - 1 - d.k_n) as usize)
                && d.blocks.iter().skip(1).all(|b| b.len() == nu),
            format!("|W_0| <= {} and |W_i| = {n}", 3 * n - 1 - d.k_n),
        ),
        (DecompositionKind::Augmented, Scheme::IndexedHead) => {
            (false, "augmented decompositions need k_n >= 2".to_string())
        }
    };
    r.push("kind_bounds", bounds_ok, bounds_detail);

    if scheme == Scheme::IndexedHead {
        let ok = match (d.assoc_index.and_then(|i| d.part(i)), d.g0) {
            (Some(p), Some(g)) => p.contains(g),
            (Some(p), None) => p.len() > nu,
            (None, _) => false,
        };
        r.push("assoc_index", ok, format!("associated index {:?}", d.assoc_index));
    }

    // forced by extremality of the input
    let sized: Vec<&Sequence> = match d.kind {
        DecompositionKind::Augmented => d.blocks.iter().skip(1).collect(),
        _ => d.blocks.iter().collect(),
    };
    if d.kind != DecompositionKind::Weak {
        let lens: Vec<usize> = sized.iter().map(|b| b.len()).collect();
        r.push(
            "block_lengths",
            lens.iter().all(|&l| l == nu),
            format!("block lengths {lens:?}, all should be {n}"),
        );
        let head = match d.kind {
            DecompositionKind::Augmented => d.blocks.first().and_then(|w0| d.head.concat(w0).ok()),
            _ => Some(d.head.clone()),
        }
        .unwrap_or_else(|| d.head.clone());
        let want = match scheme {
            Scheme::IndexedHead => 2 * n - 1,
            Scheme::FreeHead => 2 * n - 2 + d.k_n,
        } as usize;
        r.push(
            "head_length",
            head.len() == want,
            format!("|head| = {}, expected {want}", head.len()),
        );
        let image = proj(&head);
        match scheme {
            Scheme::IndexedHead => {
                let class = zero_sum_classify(&image);
                r.push(
                    "head_structure",
                    class == ZeroSumClass::MinimalZeroSum,
                    format!("φ(W_0) is {class}"),
                );
            }
            Scheme::FreeHead => {
                let ell = (2 * n - 1 - d.k_n) as usize;
                r.push(
                    "head_structure",
                    !has_zero_sum_le(&image, ell),
                    format!("0 ∉ Σ_≤{ell}(φ(W))"),
                );
            }
        }
    }
    let short = has_zero_sum_le(&proj(&d.decomposed), nu - 1);
    let short_block = d.blocks.iter().any(|b| b.len() < nu);
    r.push(
        "no_short_phi_zero_sum",
        !short && !(d.kind == DecompositionKind::Block && short_block),
        format!(
            "0 ∉ Σ_≤{}(φ(S)): {}; blocks shorter than {n}: {short_block}",
            n - 1,
            !short
        ),
    );
    r
}

/// `σ` of the contributing blocks, in kernel coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociatedSequence {
    pub seq: Sequence,
    /// Part indices whose sums make up `seq`, in order.
    pub provenance: Vec<usize>,
}

fn kernel_seq(d: &BlockDecomposition, basis: (Element, Element), parts: &[usize]) -> Result<Sequence> {
    let kctx = d.hom.kernel_ctx();
    let mut out = Sequence::empty(kctx);
    for &i in parts {
        let part = d.part(i).ok_or_else(|| Error::InvalidArgument(format!("no part {i}")))?;
        let sum = part.sigma();
        let c = d.hom.kernel_coords(basis, sum).map_err(|e| match e {
            Error::NotInKernel(x) => Error::Invariant(format!("σ of part {i} is {x}, outside ker φ")),
            other => other,
        })?;
        out = out.with(c, 1)?;
    }
    Ok(out)
}

/// `S_σ`, or `σ(W_0)·S_σ` for the augmented kind.
///
/// Indexed scheme: every part but the associated index. Free head: every
/// block.
pub fn associated_sequence(d: &BlockDecomposition, basis: (Element, Element)) -> Result<AssociatedSequence> {
    let provenance: Vec<usize> = match d.scheme() {
        Scheme::IndexedHead => {
            let skip = d
                .assoc_index
                .ok_or_else(|| Error::Invariant("no associated index".into()))?;
            (0..=d.blocks.len()).filter(|&i| i != skip).collect()
        }
        Scheme::FreeHead => (1..=d.blocks.len()).collect(),
    };
    Ok(AssociatedSequence { seq: kernel_seq(d, basis, &provenance)?, provenance })
}

/// `σ(W_{k_∅}) · S_σ`, all parts of an indexed-scheme decomposition.
pub fn full_associated_sequence(d: &BlockDecomposition, basis: (Element, Element)) -> Result<AssociatedSequence> {
    if d.scheme() != Scheme::IndexedHead {
        return Err(Error::InvalidArgument("only defined for k_n <= 1".into()));
    }
    let provenance: Vec<usize> = (0..=d.blocks.len()).collect();
    Ok(AssociatedSequence { seq: kernel_seq(d, basis, &provenance)?, provenance })
}

/// `supp(S) ∩ φ^{-1}(φ(g)) = {g}`.
pub fn is_good_term(s: &Sequence, hom: &MulHom, g: Element) -> Result<bool> {
    hom.source().same_as(s.ctx())?;
    if !s.contains(g) {
        return Err(Error::InvalidArgument(format!("{g} is not a term of {s}")));
    }
    let image = hom.apply(g);
    Ok(s.support().all(|x| x == g || hom.apply(x) != image))
}

/// JSON view of a decomposition and its checks.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionSummary {
    pub kind: DecompositionKind,
    pub m: u32,
    pub n: u32,
    pub k_m: u32,
    pub k_n: u32,
    pub g0: Option<Element>,
    pub head: String,
    pub blocks: Vec<String>,
    pub assoc_index: Option<usize>,
    pub associated_sequence: Option<String>,
    pub checks: Vec<Check>,
}

impl DecompositionSummary {
    pub fn new(d: &BlockDecomposition, basis: (Element, Element)) -> DecompositionSummary {
        DecompositionSummary {
            kind: d.kind,
            m: d.m(),
            n: d.n(),
            k_m: d.k_m,
            k_n: d.k_n,
            g0: d.g0,
            head: d.head.to_string(),
            blocks: d.blocks.iter().map(|b| b.to_string()).collect(),
            assoc_index: d.assoc_index,
            associated_sequence: associated_sequence(d, basis).ok().map(|a| a.seq.to_string()),
            checks: verify_decomposition(d).checks,
        }
    }
}
