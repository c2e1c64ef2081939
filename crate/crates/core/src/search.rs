//! Exhaustive orbit enumeration and the verifications built on it.
//!
//! The tree walks non-decreasing lists of element indices. A child is cut
//! when its new term closes a zero-sum of length `≤ ℓ` (tested against the
//! prefix's layered subsum sets), and when the prefix is not the least sorted
//! list in its automorphism orbit. Prefixes of canonical sequences are
//! canonical, so the second cut is sound, and at the leaves it is exactly the
//! full canonicity test.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::decompose::{
    associated_sequence, block_decompose, full_associated_sequence, is_good_term, verify_decomposition,
    BlockDecomposition, Scheme,
};
use crate::error::{Error, Result};
use crate::group::{standard_basis, Element, GroupCtx, DEFAULT_AUT_GUARD};
use crate::report::{Counters, Params, SearchReport, Verdict};
use crate::sequence::Sequence;
use crate::structure::{match_conjecture, match_fixed_sum_shape, match_sum_form, Canonicalizer};
use crate::subsums::{has_zero_sum_le, or_translated, rows_contain, sigma_t};

pub use crate::structure::construct_conjectured;

pub const DEFAULT_MAX_N: u32 = 5;
pub const DEFAULT_MAX_MN_EXHAUSTIVE: u32 = 4;

/// Feasibility guards and execution knobs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest modulus an exhaustive search accepts.
    pub max_n: u32,
    /// Largest `mn` for the exhaustive tier of the multiplicative check.
    pub max_mn_exhaustive: u32,
    /// Largest modulus whose automorphism group is enumerated.
    pub aut_guard: u32,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Where finished subtrees are recorded so interrupted runs resume.
    pub checkpoint_dir: Option<PathBuf>,
    /// Depth at which the tree is cut into parallel tasks.
    pub split_depth: usize,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            max_n: DEFAULT_MAX_N,
            max_mn_exhaustive: DEFAULT_MAX_MN_EXHAUSTIVE,
            aut_guard: DEFAULT_AUT_GUARD,
            threads: None,
            checkpoint_dir: None,
            split_depth: 3,
        }
    }
}

impl SearchConfig {
    fn guard(&self, what: &'static str, n: u32) -> Result<()> {
        if n > self.max_n {
            return Err(Error::Infeasible { what, n, guard: self.max_n });
        }
        Ok(())
    }

    fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match self.threads {
            Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
                Ok(pool) => pool.install(f),
                Err(_) => f(),
            },
            None => f(),
        }
    }
}

/// Which zero-sums close a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroBound {
    /// Nontrivial zero-sums of length at most this.
    Le(usize),
    /// Any nontrivial zero-sum.
    Unbounded,
}

/// One tree walk.
pub struct TreeSpec<'a> {
    pub bound: ZeroBound,
    /// Branches stop growing at this length.
    pub max_len: usize,
    /// Canonical sequences of exactly this length are collected.
    pub collect_len: Option<usize>,
    /// Extra condition on collected sequences.
    pub leaf_filter: Option<&'a (dyn Fn(&Sequence) -> bool + Sync)>,
    /// Names the walk in checkpoint files; empty disables checkpointing.
    pub key: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeResult {
    pub counters: Counters,
    /// Longest canonical sequence reached, and the least such one.
    pub best_len: usize,
    pub best: Vec<u16>,
    pub leaves: Vec<Vec<u16>>,
}

impl TreeResult {
    fn merge(&mut self, other: TreeResult) {
        self.counters.absorb(&other.counters);
        if other.best_len > self.best_len || (other.best_len == self.best_len && other.best < self.best) {
            self.best_len = other.best_len;
            self.best = other.best;
        }
        self.leaves.extend(other.leaves);
    }
}

struct Walker<'a, 'b> {
    ctx: GroupCtx,
    n: u32,
    w: usize,
    /// Words per frame.
    stride: usize,
    /// Layers per frame: `Σ_0 … Σ_L` when bounded, `Σ ∪ {0}` otherwise.
    layers: usize,
    unbounded: bool,
    elems: Vec<Element>,
    negs: Vec<Element>,
    canon: &'a Canonicalizer,
    spec: &'a TreeSpec<'b>,
    frames: Vec<u64>,
    idx: Vec<u16>,
    scratch: Vec<u16>,
    /// Stop and record prefixes at this depth instead of descending.
    split: Option<usize>,
    frontier: Vec<Vec<u16>>,
    out: TreeResult,
}

impl<'a, 'b> Walker<'a, 'b> {
    fn new(ctx: GroupCtx, canon: &'a Canonicalizer, spec: &'a TreeSpec<'b>) -> Self {
        let n = ctx.n();
        let w = n as usize;
        let (layers, unbounded) = match spec.bound {
            ZeroBound::Le(ell) => (ell.min(spec.max_len) + 1, false),
            ZeroBound::Unbounded => (1, true),
        };
        let stride = layers * w;
        let elems: Vec<Element> = ctx.elements().collect();
        let negs = elems.iter().map(|&x| ctx.neg(x)).collect();
        let mut frames = vec![0u64; (spec.max_len + 1) * stride];
        frames[0] = 1;
        Walker {
            ctx,
            n,
            w,
            stride,
            layers,
            unbounded,
            elems,
            negs,
            canon,
            spec,
            frames,
            idx: Vec::with_capacity(spec.max_len),
            scratch: Vec::with_capacity(spec.max_len),
            split: None,
            frontier: Vec::new(),
            out: TreeResult::default(),
        }
    }

    fn frame(&self, depth: usize) -> &[u64] {
        &self.frames[depth * self.stride..(depth + 1) * self.stride]
    }

    /// Adding element `x` to the prefix of length `depth` closes a short
    /// zero-sum iff `-x` is a sum of at most `ℓ - 1` prefix terms.
    fn closes_zero_sum(&self, depth: usize, x: usize) -> bool {
        let f = self.frame(depth);
        let ng = self.negs[x];
        if self.unbounded {
            return rows_contain(f, ng);
        }
        let usable = (self.layers - 1).min(depth + 1);
        (0..usable).any(|t| rows_contain(&f[t * self.w..(t + 1) * self.w], ng))
    }

    fn extend(&mut self, depth: usize, x: usize) {
        let g = self.elems[x];
        let (lo, hi) = self.frames.split_at_mut((depth + 1) * self.stride);
        let parent = &lo[depth * self.stride..];
        let child = &mut hi[..self.stride];
        child.copy_from_slice(parent);
        if self.unbounded {
            or_translated(parent, g, self.n, child);
        } else {
            let w = self.w;
            for t in 1..self.layers.min(depth + 2) {
                or_translated(&parent[(t - 1) * w..t * w], g, self.n, &mut child[t * w..(t + 1) * w]);
            }
        }
    }

    /// Rebuilds the frames for a known-valid prefix.
    fn seed(&mut self, prefix: &[u16]) {
        self.idx.clear();
        for (d, &x) in prefix.iter().enumerate() {
            self.extend(d, x as usize);
            self.idx.push(x);
        }
    }

    fn visit(&mut self) {
        let depth = self.idx.len();
        if self.split == Some(depth) {
            self.frontier.push(self.idx.clone());
            return;
        }
        self.out.counters.nodes += 1;
        if depth > self.out.best_len {
            self.out.best_len = depth;
            self.out.best = self.idx.clone();
        }
        if self.spec.collect_len == Some(depth) {
            let keep = match self.spec.leaf_filter {
                Some(f) => f(&Sequence::from_indices(self.ctx, &self.idx)),
                None => true,
            };
            if keep {
                self.out.counters.leaves += 1;
                self.out.leaves.push(self.idx.clone());
            }
        }
        if depth == self.spec.max_len {
            return;
        }
        let start = self.idx.last().map_or(0, |&v| v as usize);
        for x in start..self.elems.len() {
            if self.closes_zero_sum(depth, x) {
                self.out.counters.zero_pruned += 1;
                continue;
            }
            self.idx.push(x as u16);
            if !self.canon.is_canonical_indices(&self.idx, &mut self.scratch) {
                self.out.counters.canon_pruned += 1;
                self.idx.pop();
                continue;
            }
            self.extend(depth, x);
            self.visit();
            self.idx.pop();
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointLine {
    prefix: Vec<u16>,
    result: TreeResult,
}

fn checkpoint_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("checkpoint-{key}.jsonl"))
}

fn load_checkpoint(path: &Path) -> HashMap<Vec<u16>, TreeResult> {
    let Ok(file) = File::open(path) else { return HashMap::new() };
    BufReader::new(file)
        .lines()
        .map_while(|l| l.ok())
        .filter_map(|l| serde_json::from_str::<CheckpointLine>(&l).ok())
        .map(|c| (c.prefix, c.result))
        .collect()
}

/// Walks the whole tree, splitting it into parallel tasks at
/// `cfg.split_depth` and merging their results in task order.
pub fn explore(ctx: GroupCtx, spec: &TreeSpec<'_>, cfg: &SearchConfig) -> Result<TreeResult> {
    let canon = Canonicalizer::new(ctx, cfg.aut_guard)?;
    let split = cfg.split_depth.min(spec.max_len);
    let mut top = Walker::new(ctx, &canon, spec);
    top.split = Some(split);
    top.visit();
    let frontier = std::mem::take(&mut top.frontier);
    let mut total = top.out;

    let ckpt = cfg
        .checkpoint_dir
        .as_ref()
        .filter(|_| !spec.key.is_empty())
        .map(|d| checkpoint_path(d, &spec.key));
    let done = ckpt.as_deref().map(load_checkpoint).unwrap_or_default();
    let sink = ckpt.as_ref().and_then(|p| {
        fs::create_dir_all(p.parent()?).ok()?;
        OpenOptions::new().create(true).append(true).open(p).ok().map(Mutex::new)
    });

    let results: Vec<TreeResult> = cfg.install(|| {
        frontier
            .par_iter()
            .map(|prefix| {
                if let Some(r) = done.get(prefix) {
                    return r.clone();
                }
                let mut w = Walker::new(ctx, &canon, spec);
                w.seed(prefix);
                w.visit();
                if let Some(sink) = &sink {
                    let line = CheckpointLine { prefix: prefix.clone(), result: w.out.clone() };
                    if let (Ok(mut f), Ok(text)) = (sink.lock(), serde_json::to_string(&line)) {
                        let _ = writeln!(f, "{text}");
                    }
                }
                w.out
            })
            .collect()
    });
    for r in results {
        total.merge(r);
    }
    total.leaves.sort();
    if let Some(p) = ckpt {
        drop(sink);
        let _ = fs::remove_file(p);
    }
    Ok(total)
}

/// Value of an invariant with a longest avoiding sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantValue {
    pub value: u32,
    pub witness: Sequence,
    pub counters: Counters,
}

fn longest(ctx: GroupCtx, bound: ZeroBound, key: String, cfg: &SearchConfig) -> Result<InvariantValue> {
    let cap = ctx.order() + 1;
    let spec = TreeSpec { bound, max_len: cap, collect_len: None, leaf_filter: None, key };
    let r = explore(ctx, &spec, cfg)?;
    if r.best_len >= cap {
        return Err(Error::Invariant(format!("search reached its length cap {cap}")));
    }
    Ok(InvariantValue {
        value: r.best_len as u32 + 1,
        witness: Sequence::from_indices(ctx, &r.best),
        counters: r.counters,
    })
}

/// `s_{≤ℓ}(C_n ⊕ C_n)` for `ℓ ≥ n`.
pub fn compute_s_le(n: u32, ell: u32, cfg: &SearchConfig) -> Result<InvariantValue> {
    let ctx = GroupCtx::new(n)?;
    if ell < n {
        return Err(Error::InvalidArgument(format!(
            "s_≤ℓ is infinite for ℓ = {ell} < n = {n}: g^[n-1] repeats freely"
        )));
    }
    cfg.guard("s_le search", n)?;
    longest(ctx, ZeroBound::Le(ell as usize), format!("s_le-{n}-{ell}"), cfg)
}

/// `η(C_n ⊕ C_n) = s_{≤n}`.
pub fn compute_eta(n: u32, cfg: &SearchConfig) -> Result<InvariantValue> {
    compute_s_le(n, n, cfg)
}

/// `D(C_n ⊕ C_n)`.
pub fn compute_davenport(n: u32, cfg: &SearchConfig) -> Result<InvariantValue> {
    let ctx = GroupCtx::new(n)?;
    cfg.guard("Davenport search", n)?;
    longest(ctx, ZeroBound::Unbounded, format!("davenport-{n}"), cfg)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// One canonical representative per orbit, sorted.
    pub reps: Vec<Sequence>,
    pub counters: Counters,
}

fn check_level(n: u32, k: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument("need n >= 2".into()));
    }
    if k >= n {
        return Err(Error::InvalidArgument(format!("k = {k} not in [0, {}]", n - 1)));
    }
    Ok(())
}

/// All orbits of `S` with `|S| = 2n-2+k` and `0 ∉ Σ_{≤2n-1-k}(S)`.
pub fn enumerate_extremal(n: u32, k: u32, cfg: &SearchConfig) -> Result<Enumeration> {
    check_level(n, k)?;
    let ctx = GroupCtx::new(n)?;
    cfg.guard("extremal enumeration", n)?;
    let len = (2 * n - 2 + k) as usize;
    let spec = TreeSpec {
        bound: ZeroBound::Le((2 * n - 1 - k) as usize),
        max_len: len,
        collect_len: Some(len),
        leaf_filter: None,
        key: format!("extremal-{n}-{k}"),
    };
    let r = explore(ctx, &spec, cfg)?;
    Ok(Enumeration {
        reps: r.leaves.iter().map(|l| Sequence::from_indices(ctx, l)).collect(),
        counters: r.counters,
    })
}

fn finish(mut report: SearchReport, start: Instant) -> SearchReport {
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

/// Report for `davenport`, `eta` or `s_le`.
pub fn invariant_report(kind: &str, n: u32, ell: Option<u32>, cfg: &SearchConfig) -> Result<SearchReport> {
    let start = Instant::now();
    let (value, ell, expected) = match kind {
        "davenport" => (compute_davenport(n, cfg)?, None, 2 * n - 1),
        "eta" => (compute_eta(n, cfg)?, Some(n), 3 * n - 2),
        "s-le" | "s_le" => {
            let ell = ell.ok_or_else(|| Error::InvalidArgument("s_le needs ℓ".into()))?;
            let expected = if ell >= 2 * n - 1 { 2 * n - 1 } else { 4 * n - 2 - ell };
            (compute_s_le(n, ell, cfg)?, Some(ell), expected)
        }
        other => return Err(Error::InvalidArgument(format!("unknown invariant {other}"))),
    };
    let mut r = SearchReport::new(
        &format!("invariant-{}", kind.replace('_', "-")),
        Params { n: Some(n), ell, ..Params::default() },
    );
    r.value = Some(value.value as u64);
    r.witnesses.push(value.witness.to_string());
    r.counters = value.counters;
    r.verdict = Verdict::from_bool(value.value == expected);
    if value.value != expected {
        r.counterexamples.push(value.witness.to_string());
    }
    r.details = json!({ "expected": expected, "witness_length": value.witness.len() });
    Ok(finish(r, start))
}

pub fn enumerate_report(n: u32, k: u32, cfg: &SearchConfig) -> Result<SearchReport> {
    let start = Instant::now();
    let e = enumerate_extremal(n, k, cfg)?;
    let mut r = SearchReport::new("enumerate", Params { n: Some(n), k: Some(k), ..Params::default() });
    r.orbits = Some(e.reps.len() as u64);
    r.witnesses = e.reps.iter().map(|s| s.to_string()).collect();
    r.counters = e.counters;
    r.details = json!({ "length": 2 * n - 2 + k, "ell": 2 * n - 1 - k });
    Ok(finish(r, start))
}

/// Matches every extremal orbit against the conjectured shapes.
pub fn verify_conjecture(n: u32, k: u32, cfg: &SearchConfig) -> Result<SearchReport> {
    let start = Instant::now();
    let e = enumerate_extremal(n, k, cfg)?;
    let mut r = SearchReport::new("verify-conjecture", Params { n: Some(n), k: Some(k), ..Params::default() });
    let mut matches = Vec::with_capacity(e.reps.len());
    for s in &e.reps {
        let m = match_conjecture(s, k)?;
        if !m.matched {
            r.counterexamples.push(s.to_string());
        }
        matches.push(m);
    }
    r.orbits = Some(e.reps.len() as u64);
    r.witnesses = e.reps.iter().map(|s| s.to_string()).collect();
    r.counters = e.counters;
    r.verdict = Verdict::from_bool(r.counterexamples.is_empty());
    r.details = json!({ "matches": matches });
    if e.reps.is_empty() {
        r.notes.push("no extremal sequences found".into());
    }
    Ok(finish(r, start))
}

/// A named pass/fail line of a composite verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn line(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> CheckLine {
    CheckLine { name: name.into(), passed, detail: detail.into() }
}

/// Block-decomposition checks on one extremal sequence of `C_{mn}²`.
fn decomposition_checks(s: &Sequence, m: u32, n: u32, k_m: u32, k_n: u32, tag: &str) -> Vec<CheckLine> {
    let mut out = Vec::new();
    let basis = standard_basis(s.ctx());
    let d = match block_decompose(s, m, n, k_m, k_n) {
        Ok(d) => d,
        Err(e) => {
            out.push(line(format!("{tag}block_decompose"), false, e.to_string()));
            return out;
        }
    };
    let rep = verify_decomposition(&d);
    for c in &rep.checks {
        out.push(line(format!("{tag}{}", c.name), c.passed, c.detail.clone()));
    }
    associated_checks(&d, basis, tag, &mut out);
    if d.scheme() == Scheme::FreeHead {
        match d.to_augmented() {
            Ok(aug) => {
                let rep = verify_decomposition(&aug);
                out.push(line(
                    format!("{tag}augmented_structure"),
                    rep.passed(),
                    rep.failures().map(|c| c.name).collect::<Vec<_>>().join(", "),
                ));
                associated_checks(&aug, basis, tag, &mut out);
            }
            Err(e) => out.push(line(format!("{tag}augmented_structure"), false, e.to_string())),
        }
    }
    out
}

fn associated_checks(d: &BlockDecomposition, basis: (Element, Element), tag: &str, out: &mut Vec<CheckLine>) {
    let (m, k_m) = (d.m(), d.k_m);
    let augmented = d.kind == crate::decompose::DecompositionKind::Augmented;
    let a = match associated_sequence(d, basis) {
        Ok(a) => a.seq,
        Err(e) => {
            out.push(line(format!("{tag}associated"), false, e.to_string()));
            return;
        }
    };
    // the augmented sequence sits one level up
    let (level, ell) = if augmented { (k_m + 1, 2 * m - 2 - k_m) } else { (k_m, 2 * m - 1 - k_m) };
    let name = if augmented { "associated_augmented" } else { "associated" };
    let want_len = (2 * m - 2 + level) as usize;
    out.push(line(
        format!("{tag}{name}_length"),
        a.len() == want_len,
        format!("|S_σ| = {}, expected {want_len}", a.len()),
    ));
    out.push(line(
        format!("{tag}{name}_extremal"),
        !has_zero_sum_le(&a, ell as usize),
        format!("0 ∉ Σ_≤{ell}({a})"),
    ));
    if level < m && a.len() == want_len {
        let matched = match_conjecture(&a, level).map(|r| r.matched).unwrap_or(false);
        out.push(line(format!("{tag}{name}_conjecture"), matched, format!("{a} at level {level}")));
    }
    if !augmented && d.scheme() == Scheme::IndexedHead && d.k_n == 1 {
        if let Ok(full) = full_associated_sequence(d, basis) {
            let ell = 2 * m - 2 - k_m;
            out.push(line(
                format!("{tag}associated_full_extremal"),
                !has_zero_sum_le(&full.seq, ell as usize),
                format!("0 ∉ Σ_≤{ell}({})", full.seq),
            ));
        }
    }
}

/// Instances of the multiplicative step from `C_m²` and `C_n²` to `C_{mn}²`.
///
/// The construction tier decomposes `e1^{mn-1} e2^{mn-1} (e1+e2)^k`; the
/// exhaustive tier (small `mn`) matches every extremal orbit and decomposes
/// each of them.
pub fn verify_multiplicative(m: u32, n: u32, k_m: u32, k_n: u32, cfg: &SearchConfig) -> Result<SearchReport> {
    let start = Instant::now();
    if m < 2 || n < 2 || k_m >= m || k_n >= n {
        return Err(Error::InvalidArgument(format!(
            "need m, n >= 2, k_m < m, k_n < n; got m = {m}, n = {n}, k_m = {k_m}, k_n = {k_n}"
        )));
    }
    let big = m * n;
    let ctx = GroupCtx::new(big)?;
    let k = k_m * n + k_n;
    let mut r = SearchReport::new(
        "verify-mult",
        Params { m: Some(m), n: Some(n), k_m: Some(k_m), k_n: Some(k_n), k: Some(k), ..Params::default() },
    );

    let (e1, e2) = standard_basis(ctx);
    let s = Sequence::empty(ctx)
        .with(e1, big - 1)?
        .with(e2, big - 1)?
        .with(ctx.add(e1, e2), k)?;
    let mut construction = vec![
        line(
            "extremal",
            !has_zero_sum_le(&s, (2 * big - 1 - k) as usize),
            format!("0 ∉ Σ_≤{}({s})", 2 * big - 1 - k),
        ),
        line("conjecture_form", match_conjecture(&s, k)?.matched, format!("{s} at level {k}")),
    ];
    let hom = crate::group::MulHom::new(ctx, m)?;
    let all_good = s.support().all(|g| is_good_term(&s, &hom, g).unwrap_or(false));
    construction.push(line("good_terms", all_good, "every term is determined by its φ-image"));
    construction.extend(decomposition_checks(&s, m, n, k_m, k_n, ""));

    let mut ok = construction.iter().all(|c| c.passed);
    if !ok {
        r.counterexamples.push(s.to_string());
    }
    r.witnesses.push(s.to_string());

    let exhaustive = if big <= cfg.max_mn_exhaustive && big <= cfg.max_n {
        let e = enumerate_extremal(big, k, cfg)?;
        r.counters.absorb(&e.counters);
        let mut unmatched = Vec::new();
        let mut failed = Vec::new();
        for rep in &e.reps {
            if !match_conjecture(rep, k)?.matched {
                unmatched.push(rep.to_string());
            }
            let bad: Vec<String> = decomposition_checks(rep, m, n, k_m, k_n, "")
                .into_iter()
                .filter(|c| !c.passed)
                .map(|c| c.name)
                .collect();
            if !bad.is_empty() {
                failed.push(json!({ "sequence": rep.to_string(), "failed": bad }));
            }
        }
        ok &= unmatched.is_empty() && failed.is_empty();
        r.counterexamples.extend(unmatched.iter().cloned());
        r.counterexamples.extend(failed.iter().map(|f| f["sequence"].as_str().unwrap_or("").to_string()));
        r.orbits = Some(e.reps.len() as u64);
        json!({
            "status": "run",
            "orbits": e.reps.len(),
            "unmatched": unmatched,
            "decomposition_failures": failed,
        })
    } else {
        r.notes.push(format!(
            "exhaustive tier skipped: mn = {big} exceeds guard {}",
            cfg.max_mn_exhaustive.min(cfg.max_n)
        ));
        json!({ "status": "skipped", "reason": "infeasible" })
    };
    r.verdict = Verdict::from_bool(ok);
    r.details = json!({ "construction": construction, "exhaustive": exhaustive });
    Ok(finish(r, start))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Trial {
    Filtered,
    Satisfied { tight: bool },
    Violated,
}

/// One random instance for the `|Σ_{|G|}(S)|` bound: mostly a heavy element
/// plus a few terms from a small palette, sometimes uniform.
fn hamidoune_instance(ctx: GroupCtx, seed: u64, stream: u64) -> Sequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let n = ctx.n();
    let order = ctx.order();
    let extra = rng.gen_range(0..=n as usize + 2);
    let len = order + 1 + extra;
    let random = |rng: &mut ChaCha8Rng| Element::new(rng.gen_range(0..n), rng.gen_range(0..n));
    if rng.gen_range(0..4) == 0 {
        return Sequence::from_terms(ctx, (0..len).map(|_| random(&mut rng))).expect("in range");
    }
    let heavy = random(&mut rng);
    let lo = order.saturating_sub(6).max(1);
    let h = rng.gen_range(lo..order).min(len);
    let palette: Vec<Element> = (0..rng.gen_range(1..=4)).map(|_| random(&mut rng)).collect();
    let rest = (0..len - h).map(|_| palette[rng.gen_range(0..palette.len())]);
    Sequence::from_terms(ctx, std::iter::repeat_n(heavy, h).chain(rest)).expect("in range")
}

fn hamidoune_trial(s: &Sequence) -> Trial {
    let order = s.ctx().order();
    let h = s.height() as usize;
    let k_max = s.support_len().min((order + 2).saturating_sub(h));
    if s.len() < order + 1 || k_max < 1 {
        return Trial::Filtered;
    }
    let sums = sigma_t(s, order);
    if sums.contains(Element::ZERO) {
        return Trial::Filtered;
    }
    let bound = s.len() as i64 - order as i64 + k_max as i64 - 1;
    let size = sums.len() as i64;
    if size >= bound {
        Trial::Satisfied { tight: size == bound }
    } else {
        Trial::Violated
    }
}

/// Random instances of `|Σ_{|G|}(S)| ≥ |S| - |G| + k - 1` on `C_n ⊕ C_n`,
/// each checked at the largest admissible `k`. Runs until `trials` instances
/// pass the hypotheses.
pub fn verify_hamidoune(n: u32, trials: u64, seed: u64, cfg: &SearchConfig) -> Result<SearchReport> {
    let start = Instant::now();
    let ctx = GroupCtx::new(n)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    cfg.guard("Hamidoune trials", n)?;
    let mut r = SearchReport::new(
        "verify-hamidoune",
        Params { n: Some(n), trials: Some(trials), seed: Some(seed), ..Params::default() },
    );
    let cap = trials.saturating_mul(1000);
    let batch = 4096u64;
    let (mut satisfied, mut filtered, mut violated, mut tight, mut attempts) = (0u64, 0u64, 0u64, 0u64, 0u64);
    while satisfied + violated < trials && attempts < cap {
        let lo = attempts;
        let hi = (lo + batch).min(cap);
        let outcomes: Vec<(Trial, u64)> = cfg.install(|| {
            (lo..hi)
                .into_par_iter()
                .map(|i| (hamidoune_trial(&hamidoune_instance(ctx, seed, i)), i))
                .collect()
        });
        for (t, i) in outcomes {
            if satisfied + violated == trials {
                break;
            }
            attempts = i + 1;
            match t {
                Trial::Filtered => filtered += 1,
                Trial::Satisfied { tight: t } => {
                    satisfied += 1;
                    tight += u64::from(t);
                }
                Trial::Violated => {
                    violated += 1;
                    r.counterexamples.push(hamidoune_instance(ctx, seed, i).to_string());
                }
            }
        }
    }
    if satisfied + violated < trials {
        r.notes.push(format!("attempt cap {cap} reached after {} accepted instances", satisfied + violated));
    }
    r.value = Some(satisfied + violated);
    r.verdict = Verdict::from_bool(violated == 0 && satisfied + violated == trials);
    r.details = json!({
        "attempts": attempts,
        "satisfied": satisfied,
        "filtered": filtered,
        "violated": violated,
        "tight": tight,
    });
    Ok(finish(r, start))
}

/// Every zero-sum orbit with `|S| = sn - 1` and `0 ∉ Σ_{≤n-1}(S)` against
/// the two-branch dichotomy.
pub fn verify_fixedprop(n: u32, s: u32, cfg: &SearchConfig) -> Result<SearchReport> {
    let start = Instant::now();
    if n < 2 || s < 3 {
        return Err(Error::InvalidArgument(format!("need n >= 2 and s >= 3, got n = {n}, s = {s}")));
    }
    let ctx = GroupCtx::new(n)?;
    cfg.guard("fixed-sum enumeration", n)?;
    let len = (s * n - 1) as usize;
    let zero_sum = |q: &Sequence| q.sigma() == Element::ZERO;
    let spec = TreeSpec {
        bound: ZeroBound::Le(n as usize - 1),
        max_len: len,
        collect_len: Some(len),
        leaf_filter: Some(&zero_sum),
        key: format!("fixedprop-{n}-{s}"),
    };
    let t = explore(ctx, &spec, cfg)?;
    let mut r = SearchReport::new("verify-fixedprop", Params { n: Some(n), s: Some(s), ..Params::default() });
    let mut shapes = Vec::new();
    let (mut coset, mut four) = (0u64, 0u64);
    for l in &t.leaves {
        let q = Sequence::from_indices(ctx, l);
        match match_fixed_sum_shape(&q) {
            Some(shape) => {
                match shape {
                    crate::structure::FixedSumShape::CosetSupport { .. } => coset += 1,
                    crate::structure::FixedSumShape::FourTerm { .. } => four += 1,
                }
                shapes.push(json!({ "sequence": q.to_string(), "shape": shape }));
            }
            None => r.counterexamples.push(q.to_string()),
        }
        r.witnesses.push(q.to_string());
    }
    r.orbits = Some(t.leaves.len() as u64);
    r.counters = t.counters;
    r.verdict = Verdict::from_bool(r.counterexamples.is_empty());
    r.details = json!({ "coset_support": coset, "four_term": four, "shapes": shapes });
    if n <= 4 {
        r.notes.push("the four-term branch needs n >= 5".into());
    }
    Ok(finish(r, start))
}

/// Extending a level-`k` extremal sequence by one term, and removing one
/// term from a level-`k+1` one.
pub fn round_trip_lemmas(n: u32, k: u32, cfg: &SearchConfig) -> Result<SearchReport> {
    let start = Instant::now();
    if n < 3 || k < 1 || k + 2 > n {
        return Err(Error::InvalidArgument(format!("need n >= 3 and k in [1, n-2], got n = {n}, k = {k}")));
    }
    let ctx = GroupCtx::new(n)?;
    let mut r = SearchReport::new("lemmas", Params { n: Some(n), k: Some(k), ..Params::default() });
    let lower = enumerate_extremal(n, k, cfg)?;
    let upper = enumerate_extremal(n, k + 1, cfg)?;
    r.counters.absorb(&lower.counters);
    r.counters.absorb(&upper.counters);

    let mut extensions = 0u64;
    for s in &lower.reps {
        for g in ctx.elements() {
            let t = s.with(g, 1)?;
            if has_zero_sum_le(&t, (2 * n - 2 - k) as usize) {
                continue;
            }
            extensions += 1;
            let ok = match_sum_form(&t, k + 1, g).is_some() && match_conjecture(&t, k + 1)?.matched;
            if !ok {
                r.counterexamples.push(format!("extend {s} by {g}"));
            }
        }
    }
    let mut removals = 0u64;
    for u in &upper.reps {
        for g in u.support() {
            let s = u.remove_term(g, 1)?;
            if has_zero_sum_le(&s, (2 * n - 1 - k) as usize) {
                continue;
            }
            removals += 1;
            let ok = match_sum_form(u, k + 1, g).is_some() && match_conjecture(&s, k)?.matched;
            if !ok {
                r.counterexamples.push(format!("remove {g} from {u}"));
            }
        }
    }
    r.verdict = Verdict::from_bool(r.counterexamples.is_empty());
    r.orbits = Some((lower.reps.len() + upper.reps.len()) as u64);
    r.details = json!({
        "lower_orbits": lower.reps.len(),
        "upper_orbits": upper.reps.len(),
        "extensions": extensions,
        "removals": removals,
    });
    if extensions == 0 || removals == 0 {
        r.notes.push("a direction had no admissible instances".into());
    }
    Ok(finish(r, start))
}

/// Decomposes one sequence of `C_{mn}²` and runs every structural check.
///
/// Inputs of the wrong length or with a short zero-sum are rejected with an
/// argument error; on admissible inputs any failed check makes the input a
/// counterexample.
pub fn decompose_report(s: &Sequence, m: u32, n: u32, k_m: u32, k_n: u32, augment: bool) -> Result<SearchReport> {
    let start = Instant::now();
    if m < 2 || n < 2 || k_m >= m || k_n >= n {
        return Err(Error::InvalidArgument(format!(
            "need m, n >= 2, k_m < m, k_n < n; got m = {m}, n = {n}, k_m = {k_m}, k_n = {k_n}"
        )));
    }
    let big = m * n;
    if s.ctx().n() != big {
        return Err(Error::ContextMismatch { expected: big, found: s.ctx().n() });
    }
    let k = k_m * n + k_n;
    let want = (2 * big - 2 + k) as usize;
    if s.len() != want {
        return Err(Error::InvalidArgument(format!("|S| = {}, expected 2mn - 2 + k = {want}", s.len())));
    }
    let ell = (2 * big - 1 - k) as usize;
    if let Some(w) = crate::subsums::find_zero_sum_le(s, ell, crate::subsums::WitnessMode::Shortest) {
        return Err(Error::InvalidArgument(format!("S has the zero-sum subsequence {w} of length <= {ell}")));
    }
    let mut r = SearchReport::new(
        "decompose",
        Params { m: Some(m), n: Some(n), k_m: Some(k_m), k_n: Some(k_n), k: Some(k), ..Params::default() },
    );
    let basis = standard_basis(s.ctx());
    let d = match block_decompose(s, m, n, k_m, k_n) {
        Ok(d) => d,
        Err(Error::DecompositionFailed { blocks_found, blocks_needed, remainder, blocks }) => {
            r.verdict = Verdict::Fail;
            r.counterexamples.push(s.to_string());
            r.details = json!({
                "failure": {
                    "blocks_found": blocks_found,
                    "blocks_needed": blocks_needed,
                    "remainder": remainder,
                    "blocks": blocks,
                }
            });
            return Ok(finish(r, start));
        }
        Err(e) => return Err(e),
    };
    let d = if augment {
        if d.scheme() != Scheme::FreeHead {
            return Err(Error::InvalidArgument("the augmented form needs k_n >= 2".into()));
        }
        d.to_augmented()?
    } else {
        d
    };
    let mut checks: Vec<CheckLine> = verify_decomposition(&d)
        .checks
        .into_iter()
        .map(|c| line(c.name, c.passed, c.detail))
        .collect();
    associated_checks(&d, basis, "", &mut checks);
    let ok = checks.iter().all(|c| c.passed);
    if !ok {
        r.counterexamples.push(s.to_string());
    }
    r.verdict = Verdict::from_bool(ok);
    r.witnesses.push(d.head.to_string());
    r.witnesses.extend(d.blocks.iter().map(|b| b.to_string()));
    r.details = json!({ "decomposition": crate::decompose::DecompositionSummary::new(&d, basis), "checks": checks });
    Ok(finish(r, start))
}

/// Statistics, zero-sum class and structural properties of one sequence.
/// A sequence of length `2n - 2 + k` with no zero-sum of length
/// `≤ 2n - 1 - k` that misses every conjectured shape is a counterexample.
pub fn classify_report(s: &Sequence) -> Result<SearchReport> {
    let start = Instant::now();
    let n = s.ctx().n();
    let mut r = SearchReport::new("classify", Params { n: Some(n), ..Params::default() });
    let st = s.stats();
    let mut details = json!({
        "sequence": s.to_string(),
        "length": st.length,
        "height": st.height,
        "support": st.support,
        "sigma": st.sigma,
        "class": crate::subsums::zero_sum_classify(s),
        "property_a": crate::structure::has_property_a(s).is_some(),
        "property_b": crate::structure::property_b(s),
        "property_c": crate::structure::has_property_c(s),
    });
    let base = 2 * n as usize - 2;
    if n >= 2 && s.len() >= base && s.len() < base + n as usize {
        let k = (s.len() - base) as u32;
        let ell = (2 * n - 1 - k) as usize;
        let extremal = !has_zero_sum_le(s, ell);
        details["k"] = json!(k);
        details["extremal"] = json!(extremal);
        r.params.k = Some(k);
        if extremal {
            let m = match_conjecture(s, k)?;
            if !m.matched {
                r.counterexamples.push(s.to_string());
            }
            details["conjecture"] = serde_json::to_value(&m).expect("serializes");
        }
    }
    r.verdict = Verdict::from_bool(r.counterexamples.is_empty());
    r.witnesses.push(s.to_string());
    r.details = details;
    Ok(finish(r, start))
}
