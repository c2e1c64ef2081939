//! Sequences over `C_n ⊕ C_n`: finite unordered multisets of elements.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::group::{AutMatrix, Element, GroupCtx, MulHom};

/// A finite multiset of elements of one group.
///
/// Support is kept sorted, so iteration and the text form are canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence {
    ctx: GroupCtx,
    mults: BTreeMap<Element, u32>,
}

/// Length, height, support size and sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stats {
    pub length: usize,
    pub height: u32,
    pub support: usize,
    pub sigma: Element,
}

/// A map a sequence can be pushed through term by term.
pub trait GroupMap {
    fn source(&self) -> GroupCtx;
    fn target(&self) -> GroupCtx;
    fn map(&self, x: Element) -> Element;
}

impl GroupMap for AutMatrix {
    fn source(&self) -> GroupCtx {
        self.ctx()
    }
    fn target(&self) -> GroupCtx {
        self.ctx()
    }
    fn map(&self, x: Element) -> Element {
        self.apply(x)
    }
}

/// `φ(x) = m·x`, landing back in the source group.
impl GroupMap for MulHom {
    fn source(&self) -> GroupCtx {
        MulHom::source(self)
    }
    fn target(&self) -> GroupCtx {
        MulHom::source(self)
    }
    fn map(&self, x: Element) -> Element {
        self.apply(x)
    }
}

/// `φ` followed by the identification `mG ≅ C_n ⊕ C_n`.
#[derive(Debug, Clone, Copy)]
pub struct Projection<'a>(pub &'a MulHom);

impl GroupMap for Projection<'_> {
    fn source(&self) -> GroupCtx {
        self.0.source()
    }
    fn target(&self) -> GroupCtx {
        self.0.image_ctx()
    }
    fn map(&self, x: Element) -> Element {
        self.0.project(x)
    }
}

impl Sequence {
    pub fn empty(ctx: GroupCtx) -> Sequence {
        Sequence {
            ctx,
            mults: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = Element>>(ctx: GroupCtx, terms: I) -> Result<Sequence> {
        let mut s = Sequence::empty(ctx);
        for x in terms {
            s.push(ctx.check(x)?, 1);
        }
        Ok(s)
    }

    pub fn from_counts<I: IntoIterator<Item = (Element, u32)>>(
        ctx: GroupCtx,
        counts: I,
    ) -> Result<Sequence> {
        let mut s = Sequence::empty(ctx);
        for (x, k) in counts {
            s.push(ctx.check(x)?, k);
        }
        Ok(s)
    }

    /// Terms given by lexicographic element indices.
    pub fn from_indices(ctx: GroupCtx, idx: &[u16]) -> Sequence {
        let mut s = Sequence::empty(ctx);
        for &i in idx {
            s.push(ctx.element_at(i as usize), 1);
        }
        s
    }

    fn push(&mut self, x: Element, k: u32) {
        if k > 0 {
            *self.mults.entry(x).or_insert(0) += k;
        }
    }

    /// Parses the whitespace-separated term grammar, e.g. `"(1,0)^2 (0,1)"`.
    pub fn parse(ctx: GroupCtx, text: &str) -> Result<Sequence> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let mut s = Sequence::empty(ctx);
        p.skip_ws();
        while !p.done() {
            let start = p.pos;
            p.expect(b'(')?;
            let a = p.int()?;
            p.expect(b',')?;
            let b = p.int()?;
            p.expect(b')')?;
            let mut k = 1;
            if p.peek() == Some(b'^') {
                p.pos += 1;
                let exp_pos = p.pos;
                k = p.int()?;
                if k == 0 {
                    return Err(Error::Syntax {
                        pos: exp_pos,
                        msg: "exponent must be at least 1".into(),
                    });
                }
            }
            for v in [a, b] {
                if v >= ctx.n() as u64 {
                    return Err(Error::OutOfRange { value: v, n: ctx.n() });
                }
            }
            let k = u32::try_from(k).map_err(|_| Error::Syntax {
                pos: start,
                msg: "exponent too large".into(),
            })?;
            s.push(Element::new(a as u32, b as u32), k);
            match p.peek() {
                None => {}
                Some(c) if c.is_ascii_whitespace() => p.skip_ws(),
                Some(c) => {
                    return Err(Error::Syntax {
                        pos: p.pos,
                        msg: format!("expected whitespace between terms, found {:?}", c as char),
                    })
                }
            }
        }
        Ok(s)
    }

    pub fn ctx(&self) -> GroupCtx {
        self.ctx
    }

    pub fn len(&self) -> usize {
        self.mults.values().map(|&k| k as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.mults.is_empty()
    }

    pub fn multiplicity(&self, x: Element) -> u32 {
        self.mults.get(&x).copied().unwrap_or(0)
    }

    pub fn height(&self) -> u32 {
        self.mults.values().copied().max().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = Element> + '_ {
        self.mults.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.mults.len()
    }

    pub fn contains(&self, x: Element) -> bool {
        self.mults.contains_key(&x)
    }

    /// `(element, multiplicity)` pairs in lexicographic order.
    pub fn counts(&self) -> impl Iterator<Item = (Element, u32)> + '_ {
        self.mults.iter().map(|(&x, &k)| (x, k))
    }

    /// Every term with repetition, sorted.
    pub fn terms(&self) -> impl Iterator<Item = Element> + '_ {
        self.counts()
            .flat_map(|(x, k)| std::iter::repeat_n(x, k as usize))
    }

    pub fn indices(&self) -> Vec<u16> {
        self.terms().map(|x| self.ctx.index(x) as u16).collect()
    }

    pub fn sigma(&self) -> Element {
        self.counts()
            .fold(Element::ZERO, |acc, (x, k)| self.ctx.add(acc, self.ctx.scale(k as i64, x)))
    }

    pub fn stats(&self) -> Stats {
        Stats {
            length: self.len(),
            height: self.height(),
            support: self.support_len(),
            sigma: self.sigma(),
        }
    }

    /// `S·T`.
    pub fn concat(&self, other: &Sequence) -> Result<Sequence> {
        self.ctx.same_as(other.ctx)?;
        let mut s = self.clone();
        for (x, k) in other.counts() {
            s.push(x, k);
        }
        Ok(s)
    }

    pub fn with(&self, x: Element, k: u32) -> Result<Sequence> {
        let mut s = self.clone();
        s.push(self.ctx.check(x)?, k);
        Ok(s)
    }

    /// `S·T^{[-1]}`; fails unless `T | S`.
    pub fn remove(&self, other: &Sequence) -> Result<Sequence> {
        self.ctx.same_as(other.ctx)?;
        let mut s = self.clone();
        for (x, k) in other.counts() {
            s.take(x, k)?;
        }
        Ok(s)
    }

    /// `S·(x^{[k]})^{[-1]}`.
    pub fn remove_term(&self, x: Element, k: u32) -> Result<Sequence> {
        let mut s = self.clone();
        s.take(x, k)?;
        Ok(s)
    }

    fn take(&mut self, x: Element, k: u32) -> Result<()> {
        let have = self.multiplicity(x);
        if have < k {
            return Err(Error::NotSubsequence(format!("{x}^{k}"), x));
        }
        if have == k {
            self.mults.remove(&x);
        } else if k > 0 {
            self.mults.insert(x, have - k);
        }
        Ok(())
    }

    pub fn divides(&self, other: &Sequence) -> bool {
        self.ctx == other.ctx && self.counts().all(|(x, k)| other.multiplicity(x) >= k)
    }

    /// Image of every term under `f`; equal images merge.
    pub fn apply_map<F: GroupMap>(&self, f: &F) -> Result<Sequence> {
        f.source().same_as(self.ctx)?;
        let mut s = Sequence::empty(f.target());
        for (x, k) in self.counts() {
            s.push(f.map(x), k);
        }
        Ok(s)
    }

    /// Image under an automorphism, skipping the context check.
    pub fn map_aut(&self, aut: &AutMatrix) -> Sequence {
        let mut s = Sequence::empty(self.ctx);
        for (x, k) in self.counts() {
            s.push(aut.apply(x), k);
        }
        s
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, k)) in self.counts().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if k == 1 {
                write!(f, "{x}")?;
            } else {
                write!(f, "{x}^{k}")?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn done(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Syntax {
                pos: self.pos,
                msg: match self.peek() {
                    Some(f) => format!("expected {:?}, found {:?}", c as char, f as char),
                    None => format!("expected {:?}, found end of input", c as char),
                },
            })
        }
    }

    fn int(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Syntax {
                pos: start,
                msg: "expected a non-negative integer".into(),
            });
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Syntax {
                pos: start,
                msg: "integer too large".into(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::enumerate_automorphisms;
    use proptest::prelude::*;

    fn ctx(n: u32) -> GroupCtx {
        GroupCtx::new(n).unwrap()
    }

    fn e(a: u32, b: u32) -> Element {
        Element::new(a, b)
    }

    fn seq(n: u32, s: &str) -> Sequence {
        Sequence::parse(ctx(n), s).unwrap()
    }

    #[test]
    fn parse_examples() {
        let s = seq(3, "(1,0)^2 (0,1)");
        assert_eq!(s.multiplicity(e(1, 0)), 2);
        assert_eq!(s.multiplicity(e(0, 1)), 1);
        assert_eq!(s.support_len(), 2);

        let s = seq(3, "(1,0) (1,0)^1");
        assert_eq!(s.multiplicity(e(1, 0)), 2);
        assert_eq!(s.support_len(), 1);

        assert!(matches!(
            Sequence::parse(ctx(2), "(2,0)"),
            Err(Error::OutOfRange { value: 2, n: 2 })
        ));
    }

    #[test]
    fn parse_errors_carry_position() {
        match Sequence::parse(ctx(5), "(1,0) (1;0)") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 8),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            Sequence::parse(ctx(5), "(1,0)^0"),
            Err(Error::Syntax { pos: 6, .. })
        ));
        assert!(Sequence::parse(ctx(5), "(1,0)(0,1)").is_err());
        assert!(Sequence::parse(ctx(5), "(-1,0)").is_err());
    }

    #[test]
    fn empty_text_is_empty_sequence() {
        let s = seq(4, "   ");
        assert!(s.is_empty());
        assert_eq!(s.to_string(), "");
    }

    #[test]
    fn canonical_text() {
        assert_eq!(seq(5, "(0,1) (1,0)^1 (0,1)").to_string(), "(0,1)^2 (1,0)");
    }

    #[test]
    fn edit_examples() {
        let s = seq(3, "(1,0)^2 (0,1)");
        assert_eq!(s.remove(&seq(3, "(1,0)")).unwrap(), seq(3, "(1,0) (0,1)"));
        let s = seq(3, "(1,0)");
        assert_eq!(s.concat(&seq(3, "(1,0)^2")).unwrap(), seq(3, "(1,0)^3"));
        match s.remove(&seq(3, "(0,1)")) {
            Err(Error::NotSubsequence(_, x)) => assert_eq!(x, e(0, 1)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            s.concat(&seq(4, "(1,0)")),
            Err(Error::ContextMismatch { .. })
        ));
    }

    #[test]
    fn stats_examples() {
        let s = seq(4, "(1,0)^3 (0,1)^3 (1,1)^2");
        assert_eq!(
            s.stats(),
            Stats { length: 8, height: 3, support: 3, sigma: e(1, 1) }
        );
        let direct = s.terms().fold((0, 0), |(a, b), x| (a + x.a, b + x.b));
        assert_eq!((direct.0 % 4, direct.1 % 4), (1, 1));

        let s = Sequence::empty(ctx(4));
        assert_eq!(s.stats(), Stats { length: 0, height: 0, support: 0, sigma: e(0, 0) });

        assert_eq!(seq(2, "(1,1)^2").sigma(), e(0, 0));
    }

    #[test]
    fn map_examples() {
        let h = MulHom::new(ctx(4), 2).unwrap();
        let img = seq(4, "(1,0)^3 (3,0)").apply_map(&h).unwrap();
        assert_eq!(img, seq(4, "(2,0)^4"));
        let proj = seq(4, "(1,0)^3 (3,0)").apply_map(&Projection(&h)).unwrap();
        assert_eq!(proj, seq(2, "(1,0)^4"));

        for aut in enumerate_automorphisms(ctx(3), 12).unwrap() {
            assert!(Sequence::empty(ctx(3)).apply_map(&aut).unwrap().is_empty());
        }

        let swap = AutMatrix::new(ctx(3), 0, 1, 1, 0).unwrap();
        assert_eq!(
            seq(3, "(1,0)^2 (0,1)").apply_map(&swap).unwrap(),
            seq(3, "(0,1)^2 (1,0)")
        );
        assert!(seq(4, "(1,0)").apply_map(&swap).is_err());
    }

    fn arb_seq(n: u32, max_len: usize) -> impl Strategy<Value = Sequence> {
        prop::collection::vec((0..n, 0..n), 0..=max_len).prop_map(move |v| {
            Sequence::from_terms(ctx(n), v.into_iter().map(|(a, b)| e(a, b))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(s in (1u32..8).prop_flat_map(|n| arb_seq(n, 12))) {
            let text = s.to_string();
            let back = Sequence::parse(s.ctx(), &text).unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(back.to_string(), text);
        }

        #[test]
        fn sigma_is_additive(s in arb_seq(5, 10), t in arb_seq(5, 10)) {
            let c = s.ctx();
            let st = s.concat(&t).unwrap();
            prop_assert_eq!(st.sigma(), c.add(s.sigma(), t.sigma()));
            let back = st.remove(&t).unwrap();
            prop_assert_eq!(back.sigma(), c.sub(st.sigma(), t.sigma()));
            prop_assert_eq!(back, s);
        }

        #[test]
        fn automorphisms_preserve_shape(s in arb_seq(4, 10), pick in 0usize..96) {
            let aut = enumerate_automorphisms(ctx(4), 12).unwrap()[pick];
            let img = s.apply_map(&aut).unwrap();
            prop_assert_eq!(img.len(), s.len());
            prop_assert_eq!(img.height(), s.height());
            prop_assert_eq!(img.support_len(), s.support_len());
        }
    }
}
