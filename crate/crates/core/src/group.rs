//! Arithmetic in `C_n ⊕ C_n`.
//!
//! Elements are residue pairs `(a, b)` with both coordinates reduced into
//! `[0, n)`. Bases and basis changes are realized by [`AutMatrix`], and the
//! multiplication-by-`m` map on `C_{mn} ⊕ C_{mn}` by [`MulHom`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus. Sum sets keep one `u64` word per row.
pub const MAX_MODULUS: u32 = 64;

/// Default bound on `n` for enumerating `GL_2(Z_n)`.
pub const DEFAULT_AUT_GUARD: u32 = 12;

/// The group `C_n ⊕ C_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupCtx {
    n: u32,
}

/// A residue pair in some `C_n ⊕ C_n`. Ordered lexicographically by `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Element {
    pub a: u32,
    pub b: u32,
}

pub fn gcd(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        let t = x % y;
        x = y;
        y = t;
    }
    x
}

impl Element {
    pub const ZERO: Element = Element { a: 0, b: 0 };

    pub const fn new(a: u32, b: u32) -> Element {
        Element { a, b }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl FromStr for Element {
    type Err = Error;

    /// Parses `"(a,b)"` without range checking.
    fn from_str(s: &str) -> Result<Element> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Syntax {
                pos: 0,
                msg: format!("expected \"(a,b)\", got {t:?}"),
            })?;
        let (a, b) = inner.split_once(',').ok_or_else(|| Error::Syntax {
            pos: 0,
            msg: format!("missing ',' in {t:?}"),
        })?;
        let parse = |x: &str| {
            x.trim().parse::<u32>().map_err(|_| Error::Syntax {
                pos: 0,
                msg: format!("bad coordinate {x:?}"),
            })
        };
        Ok(Element::new(parse(a)?, parse(b)?))
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Element, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Checked element operation, see [`GroupCtx::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementOp {
    Add(Element, Element),
    Neg(Element),
    Scalar(i64, Element),
}

impl GroupCtx {
    pub fn new(n: u32) -> Result<GroupCtx> {
        if n == 0 {
            return Err(Error::InvalidArgument("modulus must be at least 1".into()));
        }
        if n > MAX_MODULUS {
            return Err(Error::Infeasible {
                what: "group modulus",
                n,
                guard: MAX_MODULUS,
            });
        }
        Ok(GroupCtx { n })
    }

    #[inline]
    pub fn n(self) -> u32 {
        self.n
    }

    /// `|G| = n²`.
    #[inline]
    pub fn order(self) -> usize {
        (self.n * self.n) as usize
    }

    pub fn contains(self, x: Element) -> bool {
        x.a < self.n && x.b < self.n
    }

    pub fn check(self, x: Element) -> Result<Element> {
        for v in [x.a, x.b] {
            if v >= self.n {
                return Err(Error::OutOfRange {
                    value: v as u64,
                    n: self.n,
                });
            }
        }
        Ok(x)
    }

    pub fn element(self, a: u32, b: u32) -> Result<Element> {
        self.check(Element::new(a, b))
    }

    /// Reduces arbitrary integers into the group.
    pub fn reduce(self, a: i64, b: i64) -> Element {
        let n = self.n as i64;
        Element::new(a.rem_euclid(n) as u32, b.rem_euclid(n) as u32)
    }

    #[inline]
    pub fn add(self, x: Element, y: Element) -> Element {
        debug_assert!(self.contains(x) && self.contains(y));
        let n = self.n;
        let a = x.a + y.a;
        let b = x.b + y.b;
        Element::new(if a >= n { a - n } else { a }, if b >= n { b - n } else { b })
    }

    #[inline]
    pub fn neg(self, x: Element) -> Element {
        debug_assert!(self.contains(x));
        let n = self.n;
        Element::new((n - x.a) % n, (n - x.b) % n)
    }

    #[inline]
    pub fn sub(self, x: Element, y: Element) -> Element {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn scale(self, c: i64, x: Element) -> Element {
        self.reduce(c * x.a as i64, c * x.b as i64)
    }

    /// Range-checked arithmetic.
    pub fn apply(self, op: ElementOp) -> Result<Element> {
        match op {
            ElementOp::Add(x, y) => Ok(self.add(self.check(x)?, self.check(y)?)),
            ElementOp::Neg(x) => Ok(self.neg(self.check(x)?)),
            ElementOp::Scalar(c, x) => Ok(self.scale(c, self.check(x)?)),
        }
    }

    /// Position of `x` in the lexicographic order, `a·n + b`.
    #[inline]
    pub fn index(self, x: Element) -> usize {
        (x.a * self.n + x.b) as usize
    }

    #[inline]
    pub fn element_at(self, i: usize) -> Element {
        let i = i as u32;
        Element::new(i / self.n, i % self.n)
    }

    /// All `n²` elements in lexicographic order.
    pub fn elements(self) -> impl Iterator<Item = Element> {
        (0..self.order()).map(move |i| self.element_at(i))
    }

    /// Additive order of `x`.
    pub fn element_order(self, x: Element) -> u32 {
        let n = self.n as u64;
        let g = gcd(gcd(x.a as u64, x.b as u64), n);
        (n / g) as u32
    }

    pub fn is_unit(self, d: i64) -> bool {
        gcd(d.rem_euclid(self.n as i64) as u64, self.n as u64) == 1
    }

    /// `(e1, e2)` is a basis iff the coordinate matrix has unit determinant.
    pub fn is_basis(self, e1: Element, e2: Element) -> bool {
        let d = e1.a as i64 * e2.b as i64 - e2.a as i64 * e1.b as i64;
        self.is_unit(d)
    }

    pub fn checked_is_basis(self, e1: Element, e2: Element) -> Result<bool> {
        Ok(self.is_basis(self.check(e1)?, self.check(e2)?))
    }

    /// Element `u·e1 + v·e2`.
    pub fn combine(self, u: i64, e1: Element, v: i64, e2: Element) -> Element {
        self.add(self.scale(u, e1), self.scale(v, e2))
    }

    pub fn same_as(self, other: GroupCtx) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ContextMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

impl fmt::Display for GroupCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C_{0} + C_{0}", self.n)
    }
}

/// Multiplicative inverse of `x` modulo `n`, if it exists.
pub fn inverse_mod(x: i64, n: i64) -> Option<i64> {
    let (mut r0, mut r1) = (n, x.rem_euclid(n));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return if n == 1 { Some(0) } else { None };
    }
    Some(t0.rem_euclid(n))
}

/// An element of `GL_2(Z_n)` acting by `(a, b) ↦ (pa + qb, ra + sb)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AutMatrix {
    n: u32,
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub s: u32,
}

impl AutMatrix {
    pub fn new(ctx: GroupCtx, p: u32, q: u32, r: u32, s: u32) -> Result<AutMatrix> {
        for v in [p, q, r, s] {
            ctx.check(Element::new(v, 0))?;
        }
        let m = AutMatrix { n: ctx.n, p, q, r, s };
        if !ctx.is_unit(m.det()) {
            return Err(Error::InvalidArgument(format!(
                "{m} has non-unit determinant mod {}",
                ctx.n
            )));
        }
        Ok(m)
    }

    pub fn identity(ctx: GroupCtx) -> AutMatrix {
        AutMatrix {
            n: ctx.n,
            p: 1 % ctx.n,
            q: 0,
            r: 0,
            s: 1 % ctx.n,
        }
    }

    /// The automorphism sending the standard basis to `(e1, e2)`.
    pub fn from_basis(ctx: GroupCtx, e1: Element, e2: Element) -> Result<AutMatrix> {
        AutMatrix::new(ctx, e1.a, e2.a, e1.b, e2.b)
    }

    pub fn ctx(&self) -> GroupCtx {
        GroupCtx { n: self.n }
    }

    pub fn det(&self) -> i64 {
        self.p as i64 * self.s as i64 - self.q as i64 * self.r as i64
    }

    #[inline]
    pub fn apply(&self, x: Element) -> Element {
        let n = self.n as u64;
        let (a, b) = (x.a as u64, x.b as u64);
        Element::new(
            ((self.p as u64 * a + self.q as u64 * b) % n) as u32,
            ((self.r as u64 * a + self.s as u64 * b) % n) as u32,
        )
    }

    pub fn compose(&self, other: &AutMatrix) -> AutMatrix {
        let n = self.n as u64;
        let (p, q, r, s) = (self.p as u64, self.q as u64, self.r as u64, self.s as u64);
        let (p2, q2, r2, s2) = (other.p as u64, other.q as u64, other.r as u64, other.s as u64);
        AutMatrix {
            n: self.n,
            p: ((p * p2 + q * r2) % n) as u32,
            q: ((p * q2 + q * s2) % n) as u32,
            r: ((r * p2 + s * r2) % n) as u32,
            s: ((r * q2 + s * s2) % n) as u32,
        }
    }

    pub fn inverse(&self) -> AutMatrix {
        let n = self.n as i64;
        let d = inverse_mod(self.det(), n).expect("automorphism has unit determinant");
        let red = |v: i64| (v * d).rem_euclid(n) as u32;
        AutMatrix {
            n: self.n,
            p: red(self.s as i64),
            q: red(-(self.q as i64)),
            r: red(-(self.r as i64)),
            s: red(self.p as i64),
        }
    }
}

impl fmt::Display for AutMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.p, self.q, self.r, self.s)
    }
}

/// All of `GL_2(Z_n)`, in lexicographic order of `(p, q, r, s)`.
pub fn enumerate_automorphisms(ctx: GroupCtx, guard: u32) -> Result<Vec<AutMatrix>> {
    if ctx.n > guard {
        return Err(Error::Infeasible {
            what: "automorphism enumeration",
            n: ctx.n,
            guard,
        });
    }
    let n = ctx.n;
    let mut out = Vec::new();
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let m = AutMatrix { n, p, q, r, s };
                    if ctx.is_unit(m.det()) {
                        out.push(m);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Multiplication by `m` on `C_{mn} ⊕ C_{mn}`.
///
/// The image `mG` is identified with `C_n ⊕ C_n` through `m·y ↦ y mod n`, so
/// [`MulHom::project`] is `x ↦ x mod n`. The kernel is `nG ≅ C_m ⊕ C_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MulHom {
    source: GroupCtx,
    m: u32,
    n: u32,
}

impl MulHom {
    pub fn new(source: GroupCtx, m: u32) -> Result<MulHom> {
        if m == 0 || !source.n.is_multiple_of(m) {
            return Err(Error::InvalidArgument(format!(
                "multiplier {m} does not divide modulus {}",
                source.n
            )));
        }
        Ok(MulHom {
            source,
            m,
            n: source.n / m,
        })
    }

    pub fn source(&self) -> GroupCtx {
        self.source
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `C_n ⊕ C_n`, the image coordinates.
    pub fn image_ctx(&self) -> GroupCtx {
        GroupCtx { n: self.n }
    }

    /// `C_m ⊕ C_m`, the kernel coordinates.
    pub fn kernel_ctx(&self) -> GroupCtx {
        GroupCtx { n: self.m }
    }

    /// `φ(x) = m·x` inside the source group.
    pub fn apply(&self, x: Element) -> Element {
        self.source.scale(self.m as i64, x)
    }

    /// `φ(x)` in image coordinates.
    pub fn project(&self, x: Element) -> Element {
        Element::new(x.a % self.n, x.b % self.n)
    }

    pub fn in_kernel(&self, x: Element) -> bool {
        self.apply(x) == Element::ZERO
    }

    pub fn kernel(&self) -> Vec<Element> {
        self.source.elements().filter(|&x| self.in_kernel(x)).collect()
    }

    /// Coordinates `(u, v) ∈ C_m ⊕ C_m` with `x = u·(n E1) + v·(n E2)`.
    pub fn kernel_coords(&self, basis: (Element, Element), x: Element) -> Result<Element> {
        let ctx = self.source;
        let (e1, e2) = (ctx.check(basis.0)?, ctx.check(basis.1)?);
        let x = ctx.check(x)?;
        if !ctx.is_basis(e1, e2) {
            return Err(Error::InvalidArgument(format!("({e1},{e2}) is not a basis")));
        }
        if !self.in_kernel(x) {
            return Err(Error::NotInKernel(x));
        }
        // Solve x = c1·e1 + c2·e2 with the inverse coordinate matrix; both
        // coefficients are then multiples of n.
        let inv = AutMatrix::from_basis(ctx, e1, e2)?.inverse();
        let c = inv.apply(x);
        let n = self.n;
        if c.a % n != 0 || c.b % n != 0 {
            return Err(Error::Invariant(format!(
                "kernel element {x} has coefficients {c} not divisible by {n}"
            )));
        }
        Ok(Element::new((c.a / n) % self.m, (c.b / n) % self.m))
    }

    /// Inverse of [`MulHom::kernel_coords`].
    pub fn kernel_element(&self, basis: (Element, Element), coords: Element) -> Element {
        let ctx = self.source;
        let n = self.n as i64;
        ctx.combine(n * coords.a as i64, basis.0, n * coords.b as i64, basis.1)
    }
}

/// Standard basis `((1,0), (0,1))`.
pub fn standard_basis(ctx: GroupCtx) -> (Element, Element) {
    let one = 1 % ctx.n();
    (Element::new(one, 0), Element::new(0, one))
}
