//! The ground set `E = [n] ∪ [n]*`, its admissible subsets and transversals.
//!
//! Subsets are bitmasks: bit `i` is the element `i+1`, bit `n+i` is `(i+1)*`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::bail;
use crate::{Error, Result};

pub const MAX_N: usize = 16;

/// An element of E. Ordered as 1 < 2 < … < n < 1* < … < n*.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub starred: bool,
    /// Zero-based position, so `pos = 0` is the element 1 or 1*.
    pub pos: u8,
}

impl Element {
    pub fn plain(pos: u8) -> Element {
        Element { starred: false, pos }
    }

    pub fn star(pos: u8) -> Element {
        Element { starred: true, pos }
    }

    /// The partner under the involution `*`.
    pub fn dual(self) -> Element {
        Element { starred: !self.starred, pos: self.pos }
    }

    /// Parses `3` or `3*`.
    pub fn parse(n: usize, s: &str) -> Result<Element> {
        let s = s.trim();
        let (num, starred) = match s.strip_suffix('*') {
            Some(r) => (r, true),
            None => (s, false),
        };
        let k: usize = num.parse().map_err(|_| Error::Parse(format!("bad element {s:?}")))?;
        if k == 0 || k > n {
            bail!(Parse, "element {s:?} outside the ground set of size {n}");
        }
        Ok(Element { starred, pos: (k - 1) as u8 })
    }

    /// Bit index in a subset mask over a ground set with `n` pairs.
    pub fn bit(self, n: usize) -> u32 {
        self.pos as u32 + if self.starred { n as u32 } else { 0 }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.pos + 1, if self.starred { "*" } else { "" })
    }
}

fn low(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// A subset of E (not necessarily admissible).
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ESet {
    n: u8,
    mask: u32,
}

impl ESet {
    pub fn empty(n: usize) -> ESet {
        assert!(n <= MAX_N, "ground sets are limited to {MAX_N} pairs");
        ESet { n: n as u8, mask: 0 }
    }

    pub fn from_mask(n: usize, mask: u32) -> ESet {
        assert!(n <= MAX_N, "ground sets are limited to {MAX_N} pairs");
        debug_assert!(mask & !low(2 * n) == 0);
        ESet { n: n as u8, mask }
    }

    /// The subset with the given unstarred and starred positions.
    pub fn from_parts(n: usize, unstarred: u32, starred: u32) -> ESet {
        Self::from_mask(n, unstarred | (starred << n))
    }

    pub fn from_elements<I: IntoIterator<Item = Element>>(n: usize, it: I) -> ESet {
        let mut s = ESet::empty(n);
        for e in it {
            s = s.with(e);
        }
        s
    }

    /// Parses a whitespace-separated element list; `-` is the empty set.
    pub fn parse(n: usize, s: &str) -> Result<ESet> {
        let s = s.trim();
        if s == "-" {
            return Ok(ESet::empty(n));
        }
        let mut out = ESet::empty(n);
        for tok in s.split_whitespace() {
            let e = Element::parse(n, tok)?;
            if out.contains(e) {
                bail!(Parse, "element {e} repeated in {s:?}");
            }
            out = out.with(e);
        }
        Ok(out)
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    pub fn mask(self) -> u32 {
        self.mask
    }

    /// Positions of the unstarred elements.
    pub fn unstarred(self) -> u32 {
        self.mask & low(self.n())
    }

    /// Positions of the starred elements.
    pub fn starred(self) -> u32 {
        self.mask >> self.n
    }

    /// Positions touched by the set.
    pub fn positions(self) -> u32 {
        self.unstarred() | self.starred()
    }

    pub fn contains(self, e: Element) -> bool {
        self.mask >> e.bit(self.n()) & 1 == 1
    }

    pub fn with(self, e: Element) -> ESet {
        ESet { n: self.n, mask: self.mask | 1 << e.bit(self.n()) }
    }

    pub fn without(self, e: Element) -> ESet {
        ESet { n: self.n, mask: self.mask & !(1 << e.bit(self.n())) }
    }

    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    /// Image under the involution `*`.
    pub fn star(self) -> ESet {
        ESet::from_parts(self.n(), self.starred(), self.unstarred())
    }

    pub fn sym_diff(self, o: ESet) -> ESet {
        ESet { n: self.n, mask: self.mask ^ o.mask }
    }

    pub fn union(self, o: ESet) -> ESet {
        ESet { n: self.n, mask: self.mask | o.mask }
    }

    pub fn intersect(self, o: ESet) -> ESet {
        ESet { n: self.n, mask: self.mask & o.mask }
    }

    pub fn minus(self, o: ESet) -> ESet {
        ESet { n: self.n, mask: self.mask & !o.mask }
    }

    pub fn is_subset(self, o: ESet) -> bool {
        self.mask & !o.mask == 0
    }

    /// A set is admissible (a subtransversal) when it meets each pair at most once.
    pub fn is_admissible(self) -> bool {
        self.unstarred() & self.starred() == 0
    }

    /// Number of pairs `{x, x*}` contained in the set.
    pub fn divergences(self) -> usize {
        (self.unstarred() & self.starred()).count_ones() as usize
    }

    pub fn is_transversal(self) -> bool {
        self.is_admissible() && self.positions() == low(self.n())
    }

    /// Elements in increasing order.
    pub fn iter(self) -> impl Iterator<Item = Element> {
        let n = self.n();
        (0..2 * n as u32).filter(move |b| self.mask >> b & 1 == 1).map(move |b| {
            if (b as usize) < n {
                Element::plain(b as u8)
            } else {
                Element::star((b as usize - n) as u8)
            }
        })
    }

    pub fn elements(self) -> Vec<Element> {
        self.iter().collect()
    }

    pub fn min_element(self) -> Option<Element> {
        self.iter().next()
    }
}

impl fmt::Display for ESet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        let mut first = true;
        for e in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// A transversal, stored as the mask of starred positions.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transversal {
    n: u8,
    starred: u32,
}

impl Transversal {
    pub fn new(n: usize, starred: u32) -> Transversal {
        assert!(n <= MAX_N, "ground sets are limited to {MAX_N} pairs");
        debug_assert!(starred & !low(n) == 0);
        Transversal { n: n as u8, starred }
    }

    /// `[n]`.
    pub fn unstarred_all(n: usize) -> Transversal {
        Transversal::new(n, 0)
    }

    pub fn from_set(s: ESet) -> Result<Transversal> {
        if !s.is_transversal() {
            bail!(Domain, "{s} is not a transversal");
        }
        Ok(Transversal::new(s.n(), s.starred()))
    }

    pub fn parse(n: usize, s: &str) -> Result<Transversal> {
        Transversal::from_set(ESet::parse(n, s)?)
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    /// Mask of starred positions; doubles as the index of the transversal in
    /// tables of length `2^n`.
    pub fn starred(self) -> u32 {
        self.starred
    }

    pub fn index(self) -> usize {
        self.starred as usize
    }

    pub fn to_set(self) -> ESet {
        ESet::from_parts(self.n(), !self.starred & low(self.n()), self.starred)
    }

    pub fn contains(self, e: Element) -> bool {
        (self.starred >> e.pos & 1 == 1) == e.starred
    }

    /// The element of `self` at a position.
    pub fn at(self, pos: u8) -> Element {
        Element { starred: self.starred >> pos & 1 == 1, pos }
    }

    /// `T △ {x, x*}` for the pair at `pos`.
    pub fn flip(self, pos: u8) -> Transversal {
        Transversal { n: self.n, starred: self.starred ^ 1 << pos }
    }

    /// `T*`.
    pub fn star(self) -> Transversal {
        Transversal { n: self.n, starred: !self.starred & low(self.n()) }
    }

    /// Number of unstarred elements, `|T ∩ [n]|`.
    pub fn unstarred_count(self) -> usize {
        self.n() - self.starred.count_ones() as usize
    }

    /// Key realizing the lexicographic order in which 1 precedes 1*.
    pub fn lex_key(self) -> u32 {
        if self.n == 0 {
            0
        } else {
            self.starred.reverse_bits() >> (32 - self.n as u32)
        }
    }

    /// Positions where two transversals differ, `(T1 △ T2) ∩ [n]` as a mask.
    pub fn diff(self, o: Transversal) -> u32 {
        self.starred ^ o.starred
    }
}

impl PartialOrd for Transversal {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Transversal {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.n, self.lex_key()).cmp(&(other.n, other.lex_key()))
    }
}

impl fmt::Display for Transversal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_set(), f)
    }
}

/// All `2^n` transversals in lexicographic order (1 before 1*, then 2 before 2*, …).
pub fn enumerate_transversals(n: usize) -> impl Iterator<Item = Transversal> {
    (0..1u32 << n).map(move |k| {
        let starred = if n == 0 { 0 } else { k.reverse_bits() >> (32 - n) };
        Transversal::new(n, starred)
    })
}

/// `m^T_{i,j}`: the number of unstarred elements `k` of `T` with
/// `min(|i|,|j|) < k <= max(|i|,|j|)`.
pub fn interval_count(t: Transversal, i: Element, j: Element) -> u32 {
    let (lo, hi) = if i.pos <= j.pos { (i.pos, j.pos) } else { (j.pos, i.pos) };
    if lo == hi {
        return 0;
    }
    // positions lo+1 ..= hi
    let range = (low(hi as usize + 1)) & !low(lo as usize + 1);
    (range & !t.starred()).count_ones()
}

/// Formats a list of sets one per line (used by witnesses and reports).
pub fn fmt_sets(sets: &[ESet]) -> String {
    let mut s = String::new();
    for x in sets {
        s.push_str(&format!("{x}\n"));
    }
    s
}
