//! Orthogonal matroids, ordinary matroids and their lifts.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::bail;
use crate::ground_set::{ESet, Element, Transversal, MAX_N};
use crate::Result;

/// Circuit enumeration keeps a table with `4^n` bits.
pub const MAX_CIRCUIT_N: usize = 12;

fn low(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Drops bit `p` from a mask, shifting the higher bits down.
fn remove_bit(m: u32, p: u8) -> u32 {
    (m & low(p as usize)) | ((m >> (p + 1)) << p)
}

fn bits(m: u32) -> impl Iterator<Item = u8> {
    (0..32u8).filter(move |&b| m >> b & 1 == 1)
}

/// A failure of symmetric exchange: no second divergence works for `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeWitness {
    pub b1: Transversal,
    pub b2: Transversal,
    /// The element of `b1` whose divergence `{x, x*}` cannot be exchanged.
    pub x: Element,
}

impl fmt::Display for ExchangeWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B1 = {}; B2 = {}; divergence {{{}, {}}}", self.b1, self.b2, self.x, self.x.dual())
    }
}

/// Checks the symmetric exchange axiom on a candidate basis family.
/// Returns `None` when it holds.
pub fn check_bases(n: usize, candidate: &[Transversal]) -> Result<Option<ExchangeWitness>> {
    if candidate.is_empty() {
        bail!(Precondition, "the basis family is empty");
    }
    if n > MAX_N || candidate.iter().any(|b| b.n() != n) {
        bail!(Mismatch, "transversals of different sizes in a basis family on {n} pairs");
    }
    let member = membership(n, candidate);
    let has = |t: Transversal| member[t.index() >> 6] >> (t.index() & 63) & 1 == 1;
    for &b1 in candidate {
        for &b2 in candidate {
            let d = b1.diff(b2);
            for p in bits(d) {
                let ok = bits(d & !(1 << p)).any(|q| has(b1.flip(p).flip(q)));
                if !ok {
                    return Ok(Some(ExchangeWitness { b1, b2, x: b1.at(p) }));
                }
            }
        }
    }
    Ok(None)
}

fn membership(n: usize, bases: &[Transversal]) -> Vec<u64> {
    let mut m = vec![0u64; (1usize << n).div_ceil(64)];
    for b in bases {
        m[b.index() >> 6] |= 1 << (b.index() & 63);
    }
    m
}

/// Which circuit axiom a family violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircuitAxiom {
    C1,
    C2,
    C3,
    C4,
    C5,
}

impl fmt::Display for CircuitAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Checks the circuit axioms C1–C5 exhaustively. Returns the first violated
/// axiom with a witness description, or `None`.
pub fn check_circuit_axioms(n: usize, family: &[ESet]) -> Result<Option<(CircuitAxiom, String)>> {
    if family.iter().any(|c| c.n() != n || !c.is_admissible()) {
        bail!(Domain, "circuit families consist of admissible subsets of the ground set");
    }
    if family.iter().any(|c| c.is_empty()) {
        return Ok(Some((CircuitAxiom::C1, "the empty set is a circuit".into())));
    }
    for a in family {
        for b in family {
            if a != b && a.is_subset(*b) {
                return Ok(Some((CircuitAxiom::C2, format!("{a} is properly contained in {b}"))));
            }
        }
    }
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            let u = a.union(*b);
            if u.is_admissible() {
                for x in a.intersect(*b).iter() {
                    let rest = u.without(x);
                    if !family.iter().any(|c| c.is_subset(rest)) {
                        return Ok(Some((
                            CircuitAxiom::C3,
                            format!("no circuit inside ({a}) ∪ ({b}) minus {x}"),
                        )));
                    }
                }
            } else if u.divergences() < 2 {
                return Ok(Some((CircuitAxiom::C4, format!("({a}) ∪ ({b}) has a single divergence"))));
            }
        }
    }
    for t in crate::ground_set::enumerate_transversals(n) {
        let ts = t.to_set();
        for p in 0..n as u8 {
            let x = t.at(p).dual();
            let ext = ts.with(x);
            if !family.iter().any(|c| c.is_subset(ext)) {
                return Ok(Some((CircuitAxiom::C5, format!("{t} plus {x} contains no circuit"))));
            }
        }
    }
    Ok(None)
}

/// A signed permutation of E: position `i` goes to `perm[i]`, toggling the
/// star when bit `i` of `flips` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPerm {
    pub perm: Vec<u8>,
    pub flips: u32,
}

impl SignedPerm {
    pub fn identity(n: usize) -> SignedPerm {
        SignedPerm { perm: (0..n as u8).collect(), flips: 0 }
    }

    pub fn apply(&self, e: Element) -> Element {
        Element { starred: e.starred ^ (self.flips >> e.pos & 1 == 1), pos: self.perm[e.pos as usize] }
    }

    pub fn apply_transversal(&self, t: Transversal) -> Transversal {
        let mut s = 0;
        for (i, &p) in self.perm.iter().enumerate() {
            if (t.starred() ^ self.flips) >> i & 1 == 1 {
                s |= 1 << p;
            }
        }
        Transversal::new(t.n(), s)
    }
}

impl fmt::Display for SignedPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.perm.len();
        for i in 0..n {
            if i > 0 {
                f.write_str(", ")?;
            }
            let e = Element::plain(i as u8);
            write!(f, "{} -> {}", e, self.apply(e))?;
        }
        Ok(())
    }
}

/// Lexicographic successor of a permutation; false when `v` was the last one.
fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// The result of an elementary minor: the matroid and whether the singular
/// element rule (`M|x = M|x*`) was applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minor {
    pub matroid: OrthoMatroid,
    pub redirected: bool,
}

/// An orthogonal matroid on `[n] ∪ [n]*`, given by its bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoMatroid {
    n: u8,
    bases: Vec<Transversal>,
    member: Vec<u64>,
}

impl OrthoMatroid {
    /// Validates symmetric exchange.
    pub fn new(n: usize, bases: impl IntoIterator<Item = Transversal>) -> Result<OrthoMatroid> {
        let mut v: Vec<Transversal> = bases.into_iter().collect();
        v.sort();
        v.dedup();
        if let Some(w) = check_bases(n, &v)? {
            bail!(Axiom, "symmetric exchange fails: {w}");
        }
        Ok(Self::unchecked(n, v))
    }

    fn unchecked(n: usize, mut bases: Vec<Transversal>) -> OrthoMatroid {
        bases.sort();
        bases.dedup();
        let member = membership(n, &bases);
        OrthoMatroid { n: n as u8, bases, member }
    }

    /// Parses the text form: `n <n>` then one basis per line.
    pub fn from_bases_text(n: usize, lines: &[&str]) -> Result<OrthoMatroid> {
        let mut v = Vec::new();
        for l in lines {
            v.push(Transversal::parse(n, l)?);
        }
        Self::new(n, v)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Bases in lexicographic order.
    pub fn bases(&self) -> &[Transversal] {
        &self.bases
    }

    pub fn is_basis(&self, t: Transversal) -> bool {
        t.n() == self.n() && self.member[t.index() >> 6] >> (t.index() & 63) & 1 == 1
    }

    /// Lexicographically least basis.
    pub fn least_basis(&self) -> Transversal {
        self.bases[0]
    }

    /// Strong symmetric exchange: the same `y` works for both bases.
    pub fn check_strong_exchange(&self) -> Option<ExchangeWitness> {
        for &b1 in &self.bases {
            for &b2 in &self.bases {
                let d = b1.diff(b2);
                for p in bits(d) {
                    let ok = bits(d & !(1 << p))
                        .any(|q| self.is_basis(b1.flip(p).flip(q)) && self.is_basis(b2.flip(p).flip(q)));
                    if !ok {
                        return Some(ExchangeWitness { b1, b2, x: b1.at(p) });
                    }
                }
            }
        }
        None
    }

    /// Whether an admissible set lies in some basis.
    pub fn is_independent(&self, a: ESet) -> bool {
        a.is_admissible() && self.bases.iter().any(|b| a.is_subset(b.to_set()))
    }

    /// An element is singular when no basis contains it.
    pub fn is_singular(&self, x: Element) -> bool {
        !self.bases.iter().any(|b| b.contains(x))
    }

    /// Circuits: minimal admissible sets contained in no basis, sorted by size
    /// and then lexicographically.
    pub fn circuits(&self) -> Result<Vec<ESet>> {
        let n = self.n();
        if n > MAX_CIRCUIT_N {
            bail!(Size, "circuit enumeration is limited to n <= {MAX_CIRCUIT_N}");
        }
        let full = low(n);
        // Independent subtransversals, keyed by (support, starred part).
        let mut indep = vec![0u64; (1usize << (2 * n)).div_ceil(64)];
        let key = |s: u32, t: u32| ((s as usize) << n) | t as usize;
        for b in &self.bases {
            let mut s = full;
            loop {
                let k = key(s, b.starred() & s);
                indep[k >> 6] |= 1 << (k & 63);
                if s == 0 {
                    break;
                }
                s = (s - 1) & full;
            }
        }
        let is_ind = |s: u32, t: u32| {
            let k = key(s, t);
            indep[k >> 6] >> (k & 63) & 1 == 1
        };
        let mut out = Vec::new();
        for s in 0..=full {
            let mut t = s;
            loop {
                if !is_ind(s, t) && bits(s).all(|p| is_ind(s & !(1 << p), t & !(1 << p))) {
                    out.push(ESet::from_parts(n, s & !t, t));
                }
                if t == 0 {
                    break;
                }
                t = (t - 1) & s;
            }
        }
        out.sort_by_key(|a| (a.len(), a.elements()));
        Ok(out)
    }

    /// The fundamental circuit `C(B, x)` for a basis `B` not containing `x`.
    pub fn fundamental_circuit(&self, b: Transversal, x: Element) -> Result<ESet> {
        if !self.is_basis(b) {
            bail!(Precondition, "{b} is not a basis");
        }
        if b.contains(x) {
            bail!(Precondition, "{x} lies in the basis {b}");
        }
        let mut c = ESet::empty(self.n()).with(x);
        for p in 0..self.n() as u8 {
            if p != x.pos && self.is_basis(b.flip(p).flip(x.pos)) {
                c = c.with(b.at(p));
            }
        }
        Ok(c)
    }

    pub fn is_circuit(&self, c: ESet) -> bool {
        c.is_admissible()
            && !c.is_empty()
            && !self.is_independent(c)
            && c.iter().all(|e| self.is_independent(c.without(e)))
    }

    /// A transversal `T ⊇ C` such that `T △ {x, x*}` is a basis for all `x ∈ C`:
    /// take the least basis containing `C - y` for the least `y ∈ C`, then swap `y` in.
    pub fn extend_circuit(&self, c: ESet) -> Result<Transversal> {
        if !self.is_circuit(c) {
            bail!(Precondition, "{c} is not a circuit");
        }
        let y = c.min_element().unwrap();
        let rest = c.without(y);
        let b = *self
            .bases
            .iter()
            .find(|b| rest.is_subset(b.to_set()))
            .expect("proper subsets of circuits are independent");
        let t = b.flip(y.pos);
        debug_assert!(c.iter().all(|x| self.is_basis(t.flip(x.pos))));
        Ok(t)
    }

    /// Every transversal `T ⊇ C` with `T △ {x, x*}` a basis for all `x ∈ C`.
    pub fn circuit_transversals(&self, c: ESet) -> Vec<Transversal> {
        let n = self.n();
        let free = low(n) & !c.positions();
        let mut out = Vec::new();
        let mut s = free;
        loop {
            let t = Transversal::new(n, c.starred() | s);
            if c.iter().all(|x| self.is_basis(t.flip(x.pos))) {
                out.push(t);
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & free;
        }
        out.sort();
        out
    }

    pub fn dual(&self) -> OrthoMatroid {
        Self::unchecked(self.n(), self.bases.iter().map(|b| b.star()).collect())
    }

    /// The elementary minor `M|x`.
    pub fn minor(&self, x: Element) -> Result<Minor> {
        let n = self.n();
        if n == 0 || x.pos as usize >= n {
            bail!(Domain, "{x} is not in the ground set");
        }
        let (x, redirected) = if self.is_singular(x) { (x.dual(), true) } else { (x, false) };
        let bases = self
            .bases
            .iter()
            .filter(|b| b.contains(x))
            .map(|b| Transversal::new(n - 1, remove_bit(b.starred(), x.pos)))
            .collect();
        Ok(Minor { matroid: Self::unchecked(n - 1, bases), redirected })
    }

    /// `M|S` for an admissible `S`, removing pairs from the highest position
    /// down. Returns the minor and the elements that were redirected to their duals.
    pub fn minor_set(&self, s: ESet) -> Result<(OrthoMatroid, Vec<Element>)> {
        if !s.is_admissible() {
            bail!(Precondition, "{s} contains both an element and its dual");
        }
        let mut m = self.clone();
        let mut redirected = Vec::new();
        let mut elems = s.elements();
        elems.sort_by_key(|a| core::cmp::Reverse(a.pos));
        for e in elems {
            let r = m.minor(e)?;
            if r.redirected {
                redirected.push(e);
            }
            m = r.matroid;
        }
        Ok((m, redirected))
    }

    /// Twisting by a `*`-closed set `A`: bases become `B △ A`.
    pub fn twist(&self, a: ESet) -> Result<OrthoMatroid> {
        if a.star() != a {
            bail!(Precondition, "twisting needs a *-closed set, got {a}");
        }
        let p = a.unstarred();
        Ok(Self::unchecked(self.n(), self.bases.iter().map(|b| Transversal::new(self.n(), b.starred() ^ p)).collect()))
    }

    /// True iff every basis has the same number of unstarred elements.
    pub fn is_lift(&self) -> bool {
        let c = self.bases[0].unstarred_count();
        self.bases.iter().all(|b| b.unstarred_count() == c)
    }

    /// Bases adjacent to `b` in the basis graph (`|B △ B'| = 4`).
    pub fn neighbors(&self, b: Transversal) -> Vec<Transversal> {
        let n = self.n() as u8;
        let mut out = Vec::new();
        for p in 0..n {
            for q in p + 1..n {
                let c = b.flip(p).flip(q);
                if self.is_basis(c) {
                    out.push(c);
                }
            }
        }
        out
    }

    pub fn apply(&self, g: &SignedPerm) -> OrthoMatroid {
        Self::unchecked(self.n(), self.bases.iter().map(|&b| g.apply_transversal(b)).collect())
    }

    /// A signed permutation carrying the bases of `self` onto those of `other`.
    pub fn find_isomorphism(&self, other: &OrthoMatroid) -> Result<Option<SignedPerm>> {
        let n = self.n();
        if n != other.n() {
            bail!(Mismatch, "ground sets of sizes {n} and {} differ", other.n());
        }
        if self.bases.len() != other.bases.len() {
            return Ok(None);
        }
        let mut perm: Vec<u8> = (0..n as u8).collect();
        loop {
            for flips in 0..1u32 << n {
                let g = SignedPerm { perm: perm.clone(), flips };
                if self.bases.iter().all(|&b| other.is_basis(g.apply_transversal(b))) {
                    return Ok(Some(g));
                }
            }
            if !next_permutation(&mut perm) {
                return Ok(None);
            }
        }
    }

    /// Minimum sorted basis list over all signed permutations; equal exactly
    /// for isomorphic matroids.
    pub fn canonical_form(&self) -> Vec<u32> {
        let n = self.n();
        let mut best: Option<Vec<u32>> = None;
        let mut perm: Vec<u8> = (0..n as u8).collect();
        loop {
            for flips in 0..1u32 << n {
                let g = SignedPerm { perm: perm.clone(), flips };
                let mut img: Vec<u32> = self.bases.iter().map(|&b| g.apply_transversal(b).starred()).collect();
                img.sort_unstable();
                if best.as_ref().map_or(true, |b| img < *b) {
                    best = Some(img);
                }
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.unwrap_or_default()
    }

    /// Searches the iterated minors of `self` on as many pairs as `target` for
    /// one isomorphic to it; returns the removed set on success.
    pub fn find_minor(&self, target: &OrthoMatroid) -> Result<Option<ESet>> {
        let (n, k) = (self.n(), target.n());
        if k > n {
            return Ok(None);
        }
        let full = low(n);
        let canon = target.canonical_form();
        let mut seen: Vec<Vec<u32>> = Vec::new();
        for r in 0..=full {
            if r.count_ones() as usize != n - k {
                continue;
            }
            let mut sub = r;
            loop {
                let s = ESet::from_parts(n, r & !sub, sub);
                let (m, _) = self.minor_set(s)?;
                if m.bases.len() == target.bases.len() && !seen.contains(&m.bases.iter().map(|b| b.starred()).collect()) {
                    seen.push(m.bases.iter().map(|b| b.starred()).collect());
                    if m.canonical_form() == canon {
                        return Ok(Some(s));
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & r;
            }
        }
        Ok(None)
    }

    pub fn contains_minor(&self, target: &OrthoMatroid) -> Result<bool> {
        Ok(self.find_minor(target)?.is_some())
    }
}

impl fmt::Display for OrthoMatroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        for b in &self.bases {
            writeln!(f, "{b}")?;
        }
        Ok(())
    }
}

/// An ordinary matroid on `[n]`, bases as bitmasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matroid {
    n: u8,
    rank: u8,
    bases: Vec<u32>,
}

impl Matroid {
    /// Validates equal cardinality and the basis exchange axiom.
    pub fn new(n: usize, bases: impl IntoIterator<Item = u32>) -> Result<Matroid> {
        let mut v: Vec<u32> = bases.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            bail!(Precondition, "a matroid needs at least one basis");
        }
        if n > MAX_N || v.iter().any(|b| b & !low(n) != 0) {
            bail!(Domain, "basis outside the ground set [{n}]");
        }
        let r = v[0].count_ones();
        if v.iter().any(|b| b.count_ones() != r) {
            bail!(Axiom, "bases of different cardinalities");
        }
        for &b1 in &v {
            for &b2 in &v {
                for x in bits(b1 & !b2) {
                    let ok = bits(b2 & !b1).any(|y| v.binary_search(&((b1 & !(1 << x)) | 1 << y)).is_ok());
                    if !ok {
                        bail!(Axiom, "basis exchange fails for {b1:#b}, {b2:#b} at {}", x + 1);
                    }
                }
            }
        }
        Ok(Matroid { n: n as u8, rank: r as u8, bases: v })
    }

    /// `U_{r,n}`.
    pub fn uniform(r: usize, n: usize) -> Matroid {
        let v = (0..1u32 << n).filter(|b| b.count_ones() as usize == r);
        Matroid::new(n, v).expect("uniform matroids are matroids")
    }

    /// Cycle matroid of a connected graph on `vertices` with the given edges
    /// (edge `i` is element `i+1`).
    pub fn graphic(vertices: usize, edges: &[(usize, usize)]) -> Result<Matroid> {
        let m = edges.len();
        let forests = (0..1u32 << m).filter(|&s| {
            if s.count_ones() as usize + 1 != vertices {
                return false;
            }
            let mut parent: Vec<usize> = (0..vertices).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut x = x;
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            for e in bits(s) {
                let (a, b) = edges[e as usize];
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    return false;
                }
                parent[ra] = rb;
            }
            true
        });
        Matroid::new(m, forests)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    pub fn is_basis(&self, b: u32) -> bool {
        self.bases.binary_search(&b).is_ok()
    }

    pub fn dual(&self) -> Matroid {
        let full = low(self.n());
        Matroid::new(self.n(), self.bases.iter().map(|b| !b & full)).unwrap()
    }

    pub fn is_loop(&self, e: u8) -> bool {
        self.bases.iter().all(|b| b >> e & 1 == 0)
    }

    pub fn is_coloop(&self, e: u8) -> bool {
        self.bases.iter().all(|b| b >> e & 1 == 1)
    }

    /// `M / e` on `[n-1]` (positions above `e` shift down).
    pub fn contract(&self, e: u8) -> Matroid {
        if self.is_loop(e) {
            return self.delete(e);
        }
        let v = self.bases.iter().filter(|b| *b >> e & 1 == 1).map(|&b| remove_bit(b, e));
        Matroid::new(self.n() - 1, v).unwrap()
    }

    /// `M \ e` on `[n-1]`.
    pub fn delete(&self, e: u8) -> Matroid {
        if self.is_coloop(e) {
            let v = self.bases.iter().map(|&b| remove_bit(b, e));
            return Matroid::new(self.n() - 1, v).unwrap();
        }
        let v = self.bases.iter().filter(|b| *b >> e & 1 == 0).map(|&b| remove_bit(b, e));
        Matroid::new(self.n() - 1, v).unwrap()
    }

    /// Minimal dependent sets.
    pub fn circuits(&self) -> Vec<u32> {
        let indep = |s: u32| self.bases.iter().any(|b| s & !b == 0);
        let mut out: Vec<u32> = (1..1u32 << self.n())
            .filter(|&s| !indep(s) && bits(s).all(|e| indep(s & !(1 << e))))
            .collect();
        out.sort_by_key(|s| (s.count_ones(), *s));
        out
    }

    pub fn cocircuits(&self) -> Vec<u32> {
        self.dual().circuits()
    }

    /// `B ∪ ([n] - B)*` for every basis `B`.
    pub fn lift(&self) -> OrthoMatroid {
        let full = low(self.n());
        OrthoMatroid::unchecked(self.n(), self.bases.iter().map(|b| Transversal::new(self.n(), !b & full)).collect())
    }
}
