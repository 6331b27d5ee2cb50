//! Tract vectors on `[n] ∪ [n]*`, signatures of orthogonal matroids, the
//! orthogonality and circuit-set axioms, and the passage between signatures
//! and Wick functions.
//!
//! Scaling a vector by a unit `c` means scaling its conjugate `X̃` by `c`: the
//! unstarred coordinates are multiplied by `c`, the starred ones by `c̄`. With
//! the identity involution this is ordinary scaling. This is the action under
//! which `⟨X, Y*⟩` is homogeneous, so checks on representatives are complete.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::bail;
use crate::ground_set::{enumerate_transversals, interval_count, ESet, Element, Transversal};
use crate::ortho_matroid::OrthoMatroid;
use crate::tract_core::{FormalSum, Scalar, Tract, TractHom};
use crate::wick::{WickFunction, WickLevel};
use crate::{Error, Result};

/// A vector in `F^E`, coordinates ordered `1..n, 1*..n*`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TractVector {
    n: u8,
    coords: Vec<Scalar>,
}

fn idx(n: usize, e: Element) -> usize {
    e.pos as usize + if e.starred { n } else { 0 }
}

impl TractVector {
    pub fn new(n: usize, coords: Vec<Scalar>) -> Result<TractVector> {
        if coords.len() != 2 * n {
            bail!(Domain, "a vector on {n} pairs has {} coordinates, got {}", 2 * n, coords.len());
        }
        Ok(TractVector { n: n as u8, coords })
    }

    pub fn zero(n: usize) -> TractVector {
        TractVector { n: n as u8, coords: vec![Scalar::Zero; 2 * n] }
    }

    pub fn from_halves(unstarred: &[Scalar], starred: &[Scalar]) -> Result<TractVector> {
        if unstarred.len() != starred.len() {
            bail!(Domain, "halves have different lengths");
        }
        let mut c = unstarred.to_vec();
        c.extend_from_slice(starred);
        Self::new(unstarred.len(), c)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn get(&self, e: Element) -> Scalar {
        self.coords[idx(self.n(), e)]
    }

    pub fn set(&mut self, e: Element, x: Scalar) {
        let i = idx(self.n(), e);
        self.coords[i] = x;
    }

    pub fn support(&self) -> ESet {
        let mask = self.coords.iter().enumerate().filter(|(_, x)| !x.is_zero()).fold(0u32, |m, (i, _)| m | 1 << i);
        ESet::from_mask(self.n(), mask)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    /// `X*(e) = X(e*)`.
    pub fn star(&self) -> TractVector {
        let n = self.n();
        let mut c = self.coords[n..].to_vec();
        c.extend_from_slice(&self.coords[..n]);
        TractVector { n: self.n, coords: c }
    }

    /// `X̃`: the involution applied to the starred coordinates. An involution
    /// itself.
    pub fn conj(&self, tract: &Tract) -> TractVector {
        let n = self.n();
        let mut c = self.coords.clone();
        for x in &mut c[n..] {
            *x = tract.conj(*x);
        }
        TractVector { n: self.n, coords: c }
    }

    /// Scales `X̃` by `c` (see the module notes).
    pub fn scale(&self, tract: &Tract, c: Scalar) -> TractVector {
        let n = self.n();
        let cc = tract.conj(c);
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, &x)| tract.mul(x, if i < n { c } else { cc }))
            .collect();
        TractVector { n: self.n, coords }
    }

    /// The multiple with value 1 at the least element of the support.
    pub fn normalized(&self, tract: &Tract) -> TractVector {
        let Some(i) = self.coords.iter().position(|x| !x.is_zero()) else { return self.clone() };
        let mut c = tract.inv(self.coords[i]).unwrap();
        if i >= self.n() {
            c = tract.conj(c);
        }
        self.scale(tract, c)
    }

    /// Deletes the coordinates of the pair at position `pos`.
    pub fn project_out(&self, pos: u8) -> TractVector {
        let n = self.n();
        let p = pos as usize;
        let coords = self
            .coords
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != p && i != n + p)
            .map(|(_, &x)| x)
            .collect();
        TractVector { n: self.n - 1, coords }
    }

    /// Applies a map to every coordinate.
    pub fn map(&self, f: impl Fn(Scalar) -> Scalar) -> TractVector {
        TractVector { n: self.n, coords: self.coords.iter().map(|&x| f(x)).collect() }
    }

    /// Parses `(v1,…,vn | v1*,…,vn*)`.
    pub fn parse(tract: &Tract, n: usize, s: &str) -> Result<TractVector> {
        let s = s.trim();
        let inner = s
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("vector {s:?} must be wrapped in parentheses")))?;
        let halves = split_top(inner, '|');
        if halves.len() != 2 {
            bail!(Parse, "vector {s:?} needs exactly one top-level '|'");
        }
        let mut coords = Vec::with_capacity(2 * n);
        for h in &halves {
            let parts: Vec<&str> = if h.trim().is_empty() { Vec::new() } else { split_top(h, ',') };
            if parts.len() != n {
                bail!(Parse, "vector {s:?}: expected {n} entries on each side of '|'");
            }
            for p in parts {
                coords.push(tract.parse_elem(p)?);
            }
        }
        Self::new(n, coords)
    }

    pub fn fmt_with(&self, tract: &Tract) -> String {
        let n = self.n();
        let side = |r: &[Scalar]| r.iter().map(|&x| tract.fmt_elem(x)).collect::<Vec<_>>().join(",");
        format!("({} | {})", side(&self.coords[..n]), side(&self.coords[n..]))
    }
}

/// Splits on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// `|supp X ∩ (supp Y)*|`.
pub fn overlap(x: &TractVector, y: &TractVector) -> usize {
    x.support().intersect(y.support().star()).len()
}

/// `⟨X, Y⟩ = Σ_{i∈[n]} X(i)·conj(Y(i)) + conj(X(i*))·Y(i*)`.
pub fn inner_product(tract: &Tract, x: &TractVector, y: &TractVector) -> FormalSum {
    let n = x.n();
    let mut s = FormalSum::new();
    for i in 0..n {
        s.push(tract.mul(x.coords[i], tract.conj(y.coords[i])));
        s.push(tract.mul(tract.conj(x.coords[n + i]), y.coords[n + i]));
    }
    s
}

/// `⟨X, Y*⟩ = Σ_{i∈E} X̃(i)·Ỹ(i*)`.
pub fn inner_product_star(tract: &Tract, x: &TractVector, y: &TractVector) -> FormalSum {
    let (xc, yc) = (x.conj(tract), y.conj(tract));
    let n = x.n();
    let mut s = FormalSum::new();
    for i in 0..2 * n {
        let j = if i < n { i + n } else { i - n };
        s.push(tract.mul(xc.coords[i], yc.coords[j]));
    }
    s
}

/// Whether `target` lies in the linear span of `gens`: some coefficients
/// `c_j` make `Σ c_j g_j(i) - target(i)` null at every coordinate. Exhaustive
/// over the elements of a finite tract; over the tropical hyperfield the
/// coefficients are drawn from the coordinate ratios of the instance.
pub fn span_contains(tract: &Tract, gens: &[TractVector], target: &TractVector) -> Result<bool> {
    let m = target.coords.len();
    if gens.iter().any(|g| g.coords.len() != m) {
        bail!(Mismatch, "vectors of different lengths");
    }
    let k = gens.len();
    let candidates: Vec<Vec<Scalar>> = if tract.is_finite() {
        vec![tract.elements(); k]
    } else {
        gens.iter()
            .map(|g| {
                let mut c: BTreeSet<Scalar> = BTreeSet::from([Scalar::Zero]);
                for i in 0..m {
                    let others = gens.iter().map(|h| h.coords[i]).chain(core::iter::once(target.coords[i]));
                    for h in others {
                        if let Some(a) = tract.div(h, g.coords[i]).filter(|a| !a.is_zero()) {
                            c.insert(a);
                        }
                    }
                }
                c.into_iter().collect()
            })
            .collect()
    };
    // Coordinate i can be checked once the last generator nonzero there is fixed.
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
    for i in 0..m {
        let last = (0..k).rev().find(|&j| !gens[j].coords[i].is_zero()).map_or(0, |j| j + 1);
        ready[last].push(i);
    }
    let eps = tract.eps();
    let mut coef = vec![Scalar::Zero; k];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        j: usize,
        tract: &Tract,
        gens: &[TractVector],
        target: &TractVector,
        cands: &[Vec<Scalar>],
        ready: &[Vec<usize>],
        eps: Scalar,
        coef: &mut Vec<Scalar>,
    ) -> Result<bool> {
        for &i in &ready[j] {
            let mut terms: Vec<Scalar> = (0..j).map(|l| tract.mul(coef[l], gens[l].coords[i])).collect();
            terms.push(tract.mul(eps, target.coords[i]));
            if !tract.is_null(&terms)? {
                return Ok(false);
            }
        }
        if j == gens.len() {
            return Ok(true);
        }
        for &c in &cands[j] {
            coef[j] = c;
            if rec(j + 1, tract, gens, target, cands, ready, eps, coef)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    rec(0, tract, gens, target, &candidates, &ready, eps, &mut coef)
}

/// Span membership when generator `j` is the only one nonzero at coordinate
/// `pivots[j]`; the coefficients are then forced.
pub fn pivot_span_contains(tract: &Tract, gens: &[TractVector], pivots: &[Element], target: &TractVector) -> Result<bool> {
    let n = target.n();
    let coef: Vec<Scalar> = gens
        .iter()
        .zip(pivots)
        .map(|(g, &p)| {
            let (gi, ti) = (g.coords[idx(n, p)], target.coords[idx(n, p)]);
            debug_assert!(gens.iter().filter(|h| !h.get(p).is_zero()).count() == 1);
            tract.div(ti, gi).unwrap_or(Scalar::Zero)
        })
        .collect();
    let eps = tract.eps();
    for i in 0..2 * n {
        let mut terms: Vec<Scalar> = gens.iter().zip(&coef).map(|(g, &c)| tract.mul(c, g.coords[i])).collect();
        terms.push(tract.mul(eps, target.coords[i]));
        if !tract.is_null(&terms)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Orthogonality and circuit-set axioms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SigAxiom {
    /// All pairs.
    O,
    /// Pairs with overlap at most 4.
    OPrime,
    /// Pairs with overlap exactly 2.
    Ot2,
    /// Pairs with overlap at most 3.
    Ot3,
    /// Pairs of fundamental circuits of a common basis.
    Ot2Prime,
    /// Every circuit is in the span of each fundamental circuit form.
    L,
    /// Two-circuit elimination inside a fundamental form.
    L1,
    /// Three-circuit elimination inside a fundamental form.
    L2,
}

impl SigAxiom {
    pub const ALL: [SigAxiom; 8] =
        [SigAxiom::O, SigAxiom::OPrime, SigAxiom::Ot2, SigAxiom::Ot3, SigAxiom::Ot2Prime, SigAxiom::L, SigAxiom::L1, SigAxiom::L2];

    pub fn parse(s: &str) -> Result<SigAxiom> {
        Ok(match s {
            "O" => SigAxiom::O,
            "O'" | "OPrime" => SigAxiom::OPrime,
            "Ot2" | "O2" => SigAxiom::Ot2,
            "Ot3" | "O3" => SigAxiom::Ot3,
            "Ot2'" | "O2'" => SigAxiom::Ot2Prime,
            "L" => SigAxiom::L,
            "L1" | "L-i'" => SigAxiom::L1,
            "L2" | "L-ii'" => SigAxiom::L2,
            _ => bail!(Parse, "unknown axiom {s:?}"),
        })
    }

    /// Overlap bound for the orthogonality axioms.
    fn overlap_ok(self, k: usize) -> bool {
        match self {
            SigAxiom::O => true,
            SigAxiom::OPrime => k <= 4,
            SigAxiom::Ot3 => k <= 3,
            SigAxiom::Ot2 => k == 2,
            _ => false,
        }
    }
}

impl fmt::Display for SigAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigAxiom::O => "O",
            SigAxiom::OPrime => "O'",
            SigAxiom::Ot2 => "Ot2",
            SigAxiom::Ot3 => "Ot3",
            SigAxiom::Ot2Prime => "Ot2'",
            SigAxiom::L => "L",
            SigAxiom::L1 => "L1",
            SigAxiom::L2 => "L2",
        })
    }
}

/// Why an axiom fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigWitness {
    /// `⟨X, Y*⟩` is not null.
    Orthogonality { x: TractVector, y: TractVector, sum: FormalSum },
    /// `X̃` is not in the span of the fundamental circuit form at `basis`.
    Span { basis: Transversal, x: TractVector },
    /// No circuit eliminates as required for the fundamental circuits
    /// `C(basis, e)`, `e ∈ es`.
    Elimination { basis: Transversal, es: Vec<Element>, f: Option<Element> },
}

impl SigWitness {
    pub fn describe(&self, tract: &Tract) -> String {
        match self {
            SigWitness::Orthogonality { x, y, sum } => {
                let terms: Vec<String> = sum.terms().iter().map(|&t| tract.fmt_elem(t)).collect();
                format!(
                    "X = {} (support {}), Y = {} (support {}), <X,Y*> = {}",
                    x.fmt_with(tract),
                    x.support(),
                    y.fmt_with(tract),
                    y.support(),
                    terms.join(" + ")
                )
            }
            SigWitness::Span { basis, x } => format!("basis {basis}: {} is not in the span", x.fmt_with(tract)),
            SigWitness::Elimination { basis, es, f } => {
                let es: Vec<String> = es.iter().map(|e| format!("{e}")).collect();
                match f {
                    Some(f) => format!("basis {basis}, e = {}, f = {f}: no eliminating circuit", es.join(" ")),
                    None => format!("basis {basis}, e = {}: no eliminating circuit", es.join(" ")),
                }
            }
        }
    }
}

/// A signature of an orthogonal matroid, stored by normalized representatives.
/// Several non-proportional representatives may share a support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureFamily {
    tract: Tract,
    matroid: OrthoMatroid,
    reps: Vec<TractVector>,
}

impl SignatureFamily {
    /// The supports must be exactly the circuits of an orthogonal matroid,
    /// which becomes the underlying matroid.
    pub fn new(tract: &Tract, n: usize, vectors: impl IntoIterator<Item = TractVector>) -> Result<SignatureFamily> {
        let reps = Self::prepare(tract, n, vectors)?;
        let supports: BTreeSet<u32> = reps.iter().map(|x| x.support().mask()).collect();
        if supports.is_empty() {
            // every orthogonal matroid has circuits (C5)
            bail!(Axiom, "a signature needs at least one vector");
        }
        let bases: Vec<Transversal> = enumerate_transversals(n)
            .filter(|t| supports.iter().all(|&s| s & !t.to_set().mask() != 0))
            .collect();
        if bases.is_empty() {
            bail!(Axiom, "every transversal contains a support");
        }
        let m = OrthoMatroid::new(n, bases)?;
        Self::from_parts(tract, m, reps)
    }

    /// A signature of a given matroid.
    pub fn from_parts(tract: &Tract, matroid: OrthoMatroid, vectors: impl IntoIterator<Item = TractVector>) -> Result<SignatureFamily> {
        let reps = Self::prepare(tract, matroid.n(), vectors)?;
        let supports: BTreeSet<u32> = reps.iter().map(|x| x.support().mask()).collect();
        let circuits: BTreeSet<u32> = matroid.circuits()?.iter().map(|c| c.mask()).collect();
        if supports != circuits {
            bail!(Axiom, "supports are not the circuits of the matroid");
        }
        Ok(SignatureFamily { tract: tract.clone(), matroid, reps })
    }

    fn prepare(tract: &Tract, n: usize, vectors: impl IntoIterator<Item = TractVector>) -> Result<Vec<TractVector>> {
        let mut reps = Vec::new();
        for v in vectors {
            if v.n() != n {
                bail!(Mismatch, "vector on {} pairs in a family on {n}", v.n());
            }
            if v.coords.iter().any(|&x| !tract.contains(x)) {
                bail!(Domain, "vector has entries outside {tract}");
            }
            if v.is_zero() {
                bail!(Domain, "signatures contain no zero vector");
            }
            if !v.support().is_admissible() {
                bail!(Domain, "support {} is not admissible", v.support());
            }
            reps.push(v.normalized(tract));
        }
        reps.sort();
        reps.dedup();
        Ok(reps)
    }

    /// Every circuit carries the all-one vector. For a tract with one unit
    /// this is the only signature.
    pub fn uniform(tract: &Tract, matroid: &OrthoMatroid) -> Result<SignatureFamily> {
        let n = matroid.n();
        let one = tract.one();
        let reps = matroid.circuits()?.into_iter().map(|c| {
            let mut v = TractVector::zero(n);
            for e in c.iter() {
                v.set(e, one);
            }
            v
        });
        Self::from_parts(tract, matroid.clone(), reps.collect::<Vec<_>>())
    }

    pub fn tract(&self) -> &Tract {
        &self.tract
    }

    pub fn matroid(&self) -> &OrthoMatroid {
        &self.matroid
    }

    pub fn n(&self) -> usize {
        self.matroid.n()
    }

    /// Normalized representatives, sorted.
    pub fn reps(&self) -> &[TractVector] {
        &self.reps
    }

    pub fn reps_with_support(&self, c: ESet) -> impl Iterator<Item = &TractVector> {
        self.reps.iter().filter(move |x| x.support() == c)
    }

    fn rep(&self, c: ESet) -> Result<&TractVector> {
        self.reps_with_support(c).next().ok_or_else(|| Error::Domain(format!("no vector with support {c}")))
    }

    /// Membership in the scaling closure.
    pub fn contains(&self, x: &TractVector) -> bool {
        self.reps.binary_search(&x.normalized(&self.tract)).is_ok()
    }

    /// Every unit multiple of every representative (finite tracts).
    pub fn all_vectors(&self) -> Vec<TractVector> {
        let mut v: Vec<TractVector> =
            self.reps.iter().flat_map(|x| self.tract.units().into_iter().map(move |c| (x, c))).map(|(x, c)| x.scale(&self.tract, c)).collect();
        v.sort();
        v.dedup();
        v
    }

    fn orth_pair(&self, x: &TractVector, y: &TractVector) -> Result<Option<SigWitness>> {
        let sum = inner_product_star(&self.tract, x, y);
        if self.tract.is_null(sum.terms())? {
            Ok(None)
        } else {
            Ok(Some(SigWitness::Orthogonality { x: x.clone(), y: y.clone(), sum }))
        }
    }

    /// Fundamental circuits `C(B, e)` for `e ∈ B*`, with `e`.
    fn fundamental(&self, b: Transversal) -> Result<Vec<(Element, TractVector)>> {
        let mut out = Vec::new();
        for p in 0..self.n() as u8 {
            let e = b.at(p).dual();
            let c = self.matroid.fundamental_circuit(b, e)?;
            out.push((e, self.rep(c)?.clone()));
        }
        Ok(out)
    }

    pub fn check_axiom(&self, axiom: SigAxiom) -> Result<Option<SigWitness>> {
        let t = &self.tract;
        match axiom {
            SigAxiom::O | SigAxiom::OPrime | SigAxiom::Ot2 | SigAxiom::Ot3 => {
                for x in &self.reps {
                    for y in &self.reps {
                        let k = overlap(x, y);
                        if k == 0 || !axiom.overlap_ok(k) {
                            continue;
                        }
                        if let Some(w) = self.orth_pair(x, y)? {
                            return Ok(Some(w));
                        }
                    }
                }
                Ok(None)
            }
            SigAxiom::Ot2Prime => {
                for &b in self.matroid.bases() {
                    let mut vs: Vec<&TractVector> = Vec::new();
                    for p in 0..self.n() as u8 {
                        let c = self.matroid.fundamental_circuit(b, b.at(p).dual())?;
                        vs.extend(self.reps_with_support(c));
                    }
                    for x in &vs {
                        for y in &vs {
                            if overlap(x, y) > 0 {
                                if let Some(w) = self.orth_pair(x, y)? {
                                    return Ok(Some(w));
                                }
                            }
                        }
                    }
                }
                Ok(None)
            }
            SigAxiom::L => {
                for &b in self.matroid.bases() {
                    let form = self.fundamental(b)?;
                    let gens: Vec<TractVector> = form.iter().map(|(_, x)| x.conj(t)).collect();
                    let pivots: Vec<Element> = form.iter().map(|(e, _)| *e).collect();
                    for x in &self.reps {
                        if !pivot_span_contains(t, &gens, &pivots, &x.conj(t))? {
                            return Ok(Some(SigWitness::Span { basis: b, x: x.clone() }));
                        }
                    }
                }
                Ok(None)
            }
            SigAxiom::L1 => {
                for &b in self.matroid.bases() {
                    let form = self.fundamental(b)?;
                    for i in 0..form.len() {
                        for j in i + 1..form.len() {
                            let (x1, x2) = (&form[i].1, &form[j].1);
                            let (s1, s2) = (x1.support(), x2.support());
                            if !s1.union(s2).is_admissible() {
                                continue;
                            }
                            let gens = [x1.conj(t), x2.conj(t)];
                            let pivots = [form[i].0, form[j].0];
                            for f in s1.intersect(s2).iter() {
                                let mut found = false;
                                for y in &self.reps {
                                    if y.get(f).is_zero() && pivot_span_contains(t, &gens, &pivots, &y.conj(t))? {
                                        found = true;
                                        break;
                                    }
                                }
                                if !found {
                                    return Ok(Some(SigWitness::Elimination {
                                        basis: b,
                                        es: vec![form[i].0, form[j].0],
                                        f: Some(f),
                                    }));
                                }
                            }
                        }
                    }
                }
                Ok(None)
            }
            SigAxiom::L2 => {
                for &b in self.matroid.bases() {
                    let form = self.fundamental(b)?;
                    let k = form.len();
                    for i in 0..k {
                        for j in i + 1..k {
                            for l in j + 1..k {
                                let tri = [&form[i], &form[j], &form[l]];
                                let admissible = |a: usize, c: usize| tri[a].1.support().union(tri[c].1.support()).is_admissible();
                                if admissible(0, 1) || admissible(0, 2) || admissible(1, 2) {
                                    continue;
                                }
                                let gens: Vec<TractVector> = tri.iter().map(|(_, x)| x.conj(t)).collect();
                                let pivots: Vec<Element> = tri.iter().map(|(e, _)| *e).collect();
                                let mut found = false;
                                for y in &self.reps {
                                    if pivots.iter().all(|e| y.get(e.dual()).is_zero())
                                        && pivot_span_contains(t, &gens, &pivots, &y.conj(t))?
                                    {
                                        found = true;
                                        break;
                                    }
                                }
                                if !found {
                                    return Ok(Some(SigWitness::Elimination { basis: b, es: pivots, f: None }));
                                }
                            }
                        }
                    }
                }
                Ok(None)
            }
        }
    }

    pub fn satisfies(&self, axiom: SigAxiom) -> Result<bool> {
        Ok(self.check_axiom(axiom)?.is_none())
    }

    /// Strong: Ot2 and L. Weak: Ot2, L-i' and L-ii'.
    pub fn check_circuit_set(&self, level: WickLevel) -> Result<Option<(SigAxiom, SigWitness)>> {
        let axioms: &[SigAxiom] = match level {
            WickLevel::Strong => &[SigAxiom::Ot2, SigAxiom::L],
            _ => &[SigAxiom::Ot2, SigAxiom::L1, SigAxiom::L2],
        };
        for &a in axioms {
            if let Some(w) = self.check_axiom(a)? {
                return Ok(Some((a, w)));
            }
        }
        Ok(None)
    }

    /// `γ(B1, B2)` for bases at distance 4 in the basis graph.
    pub fn gamma(&self, b1: Transversal, b2: Transversal) -> Result<Scalar> {
        if !self.matroid.is_basis(b1) || !self.matroid.is_basis(b2) {
            bail!(Precondition, "gamma is defined on bases");
        }
        let d = b1.diff(b2);
        if d.count_ones() != 2 {
            bail!(Precondition, "|B1 △ B2| must be 4, got {}", 2 * d.count_ones());
        }
        let p = d.trailing_zeros() as u8;
        let q = 31 - d.leading_zeros() as u8;
        let t = b1.flip(p);
        let (f, e) = (t.at(p), t.at(q));
        let x = self.rep(self.matroid.fundamental_circuit(b1, f)?)?.conj(&self.tract);
        let ratio = self.tract.div(x.get(e), x.get(f)).ok_or_else(|| Error::Axiom("fundamental circuit misses f".into()))?;
        if x.get(e).is_zero() {
            bail!(Axiom, "fundamental circuit misses e");
        }
        Ok(self.tract.mul(self.tract.eps_pow(interval_count(t, e, f) as usize), ratio))
    }

    /// Product of `γ` around a closed walk `B1, …, Bk, B1`.
    pub fn gamma_cycle(&self, cycle: &[Transversal]) -> Result<Scalar> {
        let mut acc = self.tract.one();
        for i in 0..cycle.len() {
            acc = self.tract.mul(acc, self.gamma(cycle[i], cycle[(i + 1) % cycle.len()])?);
        }
        Ok(acc)
    }

    pub fn dual(&self) -> SignatureFamily {
        SignatureFamily {
            tract: self.tract.clone(),
            matroid: self.matroid.dual(),
            reps: {
                let mut r: Vec<TractVector> = self.reps.iter().map(|x| x.star().normalized(&self.tract)).collect();
                r.sort();
                r
            },
        }
    }

    /// `𝒞|e`: project the vectors with `X(e*) = 0` and support other than `{e}`,
    /// keeping minimal supports.
    pub fn minor(&self, e: Element) -> Result<SignatureFamily> {
        let n = self.n();
        if e.pos as usize >= n || n == 0 {
            bail!(Domain, "{e} is not in the ground set");
        }
        let single = ESet::empty(n).with(e);
        let proj: Vec<TractVector> = self
            .reps
            .iter()
            .filter(|x| x.get(e.dual()).is_zero() && x.support() != single)
            .map(|x| x.project_out(e.pos))
            .collect();
        let minimal: Vec<TractVector> = proj
            .iter()
            .filter(|x| {
                let s = x.support();
                !proj.iter().any(|y| {
                    let t = y.support();
                    t != s && t.is_subset(s)
                })
            })
            .cloned()
            .collect();
        SignatureFamily::new(&self.tract, n - 1, minimal)
    }

    /// `f_*(𝒞)` for an involution-compatible homomorphism.
    pub fn pushforward(&self, f: &TractHom) -> Result<SignatureFamily> {
        if *f.source() != self.tract {
            bail!(Mismatch, "homomorphism starts at {}, family lives over {}", f.source(), self.tract);
        }
        if !f.is_involution_compatible() {
            bail!(Precondition, "{f} does not commute with the involutions");
        }
        let reps: Vec<TractVector> = self.reps.iter().map(|x| x.map(|c| f.apply(c))).collect();
        SignatureFamily::from_parts(f.target(), self.matroid.clone(), reps)
    }

    /// `φ_𝒞`: `φ(B0) = 1` at the least basis and `φ(B) = γ(B', B) φ(B')` along
    /// a breadth-first tree of the basis graph. Every edge of the graph is
    /// checked for consistency.
    pub fn to_wick(&self) -> Result<WickFunction> {
        if let Some(w) = self.check_axiom(SigAxiom::Ot2)? {
            bail!(Precondition, "Ot2 fails: {}", w.describe(&self.tract));
        }
        let t = &self.tract;
        let m = &self.matroid;
        let mut val: BTreeMap<Transversal, Scalar> = BTreeMap::new();
        let b0 = m.least_basis();
        val.insert(b0, t.one());
        let mut queue = VecDeque::from([b0]);
        while let Some(b) = queue.pop_front() {
            let vb = val[&b];
            for nb in m.neighbors(b) {
                let v = t.mul(self.gamma(b, nb)?, vb);
                match val.get(&nb) {
                    None => {
                        val.insert(nb, v);
                        queue.push_back(nb);
                    }
                    Some(&w) if w != v => {
                        bail!(Axiom, "gamma is not path independent at the edge {b} -- {nb}")
                    }
                    _ => {}
                }
            }
        }
        if val.len() != m.bases().len() {
            bail!(Axiom, "basis graph is disconnected");
        }
        WickFunction::from_map(t, self.n(), val)
    }
}

/// `𝒞_φ`: for each circuit `C`, `X̃(e)/X̃(f) = ε^{m_{e,f}} φ(T△e)/φ(T△f)` with
/// `f` the least element of `C`. The ratio is recomputed for every admissible
/// choice of `T`, and disagreement is an error.
pub fn circuits_from_wick(phi: &WickFunction) -> Result<SignatureFamily> {
    let t = phi.tract();
    let m = phi.underlying_matroid()?;
    let n = m.n();
    let mut reps = Vec::new();
    for c in m.circuits()? {
        let f = c.min_element().unwrap();
        let vec_for = |tt: Transversal| -> TractVector {
            let mut x = TractVector::zero(n);
            let denom = phi.value(tt.flip(f.pos));
            for e in c.iter() {
                let r = t.div(phi.value(tt.flip(e.pos)), denom).unwrap();
                x.set(e, t.mul(t.eps_pow(interval_count(tt, e, f) as usize), r));
            }
            x.conj(t)
        };
        let first = m.extend_circuit(c)?;
        let x = vec_for(first);
        for other in m.circuit_transversals(c) {
            if vec_for(other) != x {
                bail!(Axiom, "circuit vector on {c} depends on the transversal ({first} vs {other})");
            }
        }
        reps.push(x);
    }
    SignatureFamily::from_parts(t, m, reps)
}

/// `φ_𝒞` for a weak circuit set, validated on both ends.
pub fn weak_circuit_to_weak_wick(c: &SignatureFamily) -> Result<WickFunction> {
    if let Some((a, w)) = c.check_circuit_set(WickLevel::Weak)? {
        bail!(Precondition, "not a weak circuit set ({a}): {}", w.describe(c.tract()));
    }
    let phi = c.to_wick()?;
    if let Some(w) = phi.check_wick(WickLevel::Weak)? {
        bail!(Axiom, "result is not weak: {}", w.describe(c.tract()));
    }
    Ok(phi)
}

/// `𝒞_φ` for a weak Wick function, validated on both ends.
pub fn weak_wick_to_weak_circuit(phi: &WickFunction) -> Result<SignatureFamily> {
    if let Some(w) = phi.check_wick(WickLevel::Weak)? {
        bail!(Precondition, "not a weak Wick function: {}", w.describe(phi.tract()));
    }
    let c = circuits_from_wick(phi)?;
    if let Some((a, w)) = c.check_circuit_set(WickLevel::Weak)? {
        bail!(Axiom, "result is not a weak circuit set ({a}): {}", w.describe(phi.tract()));
    }
    Ok(c)
}
