//! Orthogonal vector sets: orthogonal complements, elementary vectors,
//! support bases, fundamental circuit forms and the axioms V1-V3.
//!
//! Families are materialized, so everything here needs a finite tract.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::bail;
use crate::ground_set::{enumerate_transversals, ESet, Element, Transversal};
use crate::signature::{inner_product_star, overlap, pivot_span_contains, SignatureFamily, TractVector};
use crate::tract_core::{FormalSum, Scalar, Tract, TractHom};
use crate::Result;

/// Largest family `perp` will materialize.
pub const MAX_VECTORS: usize = 4_000_000;

/// A finite set of vectors in `F^E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorFamily {
    tract: Tract,
    n: u8,
    vectors: Vec<TractVector>,
}

/// Why a family is not an orthogonal vector set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VectorWitness {
    /// Two elementary vectors with overlap at most 2 that are not orthogonal.
    V1 { x: TractVector, y: TractVector, sum: FormalSum },
    /// There is no support basis.
    NoSupportBasis,
    /// No vector fits the fundamental circuit form at `(basis, e)`.
    V2 { basis: Transversal, e: Element },
    /// Two different vectors fit the form at `(basis, e)`.
    V3Ambiguous { basis: Transversal, e: Element },
    /// `x` is in every span but not in the family.
    V3Missing { x: TractVector },
    /// `x` is in the family but not in the span at `basis`.
    V3Extra { x: TractVector, basis: Transversal },
}

impl VectorWitness {
    pub fn axiom(&self) -> &'static str {
        match self {
            VectorWitness::V1 { .. } => "V1",
            VectorWitness::NoSupportBasis | VectorWitness::V2 { .. } => "V2",
            _ => "V3",
        }
    }

    pub fn describe(&self, tract: &Tract) -> String {
        match self {
            VectorWitness::V1 { x, y, sum } => {
                let terms: Vec<String> = sum.terms().iter().map(|&t| tract.fmt_elem(t)).collect();
                format!("X = {}, Y = {}, <X,Y*> = {}", x.fmt_with(tract), y.fmt_with(tract), terms.join(" + "))
            }
            VectorWitness::NoSupportBasis => "no support basis".into(),
            VectorWitness::V2 { basis, e } => format!("basis {basis}: no fundamental vector for {e}"),
            VectorWitness::V3Ambiguous { basis, e } => format!("basis {basis}: fundamental vector for {e} is not unique"),
            VectorWitness::V3Missing { x } => format!("{} lies in every span but not in the family", x.fmt_with(tract)),
            VectorWitness::V3Extra { x, basis } => format!("{} is not in the span at basis {basis}", x.fmt_with(tract)),
        }
    }
}

impl fmt::Display for VectorWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.axiom())
    }
}

impl VectorFamily {
    pub fn new(tract: &Tract, n: usize, vectors: impl IntoIterator<Item = TractVector>) -> Result<VectorFamily> {
        if !tract.is_finite() {
            bail!(Domain, "vector families need a finite tract, got {tract}");
        }
        let mut v = Vec::new();
        for x in vectors {
            if x.n() != n {
                bail!(Mismatch, "vector on {} pairs in a family on {n}", x.n());
            }
            if x.coords().iter().any(|&c| !tract.contains(c)) {
                bail!(Domain, "vector has entries outside {tract}");
            }
            v.push(x);
        }
        v.sort();
        v.dedup();
        Ok(VectorFamily { tract: tract.clone(), n: n as u8, vectors: v })
    }

    /// Closes a set under unit scaling.
    pub fn scaling_closure(tract: &Tract, n: usize, vectors: &[TractVector]) -> Result<VectorFamily> {
        let units = tract.units();
        Self::new(tract, n, vectors.iter().flat_map(|x| units.iter().map(move |&c| x.scale(tract, c))).collect::<Vec<_>>())
    }

    pub fn tract(&self) -> &Tract {
        &self.tract
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Sorted, without repeats.
    pub fn vectors(&self) -> &[TractVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, x: &TractVector) -> bool {
        self.vectors.binary_search(x).is_ok()
    }

    /// Normalized representatives of the nonzero vectors, one per scaling class.
    pub fn representatives(&self) -> Vec<TractVector> {
        let mut r: Vec<TractVector> = self.vectors.iter().filter(|x| !x.is_zero()).map(|x| x.normalized(&self.tract)).collect();
        r.sort();
        r.dedup();
        r
    }

    fn nonzero(&self) -> impl Iterator<Item = &TractVector> {
        self.vectors.iter().filter(|x| !x.is_zero())
    }

    /// Nonzero vectors of minimal support whose support is admissible.
    pub fn elementary_vectors(&self) -> VectorFamily {
        let supports: BTreeSet<u32> = self.nonzero().map(|x| x.support().mask()).collect();
        let minimal: BTreeSet<u32> = supports.iter().copied().filter(|&s| !supports.iter().any(|&t| t != s && t & !s == 0)).collect();
        let v = self
            .nonzero()
            .filter(|x| {
                let s = x.support();
                minimal.contains(&s.mask()) && s.is_admissible()
            })
            .cloned()
            .collect();
        VectorFamily { tract: self.tract.clone(), n: self.n, vectors: v }
    }

    /// Transversals containing the support of no nonzero vector.
    pub fn support_bases(&self) -> Vec<Transversal> {
        let supports: BTreeSet<u32> = self.nonzero().map(|x| x.support().mask()).collect();
        enumerate_transversals(self.n())
            .filter(|t| {
                let m = t.to_set().mask();
                supports.iter().all(|&s| s & !m != 0)
            })
            .collect()
    }

    /// Vectors `X` with support inside `B △ {e, e*}` and `X(e) = 1`.
    pub fn fundamental_vectors(&self, b: Transversal, e: Element) -> Vec<&TractVector> {
        let allowed = b.flip(e.pos).to_set();
        let one = self.tract.one();
        self.vectors.iter().filter(|x| x.get(e) == one && x.support().is_subset(allowed)).collect()
    }

    /// `X_{B,e}` for `e ∈ B*`, ordered by position. Errors when a vector is
    /// missing or not unique.
    pub fn fundamental_circuit_form(&self, b: Transversal) -> Result<Vec<TractVector>> {
        let mut out = Vec::new();
        for p in 0..self.n() as u8 {
            let e = b.at(p).dual();
            match self.fundamental_vectors(b, e).as_slice() {
                [x] => out.push((*x).clone()),
                [] => bail!(Axiom, "basis {b}: no fundamental vector for {e}"),
                _ => bail!(Axiom, "basis {b}: fundamental vector for {e} is not unique"),
            }
        }
        Ok(out)
    }

    /// Checks V1, V2 and V3 (both inclusions).
    pub fn check_vector_set(&self) -> Result<Option<VectorWitness>> {
        let t = &self.tract;
        let elem = self.elementary_vectors();
        for x in elem.vectors() {
            for y in elem.vectors() {
                let k = overlap(x, y);
                if k == 0 || k > 2 {
                    continue;
                }
                let sum = inner_product_star(t, x, y);
                if !t.is_null(sum.terms())? {
                    return Ok(Some(VectorWitness::V1 { x: x.clone(), y: y.clone(), sum }));
                }
            }
        }
        let bases = self.support_bases();
        if bases.is_empty() {
            return Ok(Some(VectorWitness::NoSupportBasis));
        }
        let mut forms = Vec::with_capacity(bases.len());
        for &b in &bases {
            let mut gens = Vec::new();
            for p in 0..self.n() as u8 {
                let e = b.at(p).dual();
                match self.fundamental_vectors(b, e).as_slice() {
                    [x] => gens.push(x.conj(t)),
                    [] => return Ok(Some(VectorWitness::V2 { basis: b, e })),
                    _ => return Ok(Some(VectorWitness::V3Ambiguous { basis: b, e })),
                }
            }
            forms.push(gens);
        }
        let pivots = |b: Transversal| -> Vec<Element> { (0..self.n() as u8).map(|p| b.at(p).dual()).collect() };
        let in_all = |x: &TractVector| -> Result<Option<Transversal>> {
            let xc = x.conj(t);
            for (&b, gens) in bases.iter().zip(&forms) {
                if !pivot_span_contains(t, gens, &pivots(b), &xc)? {
                    return Ok(Some(b));
                }
            }
            Ok(None)
        };
        for x in &self.vectors {
            if let Some(b) = in_all(x)? {
                return Ok(Some(VectorWitness::V3Extra { x: x.clone(), basis: b }));
            }
        }
        for x in span_candidates(t, bases[0], &forms[0])? {
            if !self.contains(&x) && in_all(&x)?.is_none() {
                return Ok(Some(VectorWitness::V3Missing { x }));
            }
        }
        Ok(None)
    }

    pub fn is_vector_set(&self) -> Result<bool> {
        Ok(self.check_vector_set()?.is_none())
    }

    /// `𝒱|e = {π(X) : X(e*) = 0}`, with whether it is an orthogonal vector set.
    pub fn minor(&self, e: Element) -> Result<(VectorFamily, bool)> {
        if self.n() == 0 || e.pos as usize >= self.n() {
            bail!(Domain, "{e} is not in the ground set");
        }
        let v: Vec<TractVector> = self.vectors.iter().filter(|x| x.get(e.dual()).is_zero()).map(|x| x.project_out(e.pos)).collect();
        let fam = VectorFamily::new(&self.tract, self.n() - 1, v)?;
        let ok = fam.is_vector_set()?;
        Ok((fam, ok))
    }

    /// `f_*(𝒱)`.
    pub fn pushforward(&self, f: &TractHom) -> Result<VectorFamily> {
        if *f.source() != self.tract {
            bail!(Mismatch, "homomorphism starts at {}, family lives over {}", f.source(), self.tract);
        }
        if !f.is_involution_compatible() {
            bail!(Precondition, "{f} does not commute with the involutions");
        }
        VectorFamily::new(f.target(), self.n(), self.vectors.iter().map(|x| x.map(|c| f.apply(c))).collect::<Vec<_>>())
    }

    /// Whether the family is a Lagrangian subspace of `F^E` for the form
    /// `⟨X, Y*⟩`: a linear subspace of dimension `n` that is isotropic.
    /// Needs a field with the identity involution, where the form is bilinear.
    pub fn is_lagrangian(&self) -> Result<bool> {
        let t = &self.tract;
        if !t.is_field() {
            bail!(Domain, "{t} is not a field");
        }
        if !t.involution_is_identity() {
            bail!(Precondition, "the form is only bilinear for the identity involution");
        }
        let add = |x: &TractVector, y: &TractVector| -> Result<TractVector> {
            let c = x.coords().iter().zip(y.coords()).map(|(&a, &b)| t.field_add(a, b)).collect::<Result<Vec<_>>>()?;
            TractVector::new(self.n(), c)
        };
        // Greedy basis; the span is grown one generator at a time.
        let mut span: BTreeSet<TractVector> = BTreeSet::from([TractVector::zero(self.n())]);
        let mut basis: Vec<&TractVector> = Vec::new();
        let units = t.units();
        for x in &self.vectors {
            if span.contains(x) {
                continue;
            }
            basis.push(x);
            let mut next = span.clone();
            for s in &span {
                for &c in &units {
                    next.insert(add(s, &x.scale(t, c))?);
                }
            }
            if next.len() > self.len() {
                return Ok(false);
            }
            span = next;
        }
        if span.len() != self.len() || basis.len() != self.n() {
            return Ok(false);
        }
        for x in &basis {
            for y in &basis {
                if !t.is_null(inner_product_star(t, x, y).terms())? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn fmt_with(&self) -> String {
        let mut s = String::new();
        for x in &self.vectors {
            s.push_str(&x.fmt_with(&self.tract));
            s.push('\n');
        }
        s
    }
}

/// Every `X` whose conjugate lies in the span of the conjugated form `gens`
/// at `b`. The coordinates on `B*` fix the coefficients; each coordinate on
/// `B` then ranges over the values completing a null sum.
fn span_candidates(t: &Tract, b: Transversal, gens: &[TractVector]) -> Result<Vec<TractVector>> {
    let n = b.n();
    let elems = t.elements();
    let eps = t.eps();
    let mut out = Vec::new();
    let mut coef = vec![0usize; n];
    loop {
        let c: Vec<Scalar> = coef.iter().map(|&i| elems[i]).collect();
        let mut choices: Vec<(Element, Vec<Scalar>)> = Vec::new();
        let mut base = TractVector::zero(n);
        for p in 0..n as u8 {
            base.set(b.at(p).dual(), c[p as usize]);
            let i = b.at(p);
            let mut terms: Vec<Scalar> = gens.iter().zip(&c).map(|(g, &cj)| t.mul(cj, g.get(i))).collect();
            terms.push(Scalar::Zero);
            let last = terms.len() - 1;
            let mut ok = Vec::new();
            for &y in &elems {
                terms[last] = t.mul(eps, y);
                if t.is_null(&terms)? {
                    ok.push(y);
                }
            }
            choices.push((i, ok));
        }
        let mut pick = vec![0usize; n];
        if choices.iter().all(|(_, ok)| !ok.is_empty()) {
            loop {
                let mut x = base.clone();
                for ((e, ok), &k) in choices.iter().zip(&pick) {
                    x.set(*e, ok[k]);
                }
                out.push(x.conj(t));
                if out.len() > MAX_VECTORS {
                    bail!(Size, "more than {MAX_VECTORS} span candidates");
                }
                if !odometer(&mut pick, |j| choices[j].1.len()) {
                    break;
                }
            }
        }
        if !odometer(&mut coef, |_| elems.len()) {
            break;
        }
    }
    Ok(out)
}

/// Advances a mixed-radix counter; false after the last value.
fn odometer(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for (j, d) in digits.iter_mut().enumerate() {
        *d += 1;
        if *d < radix(j) {
            return true;
        }
        *d = 0;
    }
    false
}

/// `𝒮^⊥ = {X ∈ F^E : ⟨X, Y*⟩ ∈ N_F for all Y ∈ 𝒮}`, by backtracking over
/// coordinates with each generator checked as soon as its coordinates are set.
pub fn perp(tract: &Tract, n: usize, gens: &[TractVector]) -> Result<VectorFamily> {
    if !tract.is_finite() {
        bail!(Domain, "perp needs a finite tract, got {tract}");
    }
    if let Some(g) = gens.iter().find(|g| g.n() != n) {
        bail!(Mismatch, "generator on {} pairs, expected {n}", g.n());
    }
    // Coordinates of X met by generator Y: supp(Y*). Small generators first.
    let mut order: Vec<usize> = Vec::new();
    let mut sorted: Vec<&TractVector> = gens.iter().collect();
    sorted.sort_by_key(|g| g.support().len());
    let coord_index = |e: Element| e.pos as usize + if e.starred { n } else { 0 };
    for g in &sorted {
        for e in g.support().star().iter() {
            let i = coord_index(e);
            if !order.contains(&i) {
                order.push(i);
            }
        }
    }
    for i in 0..2 * n {
        if !order.contains(&i) {
            order.push(i);
        }
    }
    let depth_of = |i: usize| order.iter().position(|&j| j == i).unwrap();
    // For each depth, generators completed there, as (coordinate, Ỹ(i*)).
    let mut checks: Vec<Vec<Vec<(usize, Scalar)>>> = vec![Vec::new(); 2 * n + 1];
    for g in &sorted {
        let gc = g.conj(tract);
        let terms: Vec<(usize, Scalar)> = g.support().star().iter().map(|e| (coord_index(e), gc.get(e.dual()))).collect();
        if terms.is_empty() {
            continue;
        }
        let d = terms.iter().map(|&(i, _)| depth_of(i)).max().unwrap() + 1;
        checks[d].push(terms);
    }
    let elems = tract.elements();
    let mut xt = vec![Scalar::Zero; 2 * n];
    let mut out = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        d: usize,
        tract: &Tract,
        n: usize,
        order: &[usize],
        checks: &[Vec<Vec<(usize, Scalar)>>],
        elems: &[Scalar],
        xt: &mut [Scalar],
        out: &mut Vec<TractVector>,
    ) -> Result<()> {
        let mut buf: Vec<Scalar> = Vec::new();
        for terms in &checks[d] {
            buf.clear();
            buf.extend(terms.iter().map(|&(i, w)| tract.mul(xt[i], w)));
            if !tract.is_null(&buf)? {
                return Ok(());
            }
        }
        if d == order.len() {
            // xt holds X̃; undo the conjugation.
            let x = TractVector::new(n, xt.to_vec())?.conj(tract);
            out.push(x);
            if out.len() > MAX_VECTORS {
                bail!(Size, "orthogonal complement exceeds {MAX_VECTORS} vectors");
            }
            return Ok(());
        }
        for &v in elems {
            xt[order[d]] = v;
            rec(d + 1, tract, n, order, checks, elems, xt, out)?;
        }
        xt[order[d]] = Scalar::Zero;
        Ok(())
    }
    rec(0, tract, n, &order, &checks, &elems, &mut xt, &mut out)?;
    VectorFamily::new(tract, n, out)
}

/// `𝒞^⊥` for a signature (the generators are its representatives).
pub fn signature_perp(c: &SignatureFamily) -> Result<VectorFamily> {
    perp(c.tract(), c.n(), c.reps())
}

/// The signature formed by the elementary vectors of an orthogonal vector set.
pub fn elementary_signature(v: &VectorFamily) -> Result<SignatureFamily> {
    let reps = v.elementary_vectors().representatives();
    SignatureFamily::new(v.tract(), v.n(), reps)
}

/// Supports of a family, for reports.
pub fn supports(v: &[TractVector]) -> Vec<ESet> {
    let s: BTreeSet<ESet> = v.iter().map(|x| x.support()).collect();
    s.into_iter().collect()
}
