//! Representability: backtracking search for Wick functions with a given
//! support, and the constructive pipelines for regular and sixth-root
//! orthogonal matroids.

use alloc::collections::btree_map::Entry;
use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus;
use crate::error::bail;
use crate::ground_set::{enumerate_transversals, Transversal};
use crate::ortho_matroid::OrthoMatroid;
use crate::tract_core::{check_unit_map, NullCheck, Scalar, Tract, TractHom};
use crate::wick::{WickFunction, WickLevel};
use crate::{Error, Result};

/// Default ground-set bound for searches.
pub const MAX_SEARCH_N: usize = 6;

/// Outcome of a representation search.
#[derive(Clone, Debug)]
pub struct RepSearchResult {
    pub found: Option<WickFunction>,
    /// Partial assignments visited.
    pub nodes: u64,
    pub level: WickLevel,
}

/// A four-term relation, as (transversal pairs of each product).
struct Relation {
    products: Vec<(usize, usize, usize)>,
}

struct Search<'a> {
    tract: &'a Tract,
    m: &'a OrthoMatroid,
    order: Vec<Transversal>,
    /// Relations to check once the basis at each index is assigned.
    triggers: Vec<Vec<Relation>>,
    units: Vec<Scalar>,
    level: WickLevel,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(m: &'a OrthoMatroid, tract: &'a Tract, level: WickLevel) -> Search<'a> {
        // Breadth-first order through the basis graph from the least basis.
        let b0 = m.least_basis();
        let mut order = vec![b0];
        let mut pos: BTreeMap<Transversal, usize> = BTreeMap::from([(b0, 0)]);
        let mut queue = VecDeque::from([b0]);
        while let Some(b) = queue.pop_front() {
            for nb in m.neighbors(b) {
                if let Entry::Vacant(e) = pos.entry(nb) {
                    e.insert(order.len());
                    order.push(nb);
                    queue.push_back(nb);
                }
            }
        }
        for &b in m.bases() {
            if let Entry::Vacant(e) = pos.entry(b) {
                e.insert(order.len());
                order.push(b);
            }
        }
        let n = m.n();
        let mut triggers: Vec<Vec<Relation>> = (0..order.len()).map(|_| Vec::new()).collect();
        let all: Vec<Transversal> = enumerate_transversals(n).collect();
        for (i, &t1) in all.iter().enumerate() {
            for &t2 in &all[i + 1..] {
                let d = t1.diff(t2);
                if d.count_ones() != 4 {
                    continue;
                }
                let mut products = Vec::new();
                for (k, p) in (0..n as u8).filter(|&p| d >> p & 1 == 1).enumerate() {
                    if let (Some(&a), Some(&b)) = (pos.get(&t1.flip(p)), pos.get(&t2.flip(p))) {
                        products.push((k + 1, a, b));
                    }
                }
                if products.is_empty() {
                    continue;
                }
                let last = products.iter().map(|&(_, a, b)| a.max(b)).max().unwrap();
                triggers[last].push(Relation { products });
            }
        }
        Search { tract, m, order, triggers, units: tract.units(), level, nodes: 0 }
    }

    fn consistent(&self, idx: usize, vals: &[Scalar]) -> Result<bool> {
        let t = self.tract;
        let mut terms = Vec::with_capacity(4);
        for r in &self.triggers[idx] {
            terms.clear();
            for &(k, a, b) in &r.products {
                terms.push(t.mul(t.eps_pow(k), t.mul(vals[a], vals[b])));
            }
            if !t.is_null(&terms)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn to_wick(&self, vals: &[Scalar]) -> Result<WickFunction> {
        WickFunction::from_map(self.tract, self.m.n(), self.order.iter().copied().zip(vals.iter().copied()))
    }

    /// Visits complete assignments passing the full check; `visit` returns
    /// false to stop.
    fn run(&mut self, visit: &mut dyn FnMut(WickFunction) -> bool) -> Result<()> {
        let mut vals = vec![Scalar::Zero; self.order.len()];
        vals[0] = self.tract.one();
        self.nodes = 1;
        if !self.consistent(0, &vals)? {
            return Ok(());
        }
        self.rec(1, &mut vals, visit).map(|_| ())
    }

    fn rec(&mut self, i: usize, vals: &mut Vec<Scalar>, visit: &mut dyn FnMut(WickFunction) -> bool) -> Result<bool> {
        if i == self.order.len() {
            let phi = self.to_wick(vals)?;
            if phi.check_wick(self.level)?.is_none() {
                return Ok(visit(phi));
            }
            return Ok(true);
        }
        for u in 0..self.units.len() {
            vals[i] = self.units[u];
            self.nodes += 1;
            if self.consistent(i, vals)? && !self.rec(i + 1, vals, visit)? {
                return Ok(false);
            }
        }
        vals[i] = Scalar::Zero;
        Ok(true)
    }
}

fn search_precheck(m: &OrthoMatroid, tract: &Tract, max_n: usize) -> Result<()> {
    if !tract.is_finite() {
        bail!(Domain, "representation search needs a finite tract, got {tract}");
    }
    if m.n() > max_n {
        bail!(Size, "n = {} exceeds the search bound {max_n}", m.n());
    }
    Ok(())
}

/// Finds a Wick function over `tract` at the given level whose support is the
/// basis set of `m`, or reports that none exists.
pub fn search_representation(m: &OrthoMatroid, tract: &Tract, level: WickLevel) -> Result<RepSearchResult> {
    search_representation_bounded(m, tract, level, MAX_SEARCH_N)
}

/// As [`search_representation`] with an explicit bound on `n`.
pub fn search_representation_bounded(m: &OrthoMatroid, tract: &Tract, level: WickLevel, max_n: usize) -> Result<RepSearchResult> {
    search_precheck(m, tract, max_n)?;
    let mut s = Search::new(m, tract, level);
    let mut found = None;
    s.run(&mut |phi| {
        found = Some(phi);
        false
    })?;
    Ok(RepSearchResult { found, nodes: s.nodes, level })
}

/// Every representation (normalized at the least basis), up to `limit`.
pub fn search_all(m: &OrthoMatroid, tract: &Tract, level: WickLevel, limit: usize) -> Result<Vec<WickFunction>> {
    search_precheck(m, tract, MAX_SEARCH_N)?;
    let mut s = Search::new(m, tract, level);
    let mut out = Vec::new();
    s.run(&mut |phi| {
        out.push(phi);
        out.len() < limit
    })?;
    Ok(out)
}

/// Collapses a function over `A × B` (with `A` having one unit) to `U0` by
/// `(1, ±1) ↦ ±1`. Not a homomorphism; the result is checked by the caller.
fn collapse_to_regular(phi: &WickFunction) -> Result<WickFunction> {
    let t = phi.tract();
    let (_, b) = t.factors().ok_or_else(|| Error::Domain(format!("{t} is not a product")))?;
    let u0 = Tract::regular();
    let bad = core::cell::Cell::new(None);
    let out = phi.map_values(&u0, |x| {
        if x.is_zero() {
            return Scalar::Zero;
        }
        let y = t.project(1, x).unwrap_or(Scalar::Zero);
        if y == b.one() {
            u0.one()
        } else if y == b.eps() {
            u0.eps()
        } else {
            bad.set(Some(y));
            Scalar::Zero
        }
    })?;
    if let Some(y) = bad.get() {
        bail!(Domain, "value {} is not a sign", b.fmt_elem(y));
    }
    Ok(out)
}

/// Unit images of the sign collapse `A × B → U0` for `A` with one unit and
/// `B` with units `{1, -1}`; used to confirm that it is not a homomorphism.
pub fn sign_collapse_images(product: &Tract) -> Result<Vec<u32>> {
    let (a, b) = product.factors().ok_or_else(|| Error::Domain(format!("{product} is not a product")))?;
    if a.unit_count() != Some(1) || b.unit_count() != Some(2) {
        bail!(Domain, "expected factors with one and two units");
    }
    Ok(product
        .units()
        .into_iter()
        .map(|u| if product.project(1, u).ok() == Some(b.one()) { 0 } else { 1 })
        .collect())
}

/// Whether the sign collapse on `product` preserves null sums up to `len`.
pub fn sign_collapse_is_homomorphism(product: &Tract, len: usize) -> Result<bool> {
    let imgs = sign_collapse_images(product)?;
    Ok(matches!(check_unit_map(product, &Tract::regular(), &imgs, len)?, NullCheck::Preserved(_)))
}

/// Two field-like representations combined into one over `U0`.
#[derive(Clone, Debug)]
pub struct RegularReport {
    pub first: Option<WickFunction>,
    pub second: Option<WickFunction>,
    /// The combined function, when it verifies as strong over `U0`.
    pub regular: Option<WickFunction>,
    pub notes: Vec<String>,
}

fn combine_regular(first: &WickFunction, second: &WickFunction, notes: &mut Vec<String>) -> Result<Option<WickFunction>> {
    let phi = collapse_to_regular(&first.product_wick(second)?)?;
    if let Some(w) = phi.check_wick(WickLevel::Weak)? {
        notes.push(format!("combined function is not weak over U0: {}", w.describe(phi.tract())));
        return Ok(None);
    }
    if let Some(w) = phi.check_wick(WickLevel::Strong)? {
        notes.push(format!("combined function is weak but not strong over U0: {}", w.describe(phi.tract())));
        return Ok(None);
    }
    Ok(Some(phi))
}

/// Searches over `F2` and `F3` and combines the results with
/// `(1, ±1) ↦ ±1` into a `U0` representation.
pub fn is_regular(m: &OrthoMatroid) -> Result<RegularReport> {
    let f2 = search_representation(m, &Tract::field(2)?, WickLevel::Strong)?.found;
    let mut notes = Vec::new();
    let f3 = match f2 {
        Some(_) => search_representation(m, &Tract::field(3)?, WickLevel::Strong)?.found,
        None => {
            notes.push("no F2 representation".into());
            None
        }
    };
    if f2.is_some() && f3.is_none() {
        notes.push("no F3 representation".into());
    }
    let regular = match (&f2, &f3) {
        (Some(a), Some(b)) => combine_regular(a, b, &mut notes)?,
        _ => None,
    };
    Ok(RegularReport { first: f2, second: f3, regular, notes })
}

/// Report for the route through `F2` and the sign hyperfield.
#[derive(Clone, Debug)]
pub struct M4FreeReport {
    pub m4_free: bool,
    pub report: Option<RegularReport>,
    /// Every four-term relation of the functions found has a zero product.
    pub zero_product_holds: Option<bool>,
}

/// Whether every relation between transversals differing in four positions
/// has at least one zero product.
pub fn four_term_has_zero_product(phi: &WickFunction) -> bool {
    let n = phi.n();
    let all: Vec<Transversal> = enumerate_transversals(n).collect();
    for (i, &t1) in all.iter().enumerate() {
        for &t2 in &all[i + 1..] {
            let d = t1.diff(t2);
            if d.count_ones() == 4 && phi.wick_relation_sum(t1, t2).len() == 4 {
                return false;
            }
        }
    }
    true
}

/// For matroids without an `M4` minor: representations over `F2` and the
/// sign hyperfield combine into a `U0` representation.
pub fn check_m4_free_theorem(m: &OrthoMatroid) -> Result<M4FreeReport> {
    let m4_free = !m.contains_minor(&corpus::m4())?;
    if !m4_free {
        return Ok(M4FreeReport { m4_free, report: None, zero_product_holds: None });
    }
    let f2 = search_representation(m, &Tract::field(2)?, WickLevel::Strong)?.found;
    let mut notes = Vec::new();
    let s = match f2 {
        Some(_) => search_representation(m, &Tract::sign(), WickLevel::Strong)?.found,
        None => {
            notes.push("no F2 representation".into());
            None
        }
    };
    if f2.is_some() && s.is_none() {
        notes.push("no representation over S".into());
    }
    let regular = match (&f2, &s) {
        (Some(a), Some(b)) => combine_regular(a, b, &mut notes)?,
        _ => None,
    };
    let zero = [&f2, &s, &regular].iter().filter_map(|x| x.as_ref()).all(four_term_has_zero_product);
    Ok(M4FreeReport { m4_free, report: Some(RegularReport { first: f2, second: s, regular, notes }), zero_product_holds: Some(zero) })
}

/// The bijection between `R6` and `F3 × F4` sending `ζ` to `(-1, ω)`.
///
/// The map `R6 → F3 × F4` is a homomorphism. Its inverse preserves null sums
/// of up to three terms (the relations `p + q = 1` of a partial field) but not
/// four: `(1,1) + (1,1) + (-1,ω) + (-1,ω)` is null in both factors while
/// `2 + 2ζ` is not zero in `Z[ζ]`.
#[derive(Clone, Debug)]
pub struct R6Iso {
    pub forward: TractHom,
    /// Images in `R6` of the units of `F3 × F4`, by unit index.
    pub inverse: Vec<Scalar>,
    /// Longest sum length up to which the inverse was found null preserving.
    pub inverse_len: usize,
    /// A null sum of `F3 × F4` (unit indices) whose image is not null, if any
    /// up to the searched length.
    pub inverse_broken: Option<Vec<u32>>,
}

/// Finds the involution-compatible bijective homomorphism `R6 → F3 × F4`
/// and checks its inverse on sums of up to `len` terms.
pub fn r6_iso(len: usize) -> Result<R6Iso> {
    let p = Tract::product(&Tract::field(3)?, &Tract::field(4)?)?;
    let r6 = Tract::sixth_root();
    for h in TractHom::find_all(&r6, &p)? {
        if !h.is_involution_compatible() {
            continue;
        }
        let mut inv = vec![u32::MAX; 6];
        for u in 0..6u32 {
            if let Scalar::Unit(x) = h.apply(Scalar::Unit(u)) {
                inv[x as usize] = u;
            }
        }
        if inv.contains(&u32::MAX) {
            continue;
        }
        let mut inverse_len = 1;
        let mut inverse_broken = None;
        for l in 2..=len {
            match check_unit_map(&p, &r6, &inv, l)? {
                NullCheck::Preserved(_) => inverse_len = l,
                NullCheck::Broken(w) => {
                    inverse_broken = Some(w);
                    break;
                }
            }
        }
        if inverse_len < 3 {
            continue;
        }
        let inverse = inv.into_iter().map(Scalar::Unit).collect();
        return Ok(R6Iso { forward: h, inverse, inverse_len, inverse_broken });
    }
    bail!(Axiom, "no bijection R6 -> F3 x F4 found")
}

/// The homomorphism `R6 → F` sending `ζ` to a root of `x² - x + 1`.
pub fn sixth_root_hom(target: &Tract) -> Result<TractHom> {
    if !target.is_field() {
        bail!(Domain, "{target} is not a field");
    }
    let r6 = Tract::sixth_root();
    for u in target.units() {
        let u2 = target.mul(u, u);
        let s = target.field_add(target.field_add(u2, target.mul(target.eps(), u))?, target.one())?;
        if !s.is_zero() {
            continue;
        }
        let mut imgs = Vec::with_capacity(6);
        let mut acc = target.one();
        for _ in 0..6 {
            imgs.push(acc);
            acc = target.mul(acc, u);
        }
        if let Ok(h) = TractHom::from_unit_images(&r6, target, &imgs) {
            return Ok(h);
        }
    }
    bail!(Domain, "x^2 - x + 1 has no usable root in {target}")
}

/// Report for the `F3`/`F4` route to `R6`.
#[derive(Clone, Debug)]
pub struct R6Report {
    pub f3: Option<WickFunction>,
    pub f4: Option<WickFunction>,
    pub r6: Option<WickFunction>,
}

/// Searches over `F3` and `F4`, transports the product to `R6` through the
/// inverse of [`R6Iso::forward`] and verifies the result over `R6`.
pub fn is_sixth_root_representable(m: &OrthoMatroid) -> Result<R6Report> {
    let f3 = search_representation(m, &Tract::field(3)?, WickLevel::Strong)?.found;
    let f4 = match f3 {
        Some(_) => search_representation(m, &Tract::field(4)?, WickLevel::Strong)?.found,
        None => None,
    };
    let r6 = match (&f3, &f4) {
        (Some(a), Some(b)) => {
            let iso = r6_iso(3)?;
            let prod = a.product_wick(b)?;
            let phi = prod.map_values(&Tract::sixth_root(), |x| match x {
                Scalar::Unit(u) => iso.inverse[u as usize],
                _ => Scalar::Zero,
            })?;
            match phi.check_wick(WickLevel::Strong)? {
                None => Some(phi),
                Some(_) => None,
            }
        }
        _ => None,
    };
    Ok(R6Report { f3, f4, r6 })
}

/// A pushforward of an `R6` representation and whether it verified.
#[derive(Clone, Debug)]
pub struct PushRow {
    pub hom: TractHom,
    pub phi: WickFunction,
    pub strong: bool,
}

/// Pushes an `R6` representation to `F4`, `F9`, `F7` and `F13`.
pub fn pushforward_targets(phi: &WickFunction) -> Result<Vec<PushRow>> {
    if *phi.tract() != Tract::sixth_root() {
        bail!(Mismatch, "expected a function over R6, got {}", phi.tract());
    }
    let targets = [Tract::field(4)?, Tract::parse("F9[id]")?, Tract::field(7)?, Tract::field(13)?];
    let mut out = Vec::new();
    for t in &targets {
        let hom = sixth_root_hom(t)?;
        let psi = phi.pushforward(&hom)?;
        let strong = psi.check_wick(WickLevel::Strong)?.is_none();
        out.push(PushRow { hom, phi: psi, strong });
    }
    Ok(out)
}

/// One row of the probe on matroids with an `M4` minor.
#[derive(Clone, Debug)]
pub struct ProbeRow {
    pub binary: bool,
    pub sign: bool,
    pub regular: bool,
}

/// For matroids with an `M4` minor, records whether `F2` and `S`
/// representability coincide with regularity. A mismatch would be a
/// counterexample to extending the `M4`-free result; nothing is asserted.
pub fn probe_m4(m: &OrthoMatroid) -> Result<ProbeRow> {
    let binary = search_representation(m, &Tract::field(2)?, WickLevel::Strong)?.found.is_some();
    let sign = search_representation(m, &Tract::sign(), WickLevel::Strong)?.found.is_some();
    let regular = search_representation(m, &Tract::regular(), WickLevel::Strong)?.found.is_some();
    Ok(ProbeRow { binary, sign, regular })
}

/// The homomorphism `U0 → R6`.
pub fn regular_to_sixth_root() -> Result<TractHom> {
    let r6 = Tract::sixth_root();
    TractHom::from_unit_images(&Tract::regular(), &r6, &[r6.one(), r6.eps()])
}
