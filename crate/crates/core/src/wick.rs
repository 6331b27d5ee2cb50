//! Wick functions over tracts and the bridge to Grassmann-Plücker functions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::bail;
use crate::ground_set::{enumerate_transversals, Element, Transversal, MAX_N};
use crate::ortho_matroid::{check_bases, OrthoMatroid};
use crate::tract_core::{FormalSum, Scalar, Tract, TractHom};
use crate::Result;

/// Strength of the Wick relations being imposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WickLevel {
    /// Every relation.
    Strong,
    /// Relations with at most four nonzero products.
    Moderate,
    /// Four-term relations only.
    Weak,
}

impl WickLevel {
    pub fn parse(s: &str) -> Result<WickLevel> {
        Ok(match s {
            "strong" => WickLevel::Strong,
            "moderate" => WickLevel::Moderate,
            "weak" => WickLevel::Weak,
            _ => bail!(Parse, "unknown level {s:?} (expected strong, moderate or weak)"),
        })
    }
}

impl fmt::Display for WickLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WickLevel::Strong => "strong",
            WickLevel::Moderate => "moderate",
            WickLevel::Weak => "weak",
        })
    }
}

/// A pair of transversals whose Wick relation is not null.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WickWitness {
    pub t1: Transversal,
    pub t2: Transversal,
    pub sum: FormalSum,
}

impl WickWitness {
    pub fn describe(&self, tract: &Tract) -> String {
        let terms: Vec<String> = self.sum.terms().iter().map(|&x| tract.fmt_elem(x)).collect();
        format!("T1 = {}, T2 = {}, sum = {}", self.t1, self.t2, terms.join(" + "))
    }
}

/// A map from transversals to a tract, stored with value 1 at the least
/// transversal of its support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WickFunction {
    tract: Tract,
    n: u8,
    values: Vec<Scalar>,
}

impl WickFunction {
    /// Takes values indexed by [`Transversal::index`]. Fails when every value is zero.
    pub fn new(tract: &Tract, n: usize, values: Vec<Scalar>) -> Result<WickFunction> {
        if n > MAX_N {
            bail!(Size, "n = {n} exceeds {MAX_N}");
        }
        if values.len() != 1 << n {
            bail!(Domain, "expected {} values, got {}", 1usize << n, values.len());
        }
        if let Some(x) = values.iter().find(|&&x| !tract.contains(x)) {
            bail!(Domain, "{x:?} is not an element of {tract}");
        }
        let mut w = WickFunction { tract: tract.clone(), n: n as u8, values };
        w.normalize()?;
        Ok(w)
    }

    pub fn from_map(tract: &Tract, n: usize, entries: impl IntoIterator<Item = (Transversal, Scalar)>) -> Result<WickFunction> {
        let mut values = vec![Scalar::Zero; 1 << n];
        for (t, x) in entries {
            if t.n() != n {
                bail!(Mismatch, "transversal {t} is not on {n} pairs");
            }
            values[t.index()] = x;
        }
        Self::new(tract, n, values)
    }

    /// Value 1 on every basis of `m`.
    pub fn indicator(tract: &Tract, m: &OrthoMatroid) -> WickFunction {
        let one = tract.one();
        Self::from_map(tract, m.n(), m.bases().iter().map(|&b| (b, one))).expect("matroids have bases")
    }

    fn normalize(&mut self) -> Result<()> {
        let Some(anchor) = self.least_support() else { bail!(Axiom, "a Wick function is not identically zero") };
        let c = self.tract.inv(self.values[anchor.index()]).unwrap();
        let t = self.tract.clone();
        for v in &mut self.values {
            *v = t.mul(*v, c);
        }
        Ok(())
    }

    fn least_support(&self) -> Option<Transversal> {
        enumerate_transversals(self.n()).find(|t| !self.values[t.index()].is_zero())
    }

    pub fn tract(&self) -> &Tract {
        &self.tract
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn value(&self, t: Transversal) -> Scalar {
        self.values[t.index()]
    }

    /// Values indexed by [`Transversal::index`].
    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    /// Support in lexicographic order.
    pub fn support(&self) -> Vec<Transversal> {
        enumerate_transversals(self.n()).filter(|&t| !self.value(t).is_zero()).collect()
    }

    pub fn is_supported(&self, t: Transversal) -> bool {
        !self.value(t).is_zero()
    }

    /// The orthogonal matroid whose bases form the support.
    pub fn underlying_matroid(&self) -> Result<OrthoMatroid> {
        OrthoMatroid::new(self.n(), self.support())
    }

    /// `ψ = cφ` for some unit `c`.
    pub fn equivalent(&self, other: &WickFunction) -> bool {
        self == other
    }

    /// The relation `Σ_k ε^k φ(T1 △ x_k) φ(T2 △ x_k)` over the positions where
    /// the transversals differ, in increasing order.
    pub fn wick_relation_sum(&self, t1: Transversal, t2: Transversal) -> FormalSum {
        let mut s = FormalSum::new();
        let d = t1.diff(t2);
        for (k, p) in (0..self.n).filter(|&p| d >> p & 1 == 1).enumerate() {
            let prod = self.tract.mul(self.value(t1.flip(p)), self.value(t2.flip(p)));
            s.push(self.tract.mul(self.tract.eps_pow(k + 1), prod));
        }
        s
    }

    /// Checks the Wick relations at the given strength. Moderate and weak
    /// levels require the support to be the basis set of an orthogonal matroid.
    pub fn check_wick(&self, level: WickLevel) -> Result<Option<WickWitness>> {
        let n = self.n();
        if level != WickLevel::Strong {
            if let Some(w) = check_bases(n, &self.support())? {
                bail!(Precondition, "support is not an orthogonal matroid: {w}");
            }
        }
        // A transversal contributes only if one of its neighbours is supported.
        let near: Vec<Transversal> = enumerate_transversals(n)
            .filter(|&t| (0..self.n).any(|p| self.is_supported(t.flip(p))))
            .collect();
        for (i, &t1) in near.iter().enumerate() {
            for &t2 in &near[i..] {
                let d = t1.diff(t2);
                let m = d.count_ones();
                if m == 0 || (level == WickLevel::Weak && m != 4) {
                    continue;
                }
                let sum = self.wick_relation_sum(t1, t2);
                if sum.is_empty() || (level == WickLevel::Moderate && sum.len() > 4) {
                    continue;
                }
                if !self.tract.is_null(sum.terms())? {
                    return Ok(Some(WickWitness { t1, t2, sum }));
                }
            }
        }
        Ok(None)
    }

    pub fn is_wick(&self, level: WickLevel) -> Result<bool> {
        Ok(self.check_wick(level)?.is_none())
    }

    /// `φ*(T) = φ(T*)`.
    pub fn dual_wick(&self) -> WickFunction {
        let mut values = vec![Scalar::Zero; self.values.len()];
        for t in enumerate_transversals(self.n()) {
            values[t.star().index()] = self.value(t);
        }
        Self::new(&self.tract, self.n(), values).expect("nonzero")
    }

    /// `φ|e` on the transversals of `E - {e, e*}`.
    pub fn wick_minor(&self, e: Element) -> Result<WickFunction> {
        let n = self.n();
        if e.pos as usize >= n {
            bail!(Domain, "{e} is not in the ground set");
        }
        let singular = !self.support().iter().any(|b| b.contains(e));
        let keep = if singular { e.dual() } else { e };
        let p = e.pos as u32;
        let mut values = vec![Scalar::Zero; 1 << (n - 1)];
        for (idx, v) in values.iter_mut().enumerate() {
            let idx = idx as u32;
            let lowbits = idx & ((1 << p) - 1);
            let high = (idx >> p) << (p + 1);
            let bit = if keep.starred { 1 << p } else { 0 };
            *v = self.values[(lowbits | high | bit) as usize];
        }
        Self::new(&self.tract, n - 1, values)
    }

    /// `f ∘ φ`.
    pub fn pushforward(&self, f: &TractHom) -> Result<WickFunction> {
        if *f.source() != self.tract {
            bail!(Mismatch, "homomorphism starts at {}, function lives over {}", f.source(), self.tract);
        }
        Self::new(f.target(), self.n(), self.values.iter().map(|&x| f.apply(x)).collect())
    }

    /// `φ1 × φ2` over the product tract; the supports must agree.
    pub fn product_wick(&self, other: &WickFunction) -> Result<WickFunction> {
        if self.n != other.n {
            bail!(Mismatch, "ground sets differ");
        }
        if self.support() != other.support() {
            bail!(Mismatch, "product of Wick functions needs equal supports");
        }
        let t = Tract::product(&self.tract, &other.tract)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| t.pair(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&t, self.n(), values)
    }

    /// Applies an arbitrary map to the values (not necessarily a homomorphism).
    pub fn map_values(&self, target: &Tract, f: impl Fn(Scalar) -> Scalar) -> Result<WickFunction> {
        Self::new(target, self.n(), self.values.iter().map(|&x| f(x)).collect())
    }
}

/// An alternating function on `r`-tuples of `[n]`, stored by its values on
/// increasing tuples (keyed by subset mask).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpFunction {
    tract: Tract,
    n: u8,
    rank: u8,
    values: BTreeMap<u32, Scalar>,
}

impl GpFunction {
    /// Builds from `(sorted subset, value)` pairs; omitted subsets are zero.
    pub fn new(tract: &Tract, n: usize, rank: usize, entries: impl IntoIterator<Item = (u32, Scalar)>) -> Result<GpFunction> {
        let mut values = BTreeMap::new();
        for (s, x) in entries {
            if s >> n != 0 || s.count_ones() as usize != rank {
                bail!(Domain, "subset {s:#b} is not an {rank}-subset of [{n}]");
            }
            if !x.is_zero() {
                values.insert(s, x);
            }
        }
        if values.is_empty() {
            bail!(Axiom, "a Grassmann-Plücker function is not identically zero");
        }
        Ok(GpFunction { tract: tract.clone(), n: n as u8, rank: rank as u8, values })
    }

    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn tract(&self) -> &Tract {
        &self.tract
    }

    /// Value on an increasing tuple, given as a mask.
    pub fn sorted_value(&self, s: u32) -> Scalar {
        self.values.get(&s).copied().unwrap_or(Scalar::Zero)
    }

    /// Value on an arbitrary tuple, using the alternating rule.
    pub fn value(&self, tuple: &[u8]) -> Scalar {
        let mut mask = 0u32;
        for &x in tuple {
            if mask >> x & 1 == 1 {
                return Scalar::Zero;
            }
            mask |= 1 << x;
        }
        let mut inversions = 0;
        for i in 0..tuple.len() {
            for j in i + 1..tuple.len() {
                if tuple[i] > tuple[j] {
                    inversions += 1;
                }
            }
        }
        self.tract.mul(self.tract.eps_pow(inversions), self.sorted_value(mask))
    }

    /// The Grassmann-Plücker relations on all `(r+1)`- and `(r-1)`-subsets;
    /// returns the first non-null relation as `(J1, J2)`.
    pub fn check_gp(&self) -> Result<Option<(u32, u32)>> {
        let (n, r) = (self.n as u32, self.rank as u32);
        if r == 0 {
            return Ok(None);
        }
        for j1 in 0..1u32 << n {
            if j1.count_ones() != r + 1 {
                continue;
            }
            let xs: Vec<u8> = (0..n as u8).filter(|&i| j1 >> i & 1 == 1).collect();
            for j2 in 0..1u32 << n {
                if j2.count_ones() != r - 1 {
                    continue;
                }
                let ys: Vec<u8> = (0..n as u8).filter(|&i| j2 >> i & 1 == 1).collect();
                let mut sum = FormalSum::new();
                for k in 0..xs.len() {
                    let rest: Vec<u8> = xs.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &x)| x).collect();
                    let mut with: Vec<u8> = vec![xs[k]];
                    with.extend(&ys);
                    let prod = self.tract.mul(self.value(&rest), self.value(&with));
                    sum.push(self.tract.mul(self.tract.eps_pow(k + 1), prod));
                }
                if !self.tract.is_null(sum.terms())? {
                    return Ok(Some((j1, j2)));
                }
            }
        }
        Ok(None)
    }

    /// `φ(T) = ψ(T ∩ [n])` when `|T ∩ [n]| = r`, zero otherwise.
    pub fn to_wick(&self) -> WickFunction {
        let n = self.n();
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let values = (0..1u32 << n).map(|starred| self.sorted_value(full & !starred)).collect();
        WickFunction::new(&self.tract, n, values).expect("nonzero")
    }

    /// Inverse of [`GpFunction::to_wick`]; needs every supported transversal to
    /// have the same number of unstarred elements.
    pub fn from_wick(phi: &WickFunction) -> Result<GpFunction> {
        let sup = phi.support();
        let r = sup[0].unstarred_count();
        if sup.iter().any(|t| t.unstarred_count() != r) {
            bail!(Precondition, "support is not the lift of a matroid");
        }
        let n = phi.n();
        let full = (1u32 << n) - 1;
        Self::new(phi.tract(), n, r, sup.iter().map(|&t| (full & !t.starred(), phi.value(t))))
    }
}

/// `φ(T) = ψ(T ∩ [n])`; see [`GpFunction::to_wick`].
pub fn from_gp(psi: &GpFunction) -> WickFunction {
    psi.to_wick()
}

/// See [`GpFunction::from_wick`].
pub fn to_gp(phi: &WickFunction) -> Result<GpFunction> {
    GpFunction::from_wick(phi)
}
