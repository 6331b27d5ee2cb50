//! Tracts, their elements, formal sums and homomorphisms.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::bail;
use crate::{Error, Result};

pub type Rational = Ratio<i64>;

/// Longest formal sum used when validating homomorphisms and tract axioms.
pub const CHECK_LEN: usize = 8;

/// Ceiling on the number of multisets a legality check is willing to walk.
const CHECK_BUDGET: u64 = 2_000_000;

/// An element of a tract. Units of finite tracts are indices into the unit
/// group (index 0 is always the identity); tropical units are exact rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    Zero,
    Unit(u32),
    Trop(Rational),
}

impl Scalar {
    pub fn is_zero(self) -> bool {
        self == Scalar::Zero
    }
}

/// A finite multiset of nonzero tract elements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalSum {
    terms: Vec<Scalar>,
}

impl FormalSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a sum, dropping zero terms.
    pub fn from_terms<I: IntoIterator<Item = Scalar>>(terms: I) -> Self {
        let mut s = Self::new();
        for t in terms {
            s.push(t);
        }
        s
    }

    pub fn push(&mut self, t: Scalar) {
        if !t.is_zero() {
            self.terms.push(t);
        }
    }

    pub fn terms(&self) -> &[Scalar] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Which involution a finite field carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldInvolution {
    Identity,
    Frobenius,
}

#[derive(Debug)]
struct FieldData {
    p: u32,
    q: u32,
    add: Vec<u8>,
    mul: Vec<u8>,
}

impl FieldData {
    fn new(p: u32, modulus: &[u32]) -> FieldData {
        let d = modulus.len();
        let q = p.pow(d as u32);
        let digits = |mut c: u32| -> Vec<u32> {
            let mut v = vec![0; d];
            for x in v.iter_mut() {
                *x = c % p;
                c /= p;
            }
            v
        };
        let code = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &x| acc * p + x) };
        let mut add = vec![0u8; (q * q) as usize];
        let mut mul = vec![0u8; (q * q) as usize];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = code(&s) as u8;
                let mut prod = vec![0u32; 2 * d];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                // x^d = -sum modulus[i] x^i
                for top in (d..2 * d).rev() {
                    let c = prod[top];
                    if c == 0 {
                        continue;
                    }
                    prod[top] = 0;
                    for (i, m) in modulus.iter().enumerate() {
                        let idx = top - d + i;
                        prod[idx] = (prod[idx] + (p - (c * m) % p)) % p;
                    }
                }
                mul[(a * q + b) as usize] = code(&prod[..d]) as u8;
            }
        }
        FieldData { p, q, add, mul }
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize] as u32
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize] as u32
    }

    fn pow(&self, a: u32, e: u32) -> u32 {
        (0..e).fold(1, |acc, _| self.mul(acc, a))
    }

    fn neg(&self, a: u32) -> u32 {
        (0..self.q).find(|&b| self.add(a, b) == 0).unwrap()
    }

    fn primitive_root(&self) -> u32 {
        (2..self.q)
            .find(|&g| {
                let mut x = g;
                let mut ord = 1;
                while x != 1 {
                    x = self.mul(x, g);
                    ord += 1;
                }
                ord == self.q - 1
            })
            .unwrap_or(1)
    }
}

#[derive(Debug)]
struct Group {
    k: u32,
    mul: Vec<u32>,
    inv: Vec<u32>,
    conj: Vec<u32>,
    eps: u32,
}

impl Group {
    fn build(k: u32, mul: impl Fn(u32, u32) -> u32, conj: impl Fn(u32) -> u32, eps: u32) -> Group {
        let mut table = Vec::with_capacity((k * k) as usize);
        for a in 0..k {
            for b in 0..k {
                table.push(mul(a, b));
            }
        }
        let inv = (0..k)
            .map(|a| (0..k).find(|&b| table[(a * k + b) as usize] == 0).unwrap_or(0))
            .collect();
        let conj = (0..k).map(conj).collect();
        Group { k, mul: table, inv, conj, eps }
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.k + b) as usize]
    }
}

#[derive(Debug)]
enum Kind {
    Field(FieldData),
    Quotient { field: FieldData, cosets: u32, sub: u32, pows: Vec<u32>, log: Vec<u32> },
    Krasner,
    Sign,
    Initial,
    Regular,
    SixthRoot,
    Tropical,
    Product(Tract, Tract),
    Custom { nulls: BTreeSet<Vec<u32>>, bound: Option<usize> },
}

#[derive(Debug)]
struct Inner {
    name: String,
    kind: Kind,
    group: Option<Group>,
}

/// A tract: a multiplicative group with zero, an involution, and a null set of
/// formal sums. Cheap to clone.
#[derive(Clone)]
pub struct Tract(Arc<Inner>);

impl fmt::Debug for Tract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tract({})", self.0.name)
    }
}

impl fmt::Display for Tract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

impl PartialEq for Tract {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.name == other.0.name
    }
}

impl Eq for Tract {}

/// Explicit description of a tract with finite unit group and a listed null set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CustomSpec {
    pub label: String,
    /// `table[a][b]` is the product of units `a` and `b`; unit 0 is the identity.
    pub table: Vec<Vec<u32>>,
    /// Images of the units under the involution; identity when absent.
    pub involution: Option<Vec<u32>>,
    /// Null sums as lists of unit indices (order irrelevant). The empty sum is implicit.
    pub nulls: Vec<Vec<u32>>,
    /// Longest sum the list speaks for. `None` means the list is the whole null set.
    pub bound: Option<usize>,
}

impl CustomSpec {
    /// Cyclic unit group of order `k` with identity involution.
    pub fn cyclic(label: &str, k: u32, nulls: Vec<Vec<u32>>, bound: Option<usize>) -> CustomSpec {
        let table = (0..k).map(|a| (0..k).map(|b| (a + b) % k).collect()).collect();
        CustomSpec { label: label.to_string(), table, involution: None, nulls, bound }
    }
}

const R6_COORDS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

fn is_prime(q: u32) -> bool {
    q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

impl Tract {
    fn from_parts(name: String, kind: Kind, group: Option<Group>) -> Tract {
        Tract(Arc::new(Inner { name, kind, group }))
    }

    /// The Krasner hyperfield: one unit, every sum except a single term is null.
    pub fn krasner() -> Tract {
        Self::from_parts("K".into(), Kind::Krasner, Some(Group::build(1, |_, _| 0, |a| a, 0)))
    }

    /// The sign hyperfield; unit 0 is `1`, unit 1 is `-1`.
    pub fn sign() -> Tract {
        Self::from_parts("S".into(), Kind::Sign, Some(Group::build(2, |a, b| a ^ b, |a| a, 1)))
    }

    /// The initial tract: nulls are the empty sum and `1 + -1` only.
    pub fn initial() -> Tract {
        Self::from_parts("I".into(), Kind::Initial, Some(Group::build(2, |a, b| a ^ b, |a| a, 1)))
    }

    /// The regular partial field, signs summed in the integers.
    pub fn regular() -> Tract {
        Self::from_parts("U0".into(), Kind::Regular, Some(Group::build(2, |a, b| a ^ b, |a| a, 1)))
    }

    /// Sixth roots of unity over the Eisenstein integers, with conjugation.
    pub fn sixth_root() -> Tract {
        Self::from_parts(
            "R6".into(),
            Kind::SixthRoot,
            Some(Group::build(6, |a, b| (a + b) % 6, |a| (6 - a) % 6, 3)),
        )
    }

    /// The tropical hyperfield on exact rationals; multiplication is addition.
    pub fn tropical() -> Tract {
        Self::from_parts("T".into(), Kind::Tropical, None)
    }

    /// The finite field of order `q`, with the default involution
    /// (identity for prime fields and `F8`, Frobenius for `F4`).
    pub fn field(q: u32) -> Result<Tract> {
        let inv = match q {
            4 => FieldInvolution::Frobenius,
            9 => bail!(
                Precondition,
                "F9 has two involutions; choose F9[id] or F9[frob]"
            ),
            _ => FieldInvolution::Identity,
        };
        Self::field_with(q, inv)
    }

    pub fn field_with(q: u32, involution: FieldInvolution) -> Result<Tract> {
        let (p, modulus): (u32, Vec<u32>) = match q {
            4 => (2, vec![1, 1]),
            8 => (2, vec![1, 1, 0]),
            9 => (3, vec![1, 0]),
            q if is_prime(q) && q < 128 => (q, vec![0]),
            q if is_prime(q) => bail!(Size, "prime fields are supported up to 127, got {q}"),
            _ => bail!(Parse, "no finite field of order {q} is available"),
        };
        let data = FieldData::new(p, &modulus);
        let k = q - 1;
        let conj: Vec<u32> = (1..q)
            .map(|c| match involution {
                FieldInvolution::Identity => c - 1,
                FieldInvolution::Frobenius => data.pow(c, p) - 1,
            })
            .collect();
        if (0..k).any(|u| conj[conj[u as usize] as usize] != u) {
            bail!(Precondition, "Frobenius of F{q} is not an involution");
        }
        let eps = data.neg(1) - 1;
        let group = Group::build(k, |a, b| data.mul(a + 1, b + 1) - 1, |a| conj[a as usize], eps);
        let name = match (q, involution) {
            (4, FieldInvolution::Frobenius) => "F4".to_string(),
            (4, FieldInvolution::Identity) => "F4[id]".to_string(),
            (9, FieldInvolution::Frobenius) => "F9[frob]".to_string(),
            (9, FieldInvolution::Identity) => "F9[id]".to_string(),
            (q, FieldInvolution::Identity) => format!("F{q}"),
            (q, FieldInvolution::Frobenius) if p == q => format!("F{q}"),
            (q, _) => format!("F{q}[frob]"),
        };
        Ok(Self::from_parts(name, Kind::Field(data), Some(group)))
    }

    /// The quotient hyperfield of `F_q` by its multiplicative subgroup of order `k`.
    pub fn quotient(q: u32, k: u32) -> Result<Tract> {
        if !is_prime(q) && ![4, 8, 9].contains(&q) {
            bail!(Parse, "no finite field of order {q} is available");
        }
        if k == 0 || (q - 1) % k != 0 {
            bail!(Parse, "F{q}^x has no subgroup of order {k}");
        }
        let base = Self::field_with(q, FieldInvolution::Identity)?;
        let Kind::Field(fd) = &base.0.kind else { unreachable!() };
        let field = FieldData { p: fd.p, q: fd.q, add: fd.add.clone(), mul: fd.mul.clone() };
        let g = field.primitive_root();
        let pows: Vec<u32> = (0..q - 1).map(|i| field.pow(g, i)).collect();
        let mut log = vec![0u32; q as usize];
        for (i, &c) in pows.iter().enumerate() {
            log[c as usize] = i as u32;
        }
        let cosets = (q - 1) / k;
        let eps = log[field.neg(1) as usize] % cosets;
        let group = Group::build(cosets, |a, b| (a + b) % cosets, |a| a, eps);
        Ok(Self::from_parts(
            format!("F{q}/{k}"),
            Kind::Quotient { field, cosets, sub: k, pows, log },
            Some(group),
        ))
    }

    /// The product tract: units pair up and a sum is null iff both projections are.
    pub fn product(a: &Tract, b: &Tract) -> Result<Tract> {
        let (Some(ga), Some(gb)) = (&a.0.group, &b.0.group) else {
            bail!(Domain, "products are only supported for finite tracts");
        };
        let kb = gb.k;
        let group = Group::build(
            ga.k * kb,
            |x, y| ga.mul(x / kb, y / kb) * kb + gb.mul(x % kb, y % kb),
            |x| ga.conj[(x / kb) as usize] * kb + gb.conj[(x % kb) as usize],
            ga.eps * kb + gb.eps,
        );
        Ok(Self::from_parts(
            format!("product({},{})", a.0.name, b.0.name),
            Kind::Product(a.clone(), b.clone()),
            Some(group),
        ))
    }

    /// A tract given by an explicit group table and null list; validated against
    /// the tract axioms.
    pub fn custom(spec: CustomSpec) -> Result<Tract> {
        let k = spec.table.len() as u32;
        if k == 0 || spec.table.iter().any(|r| r.len() as u32 != k || r.iter().any(|&x| x >= k)) {
            bail!(Axiom, "custom tract {}: malformed group table", spec.label);
        }
        let t = |a: u32, b: u32| spec.table[a as usize][b as usize];
        for a in 0..k {
            if t(0, a) != a || t(a, 0) != a {
                bail!(Axiom, "custom tract {}: unit 0 is not the identity", spec.label);
            }
            if !(0..k).any(|b| t(a, b) == 0) {
                bail!(Axiom, "custom tract {}: unit {a} has no inverse", spec.label);
            }
            for b in 0..k {
                if t(a, b) != t(b, a) {
                    bail!(Axiom, "custom tract {}: group is not abelian", spec.label);
                }
                for c in 0..k {
                    if t(t(a, b), c) != t(a, t(b, c)) {
                        bail!(Axiom, "custom tract {}: multiplication is not associative", spec.label);
                    }
                }
            }
        }
        let conj: Vec<u32> = match &spec.involution {
            Some(v) if v.len() as u32 == k && v.iter().all(|&x| x < k) => v.clone(),
            Some(_) => bail!(Axiom, "custom tract {}: malformed involution", spec.label),
            None => (0..k).collect(),
        };
        let mut nulls = BTreeSet::new();
        nulls.insert(Vec::new());
        for s in &spec.nulls {
            if s.iter().any(|&x| x >= k) {
                bail!(Axiom, "custom tract {}: null sum mentions unknown unit", spec.label);
            }
            if let Some(b) = spec.bound {
                if s.len() > b {
                    bail!(Axiom, "custom tract {}: null sum longer than the bound {b}", spec.label);
                }
            }
            let mut s = s.clone();
            s.sort_unstable();
            nulls.insert(s);
        }
        if nulls.contains(&vec![0]) {
            bail!(Axiom, "custom tract {}: 1 is null", spec.label);
        }
        let eps: Vec<u32> = (0..k)
            .filter(|&e| {
                let mut s = vec![0, e];
                s.sort_unstable();
                nulls.contains(&s)
            })
            .collect();
        if eps.len() != 1 {
            bail!(
                Axiom,
                "custom tract {}: expected exactly one unit e with 1 + e null, found {}",
                spec.label,
                eps.len()
            );
        }
        for s in &nulls {
            for g in 0..k {
                let mut gs: Vec<u32> = s.iter().map(|&x| t(g, x)).collect();
                gs.sort_unstable();
                if !nulls.contains(&gs) {
                    bail!(Axiom, "custom tract {}: null set not closed under scaling", spec.label);
                }
            }
            let mut cs: Vec<u32> = s.iter().map(|&x| conj[x as usize]).collect();
            cs.sort_unstable();
            if !nulls.contains(&cs) {
                bail!(Axiom, "custom tract {}: involution does not preserve nulls", spec.label);
            }
        }
        for a in 0..k {
            if conj[conj[a as usize] as usize] != a {
                bail!(Axiom, "custom tract {}: involution does not square to 1", spec.label);
            }
            for b in 0..k {
                if conj[t(a, b) as usize] != t(conj[a as usize], conj[b as usize]) {
                    bail!(Axiom, "custom tract {}: involution is not multiplicative", spec.label);
                }
            }
        }
        let group = Group::build(k, t, |a| conj[a as usize], eps[0]);
        Ok(Self::from_parts(
            format!("custom:{}", spec.label),
            Kind::Custom { nulls, bound: spec.bound },
            Some(group),
        ))
    }

    /// Parses a built-in descriptor (`K`, `S`, `T`, `I`, `U0`, `R6`, `F<q>`,
    /// `F<q>[id|frob]`, `F<q>/<k>`, `product(<a>,<b>)`).
    pub fn parse(desc: &str) -> Result<Tract> {
        Self::parse_with(desc, &mut |d: &str| {
            Err(Error::Parse(format!("cannot resolve custom tract {d}")))
        })
    }

    /// As [`Tract::parse`], delegating `custom:<name>` descriptors to `resolve`.
    pub fn parse_with(desc: &str, resolve: &mut dyn FnMut(&str) -> Result<Tract>) -> Result<Tract> {
        let d = desc.trim();
        match d {
            "K" => return Ok(Self::krasner()),
            "S" => return Ok(Self::sign()),
            "T" => return Ok(Self::tropical()),
            "I" => return Ok(Self::initial()),
            "U0" => return Ok(Self::regular()),
            "R6" => return Ok(Self::sixth_root()),
            _ => {}
        }
        if let Some(rest) = d.strip_prefix("custom:") {
            return resolve(rest);
        }
        if let Some(inner) = d.strip_prefix("product(").and_then(|r| r.strip_suffix(')')) {
            let mut depth = 0i32;
            let mut split = None;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ',' if depth == 0 => {
                        split = Some(i);
                        break;
                    }
                    _ => {}
                }
            }
            let Some(i) = split else { bail!(Parse, "product needs two factors: {d}") };
            let a = Self::parse_with(&inner[..i], resolve)?;
            let b = Self::parse_with(&inner[i + 1..], resolve)?;
            return Self::product(&a, &b);
        }
        if let Some(rest) = d.strip_prefix('F') {
            if let Some((q, k)) = rest.split_once('/') {
                let q = q.parse().map_err(|_| Error::Parse(format!("bad field order in {d}")))?;
                let k = k.parse().map_err(|_| Error::Parse(format!("bad subgroup order in {d}")))?;
                return Self::quotient(q, k);
            }
            let (q, inv) = match rest.split_once('[') {
                Some((q, "id]")) => (q, Some(FieldInvolution::Identity)),
                Some((q, "frob]")) => (q, Some(FieldInvolution::Frobenius)),
                Some(_) => bail!(Parse, "unknown field involution in {d}"),
                None => (rest, None),
            };
            let q: u32 = q.parse().map_err(|_| Error::Parse(format!("bad field order in {d}")))?;
            return match inv {
                Some(i) => Self::field_with(q, i),
                None => Self::field(q),
            };
        }
        bail!(Parse, "unknown tract descriptor {d:?}")
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    fn group(&self) -> &Group {
        self.0.group.as_ref().expect("finite tract")
    }

    pub fn is_finite(&self) -> bool {
        self.0.group.is_some()
    }

    /// Number of units, or `None` for the tropical hyperfield.
    pub fn unit_count(&self) -> Option<u32> {
        self.0.group.as_ref().map(|g| g.k)
    }

    /// True for genuine fields (where the null set comes from an addition).
    pub fn is_field(&self) -> bool {
        matches!(self.0.kind, Kind::Field(_))
    }

    /// True for fields and partial fields, where weak and strong Wick functions agree.
    pub fn is_partial_field(&self) -> bool {
        matches!(self.0.kind, Kind::Field(_) | Kind::Regular | Kind::SixthRoot)
    }

    pub fn is_krasner(&self) -> bool {
        matches!(self.0.kind, Kind::Krasner)
    }

    /// The two factors of a product tract.
    pub fn factors(&self) -> Option<(&Tract, &Tract)> {
        match &self.0.kind {
            Kind::Product(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Units in index order (finite tracts only).
    pub fn units(&self) -> Vec<Scalar> {
        match &self.0.group {
            Some(g) => (0..g.k).map(Scalar::Unit).collect(),
            None => Vec::new(),
        }
    }

    /// Zero followed by the units.
    pub fn elements(&self) -> Vec<Scalar> {
        let mut v = vec![Scalar::Zero];
        v.extend(self.units());
        v
    }

    pub fn one(&self) -> Scalar {
        match self.0.kind {
            Kind::Tropical => Scalar::Trop(Rational::zero()),
            _ => Scalar::Unit(0),
        }
    }

    /// The unique unit with `1 + eps` null; plays the role of `-1`.
    pub fn eps(&self) -> Scalar {
        match &self.0.group {
            Some(g) => Scalar::Unit(g.eps),
            None => self.one(),
        }
    }

    /// `eps^k`.
    pub fn eps_pow(&self, k: usize) -> Scalar {
        if k % 2 == 0 {
            self.one()
        } else {
            self.eps()
        }
    }

    pub fn contains(&self, x: Scalar) -> bool {
        match (x, &self.0.group) {
            (Scalar::Zero, _) => true,
            (Scalar::Unit(u), Some(g)) => u < g.k,
            (Scalar::Trop(_), None) => true,
            _ => false,
        }
    }

    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Zero, _) | (_, Scalar::Zero) => Scalar::Zero,
            (Scalar::Unit(x), Scalar::Unit(y)) => Scalar::Unit(self.group().mul(x, y)),
            (Scalar::Trop(x), Scalar::Trop(y)) => Scalar::Trop(x + y),
            _ => panic!("mixed tract elements {a:?} * {b:?}"),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Scalar) -> Option<Scalar> {
        match a {
            Scalar::Zero => None,
            Scalar::Unit(x) => Some(Scalar::Unit(self.group().inv[x as usize])),
            Scalar::Trop(x) => Some(Scalar::Trop(-x)),
        }
    }

    /// `a / b`; `None` when `b` is zero.
    pub fn div(&self, a: Scalar, b: Scalar) -> Option<Scalar> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// The involution.
    pub fn conj(&self, a: Scalar) -> Scalar {
        match a {
            Scalar::Unit(x) => Scalar::Unit(self.group().conj[x as usize]),
            other => other,
        }
    }

    /// Whether the involution is the identity.
    pub fn involution_is_identity(&self) -> bool {
        match &self.0.group {
            Some(g) => (0..g.k).all(|u| g.conj[u as usize] == u),
            None => true,
        }
    }

    /// Longest sum for which `is_null` answers (`None` means unbounded).
    pub fn null_bound(&self) -> Option<usize> {
        match &self.0.kind {
            Kind::Custom { bound, .. } => *bound,
            Kind::Product(a, b) => match (a.null_bound(), b.null_bound()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
            _ => None,
        }
    }

    /// Membership of a formal sum (zero terms ignored) in the null set.
    pub fn is_null(&self, terms: &[Scalar]) -> Result<bool> {
        let mut units: Vec<u32> = Vec::with_capacity(terms.len());
        let mut trop: Vec<Rational> = Vec::new();
        for &t in terms {
            match t {
                Scalar::Zero => {}
                Scalar::Unit(u) if self.contains(t) => units.push(u),
                Scalar::Trop(x) if self.contains(t) => trop.push(x),
                _ => bail!(Domain, "{t:?} is not an element of {}", self.0.name),
            }
        }
        if let Kind::Tropical = self.0.kind {
            let Some(m) = trop.iter().min() else { return Ok(true) };
            return Ok(trop.iter().filter(|x| *x == m).count() >= 2);
        }
        self.units_null(&mut units)
    }

    /// Null test on a sum given as unit indices. The slice may be reordered.
    pub fn units_null(&self, units: &mut [u32]) -> Result<bool> {
        if units.is_empty() {
            return Ok(true);
        }
        if units.len() == 1 {
            return Ok(false);
        }
        Ok(match &self.0.kind {
            Kind::Field(f) => units.iter().fold(0, |acc, &u| f.add(acc, u + 1)) == 0,
            Kind::Quotient { field, cosets, sub, pows, .. } => {
                let mut reach: u128 = 1;
                for &c in units.iter() {
                    let mut next = 0u128;
                    for r in 0..field.q {
                        if reach >> r & 1 == 1 {
                            for j in 0..*sub {
                                let x = pows[(c + cosets * j) as usize];
                                next |= 1 << field.add(r, x);
                            }
                        }
                    }
                    reach = next;
                }
                reach & 1 == 1
            }
            Kind::Krasner => true,
            Kind::Sign => units.contains(&0) && units.contains(&1),
            Kind::Initial => units.len() == 2 && units[0] != units[1],
            Kind::Regular => 2 * units.iter().filter(|&&u| u == 0).count() == units.len(),
            Kind::SixthRoot => {
                let (a, b) = units.iter().fold((0, 0), |(a, b), &u| {
                    let (x, y) = R6_COORDS[u as usize];
                    (a + x, b + y)
                });
                a == 0 && b == 0
            }
            Kind::Tropical => unreachable!(),
            Kind::Product(a, b) => {
                let kb = b.group().k;
                let mut xs: Vec<u32> = units.iter().map(|u| u / kb).collect();
                let mut ys: Vec<u32> = units.iter().map(|u| u % kb).collect();
                a.units_null(&mut xs)? && b.units_null(&mut ys)?
            }
            Kind::Custom { nulls, bound } => {
                if let Some(b) = bound {
                    if units.len() > *b {
                        bail!(
                            Domain,
                            "{}: sum of length {} exceeds the declared bound {b}",
                            self.0.name,
                            units.len()
                        );
                    }
                }
                units.sort_unstable();
                nulls.contains(&units[..].to_vec())
            }
        })
    }

    /// Pairs two components into a unit of this product tract.
    pub fn pair(&self, x: Scalar, y: Scalar) -> Result<Scalar> {
        let Some((_, b)) = self.factors() else { bail!(Domain, "{} is not a product", self.0.name) };
        Ok(match (x, y) {
            (Scalar::Unit(x), Scalar::Unit(y)) => Scalar::Unit(x * b.group().k + y),
            (Scalar::Zero, Scalar::Zero) => Scalar::Zero,
            _ => bail!(Domain, "product elements need both components zero or both nonzero"),
        })
    }

    /// Projects a unit of this product tract to factor `i` (0 or 1).
    pub fn project(&self, i: usize, x: Scalar) -> Result<Scalar> {
        let Some((_, b)) = self.factors() else { bail!(Domain, "{} is not a product", self.0.name) };
        let kb = b.group().k;
        Ok(match x {
            Scalar::Zero => Scalar::Zero,
            Scalar::Unit(u) if i == 0 => Scalar::Unit(u / kb),
            Scalar::Unit(u) => Scalar::Unit(u % kb),
            Scalar::Trop(_) => bail!(Domain, "tropical element in a finite tract"),
        })
    }

    /// Field addition (fields only).
    pub fn field_add(&self, a: Scalar, b: Scalar) -> Result<Scalar> {
        let Kind::Field(f) = &self.0.kind else { bail!(Domain, "{} is not a field", self.0.name) };
        let code = |x: Scalar| match x {
            Scalar::Unit(u) => u + 1,
            _ => 0,
        };
        let c = f.add(code(a), code(b));
        Ok(if c == 0 { Scalar::Zero } else { Scalar::Unit(c - 1) })
    }

    /// Parses an element literal.
    pub fn parse_elem(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Parse(format!("{s:?} is not an element literal of {}", self.0.name));
        if s == "0" && !matches!(self.0.kind, Kind::Tropical) {
            return Ok(Scalar::Zero);
        }
        match &self.0.kind {
            Kind::Field(f) => {
                let c: u32 = s.parse().map_err(|_| bad())?;
                if c >= f.q {
                    return Err(bad());
                }
                Ok(Scalar::Unit(c - 1))
            }
            Kind::Quotient { field, cosets, log, .. } => {
                let c: u32 = s.parse().map_err(|_| bad())?;
                if c == 0 || c >= field.q {
                    return Err(bad());
                }
                Ok(Scalar::Unit(log[c as usize] % cosets))
            }
            Kind::Krasner => match s {
                "1" => Ok(Scalar::Unit(0)),
                _ => Err(bad()),
            },
            Kind::Sign | Kind::Initial | Kind::Regular => match s {
                "1" => Ok(Scalar::Unit(0)),
                "-1" => Ok(Scalar::Unit(1)),
                _ => Err(bad()),
            },
            Kind::SixthRoot => match s {
                "1" => Ok(Scalar::Unit(0)),
                "-1" => Ok(Scalar::Unit(3)),
                _ => {
                    let k: u32 = s.strip_prefix("z^").and_then(|k| k.parse().ok()).ok_or_else(bad)?;
                    if k >= 6 {
                        return Err(bad());
                    }
                    Ok(Scalar::Unit(k))
                }
            },
            Kind::Tropical => {
                if s == "inf" {
                    return Ok(Scalar::Zero);
                }
                parse_rational(s).map(Scalar::Trop).ok_or_else(bad)
            }
            Kind::Product(a, b) => {
                let inner = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(s);
                let mut depth = 0i32;
                let mut split = None;
                for (i, ch) in inner.char_indices() {
                    match ch {
                        '(' => depth += 1,
                        ')' => depth -= 1,
                        '|' if depth == 0 => {
                            split = Some(i);
                            break;
                        }
                        _ => {}
                    }
                }
                let i = split.ok_or_else(bad)?;
                let x = a.parse_elem(&inner[..i])?;
                let y = b.parse_elem(&inner[i + 1..])?;
                self.pair(x, y)
            }
            Kind::Custom { .. } => {
                let k = self.group().k;
                let u = match s {
                    "1" => 0,
                    "-1" => self.group().eps,
                    _ => s.strip_prefix('u').and_then(|k| k.parse().ok()).ok_or_else(bad)?,
                };
                if u >= k {
                    return Err(bad());
                }
                Ok(Scalar::Unit(u))
            }
        }
    }

    /// Formats an element; the inverse of [`Tract::parse_elem`]. Product
    /// elements are parenthesized, `(a|b)`.
    pub fn fmt_elem(&self, x: Scalar) -> String {
        match (&self.0.kind, x) {
            (Kind::Tropical, Scalar::Zero) => "inf".into(),
            (Kind::Tropical, Scalar::Trop(r)) => {
                if r.is_integer() {
                    format!("{}", r.numer())
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            (_, Scalar::Zero) => "0".into(),
            (Kind::Field(_), Scalar::Unit(u)) => format!("{}", u + 1),
            (Kind::Quotient { cosets, pows, .. }, Scalar::Unit(u)) => {
                let min = pows.iter().enumerate().filter(|(i, _)| *i as u32 % cosets == u);
                format!("{}", min.map(|(_, c)| *c).min().unwrap_or(1))
            }
            (Kind::Krasner, _) => "1".into(),
            (Kind::Sign | Kind::Initial | Kind::Regular, Scalar::Unit(u)) => {
                if u == 0 { "1".into() } else { "-1".into() }
            }
            (Kind::SixthRoot, Scalar::Unit(u)) => format!("z^{u}"),
            (Kind::Product(a, b), Scalar::Unit(_)) => format!(
                "({}|{})",
                a.fmt_elem(self.project(0, x).unwrap()),
                b.fmt_elem(self.project(1, x).unwrap())
            ),
            (Kind::Custom { .. }, Scalar::Unit(u)) => {
                if u == 0 {
                    "1".into()
                } else if u == self.group().eps {
                    "-1".into()
                } else {
                    format!("u{u}")
                }
            }
            _ => format!("{x:?}"),
        }
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return None;
        }
        let neg = int.starts_with('-');
        let int_val: i64 = if int == "-" || int.is_empty() { 0 } else { int.parse().ok()? };
        let scale = 10i64.pow(frac.len() as u32);
        let f: i64 = frac.parse().ok()?;
        let mag = Rational::from_integer(int_val.abs()) + Rational::new(f, scale);
        return Some(if neg { -mag } else { mag });
    }
    s.parse::<i64>().ok().map(Rational::from_integer)
}

/// Calls `f` on every nondecreasing sequence of length `len` over `0..k`;
/// stops early when `f` returns false. Returns false iff stopped.
pub fn for_each_multiset(k: u32, len: usize, f: &mut dyn FnMut(&[u32]) -> bool) -> bool {
    if k == 0 {
        return len == 0 && f(&[]);
    }
    let mut cur = vec![0u32; len];
    loop {
        if !f(&cur) {
            return false;
        }
        let mut i = len;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if cur[i] + 1 < k {
                let v = cur[i] + 1;
                for c in cur[i..].iter_mut() {
                    *c = v;
                }
                break;
            }
        }
    }
}

fn multiset_count(k: u32, len: usize) -> u64 {
    // C(k + len - 1, len)
    let mut c: u64 = 1;
    for i in 0..len as u64 {
        c = c.saturating_mul(k as u64 + i) / (i + 1);
    }
    c
}

/// Longest sum length (≤ [`CHECK_LEN`]) whose exhaustive check stays in budget.
fn checkable_len(k: u32, bound: Option<usize>) -> usize {
    let mut len = bound.map_or(CHECK_LEN, |b| b.min(CHECK_LEN));
    while len > 2 && (2..=len).map(|l| multiset_count(k, l)).sum::<u64>() > CHECK_BUDGET {
        len -= 1;
    }
    len
}

impl Tract {
    /// Exhaustively verifies T1–T4 and the involution on sums of length up to
    /// `max_len` (finite tracts only).
    pub fn check_axioms(&self, max_len: usize) -> Result<()> {
        let g = self.group();
        let max_len = self.null_bound().map_or(max_len, |b| b.min(max_len));
        if !self.units_null(&mut [])? {
            bail!(Axiom, "{}: T1 fails", self.name());
        }
        if self.units_null(&mut [0])? {
            bail!(Axiom, "{}: T2 fails", self.name());
        }
        let eps: Vec<u32> = (0..g.k).filter(|&e| self.units_null(&mut [0, e]).unwrap_or(false)).collect();
        if eps != [g.eps] {
            bail!(Axiom, "{}: T3 fails ({eps:?})", self.name());
        }
        if g.mul(g.eps, g.eps) != 0 {
            bail!(Axiom, "{}: eps^2 != 1", self.name());
        }
        let mut failure = None;
        for len in 2..=max_len {
            for_each_multiset(g.k, len, &mut |s| {
                let base = match self.units_null(&mut s.to_vec()) {
                    Ok(b) => b,
                    Err(e) => {
                        failure = Some(e);
                        return false;
                    }
                };
                for a in 0..g.k {
                    let mut scaled: Vec<u32> = s.iter().map(|&x| g.mul(a, x)).collect();
                    if self.units_null(&mut scaled).ok() != Some(base) {
                        failure = Some(Error::Axiom(format!("{}: T4 fails on {s:?}", self.name())));
                        return false;
                    }
                }
                let mut c: Vec<u32> = s.iter().map(|&x| g.conj[x as usize]).collect();
                if base && self.units_null(&mut c).ok() != Some(true) {
                    failure = Some(Error::Axiom(format!("{}: involution breaks {s:?}", self.name())));
                    return false;
                }
                true
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
        for a in 0..g.k {
            if g.conj[g.conj[a as usize] as usize] != a {
                bail!(Axiom, "{}: involution does not square to 1", self.name());
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum HomMap {
    Identity,
    Terminal,
    Units(Vec<u32>),
}

/// A tract homomorphism. Unit-table homomorphisms are validated on
/// construction by checking null preservation on every sum up to
/// [`TractHom::verified_len`] terms.
#[derive(Clone, Debug)]
pub struct TractHom {
    source: Tract,
    target: Tract,
    map: HomMap,
    verified_len: Option<usize>,
}

impl PartialEq for TractHom {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.source.units().iter().all(|&u| self.apply(u) == other.apply(u))
    }
}

/// Result of checking whether a unit map sends null sums to null sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NullCheck {
    /// Every null sum up to the given length maps to a null sum.
    Preserved(usize),
    /// A null sum (as unit indices of the source) whose image is not null.
    Broken(Vec<u32>),
}

/// Checks a unit map for multiplicativity and null preservation on sums of
/// length up to `max_len`, without requiring it to be a homomorphism.
pub fn check_unit_map(source: &Tract, target: &Tract, images: &[u32], max_len: usize) -> Result<NullCheck> {
    let (gs, gt) = (source.group(), target.group());
    if images.len() as u32 != gs.k || images.iter().any(|&x| x >= gt.k) {
        bail!(Domain, "unit map has the wrong shape for {} -> {}", source.name(), target.name());
    }
    let bound = match (source.null_bound(), target.null_bound()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let len = checkable_len(gs.k, bound.map(|b| b.min(max_len)).or(Some(max_len)));
    let mut broken = None;
    let mut err = None;
    for l in 2..=len {
        for_each_multiset(gs.k, l, &mut |s| {
            match source.units_null(&mut s.to_vec()) {
                Ok(true) => {}
                Ok(false) => return true,
                Err(e) => {
                    err = Some(e);
                    return false;
                }
            }
            let mut img: Vec<u32> = s.iter().map(|&x| images[x as usize]).collect();
            match target.units_null(&mut img) {
                Ok(true) => true,
                Ok(false) => {
                    broken = Some(s.to_vec());
                    false
                }
                Err(e) => {
                    err = Some(e);
                    false
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if let Some(b) = broken {
            return Ok(NullCheck::Broken(b));
        }
    }
    Ok(NullCheck::Preserved(len))
}

impl TractHom {
    pub fn identity(t: &Tract) -> TractHom {
        TractHom { source: t.clone(), target: t.clone(), map: HomMap::Identity, verified_len: None }
    }

    /// The unique homomorphism to the Krasner hyperfield.
    pub fn terminal(source: &Tract) -> TractHom {
        TractHom { source: source.clone(), target: Tract::krasner(), map: HomMap::Terminal, verified_len: None }
    }

    /// Builds a homomorphism from the images of the source units, rejecting maps
    /// that are not multiplicative or do not preserve null sums.
    pub fn from_unit_images(source: &Tract, target: &Tract, images: &[Scalar]) -> Result<TractHom> {
        if !source.is_finite() || !target.is_finite() {
            bail!(Domain, "unit tables need finite tracts");
        }
        let imgs: Vec<u32> = images
            .iter()
            .map(|&x| match x {
                Scalar::Unit(u) if target.contains(x) => Ok(u),
                _ => Err(Error::Domain(format!("{x:?} is not a unit of {}", target.name()))),
            })
            .collect::<Result<_>>()?;
        let (gs, gt) = (source.group(), target.group());
        if imgs.len() as u32 != gs.k {
            bail!(Domain, "expected {} unit images, got {}", gs.k, imgs.len());
        }
        for a in 0..gs.k {
            for b in 0..gs.k {
                if imgs[gs.mul(a, b) as usize] != gt.mul(imgs[a as usize], imgs[b as usize]) {
                    bail!(Axiom, "unit map {} -> {} is not multiplicative", source.name(), target.name());
                }
            }
        }
        match check_unit_map(source, target, &imgs, CHECK_LEN)? {
            NullCheck::Preserved(len) => Ok(TractHom {
                source: source.clone(),
                target: target.clone(),
                map: HomMap::Units(imgs),
                verified_len: Some(len),
            }),
            NullCheck::Broken(s) => bail!(
                Axiom,
                "unit map {} -> {} sends the null sum {s:?} to a non-null sum",
                source.name(),
                target.name()
            ),
        }
    }

    /// All homomorphisms between two finite tracts, in a deterministic order.
    /// Candidates are enumerated by the images of a generating set of units.
    pub fn find_all(source: &Tract, target: &Tract) -> Result<Vec<TractHom>> {
        if target.is_krasner() {
            return Ok(vec![TractHom::terminal(source)]);
        }
        if !source.is_finite() || !target.is_finite() {
            bail!(Domain, "homomorphism search needs finite tracts");
        }
        let (gs, gt) = (source.group(), target.group());
        // Greedy generating set.
        let mut gens = Vec::new();
        let mut span = vec![false; gs.k as usize];
        span[0] = true;
        for u in 0..gs.k {
            if span[u as usize] {
                continue;
            }
            gens.push(u);
            let mut changed = true;
            while changed {
                changed = false;
                for a in 0..gs.k {
                    if !span[a as usize] {
                        continue;
                    }
                    for &g in &gens {
                        let b = gs.mul(a, g) as usize;
                        if !span[b] {
                            span[b] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        let total = (gt.k as u64).pow(gens.len() as u32);
        for code in 0..total {
            let mut c = code;
            let imgs_g: Vec<u32> = gens
                .iter()
                .map(|_| {
                    let x = (c % gt.k as u64) as u32;
                    c /= gt.k as u64;
                    x
                })
                .collect();
            let mut img: Vec<Option<u32>> = vec![None; gs.k as usize];
            img[0] = Some(0);
            let mut queue = vec![0u32];
            let mut ok = true;
            while let Some(a) = queue.pop() {
                for (g, &ig) in gens.iter().zip(&imgs_g) {
                    let b = gs.mul(a, *g);
                    let v = gt.mul(img[a as usize].unwrap(), ig);
                    match img[b as usize] {
                        None => {
                            img[b as usize] = Some(v);
                            queue.push(b);
                        }
                        Some(w) if w != v => ok = false,
                        _ => {}
                    }
                }
            }
            if !ok {
                continue;
            }
            let images: Vec<Scalar> = img.iter().map(|x| Scalar::Unit(x.unwrap())).collect();
            if let Ok(h) = TractHom::from_unit_images(source, target, &images) {
                out.push(h);
            }
        }
        Ok(out)
    }

    pub fn source(&self) -> &Tract {
        &self.source
    }

    pub fn target(&self) -> &Tract {
        &self.target
    }

    /// Sum length up to which null preservation was checked exhaustively
    /// (`None` for maps that are homomorphisms by construction).
    pub fn verified_len(&self) -> Option<usize> {
        self.verified_len
    }

    pub fn apply(&self, x: Scalar) -> Scalar {
        match (&self.map, x) {
            (_, Scalar::Zero) => Scalar::Zero,
            (HomMap::Identity, x) => x,
            (HomMap::Terminal, _) => Scalar::Unit(0),
            (HomMap::Units(v), Scalar::Unit(u)) => Scalar::Unit(v[u as usize]),
            (HomMap::Units(_), Scalar::Trop(_)) => panic!("tropical element given to a finite homomorphism"),
        }
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &TractHom) -> Result<TractHom> {
        if self.target != g.source {
            bail!(Mismatch, "cannot compose {} -> {} with {} -> {}", self.source, self.target, g.source, g.target);
        }
        let map = match (&self.map, &g.map) {
            (HomMap::Identity, m) => m.clone(),
            (m, HomMap::Identity) => m.clone(),
            (_, HomMap::Terminal) => HomMap::Terminal,
            _ => {
                let k = self.source.unit_count().ok_or_else(|| Error::Domain("infinite source".into()))?;
                HomMap::Units(
                    (0..k)
                        .map(|u| match g.apply(self.apply(Scalar::Unit(u))) {
                            Scalar::Unit(v) => v,
                            _ => unreachable!(),
                        })
                        .collect(),
                )
            }
        };
        let verified_len = match (self.verified_len, g.verified_len) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Ok(TractHom { source: self.source.clone(), target: g.target.clone(), map, verified_len })
    }

    /// Whether the map commutes with the involutions.
    pub fn is_involution_compatible(&self) -> bool {
        match self.map {
            HomMap::Identity | HomMap::Terminal => true,
            HomMap::Units(_) => self
                .source
                .units()
                .into_iter()
                .all(|u| self.apply(self.source.conj(u)) == self.target.conj(self.apply(u))),
        }
    }

    /// Whether the map is a bijection on units that also reflects null sums
    /// up to `max_len` terms, i.e. a tract isomorphism.
    pub fn is_isomorphism(&self, max_len: usize) -> Result<bool> {
        let HomMap::Units(v) = &self.map else {
            return Ok(matches!(self.map, HomMap::Identity) || self.source.unit_count() == Some(1));
        };
        let k = v.len() as u32;
        if self.target.unit_count() != Some(k) {
            return Ok(false);
        }
        let mut inv = vec![u32::MAX; k as usize];
        for (u, &x) in v.iter().enumerate() {
            if inv[x as usize] != u32::MAX {
                return Ok(false);
            }
            inv[x as usize] = u as u32;
        }
        Ok(matches!(check_unit_map(&self.source, &self.target, v, max_len)?, NullCheck::Preserved(_))
            && matches!(check_unit_map(&self.target, &self.source, &inv, max_len)?, NullCheck::Preserved(_)))
    }

    /// The inverse of an isomorphism.
    pub fn inverse(&self) -> Result<TractHom> {
        match &self.map {
            HomMap::Identity => Ok(self.clone()),
            HomMap::Units(v) => {
                let mut inv = vec![Scalar::Zero; v.len()];
                for (u, &x) in v.iter().enumerate() {
                    inv[x as usize] = Scalar::Unit(u as u32);
                }
                if inv.contains(&Scalar::Zero) {
                    bail!(Domain, "map is not bijective on units");
                }
                TractHom::from_unit_images(&self.target, &self.source, &inv)
            }
            HomMap::Terminal => bail!(Domain, "terminal map is not invertible"),
        }
    }
}

impl fmt::Display for TractHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)?;
        if let HomMap::Units(v) = &self.map {
            f.write_str(" {")?;
            for (i, &x) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(
                    f,
                    "{} => {}",
                    self.source.fmt_elem(Scalar::Unit(i as u32)),
                    self.target.fmt_elem(Scalar::Unit(x))
                )?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}
