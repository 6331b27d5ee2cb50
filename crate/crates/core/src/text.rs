//! Line-oriented file formats.
//!
//! Every format starts with a header line; blank lines and lines starting
//! with `#` are skipped. Tracts are named by descriptor in headers.
//!
//! | header | body |
//! |---|---|
//! | `n <n>` | one basis per line, `1 2* 3` |
//! | `matroid n <n> r <r>` | one basis per line over `[n]`, `-` for the empty set |
//! | `wick tract <d> n <n>` | `<transversal> <element>` per line, omitted means zero |
//! | `signature tract <d> n <n>` | `(<v1>,…,<vn> \| <v1*>,…,<vn*>)` per line |
//! | `vectors tract <d> n <n>` | as for signatures |
//! | `custom <label> units <k>` | `row`, `involution`, `null` and `bound` lines |
//!
//! A custom tract file without `row` lines has the cyclic group of order `k`.
//! Its `null` lines list unit indices; without a `bound` line the list is the
//! whole null set.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::ground_set::{ESet, Transversal};
use crate::ortho_matroid::{Matroid, OrthoMatroid};
use crate::signature::{SignatureFamily, TractVector};
use crate::tract_core::{CustomSpec, Tract};
use crate::vector_set::VectorFamily;
use crate::wick::WickFunction;

/// Resolves `custom:<name>` tract descriptors.
pub type Resolver<'a> = &'a mut dyn FnMut(&str) -> Result<Tract>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    OrthoMatroid,
    Matroid,
    Wick,
    Signature,
    Vectors,
    Custom,
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn header(text: &str) -> Result<(usize, Vec<&str>)> {
    let (no, line) = lines(text).next().ok_or_else(|| Error::Parse("empty file".into()))?;
    Ok((no, line.split_whitespace().collect()))
}

fn body(text: &str) -> impl Iterator<Item = (usize, &str)> {
    lines(text).skip(1)
}

fn at<T>(no: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("line {no}: {m}")),
        other => other,
    })
}

fn num(no: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("line {no}: expected a number, got {s:?}")))
}

pub fn file_kind(text: &str) -> Result<FileKind> {
    let (no, h) = header(text)?;
    Ok(match h.first().copied() {
        Some("n") => FileKind::OrthoMatroid,
        Some("matroid") => FileKind::Matroid,
        Some("wick") => FileKind::Wick,
        Some("signature") => FileKind::Signature,
        Some("vectors") => FileKind::Vectors,
        Some("custom") => FileKind::Custom,
        _ => return Err(Error::Parse(format!("line {no}: unknown header {:?}", h.join(" ")))),
    })
}

/// The header and basis lines of an orthogonal matroid file, without
/// validating the basis axioms.
pub fn parse_bases(text: &str) -> Result<(usize, Vec<Transversal>)> {
    let (no, h) = header(text)?;
    let n = match h.as_slice() {
        ["n", n] => num(no, n)?,
        _ => return Err(Error::Parse(format!("line {no}: expected `n <n>`"))),
    };
    let mut bases = Vec::new();
    for (no, l) in body(text) {
        bases.push(at(no, Transversal::parse(n, l))?);
    }
    if n == 0 && bases.is_empty() {
        bases.push(Transversal::new(0, 0));
    }
    Ok((n, bases))
}

pub fn parse_ortho_matroid(text: &str) -> Result<OrthoMatroid> {
    let (n, bases) = parse_bases(text)?;
    OrthoMatroid::new(n, bases)
}

pub fn format_ortho_matroid(m: &OrthoMatroid) -> String {
    m.to_string()
}

pub fn parse_matroid(text: &str) -> Result<Matroid> {
    let (no, h) = header(text)?;
    let (n, r) = match h.as_slice() {
        ["matroid", "n", n, "r", r] => (num(no, n)?, num(no, r)?),
        _ => return Err(Error::Parse(format!("line {no}: expected `matroid n <n> r <r>`"))),
    };
    let mut bases = Vec::new();
    for (no, l) in body(text) {
        let s = at(no, ESet::parse(n, l))?;
        if s.starred() != 0 {
            return Err(Error::Parse(format!("line {no}: starred element in an ordinary matroid")));
        }
        if s.len() != r {
            return Err(Error::Parse(format!("line {no}: basis {s} does not have {r} elements")));
        }
        bases.push(s.unstarred());
    }
    if r == 0 && bases.is_empty() {
        bases.push(0);
    }
    Matroid::new(n, bases)
}

pub fn format_matroid(m: &Matroid) -> String {
    let n = m.n();
    let mut s = format!("matroid n {n} r {}\n", m.rank());
    for &b in m.bases() {
        let _ = writeln!(s, "{}", ESet::from_parts(n, b, 0));
    }
    s
}

fn tract_header(no: usize, h: &[&str], word: &str, resolve: Resolver) -> Result<(Tract, usize)> {
    match h {
        [w, "tract", d, "n", n] if *w == word => Ok((at(no, Tract::parse_with(d, resolve))?, num(no, n)?)),
        _ => Err(Error::Parse(format!("line {no}: expected `{word} tract <descriptor> n <n>`"))),
    }
}

pub fn parse_wick(text: &str, resolve: Resolver) -> Result<WickFunction> {
    let (no, h) = header(text)?;
    let (tract, n) = tract_header(no, &h, "wick", resolve)?;
    let mut entries = Vec::new();
    for (no, l) in body(text) {
        let (t, x) = l.rsplit_once(char::is_whitespace).unwrap_or(("", l));
        let t = at(no, Transversal::parse(n, t))?;
        let x = at(no, tract.parse_elem(x))?;
        if entries.iter().any(|&(s, _)| s == t) {
            return Err(Error::Parse(format!("line {no}: transversal {t} repeated")));
        }
        entries.push((t, x));
    }
    WickFunction::from_map(&tract, n, entries)
}

/// Nonzero values only, in lexicographic order of transversals.
pub fn format_wick(phi: &WickFunction) -> String {
    let t = phi.tract();
    let mut s = format!("wick tract {} n {}\n", t.name(), phi.n());
    for b in phi.support() {
        let _ = writeln!(s, "{b} {}", t.fmt_elem(phi.value(b)));
    }
    s
}

fn parse_vector_lines(text: &str, word: &str, resolve: Resolver) -> Result<(Tract, usize, Vec<TractVector>)> {
    let (no, h) = header(text)?;
    let (tract, n) = tract_header(no, &h, word, resolve)?;
    let mut vs = Vec::new();
    for (no, l) in body(text) {
        vs.push(at(no, TractVector::parse(&tract, n, l))?);
    }
    Ok((tract, n, vs))
}

pub fn parse_signature(text: &str, resolve: Resolver) -> Result<SignatureFamily> {
    let (tract, n, vs) = parse_vector_lines(text, "signature", resolve)?;
    SignatureFamily::new(&tract, n, vs)
}

/// One representative per circuit.
pub fn format_signature(c: &SignatureFamily) -> String {
    let t = c.tract();
    let mut s = format!("signature tract {} n {}\n", t.name(), c.n());
    for x in c.reps() {
        let _ = writeln!(s, "{}", x.fmt_with(t));
    }
    s
}

pub fn parse_vectors(text: &str, resolve: Resolver) -> Result<VectorFamily> {
    let (tract, n, vs) = parse_vector_lines(text, "vectors", resolve)?;
    VectorFamily::new(&tract, n, vs)
}

/// Every vector, the zero vector included.
pub fn format_vectors(v: &VectorFamily) -> String {
    format!("vectors tract {} n {}\n{}", v.tract().name(), v.n(), v.fmt_with())
}

fn index_list(no: usize, items: &[&str]) -> Result<Vec<u32>> {
    items.iter().map(|s| num(no, s).map(|x| x as u32)).collect()
}

pub fn parse_custom_tract(text: &str) -> Result<CustomSpec> {
    let (no, h) = header(text)?;
    let (label, k) = match h.as_slice() {
        ["custom", label, "units", k] => (label.to_string(), num(no, k)? as u32),
        _ => return Err(Error::Parse(format!("line {no}: expected `custom <label> units <k>`"))),
    };
    let mut spec = CustomSpec::cyclic(&label, k, Vec::new(), None);
    let mut rows = Vec::new();
    for (no, l) in body(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["row", rest @ ..] => rows.push(index_list(no, rest)?),
            ["involution", rest @ ..] => spec.involution = Some(index_list(no, rest)?),
            ["null", rest @ ..] => spec.nulls.push(index_list(no, rest)?),
            ["bound", b] => spec.bound = Some(num(no, b)?),
            _ => return Err(Error::Parse(format!("line {no}: unknown directive {l:?}"))),
        }
    }
    if !rows.is_empty() {
        spec.table = rows;
    }
    Ok(spec)
}

pub fn format_custom_tract(spec: &CustomSpec) -> String {
    let join = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut s = format!("custom {} units {}\n", spec.label, spec.table.len());
    for r in &spec.table {
        let _ = writeln!(s, "row {}", join(r));
    }
    if let Some(inv) = &spec.involution {
        let _ = writeln!(s, "involution {}", join(inv));
    }
    for z in &spec.nulls {
        let _ = writeln!(s, "null {}", join(z));
    }
    if let Some(b) = spec.bound {
        let _ = writeln!(s, "bound {b}");
    }
    s
}
