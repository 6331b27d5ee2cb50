//! Named orthogonal matroids, tracts and signatures used by the tests, the
//! acceptance driver and the CLI.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::bail;
use crate::ground_set::{enumerate_transversals, Transversal};
use crate::ortho_matroid::{Matroid, OrthoMatroid};
use crate::signature::{SignatureFamily, TractVector};
use crate::tract_core::{CustomSpec, Scalar, Tract};
use crate::Result;

/// The integer `i` as an element: `0`, `±1` in any tract, and `i·1` in a field.
pub fn int_elem(t: &Tract, i: i64) -> Result<Scalar> {
    match i {
        0 => return Ok(Scalar::Zero),
        1 => return Ok(t.one()),
        -1 => return Ok(t.eps()),
        _ => {}
    }
    if !t.is_field() {
        bail!(Domain, "{i} is not an element of {t}");
    }
    let mut acc = Scalar::Zero;
    for _ in 0..i.unsigned_abs() {
        acc = t.field_add(acc, t.one())?;
    }
    Ok(if i < 0 { t.mul(t.eps(), acc) } else { acc })
}

/// A vector from integer rows `X(1..n)` and `X(1*..n*)`.
pub fn int_vector(t: &Tract, top: &[i64], bottom: &[i64]) -> Result<TractVector> {
    let a = top.iter().map(|&i| int_elem(t, i)).collect::<Result<Vec<_>>>()?;
    let b = bottom.iter().map(|&i| int_elem(t, i)).collect::<Result<Vec<_>>>()?;
    TractVector::from_halves(&a, &b)
}

fn by_starred_count(n: usize, keep: impl Fn(Transversal) -> bool) -> OrthoMatroid {
    OrthoMatroid::new(n, enumerate_transversals(n).filter(|&t| keep(t))).expect("named orthogonal matroid")
}

/// `M3` on `[3] ∪ [3]*`: one starred element, or all three.
pub fn m3() -> OrthoMatroid {
    by_starred_count(3, |t| matches!(t.starred().count_ones(), 1 | 3))
}

/// `M4` on `[4] ∪ [4]*`: one or three starred elements.
pub fn m4() -> OrthoMatroid {
    by_starred_count(4, |t| matches!(t.starred().count_ones(), 1 | 3))
}

/// Bases `[4]`, `[4]*` and every transversal with two starred elements.
pub fn two_or_four_matroid() -> OrthoMatroid {
    by_starred_count(4, |t| t.starred().count_ones() % 2 == 0)
}

/// The eight-vector signature over a field with trivial involution, for a
/// parameter `x ∉ {0, -3}`. Satisfies Ot3 and L1 but neither O' nor L2.
pub fn two_or_four_family(t: &Tract, x: i64) -> Result<SignatureFamily> {
    let rows: [([i64; 4], [i64; 4]); 8] = [
        ([0, 1, 1, 1], [1, 0, 0, 0]),
        ([-1, 0, 1, -1], [0, 1, 0, 0]),
        ([-1, -1, 0, 1], [0, 0, 1, 0]),
        ([-1, 1, -1, 0], [0, 0, 0, 1]),
        ([x, 0, 0, 0], [0, 1, 1, 1]),
        ([0, x, 0, 0], [-1, 0, 1, -1]),
        ([0, 0, -x, 0], [1, 1, 0, -1]),
        ([0, 0, 0, -x], [1, -1, 1, 0]),
    ];
    let v = rows.iter().map(|(a, b)| int_vector(t, a, b)).collect::<Result<Vec<_>>>()?;
    SignatureFamily::from_parts(t, two_or_four_matroid(), v)
}

/// `lift(U_{r,n})`.
pub fn uniform_lift(r: usize, n: usize) -> OrthoMatroid {
    Matroid::uniform(r, n).lift()
}

/// The lift of the cycle matroid of `K4`.
pub fn k4_lift() -> OrthoMatroid {
    let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    Matroid::graphic(4, &edges).expect("K4 is connected").lift()
}

/// The lift of the Fano matroid (n = 7).
pub fn fano_lift() -> OrthoMatroid {
    let lines: [u32; 7] = [0b0000111, 0b0011001, 0b0101010, 0b1001100, 0b0110100, 0b1010010, 0b1100001];
    let bases = (0..1u32 << 7).filter(|b| b.count_ones() == 3 && !lines.contains(b));
    Matroid::new(7, bases).expect("Fano matroid").lift()
}

/// On `[5] ∪ [5]*`: transversals meeting `[5]` evenly, except `1*2345` and
/// `12*345`.
pub fn even_five() -> OrthoMatroid {
    let skip = [Transversal::new(5, 0b00001), Transversal::new(5, 0b00010)];
    by_starred_count(5, |t| t.unstarred_count() % 2 == 0 && !skip.contains(&t))
}

/// The one-unit tract whose null sums are the empty sum and the sums of two to
/// `max` ones.
pub fn ones_tract(max: usize) -> Tract {
    let nulls = (2..=max).map(|k| vec![0; k]).collect();
    Tract::custom(CustomSpec::cyclic(&format!("ones{max}"), 1, nulls, None)).expect("valid tract")
}

/// A `U0` signature of `lift(U_{1,3})` whose complement has a non-closed minor.
pub fn u13_regular_family() -> Result<SignatureFamily> {
    let t = Tract::regular();
    let v = vec![
        int_vector(&t, &[1, -1, 0], &[0, 0, 0])?,
        int_vector(&t, &[1, 0, 1], &[0, 0, 0])?,
        int_vector(&t, &[0, 1, 1], &[0, 0, 0])?,
        int_vector(&t, &[0, 0, 0], &[1, 1, -1])?,
    ];
    SignatureFamily::from_parts(&t, uniform_lift(1, 3), v)
}

/// The `F2` signature of `lift(U_{1,3})`.
pub fn u13_binary_family() -> Result<SignatureFamily> {
    SignatureFamily::uniform(&Tract::field(2)?, &uniform_lift(1, 3))
}

/// A named matroid.
pub fn matroid_by_name(name: &str) -> Result<OrthoMatroid> {
    Ok(match name {
        "M3" => m3(),
        "M4" => m4(),
        "K4" => k4_lift(),
        "Fano" => fano_lift(),
        "even5" => even_five(),
        "two-or-four" => two_or_four_matroid(),
        _ => match name.strip_prefix('U').and_then(|s| s.split_once(',')) {
            Some((r, n)) => {
                let r: usize = r.parse().map_err(|_| crate::Error::Parse(format!("bad rank in {name}")))?;
                let n: usize = n.parse().map_err(|_| crate::Error::Parse(format!("bad size in {name}")))?;
                if r > n {
                    bail!(Domain, "rank exceeds size in {name}");
                }
                uniform_lift(r, n)
            }
            None => bail!(Parse, "unknown matroid {name:?}"),
        },
    })
}

/// Matroid and tract pairs used for round trips between the four descriptions.
pub fn roundtrip_pairs() -> Result<Vec<(String, OrthoMatroid, Tract)>> {
    let f2 = Tract::field(2)?;
    let f3 = Tract::field(3)?;
    let f4 = Tract::field(4)?;
    let f5 = Tract::field(5)?;
    let (u0, s, k) = (Tract::regular(), Tract::sign(), Tract::krasner());
    let mats: [(&str, OrthoMatroid, Vec<&Tract>); 6] = [
        ("M3", m3(), vec![&f2, &f3, &f4, &u0, &s, &k]),
        ("M4", m4(), vec![&f2, &f3, &f5, &u0, &s]),
        ("U1,3", uniform_lift(1, 3), vec![&f2, &f3, &f4, &f5, &u0, &k]),
        ("U2,4", uniform_lift(2, 4), vec![&f3, &f4, &f5, &s, &k]),
        ("U2,3", uniform_lift(2, 3), vec![&f2, &f3, &u0, &s]),
        ("K4", k4_lift(), vec![&f2, &f3, &u0, &s, &k]),
    ];
    let mut out = Vec::new();
    for (name, m, ts) in mats {
        for t in ts {
            out.push((String::from(name), m.clone(), t.clone()));
        }
    }
    Ok(out)
}
