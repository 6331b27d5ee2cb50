use orthotract::corpus::{even_five, int_vector, roundtrip_pairs, u13_binary_family, u13_regular_family};
use orthotract::represent::search_representation;
use orthotract::signature::{circuits_from_wick, inner_product_star, pivot_span_contains};
use orthotract::vector_set::{elementary_signature, perp, signature_perp, VectorWitness};
use orthotract::wick::WickLevel;
use orthotract::{Element, Scalar, SignatureFamily, Tract, TractHom, TractVector, VectorFamily};
use proptest::prelude::*;

fn reps(v: &VectorFamily) -> Vec<TractVector> {
    let mut r = v.representatives();
    r.sort();
    r
}

fn normalized(t: &Tract, vs: Vec<TractVector>) -> Vec<TractVector> {
    let mut r: Vec<TractVector> = vs.into_iter().map(|x| x.normalized(t)).collect();
    r.sort();
    r.dedup();
    r
}

// Families small enough to enumerate F^E.
fn small_families() -> Vec<(String, SignatureFamily)> {
    roundtrip_pairs()
        .unwrap()
        .into_iter()
        .filter(|(_, m, t)| (t.unit_count().unwrap() as f64 + 1.0).powi(2 * m.n() as i32) <= 600_000.0)
        .map(|(name, m, t)| {
            let phi = search_representation(&m, &t, WickLevel::Strong).unwrap().found.unwrap();
            (format!("{name}/{t}"), circuits_from_wick(&phi).unwrap())
        })
        .collect()
}

#[test]
fn census_of_the_even_five_matroid() {
    let k = Tract::krasner();
    let c = SignatureFamily::uniform(&k, &even_five()).unwrap();
    assert_eq!(c.reps().len(), 15);
    assert_eq!(c.all_vectors().len(), 15);
    let v = signature_perp(&c).unwrap();
    assert_eq!(v.len(), 256);
    let vp = perp(&k, 5, v.vectors()).unwrap();
    assert_eq!(vp.len(), 169);
    assert_eq!(v.elementary_vectors().len(), 15);
    assert_eq!(elementary_signature(&v).unwrap(), c);
}

#[test]
fn regular_u13_minor_is_not_a_vector_set() {
    let u0 = Tract::regular();
    let c = u13_regular_family().unwrap();
    let v = signature_perp(&c).unwrap();
    assert_eq!(v.check_vector_set().unwrap(), None);
    let (v3, valid) = v.minor(Element::plain(2)).unwrap();
    assert!(!valid);
    let expect: Vec<TractVector> = [([1, -1], [0, 0]), ([1, 0], [0, 0]), ([0, 1], [0, 0])]
        .iter()
        .map(|(a, b)| int_vector(&u0, a, b).unwrap())
        .collect();
    assert_eq!(reps(&v3), normalized(&u0, expect.clone()));
    let cp = signature_perp(&c.minor(Element::plain(2)).unwrap()).unwrap();
    let mut with = expect;
    with.push(int_vector(&u0, &[1, 1], &[0, 0]).unwrap());
    assert_eq!(reps(&cp), normalized(&u0, with));
    assert!(v3.vectors().iter().all(|x| cp.contains(x)));
}

#[test]
fn binary_u13_pushforward_to_krasner() {
    let f2 = Tract::field(2).unwrap();
    let k = Tract::krasner();
    let c = u13_binary_family().unwrap();
    let v = signature_perp(&c).unwrap();
    assert_eq!(v.check_vector_set().unwrap(), None);
    let f = TractHom::terminal(&f2);
    let fc = c.pushforward(&f).unwrap();
    let fv = v.pushforward(&f).unwrap();
    let x = int_vector(&k, &[1, 1, 1], &[0, 0, 0]).unwrap();
    assert!(signature_perp(&fc).unwrap().contains(&x));
    assert!(!fv.contains(&x));
    assert!(!v.pushforward(&f).unwrap().is_vector_set().unwrap());
    assert_eq!(elementary_signature(&fv).unwrap(), fc);
}

#[test]
fn full_space() {
    let f3 = Tract::field(3).unwrap();
    let all = perp(&f3, 2, &[]).unwrap();
    assert_eq!(all.len(), 81);
    assert!(all.support_bases().is_empty());
    let w = all.check_vector_set().unwrap().unwrap();
    assert_eq!(w.axiom(), "V1");
    let elem = all.elementary_vectors();
    assert!(elem.vectors().iter().all(|x| x.support().len() == 1));
    assert!(perp(&Tract::tropical(), 2, &[]).is_err());
}

#[test]
fn strong_signatures_and_their_complements() {
    for (name, c) in small_families() {
        let v = signature_perp(&c).unwrap();
        assert_eq!(v.check_vector_set().unwrap(), None, "{name}");
        assert_eq!(elementary_signature(&v).unwrap(), c, "{name}");
        let ev = v.elementary_vectors();
        assert_eq!(perp(c.tract(), c.n(), ev.vectors()).unwrap(), v, "{name}");
        let mut sb = v.support_bases();
        sb.sort();
        assert_eq!(sb, c.matroid().bases(), "{name}");
        for &b in c.matroid().bases() {
            let form = v.fundamental_circuit_form(b).unwrap();
            assert_eq!(form.len(), c.n());
            for (p, x) in form.iter().enumerate() {
                let e = b.at(p as u8).dual();
                assert_eq!(x.get(e), c.tract().one());
                assert!(x.support().is_subset(b.flip(p as u8).to_set()));
            }
        }
    }
}

// X is consistent with 𝒞 when X̃ lies in the span of the fundamental circuits at every basis.
fn consistent(c: &SignatureFamily, x: &TractVector) -> bool {
    let t = c.tract();
    let m = c.matroid();
    m.bases().iter().all(|&b| {
        let mut gens = Vec::new();
        let mut pivots = Vec::new();
        for p in 0..m.n() as u8 {
            let e = b.at(p).dual();
            let circ = m.fundamental_circuit(b, e).unwrap();
            gens.push(c.reps_with_support(circ).next().unwrap().conj(t));
            pivots.push(e);
        }
        pivot_span_contains(t, &gens, &pivots, &x.conj(t)).unwrap()
    })
}

#[test]
fn complement_is_exactly_the_consistent_vectors() {
    for (name, c) in small_families() {
        if c.n() > 4 {
            continue;
        }
        let v = signature_perp(&c).unwrap();
        let everything = perp(c.tract(), c.n(), &[]).unwrap();
        for x in everything.vectors() {
            assert_eq!(consistent(&c, x), v.contains(x), "{name}: {}", x.fmt_with(c.tract()));
        }
    }
}

#[test]
fn vector_minors_over_fields() {
    for (name, c) in small_families() {
        let t = c.tract();
        let v = signature_perp(&c).unwrap();
        for p in 0..c.n() as u8 {
            for e in [Element::plain(p), Element::star(p)] {
                if c.matroid().is_singular(e) {
                    continue;
                }
                let (vm, valid) = v.minor(e).unwrap();
                let cm = signature_perp(&c.minor(e).unwrap()).unwrap();
                assert!(vm.vectors().iter().all(|x| cm.contains(x)), "{name} | {e}");
                if t.is_field() {
                    assert!(valid, "{name} | {e}");
                }
            }
        }
    }
}

#[test]
fn lagrangian_complements_over_f3_and_f5() {
    let mut seen = 0;
    for (name, c) in small_families() {
        let t = c.tract();
        if !["F3", "F5"].contains(&t.name()) {
            continue;
        }
        assert!(signature_perp(&c).unwrap().is_lagrangian().unwrap(), "{name}");
        seen += 1;
    }
    assert!(seen >= 4);
}

#[test]
fn diagonal_line_over_f2() {
    let f2 = Tract::field(2).unwrap();
    let v = VectorFamily::new(&f2, 1, [TractVector::zero(1), int_vector(&f2, &[1], &[1]).unwrap()]).unwrap();
    assert!(v.is_lagrangian().unwrap());
    assert!(!v.is_vector_set().unwrap());
    assert!(VectorFamily::new(&Tract::field(4).unwrap(), 1, [TractVector::zero(1)]).unwrap().is_lagrangian().is_err());
}

#[test]
fn missing_fundamental_vector() {
    let f3 = Tract::field(3).unwrap();
    let phi = search_representation(&orthotract::corpus::uniform_lift(1, 3), &f3, WickLevel::Strong).unwrap().found.unwrap();
    let c = circuits_from_wick(&phi).unwrap();
    let v = signature_perp(&c).unwrap();
    let b = c.matroid().least_basis();
    let drop = v.fundamental_circuit_form(b).unwrap()[0].clone();
    let kept: Vec<TractVector> = v.vectors().iter().filter(|x| x.normalized(&f3) != drop.normalized(&f3)).cloned().collect();
    let broken = VectorFamily::new(&f3, 3, kept).unwrap();
    assert!(broken.fundamental_circuit_form(b).is_err());
    let w = broken.check_vector_set().unwrap().unwrap();
    assert!(matches!(w, VectorWitness::V2 { .. } | VectorWitness::V3Missing { .. } | VectorWitness::NoSupportBasis), "{w:?}");
}

fn f3_vec(raw: &[u8]) -> TractVector {
    let coords = raw.iter().map(|&c| match c % 3 {
        0 => Scalar::Zero,
        1 => Scalar::Unit(0),
        _ => Scalar::Unit(1),
    });
    TractVector::new(raw.len() / 2, coords.collect()).unwrap()
}

fn f3_add(t: &Tract, x: &TractVector, y: &TractVector) -> TractVector {
    let c = x.coords().iter().zip(y.coords()).map(|(&a, &b)| t.field_add(a, b).unwrap()).collect();
    TractVector::new(x.n(), c).unwrap()
}

fn isotropic(t: &Tract, x: &TractVector, y: &TractVector) -> bool {
    let s = inner_product_star(t, x, y);
    t.is_null(s.terms()).unwrap()
}

// A random maximal isotropic subspace of F3^{[3] ∪ [3]*}, grown greedily.
fn random_lagrangian(t: &Tract, seeds: &[Vec<u8>]) -> Option<VectorFamily> {
    let mut span: Vec<TractVector> = vec![TractVector::zero(3)];
    let mut basis: Vec<TractVector> = Vec::new();
    for s in seeds {
        let x = f3_vec(s);
        if span.contains(&x) || !isotropic(t, &x, &x) || !basis.iter().all(|b| isotropic(t, &x, b)) {
            continue;
        }
        basis.push(x.clone());
        let mut next = Vec::new();
        for v in &span {
            for c in t.elements() {
                next.push(f3_add(t, v, &x.scale(t, c)));
            }
        }
        next.sort();
        next.dedup();
        span = next;
        if basis.len() == 3 {
            return Some(VectorFamily::new(t, 3, span).unwrap());
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_f3_lagrangians_are_vector_sets(seeds in prop::collection::vec(prop::collection::vec(0u8..3, 6), 40)) {
        let t = Tract::field(3).unwrap();
        let v = random_lagrangian(&t, &seeds);
        prop_assume!(v.is_some());
        let v = v.unwrap();
        prop_assert_eq!(v.len(), 27);
        prop_assert!(v.is_lagrangian().unwrap());
        prop_assert_eq!(v.check_vector_set().unwrap(), None);
        let c = elementary_signature(&v).unwrap();
        prop_assert_eq!(signature_perp(&c).unwrap(), v);
    }

    #[test]
    fn perp_reverses_inclusion(which in 0usize..64, keep in prop::collection::vec(any::<bool>(), 24)) {
        let fams = small_families();
        let (_, c) = &fams[which % fams.len()];
        if c.n() > 4 {
            return Ok(());
        }
        let all = c.reps().to_vec();
        let sub: Vec<TractVector> = all.iter().zip(keep.iter().cycle()).filter(|(_, &k)| k).map(|(x, _)| x.clone()).collect();
        let big = perp(c.tract(), c.n(), &all).unwrap();
        let small = perp(c.tract(), c.n(), &sub).unwrap();
        prop_assert!(big.vectors().iter().all(|x| small.contains(x)));
    }
}
