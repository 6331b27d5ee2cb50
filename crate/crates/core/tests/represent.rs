use std::collections::BTreeSet;

use orthotract::corpus::{fano_lift, k4_lift, m3, m4, uniform_lift};
use orthotract::ground_set::enumerate_transversals;
use orthotract::ortho_matroid::check_bases;
use orthotract::represent::{
    check_m4_free_theorem, four_term_has_zero_product, is_regular, is_sixth_root_representable, probe_m4, pushforward_targets,
    r6_iso, regular_to_sixth_root, search_all, search_representation, search_representation_bounded, sign_collapse_images,
    sign_collapse_is_homomorphism, sixth_root_hom,
};
use orthotract::tract_core::{check_unit_map, NullCheck};
use orthotract::wick::WickLevel;
use orthotract::{OrthoMatroid, Scalar, Tract, TractHom, Transversal, WickFunction};

fn small_tracts() -> Vec<Tract> {
    vec![
        Tract::field(2).unwrap(),
        Tract::field(3).unwrap(),
        Tract::field(4).unwrap(),
        Tract::field(5).unwrap(),
        Tract::regular(),
        Tract::sign(),
        Tract::krasner(),
    ]
}

// Every orthogonal matroid on at most three pairs, by brute force over subsets of transversals.
fn all_small_matroids() -> Vec<OrthoMatroid> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        let all: Vec<Transversal> = enumerate_transversals(n).collect();
        for mask in 1u32..1 << all.len() {
            let cand: Vec<Transversal> = (0..all.len()).filter(|&i| mask >> i & 1 == 1).map(|i| all[i]).collect();
            if check_bases(n, &cand).unwrap().is_none() {
                out.push(OrthoMatroid::new(n, cand).unwrap());
            }
        }
    }
    out
}

// All strong Wick functions supported on the bases of `m`, with value 1 at the least basis.
fn brute_force(m: &OrthoMatroid, t: &Tract) -> BTreeSet<Vec<Scalar>> {
    let bases: Vec<Transversal> = enumerate_transversals(m.n()).filter(|&b| m.is_basis(b)).collect();
    let units = t.units();
    let free = bases.len() - 1;
    let mut out = BTreeSet::new();
    let mut digits = vec![0usize; free];
    loop {
        let mut values = vec![Scalar::Zero; 1 << m.n()];
        values[bases[0].index()] = t.one();
        for (b, &d) in bases[1..].iter().zip(&digits) {
            values[b.index()] = units[d];
        }
        let phi = WickFunction::new(t, m.n(), values.clone()).unwrap();
        if phi.check_wick(WickLevel::Strong).unwrap().is_none() {
            out.insert(values);
        }
        let Some(i) = digits.iter().position(|&d| d + 1 < units.len()) else { break };
        digits[i] += 1;
        digits[..i].iter_mut().for_each(|d| *d = 0);
    }
    out
}

fn to_field(t: &Tract) -> TractHom {
    TractHom::from_unit_images(&Tract::regular(), t, &[t.one(), t.eps()]).unwrap()
}

#[test]
fn search_agrees_with_exhaustive_enumeration() {
    let ms = all_small_matroids();
    assert!(ms.len() > 20);
    for m in &ms {
        for t in small_tracts() {
            let expect = brute_force(m, &t);
            let got: BTreeSet<Vec<Scalar>> =
                search_all(m, &t, WickLevel::Strong, usize::MAX).unwrap().into_iter().map(|phi| phi.values().to_vec()).collect();
            assert_eq!(got, expect, "{:?} over {t}", m.bases());
            let one = search_representation(m, &t, WickLevel::Strong).unwrap();
            assert_eq!(one.found.is_some(), !expect.is_empty());
        }
    }
}

#[test]
fn search_is_sound_on_the_corpus() {
    let corpus = [m3(), m4(), uniform_lift(1, 3), uniform_lift(2, 3), uniform_lift(2, 4), k4_lift()];
    for m in &corpus {
        for t in small_tracts() {
            for level in [WickLevel::Strong, WickLevel::Moderate, WickLevel::Weak] {
                let r = search_representation(m, &t, level).unwrap();
                assert!(r.nodes >= 1);
                assert_eq!(r.level, level);
                if let Some(phi) = r.found {
                    assert_eq!(phi.check_wick(level).unwrap(), None);
                    assert_eq!(&phi.underlying_matroid().unwrap(), m);
                    assert_eq!(phi.value(m.least_basis()), t.one());
                }
            }
        }
    }
}

#[test]
fn uniform_two_four_needs_three_elements() {
    let u24 = uniform_lift(2, 4);
    assert!(search_representation(&u24, &Tract::field(2).unwrap(), WickLevel::Strong).unwrap().found.is_none());
    assert!(search_representation(&u24, &Tract::regular(), WickLevel::Strong).unwrap().found.is_none());
    let f3 = search_representation(&u24, &Tract::field(3).unwrap(), WickLevel::Strong).unwrap();
    assert!(f3.found.is_some());
    let m4u = search_representation(&m4(), &Tract::regular(), WickLevel::Strong).unwrap();
    assert!(m4u.found.is_some());
}

#[test]
fn search_rejects_bad_input() {
    assert!(search_representation(&m3(), &Tract::tropical(), WickLevel::Strong).is_err());
    assert!(search_representation(&fano_lift(), &Tract::field(2).unwrap(), WickLevel::Strong).is_err());
}

#[test]
fn regular_pipeline() {
    for m in [m4(), k4_lift()] {
        let r = is_regular(&m).unwrap();
        assert!(r.first.is_some() && r.second.is_some(), "{:?}", r.notes);
        let phi = r.regular.expect("regular");
        assert_eq!(phi.check_wick(WickLevel::Strong).unwrap(), None);
        assert_eq!(phi.underlying_matroid().unwrap(), m);
        for q in [2, 3, 5, 7] {
            let t = Tract::field(q).unwrap();
            let psi = phi.pushforward(&to_field(&t)).unwrap();
            assert_eq!(psi.check_wick(WickLevel::Strong).unwrap(), None, "F{q}");
        }
    }
    let r = is_regular(&uniform_lift(2, 4)).unwrap();
    assert!(r.first.is_none() && r.second.is_none() && r.regular.is_none());
    assert_eq!(r.notes, vec!["no F2 representation".to_string()]);
}

#[test]
fn m4_free_route() {
    let r = check_m4_free_theorem(&m3()).unwrap();
    assert!(r.m4_free);
    let rep = r.report.unwrap();
    assert!(rep.first.is_some() && rep.second.is_some());
    assert!(rep.regular.is_some());
    assert_eq!(r.zero_product_holds, Some(true));

    let r = check_m4_free_theorem(&m4()).unwrap();
    assert!(!r.m4_free);
    assert!(r.report.is_none() && r.zero_product_holds.is_none());

    let k = k4_lift();
    let r = check_m4_free_theorem(&k).unwrap();
    if r.m4_free {
        assert!(r.report.unwrap().regular.is_some());
    }
    let row = probe_m4(&m4()).unwrap();
    assert!(row.binary && row.sign && row.regular);
}

#[test]
fn four_term_products_on_m4() {
    let u0 = Tract::regular();
    let phi = WickFunction::indicator(&u0, &m4());
    assert!(!four_term_has_zero_product(&phi));
    assert!(four_term_has_zero_product(&WickFunction::indicator(&u0, &m3())));
}

#[test]
fn sign_collapse_is_not_a_homomorphism() {
    let f2 = Tract::field(2).unwrap();
    let f2f3 = Tract::product(&f2, &Tract::field(3).unwrap()).unwrap();
    let f2s = Tract::product(&f2, &Tract::sign()).unwrap();
    assert_eq!(sign_collapse_images(&f2f3).unwrap().len(), 2);
    // six copies of (1, -1) vanish in both factors
    assert!(!sign_collapse_is_homomorphism(&f2f3, 6).unwrap());
    // (1,1) + (1,1) + (1,1) + (1,-1)
    assert!(!sign_collapse_is_homomorphism(&f2s, 4).unwrap());
    assert!(sign_collapse_images(&f2).is_err());
    assert!(sign_collapse_images(&Tract::product(&f2, &f2).unwrap()).is_err());
}

#[test]
fn sixth_root_isomorphism() {
    let iso = r6_iso(6).unwrap();
    let r6 = Tract::sixth_root();
    let p = Tract::product(&Tract::field(3).unwrap(), &Tract::field(4).unwrap()).unwrap();
    assert!(iso.forward.is_isomorphism(3).unwrap());
    assert!(!iso.forward.is_isomorphism(4).unwrap());
    assert!(iso.forward.is_involution_compatible());
    let imgs: Vec<Scalar> = r6.units().into_iter().map(|u| iso.forward.apply(u)).collect();
    assert!(matches!(check_unit_map(&r6, &p, &imgs.iter().map(|s| unit(*s)).collect::<Vec<_>>(), 6).unwrap(), NullCheck::Preserved(_)));
    // ζ goes to (-1, ω) with ω of order three
    let z = iso.forward.apply(r6.parse_elem("z^1").unwrap());
    let f3 = Tract::field(3).unwrap();
    let f4 = Tract::field(4).unwrap();
    assert_eq!(p.project(0, z).unwrap(), f3.eps());
    let w = p.project(1, z).unwrap();
    assert_ne!(w, f4.one());
    assert_eq!(f4.mul(f4.mul(w, w), w), f4.one());
    // the inverse keeps the partial-field relations and breaks at four terms
    assert_eq!(iso.inverse_len, 3);
    let broken = iso.inverse_broken.clone().unwrap();
    assert_eq!(broken.len(), 4);
    let terms: Vec<Scalar> = broken.iter().map(|&u| Scalar::Unit(u)).collect();
    assert!(p.is_null(&terms).unwrap());
    let back: Vec<Scalar> = broken.iter().map(|&u| iso.inverse[u as usize]).collect();
    assert!(!r6.is_null(&back).unwrap());
}

fn unit(s: Scalar) -> u32 {
    match s {
        Scalar::Unit(u) => u,
        _ => panic!("not a unit"),
    }
}

#[test]
fn sixth_root_homs() {
    let f7 = Tract::field(7).unwrap();
    let h = sixth_root_hom(&f7).unwrap();
    let z = h.apply(Tract::sixth_root().parse_elem("z^1").unwrap());
    let roots = [f7.parse_elem("3").unwrap(), f7.parse_elem("5").unwrap()];
    assert!(roots.contains(&z));
    for t in [Tract::field(4).unwrap(), Tract::parse("F9[id]").unwrap(), Tract::field(13).unwrap()] {
        let z = sixth_root_hom(&t).unwrap().apply(Tract::sixth_root().parse_elem("z^1").unwrap());
        let s = t.field_add(t.field_add(t.mul(z, z), t.mul(t.eps(), z)).unwrap(), t.one()).unwrap();
        assert!(s.is_zero(), "{t}");
    }
    assert!(sixth_root_hom(&Tract::field(5).unwrap()).is_err());
    assert!(sixth_root_hom(&Tract::sign()).is_err());
}

#[test]
fn sixth_root_pipeline() {
    let u24 = uniform_lift(2, 4);
    let r = is_sixth_root_representable(&u24).unwrap();
    let phi = r.r6.expect("U24 over R6");
    assert_eq!(phi.underlying_matroid().unwrap(), u24);
    let rows = pushforward_targets(&phi).unwrap();
    let names: Vec<String> = rows.iter().map(|row| row.hom.target().to_string()).collect();
    assert_eq!(rows.len(), 4, "{names:?}");
    assert!(rows.iter().all(|row| row.strong), "{names:?}");

    let r = is_sixth_root_representable(&m4()).unwrap();
    assert!(r.r6.is_some());
    let via_regular = WickFunction::indicator(&Tract::regular(), &m4()).pushforward(&regular_to_sixth_root().unwrap()).unwrap();
    assert_eq!(via_regular.check_wick(WickLevel::Strong).unwrap(), None);
    assert!(pushforward_targets(&WickFunction::indicator(&Tract::regular(), &m4())).is_err());
}

#[test]
fn fano_lift_is_not_ternary() {
    let fano = fano_lift();
    let f2 = search_representation_bounded(&fano, &Tract::field(2).unwrap(), WickLevel::Strong, 7).unwrap();
    assert!(f2.found.is_some());
    let f3 = search_representation_bounded(&fano, &Tract::field(3).unwrap(), WickLevel::Strong, 7).unwrap();
    assert!(f3.found.is_none());
}
