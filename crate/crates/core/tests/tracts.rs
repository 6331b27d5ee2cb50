use orthotract::tract_core::{check_unit_map, CustomSpec, NullCheck, CHECK_LEN};
use orthotract::{Scalar, Tract, TractHom};
use proptest::prelude::*;

fn finite_builtins() -> Vec<Tract> {
    let mut v: Vec<Tract> = ["K", "S", "I", "U0", "R6", "F2", "F3", "F4", "F5", "F7", "F8", "F9[id]", "F9[frob]", "F13"]
        .iter()
        .map(|d| Tract::parse(d).unwrap())
        .collect();
    v.push(Tract::parse("product(F3,F4)").unwrap());
    v.push(Tract::parse("product(F2,S)").unwrap());
    v.push(Tract::parse("F7/3").unwrap());
    v
}

fn lit(t: &Tract, s: &str) -> Scalar {
    t.parse_elem(s).unwrap()
}

fn sum(t: &Tract, s: &[&str]) -> bool {
    let terms: Vec<Scalar> = s.iter().map(|x| lit(t, x)).collect();
    t.is_null(&terms).unwrap()
}

#[test]
fn builtin_tracts_satisfy_axioms_on_short_sums() {
    for t in finite_builtins() {
        t.check_axioms(5).unwrap_or_else(|e| panic!("{t}: {e}"));
    }
}

#[test]
fn exactly_one_negative_unit() {
    for t in finite_builtins() {
        let one = t.one();
        let eps: Vec<Scalar> = t.units().into_iter().filter(|&u| t.is_null(&[one, u]).unwrap()).collect();
        assert_eq!(eps.len(), 1, "{t}");
        assert_eq!(eps[0], t.eps());
        assert_eq!(t.mul(eps[0], eps[0]), one, "{t}");
    }
}

#[test]
fn empty_and_singleton_sums() {
    for t in finite_builtins() {
        assert!(t.is_null(&[]).unwrap());
        for u in t.units() {
            assert!(!t.is_null(&[u]).unwrap(), "{t}");
        }
    }
}

#[test]
fn sign_hyperfield_nulls() {
    let s = Tract::sign();
    assert!(sum(&s, &["1", "-1", "1"]));
    assert!(!sum(&s, &["1", "1", "1"]));
    assert!(!sum(&s, &["-1", "-1"]));
}

#[test]
fn regular_partial_field_nulls() {
    let u = Tract::regular();
    assert!(sum(&u, &["1", "1", "-1", "-1"]));
    assert!(!sum(&u, &["1", "1", "-1"]));
    assert!(!sum(&u, &["1", "1"]));
}

#[test]
fn krasner_nulls() {
    let k = Tract::krasner();
    assert!(sum(&k, &["1", "1"]));
    assert!(sum(&k, &["1", "1", "1", "1", "1"]));
    assert!(!sum(&k, &["1"]));
}

#[test]
fn initial_tract_only_cancels_pairs() {
    let i = Tract::initial();
    assert!(sum(&i, &["1", "-1"]));
    assert!(!sum(&i, &["1", "1", "-1", "-1"]));
}

#[test]
fn tropical_minimum_twice() {
    let t = Tract::tropical();
    assert!(sum(&t, &["1/2", "0.5", "3"]));
    assert!(!sum(&t, &["1/2", "3", "3"]));
    assert!(sum(&t, &["-2", "-2"]));
    assert!(t.is_null(&[]).unwrap());
    assert_eq!(t.fmt_elem(lit(&t, "0.25")), "1/4");
    assert_eq!(lit(&t, "inf"), Scalar::Zero);
    // multiplication adds valuations
    assert_eq!(t.mul(lit(&t, "1/3"), lit(&t, "2/3")), lit(&t, "1"));
}

#[test]
fn sixth_roots_null_in_eisenstein_integers() {
    let r = Tract::sixth_root();
    // 1 + ζ² = ζ, so 1 + ζ² - ζ = 0
    assert!(sum(&r, &["z^0", "z^2", "z^4"]));
    assert!(sum(&r, &["z^0", "z^1", "z^2", "z^3", "z^4", "z^5"]));
    assert!(!sum(&r, &["z^0", "z^1"]));
    assert!(!sum(&r, &["z^0", "z^0", "z^4", "z^4"]));
    assert_eq!(r.conj(lit(&r, "z^1")), lit(&r, "z^5"));
    assert_eq!(r.eps(), lit(&r, "z^3"));
}

#[test]
fn field_orders_and_involutions() {
    let f4 = Tract::parse("F4").unwrap();
    assert_eq!(f4.unit_count(), Some(3));
    assert!(!f4.involution_is_identity());
    for u in f4.units() {
        assert_eq!(f4.conj(f4.conj(u)), u);
        assert_eq!(f4.conj(u), f4.mul(u, u));
    }
    assert!(Tract::parse("F9").is_err());
    assert!(Tract::parse("F6").is_err());
    assert!(Tract::parse("Q").is_err());
    assert_eq!(Tract::parse("product(F3,F4)").unwrap().unit_count(), Some(6));
    assert_eq!(Tract::parse("product(F2,F3)").unwrap().unit_count(), Some(2));
}

#[test]
fn product_nulls_are_componentwise() {
    let p = Tract::parse("product(F2,F3)").unwrap();
    assert!(sum(&p, &["(1|1)", "(1|2)"]));
    let q = Tract::parse("product(F3,F4)").unwrap();
    // null in F3, not in F4
    assert!(!sum(&q, &["(1|1)", "(2|2)"]));
    assert!(sum(&q, &["(1|1)", "(2|1)"]));
}

#[test]
fn custom_tract_validation() {
    let none = CustomSpec::cyclic("bad", 1, vec![], None);
    assert!(Tract::custom(none).is_err());

    // units ±1 with nulls = equal counts of 1 and -1, up to length 8
    let mut nulls = Vec::new();
    for a in 1..=4usize {
        let mut s = vec![0u32; a];
        s.extend(std::iter::repeat(1).take(a));
        nulls.push(s);
    }
    let t = Tract::custom(CustomSpec::cyclic("pm", 2, nulls, Some(8))).unwrap();
    let u0 = Tract::regular();
    for len in 0..=8usize {
        for ones in 0..=len {
            let mut terms = vec![Scalar::Unit(0); ones];
            terms.extend(std::iter::repeat(Scalar::Unit(1)).take(len - ones));
            assert_eq!(t.is_null(&terms).unwrap(), u0.is_null(&terms).unwrap(), "{terms:?}");
        }
    }
    assert!(t.is_null(&[Scalar::Unit(0); 9]).is_err());
}

#[test]
fn prime_field_literal_round_trip() {
    for t in finite_builtins() {
        for x in t.elements() {
            assert_eq!(t.parse_elem(&t.fmt_elem(x)).unwrap(), x, "{t}");
        }
    }
}

fn prime_code(t: &Tract, x: Scalar) -> u32 {
    t.fmt_elem(x).parse().unwrap()
}

proptest! {
    #[test]
    fn prime_field_arithmetic_matches_modular(p in prop::sample::select(vec![2u32, 3, 5, 7, 11, 13]), a in 0u32..13, b in 0u32..13) {
        let t = Tract::field(p).unwrap();
        let (a, b) = (a % p, b % p);
        let x = lit(&t, &a.to_string());
        let y = lit(&t, &b.to_string());
        let m = t.mul(x, y);
        prop_assert_eq!(if m.is_zero() { 0 } else { prime_code(&t, m) }, a * b % p);
        let s = t.field_add(x, y).unwrap();
        prop_assert_eq!(if s.is_zero() { 0 } else { prime_code(&t, s) }, (a + b) % p);
        prop_assert_eq!(t.is_null(&[x, y].into_iter().filter(|z| !z.is_zero()).collect::<Vec<_>>()).unwrap(), (a + b) % p == 0);
    }

    #[test]
    fn unit_scaling_preserves_nulls(ti in 0usize..17, raw in prop::collection::vec(0u32..64, 0..=8), g in 0u32..64) {
        let tracts = finite_builtins();
        let t = &tracts[ti % tracts.len()];
        let units = t.units();
        let s: Vec<Scalar> = raw.iter().map(|&i| units[i as usize % units.len()]).collect();
        let c = units[g as usize % units.len()];
        let scaled: Vec<Scalar> = s.iter().map(|&x| t.mul(c, x)).collect();
        prop_assert_eq!(t.is_null(&s).unwrap(), t.is_null(&scaled).unwrap());
    }

    #[test]
    fn involution_preserves_nulls(ti in 0usize..17, raw in prop::collection::vec(0u32..64, 0..=6)) {
        let tracts = finite_builtins();
        let t = &tracts[ti % tracts.len()];
        let units = t.units();
        let s: Vec<Scalar> = raw.iter().map(|&i| units[i as usize % units.len()]).collect();
        let c: Vec<Scalar> = s.iter().map(|&x| t.conj(x)).collect();
        prop_assert_eq!(t.is_null(&s).unwrap(), t.is_null(&c).unwrap());
    }
}

#[test]
fn composition_into_krasner_is_support_map() {
    let u0 = Tract::regular();
    let f3 = Tract::field(3).unwrap();
    let f = TractHom::from_unit_images(&u0, &f3, &[f3.one(), f3.eps()]).unwrap();
    let g = TractHom::terminal(&f3);
    let h = f.then(&g).unwrap();
    let k = TractHom::terminal(&u0);
    for x in u0.elements() {
        assert_eq!(h.apply(x), k.apply(x));
    }
    assert_eq!(TractHom::identity(&u0).then(&f).unwrap(), f);
    assert!(g.then(&f).is_err());
}

#[test]
fn sixth_root_composite_matches_pointwise() {
    let r6 = Tract::sixth_root();
    let f4 = Tract::field(4).unwrap();
    let homs = TractHom::find_all(&r6, &f4).unwrap();
    assert!(!homs.is_empty());
    for h in homs {
        let c = h.then(&TractHom::terminal(&f4)).unwrap();
        let k = TractHom::terminal(&r6);
        for x in r6.elements() {
            assert_eq!(c.apply(x), k.apply(x));
        }
        assert!(h.is_involution_compatible());
    }
}

#[test]
fn non_homomorphisms_are_rejected() {
    let f3 = Tract::field(3).unwrap();
    let f5 = Tract::field(5).unwrap();
    // -1 ↦ 1 does not send 1 + (-1) to a null sum
    assert!(TractHom::from_unit_images(&f3, &f5, &[f5.one(), f5.one()]).is_err());
    // 1 + 1 + 1 is null in F3 but not in F5
    assert!(TractHom::from_unit_images(&f3, &f5, &[f5.one(), f5.eps()]).is_err());
}

#[test]
fn homs_preserve_nulls_to_check_length() {
    let pairs = [("U0", "F5"), ("U0", "S"), ("U0", "F3"), ("F3", "K"), ("U0", "R6"), ("F4", "K"), ("R6", "F7"), ("R6", "product(F3,F4)")];
    for (a, b) in pairs {
        let (s, t) = (Tract::parse(a).unwrap(), Tract::parse(b).unwrap());
        let homs = TractHom::find_all(&s, &t).unwrap();
        assert!(!homs.is_empty(), "{a} -> {b}");
        for h in homs {
            let images: Vec<u32> = s
                .units()
                .iter()
                .map(|&u| match h.apply(u) {
                    Scalar::Unit(x) => x,
                    _ => unreachable!(),
                })
                .collect();
            assert!(matches!(check_unit_map(&s, &t, &images, CHECK_LEN).unwrap(), NullCheck::Preserved(_)), "{h}");
        }
    }
}

// Eisenstein-integer evaluation written independently of the library.
fn eisenstein(exps: &[u32]) -> (i32, i32) {
    const C: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
    exps.iter().fold((0, 0), |(a, b), &k| (a + C[k as usize % 6].0, b + C[k as usize % 6].1))
}

#[test]
fn sixth_roots_against_independent_evaluation() {
    let r = Tract::sixth_root();
    let mut checked = 0;
    orthotract::tract_core::for_each_multiset(6, 5, &mut |s| {
        let terms: Vec<Scalar> = s.iter().map(|&k| Scalar::Unit(k)).collect();
        assert_eq!(r.is_null(&terms).unwrap(), eisenstein(s) == (0, 0), "{s:?}");
        checked += 1;
        true
    });
    assert_eq!(checked, 252);
}
