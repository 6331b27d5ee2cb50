use std::collections::{BTreeMap, VecDeque};

use orthotract::corpus::{int_vector, ones_tract, roundtrip_pairs, two_or_four_family, two_or_four_matroid, u13_regular_family, uniform_lift};
use orthotract::represent::search_representation;
use orthotract::signature::{
    circuits_from_wick, inner_product, inner_product_star, overlap, pivot_span_contains, span_contains, weak_circuit_to_weak_wick,
    weak_wick_to_weak_circuit, SigAxiom, SigWitness,
};
use orthotract::wick::WickLevel;
use orthotract::{ESet, Element, Scalar, SignatureFamily, Tract, TractHom, TractVector, Transversal, WickFunction};
use proptest::prelude::*;

fn tr(n: usize, s: &str) -> Transversal {
    Transversal::parse(n, s).unwrap()
}

fn sorted(mut v: Vec<Scalar>) -> Vec<Scalar> {
    v.sort();
    v
}

fn families() -> Vec<(String, WickFunction, SignatureFamily)> {
    roundtrip_pairs()
        .unwrap()
        .into_iter()
        .map(|(name, m, t)| {
            let phi = search_representation(&m, &t, WickLevel::Strong).unwrap().found.unwrap_or_else(|| panic!("{name} over {t}"));
            let c = circuits_from_wick(&phi).unwrap();
            (format!("{name}/{t}"), phi, c)
        })
        .collect()
}

#[test]
fn inner_product_forms_agree() {
    let t = Tract::field(5).unwrap();
    let fam = two_or_four_family(&t, 1).unwrap();
    for x in fam.reps() {
        for y in fam.reps() {
            let a = inner_product(&t, x, &y.star());
            let b = inner_product_star(&t, x, y);
            assert_eq!(sorted(a.terms().to_vec()), sorted(b.terms().to_vec()));
        }
    }
    let f4 = Tract::field(4).unwrap();
    let x = TractVector::parse(&f4, 2, "(2,1|3,0)").unwrap();
    let y = TractVector::parse(&f4, 2, "(3,0|1,2)").unwrap();
    let xy = inner_product(&f4, &x, &y);
    let yx = inner_product(&f4, &y, &x);
    let conj: Vec<Scalar> = xy.terms().iter().map(|&c| f4.conj(c)).collect();
    assert_eq!(sorted(yx.terms().to_vec()), sorted(conj));
}

#[test]
fn disjoint_supports_are_orthogonal() {
    let t = Tract::field(3).unwrap();
    let x = TractVector::parse(&t, 3, "(1,2,0|0,0,0)").unwrap();
    let y = TractVector::parse(&t, 3, "(0,0,1|0,0,2)").unwrap();
    assert!(inner_product_star(&t, &x, &y).is_empty());
    assert_eq!(overlap(&x, &y), 0);
}

#[test]
fn first_and_fifth_vectors_of_the_eight() {
    let t = Tract::field(5).unwrap();
    let x = int_vector(&t, &[0, 1, 1, 1], &[1, 0, 0, 0]).unwrap();
    let y = int_vector(&t, &[1, 0, 0, 0], &[0, 1, 1, 1]).unwrap();
    // X(i)Y(i*) summed over E: 1+1+1 from i = 2,3,4 and 1 from i = 1*
    let s = inner_product_star(&t, &x, &y);
    assert_eq!(s.terms(), &[t.one(); 4]);
    assert!(!t.is_null(s.terms()).unwrap());
    assert_eq!(overlap(&x, &y), 4);
}

#[test]
fn eight_vector_family_axioms() {
    for (q, x) in [(5, 1), (7, 2), (7, 1)] {
        let t = Tract::field(q).unwrap();
        let fam = two_or_four_family(&t, x).unwrap();
        assert_eq!(fam.matroid(), &two_or_four_matroid());
        assert!(fam.satisfies(SigAxiom::Ot3).unwrap());
        assert!(fam.satisfies(SigAxiom::Ot2).unwrap());
        assert!(fam.satisfies(SigAxiom::L1).unwrap());
        assert!(!fam.satisfies(SigAxiom::OPrime).unwrap());
        assert!(!fam.satisfies(SigAxiom::L2).unwrap());
        assert!(!fam.satisfies(SigAxiom::O).unwrap());
    }
}

#[test]
fn eight_vector_family_round_trip() {
    for (q, x) in [(5, 1), (7, 2)] {
        let t = Tract::field(q).unwrap();
        let fam = two_or_four_family(&t, x).unwrap();
        let phi = fam.to_wick().unwrap();
        let one = t.one();
        let m1 = t.eps();
        let mx = orthotract::corpus::int_elem(&t, -x).unwrap();
        let mut expect = BTreeMap::new();
        for b in fam.matroid().bases() {
            let v = match b.to_string().as_str() {
                "1 2 3 4" | "2 4 1* 3*" => one,
                "1* 2* 3* 4*" => mx,
                _ => m1,
            };
            expect.insert(*b, v);
        }
        assert_eq!(phi, WickFunction::from_map(&t, 4, expect).unwrap());
        assert_eq!(phi.value(tr(4, "1 2 3 4")), one);
        assert_eq!(circuits_from_wick(&phi).unwrap(), fam);
        // the four-term witness also breaks the moderate relations
        assert!(phi.check_wick(WickLevel::Moderate).unwrap().is_some());
        assert!(weak_wick_to_weak_circuit(&phi).is_err());
    }
}

#[test]
fn ones_tract_circuit_set_is_not_orthogonal() {
    let f = ones_tract(3);
    let c = SignatureFamily::uniform(&f, &uniform_lift(3, 6)).unwrap();
    assert_eq!(c.check_circuit_set(WickLevel::Weak).unwrap(), None);
    let w = c.check_axiom(SigAxiom::OPrime).unwrap().unwrap();
    let SigWitness::Orthogonality { sum, .. } = w else { panic!("{w:?}") };
    assert!(sum.len() == 4);
    let phi = weak_circuit_to_weak_wick(&c).unwrap();
    assert_eq!(phi, WickFunction::indicator(&f, &uniform_lift(3, 6)));
    assert_eq!(weak_wick_to_weak_circuit(&phi).unwrap(), c);
}

#[test]
fn ones_tract_signature_satisfies_o_prime_only() {
    let f = ones_tract(4);
    let c = SignatureFamily::uniform(&f, &uniform_lift(4, 8)).unwrap();
    assert_eq!(c.check_axiom(SigAxiom::OPrime).unwrap(), None);
    assert!(c.check_axiom(SigAxiom::O).unwrap().is_some());
    let five = ESet::from_parts(8, 0b11111, 0);
    let x = c.reps_with_support(five).next().unwrap();
    let y = c.reps_with_support(five.star()).next().unwrap();
    let s = inner_product_star(&f, x, y);
    assert_eq!(s.terms(), &[f.one(); 5]);
    assert!(!f.is_null(s.terms()).unwrap());
}

#[test]
fn cryptomorphism_round_trips() {
    for (name, phi, c) in families() {
        assert_eq!(c.to_wick().unwrap(), phi, "{name}");
        assert_eq!(circuits_from_wick(&c.to_wick().unwrap()).unwrap(), c, "{name}");
        assert_eq!(c.check_axiom(SigAxiom::O).unwrap(), None, "{name}");
        assert_eq!(c.check_circuit_set(WickLevel::Strong).unwrap(), None, "{name}");
        assert_eq!(c.check_circuit_set(WickLevel::Weak).unwrap(), None, "{name}");
        assert_eq!(weak_circuit_to_weak_wick(&c).unwrap(), phi, "{name}");
    }
}

#[test]
fn orthogonal_iff_circuit_set_on_perturbed_families() {
    // break one representative at a time and compare O with L
    for (name, _, c) in families() {
        let t = c.tract().clone();
        let units = t.units();
        if units.len() < 2 {
            continue;
        }
        for i in 0..c.reps().len().min(6) {
            let mut reps = c.reps().to_vec();
            let x = &mut reps[i];
            let Some(e) = x.support().iter().last() else { continue };
            let v = x.get(e);
            x.set(e, t.mul(v, units[1]));
            let fam = SignatureFamily::from_parts(&t, c.matroid().clone(), reps).unwrap();
            let o = fam.satisfies(SigAxiom::O).unwrap();
            let l = fam.check_circuit_set(WickLevel::Strong).unwrap().is_none();
            assert_eq!(o, l, "{name}, rep {i}");
        }
    }
}

#[test]
fn weak_circuit_sets_are_o_prime_and_ot2() {
    let mut checked = 0;
    for (_, _, c) in families() {
        for fam in [c.clone(), c.dual()] {
            if fam.check_circuit_set(WickLevel::Weak).unwrap().is_none() {
                assert!(fam.satisfies(SigAxiom::OPrime).unwrap());
                checked += 1;
            }
            if fam.satisfies(SigAxiom::Ot2Prime).unwrap() && fam.satisfies(SigAxiom::L1).unwrap() {
                assert!(fam.satisfies(SigAxiom::Ot2).unwrap());
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn one_representative_per_circuit() {
    for (name, _, c) in families() {
        let circuits = c.matroid().circuits().unwrap();
        assert_eq!(c.reps().len(), circuits.len(), "{name}");
        for x in c.all_vectors() {
            assert!(c.contains(&x));
        }
    }
}

fn triangles_and_squares(m: &orthotract::OrthoMatroid) -> (Vec<Vec<Transversal>>, Vec<Vec<Transversal>>) {
    let adj: BTreeMap<Transversal, Vec<Transversal>> = m.bases().iter().map(|&b| (b, m.neighbors(b))).collect();
    let mut tri = Vec::new();
    let mut sq = Vec::new();
    for (&a, na) in &adj {
        for &b in na {
            for &c in &adj[&b] {
                if c == a {
                    continue;
                }
                if adj[&c].contains(&a) && a < b && b < c {
                    tri.push(vec![a, b, c]);
                }
                for &d in &adj[&c] {
                    if d != b && d != a && adj[&d].contains(&a) && a < b && a < c && a < d && b < d {
                        sq.push(vec![a, b, c, d]);
                    }
                }
            }
        }
    }
    (tri, sq)
}

#[test]
fn gamma_cycles_are_trivial() {
    let mut counts = (0, 0);
    for (name, _, c) in families() {
        let t = c.tract();
        let m = c.matroid();
        for &b in m.bases() {
            for nb in m.neighbors(b) {
                let g = c.gamma(b, nb).unwrap();
                assert_eq!(t.mul(g, c.gamma(nb, b).unwrap()), t.one(), "{name}");
            }
        }
        let (tri, sq) = triangles_and_squares(m);
        for cyc in &tri {
            assert_eq!(c.gamma_cycle(cyc).unwrap(), t.one(), "{name}: {cyc:?}");
        }
        for cyc in &sq {
            assert_eq!(c.gamma_cycle(cyc).unwrap(), t.one(), "{name}: {cyc:?}");
        }
        counts.0 += tri.len();
        counts.1 += sq.len();
    }
    assert!(counts.0 > 0 && counts.1 > 0);
}

#[test]
fn gamma_rejects_non_adjacent_bases() {
    let t = Tract::field(5).unwrap();
    let fam = two_or_four_family(&t, 1).unwrap();
    assert!(fam.gamma(tr(4, "1 2 3 4"), tr(4, "1* 2* 3* 4*")).is_err());
    assert!(fam.gamma(tr(4, "1 2 3 4"), tr(4, "1 2 3 4")).is_err());
}

fn bfs_path(m: &orthotract::OrthoMatroid, from: Transversal, to: Transversal) -> Vec<Transversal> {
    let mut prev = BTreeMap::new();
    let mut q = VecDeque::from([from]);
    prev.insert(from, from);
    while let Some(b) = q.pop_front() {
        if b == to {
            break;
        }
        for nb in m.neighbors(b) {
            if let std::collections::btree_map::Entry::Vacant(e) = prev.entry(nb) {
                e.insert(b);
                q.push_back(nb);
            }
        }
    }
    let mut path = vec![to];
    while *path.last().unwrap() != from {
        path.push(prev[path.last().unwrap()]);
    }
    path.reverse();
    path
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gamma_random_closed_walks(which in 0usize..31, steps in prop::collection::vec(0usize..64, 2..12)) {
        let pairs = roundtrip_pairs().unwrap();
        let (_, m, t) = &pairs[which % pairs.len()];
        let phi = search_representation(m, t, WickLevel::Strong).unwrap().found.unwrap();
        let c = circuits_from_wick(&phi).unwrap();
        let start = m.least_basis();
        let mut walk = vec![start];
        for s in steps {
            let nb = m.neighbors(*walk.last().unwrap());
            walk.push(nb[s % nb.len()]);
        }
        let back = bfs_path(m, *walk.last().unwrap(), start);
        if back.len() > 2 {
            walk.extend(&back[1..back.len() - 1]);
        }
        if *walk.last().unwrap() == start {
            walk.pop();
        }
        prop_assert_eq!(c.gamma_cycle(&walk).unwrap(), t.one());
    }

    #[test]
    fn twisted_scaling_preserves_orthogonality(q in prop::sample::select(vec!["F4", "F5", "R6", "F9[frob]", "S"]), a in prop::collection::vec(0usize..10, 6), b in prop::collection::vec(0usize..10, 6), c in 0usize..8, d in 0usize..8) {
        let t = Tract::parse(q).unwrap();
        let el = t.elements();
        let x = TractVector::new(3, a.iter().map(|&i| el[i % el.len()]).collect()).unwrap();
        let y = TractVector::new(3, b.iter().map(|&i| el[i % el.len()]).collect()).unwrap();
        let units = t.units();
        let (c, d) = (units[c % units.len()], units[d % units.len()]);
        let base = t.is_null(inner_product_star(&t, &x, &y).terms()).unwrap();
        let scaled = t.is_null(inner_product_star(&t, &x.scale(&t, c), &y.scale(&t, d)).terms()).unwrap();
        prop_assert_eq!(base, scaled);
        prop_assert_eq!(x.conj(&t).conj(&t), x.clone());
        prop_assert_eq!(x.star().star(), x.clone());
        prop_assert_eq!(TractVector::parse(&t, 3, &x.fmt_with(&t)).unwrap(), x);
    }

    #[test]
    fn pivot_span_matches_backtracking(which in 0usize..31, bi in 0usize..64, raw in prop::collection::vec(0usize..16, 12)) {
        let pairs = roundtrip_pairs().unwrap();
        let (_, m, t) = &pairs[which % pairs.len()];
        let phi = search_representation(m, t, WickLevel::Strong).unwrap().found.unwrap();
        let c = circuits_from_wick(&phi).unwrap();
        let n = m.n();
        let b = m.bases()[bi % m.bases().len()];
        let mut gens = Vec::new();
        let mut pivots = Vec::new();
        for p in 0..n as u8 {
            let e = b.at(p).dual();
            let circ = m.fundamental_circuit(b, e).unwrap();
            gens.push(c.reps_with_support(circ).next().unwrap().conj(t));
            pivots.push(e);
        }
        let el = t.elements();
        let target = TractVector::new(n, raw.iter().take(2 * n).map(|&i| el[i % el.len()]).collect()).unwrap();
        prop_assert_eq!(pivot_span_contains(t, &gens, &pivots, &target).unwrap(), span_contains(t, &gens, &target).unwrap());
        for x in c.reps() {
            let xt = x.conj(t);
            prop_assert!(pivot_span_contains(t, &gens, &pivots, &xt).unwrap());
        }
    }
}

#[test]
fn dual_minor_and_pushforward() {
    for (name, phi, c) in families() {
        assert_eq!(c.dual().dual(), c, "{name}");
        let d = circuits_from_wick(&phi.dual_wick()).unwrap();
        assert_eq!(c.dual().matroid(), d.matroid(), "{name}");
        assert!(c.dual().satisfies(SigAxiom::O).unwrap() && d.satisfies(SigAxiom::O).unwrap(), "{name}");
        let m = c.matroid();
        for p in 0..m.n() as u8 {
            for e in [Element::plain(p), Element::star(p)] {
                if m.is_singular(e) {
                    continue;
                }
                let minor = c.minor(e).unwrap();
                assert_eq!(minor.matroid(), &m.minor(e).unwrap().matroid, "{name} | {e}");
                assert!(minor.satisfies(SigAxiom::O).unwrap(), "{name} | {e}");
                let via_wick = circuits_from_wick(&phi.wick_minor(e).unwrap()).unwrap();
                assert_eq!(minor.matroid(), via_wick.matroid(), "{name} | {e}");
                assert!(via_wick.satisfies(SigAxiom::O).unwrap(), "{name} | {e}");
            }
        }
        let k = TractHom::terminal(c.tract());
        assert_eq!(c.pushforward(&k).unwrap(), SignatureFamily::uniform(&Tract::krasner(), m).unwrap(), "{name}");
    }
}

#[test]
fn regular_u13_family_and_its_minor() {
    let c = u13_regular_family().unwrap();
    assert!(c.satisfies(SigAxiom::O).unwrap());
    assert_eq!(c.check_circuit_set(WickLevel::Strong).unwrap(), None);
    let minor = c.minor(Element::plain(2)).unwrap();
    let expect = uniform_lift(1, 3).minor(Element::plain(2)).unwrap().matroid;
    assert_eq!(minor.matroid(), &expect);
    let circuits: Vec<ESet> = minor.reps().iter().map(|x| x.support()).collect();
    let mut want = expect.circuits().unwrap();
    want.sort();
    let mut got = circuits;
    got.sort();
    assert_eq!(got, want);
}

#[test]
fn pushforward_needs_involution_compatibility() {
    // F4 with the identity involution maps onto Frobenius F4 by the identity map, which does not commute
    let id4 = Tract::parse("F4[id]").unwrap();
    let fr4 = Tract::field(4).unwrap();
    let h = TractHom::from_unit_images(&id4, &fr4, &id4.units()).unwrap();
    assert!(!h.is_involution_compatible());
    let phi = search_representation(&uniform_lift(2, 4), &id4, WickLevel::Strong).unwrap().found.unwrap();
    let c = circuits_from_wick(&phi).unwrap();
    assert!(c.pushforward(&h).is_err());
}

#[test]
fn family_validation() {
    let t = Tract::field(3).unwrap();
    let m = uniform_lift(1, 3);
    assert!(SignatureFamily::from_parts(&t, m.clone(), vec![int_vector(&t, &[1, 1, 0], &[0, 0, 0]).unwrap()]).is_err());
    assert!(SignatureFamily::new(&t, 3, Vec::<TractVector>::new()).is_err());
    let built = SignatureFamily::new(&t, 3, SignatureFamily::uniform(&t, &m).unwrap().reps().to_vec()).unwrap();
    assert_eq!(built.matroid(), &m);
}
