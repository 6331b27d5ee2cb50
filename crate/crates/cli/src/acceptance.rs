//! The acceptance suite: one verdict per criterion.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use anyhow::{anyhow, ensure, Result};
use orthotract::corpus::{
    even_five, int_elem, int_vector, k4_lift, m4, ones_tract, roundtrip_pairs, two_or_four_family, two_or_four_matroid,
    u13_binary_family, u13_regular_family, uniform_lift,
};
use orthotract::represent::{is_regular, is_sixth_root_representable, pushforward_targets, r6_iso, search_representation};
use orthotract::signature::{circuits_from_wick, inner_product_star, SigAxiom, SigWitness};
use orthotract::tract_core::{check_unit_map, NullCheck};
use orthotract::vector_set::{elementary_signature, perp, signature_perp};
use orthotract::wick::WickLevel;
use orthotract::{ESet, Element, OrthoMatroid, SignatureFamily, Tract, TractHom, TractVector, Transversal, VectorFamily, WickFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_0a7c;
pub const PERTURBATIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The criterion cannot hold as stated; the detail carries the counterexample.
    Conflict,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Conflict => "CONFLICT",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub verdict: Verdict,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8} {:>2}  {} ({:.2}s): {}", self.verdict, self.id, self.title, self.elapsed.as_secs_f64(), self.detail)
    }
}

type Check = fn(&Config) -> Result<(Verdict, String)>;

#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub seed: u64,
    pub perturbations: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { seed: DEFAULT_SEED, perturbations: PERTURBATIONS }
    }
}

pub const CRITERIA: [(&str, Check); 12] = [
    ("eight-vector family gives the expected Wick table", eight_vector_table),
    ("all-ones tract: lift(U3,6) indicator is weak, not moderate", ones_tract_weak),
    ("all-ones tract: lift(U4,8) signature has O' but not O", ones_tract_o_prime),
    ("eight-vector family: Ot3 and L1 hold, O' and L2 fail", eight_vector_axioms),
    ("census of the even five-pair matroid over K", even_five_census),
    ("regular lift(U1,3): complement minor and its closure", regular_minor),
    ("binary lift(U1,3) pushed to K", binary_pushforward),
    ("round trips on the corpus", round_trips),
    ("regularity pipeline", regular_pipeline),
    ("sixth-root pipeline", sixth_root_pipeline),
    ("Lagrangian complements", lagrangians),
    ("weak and strong agree over partial fields", weak_strong_agreement),
];

pub fn run_one(id: usize, cfg: &Config) -> Outcome {
    let (title, check) = CRITERIA[id - 1];
    let start = Instant::now();
    let (verdict, detail) = match check(cfg) {
        Ok(v) => v,
        Err(e) => (Verdict::Fail, format!("{e:#}")),
    };
    Outcome { id, title, verdict, detail, elapsed: start.elapsed() }
}

/// Runs every criterion on `workers` threads; results come back in order.
pub fn run_all(cfg: &Config, workers: usize) -> Vec<Outcome> {
    let next = AtomicUsize::new(1);
    let out = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, CRITERIA.len()) {
            s.spawn(|| loop {
                let id = next.fetch_add(1, Ordering::SeqCst);
                if id > CRITERIA.len() {
                    break;
                }
                let o = run_one(id, cfg);
                out.lock().unwrap().push(o);
            });
        }
    });
    let mut v = out.into_inner().unwrap();
    v.sort_by_key(|o| o.id);
    v
}

fn pass(detail: impl Into<String>) -> Result<(Verdict, String)> {
    Ok((Verdict::Pass, detail.into()))
}

fn tr(n: usize, s: &str) -> Result<Transversal> {
    Ok(Transversal::parse(n, s)?)
}

fn terms(t: &Tract, s: &orthotract::FormalSum) -> String {
    s.terms().iter().map(|&x| t.fmt_elem(x)).collect::<Vec<_>>().join(" + ")
}

fn eight_vector_table(_: &Config) -> Result<(Verdict, String)> {
    let mut notes = Vec::new();
    for (q, x) in [(5, 1), (7, 2)] {
        let t = Tract::field(q)?;
        let fam = two_or_four_family(&t, x)?;
        let phi = fam.to_wick()?;
        let mut expect = BTreeMap::new();
        for &b in fam.matroid().bases() {
            let v = match b.to_string().as_str() {
                "1 2 3 4" | "2 4 1* 3*" => t.one(),
                "1* 2* 3* 4*" => int_elem(&t, -x)?,
                _ => t.eps(),
            };
            expect.insert(b, v);
        }
        ensure!(fam.matroid().bases().len() == 8, "F{q}: expected eight bases");
        ensure!(phi == WickFunction::from_map(&t, 4, expect)?, "F{q}: table differs");
        let (t1, t2) = (tr(4, "1 2 3 4*")?, tr(4, "1* 2* 3* 4")?);
        let s = phi.wick_relation_sum(t1, t2);
        let mut want = vec![t.eps(), t.eps(), t.eps(), int_elem(&t, -x)?];
        let mut got = s.terms().to_vec();
        want.sort();
        got.sort();
        ensure!(got == want, "F{q}: relation sum is {}", terms(&t, &s));
        let total = got.iter().try_fold(orthotract::Scalar::Zero, |a, &b| t.field_add(a, b))?;
        ensure!(total == int_elem(&t, -3 - x)? && !total.is_zero(), "F{q}: sum does not total -3-x");
        notes.push(format!("F{q} x={x}: sum {} = {}", terms(&t, &s), t.fmt_elem(total)));
    }
    pass(notes.join("; "))
}

fn ones_tract_weak(_: &Config) -> Result<(Verdict, String)> {
    let f = ones_tract(3);
    let phi = WickFunction::indicator(&f, &uniform_lift(3, 6));
    ensure!(phi.check_wick(WickLevel::Weak)?.is_none(), "weak relations fail");
    let w = phi.check_wick(WickLevel::Moderate)?.ok_or_else(|| anyhow!("moderate relations hold"))?;
    ensure!(w.t1 == tr(6, "1 2 3 4 5* 6*")? && w.t2 == w.t1.star(), "witness at {} / {}", w.t1, w.t2);
    ensure!(w.sum.terms() == [f.one(); 4], "witness sum {}", terms(&f, &w.sum));
    pass(format!("moderate witness {}", w.describe(&f)))
}

fn ones_tract_o_prime(_: &Config) -> Result<(Verdict, String)> {
    let f = ones_tract(4);
    let c = SignatureFamily::uniform(&f, &uniform_lift(4, 8))?;
    ensure!(c.check_axiom(SigAxiom::OPrime)?.is_none(), "O' fails");
    let w = c.check_axiom(SigAxiom::O)?.ok_or_else(|| anyhow!("O holds"))?;
    let SigWitness::Orthogonality { sum, .. } = &w else { return Err(anyhow!("unexpected witness {w:?}")) };
    ensure!(sum.len() == 5, "checker witness has {} terms", sum.len());
    let five = ESet::from_parts(8, 0b11111, 0);
    let x = c.reps_with_support(five).next().ok_or_else(|| anyhow!("no circuit [5]"))?;
    let y = c.reps_with_support(five.star()).next().ok_or_else(|| anyhow!("no circuit [5]*"))?;
    let s = inner_product_star(&f, x, y);
    ensure!(s.terms() == [f.one(); 5] && !f.is_null(s.terms())?, "[5]/[5]* sum {}", terms(&f, &s));
    pass(format!("supports {five} and {}: {}", five.star(), terms(&f, &s)))
}

fn eight_vector_axioms(_: &Config) -> Result<(Verdict, String)> {
    let t = Tract::field(5)?;
    let fam = two_or_four_family(&t, 1)?;
    ensure!(fam.matroid() == &two_or_four_matroid(), "unexpected matroid");
    let mut got = Vec::new();
    for (ax, want) in [(SigAxiom::Ot3, true), (SigAxiom::L1, true), (SigAxiom::OPrime, false), (SigAxiom::L2, false)] {
        let w = fam.check_axiom(ax)?;
        ensure!(w.is_none() == want, "{ax}: expected {}", if want { "pass" } else { "fail" });
        got.push(match w {
            None => format!("{ax} holds"),
            Some(w) => format!("{ax} fails ({})", w.describe(&t)),
        });
    }
    pass(got.join("; "))
}

fn even_five_census(_: &Config) -> Result<(Verdict, String)> {
    let k = Tract::krasner();
    let c = SignatureFamily::uniform(&k, &even_five())?;
    let v = signature_perp(&c)?;
    let vp = perp(&k, 5, v.vectors())?;
    let got = (c.reps().len(), c.all_vectors().len(), v.len(), vp.len());
    ensure!(got == (15, 15, 256, 169), "circuits {}/{}, |V| = {}, |V^perp| = {}", got.0, got.1, got.2, got.3);
    pass(format!("{} circuit representatives ({} vectors), |V| = {}, |V^perp| = {}", got.0, got.1, got.2, got.3))
}

fn normalized(t: &Tract, vs: impl IntoIterator<Item = TractVector>) -> Vec<TractVector> {
    let mut r: Vec<TractVector> = vs.into_iter().map(|x| x.normalized(t)).collect();
    r.sort();
    r.dedup();
    r
}

fn regular_minor(_: &Config) -> Result<(Verdict, String)> {
    let u0 = Tract::regular();
    let c = u13_regular_family()?;
    let v = signature_perp(&c)?;
    ensure!(v.check_vector_set()?.is_none(), "the complement is not a vector set");
    let (v3, valid) = v.minor(Element::plain(2))?;
    let stated = [([1, -1], [0, 0]), ([1, 0], [0, 0]), ([0, 1], [0, 0])]
        .iter()
        .map(|(a, b)| int_vector(&u0, a, b))
        .collect::<orthotract::Result<Vec<_>>>()?;
    ensure!(normalized(&u0, v3.representatives()) == normalized(&u0, stated.clone()), "minor differs: {}", v3.fmt_with());
    let mut with = stated;
    with.push(int_vector(&u0, &[1, 1], &[0, 0])?);
    let cp = signature_perp(&c.minor(Element::plain(2))?)?;
    ensure!(normalized(&u0, cp.representatives()) == normalized(&u0, with), "complement of the minor differs: {}", cp.fmt_with());
    ensure!(!valid, "the minor was reported to be a vector set");
    pass(format!("minor has {} representatives, complement of the minor adds (1,1 | 0,0)", v3.representatives().len()))
}

fn binary_pushforward(_: &Config) -> Result<(Verdict, String)> {
    let f2 = Tract::field(2)?;
    let k = Tract::krasner();
    let c = u13_binary_family()?;
    let v = signature_perp(&c)?;
    let f = TractHom::terminal(&f2);
    let fc = c.pushforward(&f)?;
    let fv = v.pushforward(&f)?;
    let x = int_vector(&k, &[1, 1, 1], &[0, 0, 0])?;
    ensure!(signature_perp(&fc)?.contains(&x), "(1,1,1 | 0,0,0) is not orthogonal to f_*(C)");
    ensure!(!fv.contains(&x), "(1,1,1 | 0,0,0) lies in f_*(V)");
    let w = fv.check_vector_set()?.ok_or_else(|| anyhow!("f_*(V) is a vector set"))?;
    ensure!(elementary_signature(&fv)? == fc, "Elem(f_*(V)) differs from f_*(C)");
    pass(format!("f_*(V) fails {} ({})", w.axiom(), w.describe(&k)))
}

fn triangles_and_squares(m: &OrthoMatroid) -> (Vec<Vec<Transversal>>, Vec<Vec<Transversal>>) {
    let adj: BTreeMap<Transversal, Vec<Transversal>> = m.bases().iter().map(|&b| (b, m.neighbors(b))).collect();
    let (mut tri, mut sq) = (Vec::new(), Vec::new());
    for (&a, na) in &adj {
        for &b in na.iter().filter(|&&b| b > a) {
            for &c in adj[&b].iter().filter(|&&c| c > a && c != b) {
                if c > b && adj[&c].contains(&a) {
                    tri.push(vec![a, b, c]);
                }
                for &d in adj[&c].iter().filter(|&&d| d > b && d != c) {
                    if adj[&d].contains(&a) {
                        sq.push(vec![a, b, c, d]);
                    }
                }
            }
        }
    }
    (tri, sq)
}

fn round_trips(_: &Config) -> Result<(Verdict, String)> {
    let pairs = roundtrip_pairs()?;
    let (mut cycles, mut reps) = (0, 0);
    for (name, m, t) in &pairs {
        let ctx = format!("{name} over {t}");
        let phi = search_representation(m, t, WickLevel::Strong)?.found.ok_or_else(|| anyhow!("{ctx}: no representation"))?;
        let c = circuits_from_wick(&phi)?;
        ensure!(c.to_wick()?.equivalent(&phi), "{ctx}: Wick function of C_phi differs");
        ensure!(circuits_from_wick(&c.to_wick()?)? == c, "{ctx}: circuits of phi_C differ");
        let v = signature_perp(&c)?;
        let elem = elementary_signature(&v)?;
        ensure!(elem == c, "{ctx}: Elem(C^perp) differs from C");
        ensure!(perp(t, m.n(), elem.reps())? == v, "{ctx}: perp(Elem(C^perp)) differs from C^perp");
        ensure!(c.satisfies(SigAxiom::O)? == c.check_circuit_set(WickLevel::Strong)?.is_none(), "{ctx}: O and L disagree");
        ensure!(c.satisfies(SigAxiom::O)?, "{ctx}: O fails");
        let (tri, sq) = triangles_and_squares(m);
        for cyc in tri.iter().chain(&sq) {
            ensure!(c.gamma_cycle(cyc)? == t.one(), "{ctx}: gamma product around {cyc:?} is not 1");
        }
        cycles += tri.len() + sq.len();
        reps += 1;
    }
    ensure!(reps >= 10, "only {reps} pairs");
    pass(format!("{reps} (matroid, tract) pairs, {cycles} basis-graph cycles"))
}

fn regular_to(t: &Tract) -> Result<TractHom> {
    Ok(TractHom::from_unit_images(&Tract::regular(), t, &[t.one(), t.eps()])?)
}

fn regular_pipeline(_: &Config) -> Result<(Verdict, String)> {
    let mut notes = Vec::new();
    for (name, m) in [("M4", m4()), ("K4", k4_lift())] {
        let r = is_regular(&m)?;
        ensure!(r.first.is_some() && r.second.is_some(), "{name}: {}", r.notes.join("; "));
        let phi = r.regular.ok_or_else(|| anyhow!("{name}: combined function failed: {}", r.notes.join("; ")))?;
        ensure!(phi.check_wick(WickLevel::Strong)?.is_none() && phi.underlying_matroid()? == m, "{name}: U0 function invalid");
        for q in [2, 3, 5, 7] {
            let t = Tract::field(q)?;
            let psi = phi.pushforward(&regular_to(&t)?)?;
            ensure!(psi.check_wick(WickLevel::Strong)?.is_none(), "{name}: pushforward to F{q} fails");
        }
        notes.push(format!("{name} regular, pushed to F2 F3 F5 F7"));
    }
    let r = is_regular(&uniform_lift(2, 4))?;
    ensure!(r.first.is_none() && r.regular.is_none(), "lift(U2,4) passed the F2 leg");
    notes.push("lift(U2,4) has no F2 representation".into());
    pass(notes.join("; "))
}

fn sixth_root_pipeline(_: &Config) -> Result<(Verdict, String)> {
    let r6 = Tract::sixth_root();
    let p = Tract::product(&Tract::field(3)?, &Tract::field(4)?)?;
    let iso = r6_iso(6)?;
    let fwd: Vec<u32> = r6
        .units()
        .into_iter()
        .map(|u| match iso.forward.apply(u) {
            orthotract::Scalar::Unit(x) => Ok(x),
            other => Err(anyhow!("forward map sends a unit to {other:?}")),
        })
        .collect::<Result<_>>()?;
    ensure!(matches!(check_unit_map(&r6, &p, &fwd, 6)?, NullCheck::Preserved(_)), "R6 -> F3 x F4 breaks a null sum");

    let u24 = uniform_lift(2, 4);
    let rep = is_sixth_root_representable(&u24)?;
    let phi = rep.r6.ok_or_else(|| anyhow!("lift(U2,4) transport to R6 failed"))?;
    ensure!(phi.underlying_matroid()? == u24, "R6 function has the wrong support");
    let rows = pushforward_targets(&phi)?;
    for want in ["F7", "F9[id]"] {
        let row = rows.iter().find(|r| r.hom.target().name() == want).ok_or_else(|| anyhow!("no pushforward to {want}"))?;
        ensure!(row.strong, "pushforward to {want} is not strong");
    }
    let pipeline = "lift(U2,4) is R6-representable by transport and pushes to F7 and F9".to_string();
    match &iso.inverse_broken {
        None if iso.inverse_len >= 6 => pass(format!("bijection preserves nulls both ways to length 6; {pipeline}")),
        Some(w) => {
            let sum: Vec<String> = w.iter().map(|&u| p.fmt_elem(orthotract::Scalar::Unit(u))).collect();
            Ok((
                Verdict::Conflict,
                format!(
                    "forward R6 -> F3 x F4 preserves nulls to length 6, the inverse only to length {}: {} is null in F3 x F4 but not in R6; {pipeline}",
                    iso.inverse_len,
                    sum.join(" + ")
                ),
            ))
        }
        None => Err(anyhow!("inverse checked only to length {}", iso.inverse_len)),
    }
}

fn lagrangians(_: &Config) -> Result<(Verdict, String)> {
    let mut seen = 0;
    for (name, m, t) in roundtrip_pairs()? {
        if !["F3", "F5"].contains(&t.name()) {
            continue;
        }
        let phi = search_representation(&m, &t, WickLevel::Strong)?.found.ok_or_else(|| anyhow!("{name} over {t}: none"))?;
        let v = signature_perp(&circuits_from_wick(&phi)?)?;
        ensure!(v.is_lagrangian()?, "{name} over {t}: complement is not Lagrangian");
        seen += 1;
    }
    let f2 = Tract::field(2)?;
    let diag = VectorFamily::new(&f2, 1, [TractVector::zero(1), int_vector(&f2, &[1], &[1])?])?;
    ensure!(diag.is_lagrangian()?, "{{(x,x)}} over F2 is not Lagrangian");
    let w = diag.check_vector_set()?.ok_or_else(|| anyhow!("{{(x,x)}} over F2 is a vector set"))?;
    pass(format!("{seen} F3/F5 complements are Lagrangian; {{(x,x)}} over F2 is Lagrangian and fails {}", w.axiom()))
}

fn perturb(phi: &WickFunction, rng: &mut ChaCha8Rng) -> Result<WickFunction> {
    let t = phi.tract();
    let units = t.units();
    let sup = phi.support();
    let mut values = phi.values().to_vec();
    for _ in 0..rng.gen_range(1..=2) {
        let b = sup[rng.gen_range(0..sup.len())];
        values[b.index()] = units[rng.gen_range(0..units.len())];
    }
    Ok(WickFunction::new(t, phi.n(), values)?)
}

fn weak_strong_agreement(cfg: &Config) -> Result<(Verdict, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut entries, mut broken) = (0, 0);
    for (name, m, t) in roundtrip_pairs()? {
        if !t.is_partial_field() {
            continue;
        }
        let phi = search_representation(&m, &t, WickLevel::Strong)?.found.ok_or_else(|| anyhow!("{name} over {t}: none"))?;
        for i in 0..cfg.perturbations {
            let psi = perturb(&phi, &mut rng)?;
            let weak = psi.check_wick(WickLevel::Weak)?;
            let strong = psi.check_wick(WickLevel::Strong)?;
            ensure!(
                weak.is_none() == strong.is_none(),
                "{name} over {t}, perturbation {i}: weak {} but strong {}",
                if weak.is_none() { "holds" } else { "fails" },
                if strong.is_none() { "holds" } else { "fails" }
            );
            broken += usize::from(strong.is_some());
        }
        entries += 1;
    }
    ensure!(entries > 0, "no partial-field entries");
    pass(format!(
        "{entries} entries x {} perturbations (seed {:#x}), {broken} broke both checks",
        cfg.perturbations, cfg.seed
    ))
}
