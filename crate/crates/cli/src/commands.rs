//! Verbs of the `orthotract` binary.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use orthotract::corpus::{m3, m4};
use orthotract::ortho_matroid::check_bases;
use orthotract::represent::{is_regular, is_sixth_root_representable, pushforward_targets, search_representation};
use orthotract::signature::{circuits_from_wick, SigAxiom, SigWitness};
use orthotract::text::{self, FileKind};
use orthotract::vector_set::{elementary_signature, perp, signature_perp, VectorWitness};
use orthotract::wick::WickLevel;
use orthotract::{Element, FormalSum, Tract, TractHom};

use crate::acceptance::{self, Config, Verdict};

#[derive(Parser, Debug)]
#[command(name = "orthotract", version, about = "Orthogonal matroids with coefficients in tracts")]
pub struct Cli {
    /// Output form: the file syntax, or one `key=value` pair per line.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write the produced file here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the randomized perturbations of `corpus-verify`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Kv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Strong,
    Moderate,
    Weak,
}

impl From<Level> for WickLevel {
    fn from(l: Level) -> WickLevel {
        match l {
            Level::Strong => WickLevel::Strong,
            Level::Moderate => WickLevel::Moderate,
            Level::Weak => WickLevel::Weak,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    #[value(name = "M3")]
    M3,
    #[value(name = "M4")]
    M4,
}

fn parse_axiom(s: &str) -> Result<SigAxiom, String> {
    SigAxiom::parse(s).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the basis axioms of an orthogonal matroid file.
    CheckMatroid { file: PathBuf },
    /// List the circuits of an orthogonal matroid.
    Circuits { file: PathBuf },
    /// Check the Wick relations of a Wick file.
    CheckWick {
        #[arg(long, value_enum, default_value_t = Level::Strong)]
        level: Level,
        file: PathBuf,
    },
    /// The circuit signature of a Wick function.
    WickToCircuits { file: PathBuf },
    /// The Wick function of a signature.
    CircuitsToWick { file: PathBuf },
    /// Check one orthogonality or elimination axiom on a signature file.
    CheckSignature {
        #[arg(long, value_parser = parse_axiom)]
        axiom: SigAxiom,
        file: PathBuf,
    },
    /// Dual of a matroid, Wick or signature file.
    Dual { file: PathBuf },
    /// Minor at one element of a matroid, Wick, signature or vectors file.
    Minor {
        #[arg(long)]
        elem: String,
        file: PathBuf,
    },
    /// Push a Wick, signature or vectors file along a homomorphism `<src>:<tgt>`.
    Push {
        #[arg(long)]
        hom: String,
        file: PathBuf,
    },
    /// Orthogonal complement of a signature or vectors file.
    Perp { file: PathBuf },
    /// Elementary vectors of a vectors file, as a signature.
    Elem { file: PathBuf },
    /// Check the vector set axioms.
    CheckVectors { file: PathBuf },
    /// Search for a representation over a finite tract.
    SearchRep {
        #[arg(long)]
        tract: String,
        #[arg(long, value_enum, default_value_t = Level::Strong)]
        level: Level,
        file: PathBuf,
    },
    /// Decide regularity through F2 and F3.
    IsRegular { file: PathBuf },
    /// Decide representability over the sixth roots of unity through F3 and F4.
    IsR6 { file: PathBuf },
    /// Look for a minor isomorphic to M3 or M4.
    DetectMinor {
        #[arg(long, value_enum, ignore_case = true)]
        target: Target,
        file: PathBuf,
    },
    /// Lift an ordinary matroid file.
    Lift { file: PathBuf },
    /// Run the acceptance suite.
    CorpusVerify,
}

/// What a verb produced: an optional headline, details, and an optional file.
#[derive(Debug, Default)]
pub struct Report {
    pub code: i32,
    pub head: Option<String>,
    pub fields: Vec<(String, String)>,
    pub payload: Option<String>,
}

impl Report {
    fn object(payload: String) -> Report {
        Report { payload: Some(payload), ..Report::default() }
    }

    fn check(failure: Option<(String, Vec<(String, String)>)>) -> Report {
        match failure {
            None => Report { head: Some("PASS".into()), ..Report::default() },
            Some((what, fields)) => Report { code: 1, head: Some(format!("FAIL {what}")), fields, payload: None },
        }
    }

    fn field(mut self, k: &str, v: impl ToString) -> Report {
        self.fields.push((k.into(), v.to_string()));
        self
    }

    /// Renders standard output. With `payload_elsewhere` the file is left out.
    pub fn render(&self, format: Format, payload_elsewhere: bool) -> String {
        let mut s = String::new();
        let payload = self.payload.as_deref().filter(|_| !payload_elsewhere);
        match format {
            Format::Text => {
                if let Some(h) = &self.head {
                    s.push_str(h);
                    s.push('\n');
                }
                for (k, v) in &self.fields {
                    s.push_str(&format!("{k}: {v}\n"));
                }
                if let Some(p) = payload {
                    s.push_str(p);
                }
            }
            Format::Kv => {
                s.push_str(&format!("exit={}\n", self.code));
                if let Some(h) = &self.head {
                    s.push_str(&format!("head={h}\n"));
                }
                for (k, v) in &self.fields {
                    s.push_str(&format!("{k}={v}\n"));
                }
                for l in payload.into_iter().flat_map(str::lines) {
                    s.push_str(&format!("payload={l}\n"));
                }
            }
        }
        s
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Resolves `custom:<path>` by reading a custom tract file; the tract is
/// named after the path so emitted files refer back to it.
pub fn resolve_custom(path: &str) -> orthotract::Result<Tract> {
    let body = fs::read_to_string(path).map_err(|e| orthotract::Error::Parse(format!("custom tract {path}: {e}")))?;
    let mut spec = text::parse_custom_tract(&body)?;
    spec.label = path.to_string();
    Tract::custom(spec)
}

fn parse_tract(d: &str) -> orthotract::Result<Tract> {
    Tract::parse_with(d, &mut resolve_custom)
}

fn sum_text(t: &Tract, s: &FormalSum) -> String {
    s.terms().iter().map(|&x| t.fmt_elem(x)).collect::<Vec<_>>().join(" + ")
}

fn sig_fields(t: &Tract, w: &SigWitness) -> Vec<(String, String)> {
    match w {
        SigWitness::Orthogonality { x, y, sum } => vec![
            ("x".into(), x.fmt_with(t)),
            ("y".into(), y.fmt_with(t)),
            ("sum".into(), sum_text(t, sum)),
        ],
        SigWitness::Span { basis, x } => vec![("basis".into(), basis.to_string()), ("x".into(), x.fmt_with(t))],
        SigWitness::Elimination { basis, es, f } => {
            let mut v = vec![
                ("basis".into(), basis.to_string()),
                ("e".into(), es.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")),
            ];
            if let Some(f) = f {
                v.push(("f".into(), f.to_string()));
            }
            v
        }
    }
}

fn vector_fields(t: &Tract, w: &VectorWitness) -> Vec<(String, String)> {
    match w {
        VectorWitness::V1 { x, y, sum } => vec![
            ("x".into(), x.fmt_with(t)),
            ("y".into(), y.fmt_with(t)),
            ("sum".into(), sum_text(t, sum)),
        ],
        VectorWitness::NoSupportBasis => vec![("reason".into(), "no support basis".into())],
        VectorWitness::V2 { basis, e } | VectorWitness::V3Ambiguous { basis, e } => {
            vec![("basis".into(), basis.to_string()), ("e".into(), e.to_string()), ("reason".into(), w.describe(t))]
        }
        VectorWitness::V3Missing { x } => vec![("x".into(), x.fmt_with(t)), ("reason".into(), w.describe(t))],
        VectorWitness::V3Extra { x, basis } => {
            vec![("x".into(), x.fmt_with(t)), ("basis".into(), basis.to_string()), ("reason".into(), w.describe(t))]
        }
    }
}

/// Picks the homomorphism named by `<src>:<tgt>`: the terminal map to `K`,
/// the identity, or the first involution-compatible map found.
pub fn parse_hom(spec: &str) -> Result<TractHom> {
    let mut last = None;
    for (i, _) in spec.match_indices(':') {
        let (a, b) = (&spec[..i], &spec[i + 1..]);
        match (parse_tract(a), parse_tract(b)) {
            (Ok(src), Ok(tgt)) => return choose_hom(&src, &tgt),
            (Err(e), _) | (_, Err(e)) => last = Some(e),
        }
    }
    match last {
        Some(e) => Err(anyhow!(e).context(format!("bad homomorphism {spec:?}"))),
        None => bail!("homomorphism {spec:?} must have the form <src>:<tgt>"),
    }
}

fn choose_hom(src: &Tract, tgt: &Tract) -> Result<TractHom> {
    if src == tgt {
        return Ok(TractHom::identity(src));
    }
    if tgt.is_krasner() {
        return Ok(TractHom::terminal(src));
    }
    let all = TractHom::find_all(src, tgt)?;
    let pick = all.iter().find(|h| h.is_involution_compatible()).or(all.first());
    pick.cloned().ok_or_else(|| anyhow!("no homomorphism {src} -> {tgt}"))
}

fn with_note(note: String, payload: String) -> String {
    format!("# {note}\n{payload}")
}

pub fn run(cli: &Cli) -> Result<Report> {
    let resolve = &mut resolve_custom;
    Ok(match &cli.command {
        Command::CheckMatroid { file } => {
            let (n, bases) = text::parse_bases(&read(file)?)?;
            match check_bases(n, &bases)? {
                None => Report::check(None).field("bases", bases.len()),
                Some(w) => Report::check(Some((
                    "exchange".into(),
                    vec![
                        ("b1".into(), w.b1.to_string()),
                        ("b2".into(), w.b2.to_string()),
                        ("x".into(), w.x.to_string()),
                    ],
                ))),
            }
        }
        Command::Circuits { file } => {
            let m = text::parse_ortho_matroid(&read(file)?)?;
            let mut s = String::new();
            for c in m.circuits()? {
                s.push_str(&format!("{c}\n"));
            }
            Report::object(s)
        }
        Command::CheckWick { level, file } => {
            let phi = text::parse_wick(&read(file)?, resolve)?;
            let level = WickLevel::from(*level);
            let w = phi.check_wick(level)?;
            Report::check(w.map(|w| {
                (
                    format!("{level}"),
                    vec![
                        ("t1".into(), w.t1.to_string()),
                        ("t2".into(), w.t2.to_string()),
                        ("sum".into(), sum_text(phi.tract(), &w.sum)),
                    ],
                )
            }))
        }
        Command::WickToCircuits { file } => {
            let phi = text::parse_wick(&read(file)?, resolve)?;
            Report::object(text::format_signature(&circuits_from_wick(&phi)?))
        }
        Command::CircuitsToWick { file } => {
            let c = text::parse_signature(&read(file)?, resolve)?;
            Report::object(text::format_wick(&c.to_wick()?))
        }
        Command::CheckSignature { axiom, file } => {
            let c = text::parse_signature(&read(file)?, resolve)?;
            let w = c.check_axiom(*axiom)?;
            Report::check(w.map(|w| (axiom.to_string(), sig_fields(c.tract(), &w))))
        }
        Command::Dual { file } => {
            let body = read(file)?;
            Report::object(match text::file_kind(&body)? {
                FileKind::OrthoMatroid => text::format_ortho_matroid(&text::parse_ortho_matroid(&body)?.dual()),
                FileKind::Matroid => text::format_matroid(&text::parse_matroid(&body)?.dual()),
                FileKind::Wick => text::format_wick(&text::parse_wick(&body, resolve)?.dual_wick()),
                FileKind::Signature => text::format_signature(&text::parse_signature(&body, resolve)?.dual()),
                k => bail!("dual is not defined for {k:?} files"),
            })
        }
        Command::Minor { elem, file } => {
            let body = read(file)?;
            let kind = text::file_kind(&body)?;
            match kind {
                FileKind::OrthoMatroid => {
                    let m = text::parse_ortho_matroid(&body)?;
                    let e = Element::parse(m.n(), elem)?;
                    let minor = m.minor(e)?;
                    let p = text::format_ortho_matroid(&minor.matroid);
                    Report::object(if minor.redirected {
                        with_note(format!("{e} is singular; the minor at {} was taken", e.dual()), p)
                    } else {
                        p
                    })
                }
                FileKind::Wick => {
                    let phi = text::parse_wick(&body, resolve)?;
                    let e = Element::parse(phi.n(), elem)?;
                    Report::object(text::format_wick(&phi.wick_minor(e)?))
                }
                FileKind::Signature => {
                    let c = text::parse_signature(&body, resolve)?;
                    let e = Element::parse(c.n(), elem)?;
                    Report::object(text::format_signature(&c.minor(e)?))
                }
                FileKind::Vectors => {
                    let v = text::parse_vectors(&body, resolve)?;
                    let e = Element::parse(v.n(), elem)?;
                    let (vm, valid) = v.minor(e)?;
                    let p = text::format_vectors(&vm);
                    Report::object(if valid { p } else { with_note("the minor is not a vector set".into(), p) })
                }
                k => bail!("minor is not defined for {k:?} files"),
            }
        }
        Command::Push { hom, file } => {
            let body = read(file)?;
            let h = parse_hom(hom)?;
            let p = match text::file_kind(&body)? {
                FileKind::Wick => text::format_wick(&text::parse_wick(&body, resolve)?.pushforward(&h)?),
                FileKind::Signature => text::format_signature(&text::parse_signature(&body, resolve)?.pushforward(&h)?),
                FileKind::Vectors => text::format_vectors(&text::parse_vectors(&body, resolve)?.pushforward(&h)?),
                k => bail!("push is not defined for {k:?} files"),
            };
            Report::object(with_note(format!("hom {h}"), p))
        }
        Command::Perp { file } => {
            let body = read(file)?;
            Report::object(match text::file_kind(&body)? {
                FileKind::Signature => text::format_vectors(&signature_perp(&text::parse_signature(&body, resolve)?)?),
                FileKind::Vectors => {
                    let v = text::parse_vectors(&body, resolve)?;
                    text::format_vectors(&perp(v.tract(), v.n(), v.vectors())?)
                }
                k => bail!("perp is not defined for {k:?} files"),
            })
        }
        Command::Elem { file } => {
            let v = text::parse_vectors(&read(file)?, resolve)?;
            Report::object(text::format_signature(&elementary_signature(&v)?))
        }
        Command::CheckVectors { file } => {
            let v = text::parse_vectors(&read(file)?, resolve)?;
            let w = v.check_vector_set()?;
            Report::check(w.map(|w| (w.axiom().to_string(), vector_fields(v.tract(), &w))))
        }
        Command::SearchRep { tract, level, file } => {
            let m = text::parse_ortho_matroid(&read(file)?)?;
            let t = parse_tract(tract)?;
            let r = search_representation(&m, &t, (*level).into())?;
            representable(&t, r.found.as_ref()).field("level", r.level).field("nodes", r.nodes)
        }
        Command::IsRegular { file } => {
            let m = text::parse_ortho_matroid(&read(file)?)?;
            let r = is_regular(&m)?;
            let mut rep = representable(&Tract::regular(), r.regular.as_ref());
            for n in &r.notes {
                rep = rep.field("note", n);
            }
            rep
        }
        Command::IsR6 { file } => {
            let m = text::parse_ortho_matroid(&read(file)?)?;
            let r = is_sixth_root_representable(&m)?;
            let mut rep = representable(&Tract::sixth_root(), r.r6.as_ref())
                .field("F3", if r.f3.is_some() { "yes" } else { "no" })
                .field("F4", if r.f4.is_some() { "yes" } else { "no" });
            if let Some(phi) = &r.r6 {
                for row in pushforward_targets(phi)? {
                    rep = rep.field("push", format!("{} {}", row.hom.target(), if row.strong { "strong" } else { "not strong" }));
                }
            }
            rep
        }
        Command::DetectMinor { target, file } => {
            let m = text::parse_ortho_matroid(&read(file)?)?;
            let (name, t) = match target {
                Target::M3 => ("M3", m3()),
                Target::M4 => ("M4", m4()),
            };
            match m.find_minor(&t)? {
                Some(s) => Report { head: Some(format!("MINOR {name} yes")), ..Report::default() }.field("removed", s),
                None => Report { code: 1, head: Some(format!("MINOR {name} no")), ..Report::default() },
            }
        }
        Command::Lift { file } => Report::object(text::format_ortho_matroid(&text::parse_matroid(&read(file)?)?.lift())),
        Command::CorpusVerify => {
            let cfg = Config { seed: cli.seed.unwrap_or(acceptance::DEFAULT_SEED), ..Config::default() };
            let results = acceptance::run_all(&cfg, workers());
            let mut rep = Report::default();
            for o in &results {
                rep = rep.field(&format!("criterion{:02}", o.id), format!("{} {} ({:.2}s): {}", o.verdict, o.title, o.elapsed.as_secs_f64(), o.detail));
            }
            let passed = results.iter().filter(|o| o.verdict == Verdict::Pass).count();
            rep.code = i32::from(passed != results.len());
            rep.head = Some(format!("{passed}/{} criteria pass", results.len()));
            rep
        }
    })
}

fn representable(t: &Tract, phi: Option<&orthotract::WickFunction>) -> Report {
    match phi {
        Some(phi) => Report { head: Some(format!("REPRESENTABLE {t} yes")), payload: Some(text::format_wick(phi)), ..Report::default() },
        None => Report { code: 1, head: Some(format!("REPRESENTABLE {t} no")), ..Report::default() },
    }
}

/// Worker threads for `corpus-verify`, from `ORTHOTRACT_WORKERS`.
pub fn workers() -> usize {
    std::env::var("ORTHOTRACT_WORKERS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Exit code for an error: 1 when the input violates an axiom, 2 otherwise.
pub fn error_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<orthotract::Error>() {
        Some(orthotract::Error::Axiom(_)) => 1,
        _ => 2,
    }
}
