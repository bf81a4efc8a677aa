//! `nodal-ias`: build, compare and draw nodal affine spheres from the
//! command line. Files go to `--out-dir`, else `$NODAL_IAS_OUT`, else `out`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use nodal_ias::atlas::{Face2, NodalIASSphere};
use nodal_ias::catalog;
use nodal_ias::certify::{certify_equivalence, verify_certificate, CertificateVerdict, EquivalenceCertificate};
use nodal_ias::config::{parse_rat_list, parse_usize_list, PipelineConfig, PolytopeRef};
use nodal_ias::pipeline::{build_a_t, build_gs, exceptional_area, validate_t, AtBuild, TVector};
use nodal_ias::render::{render_face, render_sphere_net, RenderStyle};
use nodal_ias::surgery::{FaceDiagram, SurgeryLog};
use nodal_ias::toric::{Polytope, PolytopeSpec};
use nodal_ias::{Error, Rat};

const OUT_ENV: &str = "NODAL_IAS_OUT";

#[derive(Parser)]
#[command(name = "nodal-ias", version, about = "Nodal integral affine spheres from smooth toric Fano polytopes")]
struct Cli {
    /// Output directory (overrides $NODAL_IAS_OUT).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the built-in polytopes.
    Catalog {
        #[arg(long)]
        json: bool,
    },
    /// Build A_t: a_t.json, report.txt, faces/*.svg, sphere-net.svg.
    Build(Input),
    /// Build the Gross-Siebert sphere of the inflated polytope: a_gs.json, gs-net.svg.
    Gs(Input),
    /// Certify A_t against A_GS, or replay a stored certificate.
    Certify {
        #[command(flatten)]
        input: Input,
        /// Certificate to re-verify instead of building a new one.
        #[arg(long)]
        replay: Option<PathBuf>,
        /// A_t sphere to check the replay against (rebuilt when absent).
        #[arg(long)]
        a_t: Option<PathBuf>,
        /// A_GS sphere to check the replay against (rebuilt when absent).
        #[arg(long)]
        a_gs: Option<PathBuf>,
    },
    /// Draw a sphere, face diagram or surgery log as SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Default)]
struct Input {
    /// Catalog name or path to a JSON polytope spec.
    #[arg(long)]
    polytope: Option<String>,
    /// Facet ordering, e.g. `3,2,1,0`.
    #[arg(long)]
    order: Option<String>,
    /// Time vector indexed by facet, e.g. `2/5,3/10,1/5,1/10`.
    #[arg(long)]
    t: Option<String>,
    /// Pipeline config JSON; the flags above override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

enum Failure {
    Lib(Error),
    Write(String),
    Verdict(CertificateVerdict),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn kind(e: &Error) -> &'static str {
    match e {
        Error::ZeroVector => "zero_vector",
        Error::NotUnimodular(_) => "not_unimodular",
        Error::NotSaturated(_) => "not_saturated",
        Error::Overflow(_) => "overflow",
        Error::InvalidInput(_) => "invalid_input",
        Error::Parse(_) => "parse",
        Error::EmptyPolytope => "empty_polytope",
        Error::NotFullDimensional => "not_full_dimensional",
        Error::Unbounded => "unbounded",
        Error::RedundantHalfspace(_) => "redundant_halfspace",
        Error::NotDelzant { .. } => "not_delzant",
        Error::NonPositiveDegree { .. } => "non_positive_degree",
        Error::CombinatoricsChange(_) => "combinatorics_change",
        Error::NotClosing(_) => "not_closing",
        Error::NonPositiveLength(_) => "non_positive_length",
        Error::Wedge(_) => "wedge",
        Error::Surgery(_) => "surgery",
        Error::Gluing(_) => "gluing",
        Error::Monodromy(_) => "monodromy",
        Error::TimeVector(_) => "time_vector",
        Error::EdgeLengthMismatch { .. } => "edge_length_mismatch",
        Error::CocycleDefect { .. } => "cocycle_defect",
        Error::NotGsAdmissible(_) => "not_gs_admissible",
        Error::Certification { .. } => "certification",
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Parse(_)) => 2,
            Failure::Lib(Error::Certification { .. }) | Failure::Verdict(_) => 4,
            Failure::Lib(_) => 3,
            Failure::Write(_) => 1,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Lib(e) => {
                let mut v = json!({"error": kind(e), "message": e.to_string()});
                match e {
                    // the violation list is itself JSON
                    Error::TimeVector(s) => {
                        if let Ok(d) = serde_json::from_str::<Value>(s) {
                            v["details"] = d;
                        }
                    }
                    Error::Certification { step, reason } => {
                        v["step"] = json!(step);
                        v["reason"] = json!(reason);
                    }
                    Error::NotDelzant { vertex, .. } => v["vertex"] = json!(vertex),
                    Error::CocycleDefect { edge, .. } | Error::EdgeLengthMismatch { edge, .. } => {
                        v["edge"] = json!(edge)
                    }
                    _ => {}
                }
                v
            }
            Failure::Write(msg) => json!({"error": "io", "message": msg}),
            Failure::Verdict(v) => json!({
                "error": "certification",
                "message": v.reason,
                "step": v.step,
            }),
        }
    }
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())).into())
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())).into())
}

struct Resolved {
    polytope: Polytope,
    ordering: Vec<usize>,
    t: Option<Vec<Rat>>,
}

impl Resolved {
    /// The explicit time vector, or `m/10, …, 1/10` along the ordering.
    fn tvector(&self) -> TVector {
        match &self.t {
            Some(t) => TVector::new(self.ordering.clone(), t.clone()),
            None => TVector::linear(self.ordering.clone(), &Rat::new(1, 10)),
        }
    }
}

fn resolve(inp: &Input) -> Outcome<Resolved> {
    let mut cfg = match &inp.config {
        Some(path) => Some(PipelineConfig::from_json(&read(path)?)?),
        None => None,
    };
    if let Some(name) = &inp.polytope {
        let path = Path::new(name);
        let r = if path.is_file() {
            PolytopeRef::Spec(parse_json::<PolytopeSpec>(path)?)
        } else {
            PolytopeRef::Name(name.clone())
        };
        match cfg.as_mut() {
            Some(c) => c.polytope = r,
            None => {
                cfg = Some(PipelineConfig {
                    polytope: r,
                    ordering: None,
                    t: None,
                })
            }
        }
    }
    let Some(mut cfg) = cfg else {
        return Err(Error::Parse("no polytope: pass --polytope or --config".into()).into());
    };
    if let Some(o) = &inp.order {
        cfg.ordering = Some(parse_usize_list(o)?);
    }
    if let Some(t) = &inp.t {
        cfg.t = Some(parse_rat_list(t)?);
    }
    let polytope = cfg.polytope.resolve()?;
    polytope.check_delzant().into_result()?;
    polytope.anticanonical_degrees()?;
    let ordering = cfg.ordering.unwrap_or_else(|| (0..polytope.num_facets()).collect());
    Ok(Resolved {
        polytope,
        ordering,
        t: cfg.t,
    })
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn write(path: &Path, text: &str) -> Outcome<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Failure::Write(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure::Write(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("serializable");
    s.push('\n');
    s
}

fn cmd_catalog(as_json: bool) -> Outcome<()> {
    let mut out = String::new();
    let mut rows = Vec::new();
    for e in catalog::entries() {
        let p = &e.polytope;
        p.check_delzant().into_result()?;
        let degrees = p.anticanonical_degrees()?;
        if as_json {
            rows.push(json!({
                "name": e.name,
                "doc": e.doc,
                "polytope": p.spec(),
                "degrees": degrees,
            }));
        } else {
            let _ = writeln!(
                out,
                "{:<10} facets {}  vertices {}  edges {}  degree sum {}  {}",
                e.name,
                p.num_facets(),
                p.vertices.len(),
                p.edges.len(),
                degrees.iter().sum::<i64>(),
                e.doc
            );
        }
    }
    if as_json {
        out = to_json(&rows);
    }
    print!("{out}");
    Ok(())
}

fn report(p: &Polytope, tv: &TVector, a: &AtBuild) -> Outcome<String> {
    let mut r = String::new();
    let list = |v: &[Rat]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(r, "facets {}  vertices {}  edges {}", p.num_facets(), p.vertices.len(), p.edges.len());
    for (i, h) in p.halfspaces.iter().enumerate() {
        let _ = writeln!(r, "facet {i}: normal {:?} support {}", h.normal, h.support);
    }
    let _ = writeln!(
        r,
        "ordering {}",
        tv.ordering.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    );
    let _ = writeln!(r, "t {}", list(&tv.t));
    let _ = writeln!(r);
    let _ = writeln!(r, "edge  facets  degree  owner  exceptional area");
    for s in &a.schedule.edges {
        let [f, g] = p.edges[s.edge].facets;
        let _ = writeln!(
            r,
            "{:<5} {:<7} {:<7} {:<6} {}",
            s.edge,
            format!("{f},{g}"),
            s.count,
            s.owner,
            exceptional_area(&a.schedule, tv, s.edge)?
        );
    }
    let _ = writeln!(r);
    for (f, d) in a.diagrams.iter().enumerate() {
        let _ = writeln!(
            r,
            "face {f}: {} nodes, affine area {}",
            d.face.nodes.len(),
            d.face.affine_area()?
        );
    }
    let (count, total) = a.sphere.node_count();
    let td = a.sphere.total_defect();
    let _ = writeln!(r, "nodes {count}, total multiplicity {total}");
    let _ = writeln!(r, "euler characteristic {}", a.sphere.euler_characteristic());
    let _ = writeln!(r, "total defect {}", if td.ok { "ok" } else { "FAILED" });
    Ok(r)
}

fn cmd_build(inp: &Input, dir: &Path) -> Outcome<()> {
    let res = resolve(inp)?;
    let tv = res.tvector();
    validate_t(&res.polytope, &tv).into_result()?;
    let a = build_a_t(&res.polytope, &tv)?;
    let style = RenderStyle::default();
    write(&dir.join("a_t.json"), &to_json(&a.sphere))?;
    write(&dir.join("report.txt"), &report(&res.polytope, &tv, &a)?)?;
    for (f, d) in a.diagrams.iter().enumerate() {
        write(
            &dir.join("faces").join(format!("face-{f}.svg")),
            &render_face(&d.face, &d.marked, &style),
        )?;
    }
    write(&dir.join("sphere-net.svg"), &render_sphere_net(&a.sphere, &style))?;
    let (count, total) = a.sphere.node_count();
    println!("built A_t: {count} nodes, total multiplicity {total} -> {}", dir.display());
    Ok(())
}

fn cmd_gs(inp: &Input, dir: &Path) -> Outcome<()> {
    let res = resolve(inp)?;
    let q = match &res.t {
        Some(t) => res.polytope.inflate(t)?,
        None => res.polytope.clone(),
    };
    let s = build_gs(&q)?;
    write(&dir.join("a_gs.json"), &to_json(&s))?;
    write(&dir.join("gs-net.svg"), &render_sphere_net(&s, &RenderStyle::default()))?;
    let (count, total) = s.node_count();
    println!("built A_GS: {count} edge nodes, total multiplicity {total} -> {}", dir.display());
    Ok(())
}

fn print_verdict(v: &CertificateVerdict) {
    match (v.pass, v.step) {
        (true, _) => println!("PASS"),
        (false, Some(k)) => println!("FAIL at step {k}: {}", v.reason),
        (false, None) => println!("FAIL: {}", v.reason),
    }
}

fn cmd_certify(inp: &Input, replay: Option<&Path>, a_t: Option<&Path>, a_gs: Option<&Path>, dir: &Path) -> Outcome<()> {
    let (p, tv, cert) = match replay {
        Some(path) => {
            let cert: EquivalenceCertificate = parse_json(path)?;
            let p = PolytopeRef::Spec(cert.polytope.clone()).resolve()?;
            let tv = TVector::new(cert.ordering.clone(), cert.t.clone());
            (p, tv, Some(cert))
        }
        None => {
            let res = resolve(inp)?;
            let tv = res.tvector();
            (res.polytope, tv, None)
        }
    };
    validate_t(&p, &tv).into_result()?;
    let at = match a_t {
        Some(path) => parse_json::<NodalIASSphere>(path)?,
        None => build_a_t(&p, &tv)?.sphere,
    };
    let gs = match a_gs {
        Some(path) => parse_json::<NodalIASSphere>(path)?,
        None => build_gs(&p.inflate(&tv.t)?)?,
    };
    let verdict = match cert {
        Some(cert) => verify_certificate(&cert, &at, &gs),
        None => {
            let schedule = nodal_ias::pipeline::greedy_schedule(&p, &tv.ordering)?;
            match certify_equivalence(&p, &schedule, &tv, &at, &gs) {
                Ok(cert) => {
                    write(&dir.join("certificate.json"), &to_json(&cert))?;
                    CertificateVerdict {
                        pass: true,
                        step: None,
                        reason: format!("{} steps", cert.steps.len()),
                    }
                }
                Err(Error::Certification { step, reason }) => CertificateVerdict {
                    pass: false,
                    step: Some(step),
                    reason,
                },
                Err(e) => return Err(e.into()),
            }
        }
    };
    print_verdict(&verdict);
    if verdict.pass {
        Ok(())
    } else {
        Err(Failure::Verdict(verdict))
    }
}

/// Accepts a sphere, a face diagram, a surgery log or a bare face.
fn cmd_render(input: &Path, out: &Path) -> Outcome<()> {
    let text = read(input)?;
    let style = RenderStyle::default();
    let svg = if let Ok(s) = serde_json::from_str::<NodalIASSphere>(&text) {
        render_sphere_net(&s, &style)
    } else if let Ok(d) = serde_json::from_str::<FaceDiagram>(&text) {
        render_face(&d.face, &d.marked, &style)
    } else if let Ok(log) = serde_json::from_str::<SurgeryLog>(&text) {
        let d = FaceDiagram::replay(&log)?;
        render_face(&d.face, &d.marked, &style)
    } else if let Ok(f) = serde_json::from_str::<Face2>(&text) {
        render_face(&f, &[], &style)
    } else {
        return Err(Error::Parse(format!(
            "{}: not a sphere, face diagram, surgery log or face",
            input.display()
        ))
        .into());
    };
    write(out, &svg)
}

fn run(cli: &Cli) -> Outcome<()> {
    let dir = out_dir(cli);
    match &cli.cmd {
        Cmd::Catalog { json } => cmd_catalog(*json),
        Cmd::Build(inp) => cmd_build(inp, &dir),
        Cmd::Gs(inp) => cmd_gs(inp, &dir),
        Cmd::Certify {
            input,
            replay,
            a_t,
            a_gs,
        } => cmd_certify(input, replay.as_deref(), a_t.as_deref(), a_gs.as_deref(), &dir),
        Cmd::Render { input, out } => cmd_render(input, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.code())
        }
    }
}
