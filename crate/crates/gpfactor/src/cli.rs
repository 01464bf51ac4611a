//! Command-line front end: input documents, command dispatch and canonical
//! JSON reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::caps::Caps;
use crate::classify::{isomorphism_obstruction, Dimension, Instance, VertexAlgebra};
use crate::coxeter::CoxeterGroup;
use crate::error::{Error, Result};
use crate::fock::{self, TruncatedFockSpace, VertexModel};
use crate::graph::{sets_to_ids, SimpleGraph};
use crate::tristate::Truth;
use crate::vset::VertexSet;

/// Exit status when a numerical verification exceeds its tolerance.
pub const EXIT_VERIFICATION_FAILED: i32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "gpfactor",
    version,
    about = "Structure of graph-product von Neumann algebras from graph data",
    after_help = "Exit status: 0 ok, 1 numerical check failed, 2 invalid input, 3 resource cap exceeded.\n\
                  Caps (defaults): enumeration=1000000, fock_dimension=20000, sweep_vertices=16, \
                  cliques=1048576, isomorphisms=1000."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Cap overrides as `key=value,...`.
    #[arg(long, global = true, env = "GPFACTOR_CAPS")]
    pub caps: Option<String>,
    /// Worker threads for parallel sweeps and trials.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Full structural report.
    Analyze { input: PathBuf },
    /// Rigidity of the graph with per-vertex `Link(Link(v))`.
    Rigid { input: PathBuf },
    /// Core graph, its classes and the product reconstruction.
    Core { input: PathBuf },
    /// Irreducible and connected components.
    Components { input: PathBuf },
    /// Growth series and Hecke sum convergence.
    HeckeGrowth {
        input: PathBuf,
        #[arg(long)]
        max_len: usize,
        /// JSON array of parameters in vertex order, or an object from id to parameter.
        #[arg(long)]
        q_file: Option<PathBuf>,
    },
    /// Randomized checks of the Fock-space identities.
    FockVerify {
        input: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = fock::DEFAULT_TOLERANCE)]
        tol: f64,
        /// Comma-separated ids of Γ1 (default: the first vertex).
        #[arg(long)]
        g1: Option<String>,
        /// Comma-separated ids of Γ2 (default: vertices outside the star of the first vertex).
        #[arg(long)]
        g2: Option<String>,
    },
    /// Compare two inputs through the rigid-graph isomorphism criterion.
    Isocheck { a: PathBuf, b: PathBuf },
}

/// How a vertex algebra was described in the input.
#[derive(Clone, Debug, PartialEq)]
pub enum Descriptor {
    Hecke { q: f64 },
    TwoDim { alpha: f64 },
    Matrix { n: u64 },
    II1,
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputVertex {
    pub id: String,
    pub descriptor: Descriptor,
    pub algebra: VertexAlgebra,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputDocument {
    pub vertices: Vec<InputVertex>,
    pub edges: Vec<(String, String)>,
    pub caps: Option<Caps>,
    pub assume_ii1_factor: bool,
}

const FLAGS: [&str; 11] = [
    "amenable",
    "atomic",
    "diffuse",
    "strongly_solid",
    "is_factor",
    "is_II1_factor",
    "prime",
    "trace_zero_unitary",
    "separable_predual",
    "strong_AO",
    "in_C_vertex",
];

fn flag_slot<'a>(a: &'a mut VertexAlgebra, name: &str) -> &'a mut Truth {
    match name {
        "amenable" => &mut a.amenable,
        "atomic" => &mut a.atomic,
        "diffuse" => &mut a.diffuse,
        "strongly_solid" => &mut a.strongly_solid,
        "is_factor" => &mut a.is_factor,
        "is_II1_factor" => &mut a.is_ii1_factor,
        "prime" => &mut a.prime,
        "trace_zero_unitary" => &mut a.trace_zero_unitary,
        "separable_predual" => &mut a.separable_predual,
        "strong_AO" => &mut a.strong_ao,
        "in_C_vertex" => &mut a.in_c_vertex,
        _ => unreachable!("checked against FLAGS"),
    }
}

fn flag_value(a: &VertexAlgebra, name: &str) -> Truth {
    *flag_slot(&mut a.clone(), name)
}

fn parse_truth(v: &Value, at: &str) -> std::result::Result<Truth, String> {
    match v.as_str() {
        Some("yes") => Ok(Truth::Yes),
        Some("no") => Ok(Truth::No),
        Some("unknown") => Ok(Truth::Unknown),
        _ => Err(format!("{at}: expected \"yes\", \"no\" or \"unknown\", found {v}")),
    }
}

fn number(obj: &Map<String, Value>, key: &str, at: &str) -> std::result::Result<f64, String> {
    obj.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| format!("{at}: missing numeric field {key:?}"))
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], at: &str) -> std::result::Result<(), String> {
    for k in obj.keys() {
        if k != "kind" && !allowed.contains(&k.as_str()) {
            return Err(format!("{at}: unknown field {k:?}"));
        }
    }
    Ok(())
}

fn parse_algebra(v: &Value, at: &str) -> std::result::Result<(Descriptor, VertexAlgebra), String> {
    let obj = v
        .as_object()
        .ok_or_else(|| format!("{at}: algebra must be an object"))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| format!("{at}: missing string field \"kind\""))?;
    let lift = |r: Result<VertexAlgebra>| r.map_err(|e| format!("{at}: {e}"));
    match kind {
        "hecke" => {
            check_keys(obj, &["q"], at)?;
            let q = number(obj, "q", at)?;
            let a = lift(VertexAlgebra::hecke(q))?;
            Ok((Descriptor::Hecke { q: a.hecke_q.unwrap() }, a))
        }
        "two_dim" => {
            check_keys(obj, &["alpha"], at)?;
            let a = lift(VertexAlgebra::two_dim(number(obj, "alpha", at)?))?;
            Ok((
                Descriptor::TwoDim {
                    alpha: a.two_dim_alpha.unwrap(),
                },
                a,
            ))
        }
        "matrix" => {
            check_keys(obj, &["n"], at)?;
            let n = obj
                .get("n")
                .and_then(Value::as_u64)
                .ok_or_else(|| format!("{at}: missing integer field \"n\""))?;
            Ok((Descriptor::Matrix { n }, lift(VertexAlgebra::matrix(n))?))
        }
        "II1" => {
            check_keys(obj, &FLAGS, at)?;
            let mut a = VertexAlgebra::ii1();
            for name in FLAGS {
                if let Some(x) = obj.get(name) {
                    let t = parse_truth(x, &format!("{at}.{name}"))?;
                    let slot = flag_slot(&mut a, name);
                    if slot.is_decisive() && t.is_decisive() && *slot != t {
                        return Err(format!("{at}.{name}: contradicts kind II1"));
                    }
                    if t.is_decisive() {
                        *slot = t;
                    }
                }
            }
            Ok((Descriptor::II1, lift(a.derive())?))
        }
        "custom" => {
            let mut allowed = FLAGS.to_vec();
            allowed.push("dimension");
            check_keys(obj, &allowed, at)?;
            let missing: Vec<&str> = allowed.iter().copied().filter(|k| !obj.contains_key(*k)).collect();
            if !missing.is_empty() {
                return Err(format!(
                    "{at}: custom descriptor is missing fields {}",
                    missing.join(", ")
                ));
            }
            let dimension = match &obj["dimension"] {
                Value::String(s) if s == "inf" => Dimension::Infinite,
                d => Dimension::Finite(
                    d.as_u64()
                        .ok_or_else(|| format!("{at}.dimension: expected a positive integer or \"inf\""))?,
                ),
            };
            let mut a = VertexAlgebra::unknown(dimension);
            for name in FLAGS {
                *flag_slot(&mut a, name) = parse_truth(&obj[name], &format!("{at}.{name}"))?;
            }
            Ok((Descriptor::Custom, lift(a.derive())?))
        }
        other => Err(format!(
            "{at}: unknown kind {other:?} (expected hecke, two_dim, matrix, II1 or custom)"
        )),
    }
}

/// Parses and validates an input document, collecting every error found.
pub fn parse(text: &str) -> Result<InputDocument> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        Error::validation(format!(
            "malformed JSON at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::validation("document must be a JSON object"))?;
    let mut errors = vec![];
    for k in obj.keys() {
        if !["vertices", "edges", "options"].contains(&k.as_str()) {
            errors.push(format!("unknown top-level field {k:?}"));
        }
    }
    let mut vertices = vec![];
    match obj.get("vertices").and_then(Value::as_array) {
        None => errors.push("missing array field \"vertices\"".into()),
        Some(vs) => {
            for (i, v) in vs.iter().enumerate() {
                let at = format!("vertices[{i}]");
                let Some(id) = v.get("id").and_then(Value::as_str) else {
                    errors.push(format!("{at}: missing string field \"id\""));
                    continue;
                };
                if let Some(o) = v.as_object() {
                    for k in o.keys() {
                        if k != "id" && k != "algebra" {
                            errors.push(format!("{at}: unknown field {k:?}"));
                        }
                    }
                }
                if vertices.iter().any(|x: &InputVertex| x.id == id) {
                    errors.push(format!("{at}: duplicate vertex id {id:?}"));
                    continue;
                }
                let Some(alg) = v.get("algebra") else {
                    errors.push(format!("{at}: missing field \"algebra\""));
                    continue;
                };
                match parse_algebra(alg, &format!("{at}.algebra")) {
                    Ok((descriptor, algebra)) => vertices.push(InputVertex {
                        id: id.to_string(),
                        descriptor,
                        algebra,
                    }),
                    Err(e) => errors.push(e),
                }
            }
        }
    }
    let mut edges = vec![];
    match obj.get("edges") {
        None => {}
        Some(Value::Array(es)) => {
            for (i, e) in es.iter().enumerate() {
                let pair = e
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .and_then(|p| Some((p[0].as_str()?, p[1].as_str()?)));
                match pair {
                    None => errors.push(format!("edges[{i}]: expected a pair of vertex ids")),
                    Some((a, b)) if a == b => errors.push(format!("edges[{i}]: self-edge on {a:?}")),
                    Some((a, b)) => {
                        for x in [a, b] {
                            if !obj["vertices"]
                                .as_array()
                                .into_iter()
                                .flatten()
                                .any(|v| v.get("id").and_then(Value::as_str) == Some(x))
                            {
                                errors.push(format!("edges[{i}]: dangling edge to unknown vertex {x:?}"));
                            }
                        }
                        edges.push((a.to_string(), b.to_string()));
                    }
                }
            }
        }
        Some(_) => errors.push("\"edges\" must be an array".into()),
    }
    let mut caps = None;
    let mut assume_ii1_factor = false;
    if let Some(opts) = obj.get("options") {
        match opts.as_object() {
            None => errors.push("\"options\" must be an object".into()),
            Some(o) => {
                for (k, v) in o {
                    match k.as_str() {
                        "caps" => match serde_json::from_value::<Caps>(v.clone()) {
                            Ok(c) => caps = Some(c),
                            Err(e) => errors.push(format!("options.caps: {e}")),
                        },
                        "assume_II1_factor" => match v.as_bool() {
                            Some(b) => assume_ii1_factor = b,
                            None => errors.push("options.assume_II1_factor: expected a boolean".into()),
                        },
                        other => errors.push(format!("options: unknown field {other:?}")),
                    }
                }
            }
        }
    }
    if !errors.is_empty() {
        return Err(Error::validation(errors.join("; ")));
    }
    let doc = InputDocument {
        vertices,
        edges,
        caps,
        assume_ii1_factor,
    };
    doc.graph()?;
    Ok(doc)
}

impl InputDocument {
    pub fn graph(&self) -> Result<SimpleGraph> {
        let ids: Vec<&str> = self.vertices.iter().map(|v| v.id.as_str()).collect();
        let edges: Vec<(&str, &str)> = self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        SimpleGraph::new(&ids, &edges)
    }

    pub fn instance(&self, caps: Caps) -> Result<Instance> {
        let mut inst = Instance::new(self.graph()?, self.vertices.iter().map(|v| v.algebra.clone()).collect())?;
        inst.assume_ii1_factor = self.assume_ii1_factor;
        inst.caps = caps;
        Ok(inst)
    }

    /// Normalized document: folded parameters and, for flag-based kinds, every derived flag.
    pub fn to_value(&self) -> Value {
        let vertices: Vec<Value> = self
            .vertices
            .iter()
            .map(|v| {
                let algebra = match &v.descriptor {
                    Descriptor::Hecke { q } => json!({"kind": "hecke", "q": q}),
                    Descriptor::TwoDim { alpha } => json!({"kind": "two_dim", "alpha": alpha}),
                    Descriptor::Matrix { n } => json!({"kind": "matrix", "n": n}),
                    d => {
                        let mut m = Map::new();
                        let custom = *d == Descriptor::Custom;
                        m.insert("kind".into(), Value::from(if custom { "custom" } else { "II1" }));
                        if custom {
                            m.insert("dimension".into(), serde_json::to_value(v.algebra.dimension).unwrap());
                        }
                        for name in FLAGS {
                            m.insert(name.into(), serde_json::to_value(flag_value(&v.algebra, name)).unwrap());
                        }
                        Value::Object(m)
                    }
                };
                json!({"id": v.id, "algebra": algebra})
            })
            .collect();
        let mut doc = json!({
            "vertices": vertices,
            "edges": self.edges.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        });
        let mut options = Map::new();
        if let Some(c) = &self.caps {
            options.insert("caps".into(), serde_json::to_value(c).unwrap());
        }
        if self.assume_ii1_factor {
            options.insert("assume_II1_factor".into(), Value::Bool(true));
        }
        if !options.is_empty() {
            doc["options"] = Value::Object(options);
        }
        doc
    }
}

/// Canonical serialization: sorted keys, shortest round-trip floats, trailing newline.
pub fn emit(v: &Value) -> String {
    // `Value` maps are ordered by key, so a round-trip through `Value` sorts nested objects.
    let sorted: Value = serde_json::from_str(&v.to_string()).expect("valid JSON");
    let mut s = serde_json::to_string_pretty(&sorted).expect("serializable");
    s.push('\n');
    s
}

/// Structural report of a parsed document, without the report header.
pub fn analyze_document(doc: &InputDocument, caps: Caps) -> Result<Value> {
    let report = doc.instance(caps)?.full_report()?;
    let mut body = to_value(&report);
    body["vertex_algebras"] = Value::Object(
        doc.vertices
            .iter()
            .map(|v| (v.id.clone(), to_value(&v.algebra)))
            .collect(),
    );
    Ok(body)
}

/// Full `analyze` report for a document given as text.
pub fn analyze_text(text: &str) -> Result<Value> {
    let doc = parse(text)?;
    let body = analyze_document(&doc, doc.caps.unwrap_or_default())?;
    Ok(merge(header("analyze", &digest(text.as_bytes())), body))
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn read_input(path: &Path) -> Result<(String, String)> {
    let bytes = if path.as_os_str() == "-" {
        let mut buf = vec![];
        std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf)
            .map_err(|e| Error::validation(format!("reading stdin: {e}")))?;
        buf
    } else {
        std::fs::read(path).map_err(|e| Error::validation(format!("reading {}: {e}", path.display())))?
    };
    let d = digest(&bytes);
    let text = String::from_utf8(bytes).map_err(|_| Error::validation(format!("{} is not UTF-8", path.display())))?;
    Ok((text, d))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable report")
}

fn effective_caps(doc: &InputDocument, overrides: Option<&str>) -> Result<Caps> {
    let base = doc.caps.unwrap_or_default();
    match overrides {
        Some(s) => base.with_overrides(s),
        None => Ok(base),
    }
}

fn header(command: &str, digest: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool".into(), Value::from("gpfactor"));
    m.insert("version".into(), Value::from(crate::VERSION));
    m.insert("command".into(), Value::from(command));
    m.insert("input_digest".into(), Value::from(digest));
    m
}

fn merge(mut head: Map<String, Value>, body: Value) -> Value {
    if let Value::Object(b) = body {
        head.extend(b);
    }
    Value::Object(head)
}

fn parse_id_set(g: &SimpleGraph, s: &str) -> Result<VertexSet> {
    let ids: Vec<&str> = s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
    g.subset(&ids)
}

/// Outcome of a command: the report and the exit status.
pub struct Outcome {
    pub report: Value,
    pub status: i32,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match cli.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::validation(format!("worker pool: {e}")))?;
            pool.install(|| dispatch(cli))
        }
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let ok = |report| Ok(Outcome { report, status: 0 });
    match &cli.command {
        Command::Analyze { input } => {
            let (text, d) = read_input(input)?;
            let doc = parse(&text)?;
            let body = analyze_document(&doc, effective_caps(&doc, cli.caps.as_deref())?)?;
            ok(merge(header("analyze", &d), body))
        }
        Command::Rigid { input } => {
            let (text, d) = read_input(input)?;
            let g = parse(&text)?.graph()?;
            let per_vertex: BTreeMap<String, Value> = (0..g.len())
                .map(|v| {
                    let ll = g.link(g.link(VertexSet::singleton(v)));
                    (
                        g.id(v).to_string(),
                        json!({"link_of_link": g.id_list(ll), "ok": ll == VertexSet::singleton(v)}),
                    )
                })
                .collect();
            ok(merge(
                header("rigid", &d),
                json!({"rigid": g.is_rigid(), "vertices": per_vertex}),
            ))
        }
        Command::Core { input } => {
            let (text, d) = read_input(input)?;
            let g = parse(&text)?.graph()?;
            let (core, class_of) = g.core();
            let mut classes: BTreeMap<String, Vec<String>> = BTreeMap::new();
            for (v, &c) in class_of.iter().enumerate() {
                classes
                    .entry(core.id(c).to_string())
                    .or_default()
                    .push(g.id(v).to_string());
            }
            let rec = g.core_reconstruction();
            let valid = rec.witness.is_valid(&g, &rec.product);
            ok(merge(
                header("core", &d),
                json!({
                    "core_vertices": core.ids(),
                    "core_edges": core.edges().iter().map(|&(a, b)| [core.id(a), core.id(b)]).collect::<Vec<_>>(),
                    "classes": classes,
                    "core_is_own_core": core.core().0.len() == core.len(),
                    "reconstruction_valid": valid,
                }),
            ))
        }
        Command::Components { input } => {
            let (text, d) = read_input(input)?;
            let g = parse(&text)?.graph()?;
            ok(merge(
                header("components", &d),
                json!({
                    "irreducible_components": sets_to_ids(&g, &g.irreducible_components()),
                    "connected_components": sets_to_ids(&g, &g.connected_components()),
                }),
            ))
        }
        Command::HeckeGrowth { input, max_len, q_file } => {
            let (text, d) = read_input(input)?;
            let doc = parse(&text)?;
            let caps = effective_caps(&doc, cli.caps.as_deref())?;
            let g = doc.graph()?;
            let (q, source) = hecke_parameters(&doc, &g, q_file.as_deref())?;
            let group = CoxeterGroup::new(&g);
            let transfer = group.growth_counts_transfer(*max_len, &q, caps.cliques)?;
            let total: u64 = transfer.counts.iter().fold(0u64, |a, &b| a.saturating_add(b));
            let bfs = if total <= caps.enumeration as u64 {
                let b = group.growth_counts_bfs(*max_len, caps.enumeration)?;
                json!({"counts": b.counts, "agrees_with_transfer": b.counts == transfer.counts})
            } else {
                Value::from(format!(
                    "skipped: {total} elements exceed the enumeration cap {}",
                    caps.enumeration
                ))
            };
            let weighted = transfer.weighted.clone().unwrap_or_default();
            let partial: Vec<f64> = weighted
                .iter()
                .scan(0.0, |s, x| {
                    *s += x;
                    Some(*s)
                })
                .collect();
            let conv = group.hecke_sum_converges(&q, caps.cliques)?;
            let qmap: BTreeMap<String, f64> = (0..g.len()).map(|v| (g.id(v).to_string(), q[v])).collect();
            ok(merge(
                header("hecke-growth", &d),
                json!({
                    "max_len": max_len,
                    "q": qmap,
                    "q_source": source,
                    "counts": transfer.counts,
                    "bfs": bfs,
                    "weighted": weighted,
                    "partial_sums": partial,
                    "convergence": to_value(&conv),
                }),
            ))
        }
        Command::FockVerify {
            input,
            depth,
            trials,
            seed,
            tol,
            g1,
            g2,
        } => {
            let (text, d) = read_input(input)?;
            let doc = parse(&text)?;
            let caps = effective_caps(&doc, cli.caps.as_deref())?;
            let (body, passed) = fock_verify(&doc, caps, *depth, *trials, *seed, *tol, g1.as_deref(), g2.as_deref())?;
            Ok(Outcome {
                report: merge(header("fock-verify", &d), body),
                status: if passed { 0 } else { EXIT_VERIFICATION_FAILED },
            })
        }
        Command::Isocheck { a, b } => {
            let (ta, da) = read_input(a)?;
            let (tb, db) = read_input(b)?;
            let (pa, pb) = (parse(&ta)?, parse(&tb)?);
            let ia = pa.instance(effective_caps(&pa, cli.caps.as_deref())?)?;
            let ib = pb.instance(effective_caps(&pb, cli.caps.as_deref())?)?;
            let verdict = isomorphism_obstruction(&ia, &ib);
            let mut head = header("isocheck", &da);
            head.insert("second_input_digest".into(), Value::from(db));
            ok(merge(head, to_value(&verdict)))
        }
    }
}

fn hecke_parameters(doc: &InputDocument, g: &SimpleGraph, q_file: Option<&Path>) -> Result<(Vec<f64>, String)> {
    let fold = |x: f64| -> Result<f64> {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::validation(format!("Hecke parameter {x} must be positive")));
        }
        Ok(if x > 1.0 { 1.0 / x } else { x })
    };
    if let Some(path) = q_file {
        let (text, _) = read_input(path)?;
        let v: Value =
            serde_json::from_str(&text).map_err(|e| Error::validation(format!("q-file: malformed JSON: {e}")))?;
        let q = match v {
            Value::Array(xs) => {
                if xs.len() != g.len() {
                    return Err(Error::validation(format!(
                        "q-file lists {} values for {} vertices",
                        xs.len(),
                        g.len()
                    )));
                }
                xs.iter()
                    .map(|x| {
                        x.as_f64()
                            .ok_or_else(|| Error::validation("q-file: non-numeric entry"))
                            .and_then(fold)
                    })
                    .collect::<Result<_>>()?
            }
            Value::Object(m) => {
                for k in m.keys() {
                    g.index_of(k)?;
                }
                (0..g.len())
                    .map(|v| {
                        m.get(g.id(v))
                            .and_then(Value::as_f64)
                            .ok_or_else(|| Error::validation(format!("q-file: no value for vertex {:?}", g.id(v))))
                            .and_then(fold)
                    })
                    .collect::<Result<_>>()?
            }
            _ => return Err(Error::validation("q-file must hold an array or an object")),
        };
        return Ok((q, "q-file".into()));
    }
    if doc.vertices.iter().all(|v| v.algebra.hecke_q.is_some()) {
        return Ok((
            doc.vertices.iter().map(|v| v.algebra.hecke_q.unwrap()).collect(),
            "descriptors".into(),
        ));
    }
    Ok((
        vec![1.0; g.len()],
        "default q = 1 (not every vertex is two-dimensional)".into(),
    ))
}

fn vertex_model(v: &InputVertex) -> Result<(VertexModel, String)> {
    match v.descriptor {
        Descriptor::Matrix { n } if n <= 3 => Ok((VertexModel::matrix(n as usize)?, format!("M_{n}(C)"))),
        _ => match v.algebra.two_dim_alpha {
            Some(a) => Ok((
                VertexModel::commutative(vec![a, 1.0 - a])?,
                format!("C^2 with weights ({a}, {})", 1.0 - a),
            )),
            None => Ok((VertexModel::uniform(2)?, "C^2 uniform (substitute model)".into())),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn fock_verify(
    doc: &InputDocument,
    caps: Caps,
    depth: usize,
    trials: usize,
    seed: u64,
    tol: f64,
    g1: Option<&str>,
    g2: Option<&str>,
) -> Result<(Value, bool)> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::validation("tolerance must be positive"));
    }
    let g = doc.graph()?;
    if g.is_empty() {
        return Err(Error::validation("fock-verify needs at least one vertex"));
    }
    let mut models = vec![];
    let mut model_notes = BTreeMap::new();
    for v in &doc.vertices {
        let (m, note) = vertex_model(v)?;
        models.push(m);
        model_notes.insert(v.id.clone(), note);
    }
    let space = TruncatedFockSpace::new(&g, models, depth, caps.fock_dimension)?;
    let first_star = g.star(0);
    let g1 = match g1 {
        Some(s) => parse_id_set(&g, s)?,
        None => VertexSet::singleton(0),
    };
    let g2 = match g2 {
        Some(s) => parse_id_set(&g, s)?,
        None => {
            let rest = g.all().difference(first_star);
            if rest.is_empty() {
                g.all()
            } else {
                rest
            }
        }
    };
    let mut checks = vec![
        space.verify_expectation_triple(g1, g2, trials, seed, tol)?,
        space.verify_iterated_expectation(g1, g2, trials, seed, tol)?,
    ];
    for v in 0..g.len() {
        checks.push(space.verify_commutator_star(v, trials, seed, tol)?);
    }
    checks.push(space.verify_parts_decomposition(trials, seed, tol.min(1e-12))?);
    for v in 0..g.len() {
        checks.push(space.verify_amalgam(v, trials, seed, tol.min(1e-12))?);
    }
    let mut adjacent = vec![];
    for (a, b) in g.edges() {
        let exact = space.adjacent_commutation_exact(a, b, trials.min(20), seed)?;
        adjacent.push(json!({"edge": [g.id(a), g.id(b)], "bit_exact": exact}));
    }
    let passed = checks.iter().all(|c| c.passed) && adjacent.iter().all(|a| a["bit_exact"] == Value::Bool(true));
    let max_residual = checks.iter().map(|c| c.max_residual).fold(0.0, f64::max);
    Ok((
        json!({
            "depth": depth,
            "dimension": space.dim(),
            "truncation_exact": space.is_complete(),
            "trials": trials,
            "seed": seed,
            "tolerance": tol,
            "gamma1": g.id_list(g1),
            "gamma2": g.id_list(g2),
            "models": model_notes,
            "checks": to_value(&checks),
            "adjacent_commutation": adjacent,
            "max_residual": max_residual,
            "passed": passed,
        }),
        passed,
    ))
}

/// Entry point of the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", emit(&out.report));
            out.status
        }
        Err(e) => {
            eprintln!("gpfactor: {e}");
            e.exit_code()
        }
    }
}
