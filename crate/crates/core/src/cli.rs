//! Command-line interface: argument parsing, input loading and JSON output.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 the dichotomy's other
//! branch, 3 verification failure, 4 budget refusal.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::budget::{BudgetExceeded, OracleBudget};
use crate::constructions::{lower_bound_graph, ConstructionError};
use crate::decomp::{verify_focused, verify_layered, AnyCertificate, Certificate};
use crate::ep::{rooted_tree_ep, EpError};
use crate::fuzz::{self, Profile};
use crate::graph::{generate, Graph, Vertex, VertexSet};
use crate::layered::{layered_pw, layered_td, ApexPattern, LayeredError};
use crate::minors::{verify_model, MinorModel, Rooting};
use crate::oracles::{exact_width, exact_width_pair, naive_width_pair, WidthKind};
use crate::spw::{decide_spw, SpwError};
use crate::tangles::{build_tree_decomposition, find_tangle, is_tangle, tangle_number, Tangle, TangleError, TreeBuild};
use crate::td::{decide_std, TdError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_OTHER_BRANCH: u8 = 2;
pub const EXIT_VERIFY: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "focuswidth", version, about = "Focused width parameters with certifying algorithms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a generated graph, e.g. `gen grid 3 3` or `gen random 10 0.3 --seed 7`.
    Gen {
        /// path, cycle, clique, star, fan, grid, ternary, lower-bound, random or tree
        family: String,
        params: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Focused path decomposition of width ≤ 2|V(F)|−2 or an S-rooted model of the forest F.
    DecideSpw {
        /// Graph file, or `-` for stdin
        graph: String,
        /// Comma-separated vertices or `all`
        #[arg(long)]
        roots: String,
        /// Forest pattern, e.g. `path:3`, or a graph file
        #[arg(long)]
        pattern: String,
    },
    /// Focused elimination forest of height ≤ C(ℓ,2) or an S-rooted model of P_ℓ.
    DecideStd {
        graph: String,
        #[arg(long)]
        roots: String,
        #[arg(short = 'l')]
        l: usize,
    },
    /// Layered path decomposition of width ≤ 2|V(X)|−3 for an apex-forest X.
    LayeredPw {
        graph: String,
        #[arg(long)]
        pattern: String,
    },
    /// Layered elimination forest of width ≤ C(|V(X)|−1, 2) for a fan X.
    LayeredTd {
        graph: String,
        #[arg(long)]
        pattern: String,
    },
    /// Tangle number of (G, S), or a tangle of the given order.
    Tangle {
        graph: String,
        #[arg(long)]
        roots: String,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Tree decomposition of width ≤ 10k−12 with a bag containing R, or a tangle of order k.
    BuildTdFromNoTangle {
        graph: String,
        #[arg(long)]
        roots: String,
        #[arg(short = 'k')]
        k: usize,
        /// Vertices that must share a bag (default: none)
        #[arg(long = "r-set")]
        r_set: Option<String>,
    },
    /// k disjoint S-rooted models of a tree, or a small set meeting all of them.
    Ep {
        graph: String,
        #[arg(long)]
        roots: String,
        #[arg(long)]
        pattern: String,
        #[arg(short = 'k')]
        k: usize,
    },
    /// Re-check a certificate, model or tangle emitted by another command.
    Verify {
        graph: String,
        /// JSON document, or `-` for stdin
        certificate: String,
        /// Overrides the `roots` recorded in the document
        #[arg(long)]
        roots: Option<String>,
        /// Overrides the `pattern` recorded in the document
        #[arg(long)]
        pattern: Option<String>,
    },
    /// Exact width by brute force.
    Oracle {
        graph: String,
        #[arg(long, value_enum)]
        kind: WidthKind,
        /// Focus set; omitted means the classical parameter
        #[arg(long)]
        roots: Option<String>,
        /// Use the certificate-enumerating oracle (at most 5 vertices)
        #[arg(long)]
        naive: bool,
    },
    /// Check module invariants on seeded random instances.
    Fuzz {
        #[arg(value_enum)]
        profile: Profile,
        count: u64,
        seed: u64,
        /// Index of the first instance
        #[arg(long, default_value_t = 0)]
        start: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("budget refusal: {0}")]
    Budget(String),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Verify(_) => EXIT_VERIFY,
        }
    }
}

impl From<BudgetExceeded> for CliError {
    fn from(e: BudgetExceeded) -> Self {
        CliError::Budget(e.to_string())
    }
}

impl From<SpwError> for CliError {
    fn from(e: SpwError) -> Self {
        match e {
            SpwError::Internal(_) => CliError::Verify(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<TdError> for CliError {
    fn from(e: TdError) -> Self {
        match e {
            TdError::Internal(_) => CliError::Verify(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<LayeredError> for CliError {
    fn from(e: LayeredError) -> Self {
        match e {
            LayeredError::Spw(e) => e.into(),
            LayeredError::Td(e) => e.into(),
            LayeredError::Verify(_) | LayeredError::Model(_) => CliError::Verify(e.to_string()),
            LayeredError::InvalidPattern(_) | LayeredError::Graph(_) => CliError::Input(e.to_string()),
        }
    }
}

impl From<TangleError> for CliError {
    fn from(e: TangleError) -> Self {
        match e {
            TangleError::Budget(b) => b.into(),
            TangleError::Verify(_) | TangleError::Internal(_) => CliError::Verify(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EpError> for CliError {
    fn from(e: EpError) -> Self {
        match e {
            EpError::Budget(b) => b.into(),
            EpError::Spw(s) => s.into(),
            EpError::Verify(_) | EpError::Internal(_) => CliError::Verify(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::Budget(b) => b.into(),
            ConstructionError::Verify(_) => CliError::Verify(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// A JSON document for stdout and the exit code to report.
struct Reply {
    json: Value,
    code: u8,
}

impl Reply {
    fn ok(json: Value) -> Self {
        Reply { json, code: EXIT_OK }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// Adds `extra` to the JSON object `base`.
fn with_fields(base: Value, extra: Value) -> Value {
    let mut map: Map<String, Value> = match base {
        Value::Object(m) => m,
        other => Map::from_iter([("value".to_string(), other)]),
    };
    if let Value::Object(e) = extra {
        map.extend(e);
    }
    Value::Object(map)
}

/// Runs one command. JSON goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut input = Input { stdin, cached: None };
    match execute(cli.command, &mut input) {
        Ok(reply) => {
            let _ = writeln!(out, "{}", reply.json);
            reply.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

/// Source of file contents; `-` reads stdin once.
struct Input<'a> {
    stdin: &'a mut dyn Read,
    cached: Option<String>,
}

impl Input<'_> {
    fn read(&mut self, path: &str) -> Result<String, CliError> {
        if path == "-" {
            if self.cached.is_none() {
                let mut s = String::new();
                self.stdin.read_to_string(&mut s).map_err(|e| CliError::Input(format!("stdin: {e}")))?;
                self.cached = Some(s);
            }
            return Ok(self.cached.clone().expect("cached"));
        }
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))
    }

    fn graph(&mut self, path: &str) -> Result<Graph, CliError> {
        parse_graph(&self.read(path)?)
    }
}

/// Accepts the text format or the JSON form `{"vertices": [...], "edges": [...]}`.
pub fn parse_graph(text: &str) -> Result<Graph, CliError> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("graph JSON: {e}")))
    } else {
        Graph::parse(text).map_err(|e| CliError::Input(format!("graph: {e}")))
    }
}

/// `all` for every vertex, otherwise a comma-separated list (possibly empty).
pub fn parse_roots(spec: &str, g: &Graph) -> Result<VertexSet, CliError> {
    let spec = spec.trim();
    if spec == "all" {
        return Ok(g.vertex_set());
    }
    let mut s = VertexSet::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let v: Vertex = part.parse().map_err(|_| CliError::Input(format!("bad vertex `{part}`")))?;
        if !g.contains(v) {
            return Err(CliError::Input(format!("vertex {v} is not in the graph")));
        }
        s.insert(v);
    }
    Ok(s)
}

fn number<T: std::str::FromStr>(params: &[&str], i: usize, family: &str) -> Result<T, CliError> {
    params
        .get(i)
        .ok_or_else(|| CliError::Input(format!("{family} needs {} parameter(s)", i + 1)))?
        .parse()
        .map_err(|_| CliError::Input(format!("bad parameter `{}` for {family}", params[i])))
}

/// Named graph families shared by `gen` and `--pattern`.
pub fn family_graph(family: &str, params: &[&str], seed: u64) -> Result<Graph, CliError> {
    let arity = match family {
        "path" | "cycle" | "clique" | "star" | "fan" | "ternary" | "tree" => 1,
        "grid" | "lower-bound" | "random" => 2,
        _ => return Err(CliError::Input(format!("unknown graph family `{family}`"))),
    };
    if params.len() != arity {
        return Err(CliError::Input(format!("{family} takes {arity} parameter(s), got {}", params.len())));
    }
    let n = |i| number::<u32>(params, i, family);
    Ok(match family {
        "path" => generate::path(n(0)?),
        "cycle" => generate::cycle(n(0)?),
        "clique" => generate::clique(n(0)?),
        "star" => generate::star(n(0)?),
        "fan" => generate::fan(n(0)?),
        "ternary" => generate::complete_ternary(n(0)?),
        "grid" => generate::grid(n(0)?, n(1)?),
        "lower-bound" => lower_bound_graph(n(0)? as usize, n(1)? as usize)?.graph,
        "random" => {
            let p: f64 = number(params, 1, family)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Input(format!("edge probability {p} is not in [0, 1]")));
            }
            fuzz::random_graph(&mut fuzz::rng_for(seed, 0), n(0)?, p)
        }
        "tree" => fuzz::random_tree(&mut fuzz::rng_for(seed, 0), n(0)?),
        _ => unreachable!("family checked above"),
    })
}

/// `family:p1xp2` (e.g. `fan:5`, `grid:2x3`) or a graph file.
fn pattern(input: &mut Input<'_>, spec: &str) -> Result<Graph, CliError> {
    match spec.split_once(':') {
        Some((family, params)) => {
            let params: Vec<&str> = params.split(['x', ',']).collect();
            family_graph(family, &params, 0)
        }
        None => input.graph(spec),
    }
}

fn execute(command: Command, input: &mut Input<'_>) -> Result<Reply, CliError> {
    let budget = OracleBudget::default();
    match command {
        Command::Gen { family, params, seed } => {
            let params: Vec<&str> = params.iter().map(String::as_str).collect();
            Ok(Reply::ok(to_value(&family_graph(&family, &params, seed)?)))
        }
        Command::DecideSpw { graph, roots, pattern: p } => {
            let g = input.graph(&graph)?;
            let s = parse_roots(&roots, &g)?;
            let f = pattern(input, &p)?;
            let outcome = decide_spw(&g, &s, &f)?;
            Ok(Reply::ok(with_fields(to_value(&outcome.to_json()), json!({ "roots": s, "pattern": f }))))
        }
        Command::DecideStd { graph, roots, l } => {
            let g = input.graph(&graph)?;
            let s = parse_roots(&roots, &g)?;
            let outcome = decide_std(&g, &s, l)?;
            let p = generate::path(l as u32);
            Ok(Reply::ok(with_fields(to_value(&outcome.to_json()), json!({ "roots": s, "pattern": p }))))
        }
        Command::LayeredPw { graph, pattern: p } => layered(input, &graph, &p, false),
        Command::LayeredTd { graph, pattern: p } => layered(input, &graph, &p, true),
        Command::Tangle { graph, roots, order } => {
            let g = input.graph(&graph)?;
            let s = parse_roots(&roots, &g)?;
            match order {
                Some(k) => {
                    let t = find_tangle(&g, &s, k, &budget)?;
                    Ok(Reply::ok(json!({ "order": k, "roots": s, "tangle": t })))
                }
                None => {
                    let (tn, t) = tangle_number(&g, &s, &budget)?;
                    Ok(Reply::ok(json!({ "tangle_number": tn, "roots": s, "tangle": t })))
                }
            }
        }
        Command::BuildTdFromNoTangle { graph, roots, k, r_set } => {
            let g = input.graph(&graph)?;
            let s = parse_roots(&roots, &g)?;
            let r = parse_roots(r_set.as_deref().unwrap_or(""), &g)?;
            match build_tree_decomposition(&g, &s, k, &r, &budget)? {
                TreeBuild::Decomposition(c) => Ok(Reply::ok(json!({
                    "outcome": "decomposition",
                    "value": c.value(),
                    "certificate": Certificate::from(&c),
                    "roots": s,
                }))),
                TreeBuild::Tangle(t) => Ok(Reply { json: json!({ "outcome": "tangle", "tangle": t, "roots": s }), code: EXIT_OTHER_BRANCH }),
            }
        }
        Command::Ep { graph, roots, pattern: p, k } => {
            let g = input.graph(&graph)?;
            let s = parse_roots(&roots, &g)?;
            let t = pattern(input, &p)?;
            let outcome = rooted_tree_ep(&g, &s, &t, k, &budget)?;
            Ok(Reply::ok(with_fields(to_value(&outcome), json!({ "roots": s, "pattern": t, "k": k }))))
        }
        Command::Verify { graph, certificate, roots, pattern: p } => {
            let g = input.graph(&graph)?;
            let doc: Value = serde_json::from_str(&input.read(&certificate)?).map_err(|e| CliError::Input(format!("certificate JSON: {e}")))?;
            let s = match (&roots, doc.get("roots")) {
                (Some(spec), _) => Some(parse_roots(spec, &g)?),
                (None, Some(v)) => Some(serde_json::from_value(v.clone()).map_err(|e| CliError::Input(format!("roots: {e}")))?),
                (None, None) => None,
            };
            let pat = match (&p, doc.get("pattern")) {
                (Some(spec), _) => Some(pattern(input, spec)?),
                (None, Some(v)) => Some(serde_json::from_value(v.clone()).map_err(|e| CliError::Input(format!("pattern: {e}")))?),
                (None, None) => None,
            };
            Ok(match verify_document(&g, &doc, s.as_ref(), pat.as_ref(), &budget)? {
                Ok(value) => Reply::ok(json!({ "valid": true, "value": value })),
                Err(violation) => Reply { json: json!({ "valid": false, "violation": violation }), code: EXIT_VERIFY },
            })
        }
        Command::Oracle { graph, kind, roots, naive } => {
            let g = input.graph(&graph)?;
            let s = roots.as_deref().map(|r| parse_roots(r, &g)).transpose()?;
            let value = match (&s, naive) {
                (Some(s), true) => naive_width_pair(&g, s, kind)?,
                (None, true) => naive_width_pair(&g, &g.vertex_set(), kind)?,
                (Some(s), false) => exact_width_pair(&g, s, kind, &budget)?,
                (None, false) => exact_width(&g, kind, &budget)?,
            };
            Ok(Reply::ok(json!({ "kind": kind, "roots": s, "value": value })))
        }
        Command::Fuzz { profile, count, seed, start } => {
            let report = fuzz::run(profile, count, seed, start, &budget);
            let code = if report.failed == 0 { EXIT_OK } else { EXIT_VERIFY };
            Ok(Reply { json: to_value(&report), code })
        }
    }
}

fn layered(input: &mut Input<'_>, graph: &str, p: &str, td: bool) -> Result<Reply, CliError> {
    let g = input.graph(graph)?;
    let x = ApexPattern::detect(pattern(input, p)?)?;
    let result = if td { layered_td(&g, &x) } else { layered_pw(&g, &x) };
    match result {
        Ok(cert) => Ok(Reply::ok(json!({
            "outcome": "decomposition",
            "value": cert.width(),
            "certificate": Certificate::from(&cert),
            "pattern": x.graph,
        }))),
        Err(LayeredError::Model(m)) => Ok(Reply { json: json!({ "outcome": "model", "model": m, "pattern": x.graph }), code: EXIT_OTHER_BRANCH }),
        Err(e) => Err(e.into()),
    }
}

/// Checks a document produced by another command. The outer `Result` carries
/// input problems, the inner one the verdict.
fn verify_document(g: &Graph, doc: &Value, s: Option<&VertexSet>, pat: Option<&Graph>, budget: &OracleBudget) -> Result<Result<i64, String>, CliError> {
    let field = |name: &str| doc.get(name).filter(|v| !v.is_null()).cloned();
    if let Some(c) = field("certificate").or_else(|| doc.get("kind").map(|_| doc.clone())) {
        let cert: Certificate = serde_json::from_value(c).map_err(|e| CliError::Input(format!("certificate: {e}")))?;
        return Ok(match AnyCertificate::from(cert) {
            AnyCertificate::Focused(c) => {
                let s = s.ok_or_else(|| CliError::Input("focused certificates need --roots".into()))?;
                verify_focused(g, s, &c).map_err(|e| format!("{e} ({e:?})"))
            }
            AnyCertificate::Layered(c) => verify_layered(g, &c).map(|w| w as i64).map_err(|e| format!("{e} ({e:?})")),
        });
    }
    if let Some(m) = field("model") {
        let m: MinorModel = serde_json::from_value(m).map_err(|e| CliError::Input(format!("model: {e}")))?;
        let h = pat.ok_or_else(|| CliError::Input("models need --pattern".into()))?;
        let rooting = s.map_or(Rooting::None, |s| Rooting::Rooted(s.clone()));
        return Ok(verify_model(g, h, &m, &rooting).map(|()| h.n() as i64).map_err(|e| format!("{e} ({e:?})")));
    }
    if let Some(t) = field("tangle") {
        let t: Tangle = serde_json::from_value(t).map_err(|e| CliError::Input(format!("tangle: {e}")))?;
        let empty = VertexSet::new();
        return Ok(is_tangle(g, s.unwrap_or(&empty), &t, budget)?.map(|()| t.order as i64).map_err(|e| format!("{e} ({e:?})")));
    }
    Err(CliError::Input("document has no certificate, model or tangle".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], stdin: &str) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("focuswidth").chain(args.iter().copied());
        let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn gen_grid() {
        let (code, out, _) = call(&["gen", "grid", "3", "3"], "");
        assert_eq!(code, EXIT_OK);
        let g = parse_graph(&out).unwrap();
        assert_eq!((g.n(), g.m()), (9, 12));
    }

    #[test]
    fn decide_std_on_k5_finds_model() {
        let k5 = generate::clique(5).to_text();
        let (code, out, _) = call(&["decide-std", "-", "--roots", "all", "-l", "3"], &k5);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["outcome"], "model");
    }

    #[test]
    fn unknown_flag_and_bad_roots_rejected() {
        let p = generate::path(3).to_text();
        assert_eq!(call(&["decide-std", "-", "--roots", "all", "-l", "3", "--bogus"], &p).0, EXIT_INPUT);
        assert_eq!(call(&["decide-std", "-", "--roots", "7", "-l", "3"], &p).0, EXIT_INPUT);
        assert_eq!(call(&["gen", "blob", "3"], "").0, EXIT_INPUT);
    }

    #[test]
    fn oracle_budget_refusal() {
        let g = generate::grid(5, 5).to_text();
        let (code, out, err) = call(&["oracle", "-", "--kind", "pw"], &g);
        assert_eq!(code, EXIT_BUDGET);
        assert!(out.is_empty() && err.contains("budget"));
    }

    #[test]
    fn layered_model_is_other_branch() {
        let k5 = generate::clique(5).to_text();
        let (code, out, _) = call(&["layered-pw", "-", "--pattern", "clique:3"], &k5);
        assert_eq!(code, EXIT_OTHER_BRANCH);
        assert!(out.contains("\"outcome\":\"model\""));
    }
}
