//! Line-oriented text formats: instances, solutions, reduction traces,
//! witness maps and the two source-problem formats.
//!
//! Instance documents look like
//!
//! ```text
//! rgbp 1
//! mode vertex
//! vertices 3
//! edge 0 1
//! edge 0 2 4
//! edge 1 2
//! forced 0 1
//! habitat 0 1 2
//! budget 6
//! ```
//!
//! `#` starts a comment. Lines starting with `#!` carry machine-readable
//! annotations (witness maps, trace steps) that the instance parser skips.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result};
use crate::model::{EdgeId, Graph, Habitat, Instance, Mode, Status, Vertex};
use crate::preprocess::{Reduction, ReductionTrace};
use crate::reductions::{ChoiceGroup, Construction, GroupKey, HcvcInput, Sat22Input, WitnessMap};
use crate::solver::SolveReport;

pub const FORMAT_VERSION: u32 = 1;

/// Largest vertex count the parsers accept.
pub const MAX_VERTICES: usize = 1 << 24;

/// Meaningful lines: 1-based line number and tokens, comments stripped.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn annotations<'a>(text: &'a str, tag: &str) -> impl Iterator<Item = (usize, Vec<String>)> + 'a {
    let tag = tag.to_string();
    text.lines().enumerate().filter_map(move |(i, line)| {
        let rest = line.trim_start().strip_prefix("#!")?;
        let mut tokens = rest.split_whitespace();
        (tokens.next() == Some(tag.as_str())).then(|| (i + 1, tokens.map(str::to_string).collect()))
    })
}

fn number<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T, ParseError> {
    if token.starts_with('-') {
        return Err(ParseError::new(line, format!("{what} must not be negative, got `{token}`")));
    }
    token.parse().map_err(|_| ParseError::new(line, format!("expected {what}, got `{token}`")))
}

fn arity(line: usize, tokens: &[&str], min: usize, max: usize) -> Result<(), ParseError> {
    let args = tokens.len() - 1;
    if args < min || args > max {
        let expected = if min == max { format!("{min}") } else { format!("{min} to {max}") };
        return Err(ParseError::new(line, format!("`{}` takes {expected} arguments, got {args}", tokens[0])));
    }
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut it = lines(text);
    match it.next() {
        Some((l, t)) if t[0] == "rgbp" => {
            arity(l, &t, 1, 1)?;
            let v: u32 = number(l, t[1], "format version")?;
            if v != FORMAT_VERSION {
                return Err(ParseError::new(l, format!("unsupported format version {v}")));
            }
        }
        Some((l, _)) => return Err(ParseError::new(l, "document must start with `rgbp 1`")),
        None => return Err(ParseError::new(1, "empty document")),
    }
    let mut mode = None;
    let mut vertices: Option<usize> = None;
    let mut budget = None;
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut costs: Vec<u64> = Vec::new();
    let mut seen = std::collections::HashMap::new();
    let mut forced = Vec::new();
    let mut habitats = Vec::new();
    let mut last = 1;
    for (l, t) in it {
        last = l;
        let vertex = |tok: &str| -> Result<Vertex, ParseError> {
            let n = vertices.ok_or_else(|| ParseError::new(l, "`vertices` must precede edges and habitats"))?;
            let v: Vertex = number(l, tok, "vertex")?;
            if v >= n {
                return Err(ParseError::new(l, format!("vertex {v} out of range (0..{n})")));
            }
            Ok(v)
        };
        let once = |slot: bool| if slot { Err(ParseError::new(l, format!("duplicate `{}` line", t[0]))) } else { Ok(()) };
        match t[0] {
            "mode" => {
                arity(l, &t, 1, 1)?;
                once(mode.is_some())?;
                mode = Some(Mode::from_keyword(t[1]).ok_or_else(|| ParseError::new(l, format!("unknown mode `{}`", t[1])))?);
            }
            "vertices" => {
                arity(l, &t, 1, 1)?;
                once(vertices.is_some())?;
                let n: usize = number(l, t[1], "vertex count")?;
                if n > MAX_VERTICES {
                    return Err(ParseError::new(l, format!("vertex count {n} exceeds {MAX_VERTICES}")));
                }
                vertices = Some(n);
            }
            "edge" => {
                arity(l, &t, 2, 3)?;
                let (u, v) = (vertex(t[1])?, vertex(t[2])?);
                if u == v {
                    return Err(ParseError::new(l, format!("self-loop at vertex {u}")));
                }
                let key = (u.min(v), u.max(v));
                if seen.insert(key, edges.len()).is_some() {
                    return Err(ParseError::new(l, format!("duplicate edge {u} {v}")));
                }
                edges.push(key);
                costs.push(if t.len() == 4 { number(l, t[3], "edge cost")? } else { 1 });
            }
            "forced" => {
                arity(l, &t, 2, 2)?;
                let (u, v) = (vertex(t[1])?, vertex(t[2])?);
                let id = seen
                    .get(&(u.min(v), u.max(v)))
                    .ok_or_else(|| ParseError::new(l, format!("forced edge {u} {v} is not declared")))?;
                forced.push(EdgeId(*id));
            }
            "habitat" => {
                arity(l, &t, 1, usize::MAX)?;
                let vs = t[1..].iter().map(|tok| vertex(tok)).collect::<Result<Vec<_>, _>>()?;
                habitats.push(Habitat::new(vs).map_err(|e| ParseError::new(l, e.to_string()))?);
            }
            "budget" => {
                arity(l, &t, 1, 1)?;
                once(budget.is_some())?;
                budget = Some(number(l, t[1], "budget")?);
            }
            other => return Err(ParseError::new(l, format!("unknown directive `{other}`"))),
        }
    }
    let n = vertices.ok_or_else(|| ParseError::new(last, "missing `vertices` line"))?;
    let budget = budget.ok_or_else(|| ParseError::new(last, "missing `budget` line"))?;
    let graph = Graph::new(n, edges).map_err(|e| ParseError::new(last, e.to_string()))?;
    Instance::new(graph, costs, forced, habitats, budget, mode.unwrap_or_default())
        .map_err(|e| ParseError::new(last, e.to_string()))
}

/// Canonical text: edges sorted by endpoints, habitats sorted, costs written
/// only when they differ from 1.
pub fn serialize_instance(instance: &Instance) -> String {
    let (inst, _) = instance.canonical();
    let mut out = String::new();
    let _ = writeln!(out, "rgbp {FORMAT_VERSION}");
    let _ = writeln!(out, "mode {}", inst.mode().keyword());
    let _ = writeln!(out, "vertices {}", inst.graph().vertex_count());
    for (e, (u, v)) in inst.graph().edges() {
        match inst.cost(e) {
            1 => writeln!(out, "edge {u} {v}"),
            c => writeln!(out, "edge {u} {v} {c}"),
        }
        .expect("writing to a string");
    }
    for e in inst.forced_edges() {
        let (u, v) = inst.graph().endpoints(e);
        let _ = writeln!(out, "forced {u} {v}");
    }
    for h in inst.habitats() {
        let vs: Vec<String> = h.vertices().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "habitat {}", vs.join(" "));
    }
    let _ = writeln!(out, "budget {}", inst.budget());
    out
}

/// A parsed solution document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionDocument {
    pub status: Status,
    pub cost: u64,
    pub answer: Option<bool>,
    pub selected: Vec<(Vertex, Vertex)>,
    pub components: Vec<(usize, u64)>,
}

impl SolutionDocument {
    /// Selected edges as ids of `instance`.
    pub fn edge_set(&self, instance: &Instance) -> Result<BTreeSet<EdgeId>> {
        self.selected
            .iter()
            .map(|&(u, v)| {
                let ok = u < instance.graph().vertex_count() && v < instance.graph().vertex_count();
                ok.then(|| instance.graph().edge_between(u, v))
                    .flatten()
                    .ok_or_else(|| Error::Input(format!("selected edge {u} {v} is not in the instance")))
            })
            .collect()
    }
}

pub fn serialize_solution(instance: &Instance, report: &SolveReport) -> String {
    let s = &report.solution;
    let mut out = String::new();
    let _ = writeln!(out, "status {}", s.status.keyword());
    let _ = writeln!(out, "cost {}", s.cost);
    let _ = writeln!(out, "answer {}", if report.answer { "yes" } else { "no" });
    for &e in &s.selected {
        let (u, v) = instance.graph().endpoints(e);
        let _ = writeln!(out, "selected {u} {v}");
    }
    for (i, c) in report.components.iter().enumerate() {
        let _ = writeln!(out, "component {i} cost {}", c.cost);
    }
    out
}

pub fn parse_solution(text: &str) -> Result<SolutionDocument, ParseError> {
    let mut status = None;
    let mut cost = None;
    let mut answer = None;
    let mut selected = Vec::new();
    let mut components = Vec::new();
    let mut last = 1;
    for (l, t) in lines(text) {
        last = l;
        match t[0] {
            "status" => {
                arity(l, &t, 1, 1)?;
                status = Some(
                    Status::from_keyword(t[1]).ok_or_else(|| ParseError::new(l, format!("unknown status `{}`", t[1])))?,
                );
            }
            "cost" => {
                arity(l, &t, 1, 1)?;
                cost = Some(number(l, t[1], "cost")?);
            }
            "answer" => {
                arity(l, &t, 1, 1)?;
                answer = Some(match t[1] {
                    "yes" => true,
                    "no" => false,
                    other => return Err(ParseError::new(l, format!("answer must be yes or no, got `{other}`"))),
                });
            }
            "selected" => {
                arity(l, &t, 2, 2)?;
                selected.push((number(l, t[1], "vertex")?, number(l, t[2], "vertex")?));
            }
            "component" => {
                if t.len() != 4 || t[2] != "cost" {
                    return Err(ParseError::new(l, "expected `component <i> cost <c>`"));
                }
                components.push((number(l, t[1], "component index")?, number(l, t[3], "cost")?));
            }
            other => return Err(ParseError::new(l, format!("unknown directive `{other}`"))),
        }
    }
    Ok(SolutionDocument {
        status: status.unwrap_or(Status::Feasible),
        cost: cost.ok_or_else(|| ParseError::new(last, "missing `cost` line"))?,
        answer,
        selected,
        components,
    })
}

/// Reduced instance followed by its trace as `#! step` annotations.
pub fn serialize_reduction(reduction: &Reduction) -> String {
    let mut out = serialize_instance(&reduction.instance);
    for step in &reduction.trace.steps {
        let _ = writeln!(out, "#! step {step}");
    }
    out
}

/// Trace steps annotated in a reduction document.
pub fn parse_trace(text: &str) -> Result<ReductionTrace, ParseError> {
    let mut steps = Vec::new();
    for (l, tokens) in annotations(text, "step") {
        steps.push(tokens.join(" ").parse().map_err(|m: String| ParseError::new(l, m))?);
    }
    Ok(ReductionTrace { steps })
}

/// Witness map as `#!` annotation lines; edge ids refer to the canonical
/// serialization of the generated instance.
pub fn serialize_witness_map(map: &WitnessMap) -> String {
    let ids = |es: &[EdgeId]| es.iter().map(|e| e.0.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "#! witness {} {}", map.construction, map.mode.keyword());
    let _ = writeln!(out, "#! always {}", ids(&map.always));
    for g in &map.groups {
        let _ = writeln!(out, "#! group {} : {}", g.key, ids(&g.edges));
    }
    for c in map.clauses.iter().flatten() {
        let _ = writeln!(out, "#! clause {} {} {}", c[0], c[1], c[2]);
    }
    out
}

pub fn parse_witness_map(text: &str) -> Result<WitnessMap, ParseError> {
    let ids = |l: usize, toks: &[String]| -> Result<Vec<EdgeId>, ParseError> {
        toks.iter().map(|t| number(l, t, "edge id").map(EdgeId)).collect()
    };
    let (l, head) =
        annotations(text, "witness").next().ok_or_else(|| ParseError::new(1, "missing `#! witness` line"))?;
    if head.len() != 2 {
        return Err(ParseError::new(l, "expected `#! witness <construction> <mode>`"));
    }
    let construction = Construction::from_keyword(&head[0])
        .ok_or_else(|| ParseError::new(l, format!("unknown construction `{}`", head[0])))?;
    let mode = Mode::from_keyword(&head[1]).ok_or_else(|| ParseError::new(l, format!("unknown mode `{}`", head[1])))?;
    let mut always = Vec::new();
    for (l, toks) in annotations(text, "always") {
        always.extend(ids(l, &toks)?);
    }
    let mut groups = Vec::new();
    for (l, toks) in annotations(text, "group") {
        let split = toks.iter().position(|t| t == ":").ok_or_else(|| ParseError::new(l, "group line needs `:`"))?;
        let key: GroupKey = toks[..split].join(" ").parse().map_err(|m: String| ParseError::new(l, m))?;
        groups.push(ChoiceGroup { key, edges: ids(l, &toks[split + 1..])? });
    }
    let mut clauses = Vec::new();
    for (l, toks) in annotations(text, "clause") {
        let lits: Vec<i32> =
            toks.iter().map(|t| t.parse().map_err(|_| ParseError::new(l, format!("bad literal `{t}`")))).collect::<Result<_, _>>()?;
        let clause: [i32; 3] = lits.try_into().map_err(|_| ParseError::new(l, "clause needs three literals"))?;
        clauses.push(clause);
    }
    Ok(WitnessMap { construction, mode, always, groups, clauses: (!clauses.is_empty()).then_some(clauses) })
}

/// Cubic graph file: vertex count, `u v` edge lines, an optional
/// `c v1 .. vn` Hamiltonian cycle and a `p <int>` cover bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicGraphFile {
    pub graph: Graph,
    pub cycle: Option<Vec<Vertex>>,
    pub p: usize,
}

impl CubicGraphFile {
    pub fn hcvc(&self) -> Result<HcvcInput> {
        let cycle = self.cycle.clone().ok_or_else(|| Error::Input("graph file has no `c` cycle line".into()))?;
        HcvcInput::new(self.graph.clone(), cycle, self.p)
    }
}

pub fn parse_cubic_graph(text: &str) -> Result<CubicGraphFile, ParseError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut cycle = None;
    let mut p = None;
    let mut last = 1;
    for (l, t) in lines(text) {
        last = l;
        match (n, t[0]) {
            (None, tok) => {
                arity(l, &t, 0, 0)?;
                let count: usize = number(l, tok, "vertex count")?;
                if count > MAX_VERTICES {
                    return Err(ParseError::new(l, format!("vertex count {count} exceeds {MAX_VERTICES}")));
                }
                n = Some(count);
            }
            (Some(n), "c") => {
                if cycle.is_some() {
                    return Err(ParseError::new(l, "duplicate cycle line"));
                }
                let vs = t[1..].iter().map(|tok| number(l, tok, "vertex")).collect::<Result<Vec<Vertex>, _>>()?;
                if let Some(&v) = vs.iter().find(|&&v| v >= n) {
                    return Err(ParseError::new(l, format!("vertex {v} out of range (0..{n})")));
                }
                cycle = Some(vs);
            }
            (Some(_), "p") => {
                arity(l, &t, 1, 1)?;
                p = Some(number(l, t[1], "cover bound")?);
            }
            (Some(n), _) => {
                if t.len() != 2 {
                    return Err(ParseError::new(l, "expected an edge line `u v`"));
                }
                let (u, v): (Vertex, Vertex) = (number(l, t[0], "vertex")?, number(l, t[1], "vertex")?);
                if u >= n || v >= n {
                    return Err(ParseError::new(l, format!("edge {u} {v} out of range (0..{n})")));
                }
                edges.push((u, v));
            }
        }
    }
    let n = n.ok_or_else(|| ParseError::new(last, "missing vertex count"))?;
    let p = p.ok_or_else(|| ParseError::new(last, "missing `p` line"))?;
    let graph = Graph::new(n, edges).map_err(|e| ParseError::new(last, e.to_string()))?;
    Ok(CubicGraphFile { graph, cycle, p })
}

pub fn serialize_cubic_graph(input: &HcvcInput) -> String {
    let mut out = format!("{}\n", input.graph().vertex_count());
    for (_, (u, v)) in input.graph().edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    let cycle: Vec<String> = input.cycle().iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "c {}", cycle.join(" "));
    let _ = writeln!(out, "p {}", input.p());
    out
}

/// DIMACS CNF; the (2,2) balance and clause width are checked, not trusted.
pub fn parse_dimacs(text: &str) -> Result<Sat22Input> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last = 1;
    for (i, line) in text.lines().enumerate() {
        let l = i + 1;
        last = l;
        let t: Vec<&str> = line.split_whitespace().collect();
        match t.first().copied() {
            None | Some("c") | Some("%") => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(ParseError::new(l, "duplicate problem line").into());
                }
                if t.len() != 4 || t[1] != "cnf" {
                    return Err(ParseError::new(l, "expected `p cnf <variables> <clauses>`").into());
                }
                let vars: usize = number(l, t[2], "variable count")?;
                if vars > MAX_VERTICES {
                    return Err(ParseError::new(l, format!("variable count {vars} exceeds {MAX_VERTICES}")).into());
                }
                header = Some((vars, number(l, t[3], "clause count")?));
            }
            Some(_) => {
                let (vars, _) = header.ok_or_else(|| ParseError::new(l, "clause before problem line"))?;
                for tok in t {
                    let lit: i32 = tok.parse().map_err(|_| ParseError::new(l, format!("bad literal `{tok}`")))?;
                    if lit == 0 {
                        let clause: [i32; 3] = std::mem::take(&mut current).try_into().map_err(|c: Vec<i32>| {
                            ParseError::new(l, format!("clause has {} literals, expected 3", c.len()))
                        })?;
                        clauses.push(clause);
                    } else if lit.unsigned_abs() as usize > vars {
                        return Err(ParseError::new(l, format!("literal {lit} exceeds {vars} variables")).into());
                    } else {
                        current.push(lit);
                    }
                }
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| ParseError::new(last, "missing problem line"))?;
    if !current.is_empty() {
        return Err(ParseError::new(last, "last clause is not terminated by 0").into());
    }
    if clauses.len() != count {
        return Err(ParseError::new(last, format!("header declares {count} clauses, found {}", clauses.len())).into());
    }
    Sat22Input::new(vars, clauses)
}

pub fn serialize_dimacs(input: &Sat22Input) -> String {
    let mut out = String::from("c balanced: every variable twice positive, twice negative\n");
    let _ = writeln!(out, "p cnf {} {}", input.num_variables(), input.clauses().len());
    for c in input.clauses() {
        let _ = writeln!(out, "{} {} {} 0", c[0], c[1], c[2]);
    }
    out
}
