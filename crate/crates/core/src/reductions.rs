//! Instance generators for the five hardness constructions, validated
//! source-problem inputs, brute-force oracles and witness translation.
//!
//! Numbering is gadget-major: all vertex gadgets first (in cycle order for
//! the HCVC-based constructions), then the pair gadgets in tuple order.
//! Tuple order is the Hamiltonian pairs `(i, i+1)` and `(n, 1)` first, then
//! the remaining (chord) pairs lexicographically. Every generator returns a
//! canonical instance (see [`Instance::canonical`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{EdgeId, Graph, Habitat, Instance, Mode, Vertex};

/// A cubic graph with a Hamiltonian cycle and a cover-size bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HcvcInput {
    graph: Graph,
    cycle: Vec<Vertex>,
    p: usize,
}

fn check_cubic(graph: &Graph) -> Result<()> {
    if graph.vertex_count() == 0 {
        return Err(Error::Input("graph has no vertices".into()));
    }
    if let Some(v) = (0..graph.vertex_count()).find(|&v| graph.degree(v) != 3) {
        return Err(Error::Input(format!("vertex {v} has degree {}, expected 3", graph.degree(v))));
    }
    Ok(())
}

impl HcvcInput {
    pub fn new(graph: Graph, cycle: Vec<Vertex>, p: usize) -> Result<Self> {
        check_cubic(&graph)?;
        let n = graph.vertex_count();
        let distinct: BTreeSet<Vertex> = cycle.iter().copied().collect();
        if cycle.len() != n || distinct.len() != n || distinct.iter().any(|&v| v >= n) {
            return Err(Error::Input("cycle must visit every vertex exactly once".into()));
        }
        for i in 0..n {
            let (a, b) = (cycle[i], cycle[(i + 1) % n]);
            if graph.edge_between(a, b).is_none() {
                return Err(Error::Input(format!("cycle uses {a} {b}, which is not an edge")));
            }
        }
        Ok(HcvcInput { graph, cycle, p })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn cycle(&self) -> &[Vertex] {
        &self.cycle
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn with_p(mut self, p: usize) -> Self {
        self.p = p;
        self
    }
}

/// A (2,2)-3-CNF: every clause has three literals and every variable occurs
/// exactly twice positively and twice negatively. Literals are signed,
/// 1-based variable numbers as in DIMACS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sat22Input {
    num_variables: usize,
    clauses: Vec<[i32; 3]>,
}

impl Sat22Input {
    pub fn new(num_variables: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        let mut pos = vec![0usize; num_variables];
        let mut neg = vec![0usize; num_variables];
        for (j, c) in clauses.iter().enumerate() {
            for &lit in c {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > num_variables {
                    return Err(Error::Input(format!("clause {}: literal {lit} out of range", j + 1)));
                }
                if lit > 0 {
                    pos[var - 1] += 1;
                } else {
                    neg[var - 1] += 1;
                }
            }
        }
        for v in 0..num_variables {
            if pos[v] != 2 || neg[v] != 2 {
                return Err(Error::Input(format!(
                    "variable {} occurs {} times positively and {} times negatively, expected 2 and 2",
                    v + 1,
                    pos[v],
                    neg[v]
                )));
            }
        }
        debug_assert_eq!(3 * clauses.len(), 4 * num_variables);
        Ok(Sat22Input { num_variables, clauses })
    }

    pub fn num_variables(&self) -> usize {
        self.num_variables
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| literal_true(l, assignment)))
    }
}

fn literal_true(lit: i32, assignment: &[bool]) -> bool {
    let value = assignment[lit.unsigned_abs() as usize - 1];
    if lit > 0 {
        value
    } else {
        !value
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Construction {
    H4D7,
    H5D6,
    H6D5,
    H22D3,
    H13D4,
}

impl Construction {
    pub const ALL: [Construction; 5] =
        [Construction::H4D7, Construction::H5D6, Construction::H6D5, Construction::H22D3, Construction::H13D4];

    pub fn keyword(self) -> &'static str {
        match self {
            Construction::H4D7 => "h4d7",
            Construction::H5D6 => "h5d6",
            Construction::H6D5 => "h6d5",
            Construction::H22D3 => "h22d3",
            Construction::H13D4 => "h13d4",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.keyword() == s)
    }

    /// Modes for which the construction is a valid reduction.
    pub fn modes(self) -> &'static [Mode] {
        match self {
            Construction::H5D6 => &[Mode::VertexTwoConnected],
            _ => &[Mode::VertexTwoConnected, Mode::EdgeTwoConnected],
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Source object a choice group encodes. Vertex and variable numbers are
/// those of the source input (0-based); edge keys are oriented as in the
/// tuple set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKey {
    Vertex(usize),
    VertexIn(usize),
    VertexOut(usize),
    Edge(usize, usize),
    Variable(usize),
    Clause(usize),
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupKey::Vertex(i) => write!(f, "vertex {i}"),
            GroupKey::VertexIn(i) => write!(f, "vertex_in {i}"),
            GroupKey::VertexOut(i) => write!(f, "vertex_out {i}"),
            GroupKey::Edge(i, j) => write!(f, "edge {i} {j}"),
            GroupKey::Variable(i) => write!(f, "variable {i}"),
            GroupKey::Clause(j) => write!(f, "clause {j}"),
        }
    }
}

impl std::str::FromStr for GroupKey {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let num = |i: usize| -> std::result::Result<usize, String> {
            parts.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| format!("bad group key `{s}`"))
        };
        let key = match parts.first().copied() {
            Some("vertex") => GroupKey::Vertex(num(1)?),
            Some("vertex_in") => GroupKey::VertexIn(num(1)?),
            Some("vertex_out") => GroupKey::VertexOut(num(1)?),
            Some("edge") => GroupKey::Edge(num(1)?, num(2)?),
            Some("variable") => GroupKey::Variable(num(1)?),
            Some("clause") => GroupKey::Clause(num(1)?),
            _ => return Err(format!("bad group key `{s}`")),
        };
        let arity = if matches!(key, GroupKey::Edge(..)) { 3 } else { 2 };
        if parts.len() != arity {
            return Err(format!("bad group key `{s}`"));
        }
        Ok(key)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceGroup {
    pub key: GroupKey,
    /// edges in the order fixed by the construction
    pub edges: Vec<EdgeId>,
}

/// Edge groups of a generated instance: the edges every solution contains
/// and the per-source-object choice sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessMap {
    pub construction: Construction,
    pub mode: Mode,
    pub always: Vec<EdgeId>,
    pub groups: Vec<ChoiceGroup>,
    /// source clauses, for constructions whose forward witness needs them
    pub clauses: Option<Vec<[i32; 3]>>,
}

impl WitnessMap {
    pub fn group(&self, key: GroupKey) -> Option<&[EdgeId]> {
        self.groups.iter().find(|g| g.key == key).map(|g| g.edges.as_slice())
    }

    pub fn choice_edges(&self) -> BTreeSet<EdgeId> {
        self.groups.iter().flat_map(|g| g.edges.iter().copied()).collect()
    }

    fn remap(&mut self, remap: &[EdgeId]) {
        for e in &mut self.always {
            *e = remap[e.0];
        }
        self.always.sort_unstable();
        for g in &mut self.groups {
            for e in &mut g.edges {
                *e = remap[e.0];
            }
        }
    }
}

/// A solution of the source problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceWitness {
    /// vertex cover, as source vertex ids
    Cover(Vec<Vertex>),
    /// truth value per variable
    Assignment(Vec<bool>),
}

struct Builder {
    vertices: usize,
    edges: BTreeSet<(Vertex, Vertex)>,
    habitats: Vec<Vec<Vertex>>,
    groups: Vec<(GroupKey, Vec<(Vertex, Vertex)>)>,
}

fn pair(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    (a.min(b), a.max(b))
}

impl Builder {
    fn new(vertices: usize) -> Self {
        Builder { vertices, edges: BTreeSet::new(), habitats: Vec::new(), groups: Vec::new() }
    }

    fn edge(&mut self, a: Vertex, b: Vertex) {
        debug_assert!(a != b && a < self.vertices && b < self.vertices);
        self.edges.insert(pair(a, b));
    }

    fn path(&mut self, vs: &[Vertex]) {
        for w in vs.windows(2) {
            self.edge(w[0], w[1]);
        }
    }

    fn clique(&mut self, vs: &[Vertex]) {
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                self.edge(a, b);
            }
        }
    }

    fn habitat(&mut self, vs: &[Vertex]) {
        self.habitats.push(vs.to_vec());
    }

    fn group(&mut self, key: GroupKey, edges: &[(Vertex, Vertex)]) {
        self.groups.push((key, edges.iter().map(|&(a, b)| pair(a, b)).collect()));
    }

    /// Builds the canonical unit-cost instance; `budget` sees the edge count.
    fn finish(
        self,
        construction: Construction,
        mode: Mode,
        budget: impl FnOnce(usize, usize) -> u64,
    ) -> (Instance, WitnessMap) {
        let graph = Graph::new(self.vertices, self.edges.iter().copied()).expect("generated graph is simple");
        let id = |(a, b): (Vertex, Vertex)| graph.edge_between(a, b).expect("group edge exists");
        let groups: Vec<ChoiceGroup> = self
            .groups
            .iter()
            .map(|(key, es)| ChoiceGroup { key: *key, edges: es.iter().map(|&e| id(e)).collect() })
            .collect();
        let chosen: BTreeSet<EdgeId> = groups.iter().flat_map(|g| g.edges.iter().copied()).collect();
        let always: Vec<EdgeId> = graph.edge_ids().filter(|e| !chosen.contains(e)).collect();
        let habitats =
            self.habitats.iter().map(|h| Habitat::new(h.iter().copied()).expect("non-empty habitat")).collect();
        let k = budget(graph.edge_count(), always.len());
        let raw = Instance::unit(graph, habitats, k, mode).expect("generated instance is valid");
        let (inst, remap) = raw.canonical();
        let mut map = WitnessMap { construction, mode, always, groups, clauses: None };
        map.remap(&remap);
        (inst, map)
    }
}

/// Tuple set over cycle positions: Hamiltonian pairs first, then chords.
fn hamiltonian_tuples(input: &HcvcInput) -> (Vec<(usize, usize)>, usize) {
    let n = input.cycle.len();
    let mut pos = vec![0; n];
    for (i, &v) in input.cycle.iter().enumerate() {
        pos[v] = i;
    }
    let mut tuples: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let mut chords: Vec<(usize, usize)> = input
        .graph
        .edges()
        .map(|(_, (a, b))| (pos[a].min(pos[b]), pos[a].max(pos[b])))
        .filter(|&(i, j)| j != i + 1 && !(i == 0 && j == n - 1))
        .collect();
    chords.sort_unstable();
    tuples.extend(chords);
    (tuples, n)
}

/// Vertex gadgets are K4s; pair gadgets attach through two further K4s.
pub fn gen_h4d7(input: &HcvcInput) -> (Instance, WitnessMap) {
    let (tuples, n) = hamiltonian_tuples(input);
    let m = tuples.len();
    let mut b = Builder::new(4 * n + 4 * m);
    let v = |i: usize, s: usize| 4 * i + s - 1;
    let src = |i: usize| input.cycle[i];
    for i in 0..n {
        b.clique(&[v(i, 1), v(i, 2), v(i, 3), v(i, 4)]);
        b.habitat(&[v(i, 1), v(i, 2), v(i, 3), v(i, 4)]);
        b.group(GroupKey::Vertex(src(i)), &[(v(i, 1), v(i, 2)), (v(i, 2), v(i, 4)), (v(i, 3), v(i, 4))]);
    }
    for (x, &(i, j)) in tuples.iter().enumerate() {
        let base = 4 * n + 4 * x;
        let (u, w, c, bb) = (base, base + 1, base + 2, base + 3);
        b.clique(&[u, w, c, bb]);
        b.clique(&[v(i, 3), v(i, 4), u, bb]);
        b.clique(&[v(j, 1), v(j, 2), w, bb]);
        b.habitat(&[u, w, c, bb]);
        b.habitat(&[v(i, 3), u, bb, v(i, 4)]);
        b.habitat(&[v(j, 1), w, bb, v(j, 2)]);
        b.habitat(&[v(i, 1), v(i, 3), u, v(i, 4)]);
        b.habitat(&[v(i, 3), u, c, bb]);
        b.habitat(&[u, c, w]);
        b.habitat(&[v(j, 1), w, c, bb]);
        b.habitat(&[v(j, 1), v(j, 3), w, v(j, 2)]);
        b.group(GroupKey::Edge(src(i), src(j)), &[(v(i, 4), bb), (bb, v(j, 2)), (u, bb), (w, bb)]);
    }
    let p = input.p as u64;
    b.finish(Construction::H4D7, Mode::VertexTwoConnected, |_, always| {
        always as u64 + 2 * m as u64 + n as u64 + p
    })
}

/// Variable wheels and clause gadgets joined by literal triangles.
pub fn gen_h5d6(input: &Sat22Input) -> (Instance, WitnessMap) {
    let big_n = input.num_variables;
    let big_m = input.clauses.len();
    let mut b = Builder::new(7 * big_n + 7 * big_m);
    // v, t, t1, t2, f, f1, f2
    let var = |i: usize, s: usize| 7 * i + s;
    // w, then u_p^q at 1 + 2p + (q - 1)
    let w = |j: usize| 7 * big_n + 7 * j;
    let u = |j: usize, p: usize, q: usize| 7 * big_n + 7 * j + 1 + 2 * p + (q - 1);
    for i in 0..big_n {
        let (v, t, t1, t2, f, f1, f2) = (var(i, 0), var(i, 1), var(i, 2), var(i, 3), var(i, 4), var(i, 5), var(i, 6));
        for z in [t1, t2, f1, f2] {
            b.edge(v, z);
        }
        b.edge(t1, f1);
        b.edge(t2, f2);
        b.path(&[t1, t, t2]);
        b.path(&[f1, f, f2]);
        b.edge(t1, t2);
        b.edge(f1, f2);
        b.habitat(&[v, t1, f1]);
        b.habitat(&[v, t2, f2]);
        b.habitat(&[v, t1, f1, t2, f2]);
        b.group(GroupKey::Variable(i), &[(t1, t2), (f1, f2)]);
    }
    for (j, clause) in input.clauses.iter().enumerate() {
        let all: Vec<Vertex> = std::iter::once(w(j)).chain((0..3).flat_map(|p| [u(j, p, 1), u(j, p, 2)])).collect();
        for &x in &all[1..] {
            b.edge(w(j), x);
        }
        for q in 1..=2 {
            b.clique(&[u(j, 0, q), u(j, 1, q), u(j, 2, q)]);
        }
        for p in 0..3 {
            b.edge(u(j, p, 1), u(j, p, 2));
        }
        for p in 0..3 {
            let rest: Vec<Vertex> = all.iter().copied().filter(|&x| x != u(j, p, 1) && x != u(j, p, 2)).collect();
            b.habitat(&rest);
            for p2 in p + 1..3 {
                for l in 1..=2 {
                    b.habitat(&[w(j), u(j, p, l), u(j, p2, l)]);
                }
            }
        }
        b.group(GroupKey::Clause(j), &[(u(j, 0, 1), u(j, 0, 2)), (u(j, 1, 1), u(j, 1, 2)), (u(j, 2, 1), u(j, 2, 2))]);
        for (p, &lit) in clause.iter().enumerate() {
            let i = lit.unsigned_abs() as usize - 1;
            let (hub, one, two) = if lit > 0 { (var(i, 1), var(i, 2), var(i, 3)) } else { (var(i, 4), var(i, 5), var(i, 6)) };
            let (a, c) = (u(j, p, 1), u(j, p, 2));
            b.edge(a, hub);
            b.edge(c, hub);
            b.edge(a, one);
            b.edge(c, two);
            b.habitat(&[a, c, hub, one, two]);
            b.habitat(&[a, hub, one]);
            b.habitat(&[c, hub, two]);
        }
    }
    let (inst, mut map) =
        b.finish(Construction::H5D6, Mode::VertexTwoConnected, |_, _| 27 * big_n as u64 + 14 * big_m as u64);
    map.clauses = Some(input.clauses.clone());
    (inst, map)
}

/// Six-vertex gadgets whose two minimal solutions encode cover membership.
pub fn gen_h6d5(input: &HcvcInput, mode: Mode) -> (Instance, WitnessMap) {
    let (tuples, n) = hamiltonian_tuples(input);
    let chords = tuples.len() - n;
    let mut b = Builder::new(6 * n + 2 * n + 3 * chords);
    // t1, t2, b1, b2, l1, l2
    let t1 = |i: usize| 6 * i;
    let t2 = |i: usize| 6 * i + 1;
    let b1 = |i: usize| 6 * i + 2;
    let b2 = |i: usize| 6 * i + 3;
    let l1 = |i: usize| 6 * i + 4;
    let l2 = |i: usize| 6 * i + 5;
    // Hamiltonian pair x = (x, x+1) owns y, z; chords own y, z, d
    let y = |x: usize| if x < n { 6 * n + 2 * x } else { 8 * n + 3 * (x - n) };
    let z = |x: usize| y(x) + 1;
    let d = |x: usize| y(x) + 2;
    let src = |i: usize| input.cycle[i];
    for i in 0..n {
        b.edge(l2(i), t1(i));
        b.edge(l1(i), b1(i));
        b.edge(t1(i), b1(i));
        b.edge(b2(i), t2(i));
        let inner = [(t1(i), t2(i)), (b2(i), b1(i)), (l1(i), l2(i))];
        let outer = [(l1(i), b2(i)), (l2(i), t2(i))];
        for &(a, c) in inner.iter().chain(&outer) {
            b.edge(a, c);
        }
        b.habitat(&[t1(i), t2(i), b1(i), b2(i), l1(i), l2(i)]);
        b.group(GroupKey::VertexIn(src(i)), &inner);
        b.group(GroupKey::VertexOut(src(i)), &outer);
    }
    for (x, &(i, j)) in tuples.iter().enumerate() {
        if x < n {
            b.path(&[b1(i), z(x), l1(j), b1(i)]);
            b.path(&[b2(i), y(x), l2(j), b2(i)]);
            b.edge(y(x), z(x));
            b.habitat(&[b2(i), y(x), l2(j)]);
            b.habitat(&[b1(i), z(x), l1(j)]);
            b.habitat(&[b2(i), y(x), l2(j), b1(i), z(x), l1(j)]);
            b.habitat(&[y(x), z(x), l1(j), b1(j), t1(j), l2(j)]);
        } else {
            b.path(&[t1(i), y(x), t2(j), t1(i)]);
            b.path(&[t2(i), z(x), t1(j), t2(i)]);
            b.clique(&[y(x), z(x), d(x)]);
            // Hamiltonian pair starting at i, and the one starting at j
            b.edge(z(x), y(i));
            b.edge(y(x), y(j));
            b.habitat(&[t1(i), y(x), t2(j)]);
            b.habitat(&[t2(i), z(x), t1(j)]);
            b.habitat(&[y(x), z(x), d(x)]);
            b.habitat(&[t1(i), y(x), t2(j), t2(i), z(x), t1(j)]);
            b.habitat(&[t2(i), z(x), y(i), b2(i)]);
            b.habitat(&[t2(j), y(x), y(j), b2(j)]);
        }
    }
    let p = input.p as u64;
    // 18.5 n + p, with n even
    b.finish(Construction::H6D5, mode, |_, _| 37 * n as u64 / 2 + p)
}

/// Doubled five-vertex chains; only the rungs `s^a s^b` are free.
pub fn gen_h22d3(input: &HcvcInput, mode: Mode) -> (Instance, WitnessMap) {
    let (tuples, n) = hamiltonian_tuples(input);
    let m = tuples.len();
    let mut b = Builder::new(10 * n + 2 * m);
    // q, r, s, t, u per side; side 0 = a, 1 = b
    let node = |i: usize, side: usize, s: usize| 10 * i + 5 * side + s;
    let (q, r, s, t, u) = (0, 1, 2, 3, 4);
    let x = |pair: usize, side: usize| 10 * n + 2 * pair + side;
    let src = |i: usize| input.cycle[i];
    for i in 0..n {
        for side in 0..2 {
            b.path(&[node(i, side, q), node(i, side, r), node(i, side, s), node(i, side, t), node(i, side, u)]);
        }
        b.edge(node(i, 0, s), node(i, 1, s));
        b.group(GroupKey::Vertex(src(i)), &[(node(i, 0, s), node(i, 1, s))]);
    }
    for (k, &(i, j)) in tuples.iter().enumerate() {
        b.edge(x(k, 0), x(k, 1));
        let mut union = Vec::new();
        for side in 0..2 {
            let chain = |v: usize, lo: usize, hi: usize| (lo..=hi).map(move |s| node(v, side, s));
            let hab: Vec<Vertex> = if k < n {
                b.edge(node(i, side, q), x(k, side));
                b.edge(node(j, side, q), x(k, side));
                b.edge(node(i, side, u), node(j, side, u));
                chain(i, q, u).chain(chain(j, q, u)).chain([x(k, side)]).collect()
            } else {
                b.edge(node(i, side, r), x(k, side));
                b.edge(node(j, side, r), x(k, side));
                b.edge(node(i, side, t), node(j, side, t));
                chain(i, r, t).chain(chain(j, r, t)).chain([x(k, side)]).collect()
            };
            b.habitat(&hab);
            union.extend(hab);
        }
        b.habitat(&union);
        if k >= n {
            // pair (i', i) is Hamiltonian pair i - 1
            let prev = (i + n - 1) % n;
            b.habitat(&[
                x(prev, 0),
                node(i, 0, q),
                node(i, 0, r),
                x(k, 0),
                x(k, 1),
                node(i, 1, r),
                node(i, 1, q),
                x(prev, 1),
            ]);
        }
    }
    for i in 0..n {
        let prev = (i + n - 1) % n;
        b.habitat(&[x(prev, 0), node(i, 0, q), x(i, 0), x(i, 1), node(i, 1, q), x(prev, 1)]);
    }
    let p = input.p as u64;
    b.finish(Construction::H22D3, mode, |edges, _| edges as u64 - n as u64 + p)
}

/// Doubled three-vertex chains joined through connector vertices. In edge
/// mode each connector is split into two adjacent vertices and six-cycle
/// habitats around every `r` pair force the connector edges.
pub fn gen_h13d4(graph: &Graph, p: usize, mode: Mode) -> Result<(Instance, WitnessMap)> {
    check_cubic(graph)?;
    let n = graph.vertex_count();
    let pairs: Vec<(usize, usize)> = graph.edges().map(|(_, e)| e).collect();
    let m = pairs.len();
    let split = mode == Mode::EdgeTwoConnected;
    let mut b = Builder::new(6 * n + if split { 2 * m } else { m });
    // r, s, t per side
    let node = |i: usize, side: usize, s: usize| 6 * i + 3 * side + s;
    let x = |k: usize, side: usize| if split { 6 * n + 2 * k + side } else { 6 * n + k };
    for i in 0..n {
        for side in 0..2 {
            b.path(&[node(i, side, 0), node(i, side, 1), node(i, side, 2)]);
        }
        b.edge(node(i, 0, 1), node(i, 1, 1));
        b.group(GroupKey::Vertex(i), &[(node(i, 0, 1), node(i, 1, 1))]);
    }
    for (k, &(i, j)) in pairs.iter().enumerate() {
        if split {
            b.edge(x(k, 0), x(k, 1));
        }
        let mut union = BTreeSet::new();
        for side in 0..2 {
            b.edge(node(i, side, 0), x(k, side));
            b.edge(node(j, side, 0), x(k, side));
            b.edge(node(i, side, 2), node(j, side, 2));
            let hab: Vec<Vertex> = (0..3).map(|s| node(i, side, s)).chain((0..3).map(|s| node(j, side, s))).chain([x(k, side)]).collect();
            b.habitat(&hab);
            union.extend(hab);
        }
        b.habitat(&union.into_iter().collect::<Vec<_>>());
    }
    if split {
        for i in 0..n {
            let incident: Vec<usize> = (0..m).filter(|&k| pairs[k].0 == i || pairs[k].1 == i).collect();
            for w in incident.windows(2) {
                let (e1, e2) = (w[0], w[1]);
                b.habitat(&[x(e1, 0), node(i, 0, 0), x(e2, 0), x(e2, 1), node(i, 1, 0), x(e1, 1)]);
            }
        }
    }
    Ok(b.finish(Construction::H13D4, mode, |edges, _| edges as u64 - n as u64 + p as u64))
}

/// Dispatches on the construction; `cnf` is used by h5d6 only, `hcvc` by
/// the others (h13d4 ignores the cycle).
pub fn generate(
    construction: Construction,
    hcvc: Option<&HcvcInput>,
    cnf: Option<&Sat22Input>,
    mode: Mode,
) -> Result<(Instance, WitnessMap)> {
    if !construction.modes().contains(&mode) {
        return Err(Error::Usage(format!("{construction} does not support {mode} mode")));
    }
    let need_graph = || hcvc.ok_or_else(|| Error::Usage(format!("{construction} needs a cubic graph input")));
    Ok(match construction {
        Construction::H4D7 => {
            let (inst, mut map) = gen_h4d7(need_graph()?);
            map.mode = mode;
            (inst.with_mode(mode), map)
        }
        Construction::H5D6 => gen_h5d6(cnf.ok_or_else(|| Error::Usage("h5d6 needs a CNF input".into()))?),
        Construction::H6D5 => gen_h6d5(need_graph()?, mode),
        Construction::H22D3 => gen_h22d3(need_graph()?, mode),
        Construction::H13D4 => {
            let g = need_graph()?;
            gen_h13d4(g.graph(), g.p(), mode)?
        }
    })
}

/// Smallest vertex cover by increasing size, lowest subset mask first.
pub fn min_vertex_cover(graph: &Graph) -> Result<Vec<Vertex>> {
    let n = graph.vertex_count();
    if n > 20 {
        return Err(Error::Capacity(format!("vertex cover oracle handles at most 20 vertices, got {n}")));
    }
    let covers = |mask: u32| graph.edges().all(|(_, (a, b))| mask >> a & 1 == 1 || mask >> b & 1 == 1);
    let best = (0..=n as u32)
        .find_map(|size| (0u32..1 << n).find(|&m| m.count_ones() == size && covers(m)))
        .expect("the full vertex set is a cover");
    Ok((0..n).filter(|&v| best >> v & 1 == 1).collect())
}

/// A vertex cover of size at most `p`, if one exists.
pub fn oracle_vertex_cover(graph: &Graph, p: usize) -> Result<Option<Vec<Vertex>>> {
    let cover = min_vertex_cover(graph)?;
    Ok((cover.len() <= p).then_some(cover))
}

/// A satisfying assignment, if one exists (lowest in binary order).
pub fn oracle_sat22(input: &Sat22Input) -> Result<Option<Vec<bool>>> {
    let n = input.num_variables;
    if n > 24 {
        return Err(Error::Capacity(format!("SAT oracle handles at most 24 variables, got {n}")));
    }
    for bits in 0u32..1 << n {
        let assignment: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        if input.satisfied_by(&assignment) {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}

fn group(map: &WitnessMap, key: GroupKey) -> Result<&[EdgeId]> {
    map.group(key).ok_or_else(|| Error::Input(format!("witness map has no group `{key}`")))
}

fn source_vertices(map: &WitnessMap) -> BTreeSet<usize> {
    map.groups
        .iter()
        .filter_map(|g| match g.key {
            GroupKey::Vertex(i) | GroupKey::VertexIn(i) => Some(i),
            _ => None,
        })
        .collect()
}

/// Solution edges the forward direction of the construction's proof builds
/// from a source witness.
pub fn translate_witness(map: &WitnessMap, witness: &SourceWitness) -> Result<BTreeSet<EdgeId>> {
    let mut out: BTreeSet<EdgeId> = map.always.iter().copied().collect();
    match (map.construction, witness) {
        (Construction::H5D6, SourceWitness::Assignment(alpha)) => {
            let vars = map.groups.iter().filter(|g| matches!(g.key, GroupKey::Variable(_))).count();
            if alpha.len() != vars {
                return Err(Error::Input(format!("assignment has {} values for {vars} variables", alpha.len())));
            }
            for (i, &value) in alpha.iter().enumerate() {
                let g = group(map, GroupKey::Variable(i))?;
                out.insert(g[if value { 0 } else { 1 }]);
            }
            let Some(clauses) = &map.clauses else {
                return Err(Error::Input("witness map carries no clause list".into()));
            };
            for (j, clause) in clauses.iter().enumerate() {
                let g = group(map, GroupKey::Clause(j))?;
                let Some(first) = clause.iter().position(|&l| literal_true(l, alpha)) else {
                    return Err(Error::Input(format!("clause {j} is not satisfied")));
                };
                out.extend(g.iter().enumerate().filter(|&(p, _)| p != first).map(|(_, &e)| e));
            }
            Ok(out)
        }
        (Construction::H5D6, _) => Err(Error::Input("h5d6 needs a truth assignment".into())),
        (_, SourceWitness::Cover(cover)) => {
            let vertices = source_vertices(map);
            let cover: BTreeSet<usize> = cover.iter().copied().collect();
            if let Some(v) = cover.iter().find(|v| !vertices.contains(v)) {
                return Err(Error::Input(format!("cover vertex {v} is not a source vertex")));
            }
            for g in &map.groups {
                match (map.construction, g.key) {
                    (Construction::H4D7, GroupKey::Vertex(i)) => {
                        if cover.contains(&i) {
                            out.extend([g.edges[0], g.edges[2]]);
                        } else {
                            out.insert(g.edges[1]);
                        }
                    }
                    (Construction::H4D7, GroupKey::Edge(i, j)) => {
                        if !cover.contains(&i) && !cover.contains(&j) {
                            return Err(Error::Input(format!("edge {i} {j} is not covered")));
                        }
                        // [v_i^4 b, b v_j^2, u b, w b]
                        if cover.contains(&i) {
                            out.extend([g.edges[2], g.edges[1]]);
                        } else {
                            out.extend([g.edges[3], g.edges[0]]);
                        }
                    }
                    (Construction::H6D5, GroupKey::VertexIn(i)) if cover.contains(&i) => out.extend(&g.edges),
                    (Construction::H6D5, GroupKey::VertexOut(i)) if !cover.contains(&i) => out.extend(&g.edges),
                    (Construction::H22D3 | Construction::H13D4, GroupKey::Vertex(i)) if cover.contains(&i) => {
                        out.extend(&g.edges)
                    }
                    _ => {}
                }
            }
            Ok(out)
        }
        (_, SourceWitness::Assignment(_)) => Err(Error::Input(format!("{} needs a vertex cover", map.construction))),
    }
}

/// Reads the source witness off a solution where the construction allows it
/// directly: the truth assignment for h5d6, the cover for h22d3 and h13d4.
pub fn extract_witness(map: &WitnessMap, selected: &BTreeSet<EdgeId>) -> Result<SourceWitness> {
    match map.construction {
        Construction::H5D6 => {
            let mut alpha = BTreeMap::new();
            for g in &map.groups {
                if let GroupKey::Variable(i) = g.key {
                    alpha.insert(i, selected.contains(&g.edges[0]));
                }
            }
            Ok(SourceWitness::Assignment(alpha.into_values().collect()))
        }
        Construction::H22D3 | Construction::H13D4 => Ok(SourceWitness::Cover(
            map.groups
                .iter()
                .filter_map(|g| match g.key {
                    GroupKey::Vertex(i) if selected.contains(&g.edges[0]) => Some(i),
                    _ => None,
                })
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        )),
        c => Err(Error::Usage(format!("{c} has no direct witness extraction"))),
    }
}

/// The fixed source instances used by the tests and the documentation.
pub mod corpus {
    use super::{HcvcInput, Sat22Input};
    use crate::model::Graph;

    fn hcvc(n: usize, edges: &[(usize, usize)], cycle: &[usize], p: usize) -> HcvcInput {
        let g = Graph::new(n, edges.iter().copied()).expect("corpus graph");
        HcvcInput::new(g, cycle.to_vec(), p).expect("corpus graph is cubic with a Hamiltonian cycle")
    }

    /// K4; minimum vertex cover 3.
    pub fn k4() -> HcvcInput {
        hcvc(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], &[0, 1, 2, 3], 3)
    }

    /// Triangular prism; minimum vertex cover 4.
    pub fn prism() -> HcvcInput {
        hcvc(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)], &[0, 1, 2, 5, 4, 3], 4)
    }

    /// K_{3,3}; minimum vertex cover 3.
    pub fn k33() -> HcvcInput {
        let edges: Vec<(usize, usize)> = (0..3).flat_map(|a| (3..6).map(move |b| (a, b))).collect();
        hcvc(6, &edges, &[0, 3, 1, 4, 2, 5], 3)
    }

    /// The 3-cube; minimum vertex cover 4.
    pub fn cube() -> HcvcInput {
        let edges: Vec<(usize, usize)> =
            (0..8usize).flat_map(|a| (0..3).map(move |bit| (a, a ^ (1 << bit)))).filter(|&(a, b)| a < b).collect();
        hcvc(8, &edges, &[0, 1, 3, 2, 6, 7, 5, 4], 4)
    }

    pub fn graphs() -> Vec<(&'static str, HcvcInput)> {
        vec![("k4", k4()), ("prism", prism()), ("k33", k33()), ("cube", cube())]
    }

    pub fn sat3() -> Sat22Input {
        Sat22Input::new(3, vec![[1, 2, -3], [-1, -2, 3], [1, -2, 3], [-1, 2, -3]]).expect("balanced")
    }

    pub fn sat6() -> Sat22Input {
        Sat22Input::new(
            6,
            vec![[-6, 4, 5], [-1, -5, -6], [1, -5, 3], [5, 2, -1], [4, -3, 6], [2, -4, 1], [-3, -4, -2], [6, 3, -2]],
        )
        .expect("balanced")
    }

    /// Unsatisfiable; clauses repeat a literal, since no balanced formula
    /// with three distinct variables per clause is unsatisfiable this small.
    pub fn unsat3() -> Sat22Input {
        Sat22Input::new(3, vec![[2, 2, 3], [1, 1, -3], [-2, 3, -2], [-1, -1, -3]]).expect("balanced")
    }

    pub fn formulas() -> Vec<(&'static str, Sat22Input)> {
        vec![("sat3", sat3()), ("sat6", sat6()), ("unsat3", unsat3())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::instance_stats;

    #[test]
    fn rejects_invalid_sources() {
        let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(HcvcInput::new(p3, vec![0, 1, 2], 1).is_err());
        let k4 = corpus::k4();
        assert!(HcvcInput::new(k4.graph().clone(), vec![0, 1, 2], 3).is_err());
        assert!(Sat22Input::new(1, vec![[1, 1, -1]]).is_err());
        assert!(Sat22Input::new(3, vec![[1, 2, 4], [-1, -2, 3], [1, -2, 3], [-1, 2, -3]]).is_err());
    }

    #[test]
    fn vertex_cover_oracle() {
        let k4 = corpus::k4();
        assert!(oracle_vertex_cover(k4.graph(), 3).unwrap().is_some());
        assert!(oracle_vertex_cover(k4.graph(), 2).unwrap().is_none());
        let c6 = Graph::new(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        assert_eq!(oracle_vertex_cover(&c6, 3).unwrap().unwrap().len(), 3);
        assert!(oracle_vertex_cover(&Graph::empty(3), 0).unwrap().is_some());
    }

    #[test]
    fn sat_oracle() {
        assert!(oracle_sat22(&corpus::sat3()).unwrap().is_some());
        assert!(oracle_sat22(&corpus::unsat3()).unwrap().is_none());
    }

    #[test]
    fn advertised_parameters_on_k4() {
        let k4 = corpus::k4();
        let (inst, map) = gen_h4d7(&k4);
        let s = instance_stats(&inst);
        assert_eq!((s.eta, s.delta), (4, 7));
        assert_eq!(inst.graph().vertex_count(), 4 * 4 + 4 * 6);
        assert_eq!(inst.budget(), map.always.len() as u64 + 12 + 4 + 3);

        let (inst, _) = gen_h22d3(&k4, Mode::VertexTwoConnected);
        let s = instance_stats(&inst);
        assert_eq!((s.eta, s.delta), (22, 3));
        let (inst, _) = gen_h13d4(k4.graph(), 3, Mode::EdgeTwoConnected).unwrap();
        assert_eq!(instance_stats(&inst).eta, 14);
    }
}
