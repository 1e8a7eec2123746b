//! Basic habitat graph: habitats are adjacent when their induced graphs
//! share an unforced edge. Its components are independent sub-problems.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::model::{EdgeId, Graph, Habitat, Instance, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetaEdge {
    pub a: usize,
    pub b: usize,
    /// shared unforced edges, ascending
    pub witness: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicHabitatGraph {
    node_count: usize,
    meta_edges: Vec<MetaEdge>,
    adjacency: Vec<Vec<usize>>,
}

impl BasicHabitatGraph {
    pub fn build(instance: &Instance) -> Self {
        let n = instance.habitats().len();
        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); instance.graph().edge_count()];
        for h in 0..n {
            for e in instance.habitat_edges(h) {
                if !instance.is_forced(e) {
                    holders[e.0].push(h);
                }
            }
        }
        let mut witness: BTreeMap<(usize, usize), Vec<EdgeId>> = BTreeMap::new();
        for (e, hs) in holders.iter().enumerate() {
            for (i, &a) in hs.iter().enumerate() {
                for &b in &hs[i + 1..] {
                    witness.entry((a, b)).or_default().push(EdgeId(e));
                }
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        let meta_edges = witness
            .into_iter()
            .map(|((a, b), witness)| {
                adjacency[a].push(b);
                adjacency[b].push(a);
                MetaEdge { a, b, witness }
            })
            .collect();
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        BasicHabitatGraph { node_count: n, meta_edges, adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn meta_edges(&self) -> &[MetaEdge] {
        &self.meta_edges
    }

    pub fn neighbors(&self, h: usize) -> &[usize] {
        &self.adjacency[h]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn witness(&self, a: usize, b: usize) -> Option<&[EdgeId]> {
        let key = (a.min(b), a.max(b));
        self.meta_edges
            .binary_search_by(|m| (m.a, m.b).cmp(&key))
            .ok()
            .map(|i| self.meta_edges[i].witness.as_slice())
    }

    /// `habitat_i habitat_j witness_count` per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for m in &self.meta_edges {
            let _ = writeln!(out, "{} {} {}", m.a, m.b, m.witness.len());
        }
        out
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.node_count];
        let mut out = Vec::new();
        for start in 0..self.node_count {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut i = 0;
            while i < comp.len() {
                for &w in &self.adjacency[comp[i]] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Singleton,
    Path,
    Cycle,
    Other,
}

impl Shape {
    pub fn keyword(self) -> &'static str {
        match self {
            Shape::Singleton => "singleton",
            Shape::Path => "path",
            Shape::Cycle => "cycle",
            Shape::Other => "other",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Component {
    /// Member habitats (indices into the decomposed instance). For paths
    /// and cycles this is walk order, otherwise ascending.
    pub habitats: Vec<usize>,
    pub shape: Shape,
    /// Habitat `i` of the sub-instance is `habitats[i]`.
    pub sub_instance: Instance,
    /// sub-instance vertex -> instance vertex
    pub vertex_origin: Vec<Vertex>,
    /// sub-instance edge -> instance edge
    pub edge_origin: Vec<EdgeId>,
}

#[derive(Clone, Debug)]
pub struct ComponentDecomposition {
    pub components: Vec<Component>,
    /// Forced edges lying in no habitat; they belong to every solution but
    /// to no component.
    pub uncovered_forced: Vec<EdgeId>,
}

fn classify(hg: &BasicHabitatGraph, members: &[usize]) -> (Shape, Vec<usize>) {
    if members.len() == 1 {
        return (Shape::Singleton, members.to_vec());
    }
    let degree = |h: usize| hg.neighbors(h).len();
    let edges: usize = members.iter().map(|&h| degree(h)).sum::<usize>() / 2;
    let max_degree = members.iter().map(|&h| degree(h)).max().unwrap_or(0);
    let shape = if max_degree <= 2 && edges + 1 == members.len() {
        Shape::Path
    } else if members.iter().all(|&h| degree(h) == 2) {
        Shape::Cycle
    } else {
        return (Shape::Other, members.to_vec());
    };
    let start = match shape {
        Shape::Path => *members.iter().find(|&&h| degree(h) == 1).expect("path has an endpoint"),
        _ => members[0],
    };
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while order.len() < members.len() {
        let next = *hg.neighbors(cur).iter().find(|&&w| w != prev).expect("walk continues");
        order.push(next);
        prev = cur;
        cur = next;
    }
    (shape, order)
}

fn sub_instance(instance: &Instance, order: &[usize]) -> (Instance, Vec<Vertex>, Vec<EdgeId>) {
    let vertices: BTreeSet<Vertex> =
        order.iter().flat_map(|&h| instance.habitats()[h].vertices().iter().copied()).collect();
    let vertex_origin: Vec<Vertex> = vertices.into_iter().collect();
    let local = |v: Vertex| vertex_origin.binary_search(&v).expect("member vertex");
    let edge_origin: Vec<EdgeId> =
        order.iter().flat_map(|&h| instance.habitat_edges(h)).collect::<BTreeSet<_>>().into_iter().collect();
    let graph = Graph::new(
        vertex_origin.len(),
        edge_origin.iter().map(|&e| {
            let (u, v) = instance.graph().endpoints(e);
            (local(u), local(v))
        }),
    )
    .expect("restriction of a valid graph");
    let costs: Vec<u64> = edge_origin.iter().map(|&e| instance.cost(e)).collect();
    let forced = (0..edge_origin.len()).filter(|&i| instance.is_forced(edge_origin[i])).map(EdgeId);
    let habitats = order
        .iter()
        .map(|&h| Habitat::new(instance.habitats()[h].vertices().iter().map(|&v| local(v))).expect("non-empty"))
        .collect();
    let budget = costs.iter().sum();
    let sub = Instance::new(graph, costs, forced, habitats, budget, instance.mode()).expect("consistent restriction");
    (sub, vertex_origin, edge_origin)
}

/// Splits the instance along the components of `hg`.
pub fn decompose(instance: &Instance, hg: &BasicHabitatGraph) -> ComponentDecomposition {
    let mut covered = vec![false; instance.graph().edge_count()];
    let components = hg
        .components()
        .into_iter()
        .map(|members| {
            let (shape, order) = classify(hg, &members);
            let (sub_instance, vertex_origin, edge_origin) = sub_instance(instance, &order);
            for e in &edge_origin {
                covered[e.0] = true;
            }
            Component { habitats: order, shape, sub_instance, vertex_origin, edge_origin }
        })
        .collect();
    let uncovered_forced = instance.forced_edges().filter(|e| !covered[e.0]).collect();
    ComponentDecomposition { components, uncovered_forced }
}

/// Habitats outside `subset` that overlap its vertex union, reach beyond
/// it, and are meta-adjacent to one of its members.
pub fn boundary(instance: &Instance, hg: &BasicHabitatGraph, subset: &BTreeSet<usize>) -> BTreeSet<usize> {
    let union: BTreeSet<Vertex> =
        subset.iter().flat_map(|&h| instance.habitats()[h].vertices().iter().copied()).collect();
    (0..instance.habitats().len())
        .filter(|h| !subset.contains(h))
        .filter(|&h| {
            let vs = instance.habitats()[h].vertices();
            vs.iter().any(|v| union.contains(v))
                && vs.iter().any(|v| !union.contains(v))
                && hg.neighbors(h).iter().any(|w| subset.contains(w))
        })
        .collect()
}
