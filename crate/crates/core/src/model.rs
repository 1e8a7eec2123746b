//! Problem data model: graphs with stable edge identifiers, habitats,
//! instances and solutions.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::ModelError;

pub type Vertex = usize;

/// Stable identifier of an edge: its index in the owning graph's edge list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Undirected simple graph. Edge endpoints are stored with the smaller
/// vertex first; the endpoint-pair index is derived from the edge list.
#[derive(Clone, Debug)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(Vertex, Vertex)>,
    index: HashMap<(Vertex, Vertex), EdgeId>,
    adjacency: Vec<Vec<(Vertex, EdgeId)>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges
    }
}

impl Eq for Graph {}

#[inline]
fn ordered(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    pub fn new<I>(vertex_count: usize, edges: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut list = Vec::new();
        let mut index = HashMap::new();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (u, v) in edges {
            if u == v {
                return Err(ModelError::SelfLoop(u));
            }
            let w = u.max(v);
            if w >= vertex_count {
                return Err(ModelError::VertexOutOfRange { vertex: w, vertex_count });
            }
            let key = ordered(u, v);
            let id = EdgeId(list.len());
            if index.insert(key, id).is_some() {
                return Err(ModelError::DuplicateEdge(key.0, key.1));
            }
            list.push(key);
            adjacency[key.0].push((key.1, id));
            adjacency[key.1].push((key.0, id));
        }
        Ok(Graph { vertex_count, edges: list, index, adjacency })
    }

    pub fn empty(vertex_count: usize) -> Self {
        Graph {
            vertex_count,
            edges: Vec::new(),
            index: HashMap::new(),
            adjacency: vec![Vec::new(); vertex_count],
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e.0]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (EdgeId, (Vertex, Vertex))> + '_ {
        self.edges.iter().enumerate().map(|(i, &uv)| (EdgeId(i), uv))
    }

    pub fn edge_ids(&self) -> impl ExactSizeIterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        self.index.get(&ordered(u, v)).copied()
    }

    /// Neighbours of `v` together with the connecting edge.
    pub fn incident(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adjacency[v].iter().map(|&(w, _)| w)
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edge ids of `G[W]`, ascending. `members` must be sorted.
    pub fn induced_edges(&self, members: &[Vertex]) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for &u in members {
            for &(w, e) in &self.adjacency[u] {
                if u < w && members.binary_search(&w).is_ok() {
                    out.push(e);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// A vertex subset whose selected induced subgraph must be 2-connected.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Habitat(Vec<Vertex>);

impl Habitat {
    pub fn new<I: IntoIterator<Item = Vertex>>(vertices: I) -> Result<Self, ModelError> {
        let mut v: Vec<Vertex> = vertices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(ModelError::EmptyHabitat);
        }
        Ok(Habitat(v))
    }

    #[inline]
    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }
}

/// Which connectivity notion every habitat must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    VertexTwoConnected,
    EdgeTwoConnected,
}

impl Mode {
    pub fn keyword(self) -> &'static str {
        match self {
            Mode::VertexTwoConnected => "vertex",
            Mode::EdgeTwoConnected => "edge",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Mode> {
        match s {
            "vertex" => Some(Mode::VertexTwoConnected),
            "edge" => Some(Mode::EdgeTwoConnected),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A problem instance: graph, edge costs, forced edges, habitats, budget and
/// connectivity mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    graph: Graph,
    costs: Vec<u64>,
    forced: Vec<bool>,
    habitats: Vec<Habitat>,
    budget: u64,
    mode: Mode,
}

impl Instance {
    pub fn new<F>(
        graph: Graph,
        costs: Vec<u64>,
        forced: F,
        habitats: Vec<Habitat>,
        budget: u64,
        mode: Mode,
    ) -> Result<Self, ModelError>
    where
        F: IntoIterator<Item = EdgeId>,
    {
        if costs.len() != graph.edge_count() {
            return Err(ModelError::CostLength { costs: costs.len(), edges: graph.edge_count() });
        }
        let mut flags = vec![false; graph.edge_count()];
        for e in forced {
            if e.0 >= graph.edge_count() {
                return Err(ModelError::UnknownEdge(e.0));
            }
            flags[e.0] = true;
        }
        for h in &habitats {
            if let Some(&v) = h.vertices().last() {
                if v >= graph.vertex_count() {
                    return Err(ModelError::VertexOutOfRange {
                        vertex: v,
                        vertex_count: graph.vertex_count(),
                    });
                }
            }
        }
        Ok(Instance { graph, costs, forced: flags, habitats, budget, mode })
    }

    /// Unit costs and no forced edges.
    pub fn unit(graph: Graph, habitats: Vec<Habitat>, budget: u64, mode: Mode) -> Result<Self, ModelError> {
        let costs = vec![1; graph.edge_count()];
        Self::new(graph, costs, std::iter::empty(), habitats, budget, mode)
    }

    #[inline]
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    pub fn cost(&self, e: EdgeId) -> u64 {
        self.costs[e.0]
    }

    pub fn costs(&self) -> &[u64] {
        &self.costs
    }

    #[inline]
    pub fn is_forced(&self, e: EdgeId) -> bool {
        self.forced[e.0]
    }

    pub fn forced_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.forced.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| EdgeId(i))
    }

    pub fn forced_count(&self) -> usize {
        self.forced.iter().filter(|&&f| f).count()
    }

    pub fn forced_cost(&self) -> u64 {
        self.forced_edges().map(|e| self.cost(e)).sum()
    }

    #[inline]
    pub fn habitats(&self) -> &[Habitat] {
        &self.habitats
    }

    #[inline]
    pub fn budget(&self) -> u64 {
        self.budget
    }

    #[inline]
    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// True for the unit-cost, no-forced-edge special case.
    pub fn is_unit(&self) -> bool {
        self.costs.iter().all(|&c| c == 1) && self.forced.iter().all(|&f| !f)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_forced<I: IntoIterator<Item = EdgeId>>(mut self, extra: I) -> Self {
        for e in extra {
            self.forced[e.0] = true;
        }
        self
    }

    pub fn with_habitats(mut self, habitats: Vec<Habitat>) -> Self {
        self.habitats = habitats;
        self
    }

    pub(crate) fn set_forced(&mut self, e: EdgeId) {
        self.forced[e.0] = true;
    }

    pub(crate) fn set_budget(&mut self, budget: u64) {
        self.budget = budget;
    }

    pub(crate) fn remove_habitat(&mut self, h: usize) -> Habitat {
        self.habitats.remove(h)
    }

    /// Deletes the given edges; later ids shift down.
    pub(crate) fn remove_edges(&mut self, doomed: &[EdgeId]) {
        if doomed.is_empty() {
            return;
        }
        let mut drop = vec![false; self.graph.edge_count()];
        for e in doomed {
            drop[e.0] = true;
        }
        let keep: Vec<EdgeId> = self.graph.edge_ids().filter(|e| !drop[e.0]).collect();
        self.graph = Graph::new(self.graph.vertex_count(), keep.iter().map(|&e| self.graph.endpoints(e)))
            .expect("subset of a valid edge list");
        self.costs = keep.iter().map(|&e| self.costs[e.0]).collect();
        self.forced = keep.iter().map(|&e| self.forced[e.0]).collect();
    }

    pub fn habitat_edges(&self, h: usize) -> Vec<EdgeId> {
        self.graph.induced_edges(self.habitats[h].vertices())
    }

    pub fn cost_of<'a, I: IntoIterator<Item = &'a EdgeId>>(&self, edges: I) -> u64 {
        edges.into_iter().map(|&e| self.cost(e)).sum()
    }

    pub fn eta(&self) -> usize {
        self.habitats.iter().map(Habitat::len).max().unwrap_or(0)
    }

    /// Edges sorted by endpoints, habitats sorted; returns the canonical
    /// instance and the map old edge id -> new edge id.
    pub fn canonical(&self) -> (Instance, Vec<EdgeId>) {
        let mut order: Vec<EdgeId> = self.graph.edge_ids().collect();
        order.sort_by_key(|&e| self.graph.endpoints(e));
        let mut remap = vec![EdgeId(0); order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old.0] = EdgeId(new);
        }
        let graph = Graph::new(self.graph.vertex_count(), order.iter().map(|&e| self.graph.endpoints(e)))
            .expect("permutation of a valid edge list");
        let costs = order.iter().map(|&e| self.cost(e)).collect();
        let forced = order.iter().enumerate().filter(|(_, &e)| self.is_forced(e)).map(|(i, _)| EdgeId(i));
        let mut habitats = self.habitats.clone();
        habitats.sort();
        let inst = Instance::new(graph, costs, forced, habitats, self.budget, self.mode)
            .expect("canonical form of a valid instance");
        (inst, remap)
    }
}

/// Vertex and edge relabelling produced by [`induced_subgraph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// local vertex -> original vertex
    pub vertices: Vec<Vertex>,
    /// local edge -> original edge
    pub edges: Vec<EdgeId>,
}

impl InducedSubgraph {
    pub fn local_vertex(&self, v: Vertex) -> Option<Vertex> {
        self.vertices.binary_search(&v).ok()
    }
}

/// `G[H, F]`: the graph on `habitat` with the edges of `selected` that have
/// both endpoints inside it.
pub fn induced_subgraph(
    graph: &Graph,
    habitat: &Habitat,
    selected: &BTreeSet<EdgeId>,
) -> Result<InducedSubgraph, ModelError> {
    let members = habitat.vertices();
    if let Some(&v) = members.last() {
        if v >= graph.vertex_count() {
            return Err(ModelError::VertexOutOfRange { vertex: v, vertex_count: graph.vertex_count() });
        }
    }
    let edges: Vec<EdgeId> = graph.induced_edges(members).into_iter().filter(|e| selected.contains(e)).collect();
    let local = |v: Vertex| members.binary_search(&v).expect("endpoint inside habitat");
    let sub = Graph::new(
        members.len(),
        edges.iter().map(|&e| {
            let (u, v) = graph.endpoints(e);
            (local(u), local(v))
        }),
    )?;
    Ok(InducedSubgraph { graph: sub, vertices: members.to_vec(), edges })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceStats {
    pub eta: usize,
    pub delta: usize,
    pub num_habitats: usize,
    pub num_free_edges: usize,
}

pub fn instance_stats(instance: &Instance) -> InstanceStats {
    InstanceStats {
        eta: instance.eta(),
        delta: instance.graph().max_degree(),
        num_habitats: instance.habitats().len(),
        num_free_edges: instance.graph().edge_count() - instance.forced_count(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Feasible,
    Infeasible,
}

impl Status {
    pub fn keyword(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Feasible => "feasible",
            Status::Infeasible => "infeasible",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Status> {
        match s {
            "optimal" => Some(Status::Optimal),
            "feasible" => Some(Status::Feasible),
            "infeasible" => Some(Status::Infeasible),
            _ => None,
        }
    }
}

/// Which stage of the pipeline contributed a group of selected edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Edges forced in the input or by preprocessing.
    Forced,
    /// Forced edges removed by preprocessing because no habitat contains them.
    RemovedForced,
    Singleton { component: usize },
    PathDp { component: usize },
    CycleDp { component: usize },
    Exhaustive { component: usize },
    BranchAndBound { component: usize },
    /// Preprocessing proved infeasibility at this (original) habitat.
    InfeasibleHabitat { habitat: usize },
    /// A component has no feasible edge set.
    InfeasibleComponent { component: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub origin: Origin,
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub selected: BTreeSet<EdgeId>,
    pub cost: u64,
    pub status: Status,
    pub trace: Vec<Provenance>,
}

impl Solution {
    pub fn infeasible(origin: Origin) -> Self {
        Solution {
            selected: BTreeSet::new(),
            cost: 0,
            status: Status::Infeasible,
            trace: vec![Provenance { origin, edges: Vec::new() }],
        }
    }

    pub fn is_infeasible(&self) -> bool {
        self.status == Status::Infeasible
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(matches!(Graph::new(3, [(1, 1)]), Err(ModelError::SelfLoop(1))));
        assert!(matches!(Graph::new(3, [(0, 1), (1, 0)]), Err(ModelError::DuplicateEdge(0, 1))));
        assert!(matches!(Graph::new(2, [(0, 2)]), Err(ModelError::VertexOutOfRange { .. })));
    }

    #[test]
    fn adjacency_agrees_with_edge_list() {
        let g = Graph::new(5, [(0, 1), (3, 1), (2, 4), (0, 4)]).unwrap();
        for (e, (u, v)) in g.edges() {
            assert!(u < v);
            assert_eq!(g.edge_between(u, v), Some(e));
            assert_eq!(g.edge_between(v, u), Some(e));
            assert!(g.incident(u).contains(&(v, e)));
            assert!(g.incident(v).contains(&(u, e)));
        }
        let total: usize = (0..5).map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.edge_count());
        assert_eq!(g.edge_between(2, 3), None);
    }

    #[test]
    fn induced_identity_and_restriction() {
        let g = triangle();
        let all: BTreeSet<EdgeId> = g.edge_ids().collect();
        let full = induced_subgraph(&g, &Habitat::new([0, 1, 2]).unwrap(), &all).unwrap();
        assert_eq!(full.graph, g);
        let pair = induced_subgraph(&g, &Habitat::new([0, 1]).unwrap(), &all).unwrap();
        assert_eq!(pair.graph.edge_count(), 1);
        assert_eq!(pair.edges, vec![EdgeId(0)]);
        assert!(induced_subgraph(&g, &Habitat::new([0, 7]).unwrap(), &all).is_err());
    }

    #[test]
    fn stats_report_eta_delta_and_free_edges() {
        let g = Graph::new(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4), (1, 3)]).unwrap();
        let habitats = vec![
            Habitat::new([0, 1, 2]).unwrap(),
            Habitat::new([1, 2, 3, 4]).unwrap(),
            Habitat::new([0, 1, 2, 3]).unwrap(),
        ];
        let inst = Instance::new(g, vec![1; 7], [EdgeId(0), EdgeId(3)], habitats, 5, Mode::VertexTwoConnected)
            .unwrap();
        let s = instance_stats(&inst);
        assert_eq!(s, InstanceStats { eta: 4, delta: 4, num_habitats: 3, num_free_edges: 5 });
        assert_eq!(instance_stats(&inst), s);
        let empty = Instance::unit(Graph::empty(2), vec![], 0, Mode::EdgeTwoConnected).unwrap();
        assert_eq!(instance_stats(&empty).eta, 0);
    }

    #[test]
    fn canonical_sorts_edges_and_habitats() {
        let g = Graph::new(4, [(2, 3), (0, 1), (1, 2)]).unwrap();
        let inst = Instance::new(
            g,
            vec![5, 6, 7],
            [EdgeId(0)],
            vec![Habitat::new([1, 2, 3]).unwrap(), Habitat::new([0, 1, 2]).unwrap()],
            3,
            Mode::EdgeTwoConnected,
        )
        .unwrap();
        let (canon, remap) = inst.canonical();
        assert_eq!(remap, vec![EdgeId(2), EdgeId(0), EdgeId(1)]);
        assert_eq!(canon.costs(), &[6, 7, 5]);
        assert!(canon.is_forced(EdgeId(2)));
        assert_eq!(canon.habitats()[0].vertices(), &[0, 1, 2]);
        assert_eq!(canon.canonical().0, canon);
    }
}
