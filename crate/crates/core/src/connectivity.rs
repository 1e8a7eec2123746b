//! 2-vertex- and 2-edge-connectivity via a single DFS lowpoint pass.

use std::collections::BTreeSet;

use crate::model::{EdgeId, Graph, Mode, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityReport {
    pub connected: bool,
    pub articulation_vertices: BTreeSet<Vertex>,
    pub bridges: BTreeSet<EdgeId>,
}

/// Result of one lowpoint pass over an adjacency list whose entries are
/// `(neighbour, edge index)`.
pub(crate) struct Lowpoint {
    pub components: usize,
    pub articulation: Vec<bool>,
    pub bridge: Vec<bool>,
}

pub(crate) fn lowpoint(adj: &[Vec<(usize, usize)>], edge_count: usize) -> Lowpoint {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut articulation = vec![false; n];
    let mut bridge = vec![false; edge_count];
    let mut components = 0;
    let mut time = 0;
    // (vertex, edge used to enter it, next adjacency position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();

    for root in 0..n {
        if disc[root] != UNSEEN {
            continue;
        }
        components += 1;
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        stack.push((root, usize::MAX, 0));
        while let Some(top) = stack.last_mut() {
            let (v, via, pos) = *top;
            if pos < adj[v].len() {
                top.2 += 1;
                let (w, e) = adj[v][pos];
                if e == via {
                    continue;
                }
                if disc[w] == UNSEEN {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, e, 0));
                } else if disc[w] < low[v] {
                    low[v] = disc[w];
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    if low[v] < low[parent] {
                        low[parent] = low[v];
                    }
                    if low[v] > disc[parent] {
                        bridge[via] = true;
                    }
                    if parent != root && low[v] >= disc[parent] {
                        articulation[parent] = true;
                    }
                }
            }
        }
        if root_children >= 2 {
            articulation[root] = true;
        }
    }
    Lowpoint { components, articulation, bridge }
}

/// Mode predicate on an adjacency list with `edge_count` edges.
pub(crate) fn satisfies_adj(adj: &[Vec<(usize, usize)>], edge_count: usize, mode: Mode) -> bool {
    match mode {
        Mode::VertexTwoConnected if adj.len() < 3 => return false,
        Mode::EdgeTwoConnected if edge_count < 2 => return false,
        _ => {}
    }
    // Cheap necessary conditions before the DFS.
    if adj.iter().any(|a| a.len() < 2) {
        return false;
    }
    let lp = lowpoint(adj, edge_count);
    if lp.components != 1 {
        return false;
    }
    match mode {
        Mode::VertexTwoConnected => !lp.articulation.iter().any(|&a| a),
        Mode::EdgeTwoConnected => !lp.bridge.iter().any(|&b| b),
    }
}

fn adjacency(graph: &Graph) -> Vec<Vec<(usize, usize)>> {
    (0..graph.vertex_count())
        .map(|v| graph.incident(v).iter().map(|&(w, e)| (w, e.index())).collect())
        .collect()
}

pub fn report(graph: &Graph) -> ConnectivityReport {
    let lp = lowpoint(&adjacency(graph), graph.edge_count());
    ConnectivityReport {
        connected: lp.components <= 1,
        articulation_vertices: lp.articulation.iter().enumerate().filter(|(_, &a)| a).map(|(v, _)| v).collect(),
        bridges: lp.bridge.iter().enumerate().filter(|(_, &b)| b).map(|(e, _)| EdgeId(e)).collect(),
    }
}

/// At least three vertices, connected, and no articulation vertex.
pub fn is_two_vertex_connected(graph: &Graph) -> bool {
    satisfies_adj(&adjacency(graph), graph.edge_count(), Mode::VertexTwoConnected)
}

/// At least two edges, connected, and no bridge.
pub fn is_two_edge_connected(graph: &Graph) -> bool {
    satisfies_adj(&adjacency(graph), graph.edge_count(), Mode::EdgeTwoConnected)
}

pub fn satisfies(graph: &Graph, mode: Mode) -> bool {
    satisfies_adj(&adjacency(graph), graph.edge_count(), mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, edges.iter().copied()).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        g(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    #[test]
    fn small_cases() {
        assert!(is_two_vertex_connected(&cycle(3)));
        let p3 = g(3, &[(0, 1), (1, 2)]);
        assert!(!is_two_vertex_connected(&p3));
        assert!(!is_two_edge_connected(&g(2, &[(0, 1)])));
        assert!(is_two_edge_connected(&cycle(4)));
        assert!(!is_two_vertex_connected(&g(2, &[(0, 1)])));
        assert!(!is_two_vertex_connected(&Graph::empty(0)));
    }

    #[test]
    fn bowtie_is_edge_but_not_vertex_connected() {
        // two triangles sharing vertex 2
        let bowtie = g(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]);
        assert!(is_two_edge_connected(&bowtie));
        assert!(!is_two_vertex_connected(&bowtie));
        let r = report(&bowtie);
        assert_eq!(r.articulation_vertices, BTreeSet::from([2]));
        assert!(r.bridges.is_empty());
    }

    #[test]
    fn report_on_path_and_cycle() {
        let p3 = g(3, &[(0, 1), (1, 2)]);
        let r = report(&p3);
        assert!(r.connected);
        assert_eq!(r.articulation_vertices, BTreeSet::from([1]));
        assert_eq!(r.bridges, BTreeSet::from([EdgeId(0), EdgeId(1)]));
        let r = report(&cycle(4));
        assert!(r.articulation_vertices.is_empty() && r.bridges.is_empty());
    }

    #[test]
    fn disconnected_report_covers_every_component() {
        let two = g(6, &[(0, 1), (1, 2), (3, 4), (4, 5), (3, 5)]);
        let r = report(&two);
        assert!(!r.connected);
        assert_eq!(r.articulation_vertices, BTreeSet::from([1]));
        assert_eq!(r.bridges, BTreeSet::from([EdgeId(0), EdgeId(1)]));
        assert!(!is_two_edge_connected(&two));
        assert!(!is_two_vertex_connected(&two));
    }

    #[test]
    fn isolated_vertex_breaks_connectivity() {
        let mut edges: Vec<(usize, usize)> = (0..4).map(|i| (i, (i + 1) % 4)).collect();
        edges.push((0, 2));
        assert!(!is_two_vertex_connected(&g(5, &edges)));
        assert!(!is_two_edge_connected(&g(5, &edges)));
    }
}
