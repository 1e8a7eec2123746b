//! Habitat-local view of `G[H]` used by the inner loops of preprocessing
//! and the solvers: local vertex numbering plus the habitat's edge list.

use std::cell::RefCell;

use crate::connectivity::satisfies_adj;
use crate::model::{EdgeId, Instance, Mode};

#[derive(Clone, Debug)]
pub(crate) struct HabitatView {
    /// global edge ids of `G[H]`, ascending
    pub edges: Vec<EdgeId>,
    /// local endpoints, parallel to `edges`
    ends: Vec<(usize, usize)>,
    vertex_count: usize,
}

thread_local! {
    static SCRATCH: RefCell<Vec<Vec<(usize, usize)>>> = const { RefCell::new(Vec::new()) };
}

impl HabitatView {
    pub fn new(instance: &Instance, h: usize) -> Self {
        let members = instance.habitats()[h].vertices();
        let edges = instance.habitat_edges(h);
        let local = |v| members.binary_search(&v).expect("endpoint inside habitat");
        let ends = edges
            .iter()
            .map(|&e| {
                let (u, v) = instance.graph().endpoints(e);
                (local(u), local(v))
            })
            .collect();
        HabitatView { edges, ends, vertex_count: members.len() }
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn position(&self, e: EdgeId) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    /// Mode predicate on `G[H, {edges[i] : keep(i)}]`.
    pub fn satisfied<K: Fn(usize) -> bool>(&self, mode: Mode, keep: K) -> bool {
        SCRATCH.with(|cell| {
            let mut adj = cell.borrow_mut();
            if adj.len() < self.vertex_count {
                adj.resize_with(self.vertex_count, Vec::new);
            }
            for a in adj.iter_mut().take(self.vertex_count) {
                a.clear();
            }
            let mut m = 0;
            for (i, &(u, v)) in self.ends.iter().enumerate() {
                if keep(i) {
                    adj[u].push((v, m));
                    adj[v].push((u, m));
                    m += 1;
                }
            }
            satisfies_adj(&adj[..self.vertex_count], m, mode)
        })
    }

    pub fn satisfied_mask(&self, mode: Mode, mask: u64) -> bool {
        self.satisfied(mode, |i| mask >> i & 1 == 1)
    }
}
