//! Brute-force oracles and random instance generators shared by the
//! integration tests. Nothing here calls into the solver or the
//! connectivity module.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rgbp::{EdgeId, Graph, Habitat, Instance, Mode};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn reachable(n: usize, edges: &[(usize, usize)], skip_vertex: Option<usize>, skip_edge: Option<usize>) -> usize {
    let start = (0..n).find(|&v| Some(v) != skip_vertex);
    let Some(start) = start else { return 0 };
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for (i, &(a, b)) in edges.iter().enumerate() {
            if Some(i) == skip_edge || Some(a) == skip_vertex || Some(b) == skip_vertex {
                continue;
            }
            let w = if a == v { b } else if b == v { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count
}

/// 2-vertex-connectivity by deleting every vertex in turn.
pub fn naive_two_vertex_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    n >= 3 && reachable(n, edges, None, None) == n && (0..n).all(|v| reachable(n, edges, Some(v), None) == n - 1)
}

/// 2-edge-connectivity by deleting every edge in turn.
pub fn naive_two_edge_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    edges.len() >= 2
        && reachable(n, edges, None, None) == n
        && (0..edges.len()).all(|e| reachable(n, edges, None, Some(e)) == n)
}

/// Whether habitat `h` is satisfied by the selected edges.
pub fn habitat_ok(inst: &Instance, h: &Habitat, selected: &BTreeSet<EdgeId>) -> bool {
    let vs = h.vertices();
    let local = |v: usize| vs.iter().position(|&x| x == v);
    let edges: Vec<(usize, usize)> = selected
        .iter()
        .filter_map(|&e| {
            let (u, v) = inst.graph().endpoints(e);
            Some((local(u)?, local(v)?))
        })
        .collect();
    match inst.mode() {
        Mode::VertexTwoConnected => naive_two_vertex_connected(vs.len(), &edges),
        Mode::EdgeTwoConnected => naive_two_edge_connected(vs.len(), &edges),
    }
}

pub fn feasible(inst: &Instance, selected: &BTreeSet<EdgeId>) -> bool {
    inst.forced_edges().all(|e| selected.contains(&e)) && inst.habitats().iter().all(|h| habitat_ok(inst, h, selected))
}

/// Cheapest feasible edge set over all 2^|E| subsets, budget ignored.
pub fn brute_force(inst: &Instance) -> Option<u64> {
    let m = inst.graph().edge_count();
    assert!(m <= 22, "brute force limited to 22 edges");
    let forced: u32 = inst.forced_edges().fold(0, |acc, e| acc | 1 << e.0);
    let mut best: Option<u64> = None;
    for mask in 0u32..1 << m {
        if mask & forced != forced {
            continue;
        }
        let cost: u64 = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| inst.cost(EdgeId(i))).sum();
        if best.is_some_and(|b| cost >= b) {
            continue;
        }
        let selected: BTreeSet<EdgeId> = (0..m).filter(|&i| mask >> i & 1 == 1).map(EdgeId).collect();
        if inst.habitats().iter().all(|h| habitat_ok(inst, h, &selected)) {
            best = Some(cost);
        }
    }
    best
}

fn local_ok(edges: &[(usize, usize)], vs: &[usize], mode: Mode) -> bool {
    let pos = |v: usize| vs.iter().position(|&x| x == v);
    let local: Vec<(usize, usize)> = edges.iter().filter_map(|&(a, b)| Some((pos(a)?, pos(b)?))).collect();
    match mode {
        Mode::VertexTwoConnected => naive_two_vertex_connected(vs.len(), &local),
        Mode::EdgeTwoConnected => naive_two_edge_connected(vs.len(), &local),
    }
}

/// n ≤ 7, |E| ≤ 14, at most 4 habitats, costs 1..=5, random forced subset.
pub fn random_instance(rng: &mut impl Rng) -> Instance {
    let n = rng.gen_range(3..=7);
    let mut all: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    all.shuffle(rng);
    let density = rng.gen_range(0.4..1.0);
    let m = ((all.len() as f64 * density) as usize).clamp(1, 14);
    all.truncate(m);
    let graph = Graph::new(n, all.iter().copied()).unwrap();
    let costs: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=5)).collect();
    let forced: Vec<EdgeId> = (0..m).filter(|_| rng.gen_bool(0.15)).map(EdgeId).collect();
    let mode = if rng.gen_bool(0.5) { Mode::VertexTwoConnected } else { Mode::EdgeTwoConnected };
    // mostly habitats that the full graph satisfies, so most instances are feasible
    let want_good = rng.gen_bool(0.8);
    let habitats = (0..rng.gen_range(0..=4))
        .map(|_| {
            let mut pick = || {
                let size = rng.gen_range(2..=n.min(5));
                let mut vs: Vec<usize> = (0..n).collect();
                vs.shuffle(rng);
                vs.truncate(size);
                vs
            };
            let mut vs = pick();
            for _ in 0..30 {
                if !want_good || local_ok(&all, &vs, mode) {
                    break;
                }
                vs = pick();
            }
            Habitat::new(vs).unwrap()
        })
        .collect();
    let budget = rng.gen_range(0..=30);
    Instance::new(graph, costs, forced, habitats, budget, mode).unwrap()
}

/// A chain (or ring) of four-vertex habitats where habitat `i` and `i+1`
/// share the two vertices `2i+2, 2i+3` and the edge between them. Nothing
/// else is shared, so the basic habitat graph is a path or a cycle.
pub fn chain_instance(rng: &mut impl Rng, len: usize, cyclic: bool) -> (Instance, Vec<usize>) {
    let n = if cyclic { 2 * len } else { 2 * len + 2 };
    let at = |i: usize| i % n;
    let mut edges = BTreeSet::new();
    let mut habitats = Vec::new();
    for i in 0..len {
        let vs = [at(2 * i), at(2 * i + 1), at(2 * i + 2), at(2 * i + 3)];
        habitats.push(Habitat::new(vs).unwrap());
        // the shared rungs are always present
        edges.insert((vs[0].min(vs[1]), vs[0].max(vs[1])));
        edges.insert((vs[2].min(vs[3]), vs[2].max(vs[3])));
        for (a, b) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            if rng.gen_bool(0.8) {
                let (u, v) = (vs[a], vs[b]);
                edges.insert((u.min(v), u.max(v)));
            }
        }
    }
    let graph = Graph::new(n, edges).unwrap();
    let m = graph.edge_count();
    let costs: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=5)).collect();
    let mode = if rng.gen_bool(0.5) { Mode::VertexTwoConnected } else { Mode::EdgeTwoConnected };
    let inst = Instance::new(graph, costs, std::iter::empty(), habitats, 1000, mode).unwrap();
    let order: Vec<usize> = (0..len).collect();
    (inst, order)
}

/// Cheapest combination of per-habitat feasible edge sets that agree on
/// shared edges, found by backtracking. Exact like [`brute_force`] but
/// usable on longer chains.
pub fn product_oracle(inst: &Instance) -> Option<u64> {
    let g = inst.graph();
    let families: Vec<(Vec<EdgeId>, Vec<u32>)> = inst
        .habitats()
        .iter()
        .map(|h| {
            let local: Vec<EdgeId> = g
                .edges()
                .filter(|&(_, (u, v))| h.contains(u) && h.contains(v))
                .map(|(e, _)| e)
                .collect();
            let sets = (0u32..1 << local.len())
                .filter(|&mask| {
                    let chosen: BTreeSet<EdgeId> =
                        local.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
                    local.iter().all(|e| !inst.is_forced(*e) || chosen.contains(e)) && habitat_ok(inst, h, &chosen)
                })
                .collect();
            (local, sets)
        })
        .collect();
    let mut state: Vec<Option<bool>> = vec![None; g.edge_count()];
    for e in inst.forced_edges() {
        state[e.0] = Some(true);
    }
    let base = inst.forced_cost();
    let mut best = None;
    search(inst, &families, 0, &mut state, base, &mut best);
    best
}

fn search(
    inst: &Instance,
    families: &[(Vec<EdgeId>, Vec<u32>)],
    depth: usize,
    state: &mut Vec<Option<bool>>,
    cost: u64,
    best: &mut Option<u64>,
) {
    if best.is_some_and(|b| cost >= b) {
        return;
    }
    let Some((local, sets)) = families.get(depth) else {
        *best = Some(cost);
        return;
    };
    for &mask in sets {
        let want = |i: usize| mask >> i & 1 == 1;
        if local.iter().enumerate().any(|(i, e)| state[e.0].is_some_and(|s| s != want(i))) {
            continue;
        }
        let fresh: Vec<(usize, EdgeId)> = local.iter().copied().enumerate().filter(|(_, e)| state[e.0].is_none()).collect();
        let mut added = 0;
        for &(i, e) in &fresh {
            state[e.0] = Some(want(i));
            if want(i) {
                added += inst.cost(e);
            }
        }
        search(inst, families, depth + 1, state, cost + added, best);
        for &(_, e) in &fresh {
            state[e.0] = None;
        }
    }
}
