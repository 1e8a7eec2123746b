//! Exact solvers: feasible-family enumeration, the path/cycle dynamic
//! program, exhaustive search for small components, branch and bound for
//! the rest, and the top-level pipeline.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::habitat_graph::{decompose, BasicHabitatGraph, ComponentDecomposition, Shape};
use crate::local::HabitatView;
use crate::model::{instance_stats, EdgeId, Instance, Mode, Origin, Provenance, Solution, Status};
use crate::preprocess::{reduce, InfeasibleReason, Reduction};

pub const DEFAULT_EXHAUSTIVE_THRESHOLD: usize = 18;
/// Bit-mask width of a family member.
pub const MASK_WIDTH: usize = 64;
/// Families are enumerated over at most this many free edges.
pub const FAMILY_FREE_LIMIT: usize = 24;
/// Exhaustive search refuses components with more free edges than this.
pub const EXHAUSTIVE_LIMIT: usize = 30;
const LB_ENUM_LIMIT: usize = 12;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Components of shape `Other` with at most this many free edges are
    /// searched exhaustively; larger ones go to branch and bound.
    pub exhaustive_threshold: usize,
    /// Solve components (and exhaustive scans) on the rayon pool.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { exhaustive_threshold: DEFAULT_EXHAUSTIVE_THRESHOLD, parallel: true }
    }
}

/// All edge subsets of `G[H]` that contain the local forced edges and
/// satisfy the mode predicate, as masks over `edges`, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibleFamily {
    pub habitat_index: usize,
    pub edges: Vec<EdgeId>,
    pub masks: Vec<u64>,
}

impl FeasibleFamily {
    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn edge_set(&self, i: usize) -> BTreeSet<EdgeId> {
        mask_edges(&self.edges, self.masks[i]).collect()
    }
}

fn mask_edges(edges: &[EdgeId], mask: u64) -> impl Iterator<Item = EdgeId> + '_ {
    edges.iter().enumerate().filter(move |(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e)
}

fn family_with<F: Fn(EdgeId) -> bool>(
    instance: &Instance,
    h: usize,
    view: &HabitatView,
    fixed: F,
) -> Result<FeasibleFamily> {
    let m = view.edge_count();
    if m > MASK_WIDTH {
        return Err(Error::Capacity(format!("habitat {h} induces {m} edges (mask width {MASK_WIDTH})")));
    }
    let mut base = 0u64;
    let mut free = Vec::new();
    for (i, &e) in view.edges.iter().enumerate() {
        if fixed(e) {
            base |= 1 << i;
        } else {
            free.push(i);
        }
    }
    if free.len() > FAMILY_FREE_LIMIT {
        return Err(Error::Capacity(format!(
            "habitat {h} has {} free edges (enumeration limit {FAMILY_FREE_LIMIT})",
            free.len()
        )));
    }
    let mode = instance.mode();
    let mut masks = Vec::new();
    for sub in 0u64..1 << free.len() {
        let mut mask = base;
        let mut bits = sub;
        while bits != 0 {
            mask |= 1 << free[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        if view.satisfied_mask(mode, mask) {
            masks.push(mask);
        }
    }
    Ok(FeasibleFamily { habitat_index: h, edges: view.edges.clone(), masks })
}

pub fn enumerate_feasible(instance: &Instance, habitat: usize) -> Result<FeasibleFamily> {
    if habitat >= instance.habitats().len() {
        return Err(Error::Usage(format!("habitat {habitat} does not exist")));
    }
    let view = HabitatView::new(instance, habitat);
    family_with(instance, habitat, &view, |e| instance.is_forced(e))
}

/// One position of the dynamic program: `value[j]` is the cheapest free
/// cost of covering the prefix with `family.masks[j]` chosen last, `back[j]`
/// the chosen predecessor index.
#[derive(Clone, Debug)]
pub struct DpLayer {
    pub family: FeasibleFamily,
    pub value: Vec<u64>,
    pub back: Vec<Option<usize>>,
}

#[derive(Clone, Debug)]
pub struct DpTable {
    pub layers: Vec<DpLayer>,
}

struct ChainResult {
    free_cost: u64,
    chosen: BTreeSet<EdgeId>,
}

fn free_cost<F: Fn(EdgeId) -> bool>(instance: &Instance, edges: &[EdgeId], mask: u64, fixed: &F) -> u64 {
    mask_edges(edges, mask).filter(|&e| !fixed(e)).map(|e| instance.cost(e)).sum()
}

/// Dynamic program over `order`. Only edges not in `fixed` are charged;
/// it is exact as long as non-consecutive habitats share no such edge.
fn chain_table<F: Fn(EdgeId) -> bool>(instance: &Instance, order: &[usize], fixed: &F) -> Result<Option<DpTable>> {
    let mut layers: Vec<DpLayer> = Vec::with_capacity(order.len());
    for &h in order {
        let view = HabitatView::new(instance, h);
        let family = family_with(instance, h, &view, fixed)?;
        if family.is_empty() {
            return Ok(None);
        }
        let own: Vec<u64> = family.masks.iter().map(|&m| free_cost(instance, &family.edges, m, fixed)).collect();
        let layer = match layers.last() {
            None => DpLayer { value: own, back: vec![None; family.len()], family },
            Some(prev) => {
                // free edges shared with the predecessor: (prev bit, cur bit, cost)
                let shared: Vec<(usize, usize, u64)> = prev
                    .family
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|&(_, &e)| !fixed(e))
                    .filter_map(|(i, &e)| view.position(e).map(|j| (i, j, instance.cost(e))))
                    .collect();
                let project = |mask: u64, cur: bool| -> u64 {
                    shared.iter().enumerate().fold(0, |acc, (k, &(i, j, _))| {
                        let bit = if cur { j } else { i };
                        acc | ((mask >> bit & 1) << k)
                    })
                };
                let overlap = |bits: u64| -> u64 {
                    shared.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, s)| s.2).sum()
                };
                // cheapest predecessor per projection; ascending masks keep the lowest on ties
                let mut groups: HashMap<u64, (u64, u64, usize)> = HashMap::new();
                for (j, &mask) in prev.family.masks.iter().enumerate() {
                    let key = project(mask, false);
                    let cand = (prev.value[j], mask, j);
                    groups.entry(key).and_modify(|g| {
                        if (cand.0, cand.1) < (g.0, g.1) {
                            *g = cand;
                        }
                    }).or_insert(cand);
                }
                let groups: Vec<(u64, (u64, u64, usize))> = groups.into_iter().collect();
                let mut value = Vec::with_capacity(family.len());
                let mut back = Vec::with_capacity(family.len());
                for (j, &mask) in family.masks.iter().enumerate() {
                    let q = project(mask, true);
                    let best = groups
                        .iter()
                        .map(|&(p, (v, pm, idx))| (v + own[j] - overlap(p & q), pm, idx))
                        .min_by_key(|&(v, pm, _)| (v, pm))
                        .expect("non-empty predecessor family");
                    value.push(best.0);
                    back.push(Some(best.2));
                }
                DpLayer { family, value, back }
            }
        };
        layers.push(layer);
    }
    Ok(Some(DpTable { layers }))
}

fn chain_dp<F: Fn(EdgeId) -> bool>(instance: &Instance, order: &[usize], fixed: &F) -> Result<Option<ChainResult>> {
    let Some(table) = chain_table(instance, order, fixed)? else {
        return Ok(None);
    };
    let last = table.layers.last().expect("non-empty order");
    let (mut j, free) = last
        .value
        .iter()
        .enumerate()
        .min_by_key(|&(j, &v)| (v, last.family.masks[j]))
        .map(|(j, &v)| (j, v))
        .expect("non-empty family");
    let mut chosen = BTreeSet::new();
    for layer in table.layers.iter().rev() {
        chosen.extend(layer.family.edge_set(j));
        if let Some(p) = layer.back[j] {
            j = p;
        }
    }
    debug_assert_eq!(chosen.iter().filter(|&&e| !fixed(e)).map(|&e| instance.cost(e)).sum::<u64>(), free);
    Ok(Some(ChainResult { free_cost: free, chosen }))
}

fn check_order(instance: &Instance, order: &[usize], cyclic: bool) -> Result<()> {
    let n = instance.habitats().len();
    let mut seen = HashSet::new();
    for &h in order {
        if h >= n || !seen.insert(h) {
            return Err(Error::Usage(format!("habitat order {order:?} is not a list of distinct habitats")));
        }
    }
    if order.is_empty() || (cyclic && order.len() < 3) {
        return Err(Error::Usage(format!("{} habitats cannot form a {}", order.len(), if cyclic { "cycle" } else { "path" })));
    }
    let hg = BasicHabitatGraph::build(instance);
    let len = order.len();
    for i in 0..len {
        for j in i + 1..len {
            let expected = j == i + 1 || (cyclic && i == 0 && j == len - 1);
            if hg.is_adjacent(order[i], order[j]) != expected {
                let what = if cyclic { "cycle" } else { "path" };
                return Err(Error::Usage(format!(
                    "habitats {} and {} break the {what} shape of the basic habitat graph",
                    order[i], order[j]
                )));
            }
        }
    }
    Ok(())
}

fn assemble(instance: &Instance, chosen: impl IntoIterator<Item = EdgeId>, origin: Origin) -> Solution {
    let forced: Vec<EdgeId> = instance.forced_edges().collect();
    let mut selected: BTreeSet<EdgeId> = forced.iter().copied().collect();
    let mut extra = Vec::new();
    for e in chosen {
        if selected.insert(e) {
            extra.push(e);
        }
    }
    extra.sort_unstable();
    let cost = instance.cost_of(&selected);
    Solution {
        selected,
        cost,
        status: Status::Optimal,
        trace: vec![Provenance { origin: Origin::Forced, edges: forced }, Provenance { origin, edges: extra }],
    }
}

fn path_dp(instance: &Instance, order: &[usize], component: usize) -> Result<Solution> {
    let fixed = |e: EdgeId| instance.is_forced(e);
    Ok(match chain_dp(instance, order, &fixed)? {
        Some(r) => assemble(instance, r.chosen, Origin::PathDp { component }),
        None => Solution::infeasible(Origin::InfeasibleComponent { component }),
    })
}

fn cycle_dp(instance: &Instance, order: &[usize], component: usize) -> Result<Solution> {
    let view0 = HabitatView::new(instance, order[0]);
    let fam0 = family_with(instance, order[0], &view0, |e| instance.is_forced(e))?;
    let mut best: Option<(u64, BTreeSet<EdgeId>)> = None;
    for &mask0 in &fam0.masks {
        let first: HashSet<EdgeId> = mask_edges(&fam0.edges, mask0).collect();
        let own: u64 = first.iter().filter(|&&e| !instance.is_forced(e)).map(|&e| instance.cost(e)).sum();
        if best.as_ref().is_some_and(|(b, _)| own >= *b) {
            continue;
        }
        let fixed = |e: EdgeId| instance.is_forced(e) || first.contains(&e);
        if let Some(r) = chain_dp(instance, &order[1..], &fixed)? {
            let total = own + r.free_cost;
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                let mut chosen = r.chosen;
                chosen.extend(first.iter().copied());
                best = Some((total, chosen));
            }
        }
    }
    Ok(match best {
        Some((_, chosen)) => assemble(instance, chosen, Origin::CycleDp { component }),
        None => Solution::infeasible(Origin::InfeasibleComponent { component }),
    })
}

/// Optimum over the listed habitats, which must form a path of the basic
/// habitat graph in walk order.
pub fn dp_path(instance: &Instance, ordered_habitats: &[usize]) -> Result<Solution> {
    check_order(instance, ordered_habitats, false)?;
    path_dp(instance, ordered_habitats, 0)
}

/// Optimum over the listed habitats, which must form a cycle of the basic
/// habitat graph in cyclic order.
pub fn dp_cycle(instance: &Instance, ordered_habitats: &[usize]) -> Result<Solution> {
    check_order(instance, ordered_habitats, true)?;
    cycle_dp(instance, ordered_habitats, 0)
}

/// The DP table for a path-ordered habitat list, for inspection.
pub fn dp_table(instance: &Instance, ordered_habitats: &[usize]) -> Result<Option<DpTable>> {
    check_order(instance, ordered_habitats, false)?;
    chain_table(instance, ordered_habitats, &|e| instance.is_forced(e))
}

struct Checker {
    views: Vec<(HabitatView, Vec<Option<usize>>)>,
    mode: Mode,
}

impl Checker {
    fn new(instance: &Instance, free: &[EdgeId]) -> Self {
        let views = (0..instance.habitats().len())
            .map(|h| {
                let view = HabitatView::new(instance, h);
                let map = view.edges.iter().map(|e| free.binary_search(e).ok()).collect();
                (view, map)
            })
            .collect();
        Checker { views, mode: instance.mode() }
    }

    fn feasible(&self, mask: u64) -> bool {
        self.views
            .iter()
            .all(|(view, map)| view.satisfied(self.mode, |i| map[i].is_none_or(|j| mask >> j & 1 == 1)))
    }
}

fn exhaustive(instance: &Instance, component: usize, parallel: bool) -> Result<Solution> {
    let free: Vec<EdgeId> = instance.graph().edge_ids().filter(|&e| !instance.is_forced(e)).collect();
    let f = free.len();
    if f > EXHAUSTIVE_LIMIT {
        return Err(Error::Capacity(format!("{f} free edges exceed the exhaustive limit {EXHAUSTIVE_LIMIT}")));
    }
    let checker = Checker::new(instance, &free);
    let full = if f == 0 { 0 } else { u64::MAX >> (64 - f) };
    let infeasible = || Solution::infeasible(Origin::InfeasibleComponent { component });
    if !checker.feasible(full) {
        return Ok(infeasible());
    }
    let costs: Vec<u64> = free.iter().map(|&e| instance.cost(e)).collect();
    let count = 1usize << f;
    let best_mask = if costs.iter().all(|&c| c == 1) {
        // by size, lowest mask within a size
        (0..=f as u32).find_map(|k| {
            let hit = |m: &usize| (*m as u64).count_ones() == k && checker.feasible(*m as u64);
            if parallel {
                (0..count).into_par_iter().find_first(hit)
            } else {
                (0..count).find(hit)
            }
        })
    } else {
        let mask_cost = |m: u64| -> u64 {
            let mut bits = m;
            let mut c = 0;
            while bits != 0 {
                c += costs[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            c
        };
        let bound = AtomicU64::new(mask_cost(full));
        let scan = |chunk: usize| -> Option<(u64, usize)> {
            let lo = chunk << 10;
            let hi = (lo + 1024).min(count);
            let mut best: Option<(u64, usize)> = None;
            for m in lo..hi {
                let c = mask_cost(m as u64);
                if c > bound.load(Ordering::Relaxed) || best.is_some_and(|b| c >= b.0) {
                    continue;
                }
                if checker.feasible(m as u64) {
                    bound.fetch_min(c, Ordering::Relaxed);
                    best = Some((c, m));
                }
            }
            best
        };
        let chunks = count.div_ceil(1024);
        let found = if parallel {
            (0..chunks).into_par_iter().filter_map(scan).min()
        } else {
            (0..chunks).filter_map(scan).min()
        };
        found.map(|(_, m)| m)
    };
    let mask = best_mask.expect("full edge set is feasible") as u64;
    Ok(assemble(instance, mask_edges(&free, mask), Origin::Exhaustive { component }))
}

/// Exhaustive search over all subsets of free edges: lowest cost, then
/// lowest mask over the free edges in id order.
pub fn exhaustive_search(instance: &Instance) -> Result<Solution> {
    exhaustive(instance, 0, true)
}

const UNDECIDED: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

#[derive(Clone)]
struct Node {
    state: Vec<u8>,
    satisfied: Vec<bool>,
    cost: u64,
}

struct Search<'a> {
    instance: &'a Instance,
    views: Vec<HabitatView>,
    edge_habitats: Vec<Vec<usize>>,
    mode: Mode,
    include_first: bool,
    best_cost: u64,
    best: Option<Vec<u8>>,
}

impl<'a> Search<'a> {
    fn new(instance: &'a Instance) -> Self {
        let views: Vec<HabitatView> = (0..instance.habitats().len()).map(|h| HabitatView::new(instance, h)).collect();
        let mut edge_habitats = vec![Vec::new(); instance.graph().edge_count()];
        for (h, v) in views.iter().enumerate() {
            for e in &v.edges {
                edge_habitats[e.0].push(h);
            }
        }
        let include_first = instance.graph().edge_ids().filter(|&e| !instance.is_forced(e)).all(|e| instance.cost(e) == 1);
        Search {
            instance,
            views,
            edge_habitats,
            mode: instance.mode(),
            include_first,
            best_cost: u64::MAX,
            best: None,
        }
    }

    fn available(&self, node: &Node, h: usize, skip: Option<usize>) -> bool {
        let v = &self.views[h];
        v.satisfied(self.mode, |i| Some(i) != skip && node.state[v.edges[i].0] != OUT)
    }

    fn included(&self, node: &Node, h: usize) -> bool {
        let v = &self.views[h];
        v.satisfied(self.mode, |i| node.state[v.edges[i].0] == IN)
    }

    /// Fixpoint of the exclusion and forcing checks; false on a dead end.
    fn propagate(&self, node: &mut Node, seeds: &[usize]) -> bool {
        let mut queued = vec![false; self.views.len()];
        let mut queue = VecDeque::new();
        for &h in seeds {
            if !node.satisfied[h] && !queued[h] {
                queued[h] = true;
                queue.push_back(h);
            }
        }
        while let Some(h) = queue.pop_front() {
            queued[h] = false;
            if node.satisfied[h] {
                continue;
            }
            if !self.available(node, h, None) {
                return false;
            }
            if self.included(node, h) {
                node.satisfied[h] = true;
                continue;
            }
            for i in 0..self.views[h].edge_count() {
                let e = self.views[h].edges[i];
                if node.state[e.0] == UNDECIDED && !self.available(node, h, Some(i)) {
                    node.state[e.0] = IN;
                    node.cost += self.instance.cost(e);
                    for &g in &self.edge_habitats[e.0] {
                        if !node.satisfied[g] && !queued[g] {
                            queued[g] = true;
                            queue.push_back(g);
                        }
                    }
                }
            }
        }
        for e in 0..node.state.len() {
            if node.state[e] == UNDECIDED && self.edge_habitats[e].iter().all(|&h| node.satisfied[h]) {
                node.state[e] = OUT;
            }
        }
        true
    }

    /// Cost-splitting bound: every undecided edge's cost is shared equally
    /// among the unsatisfied habitats containing it. Also returns the
    /// branching edge.
    fn bound(&self, node: &Node) -> (u64, Option<EdgeId>) {
        let mut count = vec![0u64; node.state.len()];
        for (h, v) in self.views.iter().enumerate() {
            if node.satisfied[h] {
                continue;
            }
            for e in &v.edges {
                if node.state[e.0] == UNDECIDED {
                    count[e.0] += 1;
                }
            }
        }
        let branch = (0..count.len()).filter(|&e| count[e] > 0).max_by_key(|&e| (count[e], std::cmp::Reverse(e))).map(EdgeId);
        let mut scale: u64 = 1;
        for &c in count.iter().filter(|&&c| c > 1) {
            let g = gcd(scale, c);
            match (scale / g).checked_mul(c) {
                Some(l) if l <= 1 << 24 => scale = l,
                _ => {
                    scale = 0;
                    break;
                }
            }
        }
        // floor division stays admissible when the exact scale is too large
        let (scale, exact) = if scale == 0 { (1, false) } else { (scale, true) };
        let weight = |e: usize| -> u64 {
            let c = self.instance.cost(EdgeId(e)) as u128 * scale as u128;
            (c / count[e] as u128).min(u64::MAX as u128 / 4096) as u64
        };
        let mut total: u64 = 0;
        for (h, v) in self.views.iter().enumerate() {
            if node.satisfied[h] {
                continue;
            }
            let open: Vec<(usize, u64)> = v
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| node.state[e.0] == UNDECIDED)
                .map(|(i, e)| (i, weight(e.0)))
                .collect();
            let least = if open.len() <= LB_ENUM_LIMIT {
                let mut best: u64 = open.iter().map(|o| o.1).sum();
                let mut local = vec![usize::MAX; v.edge_count()];
                for (k, &(i, _)) in open.iter().enumerate() {
                    local[i] = k;
                }
                for sub in 1u64..(1 << open.len()) - 1 {
                    let mut bits = sub;
                    let mut c = 0;
                    while bits != 0 {
                        c += open[bits.trailing_zeros() as usize].1;
                        bits &= bits - 1;
                    }
                    if c >= best {
                        continue;
                    }
                    let ok = v.satisfied(self.mode, |i| {
                        node.state[v.edges[i].0] == IN || (local[i] != usize::MAX && sub >> local[i] & 1 == 1)
                    });
                    if ok {
                        best = c;
                    }
                }
                best
            } else {
                open.iter().map(|o| o.1).min().unwrap_or(0)
            };
            total = total.saturating_add(least);
        }
        let lb = if exact { total.div_ceil(scale) } else { total };
        (lb, branch)
    }

    fn record(&mut self, node: &Node) {
        if node.cost < self.best_cost {
            self.best_cost = node.cost;
            self.best = Some(node.state.clone());
        }
    }

    fn dfs(&mut self, node: Node) {
        if node.satisfied.iter().all(|&s| s) {
            self.record(&node);
            return;
        }
        if node.cost >= self.best_cost {
            return;
        }
        let (lb, branch) = self.bound(&node);
        if node.cost.saturating_add(lb) >= self.best_cost {
            return;
        }
        let e = branch.expect("an unsatisfied habitat has an undecided edge");
        let order = if self.include_first { [IN, OUT] } else { [OUT, IN] };
        for choice in order {
            let mut child = node.clone();
            child.state[e.0] = choice;
            if choice == IN {
                child.cost += self.instance.cost(e);
            }
            let seeds = self.edge_habitats[e.0].clone();
            if self.propagate(&mut child, &seeds) {
                self.dfs(child);
            }
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn bnb(instance: &Instance, component: usize) -> Solution {
    let mut search = Search::new(instance);
    let m = instance.graph().edge_count();
    let mut root = Node {
        state: (0..m).map(|e| if instance.is_forced(EdgeId(e)) { IN } else { UNDECIDED }).collect(),
        satisfied: vec![false; search.views.len()],
        cost: instance.forced_cost(),
    };
    let all: Vec<usize> = (0..search.views.len()).collect();
    if !search.propagate(&mut root, &all) {
        return Solution::infeasible(Origin::InfeasibleComponent { component });
    }
    // incumbent: every edge
    search.best_cost = instance.costs().iter().sum();
    search.best = Some(vec![IN; m]);
    search.dfs(root);
    let state = search.best.expect("incumbent");
    let chosen = (0..m).filter(|&e| state[e] == IN).map(EdgeId);
    assemble(instance, chosen, Origin::BranchAndBound { component })
}

/// Exact branch and bound with habitat-driven propagation.
pub fn branch_and_bound(instance: &Instance) -> Solution {
    bnb(instance, 0)
}

fn general(instance: &Instance, component: usize, config: &SolverConfig) -> Result<Solution> {
    let free = instance.graph().edge_count() - instance.forced_count();
    if free <= config.exhaustive_threshold.min(EXHAUSTIVE_LIMIT) {
        exhaustive(instance, component, config.parallel)
    } else {
        Ok(bnb(instance, component))
    }
}

fn singleton(instance: &Instance, component: usize) -> Result<Solution> {
    let fam = enumerate_feasible(instance, 0)?;
    if fam.is_empty() {
        return Ok(Solution::infeasible(Origin::InfeasibleComponent { component }));
    }
    let fixed = |e: EdgeId| instance.is_forced(e);
    let best = (0..fam.len())
        .min_by_key(|&j| (free_cost(instance, &fam.edges, fam.masks[j], &fixed), fam.masks[j]))
        .expect("non-empty family");
    Ok(assemble(instance, fam.edge_set(best), Origin::Singleton { component }))
}

fn solve_component_in(component: &Instance, shape: Shape, index: usize, config: &SolverConfig) -> Result<Solution> {
    let order: Vec<usize> = (0..component.habitats().len()).collect();
    let attempt = match shape {
        Shape::Singleton if order.len() == 1 => singleton(component, index),
        Shape::Path => check_order(component, &order, false).and_then(|_| path_dp(component, &order, index)),
        Shape::Cycle => check_order(component, &order, true).and_then(|_| cycle_dp(component, &order, index)),
        _ => return general(component, index, config),
    };
    match attempt {
        Err(Error::Capacity(_)) => general(component, index, config),
        other => other,
    }
}

/// Solves one component produced by `decompose`, whose habitats are listed
/// in walk order for paths and cycles.
pub fn solve_component(component: &Instance, shape: Shape) -> Result<Solution> {
    solve_component_in(component, shape, 0, &SolverConfig::default())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    pub diagnostic: Option<String>,
}

impl Verdict {
    fn fail(msg: String) -> Self {
        Verdict { ok: false, diagnostic: Some(msg) }
    }
}

fn check(instance: &Instance, selected: &BTreeSet<EdgeId>, budget: bool) -> Verdict {
    let g = instance.graph();
    if let Some(e) = selected.iter().find(|e| e.0 >= g.edge_count()) {
        return Verdict::fail(format!("unknown edge {e}"));
    }
    if let Some(e) = instance.forced_edges().find(|e| !selected.contains(e)) {
        let (u, v) = g.endpoints(e);
        return Verdict::fail(format!("forced edge missing: {u} {v}"));
    }
    let cost = instance.cost_of(selected);
    if budget && cost > instance.budget() {
        return Verdict::fail(format!("cost {cost} exceeds budget {}", instance.budget()));
    }
    for h in 0..instance.habitats().len() {
        let view = HabitatView::new(instance, h);
        if !view.satisfied(instance.mode(), |i| selected.contains(&view.edges[i])) {
            let what = match instance.mode() {
                Mode::VertexTwoConnected => "2-vertex-connected",
                Mode::EdgeTwoConnected => "2-edge-connected",
            };
            return Verdict::fail(format!("habitat {h} is not {what}"));
        }
    }
    Verdict { ok: true, diagnostic: None }
}

/// Checks forced edges, the budget and every habitat, in that order.
pub fn verify(instance: &Instance, selected: &BTreeSet<EdgeId>) -> Verdict {
    check(instance, selected, true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// η ≤ 4, Δ ≤ 4: components have at most five habitats.
    Eta4Delta4,
    /// η ≤ 4, Δ ≤ 5: triangle-sharing components span at most six
    /// vertices, all others are paths or cycles.
    Eta4Delta5,
    /// η ≤ 6, Δ ≤ 3: a component holding a six-vertex habitat spans six
    /// vertices.
    Eta6Delta3,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RegimeReport {
    pub regimes: Vec<Regime>,
    pub violations: Vec<String>,
}

/// Structural checks for the polynomial regimes, on a reduced instance.
pub fn regime_diagnostics(reduced: &Instance, hg: &BasicHabitatGraph, dec: &ComponentDecomposition) -> RegimeReport {
    let stats = instance_stats(reduced);
    let mut report = RegimeReport::default();
    if stats.eta <= 4 && stats.delta <= 4 {
        report.regimes.push(Regime::Eta4Delta4);
    }
    if stats.eta <= 4 && stats.delta <= 5 {
        report.regimes.push(Regime::Eta4Delta5);
    }
    if stats.eta <= 6 && stats.delta <= 3 {
        report.regimes.push(Regime::Eta6Delta3);
    }
    let habitats = reduced.habitats();
    let triangle = |a: usize, b: usize| -> bool {
        let common: Vec<usize> =
            habitats[a].vertices().iter().copied().filter(|&v| habitats[b].contains(v)).collect();
        common.len() == 3 && reduced.graph().induced_edges(&common).len() == 3
    };
    for (i, comp) in dec.components.iter().enumerate() {
        let union = comp.vertex_origin.len();
        for &regime in &report.regimes {
            let problem = match regime {
                Regime::Eta4Delta4 => {
                    (comp.habitats.len() > 5).then(|| format!("{} habitats", comp.habitats.len()))
                }
                Regime::Eta4Delta5 => {
                    let tri = comp
                        .habitats
                        .iter()
                        .any(|&a| hg.neighbors(a).iter().any(|&b| a < b && triangle(a, b)));
                    if tri {
                        (union > 6).then(|| format!("triangle intersection but union of {union} vertices"))
                    } else {
                        (comp.shape == Shape::Other).then(|| "shape is neither path nor cycle".to_string())
                    }
                }
                Regime::Eta6Delta3 => {
                    let six = comp.habitats.iter().any(|&h| habitats[h].len() == 6);
                    (six && union != 6).then(|| format!("six-vertex habitat but union of {union} vertices"))
                }
            };
            if let Some(p) = problem {
                report.violations.push(format!("{regime:?}: component {i}: {p}"));
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSummary {
    /// habitats of the input instance
    pub habitats: Vec<usize>,
    pub shape: Shape,
    pub free_edges: usize,
    pub origin: Origin,
    /// cost of the component's selected edges, its forced edges included
    pub cost: u64,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: Solution,
    /// cost within the input budget (false when infeasible)
    pub answer: bool,
    pub budget: u64,
    pub components: Vec<ComponentSummary>,
    pub regime: RegimeReport,
    pub elapsed: Duration,
}

fn infeasible_report(instance: &Instance, origin: Origin, start: Instant) -> SolveReport {
    SolveReport {
        solution: Solution::infeasible(origin),
        answer: false,
        budget: instance.budget(),
        components: Vec::new(),
        regime: RegimeReport::default(),
        elapsed: start.elapsed(),
    }
}

/// Reduce, decompose and solve every component exactly.
pub fn solve_with(instance: &Instance, config: &SolverConfig) -> Result<SolveReport> {
    let start = Instant::now();
    let total: u64 = instance.costs().iter().sum();
    // the budget only decides yes/no; it must not stop the optimisation
    let relaxed = instance.clone().with_budget(total);
    let red: Reduction = match reduce(&relaxed) {
        Ok(r) => r,
        Err(inf) => {
            let origin = match inf.reason {
                InfeasibleReason::HabitatNotConnected { original_habitat, .. } => {
                    Origin::InfeasibleHabitat { habitat: original_habitat }
                }
                InfeasibleReason::BudgetExceeded { .. } => Origin::RemovedForced,
            };
            return Ok(infeasible_report(instance, origin, start));
        }
    };
    let hg = BasicHabitatGraph::build(&red.instance);
    let dec = decompose(&red.instance, &hg);
    let regime = regime_diagnostics(&red.instance, &hg, &dec);
    let run = |(i, c): (usize, &crate::habitat_graph::Component)| solve_component_in(&c.sub_instance, c.shape, i, config);
    let results: Vec<Result<Solution>> = if config.parallel {
        dec.components.par_iter().enumerate().map(run).collect()
    } else {
        dec.components.iter().enumerate().map(run).collect()
    };

    let to_input = |e: EdgeId| red.edge_origin[e.0];
    let mut forced: Vec<EdgeId> = red.instance.forced_edges().map(to_input).collect();
    forced.sort_unstable();
    let mut selected: BTreeSet<EdgeId> = forced.iter().copied().collect();
    let mut trace = vec![Provenance { origin: Origin::Forced, edges: forced }];
    if !red.removed_forced.is_empty() {
        let mut removed = red.removed_forced.clone();
        removed.sort_unstable();
        selected.extend(removed.iter().copied());
        trace.push(Provenance { origin: Origin::RemovedForced, edges: removed });
    }
    let mut components = Vec::with_capacity(results.len());
    for (i, (comp, res)) in dec.components.iter().zip(results).enumerate() {
        let sol = res?;
        if sol.is_infeasible() {
            return Ok(infeasible_report(instance, Origin::InfeasibleComponent { component: i }, start));
        }
        let chosen = sol.trace.last().expect("solver provenance");
        let edges: Vec<EdgeId> = chosen.edges.iter().map(|&e| to_input(comp.edge_origin[e.0])).collect();
        selected.extend(edges.iter().copied());
        components.push(ComponentSummary {
            habitats: comp.habitats.iter().map(|&h| red.habitat_origin[h]).collect(),
            shape: comp.shape,
            free_edges: comp.sub_instance.graph().edge_count() - comp.sub_instance.forced_count(),
            origin: chosen.origin.clone(),
            cost: sol.cost,
        });
        trace.push(Provenance { origin: chosen.origin.clone(), edges });
    }
    let cost = instance.cost_of(&selected);
    let verdict = check(instance, &selected, false);
    if !verdict.ok {
        return Err(Error::Verification(verdict.diagnostic.unwrap_or_default()));
    }
    Ok(SolveReport {
        answer: cost <= instance.budget(),
        budget: instance.budget(),
        solution: Solution { selected, cost, status: Status::Optimal, trace },
        components,
        regime,
        elapsed: start.elapsed(),
    })
}

pub fn solve(instance: &Instance) -> Result<Solution> {
    Ok(solve_with(instance, &SolverConfig::default())?.solution)
}
