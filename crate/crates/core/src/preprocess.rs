//! The five reduction rules and the fixpoint driver.
//!
//! Rules are applied in the fixed order RR1, RR2, RR3, RR4, RR5 and the
//! sequence is repeated until none of them changes the instance. Every
//! change is logged as a [`ReductionStep`]; replaying the steps on the
//! original instance yields the reduced instance exactly.
//!
//! Index payloads refer to the numbering in force when the step is applied.
//! Batched deletions are logged in descending index order, so each logged
//! index is valid at the moment it is replayed.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, ParseError};
use crate::local::HabitatView;
use crate::model::{EdgeId, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    RR1,
    RR2,
    RR3,
    RR4,
    RR5,
}

impl Rule {
    fn number(self) -> u8 {
        match self {
            Rule::RR1 => 1,
            Rule::RR2 => 2,
            Rule::RR3 => 3,
            Rule::RR4 => 4,
            Rule::RR5 => 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Payload {
    Habitat(usize),
    Edge(EdgeId),
    /// edge forced because of this habitat
    HabitatEdge(usize, EdgeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: Rule,
    pub payload: Payload,
    pub budget_delta: i64,
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RR{} ", self.rule.number())?;
        match self.payload {
            Payload::Habitat(h) => write!(f, "h{h}")?,
            Payload::Edge(e) => write!(f, "e{}", e.0)?,
            Payload::HabitatEdge(h, e) => write!(f, "h{h}:e{}", e.0)?,
        }
        write!(f, " {}", self.budget_delta)
    }
}

impl FromStr for ReductionStep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let [rule, payload, delta] = parts[..] else {
            return Err(format!("expected `RR<i> <payload> <budget_delta>`, got `{s}`"));
        };
        let rule = match rule {
            "RR1" => Rule::RR1,
            "RR2" => Rule::RR2,
            "RR3" => Rule::RR3,
            "RR4" => Rule::RR4,
            "RR5" => Rule::RR5,
            other => return Err(format!("unknown rule `{other}`")),
        };
        let num = |t: &str, prefix: char| -> Result<usize, String> {
            t.strip_prefix(prefix)
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| format!("bad payload token `{t}`"))
        };
        let payload = match payload.split_once(':') {
            Some((h, e)) => Payload::HabitatEdge(num(h, 'h')?, EdgeId(num(e, 'e')?)),
            None if payload.starts_with('h') => Payload::Habitat(num(payload, 'h')?),
            None => Payload::Edge(EdgeId(num(payload, 'e')?)),
        };
        let budget_delta = delta.parse().map_err(|_| format!("bad budget delta `{delta}`"))?;
        Ok(ReductionStep { rule, payload, budget_delta })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
}

impl ReductionTrace {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// One step per line.
    pub fn to_text(&self) -> String {
        self.steps.iter().map(|s| format!("{s}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut steps = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            steps.push(line.parse().map_err(|m| ParseError::new(i + 1, m))?);
        }
        Ok(ReductionTrace { steps })
    }

    /// Re-applies the logged steps to `original`.
    pub fn replay(&self, original: &Instance) -> Result<Instance, Error> {
        let mut inst = original.clone();
        for (i, step) in self.steps.iter().enumerate() {
            let bad = || Error::Input(format!("trace step {} (`{step}`) does not apply", i + 1));
            match (step.rule, step.payload) {
                (Rule::RR2 | Rule::RR4, Payload::Habitat(h)) if h < inst.habitats().len() => {
                    inst.remove_habitat(h);
                }
                (Rule::RR3, Payload::HabitatEdge(h, e))
                    if h < inst.habitats().len() && e.0 < inst.graph().edge_count() =>
                {
                    inst.set_forced(e);
                }
                (Rule::RR5, Payload::Edge(e)) if e.0 < inst.graph().edge_count() => {
                    let budget = inst.budget() as i128 + step.budget_delta as i128;
                    if budget < 0 {
                        return Err(bad());
                    }
                    inst.set_budget(budget as u64);
                    inst.remove_edges(&[e]);
                }
                _ => return Err(bad()),
            }
        }
        Ok(inst)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// `G[H]` itself fails the mode predicate (RR1). Indices are into the
    /// instance handed to the rule and into the original input.
    HabitatNotConnected { habitat: usize, original_habitat: usize },
    /// Deleting forced edges would drive the budget below zero (RR5).
    BudgetExceeded { edge: EdgeId, cost: u64, budget: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infeasible {
    pub reason: InfeasibleReason,
    pub trace: ReductionTrace,
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reason {
            InfeasibleReason::HabitatNotConnected { original_habitat, .. } => {
                write!(f, "habitat {original_habitat} cannot be made 2-connected")
            }
            InfeasibleReason::BudgetExceeded { cost, budget, .. } => {
                write!(f, "forced edges cost more than the budget ({cost} > {budget})")
            }
        }
    }
}

/// Output of [`reduce`]: the reduced instance with its trace and the
/// bookkeeping needed to map results back to the input.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub instance: Instance,
    pub trace: ReductionTrace,
    /// reduced edge id -> input edge id
    pub edge_origin: Vec<EdgeId>,
    /// reduced habitat index -> input habitat index
    pub habitat_origin: Vec<usize>,
    /// forced input edges deleted by RR5
    pub removed_forced: Vec<EdgeId>,
}

impl Reduction {
    /// Sum of the budget deltas, i.e. the cost of forced edges deleted by RR5.
    pub fn removed_forced_cost(&self) -> u64 {
        self.trace.steps.iter().map(|s| (-s.budget_delta) as u64).sum()
    }
}

struct Working {
    inst: Instance,
    edge_origin: Vec<EdgeId>,
    habitat_origin: Vec<usize>,
    removed_forced: Vec<EdgeId>,
    trace: ReductionTrace,
}

impl Working {
    fn new(inst: Instance) -> Self {
        Working {
            edge_origin: inst.graph().edge_ids().collect(),
            habitat_origin: (0..inst.habitats().len()).collect(),
            removed_forced: Vec::new(),
            trace: ReductionTrace::default(),
            inst,
        }
    }

    fn log(&mut self, rule: Rule, payload: Payload, budget_delta: i64) {
        self.trace.steps.push(ReductionStep { rule, payload, budget_delta });
    }

    fn remove_habitats(&mut self, rule: Rule, mut doomed: Vec<usize>) -> bool {
        doomed.sort_unstable_by(|a, b| b.cmp(a));
        for &h in &doomed {
            self.inst.remove_habitat(h);
            self.habitat_origin.remove(h);
            self.log(rule, Payload::Habitat(h), 0);
        }
        !doomed.is_empty()
    }

    fn rr1(&self) -> Option<InfeasibleReason> {
        trivial_no_index(&self.inst).map(|h| InfeasibleReason::HabitatNotConnected {
            habitat: h,
            original_habitat: self.habitat_origin[h],
        })
    }

    fn rr2(&mut self) -> bool {
        let doomed = duplicate_habitats(&self.inst);
        self.remove_habitats(Rule::RR2, doomed)
    }

    fn rr3(&mut self) -> bool {
        let forced = edges_to_force(&self.inst);
        for &(h, e) in &forced {
            self.inst.set_forced(e);
            self.log(Rule::RR3, Payload::HabitatEdge(h, e), 0);
        }
        !forced.is_empty()
    }

    fn rr4(&mut self) -> bool {
        let doomed = solved_habitats(&self.inst);
        self.remove_habitats(Rule::RR4, doomed)
    }

    fn rr5(&mut self) -> Result<bool, InfeasibleReason> {
        let mut doomed = unused_edges(&self.inst);
        doomed.sort_unstable_by(|a, b| b.cmp(a));
        let mut budget = self.inst.budget();
        for &e in &doomed {
            let mut delta = 0;
            if self.inst.is_forced(e) {
                let c = self.inst.cost(e);
                if c > budget {
                    return Err(InfeasibleReason::BudgetExceeded { edge: e, cost: c, budget });
                }
                budget -= c;
                delta = -(c as i64);
                self.removed_forced.push(self.edge_origin[e.0]);
            }
            self.log(Rule::RR5, Payload::Edge(e), delta);
        }
        self.inst.set_budget(budget);
        self.inst.remove_edges(&doomed);
        for &e in &doomed {
            self.edge_origin.remove(e.0);
        }
        Ok(!doomed.is_empty())
    }

    fn fail(self, reason: InfeasibleReason) -> Infeasible {
        Infeasible { reason, trace: self.trace }
    }

    fn finish(self) -> Reduction {
        Reduction {
            instance: self.inst,
            trace: self.trace,
            edge_origin: self.edge_origin,
            habitat_origin: self.habitat_origin,
            removed_forced: self.removed_forced,
        }
    }
}

fn trivial_no_index(inst: &Instance) -> Option<usize> {
    let mode = inst.mode();
    (0..inst.habitats().len()).find(|&h| !HabitatView::new(inst, h).satisfied(mode, |_| true))
}

fn duplicate_habitats(inst: &Instance) -> Vec<usize> {
    let mut seen = std::collections::HashSet::new();
    let hs = inst.habitats();
    (0..hs.len()).filter(|&h| !seen.insert(&hs[h])).collect()
}

fn edges_to_force(inst: &Instance) -> Vec<(usize, EdgeId)> {
    let mode = inst.mode();
    let mut newly = vec![false; inst.graph().edge_count()];
    let mut out = Vec::new();
    for h in 0..inst.habitats().len() {
        let view = HabitatView::new(inst, h);
        for (i, &e) in view.edges.iter().enumerate() {
            if inst.is_forced(e) || newly[e.0] {
                continue;
            }
            if !view.satisfied(mode, |j| j != i) {
                newly[e.0] = true;
                out.push((h, e));
            }
        }
    }
    out
}

fn solved_habitats(inst: &Instance) -> Vec<usize> {
    let mode = inst.mode();
    (0..inst.habitats().len())
        .filter(|&h| {
            let view = HabitatView::new(inst, h);
            view.satisfied(mode, |i| inst.is_forced(view.edges[i]))
        })
        .collect()
}

fn unused_edges(inst: &Instance) -> Vec<EdgeId> {
    let mut used = vec![false; inst.graph().edge_count()];
    for h in 0..inst.habitats().len() {
        for e in inst.habitat_edges(h) {
            used[e.0] = true;
        }
    }
    inst.graph().edge_ids().filter(|e| !used[e.0]).collect()
}

/// RR1: the first habitat whose induced graph fails the mode predicate.
pub fn rr1_trivial_no(instance: &Instance) -> Option<Infeasible> {
    trivial_no_index(instance).map(|h| Infeasible {
        reason: InfeasibleReason::HabitatNotConnected { habitat: h, original_habitat: h },
        trace: ReductionTrace::default(),
    })
}

/// RR2: drop repeated habitats, keeping the first occurrence.
pub fn rr2_dedupe(instance: &Instance) -> (Instance, ReductionTrace) {
    let mut w = Working::new(instance.clone());
    w.rr2();
    (w.inst, w.trace)
}

/// RR3: force every edge whose removal from some `G[H]` breaks it.
pub fn rr3_force_edges(instance: &Instance) -> (Instance, ReductionTrace) {
    let mut w = Working::new(instance.clone());
    w.rr3();
    (w.inst, w.trace)
}

/// RR4: drop habitats already satisfied by the forced edges.
pub fn rr4_drop_solved(instance: &Instance) -> (Instance, ReductionTrace) {
    let mut w = Working::new(instance.clone());
    w.rr4();
    (w.inst, w.trace)
}

/// RR5: delete edges lying in no habitat, charging forced ones to the budget.
pub fn rr5_drop_unused_edges(instance: &Instance) -> Result<(Instance, ReductionTrace), Infeasible> {
    let mut w = Working::new(instance.clone());
    match w.rr5() {
        Ok(_) => Ok((w.inst, w.trace)),
        Err(reason) => Err(w.fail(reason)),
    }
}

/// Applies RR1..RR5 in order until none applies.
pub fn reduce(instance: &Instance) -> Result<Reduction, Infeasible> {
    let mut w = Working::new(instance.clone());
    loop {
        if let Some(reason) = w.rr1() {
            return Err(w.fail(reason));
        }
        let mut changed = w.rr2();
        changed |= w.rr3();
        changed |= w.rr4();
        match w.rr5() {
            Ok(c) => changed |= c,
            Err(reason) => return Err(w.fail(reason)),
        }
        if !changed {
            return Ok(w.finish());
        }
    }
}
