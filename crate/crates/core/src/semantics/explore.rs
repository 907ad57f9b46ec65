//! Breadth-first state-space exploration.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::step::{redex_successors, reduced_successors, successors, RedexDescriptor, Rule, State, Successor};
use super::{Limits, Verdict};
use crate::analysis::StepClass;
use crate::digest::{hex, Digest};
use crate::parser::pretty;
use crate::term::{CalculusId, Name, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Complete,
    /// A bound was hit; the graph is a prefix of the real one.
    Truncated { reason: String },
    /// The stop predicate fired.
    Stopped,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub from: u32,
    pub to: u32,
    pub redex: RedexDescriptor,
    pub map: Vec<(u32, u32)>,
}

/// Reachable states of a term, with state 0 as the root.
#[derive(Clone, Debug)]
pub struct StateGraph {
    pub states: Vec<State>,
    pub edges: Vec<Edge>,
    /// Outgoing edge ids per state.
    pub out: Vec<Vec<u32>>,
    pub depth: Vec<u32>,
    pub index: HashMap<Digest, u32>,
    pub free: Arc<HashSet<Name>>,
    pub status: Status,
    pub limits: Limits,
    /// Built with confluence reduction.
    pub reduced: bool,
}

impl StateGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.status == Status::Complete
    }

    pub fn successors_of(&self, s: u32) -> impl Iterator<Item = &Edge> + '_ {
        self.out[s as usize].iter().map(move |&e| &self.edges[e as usize])
    }

    /// Reverse adjacency: predecessor edge ids per state.
    pub fn incoming(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.states.len()];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.to as usize].push(i as u32);
        }
        inc
    }

    /// States that can reach a state satisfying `pred`.
    pub fn backward_closure(&self, pred: impl Fn(u32) -> bool) -> Vec<bool> {
        let inc = self.incoming();
        let mut mark = vec![false; self.states.len()];
        let mut stack: Vec<u32> = (0..self.states.len() as u32).filter(|&s| pred(s)).collect();
        for &s in &stack {
            mark[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &e in &inc[s as usize] {
                let p = self.edges[e as usize].from;
                if !mark[p as usize] {
                    mark[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        mark
    }

    /// A shortest path of edge ids from the root to `target`.
    pub fn path_to(&self, target: u32) -> Option<Vec<u32>> {
        let mut parent: Vec<Option<u32>> = vec![None; self.states.len()];
        let mut seen = vec![false; self.states.len()];
        let mut queue = std::collections::VecDeque::from([0u32]);
        seen[0] = true;
        while let Some(s) = queue.pop_front() {
            if s == target {
                let mut path = Vec::new();
                let mut cur = s;
                while let Some(e) = parent[cur as usize] {
                    path.push(e);
                    cur = self.edges[e as usize].from;
                }
                path.reverse();
                return Some(path);
            }
            for &e in &self.out[s as usize] {
                let to = self.edges[e as usize].to;
                if !seen[to as usize] {
                    seen[to as usize] = true;
                    parent[to as usize] = Some(e);
                    queue.push_back(to);
                }
            }
        }
        None
    }

    /// Whether some reachable state lies on a cycle.
    pub fn has_cycle(&self) -> bool {
        let n = self.states.len();
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            indeg[e.to as usize] += 1;
        }
        let mut queue: Vec<u32> = (0..n as u32).filter(|&s| indeg[s as usize] == 0).collect();
        let mut done = 0;
        while let Some(s) = queue.pop() {
            done += 1;
            for e in self.successors_of(s) {
                indeg[e.to as usize] -= 1;
                if indeg[e.to as usize] == 0 {
                    queue.push(e.to);
                }
            }
        }
        done < n
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.to_json_with(None)
    }

    /// JSON export; edges carry their step class when `classes` is given.
    pub fn to_json_with(&self, classes: Option<&[StepClass]>) -> serde_json::Value {
        let states: Vec<_> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                json!({
                    "id": i,
                    "digest": hex(s.digest),
                    "depth": self.depth[i],
                    "success": s.has_success(),
                    "term": pretty(&s.to_term()),
                })
            })
            .collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                json!({
                    "from": e.from,
                    "to": e.to,
                    "rule": e.redex.rule,
                    "channel": e.redex.channel.map(|c| c.to_string()),
                    "class": classes.map(|c| c[i]),
                })
            })
            .collect();
        json!({ "status": self.status, "reduced": self.reduced, "states": states, "edges": edges })
    }
}

/// Explore all states reachable from `term` within `limits`.
pub fn explore(term: &Term, _calc: CalculusId, limits: Limits) -> StateGraph {
    explore_until(term, limits, |_| false)
}

/// Explore under confluence reduction: states with a confluent pure-admin
/// step keep only that step. The result is a subgraph of [`explore`]'s that
/// preserves success, weak barbs, terminal states and cycles.
pub fn explore_reduced(term: &Term, limits: Limits) -> StateGraph {
    explore_with(term, limits, true, |_| false)
}

/// Explore until a state satisfies `stop`.
pub fn explore_until(term: &Term, limits: Limits, stop: impl Fn(&State) -> bool + Sync) -> StateGraph {
    explore_with(term, limits, false, stop)
}

pub fn explore_with(
    term: &Term,
    limits: Limits,
    reduce: bool,
    stop: impl Fn(&State) -> bool + Sync,
) -> StateGraph {
    let (root, free) = State::from_term(term);
    let free = Arc::new(free);
    let mut g = StateGraph {
        index: HashMap::from([(root.digest, 0)]),
        states: vec![root],
        edges: Vec::new(),
        out: vec![Vec::new()],
        depth: vec![0],
        free: free.clone(),
        status: Status::Complete,
        limits,
        reduced: reduce,
    };
    if stop(&g.states[0]) {
        g.status = Status::Stopped;
        return g;
    }
    let mut frontier: Vec<u32> = vec![0];
    let mut level = 0usize;
    while !frontier.is_empty() {
        if level >= limits.max_depth {
            g.status = Status::Truncated { reason: format!("depth bound {} reached", limits.max_depth) };
            break;
        }
        let succs: Vec<Vec<Successor>> =
            frontier
                .par_iter()
                .map(|&s| {
                    let st = &g.states[s as usize];
                    if reduce {
                        reduced_successors(st, &free)
                    } else {
                        successors(st, &free)
                    }
                })
                .collect();
        let mut next = Vec::new();
        for (&s, list) in frontier.iter().zip(succs) {
            for sc in list {
                let to = match g.index.get(&sc.state.digest) {
                    Some(&t) => t,
                    None => {
                        if g.states.len() >= limits.max_states {
                            g.status =
                                Status::Truncated { reason: format!("state bound {} reached", limits.max_states) };
                            continue;
                        }
                        let t = g.states.len() as u32;
                        g.index.insert(sc.state.digest, t);
                        let hit = stop(&sc.state);
                        g.states.push(sc.state);
                        g.out.push(Vec::new());
                        g.depth.push(level as u32 + 1);
                        next.push(t);
                        if hit {
                            g.status = Status::Stopped;
                        }
                        t
                    }
                };
                g.out[s as usize].push(g.edges.len() as u32);
                g.edges.push(Edge { from: s, to, redex: sc.redex, map: sc.map });
            }
        }
        if g.status == Status::Stopped {
            break;
        }
        frontier = next;
        level += 1;
    }
    g
}

/// Whether a state with an unguarded success is reachable.
pub fn reaches_success(term: &Term, calc: CalculusId, limits: Limits) -> Verdict {
    let _ = calc;
    let g = explore_until(term, limits, |s| s.has_success());
    match g.status {
        Status::Stopped => Verdict::Yes,
        Status::Complete => Verdict::No,
        Status::Truncated { .. } => Verdict::UnknownBounded(limits),
    }
}

/// Whether an infinite reduction sequence exists. On a finite graph this is a
/// reachable cycle.
pub fn divergent(term: &Term, calc: CalculusId, limits: Limits) -> Verdict {
    let g = explore(term, calc, limits);
    if g.has_cycle() {
        Verdict::Yes
    } else if g.is_complete() {
        Verdict::No
    } else {
        Verdict::UnknownBounded(limits)
    }
}

/// One-step reducts of a term, one per redex, in a deterministic order.
pub fn enabled_steps(term: &Term, _calc: CalculusId) -> Vec<(RedexDescriptor, Term)> {
    let (s, free) = State::from_term(term);
    redex_successors(&s, &free).into_iter().map(|sc| (sc.redex, sc.state.to_term())).collect()
}

/// Observable capability on a free channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Barb {
    pub name: Name,
    pub output: bool,
}

impl fmt::Display for Barb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, if self.output { "!" } else { "?" })
    }
}

/// Strong barbs of a state: unguarded prefixes, sum branches included, whose
/// subject is free.
pub fn state_barbs(s: &State) -> BTreeSet<Barb> {
    let mut out = BTreeSet::new();
    let mut add = |t: &Term| {
        let (ch, output) = match t {
            Term::Output(ch, ..) => (ch, true),
            Term::Input(ch, ..) | Term::RepInput(ch, ..) => (ch, false),
            _ => return,
        };
        if ch.parts().all(|n| !s.is_restricted(n)) {
            out.insert(Barb { name: ch.first, output });
        }
    };
    for c in &s.comps {
        match &**c {
            Term::Sum(bs) => bs.iter().for_each(&mut add),
            t => add(t),
        }
    }
    out
}

pub fn barbs(term: &Term) -> BTreeSet<Barb> {
    state_barbs(&State::from_term(term).0)
}

/// Rule names for display.
pub fn rule_name(r: Rule) -> &'static str {
    match r {
        Rule::Tau => "tau",
        Rule::Com => "com",
        Rule::Rep => "rep",
    }
}
