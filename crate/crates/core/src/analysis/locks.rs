//! Sum-lock censuses and request views over explored target graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::barbs::{lock_instantiation, request_kind, Direction};
use crate::digest::hex;
use crate::encodings::EncodingId;
use crate::semantics::{State, StateGraph};
use crate::term::{Name, Role, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if *self == Polarity::Positive { "+" } else { "-" })
    }
}

/// Instantiations per sum lock in one state.
pub fn instantiations(s: &State) -> HashMap<Name, Vec<Polarity>> {
    let mut m: HashMap<Name, Vec<Polarity>> = HashMap::new();
    for c in &s.comps {
        if let Some((l, p)) = lock_instantiation(c) {
            m.entry(l).or_default().push(if p { Polarity::Positive } else { Polarity::Negative });
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LockViolation {
    /// A lock with more than one instantiation.
    Multiple { state: u32, lock: String, count: usize },
    /// A lock whose first instantiation is negative.
    InitiallyNegative { state: u32, lock: String },
    /// A negative lock that became positive again.
    Flipped { state: u32, lock: String },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LockHistory {
    pub counts: Vec<usize>,
    pub polarity: Vec<String>,
}

/// Per-lock counts and polarity along one path.
#[derive(Clone, Debug, Default, Serialize)]
pub struct LockCensus {
    pub locks: BTreeMap<String, LockHistory>,
    pub violations: Vec<LockViolation>,
}

/// Census along a path of edge ids starting at the root. Locks are followed
/// across steps through the edges' restricted-name maps.
pub fn lock_census(g: &StateGraph, path: &[u32]) -> LockCensus {
    let mut census = LockCensus::default();
    // Identity of each restricted index of the current state.
    let root = &g.states[0];
    let mut ids: HashMap<u32, String> =
        root.rs.iter().enumerate().map(|(i, n)| (i as u32, n.to_string())).collect();
    let record = |s: u32, ids: &HashMap<u32, String>, census: &mut LockCensus, step: usize| {
        let st = &g.states[s as usize];
        let inst = instantiations(st);
        for (l, ps) in &inst {
            let key = st.rs_index(*l).and_then(|i| ids.get(&(i as u32)).cloned()).unwrap_or_else(|| l.to_string());
            let h = census.locks.entry(key.clone()).or_default();
            h.counts.resize(step, 0);
            h.counts.push(ps.len());
            if ps.len() > 1 {
                census.violations.push(LockViolation::Multiple { state: s, lock: key.clone(), count: ps.len() });
            }
            let p = ps[0].to_string();
            if h.polarity.is_empty() && ps[0] == Polarity::Negative {
                census.violations.push(LockViolation::InitiallyNegative { state: s, lock: key.clone() });
            }
            if ps[0] == Polarity::Positive && h.polarity.iter().any(|q| q == "-") {
                census.violations.push(LockViolation::Flipped { state: s, lock: key.clone() });
            }
            if h.polarity.last() != Some(&p) {
                h.polarity.push(p);
            }
        }
    };
    record(0, &ids, &mut census, 0);
    for (k, &e) in path.iter().enumerate() {
        let edge = &g.edges[e as usize];
        let to = &g.states[edge.to as usize];
        let mut next: HashMap<u32, String> = HashMap::new();
        for &(a, b) in &edge.map {
            if let Some(id) = ids.get(&a) {
                next.insert(b, id.clone());
            }
        }
        for (i, n) in to.rs.iter().enumerate() {
            next.entry(i as u32).or_insert_with(|| format!("{}@{}", n, k + 1));
        }
        ids = next;
        record(edge.to, &ids, &mut census, k + 1);
    }
    for h in census.locks.values_mut() {
        h.counts.resize(path.len() + 1, 0);
    }
    census
}

/// Lock invariants over a whole graph: at most one instantiation per lock in
/// every state, first instantiations positive, and no lock that was negative
/// on some path to a state is positive there.
pub fn lock_violations(g: &StateGraph) -> Vec<LockViolation> {
    let mut out = Vec::new();
    let n = g.len();
    let mut neg: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    let mut insts = Vec::with_capacity(n);
    for (s, st) in g.states.iter().enumerate() {
        let inst = instantiations(st);
        for (l, ps) in &inst {
            if ps.len() > 1 {
                out.push(LockViolation::Multiple { state: s as u32, lock: l.to_string(), count: ps.len() });
            }
            if ps.contains(&Polarity::Negative) {
                if let Some(i) = st.rs_index(*l) {
                    neg[s].insert(i as u32);
                }
            }
        }
        insts.push(inst);
    }
    for (l, ps) in &insts[0] {
        if ps.contains(&Polarity::Negative) {
            out.push(LockViolation::InitiallyNegative { state: 0, lock: l.to_string() });
        }
    }
    // Locks appearing for the first time on an edge must be positive.
    for e in &g.edges {
        let to = &g.states[e.to as usize];
        for (l, ps) in &insts[e.to as usize] {
            let Some(i) = to.rs_index(*l) else { continue };
            let carried = e.map.iter().any(|&(_, b)| b == i as u32);
            if !carried && ps.contains(&Polarity::Negative) {
                out.push(LockViolation::InitiallyNegative { state: e.to, lock: l.to_string() });
            }
        }
    }
    // Propagate negativity along edges to a fixed point.
    let mut work: Vec<u32> = (0..n as u32).collect();
    while let Some(s) = work.pop() {
        for e in g.successors_of(s) {
            let add: Vec<u32> = e
                .map
                .iter()
                .filter(|(a, _)| neg[s as usize].contains(a))
                .map(|&(_, b)| b)
                .filter(|b| !neg[e.to as usize].contains(b))
                .collect();
            if !add.is_empty() {
                neg[e.to as usize].extend(add);
                work.push(e.to);
            }
        }
    }
    for (s, st) in g.states.iter().enumerate() {
        for (l, ps) in &insts[s] {
            let Some(i) = st.rs_index(*l) else { continue };
            if neg[s].contains(&(i as u32)) && ps.contains(&Polarity::Positive) {
                out.push(LockViolation::Flipped { state: s as u32, lock: l.to_string() });
            }
        }
    }
    out
}

/// A request value: a free name, or a restricted name by its index in the
/// state's restricted names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Free(Name),
    Bound(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RequestKind {
    InputRequest,
    OutputRequest,
}

/// An unguarded request of a mix-encoded state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RequestView {
    pub kind: RequestKind,
    pub channel: Name,
    /// Translated name, sum lock, sender or receiver lock(s), payload.
    pub values: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MalformedRequest {
    pub request: String,
    pub problem: &'static str,
}

fn view(c: &Term, enc: EncodingId) -> Option<Result<RequestView, MalformedRequest>> {
    let Term::Output(ch, args, _) = c else { return None };
    if ch.is_composed() || !matches!(ch.first.role(), Role::RequestChannelIn | Role::RequestChannelOut) {
        return None;
    }
    let bad = |problem| Some(Err(MalformedRequest { request: crate::parser::pretty(c), problem }));
    let Some(dir) = request_kind(ch.first, args.len(), enc) else { return bad("arity does not match the channel") };
    if args[1].role() != Role::SumLock {
        return bad("second value is not a sum lock");
    }
    let (kind, lock_role) = match dir {
        Direction::In => (RequestKind::InputRequest, Role::ReceiverLock),
        Direction::Out => (RequestKind::OutputRequest, Role::SenderLock),
    };
    if args[2].role() != lock_role {
        return bad("third value has the wrong lock role");
    }
    Some(Ok(RequestView { kind, channel: ch.first, values: args.clone() }))
}

/// Unguarded requests of a mix-encoded term.
pub fn requests(t: &Term, enc: EncodingId) -> Result<Vec<RequestView>, MalformedRequest> {
    state_requests(&State::from_term(t).0, enc)
}

pub fn state_requests(s: &State, enc: EncodingId) -> Result<Vec<RequestView>, MalformedRequest> {
    s.comps.iter().filter_map(|c| view(c, enc)).collect()
}

fn tuple(s: &State, r: &RequestView) -> Vec<Value> {
    r.values
        .iter()
        .map(|n| s.rs_index(*n).map_or(Value::Free(*n), |i| Value::Bound(i as u32)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LostRequest {
    pub state: u32,
    pub digest: String,
    pub request: String,
}

/// Requests present initially whose value tuple is missing from some
/// reachable state. Values are followed across steps through the edge maps.
pub fn lost_requests(g: &StateGraph, enc: EncodingId) -> Vec<LostRequest> {
    let n = g.len();
    let mut need: Vec<BTreeSet<(usize, Vec<Value>)>> = vec![BTreeSet::new(); n];
    let root = &g.states[0];
    let initial: Vec<RequestView> = state_requests(root, enc).unwrap_or_default();
    let show: Vec<String> = initial.iter().map(|r| crate::parser::pretty(&Term::output(r.channel, r.values.clone()))).collect();
    need[0] = initial.iter().enumerate().map(|(k, r)| (k, tuple(root, r))).collect();
    let mut out = Vec::new();
    let mut lost_at: BTreeSet<u32> = BTreeSet::new();
    let mut work = vec![0u32];
    while let Some(s) = work.pop() {
        for e in g.successors_of(s) {
            let m: HashMap<u32, u32> = e.map.iter().copied().collect();
            for (k, t) in need[s as usize].clone() {
                let moved: Option<Vec<Value>> = t
                    .iter()
                    .map(|v| match v {
                        Value::Free(x) => Some(Value::Free(*x)),
                        Value::Bound(i) => m.get(i).map(|j| Value::Bound(*j)),
                    })
                    .collect();
                match moved {
                    Some(t2) => {
                        if need[e.to as usize].insert((k, t2)) {
                            work.push(e.to);
                        }
                    }
                    None => {
                        if lost_at.insert(e.to) {
                            out.push(LostRequest {
                                state: e.to,
                                digest: hex(g.states[e.to as usize].digest),
                                request: show[k].clone(),
                            });
                        }
                    }
                }
            }
        }
    }
    for (s, st) in g.states.iter().enumerate() {
        let have: BTreeSet<Vec<Value>> =
            state_requests(st, enc).unwrap_or_default().iter().map(|r| tuple(st, r)).collect();
        for (k, t) in &need[s] {
            if !have.contains(t) {
                out.push(LostRequest {
                    state: s as u32,
                    digest: hex(st.digest),
                    request: show[*k].clone(),
                });
            }
        }
    }
    out
}
