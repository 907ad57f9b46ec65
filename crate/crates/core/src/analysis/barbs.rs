//! Translated observables and the state signatures built from them.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Serialize, Serializer};

use crate::encodings::EncodingId;
use crate::semantics::{explore_reduced, Limits, State, StateGraph};
use crate::term::{Name, Role, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Direction {
    In,
    Out,
}

/// A source-level observable recovered from a target term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransBarb {
    pub direction: Direction,
    pub name: Name,
}

impl fmt::Display for TransBarb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = if self.direction == Direction::Out { "!" } else { "?" };
        write!(f, "{}{}", self.name, d)
    }
}

impl Serialize for TransBarb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Undo the renaming policy: `src_x` back to `x`.
pub fn source_name(n: Name) -> Name {
    match n.text().strip_prefix("src_") {
        Some(t) => Name::with(t, n.uid(), Role::None),
        None => n.with_role(Role::None),
    }
}

/// `l?(t,f).t!<>` is a positive and `l?(t,f).f!<>` a negative instantiation
/// of the sum lock `l`.
pub fn lock_instantiation(t: &Term) -> Option<(Name, bool)> {
    let Term::Input(ch, xs, body) = t else { return None };
    if ch.is_composed() || xs.len() != 2 || ch.first.role() != Role::SumLock {
        return None;
    }
    let Term::Output(out, args, rest) = &**body else { return None };
    if !args.is_empty() || !rest.is_nil() || out.is_composed() {
        return None;
    }
    if out.first == xs[0] {
        Some((ch.first, true))
    } else if out.first == xs[1] {
        Some((ch.first, false))
    } else {
        None
    }
}

pub fn positive_locks(s: &State) -> HashSet<Name> {
    s.comps.iter().filter_map(|c| lock_instantiation(c)).filter(|(_, p)| *p).map(|(l, _)| l).collect()
}

/// The sum lock tested first by an unguarded test statement in `t`.
fn tested_lock(t: &Term) -> Option<Name> {
    match t {
        Term::Restrict(_, p) => tested_lock(p),
        Term::Par(a, b) => tested_lock(a).or_else(|| tested_lock(b)),
        Term::Output(ch, args, _) if args.len() == 2 && ch.first.role() == Role::SumLock => Some(ch.first),
        _ => None,
    }
}

/// Whether an output is a request of the given encoding, and its direction.
pub fn request_kind(ch: Name, arity: usize, enc: EncodingId) -> Option<Direction> {
    let out_arity = if enc == EncodingId::MixToAsyn2 { 5 } else { 4 };
    match ch.role() {
        Role::RequestChannelOut if arity == out_arity => Some(Direction::Out),
        Role::RequestChannelIn if arity == 3 => Some(Direction::In),
        _ => None,
    }
}

/// Strong translated barbs of a state.
pub fn state_trans_barbs(s: &State, enc: EncodingId) -> BTreeSet<TransBarb> {
    let pos = positive_locks(s);
    let visible = |y: Name| !s.is_restricted(y);
    let mut out = BTreeSet::new();
    for c in &s.comps {
        let found = match (&**c, enc) {
            (Term::Output(ch, args, _), EncodingId::SepToAsyn)
                if !ch.is_composed() && args.len() >= 2 && ch.first.role() == Role::TranslatedSource =>
            {
                (pos.contains(&args[0]) && visible(ch.first)).then_some((ch.first, Direction::Out))
            }
            (Term::Input(ch, xs, body), EncodingId::SepToAsyn)
                if !ch.is_composed() && xs.len() >= 2 && ch.first.role() == Role::TranslatedSource =>
            {
                let live = tested_lock(body).is_some_and(|l| pos.contains(&l));
                (live && visible(ch.first)).then_some((ch.first, Direction::In))
            }
            (Term::RepInput(ch, xs, _), EncodingId::SepToAsyn)
                if !ch.is_composed() && xs.len() >= 2 && ch.first.role() == Role::TranslatedSource =>
            {
                visible(ch.first).then_some((ch.first, Direction::In))
            }
            (Term::Output(ch, args, _), _) if !ch.is_composed() && enc != EncodingId::SepToAsyn => {
                request_kind(ch.first, args.len(), enc)
                    .filter(|_| visible(args[0]) && pos.contains(&args[1]))
                    .map(|d| (args[0], d))
            }
            _ => None,
        };
        if let Some((y, d)) = found {
            out.insert(TransBarb { direction: d, name: source_name(y) });
        }
    }
    out
}

/// Translated barbs of a target term; the weak variant collects them over
/// all reachable states. `None` when the exploration was truncated.
pub fn translated_barbs(t: &Term, enc: EncodingId, weak: bool, limits: Limits) -> Option<BTreeSet<TransBarb>> {
    if !weak {
        return Some(state_trans_barbs(&State::from_term(t).0, enc));
    }
    let g = explore_reduced(t, limits);
    if !g.is_complete() {
        return None;
    }
    Some(g.states.iter().flat_map(|s| state_trans_barbs(s, enc)).collect())
}

/// Success reachability and weak translated barbs of a state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Atom {
    pub success: bool,
    pub barbs: BTreeSet<TransBarb>,
}

/// Weak behaviour of a state: its atom and the atoms of the bottom strongly
/// connected components it can reach. On a complete finite graph two states
/// are bisimilar in the weak-continuation sense exactly when these agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Signature {
    pub atom: Atom,
    pub bottom: BTreeSet<Atom>,
}

/// Strongly connected components, numbered so that every edge goes from a
/// higher to a lower or equal component (sinks first).
pub fn sccs(g: &StateGraph) -> (Vec<u32>, usize) {
    let mut pg: DiGraph<(), ()> = DiGraph::with_capacity(g.len(), g.edges.len());
    for _ in 0..g.len() {
        pg.add_node(());
    }
    for e in &g.edges {
        pg.add_edge(NodeIndex::new(e.from as usize), NodeIndex::new(e.to as usize), ());
    }
    let parts = tarjan_scc(&pg);
    let mut comp = vec![0u32; g.len()];
    for (c, members) in parts.iter().enumerate() {
        for v in members {
            comp[v.index()] = c as u32;
        }
    }
    (comp, parts.len())
}

/// Signatures of every state of a complete graph.
pub struct GraphSignatures {
    atoms: Vec<Atom>,
    state_atom: Vec<u32>,
    state_bottom: Vec<Arc<Vec<u32>>>,
}

impl GraphSignatures {
    pub fn compute(g: &StateGraph, enc: EncodingId) -> GraphSignatures {
        Self::compute_with(g, |s| state_trans_barbs(s, enc))
    }

    pub fn compute_with(g: &StateGraph, barbs: impl Fn(&State) -> BTreeSet<TransBarb>) -> GraphSignatures {
        let (comp, ncomp) = sccs(g);
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); ncomp];
        for (s, &c) in comp.iter().enumerate() {
            members[c as usize].push(s as u32);
        }
        let mut table: HashMap<Atom, u32> = HashMap::new();
        let mut atoms: Vec<Atom> = Vec::new();
        let mut comp_atom = vec![0u32; ncomp];
        let mut comp_success = vec![false; ncomp];
        let mut comp_barbs: Vec<BTreeSet<TransBarb>> = vec![BTreeSet::new(); ncomp];
        let mut comp_bottom: Vec<Arc<Vec<u32>>> = vec![Arc::new(Vec::new()); ncomp];
        for c in 0..ncomp {
            let mut success = false;
            let mut bs = BTreeSet::new();
            let mut succ_comps: BTreeSet<u32> = BTreeSet::new();
            for &s in &members[c] {
                success |= g.states[s as usize].has_success();
                bs.extend(barbs(&g.states[s as usize]));
                for e in g.successors_of(s) {
                    let d = comp[e.to as usize];
                    if d as usize != c {
                        succ_comps.insert(d);
                    }
                }
            }
            for &d in &succ_comps {
                success |= comp_success[d as usize];
                bs.extend(comp_barbs[d as usize].iter().copied());
            }
            let atom = Atom { success, barbs: bs.clone() };
            let id = *table.entry(atom.clone()).or_insert_with(|| {
                atoms.push(atom);
                atoms.len() as u32 - 1
            });
            comp_atom[c] = id;
            comp_success[c] = success;
            comp_barbs[c] = bs;
            comp_bottom[c] = if succ_comps.is_empty() {
                Arc::new(vec![id])
            } else if succ_comps.len() == 1 {
                comp_bottom[*succ_comps.iter().next().unwrap() as usize].clone()
            } else {
                let mut all: BTreeSet<u32> = BTreeSet::new();
                for &d in &succ_comps {
                    all.extend(comp_bottom[d as usize].iter().copied());
                }
                Arc::new(all.into_iter().collect())
            };
        }
        GraphSignatures {
            atoms,
            state_atom: comp.iter().map(|&c| comp_atom[c as usize]).collect(),
            state_bottom: comp.iter().map(|&c| comp_bottom[c as usize].clone()).collect(),
        }
    }

    pub fn atom(&self, s: u32) -> &Atom {
        &self.atoms[self.state_atom[s as usize] as usize]
    }

    pub fn signature(&self, s: u32) -> Signature {
        Signature {
            atom: self.atom(s).clone(),
            bottom: self.state_bottom[s as usize].iter().map(|&a| self.atoms[a as usize].clone()).collect(),
        }
    }
}
