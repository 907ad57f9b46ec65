//! One-step reductions on flattened states.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::canon::{canonicalize, flatten_into, rebuild};
use crate::analysis::StepClass;
use crate::digest::Digest;
use crate::term::{free_name_set, substitute_with, Channel, Fresh, Name, Role, Substitution, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    Tau,
    Com,
    Rep,
}

/// A component of the state, and the branch within it when it is a sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Position {
    pub component: usize,
    pub branch: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedexDescriptor {
    pub rule: Rule,
    /// Tau: the guarded term. Com: input then output. Rep: replicated input then output.
    pub positions: Vec<Position>,
    pub channel: Option<Channel>,
    pub class: Option<StepClass>,
}

/// A state: restricted names and parallel components in canonical order.
#[derive(Clone, Debug)]
pub struct State {
    pub rs: Vec<Name>,
    pub comps: Vec<Arc<Term>>,
    pub next_uid: u32,
    pub digest: Digest,
}

/// Roles whose restricted names are followed across edges.
pub fn tracked(role: Role) -> bool {
    matches!(
        role,
        Role::SumLock | Role::SenderLock | Role::ReceiverLock | Role::TranslatedSource | Role::None
    )
}

impl State {
    /// Flatten and canonicalise a term. Returns the state and its free names.
    pub fn from_term(t: &Term) -> (State, HashSet<Name>) {
        let free = free_name_set(t);
        let mut taken = free.clone();
        let mut fresh = Fresh::above(&[t]);
        let (mut rs, mut comps) = (Vec::new(), Vec::new());
        flatten_into(&Arc::new(t.clone()), &mut rs, &mut comps, &mut taken, &mut fresh);
        let c = canonicalize(&rs, &comps);
        (State { rs: c.rs, comps: c.comps, next_uid: fresh.peek(), digest: c.digest }, free)
    }

    pub fn to_term(&self) -> Term {
        rebuild(&self.rs, &self.comps)
    }

    pub fn is_restricted(&self, n: Name) -> bool {
        self.rs.contains(&n)
    }

    pub fn rs_index(&self, n: Name) -> Option<usize> {
        self.rs.iter().position(|m| *m == n)
    }

    pub fn has_success(&self) -> bool {
        self.comps.iter().any(|c| matches!(**c, Term::Success))
    }

    /// Guard at a position.
    pub fn guard(&self, p: Position) -> &Term {
        let c = &*self.comps[p.component];
        match (c, p.branch) {
            (Term::Sum(bs), Some(b)) => &bs[b],
            _ => c,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Successor {
    pub redex: RedexDescriptor,
    pub state: State,
    /// Restricted-name index in the source state to index in the target state.
    pub map: Vec<(u32, u32)>,
}

struct Cap<'a> {
    pos: Position,
    ch: Channel,
    names: &'a [Name],
    cont: &'a Arc<Term>,
}

fn caps(state: &State) -> (Vec<Cap<'_>>, Vec<Cap<'_>>, Vec<Cap<'_>>, Vec<(Position, &Arc<Term>)>) {
    let (mut ins, mut outs, mut reps, mut taus) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (j, c) in state.comps.iter().enumerate() {
        match &**c {
            Term::Sum(bs) => {
                for (b, g) in bs.iter().enumerate() {
                    let pos = Position { component: j, branch: Some(b) };
                    match g {
                        Term::Output(ch, xs, p) => outs.push(Cap { pos, ch: *ch, names: xs, cont: p }),
                        Term::Input(ch, xs, p) => ins.push(Cap { pos, ch: *ch, names: xs, cont: p }),
                        Term::Tau(p) => taus.push((pos, p)),
                        _ => {}
                    }
                }
            }
            t => {
                let pos = Position { component: j, branch: None };
                match t {
                    Term::Output(ch, xs, p) => outs.push(Cap { pos, ch: *ch, names: xs, cont: p }),
                    Term::Input(ch, xs, p) => ins.push(Cap { pos, ch: *ch, names: xs, cont: p }),
                    Term::RepInput(ch, xs, p) => reps.push(Cap { pos, ch: *ch, names: xs, cont: p }),
                    Term::Tau(p) => taus.push((pos, p)),
                    _ => {}
                }
            }
        }
    }
    (ins, outs, reps, taus)
}

fn build(
    state: &State,
    free: &HashSet<Name>,
    remove: &[usize],
    add: Vec<Arc<Term>>,
    mut fresh: Fresh,
) -> (State, Vec<(u32, u32)>) {
    let mut taken: HashSet<Name> = free.clone();
    taken.extend(state.rs.iter().copied());
    let mut rs = state.rs.clone();
    let mut comps: Vec<Arc<Term>> = state
        .comps
        .iter()
        .enumerate()
        .filter(|(j, _)| !remove.contains(j))
        .map(|(_, c)| c.clone())
        .collect();
    for t in add {
        flatten_into(&t, &mut rs, &mut comps, &mut taken, &mut fresh);
    }
    let c = canonicalize(&rs, &comps);
    let mut map = Vec::new();
    for (i, n) in state.rs.iter().enumerate() {
        if tracked(n.role()) {
            if let Some(k) = c.rs.iter().position(|m| m == n) {
                map.push((i as u32, k as u32));
            }
        }
    }
    (State { rs: c.rs, comps: c.comps, next_uid: fresh.peek(), digest: c.digest }, map)
}

fn admin_channel(state: &State, ch: &Channel) -> bool {
    ch.parts().all(|n| {
        state.is_restricted(n) && !matches!(n.role(), Role::SumLock | Role::TranslatedSource)
    })
}

/// A pure-admin step that no other enabled step can disable or be disabled
/// by: a plain output on a restricted channel whose only receiver is either a
/// replicated input or a plain input facing no other output.
fn confluent_step(state: &State, free: &HashSet<Name>) -> Option<Successor> {
    let (ins, outs, reps, _) = caps(state);
    let count = |v: &[Cap<'_>], ch: &Channel| v.iter().filter(|c| c.ch == *ch).count();
    for o in outs.iter().filter(|o| o.pos.branch.is_none()) {
        if !admin_channel(state, &o.ch) {
            continue;
        }
        let (n_in, n_rep) = (count(&ins, &o.ch), count(&reps, &o.ch));
        let partner = if n_rep == 1 && n_in == 0 {
            reps.iter().find(|r| r.ch == o.ch).map(|r| (r, Rule::Rep))
        } else if n_rep == 0 && n_in == 1 && count(&outs, &o.ch) == 1 {
            ins.iter().find(|i| i.ch == o.ch && i.pos.branch.is_none()).map(|i| (i, Rule::Com))
        } else {
            None
        };
        let Some((i, rule)) = partner else { continue };
        if i.names.len() != o.names.len() {
            continue;
        }
        return Some(communicate(state, free, i, o, rule));
    }
    None
}

fn communicate(state: &State, free: &HashSet<Name>, i: &Cap<'_>, o: &Cap<'_>, rule: Rule) -> Successor {
    let mut fresh = Fresh::starting_at(state.next_uid);
    let sigma = Substitution::from_pairs(i.names.iter().copied().zip(o.names.iter().copied()));
    let body = substitute_with(&sigma, i.cont, &mut fresh);
    let remove: Vec<usize> = match rule {
        Rule::Rep => vec![o.pos.component],
        _ => vec![i.pos.component, o.pos.component],
    };
    let (st, map) = build(state, free, &remove, vec![body, o.cont.clone()], fresh);
    let redex = RedexDescriptor { rule, positions: vec![i.pos, o.pos], channel: Some(i.ch), class: None };
    Successor { redex, state: st, map }
}

/// Successors under confluence reduction: a single confluent pure-admin step
/// when one exists, all successors otherwise.
pub fn reduced_successors(state: &State, free: &HashSet<Name>) -> Vec<Successor> {
    match confluent_step(state, free) {
        Some(s) => vec![s],
        None => successors(state, free),
    }
}

/// All one-step successors, deduplicated on (successor, rule, channel).
pub fn successors(state: &State, free: &HashSet<Name>) -> Vec<Successor> {
    successors_impl(state, free, true)
}

/// One successor per redex, without merging redexes with equal results.
pub fn redex_successors(state: &State, free: &HashSet<Name>) -> Vec<Successor> {
    successors_impl(state, free, false)
}

fn successors_impl(state: &State, free: &HashSet<Name>, dedup: bool) -> Vec<Successor> {
    let (ins, outs, reps, taus) = caps(state);
    let mut out: Vec<Successor> = Vec::new();
    let mut seen: BTreeSet<(Digest, Rule, Option<(u32, u32, Option<(u32, u32)>)>)> = BTreeSet::new();
    let mut push = |redex: RedexDescriptor, st: State, map: Vec<(u32, u32)>, out: &mut Vec<Successor>| {
        let key = redex.channel.map(|c| {
            (c.first.sym(), c.first.uid(), c.second.map(|s| (s.sym(), s.uid())))
        });
        if !dedup || seen.insert((st.digest, redex.rule, key)) {
            out.push(Successor { redex, state: st, map });
        }
    };

    for (pos, cont) in &taus {
        let fresh = Fresh::starting_at(state.next_uid);
        let (st, map) = build(state, free, &[pos.component], vec![(*cont).clone()], fresh);
        let redex = RedexDescriptor { rule: Rule::Tau, positions: vec![*pos], channel: None, class: None };
        push(redex, st, map, &mut out);
    }
    for i in &ins {
        for o in &outs {
            if i.pos.component == o.pos.component || i.ch != o.ch || i.names.len() != o.names.len() {
                continue;
            }
            let sc = communicate(state, free, i, o, Rule::Com);
            push(sc.redex, sc.state, sc.map, &mut out);
        }
    }
    for r in &reps {
        for o in &outs {
            if r.ch != o.ch || r.names.len() != o.names.len() {
                continue;
            }
            let sc = communicate(state, free, r, o, Rule::Rep);
            push(sc.redex, sc.state, sc.map, &mut out);
        }
    }
    out
}
