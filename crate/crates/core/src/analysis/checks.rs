//! Executable versions of the encodings' correctness criteria.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::barbs::{sccs, GraphSignatures, Signature};
use super::bisim::{bounded_bisim, BisimConfig, Variant};
use super::classify::classify_graph;
use super::StepClass;
use crate::digest::hex;
use crate::encodings::{encode, renaming_policy, EncodeError, EncodingId};
use crate::semantics::explore::rule_name;
use crate::semantics::{
    enabled_steps, explore, explore_reduced, explore_with, Limits, Status, StateGraph, Verdict,
};
use crate::term::{alpha_eq, free_names, substitute, Substitution, Term};

/// One state of a witness trace and the step that led to it.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessStep {
    pub state: String,
    pub rule: Option<&'static str>,
    pub channel: Option<String>,
    pub class: Option<StepClass>,
}

/// A state singled out by a check without being a failure.
#[derive(Clone, Debug, Serialize)]
pub struct Label {
    pub state: String,
    pub kind: &'static str,
    pub reached: usize,
    pub of: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub criterion: &'static str,
    pub verdict: Verdict,
    pub limits: Limits,
    pub witnesses: Vec<Vec<WitnessStep>>,
    pub labels: Vec<Label>,
    pub stats: BTreeMap<&'static str, usize>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(criterion: &'static str, limits: Limits) -> CheckReport {
        CheckReport {
            criterion,
            verdict: Verdict::Yes,
            limits,
            witnesses: Vec::new(),
            labels: Vec::new(),
            stats: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn unknown(mut self, why: impl Into<String>) -> CheckReport {
        self.verdict = Verdict::UnknownBounded(self.limits);
        self.notes.push(why.into());
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialises")
    }
}

/// Trace of a path of edge ids from the root.
pub fn witness_trace(g: &StateGraph, classes: Option<&[StepClass]>, path: &[u32]) -> Vec<WitnessStep> {
    let mut out = vec![WitnessStep { state: hex(g.states[0].digest), rule: None, channel: None, class: None }];
    for &e in path {
        let edge = &g.edges[e as usize];
        out.push(WitnessStep {
            state: hex(g.states[edge.to as usize].digest),
            rule: Some(rule_name(edge.redex.rule)),
            channel: edge.redex.channel.map(|c| c.to_string()),
            class: classes.map(|c| c[e as usize]),
        });
    }
    out
}

/// A complete, classified target graph with signatures.
pub struct Target {
    pub graph: StateGraph,
    pub classes: Vec<StepClass>,
    pub sigs: GraphSignatures,
}

impl Target {
    /// Explore an encoded term under confluence reduction. `None` if a bound was hit.
    pub fn explore(t: &Term, enc: EncodingId, limits: Limits) -> Option<Target> {
        let graph = explore_reduced(t, limits);
        if !graph.is_complete() {
            return None;
        }
        let classes = classify_graph(&graph);
        let sigs = GraphSignatures::compute(&graph, enc);
        Some(Target { graph, classes, sigs })
    }

    pub fn root_signature(&self) -> Signature {
        self.sigs.signature(0)
    }

    /// A shortest path with exactly one non-admin step to a state with the
    /// given signature.
    pub fn find_simulation(&self, goal: &Signature) -> Option<Vec<u32>> {
        let g = &self.graph;
        let n = g.len();
        let mut parent: Vec<[Option<(u32, usize)>; 2]> = vec![[None, None]; n];
        let mut seen = vec![[false, false]; n];
        let mut queue = std::collections::VecDeque::from([(0u32, 0usize)]);
        seen[0][0] = true;
        while let Some((s, k)) = queue.pop_front() {
            if k == 1 && self.sigs.atom(s) == &goal.atom && &self.sigs.signature(s) == goal {
                let mut path = Vec::new();
                let (mut cur, mut kk) = (s, k);
                while let Some((e, pk)) = parent[cur as usize][kk] {
                    path.push(e);
                    cur = g.edges[e as usize].from;
                    kk = pk;
                }
                path.reverse();
                return Some(path);
            }
            for &e in &g.out[s as usize] {
                let k2 = k + usize::from(self.classes[e as usize] == StepClass::NonAdmin);
                let to = g.edges[e as usize].to as usize;
                if k2 <= 1 && !seen[to][k2] {
                    seen[to][k2] = true;
                    parent[to][k2] = Some((e, k));
                    queue.push_back((to as u32, k2));
                }
            }
        }
        None
    }
}

/// Signature of the encoding of a source term. `Ok(None)` if a bound was hit.
pub fn encoded_signature(s: &Term, enc: EncodingId, limits: Limits) -> Result<Option<Signature>, EncodeError> {
    let t = encode(s, enc)?;
    Ok(Target::explore(&t, enc, limits).map(|tg| tg.root_signature()))
}

fn success_search(g: &StateGraph) -> (Verdict, Option<Vec<u32>>) {
    match g.status {
        Status::Stopped => {
            let hit = (0..g.len() as u32).find(|&s| g.states[s as usize].has_success());
            (Verdict::Yes, hit.and_then(|s| g.path_to(s)))
        }
        Status::Complete => (Verdict::No, None),
        Status::Truncated { .. } => (Verdict::UnknownBounded(g.limits), None),
    }
}

/// Whether the source and its encoding agree on reachability of success.
pub fn check_success_sensitive(s: &Term, enc: EncodingId, limits: Limits) -> Result<CheckReport, EncodeError> {
    let t = encode(s, enc)?;
    let mut rep = CheckReport::new("success-sensitiveness", limits);
    let gs = explore_with(s, limits, false, |st| st.has_success());
    let gt = explore_with(&t, limits, true, |st| st.has_success());
    let (vs, ps) = success_search(&gs);
    let (vt, pt) = success_search(&gt);
    rep.notes.push(format!("source: {vs:?}, target: {vt:?}"));
    if vs.is_unknown() || vt.is_unknown() {
        return Ok(rep.unknown("exploration bound reached"));
    }
    rep.verdict = Verdict::from_bool(vs == vt);
    if vs != vt {
        if let Some(p) = ps {
            rep.witnesses.push(witness_trace(&gs, None, &p));
        }
        if let Some(p) = pt {
            rep.witnesses.push(witness_trace(&gt, None, &p));
        }
    }
    Ok(rep)
}

/// For every step of the source, look for a target path with exactly one
/// non-admin step that ends in a state bisimilar to the encoded reduct.
pub fn check_completeness(s: &Term, enc: EncodingId, limits: Limits) -> Result<CheckReport, EncodeError> {
    let t = encode(s, enc)?;
    let mut rep = CheckReport::new("operational-completeness", limits);
    let Some(tg) = Target::explore(&t, enc, limits) else {
        return Ok(rep.unknown("target exploration bound reached"));
    };
    let steps = enabled_steps(s, enc.source());
    rep.stats.insert("source_steps", steps.len());
    let mut found = 0;
    for (k, (_, reduct)) in steps.iter().enumerate() {
        let Some(goal) = encoded_signature(reduct, enc, limits)? else {
            return Ok(rep.unknown(format!("bound reached encoding reduct {k}")));
        };
        match tg.find_simulation(&goal) {
            Some(path) => {
                found += 1;
                let nonadmin = path.iter().filter(|&&e| tg.classes[e as usize] == StepClass::NonAdmin).count();
                rep.notes.push(format!("step {k}: simulated in {} steps, {nonadmin} non-admin", path.len()));
                rep.witnesses.push(witness_trace(&tg.graph, Some(&tg.classes), &path));
            }
            None => rep.notes.push(format!("step {k}: no simulating path")),
        }
    }
    rep.stats.insert("simulated", found);
    rep.verdict = Verdict::from_bool(found == steps.len());
    Ok(rep)
}

/// Every reachable target state can continue to the encoding of some source
/// derivative. States that can still reach some but not all encodings of the
/// one-step derivatives are labelled intermediate.
pub fn check_soundness_bounded(s: &Term, enc: EncodingId, limits: Limits) -> Result<CheckReport, EncodeError> {
    let t = encode(s, enc)?;
    let mut rep = CheckReport::new("operational-soundness", limits);
    let gs = explore(s, enc.source(), limits);
    if !gs.is_complete() {
        return Ok(rep.unknown("source exploration bound reached"));
    }
    let Some(tg) = Target::explore(&t, enc, limits) else {
        return Ok(rep.unknown("target exploration bound reached"));
    };
    let mut derived: HashSet<Signature> = HashSet::new();
    for st in &gs.states {
        match encoded_signature(&st.to_term(), enc, limits)? {
            Some(sig) => derived.insert(sig),
            None => return Ok(rep.unknown("bound reached encoding a source derivative")),
        };
    }
    let mut one_step: Vec<Signature> = Vec::new();
    for e in gs.successors_of(0) {
        let sig = encoded_signature(&gs.states[e.to as usize].to_term(), enc, limits)?
            .expect("derivative explored above");
        if !one_step.contains(&sig) {
            one_step.push(sig);
        }
    }
    let g = &tg.graph;
    let sigs: Vec<Signature> = (0..g.len() as u32).map(|x| tg.sigs.signature(x)).collect();
    let good = g.backward_closure(|x| derived.contains(&sigs[x as usize]));
    let bad: Vec<u32> = (0..g.len() as u32).filter(|&x| !good[x as usize]).collect();
    for &b in bad.iter().take(5) {
        if let Some(p) = g.path_to(b) {
            rep.witnesses.push(witness_trace(g, Some(&tg.classes), &p));
        }
    }
    rep.stats.insert("states", g.len());
    rep.stats.insert("unsound", bad.len());
    if one_step.len() >= 3 && one_step.len() <= 64 {
        let masks = reach_masks(g, |x| {
            one_step.iter().enumerate().filter(|(_, o)| **o == sigs[x as usize]).fold(0u64, |m, (i, _)| m | 1 << i)
        });
        let all = masks[0];
        for (x, &m) in masks.iter().enumerate() {
            if m.count_ones() >= 2 && m != all {
                rep.labels.push(Label {
                    state: hex(g.states[x].digest),
                    kind: "intermediate",
                    reached: m.count_ones() as usize,
                    of: one_step.len(),
                });
            }
        }
    }
    rep.stats.insert("intermediate", rep.labels.len());
    rep.verdict = Verdict::from_bool(bad.is_empty());
    Ok(rep)
}

/// Union of `own` over the states reachable from each state.
fn reach_masks(g: &StateGraph, own: impl Fn(u32) -> u64) -> Vec<u64> {
    let (comp, ncomp) = sccs(g);
    let mut cm = vec![0u64; ncomp];
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); ncomp];
    for (x, &c) in comp.iter().enumerate() {
        members[c as usize].push(x as u32);
    }
    for c in 0..ncomp {
        let mut m = 0;
        for &x in &members[c] {
            m |= own(x);
            for e in g.successors_of(x) {
                let d = comp[e.to as usize] as usize;
                if d != c {
                    m |= cm[d];
                }
            }
        }
        cm[c] = m;
    }
    comp.iter().map(|&c| cm[c as usize]).collect()
}

/// `encode(sigma(S))` against the lifted substitution applied to `encode(S)`.
/// Non-injective substitutions are compared by bisimilarity instead.
pub fn check_name_invariance(s: &Term, sigma: &Substitution, enc: EncodingId) -> Result<Verdict, EncodeError> {
    let lifted = renaming_policy(enc).lift(sigma);
    let left = encode(&substitute(sigma, s), enc)?;
    let right = substitute(&lifted, &encode(s, enc)?);
    if sigma.is_injective_on(free_names(s)) {
        return Ok(Verdict::from_bool(alpha_eq(&left, &right)));
    }
    Ok(bounded_bisim(&left, &right, enc, BisimConfig::new(Variant::V2, Limits::default())))
}

/// If the source cannot diverge, neither may its encoding.
pub fn check_divergence_reflection(s: &Term, enc: EncodingId, limits: Limits) -> Result<Verdict, EncodeError> {
    let t = encode(s, enc)?;
    let gs = explore(s, enc.source(), limits);
    if gs.has_cycle() || !gs.is_complete() {
        return Ok(Verdict::UnknownBounded(limits));
    }
    let gt = explore_reduced(&t, limits);
    if gt.has_cycle() {
        Ok(Verdict::No)
    } else if gt.is_complete() {
        Ok(Verdict::Yes)
    } else {
        Ok(Verdict::UnknownBounded(limits))
    }
}
