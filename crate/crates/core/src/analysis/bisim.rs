//! Bounded translated barbed bisimilarity between encoded terms.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::barbs::{sccs, state_trans_barbs, GraphSignatures};
use crate::encodings::EncodingId;
use crate::semantics::{explore, explore_reduced, Limits, StateGraph, Verdict};
use crate::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Every step is answered by a weak step to a related state.
    V1,
    /// Every weak step is answered up to a common continuation.
    V2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisimConfig {
    pub variant: Variant,
    pub state_limit: usize,
    pub depth_limit: usize,
}

impl BisimConfig {
    /// Largest combined graph the stepwise check will refine.
    pub const V1_MAX_STATES: usize = 6_000;

    pub fn new(variant: Variant, limits: Limits) -> BisimConfig {
        assert!(limits.max_states > 0 && limits.max_depth > 0, "limits must be positive");
        BisimConfig { variant, state_limit: limits.max_states, depth_limit: limits.max_depth }
    }

    pub fn limits(&self) -> Limits {
        Limits::new(self.state_limit, self.depth_limit)
    }
}

/// Decide bisimilarity of two target terms on their complete state graphs.
/// The weak-continuation variant compares signatures on reduced graphs; the
/// stepwise variant refines a partition over the full graphs.
pub fn bounded_bisim(p: &Term, q: &Term, enc: EncodingId, cfg: BisimConfig) -> Verdict {
    let limits = cfg.limits();
    match cfg.variant {
        Variant::V2 => {
            let (gp, gq) = (explore_reduced(p, limits), explore_reduced(q, limits));
            if !gp.is_complete() || !gq.is_complete() {
                return Verdict::UnknownBounded(limits);
            }
            let sp = GraphSignatures::compute(&gp, enc).signature(0);
            let sq = GraphSignatures::compute(&gq, enc).signature(0);
            Verdict::from_bool(sp == sq)
        }
        Variant::V1 => {
            let calc = enc.target();
            let (gp, gq) = (explore(p, calc, limits), explore(q, calc, limits));
            if !gp.is_complete() || !gq.is_complete() || gp.len() + gq.len() > BisimConfig::V1_MAX_STATES {
                return Verdict::UnknownBounded(limits);
            }
            Verdict::from_bool(stepwise_related(&gp, &gq, enc))
        }
    }
}

/// Bit set over states.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn union(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b))
    }
}

/// Reflexive-transitive reachability per state.
fn reach_sets(g: &StateGraph) -> Vec<Bits> {
    let (comp, ncomp) = sccs(g);
    let n = g.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for (s, &c) in comp.iter().enumerate() {
        members[c as usize].push(s);
    }
    let mut creach: Vec<Bits> = Vec::with_capacity(ncomp);
    for c in 0..ncomp {
        let mut b = Bits::new(n);
        for &s in &members[c] {
            b.set(s);
        }
        for &s in &members[c] {
            for e in g.successors_of(s as u32) {
                let d = comp[e.to as usize] as usize;
                if d != c {
                    let other = creach[d].clone();
                    b.union(&other);
                }
            }
        }
        creach.push(b);
    }
    comp.iter().map(|&c| creach[c as usize].clone()).collect()
}

/// Whether the roots of two complete graphs are related by the largest
/// stepwise bisimulation with matching atoms.
pub fn stepwise_related(gp: &StateGraph, gq: &StateGraph, enc: EncodingId) -> bool {
    let (ap, aq) = (
        GraphSignatures::compute_with(gp, |s| state_trans_barbs(s, enc)),
        GraphSignatures::compute_with(gq, |s| state_trans_barbs(s, enc)),
    );
    let (rp, rq) = (reach_sets(gp), reach_sets(gq));
    // Nodes of the disjoint union: p states first.
    let np = gp.len();
    let reach = |x: usize| -> Box<dyn Iterator<Item = usize> + '_> {
        if x < np {
            Box::new(rp[x].iter())
        } else {
            Box::new(rq[x - np].iter().map(move |y| y + np))
        }
    };
    let mut table = HashMap::new();
    let mut block: Vec<usize> = (0..np + gq.len())
        .map(|x| {
            let a = if x < np { ap.atom(x as u32) } else { aq.atom((x - np) as u32) };
            let k = table.len();
            *table.entry(a.clone()).or_insert(k)
        })
        .collect();
    let mut count = table.len();
    loop {
        let mut next = HashMap::new();
        let refined: Vec<usize> = (0..block.len())
            .map(|x| {
                let seen: BTreeSet<usize> = reach(x).map(|y| block[y]).collect();
                let k = next.len();
                *next.entry((block[x], seen)).or_insert(k)
            })
            .collect();
        let done = next.len() == count;
        count = next.len();
        block = refined;
        if done {
            break;
        }
    }
    block[0] == block[np]
}
