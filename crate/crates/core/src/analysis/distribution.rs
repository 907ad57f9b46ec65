//! Whether independent source steps stay independent after encoding.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::checks::{encoded_signature, Target};
use super::classify::classify_graph;
use super::StepClass;
use crate::encodings::{encode, EncodeError, EncodingId};
use crate::parser::pretty;
use crate::semantics::canon::rebuild;
use crate::semantics::{enabled_steps, explore_reduced, normalize, Limits};
use crate::term::{Name, Role, Term};

#[derive(Debug, Error)]
pub enum DistributionError {
    #[error("split does not partition the {0} top-level components")]
    BadSplit(usize),
    #[error("component group {0} has no step")]
    NoStep(usize),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DistributionVerdict {
    Distributable,
    /// Every simulation needs the same single resource.
    Sequentialized { resource: String, role: Role },
    /// A simulation could not be found, or a bound was hit.
    Undetermined { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct DistributionReport {
    pub encoding: String,
    pub verdict: DistributionVerdict,
    /// Sum lock committed by each group's simulation in the whole encoding.
    pub commits: Vec<String>,
    /// Root components whose removal disables each group's commit.
    pub critical: Vec<Vec<String>>,
    /// Whether the encoding of the whole is congruent to the parallel
    /// composition of the encoded groups.
    pub homomorphic: bool,
    /// Whether each encoded group simulates its own step on its own.
    pub independent: Vec<bool>,
}

/// Top-level parallel components, left to right.
pub fn top_components(s: &Term) -> Vec<Term> {
    fn go(t: &Term, out: &mut Vec<Term>) {
        match t {
            Term::Par(a, b) => {
                go(a, out);
                go(b, out);
            }
            t => out.push(t.clone()),
        }
    }
    let mut out = Vec::new();
    go(s, &mut out);
    out
}

fn undetermined(encoding: String, reason: impl Into<String>) -> DistributionReport {
    DistributionReport {
        encoding,
        verdict: DistributionVerdict::Undetermined { reason: reason.into() },
        commits: Vec::new(),
        critical: Vec::new(),
        homomorphic: false,
        independent: Vec::new(),
    }
}

/// Probe the degree of distribution of `s` split into groups of its
/// top-level components. Each group's first step is its designated step.
pub fn distribution_probe(
    s: &Term,
    split: &[Vec<usize>],
    enc: EncodingId,
    limits: Limits,
) -> Result<DistributionReport, DistributionError> {
    let comps = top_components(s);
    let mut seen = vec![false; comps.len()];
    for &i in split.iter().flatten() {
        if i >= comps.len() || std::mem::replace(&mut seen[i], true) {
            return Err(DistributionError::BadSplit(comps.len()));
        }
    }
    if seen.contains(&false) {
        return Err(DistributionError::BadSplit(comps.len()));
    }
    let groups: Vec<Term> =
        split.iter().map(|g| Term::par_all(g.iter().map(|&i| comps[i].clone()))).collect();
    let t = encode(s, enc)?;
    let name = enc.keyword().to_string();
    let encoded: Vec<Term> = groups.iter().map(|g| encode(g, enc)).collect::<Result<_, _>>()?;
    let homomorphic = normalize(&t, true).digest == normalize(&Term::par_all(encoded.iter().cloned()), true).digest;

    let mut reducts = Vec::new();
    for (i, g) in groups.iter().enumerate() {
        let steps = enabled_steps(g, enc.source());
        let Some((_, r)) = steps.into_iter().next() else { return Err(DistributionError::NoStep(i)) };
        reducts.push(r);
    }
    let mut independent = Vec::new();
    for (e, r) in encoded.iter().zip(&reducts) {
        let ok = match (Target::explore(e, enc, limits), encoded_signature(r, enc, limits)?) {
            (Some(tg), Some(goal)) => tg.find_simulation(&goal).is_some(),
            _ => false,
        };
        independent.push(ok);
    }
    if groups.len() <= 1 {
        return Ok(DistributionReport {
            encoding: name,
            verdict: DistributionVerdict::Distributable,
            commits: Vec::new(),
            critical: Vec::new(),
            homomorphic,
            independent,
        });
    }

    let Some(tg) = Target::explore(&t, enc, limits) else {
        return Ok(undetermined(name, "bound reached exploring the encoding"));
    };
    let mut locks: Vec<Name> = Vec::new();
    for i in 0..groups.len() {
        let whole = Term::par_all(
            groups.iter().enumerate().map(|(j, g)| if j == i { reducts[i].clone() } else { g.clone() }),
        );
        let Some(goal) = encoded_signature(&whole, enc, limits)? else {
            return Ok(undetermined(name, "bound reached exploring a reduct"));
        };
        let Some(path) = tg.find_simulation(&goal) else {
            return Ok(undetermined(name, format!("no simulation of group {i}")));
        };
        let commit = path
            .iter()
            .find(|&&e| tg.classes[e as usize] == StepClass::NonAdmin)
            .and_then(|&e| tg.graph.edges[e as usize].redex.channel)
            .map(|c| c.first)
            .expect("a simulation has a non-admin step");
        locks.push(commit);
    }

    // Remove one non-replicated root component at a time and see which
    // commits remain possible.
    let root = &tg.graph.states[0];
    let mut critical: Vec<Vec<usize>> = vec![Vec::new(); groups.len()];
    for (k, c) in root.comps.iter().enumerate() {
        if matches!(**c, Term::RepInput(..)) {
            continue;
        }
        let rest: Vec<Arc<Term>> =
            root.comps.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, c)| c.clone()).collect();
        let g = explore_reduced(&rebuild(&root.rs, &rest), limits);
        if !g.is_complete() {
            continue;
        }
        let classes = classify_graph(&g);
        for (i, l) in locks.iter().enumerate() {
            let alive = g.edges.iter().zip(&classes).any(|(e, c)| {
                *c == StepClass::NonAdmin && e.redex.channel.is_some_and(|ch| ch.first == *l)
            });
            if !alive {
                critical[i].push(k);
            }
        }
    }
    let mut shared: Vec<usize> = critical[0].clone();
    for c in &critical[1..] {
        shared.retain(|k| c.contains(k));
    }
    let role_of = |k: usize| match &*root.comps[k] {
        Term::Output(ch, ..) | Term::Input(ch, ..) | Term::RepInput(ch, ..) => ch.first.role(),
        _ => Role::None,
    };
    shared.sort_by_key(|&k| (role_of(k) != Role::ChainLock, k));
    let verdict = match shared.first() {
        Some(&k) => DistributionVerdict::Sequentialized { resource: pretty(&root.comps[k]), role: role_of(k) },
        None if enc == EncodingId::SepToAsyn && !homomorphic => {
            DistributionVerdict::Undetermined { reason: "encoding is not homomorphic on the split".into() }
        }
        None => DistributionVerdict::Distributable,
    };
    Ok(DistributionReport {
        encoding: name,
        verdict,
        commits: locks.iter().map(|l| l.to_string()).collect(),
        critical: critical.iter().map(|ks| ks.iter().map(|&k| pretty(&root.comps[k])).collect()).collect(),
        homomorphic,
        independent,
    })
}
