//! Recognisers for the leftovers that encoded terms accumulate. Advisory only.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::barbs::lock_instantiation;
use crate::encodings::EncodingId;
use crate::parser::pretty;
use crate::semantics::State;
use crate::term::{free_name_set, Name, Role, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum JunkKind {
    /// The unused branch of a decided test.
    TestResidue,
    /// A lock instantiation nobody refers to.
    IsolatedLock,
    /// A request whose sum lock is negative.
    RequestOnNegativeLock,
    /// Encoded branches of a sum whose lock is negative.
    DeadSum,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JunkItem {
    pub kind: JunkKind,
    pub lock: Option<String>,
    pub terms: Vec<String>,
}

impl fmt::Display for JunkItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if let Some(l) = &self.lock {
            write!(f, " on {l}")?;
        }
        write!(f, ": {}", self.terms.join(" | "))
    }
}

/// Number of components in which each name occurs free.
fn occurrences(s: &State) -> HashMap<Name, usize> {
    let mut m = HashMap::new();
    for c in &s.comps {
        for n in free_name_set(c) {
            *m.entry(n).or_insert(0) += 1;
        }
    }
    m
}

/// Junk shapes present in a target state.
pub fn junk_report(s: &State, enc: EncodingId) -> Vec<JunkItem> {
    let occ = occurrences(s);
    let only_here = |n: Name| s.is_restricted(n) && occ.get(&n).copied().unwrap_or(0) == 1;
    let residue = |t: &Term| {
        matches!(t, Term::Input(ch, xs, _) if xs.is_empty()
            && !ch.is_composed()
            && matches!(ch.first.role(), Role::BoolTrueBranch | Role::BoolFalseBranch)
            && only_here(ch.first))
    };
    let mut out = Vec::new();
    let mut negative = Vec::new();
    for c in &s.comps {
        match &**c {
            t if residue(t) => {
                out.push(JunkItem { kind: JunkKind::TestResidue, lock: None, terms: vec![pretty(c)] });
            }
            t => {
                if let Some((l, p)) = lock_instantiation(t) {
                    if only_here(l) {
                        out.push(JunkItem {
                            kind: JunkKind::IsolatedLock,
                            lock: Some(l.to_string()),
                            terms: vec![pretty(c)],
                        });
                    } else if !p {
                        negative.push(l);
                    }
                }
            }
        }
    }
    for l in negative {
        let mut requests = Vec::new();
        let mut rest = Vec::new();
        for c in &s.comps {
            if lock_instantiation(c).is_some_and(|(m, _)| m == l) || residue(c) || !free_name_set(c).contains(&l) {
                continue;
            }
            let is_request = enc != EncodingId::SepToAsyn
                && matches!(&**c, Term::Output(ch, args, _) if !ch.is_composed()
                    && matches!(ch.first.role(), Role::RequestChannelIn | Role::RequestChannelOut)
                    && args.get(1) == Some(&l));
            if is_request {
                requests.push(pretty(c));
            } else {
                rest.push(pretty(c));
            }
        }
        if !requests.is_empty() {
            out.push(JunkItem { kind: JunkKind::RequestOnNegativeLock, lock: Some(l.to_string()), terms: requests });
        }
        if !rest.is_empty() {
            out.push(JunkItem { kind: JunkKind::DeadSum, lock: Some(l.to_string()), terms: rest });
        }
    }
    out
}
